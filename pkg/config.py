import math

# Numerical tolerances
PROBABILITY_TOL = 1e-12
STATE_TOL = 1e-10
HERMITIAN_TOL = 1e-12
QUANTIZATION_STEP = 1e-12
VALUE_ACCURACY = 1e-6
EIGEN_TIGHT_TOL = 1e-5

# Linear programming
LP_FEASIBILITY_TOL = 1e-9
LP_OPTIMALITY_TOL = 1e-9
LP_PIVOT_TOL = 1e-11
LP_BLAND_AFTER = 50  # Dantzig pricing until this many pivots, Bland afterwards
LP_MAX_PIVOTS = 5000

# Guessing-probability SDP (dual barrier)
SDP_GAP_TOL = 1e-8
SDP_BARRIER_T0 = 1.0
SDP_BARRIER_MU = 8.0
SDP_MAX_OUTER = 60
SDP_MAX_NEWTON = 80
SDP_NEWTON_TOL = 1e-10
SDP_REGULARIZATION = 1e-12
SDP_MAX_DIM = 16
SDP_MAX_STATES = 64

# Classical polytope
ENUMERATION_BUDGET = 4**4 * 10**7
FACET_TOL = 1e-9
RANK_TOL = 1e-9

# Seesaw search
SEESAW_RESTARTS = 50
SEESAW_PENALTY = 100.0
SEESAW_MAX_ITERATIONS = 300
SEESAW_PATIENCE = 40
SEESAW_INITIAL_STEP = 0.3
SEESAW_MIN_STEP = 1e-5
SEESAW_STEP_UP = 1.5  # one-fifth success rule
SEESAW_STEP_DOWN = 0.9
SEESAW_MAX_DIM = 8
SEESAW_FEASIBILITY_TOL = 1e-4
SEED = 20190101

# Entanglement-assisted ceiling check (rac --check)
EA_CHECK_SAMPLES = 20

# Device-independent bounds
DI_BISECTION_TOL = 1e-6
DI_BISECTION_MAX_ITER = 60

# Analytic (3,2,2) strategies
LOG2_3 = math.log2(3)
F1_CORRELATORS = ((-1, -1), (-1, 1), (1, 0))
F2_CORRELATORS = ((-1, -1), (-1, 1), (2, 0))

# Reports
CSV_SIGNIFICANT_DIGITS = 12
JSON_SIGNIFICANT_DIGITS = 17
CURVE_DEFAULT_POINTS = 11
LOG_DIR = "logs"
LOG_FILE = "logs/infocorr.log"

# Command line
WORKERS_ENV_VAR = "INFOCORR_WORKERS"
DEFAULT_WORKERS = 1
MAX_WORKERS = 64
MAX_DIM = 8
MAX_RESTARTS = 10_000

EXIT_OK = 0
EXIT_PARSE = 3
EXIT_CAPACITY = 4
EXIT_CONVERGENCE = 5
EXIT_INVALID = 6
EXIT_CHECK_FAILED = 7
