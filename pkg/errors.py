class InfocorrError(Exception):
    "Base class for every error raised by this project."
    pass


class InvalidInputError(InfocorrError, ValueError):
    "Raised when a probability, shape or option is outside its valid range."
    pass


class UnsupportedScenarioError(InvalidInputError):
    "Raised when an operation is asked for a scenario it does not handle (e.g. k != 2)."
    pass


class ParseError(InfocorrError):
    "Raised when an input file cannot be decoded into a domain object."
    pass


class CapacityError(InfocorrError):
    "Raised when strategy enumeration would exceed the configured budget."

    def __init__(self, required: int, budget: int):
        super().__init__(
            f"enumeration needs {required} deterministic strategies, budget is {budget}; "
            "raise the budget or shrink the scenario"
        )
        self.required = required
        self.budget = budget


class ConvergenceError(InfocorrError):
    "Raised when a solver stops before reaching its accuracy target."

    def __init__(self, message: str, lower: float | None = None, upper: float | None = None):
        super().__init__(message)
        self.lower = lower
        self.upper = upper


class LpCyclingError(ConvergenceError):
    "Raised when the simplex method exceeds its pivot budget."
    pass


class CheckFailedError(InfocorrError):
    "Raised when a --check re-verification disagrees with the reported result."
    pass
