from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from typing import Callable, Sequence

import numpy as np

import config
from bounds.classical import ClassicalPolytope, behavior_row_partition_cost
from bounds.dibound import di_info_curve, di_max_witness, di_min_info, di_min_info_bruteforce
from bounds.quantum import analytic_f1_curve, guessing_solution, info_eigen_bound, info_from_guessing, info_of_mixed
from bounds.rac import rac_table, random_ea_strategy, verify_ea_ceiling
from bounds.seesaw import seesaw_max_witness
from errors import (
    CapacityError,
    CheckFailedError,
    ConvergenceError,
    InfocorrError,
    InvalidInputError,
    ParseError,
)
from models.codec import (
    load_behavior,
    load_ensemble,
    load_scenario,
    load_witness,
    strategy_to_dict,
    write_json,
)
from models.scenario import InfoBudget, Scenario
from models.witness import Witness, f1_witness, witness_value
from settings import Settings
from ui.reports import (
    format_number,
    render_ea_report,
    render_info,
    render_seesaw,
    render_witness_bound,
    write_csv,
)

logger = logging.getLogger(__name__)


def configure_logging(verbose: bool = False) -> None:
    os.makedirs(config.LOG_DIR, exist_ok=True)
    logging.basicConfig(
        filename=config.LOG_FILE,
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s - %(levelname)s - %(message)s",
    )
    if verbose:
        console = logging.StreamHandler(sys.stderr)
        console.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        logging.getLogger().addHandler(console)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise CheckFailedError(message)


def _scenario(settings: Settings) -> Scenario:
    if settings.scenario_path is None:
        return Scenario.uniform(3, 2, 2)
    return load_scenario(settings.scenario_path)


def _witness(settings: Settings, scenario: Scenario) -> Witness:
    if settings.witness_path is None:
        raise InvalidInputError("--witness is required for this command")
    return load_witness(settings.witness_path, scenario)


def _alpha(settings: Settings) -> float:
    if settings.alpha is None:
        raise InvalidInputError("--alpha is required for this command")
    return settings.alpha


def _is_uniform_f1(witness: Witness) -> bool:
    reference = f1_witness()
    return witness.scenario == reference.scenario and bool(
        np.array_equal(witness.coefficients, reference.coefficients)
    )


def cmd_classical_bound(settings: Settings) -> int:
    scenario = _scenario(settings)
    witness = _witness(settings, scenario)
    budget = InfoBudget.from_alpha(scenario, _alpha(settings))
    polytope = ClassicalPolytope(scenario, workers=settings.workers)
    bound = polytope.witness_bound(witness, budget)
    reports = []
    if witness.bound_fn is not None:
        reports.append(polytope.check_inequality(witness, budget, witness.bound(budget.cap)))
    print(render_witness_bound(witness.name, budget.alpha, bound, reports))

    if settings.check:
        for vertex in polytope.vertices:
            _require(
                abs(vertex.cost - behavior_row_partition_cost(vertex.behavior)) <= 1e-12,
                "vertex cost differs from the row-partition oracle",
            )
        tables, _, _ = polytope.restricted_points(budget)
        envelope = float(witness.values_of(tables).max())
        _require(
            abs(envelope - bound.value) <= config.FACET_TOL * max(1.0, abs(envelope)),
            f"LP bound {bound.value!r} differs from the vertex envelope {envelope!r}",
        )
        logger.info("classical-bound check passed")

    if settings.out_path is not None:
        payload = {"alpha": budget.alpha, "cap": budget.cap, "value": bound.value}
        if reports:
            payload.update(reports[0].to_dict())
            payload["value"] = bound.value
        write_json(settings.out_path, payload)
    return config.EXIT_OK


def cmd_info(settings: Settings) -> int:
    if settings.ensemble_path is None:
        raise InvalidInputError("--ensemble is required for this command")
    ensemble, _ = load_ensemble(settings.ensemble_path)
    solution = guessing_solution(ensemble)
    info = info_from_guessing(ensemble.prior, solution.value)
    eigen_bound, tight = info_eigen_bound(ensemble)
    certificate_trace = solution.certificate.trace()
    print(render_info(info, solution.value, eigen_bound, tight, certificate_trace))

    if settings.check:
        y = solution.certificate.entries
        worst = min(float(np.linalg.eigvalsh(y - a).min()) for a in ensemble.weighted())
        _require(worst >= -1e-7, f"dual certificate infeasible (min eigenvalue {worst:.3e})")
        _require(solution.gap <= settings.tol, f"SDP gap {solution.gap:.3e} above {settings.tol:.1e}")
        _require(info <= eigen_bound + settings.tol, "SDP information exceeds the eigenvalue bound")
        _require(info <= math.log2(ensemble.dim) + settings.tol, "information exceeds log2 d")
        logger.info("info check passed")

    if settings.out_path is not None:
        write_json(
            settings.out_path,
            {
                "info_bits": info,
                "guessing": solution.value,
                "lower": solution.lower,
                "upper": solution.upper,
                "eigen_bound": eigen_bound,
                "tight": tight,
            },
        )
    return config.EXIT_OK


def cmd_curve(settings: Settings) -> int:
    scenario = _scenario(settings)
    witness = _witness(settings, scenario)
    polytope = ClassicalPolytope(scenario, workers=settings.workers)
    analytic = _is_uniform_f1(witness)
    rows = []
    for alpha in settings.alpha_grid(scenario.hmin):
        budget = InfoBudget.from_alpha(scenario, alpha)
        classical = polytope.witness_bound(witness, budget).value
        # Classical strategies are quantum strategies with the same information.
        quantum = classical
        if analytic:
            quantum = max(quantum, analytic_f1_curve(min(alpha, config.LOG2_3)))
        if settings.restarts > 0 and scenario.k == 2:
            found = seesaw_max_witness(
                scenario, witness, alpha, dim=settings.dim, restarts=settings.restarts,
                seed=settings.seed, workers=settings.workers,
            )
            quantum = max(quantum, found.value)
        di = di_max_witness(witness, budget)
        rows.append((alpha, classical, quantum, di))
        logger.info("curve alpha=%.6f classical=%.9f quantum=%.9f di=%.9f", alpha, classical, quantum, di)

    if settings.check:
        for alpha, classical, quantum, di in rows:
            _require(
                di >= quantum - 1e-9 >= classical - 2e-9,
                f"curve ordering violated at alpha={alpha!r}: {di!r} >= {quantum!r} >= {classical!r}",
            )
        logger.info("curve check passed")

    text = write_csv(rows, ("alpha", "classical_bound", "quantum_lower_bound", "di_upper_bound"), settings.out_path)
    if settings.out_path is None:
        sys.stdout.write(text)
    return config.EXIT_OK


def cmd_membership(settings: Settings) -> int:
    if settings.behavior_path is None:
        raise InvalidInputError("--behavior is required for this command")
    behavior = load_behavior(settings.behavior_path)
    classical = ClassicalPolytope(behavior.scenario, workers=settings.workers).min_info_membership(behavior)
    di = di_min_info(behavior)
    print(f"classical min information   {classical:.9f} bits")
    print(f"theory-independent minimum  {di:.9f} bits")

    if settings.check:
        _require(di <= classical + settings.tol, "theory-independent bound exceeds the classical requirement")
        brute = di_min_info_bruteforce(behavior)
        _require(abs(brute - di) <= 1e-9, f"post-processing oracle gives {brute!r}, closed form {di!r}")
        logger.info("membership check passed")

    if settings.out_path is not None:
        write_json(settings.out_path, {"classical_bits": classical, "di_bits": di})
    return config.EXIT_OK


def cmd_di_bound(settings: Settings) -> int:
    scenario = _scenario(settings)
    witness = _witness(settings, scenario)
    if settings.values:
        rows = di_info_curve(witness, settings.values)
        if settings.check:
            ordered = sorted(rows)
            _require(
                all(b[1] >= a[1] - config.DI_BISECTION_TOL for a, b in zip(ordered, ordered[1:])),
                "information curve is not monotone",
            )
        text = write_csv(rows, ("value", "alpha_min"), settings.out_path)
        if settings.out_path is None:
            sys.stdout.write(text)
        return config.EXIT_OK

    budget = InfoBudget.from_alpha(scenario, _alpha(settings))
    value = di_max_witness(witness, budget)
    print(f"theory-independent ceiling at alpha={format_number(budget.alpha)}: {format_number(value)}")
    if settings.check:
        lower = di_max_witness(witness, InfoBudget.from_alpha(scenario, 0.0))
        upper = di_max_witness(witness, InfoBudget.from_alpha(scenario, scenario.hmin))
        _require(lower - 1e-9 <= value <= upper + 1e-9, "ceiling is not monotone in alpha")
    if settings.out_path is not None:
        write_json(settings.out_path, {"alpha": budget.alpha, "cap": budget.cap, "value": value})
    return config.EXIT_OK


def cmd_rac(settings: Settings) -> int:
    rows = rac_table(settings.n_bits)
    if settings.check:
        for row in rows:
            n_bits = row["n_bits"]
            if row["variant"] == "worst_case" and n_bits in (2, 3, 4):
                expected = 0.5 + 0.5 / math.sqrt(n_bits)
                _require(abs(row["score"] - expected) <= 1e-9, f"worst-case score for n={n_bits} is {row['score']!r}")
            _require(row["info_bits"] <= 1.0 + 1e-4, f"reference ensemble for n={n_bits} carries more than one bit")
        rng = np.random.default_rng(config.SEED)
        for _ in range(config.EA_CHECK_SAMPLES):
            strategy = random_ea_strategy(rng, d=2, dim_a=2, dim_b=2, outcomes=2, n=4, l=2)
            report = verify_ea_ceiling(strategy)
            logger.debug("EA sample: %s", render_ea_report(report))
            _require(report.passed, render_ea_report(report))
        logger.info("rac check passed")
    text = write_csv(
        [(r["n_bits"], r["variant"], r["score"], r["info_bits"]) for r in rows],
        ("n_bits", "variant", "score", "info_bits"),
        settings.out_path,
    )
    if settings.out_path is None:
        sys.stdout.write(text)
    return config.EXIT_OK


def cmd_seesaw(settings: Settings) -> int:
    scenario = _scenario(settings)
    witness = _witness(settings, scenario)
    alpha = _alpha(settings)
    if settings.restarts < 1:
        raise InvalidInputError("--restarts must be at least 1 for the seesaw")
    result = seesaw_max_witness(
        scenario, witness, alpha, dim=settings.dim, restarts=settings.restarts,
        seed=settings.seed, workers=settings.workers,
    )
    print(render_seesaw(result, alpha))

    if settings.check:
        value = witness_value(witness, result.strategy.behavior())
        info = info_of_mixed(result.strategy.mixed_ensemble())
        _require(abs(value - result.value) <= settings.tol, "re-evaluated witness value differs")
        _require(abs(info - result.info) <= settings.tol, "re-evaluated information differs")
        _require(info <= alpha + config.SEESAW_FEASIBILITY_TOL, f"strategy carries {info!r} bits > alpha")
        logger.info("seesaw check passed")

    if settings.out_path is not None:
        payload = {"alpha": alpha, "value": result.value, "info_bits": result.info, **strategy_to_dict(result.strategy)}
        write_json(settings.out_path, payload)
    return config.EXIT_OK


COMMANDS: dict[str, Callable[[Settings], int]] = {
    "classical-bound": cmd_classical_bound,
    "info": cmd_info,
    "curve": cmd_curve,
    "membership": cmd_membership,
    "di-bound": cmd_di_bound,
    "rac": cmd_rac,
    "seesaw": cmd_seesaw,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="infocorr",
        description="Classical, quantum and theory-independent limits on information-restricted correlations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", help="write the result (CSV or JSON) to this path")
        p.add_argument("--workers", type=int, help=f"worker processes (default ${config.WORKERS_ENV_VAR} or 1)")
        p.add_argument("--tol", type=float, help="accuracy used by --check")
        p.add_argument("--check", action="store_true", help="re-verify the result against independent oracles")
        p.add_argument("--verbose", action="store_true", help="log to stderr as well")

    def frame(p: argparse.ArgumentParser) -> None:
        p.add_argument("--scenario", help="scenario JSON (default: (3,2,2) with uniform prior)")
        p.add_argument("--witness", required=True, help="witness JSON")

    def search(p: argparse.ArgumentParser, restarts: int) -> None:
        p.add_argument("--dim", type=int, default=2, help="message dimension of the seesaw")
        p.add_argument("--restarts", type=int, default=restarts, help="seesaw restarts")
        p.add_argument("--seed", type=int, default=config.SEED, help="base seed of the seesaw")

    p = sub.add_parser("classical-bound", help="classical witness bound at information alpha")
    frame(p)
    p.add_argument("--alpha", type=float, required=True)
    common(p)

    p = sub.add_parser("info", help="information carried by an ensemble")
    p.add_argument("--ensemble", required=True)
    common(p)

    p = sub.add_parser("curve", help="classical, quantum and theory-independent curves over alpha")
    frame(p)
    p.add_argument("--grid", help="N points on [0, H_min] or a comma list of alphas ('max' allowed)")
    search(p, restarts=0)
    common(p)

    p = sub.add_parser("membership", help="least information needed for a behavior")
    p.add_argument("--behavior", required=True)
    common(p)

    p = sub.add_parser("di-bound", help="theory-independent witness ceiling or information curve")
    frame(p)
    p.add_argument("--alpha", type=float)
    p.add_argument("--values", help="comma list of witness values for the information curve")
    common(p)

    p = sub.add_parser("rac", help="random access code score table")
    p.add_argument("--n-bits", dest="n_bits", help="comma list of input lengths (default 2,3,4)")
    common(p)

    p = sub.add_parser("seesaw", help="seesaw lower bound on the quantum witness value")
    frame(p)
    p.add_argument("--alpha", type=float, required=True)
    search(p, restarts=config.SEESAW_RESTARTS)
    common(p)
    return parser


EXIT_CODES: tuple[tuple[type[InfocorrError], int], ...] = (
    (ParseError, config.EXIT_PARSE),
    (CapacityError, config.EXIT_CAPACITY),
    (ConvergenceError, config.EXIT_CONVERGENCE),
    (CheckFailedError, config.EXIT_CHECK_FAILED),
    (InvalidInputError, config.EXIT_INVALID),
)


def main(argv: Sequence[str] | None = None) -> int:
    """
    Parse arguments, run one command and map failures to exit codes.

    Returns:
        int: 0 on success, 3 parse, 4 capacity, 5 convergence, 6 invalid input, 7 failed check.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(getattr(args, "verbose", False))
    try:
        settings = Settings.from_args(args)
        logger.info("running %s", settings.command)
        return COMMANDS[settings.command](settings)
    except InfocorrError as exc:
        for kind, code in EXIT_CODES:
            if isinstance(exc, kind):
                logger.error("%s failed: %s", args.command, exc)
                print(f"error: {exc}", file=sys.stderr)
                return code
        raise


if __name__ == "__main__":
    sys.exit(main())
