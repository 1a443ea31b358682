from __future__ import annotations

import argparse
import os
from pathlib import Path

import numpy as np

import config
from errors import InvalidInputError


class Settings:
    def __init__(self):
        """
        Initialize run options from configuration defaults.

        Returns:
            None: Fills every option with the value from `config`.
        """
        self.command = ""
        self.scenario_path: Path | None = None
        self.witness_path: Path | None = None
        self.ensemble_path: Path | None = None
        self.behavior_path: Path | None = None
        self.out_path: Path | None = None

        self.alpha: float | None = None
        self.grid = str(config.CURVE_DEFAULT_POINTS)
        self.values: list[float] = []
        self.n_bits: list[int] = [2, 3, 4]

        # Search
        self.dim = 2
        self.restarts = config.SEESAW_RESTARTS
        self.seed = config.SEED
        self.tol = config.VALUE_ACCURACY
        self.workers = config.DEFAULT_WORKERS

        self.check = False
        self.verbose = False

    @classmethod
    def from_args(cls, args: argparse.Namespace, environ: dict[str, str] | None = None) -> Settings:
        """
        Build settings from parsed arguments, falling back to the environment for workers.

        Args:
            args (argparse.Namespace): Output of the CLI parser.
            environ (dict[str, str] | None): Environment to read INFOCORR_WORKERS from.

        Returns:
            Settings: Clamped and validated options.
        """
        environ = os.environ if environ is None else environ
        settings = cls()
        settings.command = args.command
        for name in ("scenario", "witness", "ensemble", "behavior", "out"):
            value = getattr(args, name, None)
            if value is not None:
                setattr(settings, f"{name}_path", Path(value))
        if getattr(args, "alpha", None) is not None:
            settings.alpha = float(args.alpha)
        if getattr(args, "grid", None):
            settings.grid = args.grid
        if getattr(args, "values", None):
            settings.values = [float(v) for v in args.values.split(",") if v.strip()]
        if getattr(args, "n_bits", None):
            settings.n_bits = [int(v) for v in args.n_bits.split(",") if v.strip()]

        if getattr(args, "dim", None) is not None:
            settings.set_dim(args.dim)
        if getattr(args, "restarts", None) is not None:
            settings.set_restarts(args.restarts)
        if getattr(args, "seed", None) is not None:
            settings.seed = int(args.seed)
        if getattr(args, "tol", None) is not None:
            settings.tol = float(args.tol)

        workers = getattr(args, "workers", None)
        if workers is None and config.WORKERS_ENV_VAR in environ:
            try:
                workers = int(environ[config.WORKERS_ENV_VAR])
            except ValueError as exc:
                raise InvalidInputError(
                    f"{config.WORKERS_ENV_VAR} must be an integer, got {environ[config.WORKERS_ENV_VAR]!r}"
                ) from exc
        if workers is not None:
            settings.set_workers(workers)

        settings.check = bool(getattr(args, "check", False))
        settings.verbose = bool(getattr(args, "verbose", False))
        settings.validate()
        return settings

    def set_workers(self, workers: int):
        """
        Set the worker count within limits.

        Returns:
            None: Clamps `workers` to [1, MAX_WORKERS].
        """
        self.workers = min(max(int(workers), 1), config.MAX_WORKERS)

    def set_restarts(self, restarts: int):
        """
        Set the seesaw restart count within limits.

        Returns:
            None: Clamps `restarts` to [0, MAX_RESTARTS]; 0 disables the seesaw column of a curve.
        """
        self.restarts = min(max(int(restarts), 0), config.MAX_RESTARTS)

    def set_dim(self, dim: int):
        """
        Set the message dimension for the seesaw within limits.

        Returns:
            None: Clamps `dim` to [1, MAX_DIM].
        """
        self.dim = min(max(int(dim), 1), config.MAX_DIM)

    def validate(self):
        """
        Check that input files exist and numeric options are in range.

        Raises:
            InvalidInputError: On the first missing file or out-of-range option.
        """
        for path in (self.scenario_path, self.witness_path, self.ensemble_path, self.behavior_path):
            if path is not None and not path.is_file():
                raise InvalidInputError(f"input file {path} does not exist")
        if self.alpha is not None and (not np.isfinite(self.alpha) or self.alpha < 0.0):
            raise InvalidInputError(f"--alpha must be a non-negative number of bits, got {self.alpha!r}")
        if not self.tol > 0.0:
            raise InvalidInputError(f"--tol must be positive, got {self.tol!r}")
        if any(n < 1 for n in self.n_bits):
            raise InvalidInputError("--n-bits entries must be positive")

    def alpha_grid(self, top: float) -> list[float]:
        """
        Expand the grid option into alpha values.

        A single integer N means N evenly spaced points on [0, top]; otherwise a
        comma-separated list of numbers, where `max` stands for top.

        Args:
            top (float): Largest meaningful alpha, H_min(X) of the scenario.

        Returns:
            list[float]: Alpha values in the order given.
        """
        spec = self.grid.strip()
        if spec.isdigit():
            count = int(spec)
            if count < 1:
                raise InvalidInputError("--grid needs at least one point")
            return [float(a) for a in np.linspace(0.0, top, count)] if count > 1 else [0.0]
        values = []
        for token in spec.split(","):
            token = token.strip()
            if not token:
                continue
            try:
                values.append(top if token == "max" else float(token))
            except ValueError as exc:
                raise InvalidInputError(f"--grid entry {token!r} is not a number") from exc
        if not values:
            raise InvalidInputError("--grid is empty")
        if any(v < 0.0 or v > top + config.PROBABILITY_TOL for v in values):
            raise InvalidInputError(f"--grid values must lie in [0, {top}]")
        return [min(v, top) for v in values]
