"""Run configuration shared by every entry point."""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

from .gfp import DEFAULT_PRIME, check_prime

DEFAULT_SEED = 20110401
DEFAULT_BUDGET = 2 * 10**8
PRIME_ENV = "SPLITSECANT_PRIME"
SEED_ENV = "SPLITSECANT_SEED"


@dataclass(frozen=True)
class RunConfig:
    """Knobs for a verification run.

    Attributes:
        prime: field characteristic used for all rank computations.
        seed: base seed; attempt k of a statement draws from (seed, k).
        max_attempts: how many independent random specializations to try.
        matrix_cell_budget: refuse to build generator matrices with more
            cells than this; None disables the check.
        block_rows: rows handed to the elimination kernel per step.
        workers: process-pool size for independent cases (1 = in-process).
        output: report format for the command line.
    """

    prime: int = DEFAULT_PRIME
    seed: int = DEFAULT_SEED
    max_attempts: int = 3
    matrix_cell_budget: int | None = DEFAULT_BUDGET
    block_rows: int = 512
    workers: int = 1
    output: str = "json"

    def __post_init__(self) -> None:
        check_prime(self.prime)
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        if self.matrix_cell_budget is not None and self.matrix_cell_budget <= 0:
            raise ValueError("matrix_cell_budget must be positive")
        if self.block_rows < 1 or self.workers < 1:
            raise ValueError("block_rows and workers must be >= 1")
        if self.output not in ("json", "text", "dot"):
            raise ValueError(f"unknown output format {self.output!r}")

    def with_(self, **changes) -> "RunConfig":
        return replace(self, **changes)

    @classmethod
    def from_env(cls, **overrides) -> "RunConfig":
        """Defaults, then environment overrides, then explicit overrides."""
        kwargs = {}
        if os.environ.get(PRIME_ENV):
            kwargs["prime"] = int(os.environ[PRIME_ENV])
        if os.environ.get(SEED_ENV):
            kwargs["seed"] = int(os.environ[SEED_ENV])
        kwargs.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kwargs)
