"""Dimensions of secant varieties of the variety of completely decomposable forms."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable

from .config import RunConfig
from .statements import StatementOutcome, StatementParams, evaluate_statement

CLOSED_FORM = "ClosedForm"
RANK = "Rank"
KNOWN_RESULT = "KnownResult"

NONDEFECTIVE = "Nondefective"
INCONCLUSIVE = "Inconclusive"


def defective_by_closed_form(k: int) -> str:
    return f"DefectiveByClosedForm({k})"


@dataclass(frozen=True)
class SecantQuery:
    """The s-th secant variety of degree-d split forms in n+1 variables."""

    n: int
    d: int
    s: int

    def __post_init__(self) -> None:
        if self.n < 1 or self.d < 1 or self.s < 1:
            raise ValueError(f"need n, d, s >= 1, got {self.n}, {self.d}, {self.s}")


@dataclass(frozen=True)
class SecantReport:
    n: int
    d: int
    s: int
    expected: int
    achieved: int
    verdict: str
    provenance: str
    seed: int
    prime: int

    @property
    def defect(self) -> int:
        return self.expected - self.achieved

    @property
    def certified(self) -> bool:
        return self.verdict != INCONCLUSIVE

    def to_dict(self) -> dict:
        return {
            "n": self.n, "d": self.d, "s": self.s,
            "expected": self.expected, "achieved": self.achieved,
            "verdict": self.verdict, "provenance": self.provenance,
            "seed": self.seed, "prime": self.prime,
        }


def expected_affine_dim(q: SecantQuery) -> int:
    return min(q.s * (q.d * q.n + 1), comb(q.n + q.d, q.d))


def expected_projective_dim(q: SecantQuery) -> int:
    return expected_affine_dim(q) - 1


def d2_defect(n: int, s: int) -> int:
    """Defect of the s-th secant variety of products of two linear forms."""
    ratio = Fraction(comb(n + 2, 2), 2 * n + 1)
    if s <= ratio:
        return 2 * s * (s - 1)
    if 2 * s <= n:
        return comb(n - 2 * s + 2, 2)
    return 0


def d2_affine_dim(n: int, s: int) -> int:
    """Actual affine dimension for d = 2: the span of 2s generic linear forms times R_1."""
    return expected_affine_dim(SecantQuery(n, 2, s)) - d2_defect(n, s)


def tangent_statement(q: SecantQuery) -> StatementParams:
    """The unspecialized statement whose span is the affine tangent space."""
    return StatementParams.A(0, q.n, q.d, 1, q.s)


def rank_dim(q: SecantQuery, cfg: RunConfig | None = None) -> int:
    """Best affine dimension reached by random tangent spans over all attempts."""
    return evaluate_statement(tangent_statement(q), cfg).achieved_rank


def known_nondefective(q: SecantQuery) -> bool:
    """Cases settled without computation: n <= 2, or d >= 3 and 3(s-1) <= n."""
    return q.n <= 2 or (q.d >= 3 and 3 * (q.s - 1) <= q.n)


Evaluator = Callable[[StatementParams, RunConfig], StatementOutcome]


def secant_dim(q: SecantQuery, cfg: RunConfig | None = None,
               evaluate: Evaluator | None = None) -> SecantReport:
    """Dimension report for one secant variety.

    Linear and quadratic forms use closed forms, a few ranges are known to be
    nondefective, and everything else is decided by the rank of a random
    tangent span.  A rank short of the expected dimension is reported as
    Inconclusive, never as defective.
    """
    cfg = cfg or RunConfig()
    evaluate = evaluate or evaluate_statement
    expected = expected_projective_dim(q)

    def report(achieved: int, verdict: str, provenance: str) -> SecantReport:
        return SecantReport(q.n, q.d, q.s, expected, achieved, verdict, provenance, cfg.seed, cfg.prime)

    if q.d == 1:
        return report(expected, NONDEFECTIVE, CLOSED_FORM)
    if q.d == 2:
        k = d2_defect(q.n, q.s)
        return report(expected - k, defective_by_closed_form(k) if k else NONDEFECTIVE, CLOSED_FORM)
    if known_nondefective(q):
        return report(expected, NONDEFECTIVE, KNOWN_RESULT)
    out = evaluate(tangent_statement(q), cfg)
    achieved = out.achieved_rank - 1
    return report(achieved, NONDEFECTIVE if out.verified else INCONCLUSIVE, RANK)
