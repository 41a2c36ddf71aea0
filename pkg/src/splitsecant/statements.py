"""Specialized tangent spans and the statements A_i / B_i.

A statement fixes (i, n, d, l, s, t, u, v) and asserts that a specific span
of products of generic linear forms in R_d has the largest dimension it
could have, min{a_i, C(n+d, d)}.  The span is built from random forms over
GF(p) and its rank is a lower bound for the generic dimension, so a rank
hitting the target certifies the statement; anything less is inconclusive.

Family A specializes i groups of points onto products of l generic linear
forms (fixed n, induction on d).  Family B specializes them into generic
codimension-l subspaces of R_1 (fixed d, induction on n).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from math import comb
from typing import Callable, Iterator

import numpy as np

from . import forms
from .config import RunConfig
from .gfp import ColumnProjection, RankBuilder, rank as _rank
from .numbers import Constant, FunctionSpec, binomial, difference_at, parse_function_spec


class InvalidParams(ValueError):
    """Statement parameters outside the range where the span is defined."""


class CapacityError(RuntimeError):
    """The generator matrix would exceed the configured cell budget."""


class Abundancy(str, Enum):
    SUB = "Subabundant"
    SUPER = "Superabundant"
    EQUI = "Equiabundant"

    def is_sub(self) -> bool:
        return self is not Abundancy.SUPER

    def is_super(self) -> bool:
        return self is not Abundancy.SUB


class Verdict(str, Enum):
    VERIFIED = "Verified"
    INCONCLUSIVE = "Inconclusive"
    NOT_APPLICABLE = "NotApplicable"


def to_spec(f) -> FunctionSpec:
    """Coerce an int, spec text or FunctionSpec to a FunctionSpec."""
    if isinstance(f, FunctionSpec):
        return f
    if isinstance(f, str):
        return parse_function_spec(f)
    return Constant(int(f))


@dataclass(frozen=True)
class StatementParams:
    family: str
    i: int
    n: int
    d: int
    l: int = 1
    s: FunctionSpec = field(default_factory=lambda: Constant(0))
    t: FunctionSpec = field(default_factory=lambda: Constant(0))
    u: FunctionSpec = field(default_factory=lambda: Constant(0))
    v: FunctionSpec = field(default_factory=lambda: Constant(0))

    def __post_init__(self) -> None:
        for name in "stuv":
            object.__setattr__(self, name, to_spec(getattr(self, name)))
        if self.family not in ("A", "B"):
            raise InvalidParams(f"family must be A or B, got {self.family!r}")
        if self.i < 0 or self.n < 1 or self.d < 1 or self.l < 1:
            raise InvalidParams("need i >= 0, n >= 1, d >= 1, l >= 1")
        if self.family == "A" and self.i > self.n:
            raise InvalidParams(f"family A needs i <= n (i={self.i}, n={self.n})")
        if self.family == "B" and self.i > self.d:
            raise InvalidParams(f"family B needs i <= d (i={self.i}, d={self.d})")

    @classmethod
    def A(cls, i: int, n: int, d: int, l: int = 1, s=0, t=0, u=0, v=0) -> "StatementParams":
        return cls("A", i, n, d, l, s, t, u, v)

    @classmethod
    def B(cls, i: int, n: int, d: int, l: int = 1, s=0, t=0, u=0, v=0) -> "StatementParams":
        return cls("B", i, n, d, l, s, t, u, v)

    @property
    def ambient(self) -> int:
        return comb(self.n + self.d, self.d)

    @property
    def descriptor(self) -> str:
        return format_descriptor(self)

    def __str__(self) -> str:
        return self.descriptor


# descriptor text -------------------------------------------------------------

_KEYS = ("i", "n", "d", "l", "s", "t", "u", "v")


def format_descriptor(p: StatementParams) -> str:
    return (f"{p.family}:i={p.i}:n={p.n}:d={p.d}:l={p.l}"
            f":s={p.s.text}:t={p.t.text}:u={p.u.text}:v={p.v.text}")


def parse_descriptor(text: str) -> StatementParams:
    """Parse ``A:i=..:n=..:d=..:l=..:s=<spec>:t=..:u=..:v=..``.

    Function specs may contain colons themselves; a new field starts only at
    a token of the form ``<key>=`` with key one of i, n, d, l, s, t, u, v.
    Missing l defaults to 1 and missing functions to const:0.
    """
    tokens = text.strip().split(":")
    family = tokens[0].strip()
    if family not in ("A", "B"):
        raise InvalidParams(f"descriptor must start with A: or B:, got {text!r}")
    fields: dict[str, str] = {}
    current = None
    for tok in tokens[1:]:
        key, eq, val = tok.partition("=")
        if eq and key in _KEYS and (current is None or key not in fields):
            fields[key] = val
            current = key
        elif current is not None and current in "stuv":
            fields[current] += ":" + tok
        else:
            raise InvalidParams(f"unexpected token {tok!r} in descriptor {text!r}")
    missing = [k for k in ("i", "n", "d") if k not in fields]
    if missing:
        raise InvalidParams(f"descriptor lacks {', '.join(missing)}: {text!r}")
    try:
        ints = {k: int(fields[k]) for k in ("i", "n", "d") if k in fields}
        ints["l"] = int(fields.get("l", 1))
    except ValueError:
        raise InvalidParams(f"non-integer field in descriptor {text!r}") from None
    try:
        specs = {k: parse_function_spec(fields.get(k, "const:0")) for k in "stuv"}
    except ValueError as exc:
        raise InvalidParams(str(exc)) from None
    return StatementParams(family, ints["i"], ints["n"], ints["d"], ints["l"], **specs)


# counts ----------------------------------------------------------------------


@dataclass(frozen=True)
class BlockCounts:
    """How many tuples of each kind the span uses.

    ``spec_*`` are the per-group counts of specialized tuples, the rest are
    the unspecialized counts.
    """

    spec_s: int
    spec_t: int
    spec_u: int
    spec_v: int
    s: int
    t: int
    u: int
    v: int


def block_counts(p: StatementParams) -> BlockCounts:
    x = p.d if p.family == "A" else p.n
    if p.i > 0 and x - p.l < 0:
        raise InvalidParams(f"specialization needs {'d' if p.family == 'A' else 'n'} >= l")
    try:
        if p.i > 0:
            spec = [difference_at(f, p.i - 1, p.l, x - p.l) for f in (p.s, p.t, p.u, p.v)]
        else:
            spec = [0, 0, 0, 0]
        free = [difference_at(f, p.i, p.l, x) for f in (p.s, p.t, p.u, p.v)]
    except ValueError as exc:
        raise InvalidParams(str(exc)) from None
    counts = BlockCounts(*spec, *free)
    negative = [k for k, c in vars(counts).items() if c < 0]
    if negative:
        raise InvalidParams(f"negative block counts {negative} for {p.descriptor}")
    return counts


def expected_count(family: str, i: int, n: int, d: int, l: int,
                   s: Callable[[int], int], t: Callable[[int], int],
                   u: Callable[[int], int], v: Callable[[int], int]) -> int:
    """The count a_i (family A) or b_i (family B) as plain arithmetic.

    No validity checks; the functions may be any integer callables.  Family B
    is family A with the roles of n and d exchanged and u, v swapped.
    """
    if family == "B":
        return expected_count("A", i, d, n, l, s, t, v, u)
    total = sum((-1) ** (j - 1) * comb(i, j) * binomial(n + d - j * l, d - j * l) for j in range(1, i + 1))
    if i > 0:
        total += i * l * n * difference_at(s, i - 1, l, d - l)
        total += i * l * difference_at(u, i - 1, l, d - l)
    total += (d * n + 1) * difference_at(s, i, l, d)
    total += difference_at(t, i, l, d)
    total += (d + 1) * difference_at(u, i, l, d)
    total += (n + 1) * difference_at(v, i, l, d)
    return total


def a_value(p: StatementParams) -> int:
    """Upper bound for the dimension of the specialized span (validated)."""
    block_counts(p)
    return expected_count(p.family, p.i, p.n, p.d, p.l, p.s, p.t, p.u, p.v)


def classify(a: int, ambient: int) -> Abundancy:
    if a == ambient:
        return Abundancy.EQUI
    return Abundancy.SUB if a < ambient else Abundancy.SUPER


def abundancy(p: StatementParams) -> Abundancy:
    return classify(a_value(p), p.ambient)


# generators ------------------------------------------------------------------

# A generator group is a zero-argument callable returning an int64 array of
# rows; groups are evaluated lazily so that only one block of the generator
# matrix needs to be in memory at a time.
Group = Callable[[], np.ndarray]


@dataclass
class GeneratorPlan:
    cols: int
    rows: int
    groups: list[Group]

    def matrix(self) -> np.ndarray:
        if not self.groups:
            return np.zeros((0, self.cols), dtype=np.int64)
        return np.vstack([g() for g in self.groups])


def _free_groups(c: BlockCounts, n: int, d: int, rng, prime: int) -> tuple[list[Group], int]:
    groups: list[Group] = []
    rows = 0
    for _ in range(c.s):
        f = forms.random_forms(rng, d, n, prime)[None]
        groups.append(lambda f=f: forms.times_variables(forms.pi_all(f, prime)[0], n, d - 1))
        rows += d * (n + 1)
    for _ in range(c.t):
        f = forms.random_forms(rng, d + 1, n, prime)[None]
        groups.append(lambda f=f: forms.products(f[:, 1:], prime))
        rows += 1
    for _ in range(c.u):
        f = forms.random_forms(rng, d + 1, n, prime)[None]
        groups.append(lambda f=f: forms.pi_all(f, prime)[0])
        rows += d + 1
    for _ in range(c.v):
        f = forms.random_forms(rng, d, n, prime)[None]
        groups.append(lambda f=f: forms.times_variables(forms.products(f[:, 1:], prime), n, d - 1))
        rows += n + 1
    return groups, rows


def plan_A(p: StatementParams, rng: np.random.Generator, prime: int, full: bool = False) -> GeneratorPlan:
    """Generators of the family-A span.

    With full=False this is the reduced generator set: the specialized t and
    v blocks are dropped (they lie inside the (prod g_j) R_{d-l} block) and
    for the specialized s blocks only the leave-one-out products that drop a
    factor of g_j are kept, each times n generic linear forms.  With
    full=True every block is emitted literally (tiny sizes only).
    """
    if p.family != "A":
        raise InvalidParams("plan_A needs a family-A statement")
    c = block_counts(p)
    n, d, l, i = p.n, p.d, p.l, p.i
    groups: list[Group] = []
    rows = 0
    gs = [forms.random_forms(rng, l, n, prime) for _ in range(i)]
    spec_s = [[forms.random_forms(rng, d - l, n, prime) for _ in range(c.spec_s)] for _ in range(i)]
    spec_u = [[forms.random_forms(rng, d - l + 1, n, prime) for _ in range(c.spec_u)] for _ in range(i)]
    if full:
        spec_t = [[forms.random_forms(rng, d - l + 1, n, prime) for _ in range(c.spec_t)] for _ in range(i)]
        spec_v = [[forms.random_forms(rng, d - l, n, prime) for _ in range(c.spec_v)] for _ in range(i)]
    free, free_rows = _free_groups(c, n, d, rng, prime)

    for j in range(i):
        g = gs[j]
        groups.append(lambda g=g: forms.times_basis(forms.products(g[None], prime)[0], n, l, d - l))
        rows += comb(n + d - l, n)
        for f in spec_s[j]:
            tup = np.vstack([f, g])[None]
            if full:
                groups.append(lambda tup=tup: forms.times_variables(forms.pi_all(tup, prime)[0], n, d - 1))
                rows += d * (n + 1)
            else:
                lin = forms.random_forms(rng, l * n, n, prime)

                def reduced_s(tup=tup, lin=lin):
                    pis = forms.pi_all(tup, prime)[0, d - l:]
                    return forms.mul_linear_batch(np.repeat(pis, n, axis=0), lin, n, d - 1, prime)

                groups.append(reduced_s)
                rows += l * n
        for f in spec_u[j]:
            tup = np.vstack([f, g])[None]
            if full:
                groups.append(lambda tup=tup: forms.pi_all(tup, prime)[0])
                rows += d + 1
            else:
                groups.append(lambda tup=tup: forms.pi_all(tup, prime)[0, d - l + 1:])
                rows += l
        if full:
            for f in spec_t[j]:
                tup = np.vstack([f, g])[None]
                groups.append(lambda tup=tup: forms.products(tup[:, 1:], prime))
                rows += 1
            for f in spec_v[j]:
                tup = np.vstack([f, g])[None]
                groups.append(lambda tup=tup: forms.times_variables(forms.products(tup[:, 1:], prime), n, d - 1))
                rows += n + 1
    return GeneratorPlan(p.ambient, rows + free_rows, groups + free)


def _independent_forms(rng, count: int, n: int, prime: int) -> np.ndarray:
    while True:
        w = forms.random_forms(rng, count, n, prime)
        if _rank(w, prime) == count:
            return w


def plan_B(p: StatementParams, rng: np.random.Generator, prime: int) -> GeneratorPlan:
    """Generators of the family-B span.

    Group j lives in a generic subspace V_j of R_1 of dimension n-l+1: it
    contributes all of S_d V_j plus the specialized blocks built from tuples
    of forms in V_j.
    """
    if p.family != "B":
        raise InvalidParams("plan_B needs a family-B statement")
    c = block_counts(p)
    n, d, l, i = p.n, p.d, p.l, p.i
    groups: list[Group] = []
    rows = 0
    dim_v = n - l + 1
    for _ in range(i):
        w = _independent_forms(rng, dim_v, n, prime)
        exps = forms.monomial_basis(dim_v - 1, d).monomials
        tuples = np.stack([np.repeat(w, e, axis=0) for e in exps])
        groups.append(lambda tuples=tuples: forms.products(tuples, prime))
        rows += tuples.shape[0]
        for _ in range(c.spec_s):
            f = forms.random_forms(rng, d, n, prime, subspace=w)[None]
            groups.append(lambda f=f: forms.times_variables(forms.pi_all(f, prime)[0], n, d - 1))
            rows += d * (n + 1)
        for _ in range(c.spec_t):
            f = forms.random_forms(rng, d + 1, n, prime, subspace=w)[None]
            groups.append(lambda f=f: forms.products(f[:, 1:], prime))
            rows += 1
        for _ in range(c.spec_u):
            f = forms.random_forms(rng, d + 1, n, prime, subspace=w)[None]
            groups.append(lambda f=f: forms.pi_all(f, prime)[0])
            rows += d + 1
        for _ in range(c.spec_v):
            f = forms.random_forms(rng, d, n, prime, subspace=w)[None]
            groups.append(lambda f=f: forms.times_variables(forms.products(f[:, 1:], prime), n, d - 1))
            rows += n + 1
    free, free_rows = _free_groups(c, n, d, rng, prime)
    return GeneratorPlan(p.ambient, rows + free_rows, groups + free)


def plan(p: StatementParams, rng: np.random.Generator, prime: int) -> GeneratorPlan:
    return plan_A(p, rng, prime) if p.family == "A" else plan_B(p, rng, prime)


def _as_polys(p: StatementParams, mat: np.ndarray, prime: int) -> list[forms.HomPoly]:
    return [forms.HomPoly(p.n, p.d, row, prime) for row in mat]


def build_A_generators(p: StatementParams, rng: np.random.Generator, prime: int | None = None,
                       full: bool = False) -> list[forms.HomPoly]:
    prime = prime or RunConfig().prime
    return _as_polys(p, plan_A(p, rng, prime, full=full).matrix(), prime)


def build_B_generators(p: StatementParams, rng: np.random.Generator,
                       prime: int | None = None) -> list[forms.HomPoly]:
    prime = prime or RunConfig().prime
    return _as_polys(p, plan_B(p, rng, prime).matrix(), prime)


# evaluation ------------------------------------------------------------------


def attempt_rng(seed: int, attempt: int) -> np.random.Generator:
    return np.random.default_rng([seed, attempt])


def _shuffled_blocks(gp: GeneratorPlan, rng: np.random.Generator, block_rows: int) -> Iterator[np.ndarray]:
    order = rng.permutation(len(gp.groups))
    pending: list[np.ndarray] = []
    size = 0
    for k in order:
        rows = gp.groups[k]()
        pending.append(rows)
        size += rows.shape[0]
        while size >= block_rows:
            buf = np.vstack(pending)
            buf = buf[rng.permutation(buf.shape[0])]
            yield buf[:block_rows]
            rest = buf[block_rows:]
            pending = [rest] if rest.shape[0] else []
            size = rest.shape[0]
    if size:
        buf = np.vstack(pending)
        yield buf[rng.permutation(buf.shape[0])]


_PROJECTION_SLACK = 8


def span_rank(p: StatementParams, rng: np.random.Generator, prime: int,
              stop_at: int | None = None, block_rows: int = 512) -> int:
    """Rank of one random realization of the span, optionally stopping early."""
    gp = plan(p, rng, prime)
    project = None
    if stop_at is not None and gp.cols >= 2 * (stop_at + _PROJECTION_SLACK):
        # wide and low rank: eliminate in a random projection of the columns
        width = stop_at + _PROJECTION_SLACK
        project = ColumnProjection(gp.cols, width, prime, int(rng.integers(2**62)))
    builder = RankBuilder(project.width if project else gp.cols, prime)
    for block in _shuffled_blocks(gp, rng, block_rows):
        builder.absorb_rows(project.apply(block) if project else block)
        if stop_at is not None and builder.rank >= stop_at:
            break
    return builder.rank


def check_capacity(p: StatementParams, cfg: RunConfig) -> int:
    """Estimated generator-matrix cells; raises CapacityError over budget."""
    counts = block_counts(p)
    rows = estimate_rows(p, counts)
    cells = rows * p.ambient
    if cfg.matrix_cell_budget is not None and cells > cfg.matrix_cell_budget:
        raise CapacityError(f"{p.descriptor}: {rows} x {p.ambient} generator matrix "
                            f"exceeds the budget of {cfg.matrix_cell_budget} cells")
    return cells


def estimate_rows(p: StatementParams, c: BlockCounts | None = None) -> int:
    c = c or block_counts(p)
    n, d, l, i = p.n, p.d, p.l, p.i
    rows = c.s * d * (n + 1) + c.t + c.u * (d + 1) + c.v * (n + 1)
    if p.family == "A":
        rows += i * (comb(n + d - l, n) + c.spec_s * l * n + c.spec_u * l) if i else 0
    elif i:
        rows += i * (comb(n - l + d, d) + c.spec_s * d * (n + 1) + c.spec_t
                     + c.spec_u * (d + 1) + c.spec_v * (n + 1))
    return rows


@dataclass(frozen=True)
class StatementOutcome:
    descriptor: str
    a_value: int
    ambient: int
    target: int
    abundancy: Abundancy
    achieved_rank: int
    verdict: Verdict
    seed: int
    prime: int
    attempts: int
    millis: float = 0.0

    def to_dict(self) -> dict:
        return {
            "descriptor": self.descriptor,
            "a_value": self.a_value,
            "ambient": self.ambient,
            "target": self.target,
            "abundancy": self.abundancy.value,
            "achieved_rank": self.achieved_rank,
            "verdict": self.verdict.value,
            "seed": self.seed,
            "prime": self.prime,
            "attempts": self.attempts,
            "millis": round(self.millis, 3),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "StatementOutcome":
        return cls(data["descriptor"], data["a_value"], data["ambient"], data["target"],
                   Abundancy(data["abundancy"]), data["achieved_rank"], Verdict(data["verdict"]),
                   data["seed"], data["prime"], data["attempts"], data.get("millis", 0.0))

    @property
    def verified(self) -> bool:
        return self.verdict is Verdict.VERIFIED


def evaluate_statement(p: StatementParams, cfg: RunConfig | None = None) -> StatementOutcome:
    """Decide a statement by rank, retrying with fresh randomness.

    Attempt k uses the generator seeded by (cfg.seed, k), so a recorded seed
    replays exactly.
    """
    cfg = cfg or RunConfig()
    start = time.perf_counter()
    a = a_value(p)
    ambient = p.ambient
    target = min(a, ambient)
    check_capacity(p, cfg)
    best = 0
    attempts = 0
    for attempt in range(cfg.max_attempts):
        attempts += 1
        r = span_rank(p, attempt_rng(cfg.seed, attempt), cfg.prime, stop_at=target,
                      block_rows=cfg.block_rows)
        if r > target:
            raise RuntimeError(f"{p.descriptor}: rank {r} exceeds the upper bound {target}")
        best = max(best, r)
        if best == target:
            break
    verdict = Verdict.VERIFIED if best == target else Verdict.INCONCLUSIVE
    return StatementOutcome(p.descriptor, a, ambient, target, classify(a, ambient), best,
                            verdict, cfg.seed, cfg.prime, attempts,
                            (time.perf_counter() - start) * 1000.0)
