"""Induction drivers: restriction induction, splitting graphs and small-s sweeps.

Each driver reduces an infinite family of statements to finitely many base
cases, checks the hypotheses that make the reduction valid, and evaluates
the base cases by rank.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Callable, Protocol, Sequence

from .config import RunConfig
from .numbers import FunctionSpec, poly_degree, s1, s2, s2p, stilde
from .statements import (
    Abundancy,
    InvalidParams,
    StatementOutcome,
    StatementParams,
    Verdict,
    a_value,
    check_capacity,
    classify,
    evaluate_statement,
    parse_descriptor,
    to_spec,
)


class NotApplicable(ValueError):
    """A driver's hypotheses cannot be checked for the given input."""


# equiabundance ---------------------------------------------------------------


def _class_leads(f: FunctionSpec, step: int, degree: int, name: str) -> list[Fraction]:
    polys = f.class_polynomials(step)
    if polys is None:
        raise NotApplicable(f"{name}={f.text} is not polynomial on residue classes mod {step}")
    leads = []
    for poly in polys:
        if poly_degree(poly) > degree:
            raise NotApplicable(f"{name}={f.text} has degree above {degree} on some residue class")
        leads.append(Fraction(poly[degree]) if degree < len(poly) else Fraction(0))
    return leads


def equiabundance_leading_check(n: int, l: int, s: FunctionSpec, u: FunctionSpec,
                                t: FunctionSpec | None = None, v: FunctionSpec | None = None) -> bool:
    """True iff n!(n lead(s_r) + lead(u_r)) = 1 for every residue class r mod l.

    lead() is the coefficient of d^(n-1) of the polynomial that agrees with
    the function on the class.  When it holds, a_n(d) equals C(n+d, d) for
    every d >= l n + 1.  t and v, if given, only need degree <= n - 1 since
    they enter a_n through an n-th difference.  Raises NotApplicable when
    some function is not a polynomial of degree <= n - 1 on each class.
    """
    top = n - 1
    ls = _class_leads(s, l, top, "s")
    lu = _class_leads(u, l, top, "u")
    for name, f in (("t", t), ("v", v)):
        if f is not None:
            _class_leads(f, l, top, name)
    return all(factorial(n) * (n * a + b) == 1 for a, b in zip(ls, lu))


def equiabundance_leading_check_B(d: int, l: int, s: FunctionSpec, v: FunctionSpec,
                                  t: FunctionSpec | None = None, u: FunctionSpec | None = None) -> bool:
    """The fixed-degree analogue: d!(d lead(s_r) + lead(v_r)) = 1 in the variable n."""
    return equiabundance_leading_check(d, l, s, v, t, u)


# reports ---------------------------------------------------------------------


@dataclass(frozen=True)
class CaseRecord:
    """One evaluated (or otherwise decided) case of a driver."""

    key: int
    descriptor: str
    verdict: str
    outcome: dict | None = None
    route: str = "rank"
    millis: float = 0.0

    @property
    def verified(self) -> bool:
        return self.verdict == Verdict.VERIFIED.value

    def to_dict(self) -> dict:
        return {"key": self.key, "descriptor": self.descriptor, "verdict": self.verdict,
                "route": self.route, "outcome": self.outcome, "millis": round(self.millis, 3)}


@dataclass
class InductionReport:
    driver: str
    parameters: dict
    cases: list[CaseRecord] = field(default_factory=list)
    abundancy: str | None = None
    equiabundance: bool | None = None
    failed_gate: str | None = None
    message: str = ""
    verdict: Verdict = Verdict.INCONCLUSIVE
    extra: dict = field(default_factory=dict)

    @property
    def verified(self) -> bool:
        return self.verdict is Verdict.VERIFIED

    def finish(self, expected_cases: int | None = None) -> "InductionReport":
        if self.failed_gate is not None:
            self.verdict = Verdict.NOT_APPLICABLE
        elif expected_cases is not None and len(self.cases) < expected_cases:
            self.verdict = Verdict.INCONCLUSIVE
        else:
            ok = all(c.verified for c in self.cases)
            self.verdict = Verdict.VERIFIED if ok else Verdict.INCONCLUSIVE
        return self

    def to_dict(self) -> dict:
        out = {
            "driver": self.driver,
            "parameters": self.parameters,
            "verdict": self.verdict.value,
            "abundancy": self.abundancy,
            "equiabundance": self.equiabundance,
            "failed_gate": self.failed_gate,
            "message": self.message,
            "cases": [c.to_dict() for c in self.cases],
        }
        out.update(self.extra)
        return out


# case evaluation -------------------------------------------------------------


class OutcomeCache(Protocol):
    def lookup(self, descriptor: str, prime: int, seed: int) -> StatementOutcome | None: ...

    def record(self, outcome: StatementOutcome) -> None: ...


def _evaluate_descriptor(args: tuple[str, RunConfig]) -> StatementOutcome:
    text, cfg = args
    return evaluate_statement(parse_descriptor(text), cfg)


def evaluate_cases(cases: Sequence[tuple[int, StatementParams]], cfg: RunConfig,
                   cache: OutcomeCache | None = None,
                   on_case: Callable[[CaseRecord], None] | None = None,
                   fail_fast: bool = False) -> list[CaseRecord]:
    """Evaluate keyed statements, reusing cached outcomes, in key order.

    With cfg.workers > 1 the uncached cases run in a process pool; results
    are still reported (and cached) from this process only.
    """
    records: dict[int, CaseRecord] = {}
    todo: list[tuple[int, StatementParams]] = []
    for key, p in cases:
        hit = cache.lookup(p.descriptor, cfg.prime, cfg.seed) if cache is not None else None
        # an inconclusive record only counts if it tried at least as hard
        if hit is not None and (hit.verified or hit.attempts >= cfg.max_attempts):
            records[key] = CaseRecord(key, p.descriptor, hit.verdict.value, hit.to_dict(), "cache", 0.0)
        else:
            todo.append((key, p))
    for _, p in todo:
        check_capacity(p, cfg)

    def done(key: int, out: StatementOutcome) -> CaseRecord:
        if cache is not None:
            cache.record(out)
        rec = CaseRecord(key, out.descriptor, out.verdict.value, out.to_dict(), "rank", out.millis)
        records[key] = rec
        return rec

    if cfg.workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.workers, len(todo))) as pool:
            outs = pool.map(_evaluate_descriptor, [(p.descriptor, cfg) for _, p in todo])
            for (key, _), out in zip(todo, outs):
                done(key, out)
    else:
        for key, p in todo:
            rec = done(key, evaluate_statement(p, cfg))
            if fail_fast and not rec.verified:
                break
    ordered = [records[k] for k, _ in cases if k in records]
    if fail_fast:
        kept = []
        for rec in ordered:
            kept.append(rec)
            if not rec.verified:
                break
        ordered = kept
    if on_case is not None:
        for rec in ordered:
            on_case(rec)
    return ordered


# restriction induction -------------------------------------------------------


def _restriction(family: str, fixed: int, l: int, funcs: Sequence[FunctionSpec], cfg: RunConfig,
                 limit: int | None, cache, on_case, fail_fast) -> InductionReport:
    s, t, u, v = funcs
    top = l * fixed + 1
    driver = "restriction-fixed-dimension" if family == "A" else "restriction-fixed-degree"
    key_name = "d" if family == "A" else "n"
    params = {"n" if family == "A" else "d": fixed, "l": l,
              "s": s.text, "t": t.text, "u": u.text, "v": v.text,
              f"max_{key_name}": limit if limit is not None else top}
    report = InductionReport(driver, params)

    def base(x: int) -> StatementParams:
        i = (x - 1) // l
        if family == "A":
            return StatementParams.A(i, fixed, x, l, s, t, u, v)
        return StatementParams.B(i, x, fixed, l, s, t, u, v)

    # gates run over the full base range before any rank work
    try:
        kinds = [classify(a_value(base(x)), base(x).ambient) for x in range(1, top + 1)]
    except (InvalidParams, ValueError) as exc:
        report.failed_gate = "domain"
        report.message = str(exc)
        return report.finish()
    if all(k.is_sub() for k in kinds):
        report.abundancy = "subabundant"
    elif all(k.is_super() for k in kinds):
        report.abundancy = "superabundant"
    else:
        report.abundancy = "mixed"
        report.failed_gate = "uniform-abundancy"
        bad = [x for x, k in enumerate(kinds, 1) if k is Abundancy.SUPER]
        report.message = f"base statements are neither all sub- nor all superabundant (super at {key_name}={bad})"
        return report.finish()
    try:
        if family == "A":
            ok = equiabundance_leading_check(fixed, l, s, u, t, v)
        else:
            ok = equiabundance_leading_check_B(fixed, l, s, v, t, u)
    except NotApplicable as exc:
        report.failed_gate = "equiabundance"
        report.message = str(exc)
        return report.finish()
    report.equiabundance = ok
    if not ok:
        report.failed_gate = "equiabundance"
        report.message = "leading coefficients do not make the top statement equiabundant"
        return report.finish()

    last = top if limit is None else min(top, limit)
    cases = [(x, base(x)) for x in range(1, last + 1)]
    report.cases = evaluate_cases(cases, cfg, cache, on_case, fail_fast)
    if last < top:
        report.message = f"truncated to {key_name} <= {last} of {top} base cases"
    return report.finish(expected_cases=last)


def restriction_fixed_dimension(n: int, l: int, s, t=0, u=0, v=0, cfg: RunConfig | None = None,
                                max_d: int | None = None, cache: OutcomeCache | None = None,
                                on_case=None, fail_fast: bool = False) -> InductionReport:
    """Base cases A_{floor((d-1)/l)}(n, d, l, s, t, u, v) for 1 <= d <= l n + 1.

    Verified means every evaluated base case is Verified and both hypotheses
    hold; with max_d the run is truncated and certifies only that prefix.
    """
    funcs = [to_spec(f) for f in (s, t, u, v)]
    return _restriction("A", n, l, funcs, cfg or RunConfig(), max_d, cache, on_case, fail_fast)


def restriction_fixed_degree(d: int, l: int, s, t=0, u=0, v=0, cfg: RunConfig | None = None,
                             max_n: int | None = None, cache: OutcomeCache | None = None,
                             on_case=None, fail_fast: bool = False) -> InductionReport:
    """Base cases B_{floor((n-1)/l)}(n, d, l, s, t, u, v) for 1 <= n <= l d + 1."""
    funcs = [to_spec(f) for f in (s, t, u, v)]
    return _restriction("B", d, l, funcs, cfg or RunConfig(), max_n, cache, on_case, fail_fast)


# splitting graphs ------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Descriptor:
    """A(n, d, s, t, u, v) with constant functions."""

    n: int
    d: int
    s: int = 0
    t: int = 0
    u: int = 0
    v: int = 0

    @property
    def label(self) -> str:
        return f"A({self.n},{self.d},{self.s},{self.t},{self.u},{self.v})"

    @property
    def values(self) -> tuple[int, int, int, int]:
        return (self.s, self.t, self.u, self.v)

    @property
    def is_zero(self) -> bool:
        return not any(self.values)

    def statement(self) -> StatementParams:
        return StatementParams.A(0, self.n, self.d, 1, self.s, self.t, self.u, self.v)

    def __str__(self) -> str:
        return self.label


def phi(k: int, a: Descriptor) -> Descriptor:
    if k not in (0, 1, 2):
        raise ValueError(f"phi index must be 0, 1 or 2, got {k}")
    if a.n < 4:
        raise InvalidParams(f"phi needs n >= 4, got {a.label}")
    step = 2 ** (a.n - 3)
    if any(x % step for x in a.values):
        raise InvalidParams(f"{a.label}: values must be divisible by {step}")
    n, d, s, t, u, v = a.n, a.d, a.s, a.t, a.u, a.v
    if k == 0:
        out = Descriptor(n - 1, d, s // 2, (t + u) // 2, u // 2, (s + v) // 2)
    elif k == 1:
        out = Descriptor(n - 1, d - 1, s // 2, (t + v) // 2, (s + u) // 2, v // 2)
    else:
        out = Descriptor(n - 1, d - 2, 0, v // 2, s // 2, 0)
    if out.d < 1:
        raise InvalidParams(f"phi_{k}({a.label}) has degree {out.d}")
    return out


def _root(n: int, d: int, c: int) -> Descriptor:
    return Descriptor(n, d, 2 ** (n - 3) * c)


def phi_closed_form(i: int, j: int, k: int, root: Descriptor) -> Descriptor:
    """phi_0^i phi_1^j phi_2^k applied to A(n, d, 2^(n-3) c, 0, 0, 0)."""
    n, d = root.n, root.d
    if min(i, j, k) < 0 or i + j + k > n - 3 or k > 2:
        raise InvalidParams(f"need i, j, k >= 0, i + j + k <= {n - 3} and k <= 2")
    step = 2 ** (n - 3)
    if root.t or root.u or root.v or root.s % step:
        raise InvalidParams(f"root must be A(n, d, {step} c, 0, 0, 0), got {root.label}")
    c = root.s // step
    if k == 0:
        e = 2 ** (n - 3 - i - j) * c
        return Descriptor(n - i - j, d - j, e, e * i * j, e * j, e * i)
    if k == 1:
        e = 2 ** (n - 4 - i - j) * c
        return Descriptor(n - i - j - 1, d - j - 2, 0, e * i, e, 0)
    return Descriptor(n - i - j - 2, d - j - 4, 0, 0, 0, 0)


@dataclass
class SplitGraph:
    root: Descriptor
    vertices: list[Descriptor]
    edges: list[tuple[Descriptor, Descriptor, int]]

    def children(self, a: Descriptor) -> list[tuple[Descriptor, int]]:
        return [(b, k) for x, b, k in self.edges if x == a]

    def sinks(self) -> list[Descriptor]:
        tails = {x for x, _, _ in self.edges}
        return [a for a in self.vertices if a not in tails]

    def to_dot(self) -> str:
        names = {a: f"v{i}" for i, a in enumerate(self.vertices)}
        lines = [f'digraph "{self.root.label}" {{']
        for a in self.vertices:
            lines.append(f'  {names[a]} [label="{a.label}"];')
        for a, b, k in self.edges:
            lines.append(f'  {names[a]} -> {names[b]} [label="phi{k}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def splitting_graph(n: int, d: int, c: int) -> SplitGraph:
    """The graph of all phi images of A(n, d, 2^(n-3) c, 0, 0, 0)."""
    if n < 4 or d < n or c < 1:
        raise InvalidParams(f"splitting graphs need n >= 4, d >= n, c >= 1 (got {n}, {d}, {c})")
    root = _root(n, d, c)
    seen: dict[Descriptor, None] = {}
    for total in range(n - 2):
        for k in range(min(2, total) + 1):
            for j in range(total - k + 1):
                seen.setdefault(phi_closed_form(total - j - k, j, k, root))
    vertices = list(seen)
    edges = []
    for a in vertices:
        if a.n < 4:
            continue
        for k in range(3):
            try:
                b = phi(k, a)
            except InvalidParams:
                continue
            if b in seen:
                edges.append((a, b, k))
    return SplitGraph(root, vertices, edges)


def g(n: int, m: int) -> int:
    """Largest sink value per unit c among sinks of the form A(3, d - m, ...)."""
    if n < 4 or not 0 <= m <= n - 2:
        raise InvalidParams(f"g needs n >= 4 and 0 <= m <= n - 2 (got n={n}, m={m})")
    if m == 0 or m == n - 3:
        return n - 3
    if m == 1:
        return n - 4
    if m == n - 2:
        return 1
    return m * (n - m - 3)


def g_from_graph(n: int, c: int = 1, d: int | None = None) -> list[int]:
    """g(n, m) for m = 0..n-2 computed from the sinks of an actual graph."""
    d = max(d or 0, n + 8)
    graph = splitting_graph(n, d, c)
    best = [0] * (n - 1)
    for a in graph.sinks():
        if a.n == 3 and 0 <= d - a.d <= n - 2:
            best[d - a.d] = max(best[d - a.d], max(a.values) // c)
    return best


@dataclass(frozen=True)
class ExpBound:
    n: int
    d: int
    c: int
    bound: int

    def to_dict(self) -> dict:
        return {"n": self.n, "d": self.d, "c": self.c, "bound": self.bound,
                "g": [g(self.n, m) for m in range(self.n - 1)]}


def exp_bound(n: int, d: int) -> ExpBound:
    """Largest s = 2^(n-3) c for which splitting alone certifies nondefectivity."""
    if not d >= n >= 4:
        raise InvalidParams(f"need d >= n >= 4, got n={n}, d={d}")
    c = min(stilde(d - m) // g(n, m) for m in range(n - 1))
    return ExpBound(n, d, c, 2 ** (n - 3) * c)


SINK_MODES = ("stilde", "direct", "auto")


def verify_by_splitting(n: int, d: int, s: int, cfg: RunConfig | None = None,
                        sink_mode: str = "stilde", cache: OutcomeCache | None = None,
                        on_case=None) -> InductionReport:
    """Certify A(n, d, s, 0, 0, 0) by checking every sink of its splitting graph.

    Sinks with all values zero hold trivially.  An n = 3 sink passes the
    "stilde" route when every value is at most stilde(d'); the "direct" route
    evaluates it by rank and also requires it to be subabundant; "auto"
    tries the bound first and falls back to rank.
    """
    cfg = cfg or RunConfig()
    if sink_mode not in SINK_MODES:
        raise ValueError(f"sink_mode must be one of {SINK_MODES}")
    report = InductionReport("split", {"n": n, "d": d, "s": s, "sink_mode": sink_mode})
    if n < 4 or d < n or s < 1:
        report.failed_gate = "range"
        report.message = f"splitting needs n >= 4, d >= n and s >= 1 (got {n}, {d}, {s})"
        return report.finish()
    step = 2 ** (n - 3)
    if s % step:
        report.failed_gate = "divisibility"
        report.message = f"s={s} is not divisible by 2^(n-3)={step}"
        return report.finish()
    graph = splitting_graph(n, d, s // step)
    report.extra["vertices"] = [a.label for a in graph.vertices]
    report.extra["edges"] = [[a.label, b.label, k] for a, b, k in graph.edges]
    sinks = graph.sinks()
    report.extra["sinks"] = [a.label for a in sinks]

    records: dict[int, CaseRecord] = {}
    rank_cases = []
    for key, a in enumerate(sinks):
        if a.is_zero:
            records[key] = CaseRecord(key, a.statement().descriptor, Verdict.VERIFIED.value, None, "trivial")
            continue
        if a.n != 3:
            records[key] = CaseRecord(key, a.statement().descriptor, Verdict.INCONCLUSIVE.value, None,
                                      "unsupported")
            continue
        fits = max(a.values) <= stilde(a.d)
        if sink_mode != "direct" and fits:
            records[key] = CaseRecord(key, a.statement().descriptor, Verdict.VERIFIED.value,
                                      {"bound": stilde(a.d), "max_value": max(a.values)}, "stilde")
        elif sink_mode == "stilde":
            records[key] = CaseRecord(key, a.statement().descriptor, Verdict.INCONCLUSIVE.value,
                                      {"bound": stilde(a.d), "max_value": max(a.values)}, "stilde")
        else:
            rank_cases.append((key, a.statement()))
    for rec in evaluate_cases(rank_cases, cfg, cache):
        sub = rec.outcome["abundancy"] != Abundancy.SUPER.value
        verdict = rec.verdict if sub else Verdict.INCONCLUSIVE.value
        records[rec.key] = CaseRecord(rec.key, rec.descriptor, verdict, rec.outcome, "direct", rec.millis)
    report.cases = [records[k] for k in sorted(records)]
    if on_case is not None:
        for rec in report.cases:
            on_case(rec)
    return report.finish()


# small s ---------------------------------------------------------------------


def _threshold_n(s: int, d: int) -> int:
    """min{n >= 1 : s <= C(n+d, d) / (d n + 1)}."""
    n = 1
    while s * (d * n + 1) > comb(n + d, d):
        n += 1
    return n


def _last(pred: Callable[[int], bool], start: int, stop: int) -> int | None:
    hits = [x for x in range(start, stop) if pred(x)]
    return hits[-1] if hits else None


def _first(pred: Callable[[int], bool], start: int, stop: int) -> int | None:
    for x in range(start, stop):
        if pred(x):
            return x
    return None


def _d_horizon(s: int) -> int:
    # s1 grows like d^2/18, so s <= s1(d) for every d beyond this point
    d = 3
    while s1(d) < s or s1(d + 1) < s:
        d += 1
    return d + 20


def small_s_enumerate(s: int, mode: str = "ranges") -> list[tuple[int, int]]:
    """The finitely many (n, d) whose nondefectivity settles secant order s.

    mode="ranges" evaluates the three index ranges directly;
    mode="loops" scans (n, d) in nested loops instead.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    if s <= 2:
        return []
    if mode == "loops":
        return _small_s_loops(s)
    if mode != "ranges":
        raise ValueError(f"unknown mode {mode!r}")
    horizon = _d_horizon(s)
    d_max = _last(lambda d: s > s1(d), 1, horizon)
    if d_max is None or d_max < 3:
        return []
    cases: list[tuple[int, int]] = []
    # (i) cubics
    n_hi = _threshold_n(s, 3)
    n_lo = _first(lambda n: s < s2p(n), 1, n_hi + 1)
    if n_lo is not None:
        cases += [(n, 3) for n in range(n_lo, n_hi + 1)]
    # (ii) degrees where n = 3 is already known, start at n = 4
    d2_top = _last(lambda d: s >= s2(d), 4, horizon) or 3
    for d in range(4, min(d2_top, d_max) + 1):
        cases += [(n, d) for n in range(4, _threshold_n(s, d) + 1)]
    # (iii) remaining degrees start at n = 3
    d3_lo = _first(lambda d: s < s2(d), 1, horizon) or horizon
    for d in range(max(d3_lo, 4), d_max + 1):
        cases += [(n, d) for n in range(3, _threshold_n(s, d) + 1)]
    return sorted(set(cases), key=lambda nd: (nd[1], nd[0]))


def _small_s_loops(s: int) -> list[tuple[int, int]]:
    cases = []
    d = 3
    while s > s1(d):
        if d == 3:
            n = 1
            while s * (3 * (n - 1) + 1) > comb(n + 2, 3):
                if s < s2p(n):
                    cases.append((n, d))
                n += 1
        else:
            n = 4 if s >= s2(d) else 3
            while s * (d * (n - 1) + 1) > comb(n + d - 1, d):
                cases.append((n, d))
                n += 1
        d += 1
    return sorted(set(cases), key=lambda nd: (nd[1], nd[0]))


def small_s_verify(s: int, cfg: RunConfig | None = None, mode: str = "ranges",
                   cache: OutcomeCache | None = None, on_case=None,
                   fail_fast: bool = False) -> InductionReport:
    """Evaluate A(0, n, d, s, 0, 0, 0) for every enumerated (n, d)."""
    cfg = cfg or RunConfig()
    report = InductionReport("small-s", {"s": s, "mode": mode})
    pairs = small_s_enumerate(s, mode)
    report.extra["pairs"] = [list(p) for p in pairs]
    cases = [(k, StatementParams.A(0, n, d, 1, s)) for k, (n, d) in enumerate(pairs)]
    report.cases = evaluate_cases(cases, cfg, cache, on_case, fail_fast)
    return report.finish(expected_cases=len(cases))
