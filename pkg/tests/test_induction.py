import itertools
from fractions import Fraction

import pytest

from splitsecant.cache import CertificateCache
from splitsecant.induction import (
    Descriptor,
    InductionReport,
    NotApplicable,
    equiabundance_leading_check,
    equiabundance_leading_check_B,
    evaluate_cases,
    exp_bound,
    g,
    g_from_graph,
    phi,
    phi_closed_form,
    restriction_fixed_degree,
    restriction_fixed_dimension,
    small_s_enumerate,
    small_s_verify,
    splitting_graph,
    verify_by_splitting,
)
from splitsecant.numbers import Constant, Piecewise, builtin, s1, stilde
from splitsecant.statements import InvalidParams, StatementParams, Verdict

FIGURE_VERTICES = {
    "A(5,17,24,0,0,0)",
    "A(4,17,12,0,0,12)", "A(4,16,12,0,12,0)", "A(4,15,0,0,12,0)",
    "A(3,17,6,0,0,12)", "A(3,16,6,6,6,6)", "A(3,15,6,0,12,0)",
    "A(3,15,0,6,6,0)", "A(3,14,0,0,6,0)", "A(3,13,0,0,0,0)",
}
FIGURE_SINKS = {
    "A(3,17,6,0,0,12)", "A(3,16,6,6,6,6)", "A(3,15,6,0,12,0)",
    "A(3,15,0,6,6,0)", "A(3,14,0,0,6,0)", "A(3,13,0,0,0,0)",
}


def quadratic(lead) -> Piecewise:
    return Piecewise.quadratic(1, lead, 0, [0], domain=(0, 50))


# equiabundance


@pytest.mark.parametrize("s, u, expected", [
    (Fraction(1, 18), 0, True),
    (Fraction(1, 24), Fraction(1, 24), True),
    (Fraction(1, 20), 0, False),
])
def test_leading_check_examples(s, u, expected):
    # quadratics with exactly these d^2 coefficients (values need not be integral off 0)
    sf = Piecewise.quadratic(1, s, 0, [0], domain=(0, 0))
    uf = Piecewise.quadratic(1, u, 0, [0], domain=(0, 0))
    assert equiabundance_leading_check(3, 1, sf, uf) is expected


def test_leading_check_builtins():
    assert equiabundance_leading_check(3, 9, builtin("s1"), Constant(0))
    assert equiabundance_leading_check(3, 9, builtin("s2pp"), Constant(0))
    assert equiabundance_leading_check(3, 6, builtin("stilde"), builtin("stilde"))
    assert not equiabundance_leading_check(3, 6, builtin("stilde"), Constant(0))


def test_leading_check_not_applicable():
    with pytest.raises(NotApplicable):
        equiabundance_leading_check(2, 1, quadratic(1), Constant(0))
    with pytest.raises(NotApplicable):
        equiabundance_leading_check(3, 4, builtin("s1"), Constant(0))


def test_leading_check_linear_case():
    assert equiabundance_leading_check(1, 1, Constant(1), Constant(0))
    assert equiabundance_leading_check(1, 1, Constant(0), Constant(1))
    assert not equiabundance_leading_check(1, 1, Constant(1), Constant(1))
    assert equiabundance_leading_check_B(1, 1, Constant(1), Constant(0))


def test_leading_check_constants_in_higher_dimension():
    assert not equiabundance_leading_check(2, 1, Constant(3), Constant(0))


# restriction drivers


def test_restriction_s1_prefix(cfg):
    rep = restriction_fixed_dimension(3, 9, "builtin:s1", cfg=cfg, max_d=10)
    assert rep.verdict is Verdict.VERIFIED
    assert rep.abundancy == "subabundant" and rep.equiabundance is True
    assert [c.key for c in rep.cases] == list(range(1, 11))
    assert "truncated" in rep.message


def test_restriction_stilde_prefix(cfg):
    rep = restriction_fixed_dimension(3, 6, *["builtin:stilde"] * 4, cfg=cfg, max_d=8)
    assert rep.abundancy == "subabundant"
    assert rep.verdict is Verdict.VERIFIED


def test_restriction_superabundant_route(cfg):
    rep = restriction_fixed_dimension(1, 1, 1, 5, cfg=cfg)
    assert rep.abundancy == "superabundant" and rep.equiabundance is True
    assert rep.verdict is Verdict.VERIFIED


def test_restriction_mixed_abundancy_is_gated(cfg):
    calls = []
    rep = restriction_fixed_dimension(2, 1, 2, cfg=cfg, on_case=calls.append)
    assert rep.verdict is Verdict.NOT_APPLICABLE
    assert rep.failed_gate == "uniform-abundancy"
    assert rep.cases == [] and calls == []


def test_restriction_equiabundance_gate(cfg):
    rep = restriction_fixed_dimension(3, 6, "builtin:stilde", cfg=cfg)
    assert rep.abundancy == "subabundant" and rep.equiabundance is False
    assert rep.failed_gate == "equiabundance"
    assert rep.verdict is Verdict.NOT_APPLICABLE and rep.cases == []
    # constants have no d^(n-1) term once n >= 2
    rep = restriction_fixed_dimension(2, 1, 1, cfg=cfg)
    assert rep.failed_gate == "equiabundance" and rep.cases == []


def test_restriction_domain_gate(cfg):
    rep = restriction_fixed_dimension(3, 1, "pw:m=2:a2=0:a1=0:a0=0,3", cfg=cfg)
    assert rep.failed_gate == "domain" and rep.verdict is Verdict.NOT_APPLICABLE


def test_restriction_fixed_degree_linear(cfg):
    rep = restriction_fixed_degree(1, 1, 1, cfg=cfg)
    assert rep.verdict is Verdict.VERIFIED
    assert [c.key for c in rep.cases] == [1, 2]


def test_restriction_fixed_degree_s1_prefix(cfg):
    rep = restriction_fixed_degree(3, 9, "builtin:s1", cfg=cfg, max_n=10)
    assert rep.verdict is Verdict.VERIFIED
    assert len(rep.cases) == 10


def test_fail_fast_stops(cfg):
    cases = [(0, StatementParams.A(0, 3, 3, 1, 2)), (1, StatementParams.A(0, 4, 2, 1, 2)),
             (2, StatementParams.A(0, 5, 3, 1, 2))]
    seen = []
    recs = evaluate_cases(cases, cfg, on_case=seen.append, fail_fast=True)
    assert [r.verdict for r in recs] == ["Verified", "Inconclusive"]
    assert seen == recs
    assert len(evaluate_cases(cases, cfg)) == 3


def test_cached_outcomes_are_reused(cfg, tmp_path):
    cache = CertificateCache(tmp_path / "c.jsonl")
    cases = [(0, StatementParams.A(0, 3, 3, 1, 2)), (1, StatementParams.A(0, 4, 2, 1, 2))]
    first = evaluate_cases(cases, cfg, cache)
    again = evaluate_cases(cases, cfg, cache)
    assert [r.route for r in first] == ["rank", "rank"]
    assert [r.route for r in again] == ["cache", "cache"]
    harder = evaluate_cases(cases, cfg.with_(max_attempts=4), cache)
    assert [r.route for r in harder] == ["cache", "rank"]


def test_worker_pool_matches_serial(cfg):
    cases = [(k, StatementParams.A(0, 3, d, 1, 2)) for k, d in enumerate(range(3, 7))]
    serial = evaluate_cases(cases, cfg)
    pooled = evaluate_cases(cases, cfg.with_(workers=2))
    assert [(r.key, r.outcome["achieved_rank"]) for r in serial] == \
        [(r.key, r.outcome["achieved_rank"]) for r in pooled]


def test_report_dict_shape(cfg):
    rep = restriction_fixed_degree(1, 1, 1, cfg=cfg)
    out = rep.to_dict()
    assert set(out) >= {"driver", "parameters", "verdict", "abundancy", "equiabundance",
                        "failed_gate", "message", "cases"}
    assert out["parameters"]["d"] == 1 and out["verdict"] == "Verified"


def test_report_finish_rules():
    rep = InductionReport("x", {})
    assert rep.finish().verdict is Verdict.VERIFIED
    assert InductionReport("x", {}).finish(expected_cases=1).verdict is Verdict.INCONCLUSIVE
    gated = InductionReport("x", {}, failed_gate="domain")
    assert gated.finish().verdict is Verdict.NOT_APPLICABLE


# phi maps and splitting graphs


def test_phi_examples():
    root = Descriptor(5, 17, 24)
    assert phi(0, root).label == "A(4,17,12,0,0,12)"
    assert phi(1, root).label == "A(4,16,12,0,12,0)"
    assert phi(2, root).label == "A(4,15,0,0,12,0)"


def test_phi_errors():
    with pytest.raises(InvalidParams):
        phi(0, Descriptor(5, 17, 6))
    with pytest.raises(InvalidParams):
        phi(0, Descriptor(3, 17, 6))
    with pytest.raises(ValueError):
        phi(3, Descriptor(5, 17, 24))


def test_phi_commutes(rng):
    checked = 0
    for _ in range(200):
        n = int(rng.integers(5, 9))
        step = 2 ** (n - 3)
        a = Descriptor(n, int(rng.integers(n + 4, 40)), *(step * int(x) for x in rng.integers(0, 6, 4)))
        for i, j in itertools.permutations(range(3), 2):
            try:
                left = phi(i, phi(j, a))
                right = phi(j, phi(i, a))
            except InvalidParams:
                continue
            assert left == right
            checked += 1
    assert checked > 500


def test_closed_form_matches_iteration():
    for n in range(4, 9):
        for c in range(1, 5):
            root = Descriptor(n, n + 12, 2 ** (n - 3) * c)
            for i, j, k in itertools.product(range(n - 2), repeat=3):
                if i + j + k > n - 3 or k > 2:
                    continue
                a = root
                for idx, times in ((2, k), (1, j), (0, i)):
                    for _ in range(times):
                        a = phi(idx, a)
                assert phi_closed_form(i, j, k, root) == a


def test_closed_form_examples():
    root = Descriptor(5, 17, 24)
    assert phi_closed_form(0, 0, 0, root) == root
    assert phi_closed_form(1, 1, 0, root).label == "A(3,16,6,6,6,6)"
    assert phi_closed_form(0, 0, 2, root).label == "A(3,13,0,0,0,0)"
    with pytest.raises(InvalidParams):
        phi_closed_form(0, 0, 3, Descriptor(8, 20, 32))


def test_figure_graph():
    graph = splitting_graph(5, 17, 6)
    assert {a.label for a in graph.vertices} == FIGURE_VERTICES
    assert len(graph.edges) == 12
    assert {a.label for a in graph.sinks()} == FIGURE_SINKS
    assert graph.root.label == "A(5,17,24,0,0,0)"


def test_graph_is_rooted_dag():
    for n, d, c in [(5, 17, 6), (6, 20, 2), (7, 25, 1)]:
        graph = splitting_graph(n, d, c)
        reach = {graph.root}
        for a in sorted(graph.vertices, key=lambda v: -v.n):
            if a in reach:
                reach.update(b for b, _ in graph.children(a))
        assert reach == set(graph.vertices)
        assert all(b.n == a.n - 1 for a, b, _ in graph.edges)
        assert all(a.n == 3 or a.is_zero for a in graph.sinks())


def test_graph_n4_has_three_children():
    graph = splitting_graph(4, 9, 3)
    assert len(graph.vertices) == 4 and len(graph.edges) == 3


def test_graph_range_errors():
    with pytest.raises(InvalidParams):
        splitting_graph(3, 9, 1)
    with pytest.raises(InvalidParams):
        splitting_graph(5, 4, 1)


def test_dot_output():
    dot = splitting_graph(5, 17, 6).to_dot()
    assert dot.startswith('digraph "A(5,17,24,0,0,0)" {')
    assert dot.count("->") == 12
    assert dot.count("[label=\"A(") == 10
    assert '[label="phi0"]' in dot and '[label="phi2"]' in dot


def test_g_examples():
    assert [g(5, m) for m in range(4)] == [2, 1, 2, 1]
    assert [g(4, m) for m in range(3)] == [1, 1, 1]
    assert g(6, 2) == 2
    with pytest.raises(InvalidParams):
        g(5, 4)


@pytest.mark.parametrize("n", [4, 5, 6, 7])
@pytest.mark.parametrize("c", [1, 2, 3])
def test_g_matches_graph(n, c):
    assert g_from_graph(n, c) == [g(n, m) for m in range(n - 1)]


def test_exp_bound_examples():
    b = exp_bound(5, 17)
    assert (b.c, b.bound) == (6, 24)
    for d in range(4, 30):
        assert exp_bound(4, d).c == min(stilde(d), stilde(d - 1), stilde(d - 2))
    assert exp_bound(5, 17).to_dict()["g"] == [2, 1, 2, 1]


def test_exp_bound_monotone():
    for n in range(4, 7):
        bounds = [exp_bound(n, d).bound for d in range(n, 31)]
        assert bounds == sorted(bounds)


def test_split_stilde_route(cfg):
    rep = verify_by_splitting(5, 17, 24, cfg)
    assert rep.verdict is Verdict.VERIFIED
    routes = sorted(c.route for c in rep.cases)
    assert routes == ["stilde"] * 5 + ["trivial"]
    assert set(rep.extra["sinks"]) == FIGURE_SINKS


def test_split_gates(cfg):
    assert verify_by_splitting(5, 17, 25, cfg).failed_gate == "divisibility"
    assert verify_by_splitting(3, 17, 24, cfg).failed_gate == "range"


def test_split_small_case_modes(cfg):
    assert verify_by_splitting(4, 4, 2, cfg).verdict is Verdict.INCONCLUSIVE
    for mode in ("direct", "auto"):
        assert verify_by_splitting(4, 4, 2, cfg, mode).verdict is Verdict.VERIFIED
    with pytest.raises(ValueError):
        verify_by_splitting(4, 4, 2, cfg, "fast")


def test_split_routes_agree(cfg):
    for n, d, s in [(4, 9, 4), (4, 12, 8), (5, 12, 8)]:
        bound = verify_by_splitting(n, d, s, cfg)
        direct = verify_by_splitting(n, d, s, cfg, "direct")
        if bound.verified:
            assert direct.verified


# small s


def test_small_s_examples():
    assert small_s_enumerate(1) == [] and small_s_enumerate(2) == []
    assert small_s_enumerate(3) == [(5, 3), (4, 4)]
    cases = small_s_enumerate(11)
    assert {(11, 3), (4, 4), (5, 4), (6, 4), (7, 4)} <= set(cases)


def test_small_s_modes_agree():
    for s in range(1, 31):
        assert small_s_enumerate(s) == small_s_enumerate(s, "loops")


def test_small_s_cases_are_needed():
    for s in range(3, 31):
        for n, d in small_s_enumerate(s):
            assert d >= 3 and n >= 3 and s > s1(d)


def test_small_s_bad_input():
    with pytest.raises(ValueError):
        small_s_enumerate(0)
    with pytest.raises(ValueError):
        small_s_enumerate(5, "other")


@pytest.mark.parametrize("s", [3, 6])
def test_small_s_verify(s, cfg):
    rep = small_s_verify(s, cfg)
    assert rep.verdict is Verdict.VERIFIED
    assert [tuple(p) for p in rep.extra["pairs"]] == small_s_enumerate(s)
