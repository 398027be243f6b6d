"""Limit engine: exact fragment, block formulas, streamed estimation,
classification, gap diagnostics.

The exact engine is cross-checked against the period-window density
oracle from conftest, which counts members over one full period far
beyond any finite perturbation.
"""

import random
from fractions import Fraction

import pytest

import cesaro as c
from cesaro.limits import NotExactlySolvable
from conftest import random_fragment, window_density


def test_exact_matches_window_oracle_on_random_fragments():
    rng = random.Random(31415)
    for _ in range(150):
        e = random_fragment(rng, 3)
        rep = c.exact_limits(e)
        assert rep.verdict is c.Verdict.IN_F
        assert rep.exact and rep.tolerance == 0
        assert rep.upper == rep.lower == rep.limit == window_density(e), e


def test_exact_residue_density():
    rng = random.Random(99)
    for _ in range(50):
        m = rng.randint(1, 50)
        k = rng.randint(1, m)
        res = frozenset(rng.sample(range(m), k))
        rep = c.exact_limits(c.Residue(m, res))
        assert rep.limit == Fraction(k, m)


def test_exact_trivial_sets():
    assert c.exact_limits(c.Empty()).limit == 0
    assert c.exact_limits(c.All()).limit == 1
    assert c.exact_limits(c.Explicit((5, 9, 1000))).limit == 0


def test_geometric_block_formula():
    for r in (2, 3, 4, 5):
        rep = c.exact_limits(c.Blocks(c.Geometric(r)))
        assert rep.verdict is c.Verdict.NOT_IN_F
        assert rep.method == "block-formula"
        assert rep.upper == Fraction(r, r + 1)
        assert rep.lower == Fraction(1, r + 1)


def test_poly_block_and_greedy_limits():
    for q in (1, 2, 3):
        rep = c.exact_limits(c.Blocks(c.Poly(q)))
        assert rep.verdict is c.Verdict.IN_F and rep.limit == Fraction(1, 2)
    for s in (Fraction(1, 3), Fraction(2, 7), Fraction(16, 113)):
        rep = c.exact_limits(c.Greedy(s))
        assert rep.verdict is c.Verdict.IN_F and rep.limit == s


def test_predicate_limits():
    for name in ("squares", "cubes", "pow2", "primes"):
        rep = c.exact_limits(c.Predicate(name))
        assert rep.limit == 0, name
    rep = c.exact_limits(c.Predicate("paired"))
    assert rep.verdict is c.Verdict.IN_F and rep.limit == Fraction(1, 2)


def test_exact_dilate_shift_midpoint():
    geo = c.Blocks(c.Geometric(2))
    rep = c.exact_limits(c.Dilate(3, geo))
    assert (rep.upper, rep.lower) == (Fraction(2, 9), Fraction(1, 9))
    rep = c.exact_limits(c.Shift(7, geo))
    assert (rep.upper, rep.lower) == (Fraction(2, 3), Fraction(1, 3))
    mid = c.Midpoint(c.Residue(4, frozenset({0})), c.Residue(2, frozenset({0})))
    assert c.exact_limits(mid).limit == Fraction(3, 8)


def test_null_perturbation_does_not_move_exact_limits():
    # Cesàro limits are invariant under null-set perturbations
    base = c.Residue(3, frozenset({0, 2}))
    nu = c.exact_limits(base).limit
    for perturbed in (
        c.Union(base, c.Explicit((1, 7, 13))),
        c.Diff(base, c.Explicit((3, 6))),
        c.SymDiff(base, c.Predicate("pow2")),
        c.Union(base, c.Predicate("squares")),
    ):
        rep = c.exact_limits(perturbed)
        assert rep.upper == rep.lower == nu, perturbed


def test_not_exactly_solvable():
    geo = c.Blocks(c.Geometric(2))
    for e in (
        c.Union(geo, c.Residue(3, frozenset({1}))),
        c.Inter(geo, c.Residue(2, frozenset({0}))),
        c.Midpoint(c.Empty(), geo),
    ):
        with pytest.raises(NotExactlySolvable):
            c.exact_limits(e)


def test_estimate_geometric_extremes():
    rep = c.estimate_limits(c.Blocks(c.Geometric(2)), 2**18, 0.5, 1e-3)
    assert rep.verdict is c.Verdict.NOT_IN_F
    assert rep.method == "streamed" and rep.horizon == 2**18
    assert abs(rep.upper - 2 / 3) < 1e-3
    assert abs(rep.lower - 1 / 3) < 1e-3


def test_estimate_convergent_and_finite():
    rep = c.estimate_limits(c.Residue(5, frozenset({0, 3})), 10**5)
    assert rep.verdict is c.Verdict.IN_F
    assert abs(rep.limit - 0.4) < 1e-3
    rep = c.estimate_limits(c.Explicit((2, 4, 8)), 10**5)
    assert rep.verdict is c.Verdict.IN_F and rep.limit < 1e-3


def test_classify_kinds():
    assert c.classify(c.Residue(2, frozenset({0}))).kind == "InF"
    assert c.classify(c.Predicate("primes")).kind == "Null"
    assert c.classify(c.Blocks(c.Geometric(2))).kind == "NotInF"
    # scaled block formulas stay exact
    cls = c.classify(c.Dilate(2, c.Blocks(c.Geometric(2))), 2**18)
    assert cls.kind == "NotInF" and not cls.approximate
    assert (cls.report.upper, cls.report.lower) == (Fraction(1, 3), Fraction(1, 6))
    # but an intersection with a residue class falls back to streaming
    mixed = c.Inter(c.Blocks(c.Geometric(2)), c.Residue(2, frozenset({0})))
    cls = c.classify(mixed, 2**18)
    assert cls.kind == "NotInF" and cls.approximate
    assert cls.report.upper - cls.report.lower > 0.1


def test_gap_sublinearity_trends():
    assert c.gap_sublinearity(c.Blocks(c.Geometric(2)), 10**5).trend == (
        "bounded-away-from-zero"
    )
    assert c.gap_sublinearity(c.Residue(5, frozenset({1, 2})), 10**5).trend == (
        "decreasing"
    )
    assert c.gap_sublinearity(c.Blocks(c.Poly(2)), 10**5).trend == "decreasing"


def test_report_as_dict_rendering():
    d = c.exact_limits(c.Residue(3, frozenset({0}))).as_dict()
    assert d["limit"] == {"rational": "1/3", "value": pytest.approx(1 / 3)}
    assert d["verdict"] == "InF" and d["method"] == "exact"
    d = c.estimate_limits(c.Blocks(c.Geometric(2)), 2**14).as_dict()
    assert d["method"] == "streamed" and d["limit"] is None
    assert d["verdict"] == "NotInF"
