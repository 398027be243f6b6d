"""Expression layer: membership, indicators, counts, scans, gaps,
canonicalisation.  Everything is checked against the brute-force oracle
in conftest, which evaluates set membership from first principles."""

import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import cesaro as c
from conftest import brute_set, random_fragment

SPECIALS = [
    c.Empty(),
    c.All(),
    c.Explicit((1, 4, 6)),
    c.Residue(4, frozenset({0, 2})),
    c.Blocks(c.Geometric(2)),
    c.Blocks(c.Geometric(3)),
    c.Blocks(c.Poly(1)),
    c.Blocks(c.Poly(2)),
    c.Blocks(c.RunList(0, (1, 2, 4))),
    c.Blocks(c.RunList(2, (3, 1), "cycle")),
    c.Greedy(Fraction(1, 2)),
    c.Greedy(Fraction(1, 3)),
    c.Greedy(Fraction(2, 7)),
    c.Predicate("squares"),
    c.Predicate("cubes"),
    c.Predicate("pow2"),
    c.Predicate("primes"),
    c.Predicate("paired"),
    c.Midpoint(c.Residue(4, frozenset({0})), c.Residue(2, frozenset({0}))),
    c.Dilate(3, c.Blocks(c.Geometric(2))),
    c.Shift(2, c.Residue(2, frozenset({1}))),
]


def _exprs_under_test():
    rng = random.Random(20240817)
    return SPECIALS + [random_fragment(rng, 3) for _ in range(40)]


@pytest.mark.parametrize("e", _exprs_under_test(), ids=lambda e: type(e).__name__)
def test_member_indicator_count_agree_with_oracle(e):
    N = 300
    truth = brute_set(e, N)
    ind = c.indicator(e, N)
    assert ind.dtype == bool and ind.shape == (N,)
    for n in range(1, N + 1):
        assert c.member(e, n) == (n in truth), (e, n)
        assert bool(ind[n - 1]) == (n in truth), (e, n)
    cum = np.cumsum(ind)
    for n in (1, 7, 99, 100, 256, 300):
        assert c.count_upto(e, n) == int(cum[n - 1])
        assert c.partial_average(e, n) == Fraction(int(cum[n - 1]), n)


def test_geometric_block_prefix():
    # runs 1,2,4,8,...: zero run, one run, alternating
    e = c.Blocks(c.Geometric(2))
    want = [0, 1, 1, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 0]
    assert list(c.indicator(e, 16).astype(int)) == want


def test_runlist_tail_modes():
    # head 2, runs (3, 1): zeros 1-2, ones 3-5, zeros 6, then tail
    repeat = c.Blocks(c.RunList(2, (3, 1)))
    # repeat-last: runs of length 1 alternating from position 7
    assert [n for n in range(1, 11) if c.member(repeat, n)] == [3, 4, 5, 7, 9]
    cycle = c.Blocks(c.RunList(2, (3, 1), "cycle"))
    # cycle: lengths 3,1,3,1,... alternating membership
    assert [n for n in range(1, 11) if c.member(cycle, n)] == [3, 4, 5, 7, 8, 9]


def test_greedy_prefix_and_two_over_n_bound():
    g = c.Greedy(Fraction(1, 2))
    assert [n for n in range(1, 11) if c.member(g, n)] == [1, 4, 6, 8, 10]
    s = Fraction(1, 3)
    g = c.Greedy(s)
    for n in range(1, 2000):
        assert abs(c.partial_average(g, n) - s) <= Fraction(2, n)


def test_validation_errors():
    with pytest.raises(ValueError):
        c.Explicit((3, 1))
    with pytest.raises(ValueError):
        c.Explicit((0, 1))
    with pytest.raises(ValueError):
        c.Residue(4, frozenset({4}))
    with pytest.raises(ValueError):
        c.Residue(4, frozenset())
    with pytest.raises(ValueError):
        c.Geometric(1)
    with pytest.raises(ValueError):
        c.Poly(0)
    with pytest.raises(ValueError):
        c.RunList(-1, (1,))
    with pytest.raises(ValueError):
        c.RunList(0, (1, 0))
    with pytest.raises(ValueError):
        c.RunList(0, (1,), "bogus")
    with pytest.raises(ValueError):
        c.Greedy(Fraction(3, 2))
    with pytest.raises(ValueError):
        c.Dilate(0, c.All())
    with pytest.raises(ValueError):
        c.Shift(-1, c.All())
    with pytest.raises(c.CesaroError):
        c.member(c.Predicate("nope"), 1)


@settings(max_examples=60, deadline=None)
@given(
    frm=st.integers(1, 400),
    span1=st.integers(0, 200),
    span2=st.integers(0, 200),
    seed=st.integers(0, 2**20),
)
def test_prefix_scan_splits(frm, span1, span2, seed):
    e = random_fragment(random.Random(seed), 2)
    a = c.prefix_scan(e, frm, frm + span1)
    b = c.prefix_scan(e, frm + span1 + 1, frm + span1 + 1 + span2)
    whole = c.prefix_scan(e, frm, frm + span1 + 1 + span2)
    assert a.combine(b) == whole
    assert whole.span == span1 + span2 + 2


def test_gap_functions_geometric():
    e = c.Blocks(c.Geometric(2))
    pair = c.gap_functions(e, 3, 100)
    # next member after 3 is 8, next non-member is 4
    assert (pair.p, pair.q) == (5, 1)
    assert not pair.p_limited and not pair.q_limited


def test_gap_functions_horizon_censoring():
    pair = c.gap_functions(c.Empty(), 1, 50)
    assert pair.p is None and pair.p_limited
    assert pair.q == 1 and not pair.q_limited
    with pytest.raises(ValueError):
        c.gap_functions(c.All(), 5, 5)


def test_canonicalize_preserves_membership():
    rng = random.Random(7)
    for _ in range(60):
        e = random_fragment(rng, 3)
        canon = c.canonicalize(e)
        assert np.array_equal(c.indicator(e, 400), c.indicator(canon, 400)), e


def test_canonicalize_known_rewrites():
    assert c.canonicalize(c.Compl(c.Residue(2, frozenset({0})))) == c.Residue(
        2, frozenset({1})
    )
    assert c.canonicalize(c.Dilate(3, c.All())) == c.Residue(3, frozenset({0}))
    merged = c.canonicalize(
        c.Union(c.Residue(2, frozenset({0})), c.Residue(3, frozenset({0})))
    )
    assert merged == c.Residue(6, frozenset({0, 2, 3, 4}))
    assert c.canonicalize(c.Inter(c.All(), c.Empty())) == c.Empty()
    assert c.canonicalize(c.Union(c.All(), c.Blocks(c.Geometric(2)))) == c.All()


def test_indicator_matches_member_on_blocks_far_out():
    # spot-check block membership deep into the sequence, where the
    # cumulative run table matters
    e = c.Blocks(c.Poly(2))
    ind = c.indicator(e, 5000)
    for n in (999, 1000, 2500, 4999, 5000):
        assert bool(ind[n - 1]) == (n in brute_set(e, 5000))
