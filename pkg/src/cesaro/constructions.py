"""Builders for the named set families.

Residue classes, greedy target-density sets, block (run-length) sets, the
divergent-intersection pair, midpoint sets, and the dyadic partition.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .exprs import (
    Blocks,
    CesaroError,
    Dilate,
    Empty,
    Greedy,
    Midpoint,
    Predicate,
    Residue,
    SetExpr,
    Shift,
    ZSpec,
    indicator,
)
from .limits import NotExactlySolvable, Verdict, exact_limits


class ConstructionError(CesaroError):
    pass


def residue_set(m: int, residues) -> SetExpr:
    """All n with n mod m in the given residue list."""
    res = frozenset(residues)
    if not res:
        return Empty()
    try:
        return Residue(m, res)
    except ValueError as exc:
        raise ConstructionError(str(exc)) from None


def greedy_target(s) -> Greedy:
    """The greedy set with partial averages converging to s.

    Accepts Fraction, int, or a string like '2/7' or '0.125'; the value
    is held as an exact rational so membership is reproducible bit for bit.
    """
    try:
        return Greedy(Fraction(s))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConstructionError(str(exc)) from None


def block_set(z: ZSpec) -> Blocks:
    return Blocks(z)


def counterexample_pair() -> tuple[SetExpr, SetExpr]:
    """Two sets with density 1/2 whose intersection has no density.

    B is the evens; C picks exactly one of {2k-1, 2k} for every k, steered
    by the geometric block set A so that B ∩ C = 2A diverges.
    """
    return Residue(2, frozenset({0})), Predicate("paired")


def midpoint_set(lower: SetExpr, upper: SetExpr, check_horizon: int = 10**4) -> SetExpr:
    """lower plus every second element of upper \\ lower, starting with the
    first element of the difference.

    For convergent endpoints the density is the average of the endpoint
    densities.  Containment is verified on a checking prefix; divergent
    endpoints (exactly known) are rejected.
    """
    lo = indicator(lower, check_horizon)
    hi = indicator(upper, check_horizon)
    bad = np.flatnonzero(lo & ~hi)
    if bad.size:
        raise ConstructionError(
            f"lower is not contained in upper: witness {int(bad[0]) + 1}"
        )
    for side in (lower, upper):
        try:
            rep = exact_limits(side)
        except NotExactlySolvable:
            continue
        if rep.verdict is not Verdict.IN_F:
            raise ConstructionError("midpoint endpoints must have convergent averages")
    if np.array_equal(lo, hi) and lower == upper:
        return lower
    return Midpoint(lower, upper)


def dyadic_partition(kmax: int) -> list[SetExpr]:
    """D_k = 2^k times the odd numbers >= 3, for k = 0..kmax.

    Pairwise disjoint (distinct 2-adic valuations), density 1/2^(k+1),
    and every partial average sits below the density.
    """
    if not (0 <= kmax <= 30):
        raise ConstructionError("kmax must lie in 0..30")
    odds_from_3 = Shift(2, Residue(2, frozenset({1})))
    out: list[SetExpr] = []
    for k in range(kmax + 1):
        out.append(odds_from_3 if k == 0 else Dilate(2**k, odds_from_3))
    return out
