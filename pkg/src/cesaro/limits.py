"""Upper/lower Cesàro limits: exact where structure allows, streamed otherwise.

The exact engine reduces an expression to a periodic normal form (a set of
residues modulo m, possibly perturbed by a density-zero set).  Perturbing
by a null set never moves the upper or lower limit, so the exact density
|R|/m survives finite exceptions and unions with known null sets.  Block
and greedy families get their closed forms at top level.  Everything else
falls back to a windowed streaming estimate with an explicit Unknown
verdict when the evidence is inconclusive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .exprs import (
    All,
    Blocks,
    CesaroError,
    Compl,
    Diff,
    Dilate,
    Empty,
    Explicit,
    Geometric,
    Greedy,
    Inter,
    Midpoint,
    Poly,
    Predicate,
    Residue,
    SetExpr,
    Shift,
    SymDiff,
    Union,
    canonicalize,
    indicator,
    member,
    predicate_spec,
)

DEFAULT_HORIZON = 10**6
DEFAULT_WINDOW = 0.5
DEFAULT_TOLERANCE = 1e-3

#: residue refinement guard: reject common moduli beyond this
MAX_MODULUS = 10**9


class NotExactlySolvable(CesaroError):
    """The expression is outside the exactly solvable fragment."""


class Verdict(str, Enum):
    IN_F = "InF"
    NOT_IN_F = "NotInF"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class LimitReport:
    upper: Fraction | float
    lower: Fraction | float
    limit: Fraction | float | None
    method: str  # "exact" | "block-formula" | "streamed"
    horizon: int | None
    tolerance: float
    verdict: Verdict

    def __post_init__(self):
        if not (0 <= self.lower <= self.upper <= 1):
            raise ValueError("limits must satisfy 0 <= lower <= upper <= 1")
        if self.verdict is Verdict.IN_F and self.limit is None:
            raise ValueError("InF verdict requires a limit value")
        if self.method in ("exact", "block-formula") and self.tolerance != 0:
            raise ValueError("exact methods carry zero tolerance")

    @property
    def exact(self) -> bool:
        return self.method in ("exact", "block-formula")

    def as_dict(self) -> dict:
        def render(v):
            if v is None:
                return None
            if isinstance(v, Fraction):
                return {"rational": f"{v.numerator}/{v.denominator}", "value": float(v)}
            return {"value": float(v)}

        return {
            "upper": render(self.upper),
            "lower": render(self.lower),
            "limit": render(self.limit),
            "method": self.method,
            "horizon": self.horizon,
            "tolerance": self.tolerance,
            "verdict": self.verdict.value,
        }


# ---------------------------------------------------------------------------
# exact fragment via periodic normal form


@dataclass(frozen=True)
class _Form:
    """Residues mod modulus, possibly perturbed by some null set (fuzz).

    The perturbation is never tracked pointwise; it only matters that it
    is null, which leaves both Cesàro limits at |residues|/modulus.
    """

    modulus: int
    residues: frozenset[int]
    fuzz: bool

    @property
    def density(self) -> Fraction:
        return Fraction(len(self.residues), self.modulus)


def _lift(res: frozenset[int], m: int, L: int) -> frozenset[int]:
    return frozenset(r + i * m for r in res for i in range(L // m))


def _merge(a: _Form, b: _Form, op) -> _Form:
    L = a.modulus // math.gcd(a.modulus, b.modulus) * b.modulus
    if L > MAX_MODULUS:
        raise NotExactlySolvable(f"common modulus {L} exceeds {MAX_MODULUS}")
    ra = _lift(a.residues, a.modulus, L)
    rb = _lift(b.residues, b.modulus, L)
    return _Form(L, op(ra, rb), a.fuzz or b.fuzz)


def _form(e: SetExpr) -> _Form:
    if isinstance(e, Empty):
        return _Form(1, frozenset(), False)
    if isinstance(e, All):
        return _Form(1, frozenset({0}), False)
    if isinstance(e, Explicit):
        return _Form(1, frozenset(), bool(e.elements))
    if isinstance(e, Residue):
        return _Form(e.modulus, e.residues, False)
    if isinstance(e, Predicate):
        spec = predicate_spec(e.name)
        if spec.exact_upper == 0 and spec.exact_lower == 0:
            return _Form(1, frozenset(), True)  # known null set
        raise NotExactlySolvable(f"predicate {e.name!r} is not periodic")
    if isinstance(e, Union):
        return _merge(_form(e.left), _form(e.right), lambda x, y: x | y)
    if isinstance(e, Inter):
        return _merge(_form(e.left), _form(e.right), lambda x, y: x & y)
    if isinstance(e, Diff):
        return _merge(_form(e.left), _form(e.right), lambda x, y: x - y)
    if isinstance(e, SymDiff):
        return _merge(_form(e.left), _form(e.right), lambda x, y: x ^ y)
    if isinstance(e, Compl):
        f = _form(e.inner)
        return _Form(f.modulus, frozenset(range(f.modulus)) - f.residues, f.fuzz)
    if isinstance(e, Dilate):
        f = _form(e.inner)
        L = f.modulus * e.factor
        if L > MAX_MODULUS:
            raise NotExactlySolvable(f"common modulus {L} exceeds {MAX_MODULUS}")
        return _Form(L, frozenset(r * e.factor for r in f.residues), f.fuzz)
    if isinstance(e, Shift):
        f = _form(e.inner)
        shifted = frozenset((r + e.offset) % f.modulus for r in f.residues)
        # shifting drops nothing but delays the pattern: a finite prefix
        # of the shifted residue classes is missing, a null perturbation
        return _Form(f.modulus, shifted, f.fuzz or e.offset > 0)
    raise NotExactlySolvable(f"{type(e).__name__} is not in the periodic fragment")


def _report_exact(upper: Fraction, lower: Fraction, method: str) -> LimitReport:
    verdict = Verdict.IN_F if upper == lower else Verdict.NOT_IN_F
    limit = upper if upper == lower else None
    return LimitReport(upper, lower, limit, method, None, 0, verdict)


def exact_limits(e: SetExpr) -> LimitReport:
    """Exact upper/lower limits, or NotExactlySolvable.

    Covers residue/explicit Boolean combinations (with null perturbations),
    geometric and polynomial block sets, greedy targets, registered
    predicates with known limits, and midpoints/complements/affine images
    of all of these.
    """
    try:
        f = _form(e)
    except NotExactlySolvable:
        pass
    else:
        d = f.density
        return _report_exact(d, d, "exact")
    if isinstance(e, Blocks) and isinstance(e.z, Geometric):
        r = e.z.ratio
        # run lengths r**(n-1): averages at block ends alternate between
        # r/(r+1) (after a one-run) and 1/(r+1) (after a zero-run)
        return _report_exact(Fraction(r, r + 1), Fraction(1, r + 1), "block-formula")
    if isinstance(e, Blocks) and isinstance(e.z, Poly):
        half = Fraction(1, 2)
        return _report_exact(half, half, "block-formula")
    if isinstance(e, Greedy):
        return _report_exact(e.target, e.target, "exact")
    if isinstance(e, Predicate):
        spec = predicate_spec(e.name)
        if spec.exact_upper is not None and spec.exact_lower is not None:
            return _report_exact(spec.exact_upper, spec.exact_lower, "exact")
        raise NotExactlySolvable(f"predicate {e.name!r} has no known exact limits")
    if isinstance(e, Compl):
        r = exact_limits(e.inner)
        return _report_exact(1 - r.lower, 1 - r.upper, r.method)
    if isinstance(e, Dilate):
        r = exact_limits(e.inner)
        k = e.factor
        return _report_exact(Fraction(r.upper, k), Fraction(r.lower, k), r.method)
    if isinstance(e, Shift):
        return exact_limits(e.inner)
    if isinstance(e, Midpoint):
        lo = exact_limits(e.lower)
        hi = exact_limits(e.upper)
        if lo.verdict is Verdict.IN_F and hi.verdict is Verdict.IN_F:
            mid = Fraction(lo.limit + hi.limit, 2)
            method = "exact" if lo.method == hi.method == "exact" else "block-formula"
            return _report_exact(mid, mid, method)
        raise NotExactlySolvable("midpoint of divergent endpoints")
    # identities like union with Empty can hide a solvable core; retry
    # once on the simplified expression
    simplified = canonicalize(e)
    if simplified != e:
        return exact_limits(simplified)
    raise NotExactlySolvable(f"{type(e).__name__} is not exactly solvable here")


# ---------------------------------------------------------------------------
# streamed estimation


def estimate_limits(
    e: SetExpr,
    horizon: int,
    window: float = DEFAULT_WINDOW,
    tolerance: float = DEFAULT_TOLERANCE,
) -> LimitReport:
    """Windowed surrogate for the upper/lower limits in one streaming pass.

    The upper/lower estimates are the max/min of the partial averages over
    the trailing window.  NotInF requires the oscillation to persist in
    three consecutive doubling sub-windows; a single wide swing is not
    treated as divergence.
    """
    if horizon < 1000:
        raise ValueError("estimation horizon must be >= 1000")
    if not (0 < window < 1):
        raise ValueError("window must lie in (0, 1)")
    counts = np.cumsum(indicator(e, horizon), dtype=np.int64)

    def seg_extremes(lo: int, hi: int) -> tuple[float, float]:
        # partial averages for N in (lo, hi]
        nu = counts[lo:hi] / np.arange(lo + 1, hi + 1, dtype=np.float64)
        return float(nu.max()), float(nu.min())

    start = max(1, math.ceil((1 - window) * horizon))
    upper, lower = seg_extremes(start - 1, horizon)

    persistent = False
    if horizon >= 8:
        oscs = []
        for lo, hi in ((horizon // 2, horizon), (horizon // 4, horizon // 2), (horizon // 8, horizon // 4)):
            mx, mn = seg_extremes(lo, hi)
            oscs.append(mx - mn)
        persistent = all(o > tolerance for o in oscs)

    if upper - lower <= tolerance:
        verdict, limit = Verdict.IN_F, (upper + lower) / 2
    elif persistent:
        verdict, limit = Verdict.NOT_IN_F, None
    else:
        verdict, limit = Verdict.UNKNOWN, None
    return LimitReport(upper, lower, limit, "streamed", horizon, tolerance, verdict)


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class Classification:
    kind: str  # "InF" | "Null" | "NotInF" | "Unknown"
    report: LimitReport
    approximate: bool


def classify(
    e: SetExpr,
    horizon: int = DEFAULT_HORIZON,
    tolerance: float = DEFAULT_TOLERANCE,
) -> Classification:
    """Three-way (plus Unknown) classification, exact first, streamed fallback."""
    try:
        rep = exact_limits(e)
    except NotExactlySolvable:
        rep = estimate_limits(e, horizon, DEFAULT_WINDOW, tolerance)
        if rep.verdict is Verdict.IN_F:
            kind = "Null" if rep.limit <= tolerance else "InF"
        elif rep.verdict is Verdict.NOT_IN_F:
            kind = "NotInF"
        else:
            kind = "Unknown"
        return Classification(kind, rep, approximate=True)
    if rep.verdict is Verdict.IN_F:
        kind = "Null" if rep.limit == 0 else "InF"
    else:
        kind = "NotInF"
    return Classification(kind, rep, approximate=False)


# ---------------------------------------------------------------------------
# gap diagnostics


@dataclass(frozen=True)
class GapDiagnostic:
    # entries are (N, ratio or None); None marks a horizon-censored sample
    p_samples: tuple[tuple[int, float | None], ...]
    q_samples: tuple[tuple[int, float | None], ...]
    trend: str  # "decreasing" | "bounded-away-from-zero" | "inconclusive"


def gap_sublinearity(e: SetExpr, horizon: int) -> GapDiagnostic:
    """Sample next-member/next-gap distances at N = 2^j and classify the trend.

    A decreasing trend of P(N)/N is the finite-scale signature of
    convergence; ratios staying bounded away from zero witness long runs
    of the complement growing with N.
    """
    from .exprs import gap_functions

    if horizon < 1000:
        raise ValueError("horizon must be >= 1000")
    p_samples: list[tuple[int, float | None]] = []
    q_samples: list[tuple[int, float | None]] = []
    j = 3
    while 2**j <= horizon:
        n = 2**j
        pair = gap_functions(e, n, 5 * n + 100)
        p_samples.append((n, None if pair.p is None else pair.p / n))
        q_samples.append((n, None if pair.q is None else pair.q / n))
        j += 1

    # censored samples exceeded a horizon ~4N past the base point; treat
    # them as a large ratio for trend purposes
    ratios = [4.0 if r is None else r for _, r in p_samples]
    head = ratios[: min(4, len(ratios))]
    tail = ratios[-min(4, len(ratios)) :]
    if max(tail) <= max(0.25 * max(head), 1e-6):
        trend = "decreasing"
    elif max(tail) >= 0.01:
        trend = "bounded-away-from-zero"
    else:
        trend = "inconclusive"
    return GapDiagnostic(tuple(p_samples), tuple(q_samples), trend)
