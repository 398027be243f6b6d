"""Null modification: trimming a set by a null part so that no partial
average ever exceeds the target bound, plus the chain-level extensions
(the order-preserving psi map, disjoint-part cleanup, and the two-sided
phi map).

Everything is materialized on a finite prefix; removed parts are finite
lists of integers there, so modified sets stay expressible as the
original expression minus an explicit finite set, with the tail
unmodified.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exprs import (
    CesaroError,
    Diff,
    Empty,
    Explicit,
    SetExpr,
    Union,
    indicator,
)
from .limits import NotExactlySolvable, Verdict, classify, exact_limits

DEFAULT_HORIZON = 10**6


class NullModError(CesaroError):
    pass


def _as_fraction(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


def _null_modify_mask(mask: np.ndarray, p: int, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Replay the trimming pass on an indicator prefix.

    Walk n upward; a member joins the kept set unless that would push the
    kept count above floor(p*n/q).  Vector form: a member is removed
    exactly when its count deficit reaches a new running maximum.
    """
    n = mask.size
    if p * n >= 2**62:
        raise NullModError("bound numerator times horizon too large")
    narr = np.arange(1, n + 1, dtype=np.int64)
    cnt = np.cumsum(mask, dtype=np.int64)
    delta = cnt - (p * narr) // q
    run = np.maximum.accumulate(np.maximum(delta, 0))
    prev = np.empty_like(run)
    if n:
        prev[0] = 0
        prev[1:] = run[:-1]
    removed = mask & (delta > prev)
    return mask & ~removed, np.flatnonzero(removed)


@dataclass(frozen=True)
class NullModResult:
    source: SetExpr
    bound: Fraction
    horizon: int
    kept_mask: np.ndarray  # indicator of the kept part on 1..horizon
    removed: tuple[int, ...]  # elements moved to the null part
    approximate: bool  # bound came from an estimate, not an exact limit

    @property
    def kept_expr(self) -> SetExpr:
        """Kept part as an expression: the source minus the removed
        elements, tail unmodified."""
        if not self.removed:
            return self.source
        return Diff(self.source, Explicit(self.removed))

    @property
    def removed_expr(self) -> SetExpr:
        return Explicit(self.removed) if self.removed else Empty()

    def kept_average(self, n: int) -> Fraction:
        if not (1 <= n <= self.horizon):
            raise ValueError("n outside the materialized prefix")
        return Fraction(int(self.kept_mask[:n].sum()), n)

    def removed_density(self, n: int) -> Fraction:
        if not (1 <= n <= self.horizon):
            raise ValueError("n outside the materialized prefix")
        return Fraction(sum(1 for r in self.removed if r <= n), n)

    def verify(self) -> None:
        """Re-check the decomposition and the bound, exhaustively."""
        mask = indicator(self.source, self.horizon)
        rem = np.zeros(self.horizon, dtype=bool)
        if self.removed:
            rem[np.fromiter(self.removed, dtype=np.int64) - 1] = True
        if np.any(self.kept_mask & rem):
            raise NullModError("kept and removed overlap")
        if not np.array_equal(self.kept_mask | rem, mask):
            raise NullModError("kept and removed do not partition the source")
        p, q = self.bound.numerator, self.bound.denominator
        narr = np.arange(1, self.horizon + 1, dtype=np.int64)
        if np.any(np.cumsum(self.kept_mask, dtype=np.int64) * q > p * narr):
            raise NullModError("kept part exceeds the bound somewhere")

    def export_audit(self, stream) -> None:
        """CSV audit: one row per prefix position."""
        stream.write("N,member,kept_or_removed,running_nu\n")
        mask = indicator(self.source, self.horizon)
        kept_cnt = 0
        removed = set(self.removed)
        for n in range(1, self.horizon + 1):
            m = bool(mask[n - 1])
            if m:
                status = "removed" if n in removed else "kept"
                kept_cnt += status == "kept"
            else:
                status = ""
            stream.write(f"{n},{int(m)},{status},{kept_cnt / n:.12g}\n")


def null_modify(a: SetExpr, bound, horizon: int = DEFAULT_HORIZON) -> NullModResult:
    """Split a into a conforming part and a null remainder on the prefix.

    The bound must be the exact upper limit when one is computable; an
    estimated bound is accepted otherwise and flags the result
    approximate.
    """
    b = _as_fraction(bound)
    if not (0 <= b <= 1):
        raise NullModError("bound must lie in [0, 1]")
    approximate = False
    try:
        rep = exact_limits(a)
    except NotExactlySolvable:
        approximate = True
    else:
        if rep.upper != b:
            raise NullModError(
                f"bound {b} does not match the exact upper limit {rep.upper}"
            )
    mask = indicator(a, horizon)
    kept, removed_idx = _null_modify_mask(mask, b.numerator, b.denominator)
    removed = tuple(int(i) + 1 for i in removed_idx)
    return NullModResult(a, b, horizon, kept, removed, approximate)


# ---------------------------------------------------------------------------
# chain-level maps


@dataclass(frozen=True)
class ChainModification:
    element: SetExpr
    modified_expr: SetExpr
    modified_mask: np.ndarray
    removed: tuple[int, ...]
    added: tuple[int, ...]
    nu: Fraction


@dataclass(frozen=True)
class ChainMapResult:
    modifications: tuple[ChainModification, ...]  # user order
    horizon: int
    approximate: bool


def _chain_nus(elements, horizon: int) -> tuple[list[Fraction], bool]:
    nus = []
    approximate = False
    for e in elements:
        try:
            rep = exact_limits(e)
        except NotExactlySolvable:
            cls = classify(e, horizon)
            if cls.kind not in ("InF", "Null"):
                raise NullModError("chain element has no convergent average")
            nus.append(_as_fraction(cls.report.limit))
            approximate = True
            continue
        if rep.verdict is not Verdict.IN_F:
            raise NullModError("chain element has no convergent average")
        nus.append(rep.limit)
    return nus, approximate


def _psi_masks(
    masks: list[np.ndarray], nus: list[Fraction]
) -> tuple[list[np.ndarray], list[list[int]]]:
    """Sequential order-preserving null modification of a finite chain.

    Elements are processed in the given order; each one's increment over
    the largest already-processed subset is trimmed to the density gap,
    and the trimmed-away points are deleted from every chain member
    strictly between that subset and the element itself.
    """
    n = len(masks)
    if len(set(nus)) != n:
        raise NullModError("tied densities across chain elements")
    order = sorted(range(n), key=lambda i: nus[i])
    for a, b in zip(order, order[1:]):
        witness = np.flatnonzero(masks[a] & ~masks[b])
        if witness.size:
            raise NullModError(
                f"ordering violation on prefix: {int(witness[0]) + 1} in the "
                f"smaller-density element only"
            )
    masks = [m.copy() for m in masks]
    removed: list[list[int]] = [[] for _ in range(n)]
    processed: list[int] = []
    for k in range(n):
        below = [j for j in processed if nus[j] < nus[k]]
        if below:
            b = max(below, key=lambda j: nus[j])
            base, base_nu = masks[b], nus[b]
        else:
            base, base_nu = np.zeros(masks[k].size, dtype=bool), Fraction(0)
        inc = masks[k] & ~base
        gap = nus[k] - base_nu
        _, rem_idx = _null_modify_mask(inc, gap.numerator, gap.denominator)
        if rem_idx.size:
            for j in range(n):
                if base_nu < nus[j] <= nus[k]:
                    hit = rem_idx[masks[j][rem_idx]]
                    masks[j][hit] = False
                    removed[j].extend(int(i) + 1 for i in hit)
        processed.append(k)
    for r in removed:
        r.sort()
    return masks, removed


def chain_psi(elements, horizon: int = DEFAULT_HORIZON) -> ChainMapResult:
    """Downward modification of a finite chain, preserving inclusion.

    Each output is a subset of its input with null difference on the
    prefix, every partial average of an output stays at or below its
    density, and comparable inputs stay comparable.
    """
    elements = list(elements)
    nus, approximate = _chain_nus(elements, horizon)
    masks = [indicator(e, horizon) for e in elements]
    out_masks, removed = _psi_masks(masks, nus)
    mods = []
    for e, m, r, nu in zip(elements, out_masks, removed, nus):
        expr = Diff(e, Explicit(tuple(r))) if r else e
        mods.append(ChainModification(e, expr, m, tuple(r), (), nu))
    return ChainMapResult(tuple(mods), horizon, approximate)


def disjoint_modify(parts, horizon: int = DEFAULT_HORIZON) -> ChainMapResult:
    """Trim pairwise-disjoint convergent parts so the trimmed parts'
    densities add up exactly to the density of their union.

    Null parts collapse to the empty set; the rest are cleaned through
    the chain map on the cumulative unions.
    """
    parts = list(parts)
    masks = [indicator(p, horizon) for p in parts]
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            overlap = np.flatnonzero(masks[i] & masks[j])
            if overlap.size:
                raise NullModError(
                    f"parts {i} and {j} intersect at {int(overlap[0]) + 1}"
                )
    nus, approximate = _chain_nus(parts, horizon)

    live = [i for i in range(len(parts)) if nus[i] != 0]
    cum_masks = []
    cum_nus = []
    acc = None
    total = Fraction(0)
    for i in live:
        acc = masks[i].copy() if acc is None else acc | masks[i]
        total += nus[i]
        cum_masks.append(acc)
        cum_nus.append(total)
    psi_masks = _psi_masks(cum_masks, cum_nus)[0] if live else []

    mods: list[ChainModification] = []
    live_pos = {i: pos for pos, i in enumerate(live)}
    for i, (part, mask, nu) in enumerate(zip(parts, masks, nus)):
        if i not in live_pos:
            rem = tuple(int(x) + 1 for x in np.flatnonzero(mask))
            mods.append(
                ChainModification(
                    part, Empty(), np.zeros(horizon, dtype=bool), rem, (), nu
                )
            )
            continue
        kept = mask & psi_masks[live_pos[i]]
        rem = tuple(int(x) + 1 for x in np.flatnonzero(mask & ~kept))
        expr = Diff(part, Explicit(rem)) if rem else part
        mods.append(ChainModification(part, expr, kept, rem, (), nu))
    return ChainMapResult(tuple(mods), horizon, approximate)


def chain_phi(elements, horizon: int = DEFAULT_HORIZON) -> ChainMapResult:
    """Two-sided modification: apply the downward map to the complement
    chain, complement back, and apply the downward map once more.

    Outputs differ from inputs by prefix-null sets, preserve strict
    inclusion, and keep every partial average at or below the density.
    """
    elements = list(elements)
    nus, approximate = _chain_nus(elements, horizon)
    masks = [indicator(e, horizon) for e in elements]
    comp_masks = [~m for m in masks]
    comp_nus = [1 - nu for nu in nus]
    stage1, _ = _psi_masks(comp_masks, comp_nus)
    flipped = [~m for m in stage1]
    stage2, removed2 = _psi_masks(flipped, nus)
    mods = []
    for e, orig, mid, final, r2, nu in zip(
        elements, masks, flipped, stage2, removed2, nus
    ):
        added = tuple(int(i) + 1 for i in np.flatnonzero(mid & ~orig))
        expr: SetExpr = e
        if added:
            expr = Union(expr, Explicit(added))
        if r2:
            expr = Diff(expr, Explicit(tuple(r2)))
        mods.append(ChainModification(e, expr, final, tuple(r2), added, nu))
    return ChainMapResult(tuple(mods), horizon, approximate)
