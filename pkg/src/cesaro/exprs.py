"""Set expressions over the positive integers.

A ``SetExpr`` is a closed, immutable description of a subset of
N = {1, 2, ...}: explicit finite sets, residue classes, run-length block
sets, greedy target-density sets, a small registry of named predicate
sets, and Boolean/affine combinators on top of those.  Everything here is
exact: membership is a pure total function and partial averages are
returned as ``fractions.Fraction``.

The streaming kernel is ``indicator``, which materialises the 0/1 prefix
of a set as a numpy array; ``prefix_scan`` is the range-splittable
counting primitive built on it.
"""

from __future__ import annotations

import math
import threading
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

#: Largest explicit set accepted.  Bigger explicit inputs are rejected:
#: they have density 0 anyway and usually signal misuse.
MAX_EXPLICIT = 10**6

#: Largest modulus produced by residue rewriting in ``canonicalize``.
MAX_CANON_MODULUS = 10**6


class CesaroError(Exception):
    """Base class for errors raised by this package."""


class ConfigurationError(CesaroError):
    """Unknown predicate name or other registry misconfiguration."""


# ---------------------------------------------------------------------------
# run-length specifications for block sets


class ZSpec:
    """Run-length law for a block set: alternating runs of zeroes and ones."""

    __slots__ = ()

    def run(self, k: int) -> int:
        """Length of the k-th run (k >= 1; run 1 is zeroes, run 2 ones, ...)."""
        raise NotImplementedError


@dataclass(frozen=True)
class Geometric(ZSpec):
    """Runs z_k = ratio**(k-1)."""

    ratio: int

    def __post_init__(self):
        if self.ratio < 2:
            raise ValueError("geometric run ratio must be >= 2")

    def run(self, k: int) -> int:
        return self.ratio ** (k - 1)


@dataclass(frozen=True)
class Poly(ZSpec):
    """Runs z_k = k**exponent."""

    exponent: int

    def __post_init__(self):
        if self.exponent < 1:
            raise ValueError("polynomial run exponent must be >= 1")

    def run(self, k: int) -> int:
        return k**self.exponent


@dataclass(frozen=True)
class RunList(ZSpec):
    """Explicit run lengths with a tail rule.

    ``head`` is the length of the initial zero run (may be 0); ``runs``
    are the following run lengths (all >= 1).  Once ``runs`` is
    exhausted the ``tail`` rule applies: ``repeat-last`` repeats the
    final entry forever, ``cycle`` cycles through ``runs``.
    """

    head: int
    runs: tuple[int, ...]
    tail: str = "repeat-last"

    def __post_init__(self):
        if self.head < 0:
            raise ValueError("initial zero run must be >= 0")
        if not self.runs or any(z < 1 for z in self.runs):
            raise ValueError("run lengths after the first must be >= 1")
        if self.tail not in ("repeat-last", "cycle"):
            raise ValueError(f"unknown tail rule {self.tail!r}")

    def run(self, k: int) -> int:
        if k == 1:
            return self.head
        i = k - 2
        if i < len(self.runs):
            return self.runs[i]
        if self.tail == "repeat-last":
            return self.runs[-1]
        return self.runs[i % len(self.runs)]


# ---------------------------------------------------------------------------
# expression variants


class SetExpr:
    """Base class for set expressions.  All variants are frozen dataclasses."""

    __slots__ = ()


@dataclass(frozen=True)
class Empty(SetExpr):
    pass


@dataclass(frozen=True)
class All(SetExpr):
    pass


@dataclass(frozen=True)
class Explicit(SetExpr):
    elements: tuple[int, ...]

    def __post_init__(self):
        elems = self.elements
        if len(elems) > MAX_EXPLICIT:
            raise ValueError(f"explicit set larger than {MAX_EXPLICIT} elements")
        if any(n < 1 for n in elems):
            raise ValueError("explicit elements must be >= 1")
        if any(a >= b for a, b in zip(elems, elems[1:])):
            raise ValueError("explicit elements must be strictly increasing")


@dataclass(frozen=True)
class Residue(SetExpr):
    modulus: int
    residues: frozenset[int]

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be >= 1")
        if not self.residues:
            raise ValueError("residue set must be nonempty (use Empty instead)")
        if any(not (0 <= r < self.modulus) for r in self.residues):
            raise ValueError("residues must lie in [0, modulus)")
        if not isinstance(self.residues, frozenset):
            object.__setattr__(self, "residues", frozenset(self.residues))


@dataclass(frozen=True)
class Blocks(SetExpr):
    z: ZSpec


@dataclass(frozen=True)
class Greedy(SetExpr):
    target: Fraction

    def __post_init__(self):
        t = Fraction(self.target)
        if not (0 <= t <= 1):
            raise ValueError("greedy target must lie in [0, 1]")
        object.__setattr__(self, "target", t)


@dataclass(frozen=True)
class Predicate(SetExpr):
    name: str


@dataclass(frozen=True)
class Union(SetExpr):
    left: SetExpr
    right: SetExpr


@dataclass(frozen=True)
class Inter(SetExpr):
    left: SetExpr
    right: SetExpr


@dataclass(frozen=True)
class Compl(SetExpr):
    inner: SetExpr


@dataclass(frozen=True)
class Diff(SetExpr):
    left: SetExpr
    right: SetExpr


@dataclass(frozen=True)
class SymDiff(SetExpr):
    left: SetExpr
    right: SetExpr


@dataclass(frozen=True)
class Dilate(SetExpr):
    """{factor * n : n in inner}."""

    factor: int
    inner: SetExpr

    def __post_init__(self):
        if self.factor < 1:
            raise ValueError("dilation factor must be >= 1")


@dataclass(frozen=True)
class Shift(SetExpr):
    """{n + offset : n in inner}; results <= 0 cannot occur (offset >= 0)."""

    offset: int
    inner: SetExpr

    def __post_init__(self):
        if self.offset < 0:
            raise ValueError("shift offset must be >= 0")


@dataclass(frozen=True)
class Midpoint(SetExpr):
    """``lower`` plus every second element of ``upper \\ lower``.

    Selection starts with the first element of the difference.  Only
    meaningful when lower is a subset of upper; builders verify that on
    a prefix before constructing this node.
    """

    lower: SetExpr
    upper: SetExpr


# ---------------------------------------------------------------------------
# block boundary memoisation

_block_lock = threading.Lock()
# zspec -> (boundaries list Z_k, cumulative ones at each boundary)
_block_cache: dict[ZSpec, tuple[list[int], list[int]]] = {}


def _block_tables(z: ZSpec, upto: int) -> tuple[list[int], list[int]]:
    """Partial-sum boundaries Z_k and cumulative one-counts, with Z_last >= upto."""
    with _block_lock:
        entry = _block_cache.get(z)
        if entry is None:
            entry = ([], [])
            _block_cache[z] = entry
        bounds, ones = entry
        while not bounds or bounds[-1] < upto:
            k = len(bounds) + 1
            zk = z.run(k)
            if k >= 2 and zk < 1:
                raise ValueError("run lengths after the first must be >= 1")
            prev = bounds[-1] if bounds else 0
            prev_ones = ones[-1] if ones else 0
            bounds.append(prev + zk)
            ones.append(prev_ones + (zk if k % 2 == 0 else 0))
        return bounds, ones


def _blocks_member(z: ZSpec, n: int) -> bool:
    bounds, _ = _block_tables(z, n)
    k = bisect_left(bounds, n)  # 0-based index of block containing n
    return k % 2 == 1


def _blocks_count(z: ZSpec, N: int) -> int:
    if N <= 0:
        return 0
    bounds, ones = _block_tables(z, N)
    k = bisect_left(bounds, N)
    prev_bound = bounds[k - 1] if k > 0 else 0
    prev_ones = ones[k - 1] if k > 0 else 0
    partial = (N - prev_bound) if k % 2 == 1 else 0
    return prev_ones + partial


# ---------------------------------------------------------------------------
# greedy target-density sets


class _GreedyState:
    """Memoised membership prefix of a greedy target-density set.

    Extension of the memo is serialised behind a lock; reads of already
    computed prefixes are plain list indexing.
    """

    __slots__ = ("bits", "count", "lock")

    def __init__(self):
        self.bits = bytearray()
        self.count = 0
        self.lock = threading.Lock()


_greedy_lock = threading.Lock()
_greedy_states: dict[Fraction, _GreedyState] = {}


def _greedy_state(target: Fraction) -> _GreedyState:
    with _greedy_lock:
        state = _greedy_states.get(target)
        if state is None:
            state = _GreedyState()
            _greedy_states[target] = state
    return state


def _greedy_extend(target: Fraction, n: int) -> _GreedyState:
    """Replay the greedy recurrence until the membership prefix covers n.

    Start from {1}; after each prefix of length N, the next integer N+1
    is added exactly when the running average is strictly below the
    target.  The same rule is applied from N = 1 on.
    """
    state = _greedy_state(target)
    if len(state.bits) >= n:
        return state
    p, q = target.numerator, target.denominator
    with state.lock:
        bits, c = state.bits, state.count
        if not bits:
            bits.append(1)
            c = 1
        for m in range(len(bits) + 1, n + 1):
            # m joins iff the average over 1..m-1 is strictly below target
            take = c * q < p * (m - 1)
            bits.append(take)
            c += take
        state.count = c
    return state


# ---------------------------------------------------------------------------
# predicate registry

_sieve_lock = threading.Lock()
_sieve: np.ndarray = np.zeros(2, dtype=bool)  # index n, valid below len


def _prime_sieve(upto: int) -> np.ndarray:
    global _sieve
    with _sieve_lock:
        if len(_sieve) <= upto:
            size = max(upto + 1, 2 * len(_sieve), 1 << 16)
            s = np.ones(size, dtype=bool)
            s[:2] = False
            for p in range(2, math.isqrt(size - 1) + 1):
                if s[p]:
                    s[p * p :: p] = False
            _sieve = s
        return _sieve


def _icbrt(n: int) -> int:
    r = round(n ** (1 / 3))
    while r**3 > n:
        r -= 1
    while (r + 1) ** 3 <= n:
        r += 1
    return r


def _squares_indicator(N: int) -> np.ndarray:
    arr = np.zeros(N, dtype=bool)
    roots = np.arange(1, math.isqrt(N) + 1, dtype=np.int64)
    arr[roots * roots - 1] = True
    return arr


def _cubes_indicator(N: int) -> np.ndarray:
    arr = np.zeros(N, dtype=bool)
    roots = np.arange(1, _icbrt(N) + 1, dtype=np.int64)
    arr[roots**3 - 1] = True
    return arr


def _pow2_indicator(N: int) -> np.ndarray:
    arr = np.zeros(N, dtype=bool)
    k = 1
    while (1 << k) <= N:
        arr[(1 << k) - 1] = True
        k += 1
    return arr


def _primes_indicator(N: int) -> np.ndarray:
    return _prime_sieve(N)[1 : N + 1].copy()


# The alternating counterpart set from the divergent block example: even n
# belongs iff n/2 lies in the geometric block set, odd n iff (n+1)/2 does not.
_PAIRED_BLOCKS = Blocks(Geometric(2))


def _paired_member(n: int) -> bool:
    if n % 2 == 0:
        return _blocks_member(_PAIRED_BLOCKS.z, n // 2)
    return not _blocks_member(_PAIRED_BLOCKS.z, (n + 1) // 2)


def _paired_indicator(N: int) -> np.ndarray:
    half = (N + 1) // 2
    base = indicator(_PAIRED_BLOCKS, half)
    arr = np.zeros(N, dtype=bool)
    arr[1::2] = base[: N // 2]  # even n = 2k  <->  k in base
    arr[0::2] = ~base[:half]  # odd n = 2k-1 <->  k not in base
    return arr


@dataclass(frozen=True)
class PredicateSpec:
    member: object  # n -> bool
    count_upto: object | None  # N -> int, exact closed form if available
    indicator: object | None  # N -> np.ndarray
    exact_upper: Fraction | None  # known upper Cesàro limit, if any
    exact_lower: Fraction | None


PREDICATES: dict[str, PredicateSpec] = {
    "squares": PredicateSpec(
        member=lambda n: math.isqrt(n) ** 2 == n,
        count_upto=math.isqrt,
        indicator=_squares_indicator,
        exact_upper=Fraction(0),
        exact_lower=Fraction(0),
    ),
    "cubes": PredicateSpec(
        member=lambda n: _icbrt(n) ** 3 == n,
        count_upto=_icbrt,
        indicator=_cubes_indicator,
        exact_upper=Fraction(0),
        exact_lower=Fraction(0),
    ),
    "pow2": PredicateSpec(
        member=lambda n: n >= 2 and n & (n - 1) == 0,
        count_upto=lambda N: N.bit_length() - 1 if N >= 2 else 0,
        indicator=_pow2_indicator,
        exact_upper=Fraction(0),
        exact_lower=Fraction(0),
    ),
    "primes": PredicateSpec(
        member=lambda n: bool(_prime_sieve(n)[n]),
        count_upto=lambda N: int(np.count_nonzero(_prime_sieve(N)[: N + 1])),
        indicator=_primes_indicator,
        exact_upper=Fraction(0),  # prime number theorem
        exact_lower=Fraction(0),
    ),
    "paired": PredicateSpec(
        member=_paired_member,
        count_upto=None,
        indicator=_paired_indicator,
        # exactly one of {2k-1, 2k} belongs for every k, so the average
        # stays within 1/N of 1/2 and the limit is exactly 1/2
        exact_upper=Fraction(1, 2),
        exact_lower=Fraction(1, 2),
    ),
}


def predicate_spec(name: str) -> PredicateSpec:
    try:
        return PREDICATES[name]
    except KeyError:
        raise ConfigurationError(f"unknown predicate {name!r}") from None


# ---------------------------------------------------------------------------
# membership


def member(e: SetExpr, n: int) -> bool:
    """Indicator of the set denoted by ``e`` at n (n >= 1).  Pure and total."""
    if n < 1:
        raise ValueError("universe starts at 1")
    if isinstance(e, Empty):
        return False
    if isinstance(e, All):
        return True
    if isinstance(e, Explicit):
        i = bisect_left(e.elements, n)
        return i < len(e.elements) and e.elements[i] == n
    if isinstance(e, Residue):
        return n % e.modulus in e.residues
    if isinstance(e, Blocks):
        return _blocks_member(e.z, n)
    if isinstance(e, Greedy):
        state = _greedy_extend(e.target, n)
        return bool(state.bits[n - 1])
    if isinstance(e, Predicate):
        return bool(predicate_spec(e.name).member(n))
    if isinstance(e, Union):
        return member(e.left, n) or member(e.right, n)
    if isinstance(e, Inter):
        return member(e.left, n) and member(e.right, n)
    if isinstance(e, Compl):
        return not member(e.inner, n)
    if isinstance(e, Diff):
        return member(e.left, n) and not member(e.right, n)
    if isinstance(e, SymDiff):
        return member(e.left, n) != member(e.right, n)
    if isinstance(e, Dilate):
        return n % e.factor == 0 and member(e.inner, n // e.factor)
    if isinstance(e, Shift):
        return n > e.offset and member(e.inner, n - e.offset)
    if isinstance(e, Midpoint):
        if member(e.lower, n):
            return True
        if not member(e.upper, n):
            return False
        pos = count_upto(e.upper, n) - count_upto(e.lower, n)
        return pos % 2 == 1
    raise TypeError(f"unknown expression variant {type(e).__name__}")


# ---------------------------------------------------------------------------
# bulk indicator / counting


def indicator(e: SetExpr, N: int) -> np.ndarray:
    """Boolean array of length N; entry i is membership of n = i + 1."""
    if N < 0:
        raise ValueError("prefix length must be >= 0")
    if isinstance(e, Empty):
        return np.zeros(N, dtype=bool)
    if isinstance(e, All):
        return np.ones(N, dtype=bool)
    if isinstance(e, Explicit):
        arr = np.zeros(N, dtype=bool)
        cut = bisect_right(e.elements, N)
        if cut:
            arr[np.fromiter(e.elements[:cut], dtype=np.int64) - 1] = True
        return arr
    if isinstance(e, Residue):
        arr = np.zeros(N, dtype=bool)
        for r in e.residues:
            arr[(r - 1) % e.modulus :: e.modulus] = True
        return arr
    if isinstance(e, Blocks):
        if N == 0:
            return np.zeros(0, dtype=bool)
        bounds, _ = _block_tables(e.z, N)
        zarr = np.fromiter(bounds, dtype=np.int64)
        idx = np.searchsorted(zarr, np.arange(1, N + 1, dtype=np.int64), side="left")
        return (idx % 2 == 1).astype(bool)
    if isinstance(e, Greedy):
        if N == 0:
            return np.zeros(0, dtype=bool)
        state = _greedy_extend(e.target, N)
        return np.frombuffer(bytes(state.bits[:N]), dtype=np.uint8).astype(bool)
    if isinstance(e, Predicate):
        spec = predicate_spec(e.name)
        if spec.indicator is not None:
            return spec.indicator(N)
        return np.fromiter((spec.member(n) for n in range(1, N + 1)), dtype=bool, count=N)
    if isinstance(e, Union):
        return indicator(e.left, N) | indicator(e.right, N)
    if isinstance(e, Inter):
        return indicator(e.left, N) & indicator(e.right, N)
    if isinstance(e, Compl):
        return ~indicator(e.inner, N)
    if isinstance(e, Diff):
        return indicator(e.left, N) & ~indicator(e.right, N)
    if isinstance(e, SymDiff):
        return indicator(e.left, N) ^ indicator(e.right, N)
    if isinstance(e, Dilate):
        arr = np.zeros(N, dtype=bool)
        inner = indicator(e.inner, N // e.factor)
        arr[e.factor - 1 :: e.factor] = inner
        return arr
    if isinstance(e, Shift):
        arr = np.zeros(N, dtype=bool)
        if N > e.offset:
            arr[e.offset :] = indicator(e.inner, N - e.offset)
        return arr
    if isinstance(e, Midpoint):
        lo = indicator(e.lower, N)
        hi = indicator(e.upper, N)
        gap = hi & ~lo
        pos = np.cumsum(gap)
        return lo | (gap & (pos % 2 == 1))
    raise TypeError(f"unknown expression variant {type(e).__name__}")


def count_upto(e: SetExpr, N: int) -> int:
    """Number of members of ``e`` in [1, N], exactly."""
    if N <= 0:
        return 0
    if isinstance(e, Empty):
        return 0
    if isinstance(e, All):
        return N
    if isinstance(e, Explicit):
        return bisect_right(e.elements, N)
    if isinstance(e, Residue):
        total = 0
        for r in e.residues:
            if r == 0:
                total += N // e.modulus
            elif r <= N:
                total += (N - r) // e.modulus + 1
        return total
    if isinstance(e, Blocks):
        return _blocks_count(e.z, N)
    if isinstance(e, Greedy):
        return int(indicator(e, N).sum())
    if isinstance(e, Predicate):
        spec = predicate_spec(e.name)
        if spec.count_upto is not None:
            return int(spec.count_upto(N))
        return int(indicator(e, N).sum())
    if isinstance(e, Compl):
        return N - count_upto(e.inner, N)
    if isinstance(e, Dilate):
        return count_upto(e.inner, N // e.factor)
    if isinstance(e, Shift):
        return count_upto(e.inner, N - e.offset)
    if isinstance(e, Midpoint):
        clo = count_upto(e.lower, N)
        chi = count_upto(e.upper, N)
        return clo + (chi - clo + 1) // 2
    # general combinators: one bulk scan
    return int(indicator(e, N).sum())


def partial_average(e: SetExpr, N: int) -> Fraction:
    """Exact partial average: the fraction of [1, N] belonging to ``e``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return Fraction(count_upto(e, N), N)


@dataclass(frozen=True)
class PrefixStat:
    """Range-splittable membership count over a scanned span."""

    span: int
    count: int

    def __post_init__(self):
        if not (0 <= self.count <= self.span):
            raise ValueError("count must lie in [0, span]")

    def combine(self, other: "PrefixStat") -> "PrefixStat":
        return PrefixStat(self.span + other.span, self.count + other.count)


def prefix_scan(e: SetExpr, frm: int, to: int) -> PrefixStat:
    """Membership count over [frm, to].  Associative under concatenation."""
    if not (1 <= frm <= to):
        raise ValueError("need 1 <= frm <= to")
    return PrefixStat(to - frm + 1, count_upto(e, to) - count_upto(e, frm - 1))


# ---------------------------------------------------------------------------
# gap functions


@dataclass(frozen=True)
class GapPair:
    """Distances from N to the next member (p) and next non-member (q).

    A value of None means no witness was found within the search horizon;
    the matching ``*_limited`` flag is then set.
    """

    p: int | None
    q: int | None
    p_limited: bool = False
    q_limited: bool = False


def gap_functions(e: SetExpr, N: int, horizon: int) -> GapPair:
    """Smallest k > 0 with membership 1 (p) resp. 0 (q) at N + k.

    Searches positions N+1 .. horizon; horizon must exceed N.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if horizon <= N:
        raise ValueError("search horizon must exceed N")
    p = q = None
    upto = N
    chunk = 1024
    while upto < horizon and (p is None or q is None):
        nxt = min(horizon, upto + chunk)
        seg = indicator(e, nxt)[upto:]
        if p is None:
            hits = np.flatnonzero(seg)
            if hits.size:
                p = upto + int(hits[0]) + 1 - N
        if q is None:
            gaps = np.flatnonzero(~seg)
            if gaps.size:
                q = upto + int(gaps[0]) + 1 - N
        upto = nxt
        chunk *= 4
    return GapPair(p, q, p_limited=p is None, q_limited=q is None)


# ---------------------------------------------------------------------------
# canonicalisation


def _lcm(a: int, b: int) -> int:
    return a // math.gcd(a, b) * b


def _lift_residues(res: frozenset[int], m: int, L: int) -> frozenset[int]:
    return frozenset(r + i * m for r in res for i in range(L // m))


def _reduce_residue(m: int, res: frozenset[int]) -> SetExpr:
    """Smallest-modulus residue expression denoting the same set."""
    if not res:
        return Empty()
    if len(res) == m:
        return All()
    for d in range(1, m + 1):
        if m % d:
            continue
        low = frozenset(r % d for r in res)
        if len(low) * (m // d) == len(res) and _lift_residues(low, d, m) == res:
            if len(low) == d:
                return All()
            return Residue(d, low)
    return Residue(m, res)


def _residue_of(e: SetExpr) -> tuple[int, frozenset[int]] | None:
    if isinstance(e, All):
        return 1, frozenset({0})
    if isinstance(e, Residue):
        return e.modulus, e.residues
    return None


_SET_OPS = {
    Union: lambda a, b: a | b,
    Inter: lambda a, b: a & b,
    Diff: lambda a, b: a - b,
    SymDiff: lambda a, b: a ^ b,
}


def canonicalize(e: SetExpr) -> SetExpr:
    """Structure-preserving simplification.

    Applies Boolean identities, merges residue expressions onto a common
    modulus (then reduces the modulus), and performs explicit-set algebra.
    The output denotes the same set as the input.
    """
    if isinstance(e, (Union, Inter, Diff, SymDiff)):
        a = canonicalize(e.left)
        b = canonicalize(e.right)
        op = type(e)
        # identity / absorption with the extreme sets
        if isinstance(a, Empty):
            return {Union: b, Inter: Empty(), Diff: Empty(), SymDiff: b}[op]
        if isinstance(b, Empty):
            return {Union: a, Inter: Empty(), Diff: a, SymDiff: a}[op]
        if isinstance(a, All) and op in (Union, Inter):
            return All() if op is Union else b
        if isinstance(b, All):
            return {Union: All(), Inter: a, Diff: Empty(), SymDiff: canonicalize(Compl(a))}[op]
        if a == b:
            return a if op in (Union, Inter) else Empty()
        ra, rb = _residue_of(a), _residue_of(b)
        if ra and rb:
            L = _lcm(ra[0], rb[0])
            if L <= MAX_CANON_MODULUS:
                sa = _lift_residues(ra[1], ra[0], L)
                sb = _lift_residues(rb[1], rb[0], L)
                return _reduce_residue(L, _SET_OPS[op](sa, sb))
        if isinstance(a, Explicit) and isinstance(b, Explicit):
            merged = tuple(sorted(_SET_OPS[op](set(a.elements), set(b.elements))))
            return Explicit(merged) if merged else Empty()
        return op(a, b)
    if isinstance(e, Compl):
        inner = canonicalize(e.inner)
        if isinstance(inner, Compl):
            return inner.inner
        if isinstance(inner, Empty):
            return All()
        if isinstance(inner, All):
            return Empty()
        if isinstance(inner, Residue):
            return _reduce_residue(
                inner.modulus, frozenset(range(inner.modulus)) - inner.residues
            )
        return Compl(inner)
    if isinstance(e, Dilate):
        inner = canonicalize(e.inner)
        if e.factor == 1:
            return inner
        if isinstance(inner, Empty):
            return Empty()
        if isinstance(inner, All):
            return Residue(e.factor, frozenset({0}))
        if isinstance(inner, Explicit):
            return Explicit(tuple(e.factor * n for n in inner.elements))
        if isinstance(inner, Dilate):
            return Dilate(e.factor * inner.factor, inner.inner)
        return Dilate(e.factor, inner)
    if isinstance(e, Shift):
        inner = canonicalize(e.inner)
        if e.offset == 0:
            return inner
        if isinstance(inner, Empty):
            return Empty()
        if isinstance(inner, Explicit):
            return Explicit(tuple(n + e.offset for n in inner.elements))
        if isinstance(inner, Shift):
            return Shift(e.offset + inner.offset, inner.inner)
        return Shift(e.offset, inner)
    if isinstance(e, Residue):
        return _reduce_residue(e.modulus, e.residues)
    if isinstance(e, Explicit) and not e.elements:
        return Empty()
    if isinstance(e, Midpoint):
        lo = canonicalize(e.lower)
        hi = canonicalize(e.upper)
        if lo == hi:
            return lo
        return Midpoint(lo, hi)
    return e
