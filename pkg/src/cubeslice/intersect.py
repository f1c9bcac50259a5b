"""Counting cube points that an affine map sends into the cube.

A cube point ``v`` in ``{0,1}^k`` is an int bitmask: bit ``i`` holds
coordinate ``v_{i+1}``.  For an affine map ``v -> Lv + c`` we count

    t = |{ v in {0,1}^k : Lv + c in {0,1}^m }|

by walking the cube in Gray-code order, so that consecutive points differ
in one coordinate and the image changes by a single column.

Three evaluation paths exist and must agree:

``integer``
    multiply through by the LCM ``D`` of all denominators, walk a low
    block of bits in Gray order with a numpy cumulative sum, then step the
    high bits in Gray order, adding one column per step; a coordinate is
    in the cube iff it equals ``0`` or ``D``.
``rational``
    the same Gray walk done one point at a time on Fractions.
``naive``
    recompute ``Lv + c`` from scratch at every point.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from fractions import Fraction
from math import lcm
from typing import Sequence

import numpy as np

from .errors import CapacityError, NoIntersectionError
from .linalg import RatMatrix, RationalLike, common_denominator, is_contraction, is_isometry, vector

MAX_K = 62
_LOW_BITS = 12
_INT64_SAFE = 1 << 62


class GapClass(str, Enum):
    FULL = "Full"
    AT_MOST_THREE_QUARTERS = "AtMostThreeQuarters"
    AT_MOST_HALF = "AtMostHalf"
    SMALL = "Small"


@dataclass(frozen=True)
class AffineMap:
    """``v -> L v + c``; ``c`` defaults to zero (the linear case)."""

    L: RatMatrix
    c: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        c = vector(self.c) if self.c else (Fraction(0),) * self.L.m
        if len(c) != self.L.m:
            raise ValueError(f"offset has length {len(c)}, map has {self.L.m} rows")
        object.__setattr__(self, "c", c)

    @classmethod
    def linear(cls, L: RatMatrix) -> AffineMap:
        return cls(L)

    @property
    def k(self) -> int:
        return self.L.k

    @property
    def m(self) -> int:
        return self.L.m

    @property
    def is_linear(self) -> bool:
        return all(x == 0 for x in self.c)

    def __call__(self, bits: int) -> tuple[Fraction, ...]:
        return tuple(sum((r[i] for i in range(self.k) if bits >> i & 1), ci) for r, ci in zip(self.L.rows, self.c))


@dataclass(frozen=True)
class IntersectionReport:
    k: int
    m: int
    count: int
    witnesses: tuple[int, ...] | None = None
    is_isometry: bool | None = None
    is_contraction: bool | None = None
    gap_class: GapClass = field(default=GapClass.SMALL)

    def witness_strings(self) -> list[str]:
        return [point_str(w, self.k) for w in self.witnesses or ()]


def point_str(bits: int, k: int) -> str:
    """``v_1 v_2 ... v_k`` as a digit string, e.g. ``"10"`` for e_1 in H^2."""
    return "".join("1" if bits >> i & 1 else "0" for i in range(k))


def parse_point(text: str, k: int) -> int:
    """Inverse of :func:`point_str`."""
    text = text.strip()
    if len(text) != k or set(text) - {"0", "1"}:
        raise ValueError(f"expected {k} binary digits, got {text!r}")
    return sum(1 << i for i, ch in enumerate(text) if ch == "1")


def point_vector(bits: int, k: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(bits >> i & 1) for i in range(k))


def in_cube(w: Sequence[Fraction]) -> bool:
    return all(x == 0 or x == 1 for x in w)


def in_extended_cube(w: Sequence[RationalLike]) -> bool:
    """True iff every coordinate lies in {0, 1, -1}."""
    return all(x in (0, 1, -1) for x in vector(w))


def classify(t: int, k: int, contraction: bool | None) -> GapClass:
    if t == 1 << k:
        return GapClass.FULL
    if t <= 1 << (k - 1):
        return GapClass.AT_MOST_HALF if contraction else GapClass.SMALL
    return GapClass.AT_MOST_THREE_QUARTERS


def _check_capacity(k: int) -> None:
    if k > MAX_K:
        raise CapacityError(f"k = {k} exceeds the enumeration cap of {MAX_K}")


# -- rational paths ---------------------------------------------------------


def _count_naive(amap: AffineMap, collect: bool) -> tuple[int, list[int]]:
    hits = []
    count = 0
    for bits in range(1 << amap.k):
        if in_cube(amap(bits)):
            count += 1
            if collect:
                hits.append(bits)
    return count, hits


def _count_rational_gray(amap: AffineMap, collect: bool) -> tuple[int, list[int]]:
    cols = amap.L.columns()
    w = list(amap.c)
    m = amap.m
    bits = 0
    count = 0
    hits = []
    for step in range(1 << amap.k):
        if step:
            i = (step & -step).bit_length() - 1
            bits ^= 1 << i
            col = cols[i]
            if bits >> i & 1:
                for j in range(m):
                    w[j] += col[j]
            else:
                for j in range(m):
                    w[j] -= col[j]
        if all(x == 0 or x == 1 for x in w):
            count += 1
            if collect:
                hits.append(bits)
    return count, hits


# -- integer fast path --------------------------------------------------------


def scaled_integer_form(amap: AffineMap) -> tuple[int, list[list[int]], list[int]]:
    """``(D, D*L as int columns, D*c)`` with ``D`` the LCM of every denominator."""
    d = lcm(amap.L.denominator(), common_denominator(amap.c))
    cols = [[int(a * d) for a in col] for col in amap.L.columns()]
    off = [int(x * d) for x in amap.c]
    return d, cols, off


def _fits_int64(cols: list[list[int]], off: list[int], d: int) -> bool:
    m = len(off)
    for j in range(m):
        if sum(abs(col[j]) for col in cols) + abs(off[j]) + d >= _INT64_SAFE:
            return False
    return True


@lru_cache(maxsize=None)
def _gray_tables(nbits: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gray codes of ``0..2**nbits-1``, the bit flipped at each step and its sign."""
    steps = np.arange(1 << nbits, dtype=np.int64)
    codes = steps ^ (steps >> 1)
    s = steps[1:]
    flipped = np.log2(s & -s).astype(np.int64) if len(s) else s
    sign = np.where((codes[1:] >> flipped) & 1, 1, -1)
    return codes, flipped, sign


def _gray_block(cols_low: np.ndarray, nbits: int) -> tuple[np.ndarray, np.ndarray]:
    """Images and bitmasks of the ``2**nbits`` low points in Gray order.

    ``cols_low`` has shape ``(nbits, m)``.  Row ``s`` of the result is the
    image of the ``s``-th Gray code, built as a running sum of signed
    single-column steps.
    """
    codes, flipped, sign = _gray_tables(nbits)
    deltas = np.zeros((1 << nbits, cols_low.shape[1]), dtype=np.int64)
    if nbits:
        deltas[1:] = cols_low[flipped] * sign[:, None]
    return np.cumsum(deltas, axis=0), codes


def _count_integer_range(args) -> tuple[int, list[int]]:
    """Count over high Gray steps ``[lo, hi)``; the unit of parallel work."""
    cols, off, d, k, lo, hi, collect = args
    nlow = min(k, _LOW_BITS)
    m = len(off)
    arr = np.array(cols, dtype=np.int64).reshape(k, m)
    low_imgs, low_codes = _gray_block(arr[:nlow], nlow)
    high_cols = arr[nlow:]
    # offset at the first high step of this range
    start_code = lo ^ (lo >> 1)
    base = np.array(off, dtype=np.int64)
    for i in range(k - nlow):
        if start_code >> i & 1:
            base = base + high_cols[i]
    count = 0
    hits: list[int] = []
    code = start_code
    for step in range(lo, hi):
        if step != lo:
            i = (step & -step).bit_length() - 1
            code ^= 1 << i
            if code >> i & 1:
                base = base + high_cols[i]
            else:
                base = base - high_cols[i]
        img = low_imgs + base
        ok = np.all((img == 0) | (img == d), axis=1)
        n_ok = int(np.count_nonzero(ok))
        if n_ok:
            count += n_ok
            if collect:
                hits.extend(int(x) | (code << nlow) for x in low_codes[ok])
    return count, hits


def scaled_images(L: RatMatrix, max_k: int = 22) -> tuple[int, np.ndarray, np.ndarray]:
    """``(D, images, codes)`` for every cube point, in Gray order.

    ``images[s]`` is ``D * L v`` for the point ``v = codes[s]``.  Meant for
    exhaustive property checks at small ``k``.
    """
    if L.k > max_k:
        raise CapacityError(f"k = {L.k} too large to materialise all images (cap {max_k})")
    d, cols, _ = scaled_integer_form(AffineMap(L))
    if not _fits_int64(cols, [0] * L.m, d):
        raise CapacityError("entries too large for int64 image tables")
    arr = np.array(cols, dtype=np.int64).reshape(L.k, L.m)
    imgs, codes = _gray_block(arr, L.k)
    return d, imgs, codes


def _count_python_int(cols: list[list[int]], off: list[int], d: int, k: int, collect: bool) -> tuple[int, list[int]]:
    """Gray walk on Python ints, for scaled entries too large for int64."""
    w = list(off)
    m = len(w)
    bits = 0
    count = 0
    hits = []
    for step in range(1 << k):
        if step:
            i = (step & -step).bit_length() - 1
            bits ^= 1 << i
            col = cols[i]
            if bits >> i & 1:
                for j in range(m):
                    w[j] += col[j]
            else:
                for j in range(m):
                    w[j] -= col[j]
        if all(x == 0 or x == d for x in w):
            count += 1
            if collect:
                hits.append(bits)
    return count, hits


def _count_integer(amap: AffineMap, collect: bool, workers: int) -> tuple[int, list[int]]:
    d, cols, off = scaled_integer_form(amap)
    k = amap.k
    if not _fits_int64(cols, off, d):
        return _count_python_int(cols, off, d, k, collect)
    nhigh = max(0, k - _LOW_BITS)
    total = 1 << nhigh
    nparts = max(1, min(workers, total))
    bounds = [total * i // nparts for i in range(nparts + 1)]
    jobs = [(cols, off, d, k, bounds[i], bounds[i + 1], collect) for i in range(nparts)]
    if nparts == 1:
        results = [_count_integer_range(jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=nparts) as ex:
            results = list(ex.map(_count_integer_range, jobs))
    count = sum(r[0] for r in results)
    hits = [h for r in results for h in r[1]]
    return count, hits


def default_workers() -> int:
    env = os.environ.get("CUBESLICE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def count_intersection(
    amap: AffineMap | RatMatrix,
    collect_witnesses: bool = False,
    *,
    method: str = "integer",
    workers: int = 1,
    certify: bool = True,
) -> IntersectionReport:
    """Exact ``|{v in H^k : Lv + c in H^m}|``.

    ``method`` is ``"integer"`` (default), ``"rational"`` or ``"naive"``;
    all three give identical reports.  Witnesses, when collected, are
    returned sorted by bitmask so the report does not depend on the walk
    order or on ``workers``.  With ``certify=False`` the isometry and
    contraction checks are skipped and the gap class is computed as for a
    general map.
    """
    if isinstance(amap, RatMatrix):
        amap = AffineMap(amap)
    k = amap.k
    _check_capacity(k)
    if method == "integer":
        count, hits = _count_integer(amap, collect_witnesses, workers)
    elif method == "rational":
        count, hits = _count_rational_gray(amap, collect_witnesses)
    elif method == "naive":
        count, hits = _count_naive(amap, collect_witnesses)
    else:
        raise ValueError(f"unknown method {method!r}")
    iso = contr = None
    if certify:
        iso = is_isometry(amap.L)
        contr = iso or is_contraction(amap.L)
    return IntersectionReport(
        k=k,
        m=amap.m,
        count=count,
        witnesses=tuple(sorted(hits)) if collect_witnesses else None,
        is_isometry=iso,
        is_contraction=contr,
        gap_class=classify(count, k, contr),
    )


def count(L: RatMatrix | AffineMap) -> int:
    """Shorthand for the bare intersection count."""
    return count_intersection(L, certify=False).count


def trace(L: RatMatrix | AffineMap) -> int:
    """Membership bitset over all ``2**k`` points: bit ``v`` set iff ``v`` maps into the cube."""
    rep = count_intersection(L, collect_witnesses=True, certify=False)
    out = 0
    for w in rep.witnesses:
        out |= 1 << w
    return out


def linearize(amap: AffineMap) -> AffineMap:
    """Reflect an affine map to a linear one with the same intersection count.

    With ``v*`` the smallest cube point in the intersection, domain
    coordinates where ``v*_i = 1`` are replaced by ``1 - v_i`` and image
    coordinates where ``(Lv* + c)_j = 1`` by ``1 - w_j``; the result fixes
    the origin.  Both reflections are cube symmetries, so the count is kept.
    """
    if amap.is_linear:
        return amap
    rep = count_intersection(amap, collect_witnesses=True, certify=False)
    if not rep.witnesses:
        raise NoIntersectionError("affine map misses the cube entirely; no linear reduction exists")
    star = rep.witnesses[0]
    image = amap(star)
    rows = []
    for r, wj in zip(amap.L.rows, image):
        row = [-a if star >> i & 1 else a for i, a in enumerate(r)]
        if wj == 1:
            row = [-a for a in row]
        rows.append(tuple(row))
    return AffineMap(RatMatrix(tuple(rows)))
