"""Explicit maps with known intersection counts, and combinators on them.

Every construction yields an :class:`AffineMap` together with the
membership it is claimed to witness (``t in H(n, k)`` for the general
class, or the isometry / contraction variants).  :func:`verify` recounts
the map and certifies its class exactly.

Combinators:

* :func:`embed` grows ``k`` and ``m`` without changing the count,
* :func:`direct_sum` multiplies counts,
* :func:`plus_one` adds one to the count of a map whose every nonzero
  cube point has an image with a positive coordinate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from enum import Enum
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import ClassVar, Iterator, Sequence

import numpy as np

from .errors import ConstraintViolation, PositivityError
from .intersect import AffineMap, count_intersection, linearize, point_str, scaled_images
from .knapsack import KnapsackInstance, count_knapsack
from .linalg import RatMatrix, as_rational, common_denominator, format_rational, is_contraction, is_isometry, vector


class MapClass(str, Enum):
    GENERAL = "general"
    CONTRACTION = "contraction"
    ISOMETRY = "isometry"

    def admits(self, L: RatMatrix) -> bool:
        """Exact certificate that ``L`` belongs to this class."""
        if self is MapClass.ISOMETRY:
            return is_isometry(L)
        if self is MapClass.CONTRACTION:
            return is_contraction(L)
        return True


@dataclass(frozen=True)
class ClaimedResult:
    t: int
    k: int
    n: int
    cls: MapClass = MapClass.GENERAL

    def __post_init__(self) -> None:
        if self.t < 1:
            raise ConstraintViolation(f"claimed cardinality must be >= 1, got {self.t}")
        if self.n <= self.k and self.t != 1 << self.k:
            raise ConstraintViolation(f"n = {self.n} <= k = {self.k} only allows t = 2^k")

    def __str__(self) -> str:
        sym = {MapClass.GENERAL: "H", MapClass.CONTRACTION: "H~", MapClass.ISOMETRY: "H^"}[self.cls]
        return f"{self.t} in {sym}({self.n},{self.k})"


def _need(cond: bool, what: str) -> None:
    if not cond:
        raise ConstraintViolation(f"parameter constraint violated: {what}")


def _col(m: int, entries: dict[int, Fraction | int]) -> list[Fraction]:
    out = [Fraction(0)] * m
    for j, x in entries.items():
        out[j] = Fraction(x)
    return out


def _unit(m: int, j: int, s: int = 1) -> list[Fraction]:
    return _col(m, {j: s})


def _ones(m: int, lo: int = 0, hi: int | None = None) -> list[Fraction]:
    hi = m if hi is None else hi
    return _col(m, {j: 1 for j in range(lo, hi)})


_REGISTRY: dict[str, type[ConstructionSpec]] = {}


@dataclass(frozen=True)
class ConstructionSpec:
    """Base class; subclasses are the gallery variants."""

    cls: ClassVar[MapClass] = MapClass.GENERAL

    def __init_subclass__(cls, **kw):
        super().__init_subclass__(**kw)
        _REGISTRY[cls.__name__] = cls

    @property
    def name(self) -> str:
        return type(self).__name__

    def validate(self) -> None:
        pass

    def matrix(self) -> RatMatrix:
        raise NotImplementedError

    def claim(self) -> ClaimedResult:
        raise NotImplementedError

    def build(self) -> tuple[AffineMap, ClaimedResult]:
        self.validate()
        return AffineMap(self.matrix()), self.claim()

    def to_json(self) -> dict:
        out = {"variant": self.name}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, Fraction):
                v = format_rational(v)
            elif isinstance(v, tuple):
                v = [format_rational(x) if isinstance(x, Fraction) else x for x in v]
            out[f.name] = v
        return out

    def __str__(self) -> str:
        params = ", ".join(f"{k}={v}" for k, v in self.to_json().items() if k != "variant")
        return f"{self.name}{{{params}}}"


def spec_from_json(obj: dict | str) -> ConstructionSpec:
    if isinstance(obj, str):
        obj = json.loads(obj)
    obj = dict(obj)
    try:
        kind = _REGISTRY[obj.pop("variant")]
    except KeyError as exc:
        raise ConstraintViolation(f"unknown construction variant {exc.args[0]!r}") from None
    return kind(**obj)


@dataclass(frozen=True)
class DiagonalIsometry(ConstructionSpec):
    """``e_i -> e_i`` for ``i <= j``, ``-e_i`` beyond: count ``2^j``."""

    k: int
    j: int
    cls: ClassVar[MapClass] = MapClass.ISOMETRY

    def validate(self) -> None:
        _need(self.k >= 1, "k >= 1")
        _need(0 <= self.j <= self.k, "0 <= j <= k")

    def matrix(self) -> RatMatrix:
        return RatMatrix.from_columns([_unit(self.k, i, 1 if i < self.j else -1) for i in range(self.k)])

    def claim(self) -> ClaimedResult:
        return ClaimedResult(1 << self.j, self.k, 2 * self.k, MapClass.ISOMETRY)


@dataclass(frozen=True)
class EpsilonContraction(ConstructionSpec):
    """A single row: ``0`` on the first ``j`` coordinates, ``-eps`` on the rest.

    The image of ``e_i`` is the scalar ``-eps`` (the codomain is one-dimensional).
    """

    k: int
    j: int
    eps: Fraction | None = None
    cls: ClassVar[MapClass] = MapClass.CONTRACTION

    def __post_init__(self) -> None:
        eps = Fraction(1, self.k + 1) if self.eps is None else as_rational(self.eps)
        object.__setattr__(self, "eps", eps)

    def validate(self) -> None:
        _need(self.k >= 1, "k >= 1")
        _need(0 <= self.j <= self.k, "0 <= j <= k")
        _need(0 < self.eps < Fraction(1, self.k), "0 < eps < 1/k")

    def matrix(self) -> RatMatrix:
        return RatMatrix(((*[Fraction(0)] * self.j, *[-self.eps] * (self.k - self.j)),))

    def claim(self) -> ClaimedResult:
        return ClaimedResult(1 << self.j, self.k, self.k + 1, MapClass.CONTRACTION)


@dataclass(frozen=True)
class AllOnes(ConstructionSpec):
    """One row of ones: only ``0`` and the unit vectors survive."""

    k: int

    def validate(self) -> None:
        _need(self.k >= 1, "k >= 1")

    def matrix(self) -> RatMatrix:
        return RatMatrix(((Fraction(1),) * self.k,))

    def claim(self) -> ClaimedResult:
        return ClaimedResult(self.k + 1, self.k, self.k + 1)


@dataclass(frozen=True)
class TwoRow(ConstructionSpec):
    k: int

    def validate(self) -> None:
        _need(self.k >= 1, "k >= 1")

    def matrix(self) -> RatMatrix:
        cols = [[Fraction(1), Fraction(1)] for _ in range(self.k - 1)]
        cols.append([Fraction(0), Fraction(-1)])
        return RatMatrix.from_columns(cols)

    def claim(self) -> ClaimedResult:
        return ClaimedResult(2 * self.k - 1, self.k, self.k + 2)


@dataclass(frozen=True)
class HalfPlusOne(ConstructionSpec):
    """Identity on the first ``k-1`` coordinates, last column all ones."""

    k: int

    def validate(self) -> None:
        _need(self.k >= 2, "k >= 2")

    def matrix(self) -> RatMatrix:
        m = self.k - 1
        return RatMatrix.from_columns([_unit(m, i) for i in range(m)] + [_ones(m)])

    def claim(self) -> ClaimedResult:
        return ClaimedResult((1 << (self.k - 1)) + 1, self.k, 2 * self.k - 1)


@dataclass(frozen=True)
class BinomialPlusOne(ConstructionSpec):
    """One row, ``1/r`` on the first ``l`` coordinates and ``2`` after."""

    k: int
    l: int  # noqa: E741
    r: int

    def validate(self) -> None:
        _need(self.k >= 1, "k >= 1")
        _need(1 <= self.r, "r >= 1 (the map uses 1/r)")
        _need(self.r <= self.l <= self.k, "r <= l <= k")

    def matrix(self) -> RatMatrix:
        return RatMatrix(tuple([tuple(Fraction(1, self.r) if i < self.l else Fraction(2) for i in range(self.k))]))

    def claim(self) -> ClaimedResult:
        return ClaimedResult(comb(self.l, self.r) + 1, self.k, self.k + 1)


@dataclass(frozen=True)
class TwoPowers(ConstructionSpec):
    """Count ``2^t + 2^r``, or ``2^t + 2^r + 1`` with ``plus_one``."""

    k: int
    t: int
    r: int
    plus_one: bool = False

    def validate(self) -> None:
        _need(self.k >= 1, "k >= 1")
        _need(0 <= self.r < self.t < self.k, "0 <= r < t < k")
        if self.plus_one:
            _need(self.t <= self.k - 2, "t <= k - 2 when plus_one")

    def matrix(self) -> RatMatrix:
        k, t = self.k, self.t
        ell = t - self.r
        cols = [_unit(k, i) for i in range(t)]
        cols.append(_ones(k, 0, ell))
        cols += [_unit(k, i, -1) for i in range(t + 1, k)]
        if self.plus_one:
            cols[t + 1] = _ones(k, 0, t + 2)
        return RatMatrix.from_columns(cols)

    def claim(self) -> ClaimedResult:
        return ClaimedResult((1 << self.t) + (1 << self.r) + int(self.plus_one), self.k, 2 * self.k)


@dataclass(frozen=True)
class SumOfPowers(ConstructionSpec):
    """Count ``sum 2^{t_i}`` for a strictly increasing ``t_list``.

    With ``t_j`` the largest exponent: identity up to ``t_j``, ``-e_i`` up
    to ``k - j``, and the last ``j`` columns select which lower exponent
    contributes.
    """

    k: int
    t_list: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "t_list", tuple(int(x) for x in self.t_list))

    def validate(self) -> None:
        ts = self.t_list
        _need(len(ts) >= 1, "t_list non-empty")
        _need(all(a < b for a, b in zip(ts, ts[1:])), "t_0 < t_1 < ... < t_j")
        _need(ts[0] >= 0, "t_0 >= 0")
        j = len(ts) - 1
        _need(self.k - j >= ts[-1], "k - j >= t_j")

    def matrix(self) -> RatMatrix:
        k, ts = self.k, self.t_list
        j, tj = len(ts) - 1, ts[-1]
        cols = []
        for i in range(1, k + 1):
            if i <= tj:
                cols.append(_unit(k, i - 1))
            elif i <= k - j:
                cols.append(_unit(k, i - 1, -1))
            else:
                delta = k - i
                cols.append(_ones(k, ts[delta], tj))
        return RatMatrix.from_columns(cols)

    def claim(self) -> ClaimedResult:
        return ClaimedResult(sum(1 << t for t in self.t_list), self.k, 2 * self.k)


@dataclass(frozen=True)
class Isometry3Example(ConstructionSpec):
    """An orthogonal 3x3 map keeping exactly ``0``, ``e1+e2`` and ``e1+e3``."""

    cls: ClassVar[MapClass] = MapClass.ISOMETRY

    def matrix(self) -> RatMatrix:
        return RatMatrix.from_columns([[1, 2, 2], [2, 1, -2], [2, -2, 1]]).scale(Fraction(1, 3))

    def claim(self) -> ClaimedResult:
        return ClaimedResult(3, 3, 6, MapClass.ISOMETRY)


@dataclass(frozen=True)
class NearIsometry(ConstructionSpec):
    """Isometry ``R^k -> R^{2k-2}`` keeping the origin and the ``k`` weight-``(k-1)`` points.

    Column ``i`` is ``(1/(k-1) * ones_k - e_i) (+) 1/(k-1) * ones_{k-2}``.
    """

    k: int
    cls: ClassVar[MapClass] = MapClass.ISOMETRY

    def validate(self) -> None:
        _need(self.k >= 3, "k >= 3")

    def matrix(self) -> RatMatrix:
        k = self.k
        a = Fraction(1, k - 1)
        cols = [[a - (1 if j == i else 0) for j in range(k)] + [a] * (k - 2) for i in range(k)]
        return RatMatrix.from_columns(cols)

    def claim(self) -> ClaimedResult:
        return ClaimedResult(self.k + 1, self.k, 3 * self.k - 2, MapClass.ISOMETRY)


@dataclass(frozen=True)
class KnapsackHyperplane(ConstructionSpec):
    """The hyperplane ``sum p_i v_i = q`` as the affine map ``v -> 2D(p.v - q)``.

    ``D`` clears all denominators, so every image value is an even integer
    and lands in ``{0, 1}`` exactly when it is ``0``, i.e. when ``v`` solves
    the knapsack.  For integer data ``D = 1``.
    """

    weights: tuple[Fraction, ...]
    target: Fraction = field(default=Fraction(0))

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", vector(self.weights))
        object.__setattr__(self, "target", as_rational(self.target))

    @property
    def instance(self) -> KnapsackInstance:
        return KnapsackInstance(self.weights, self.target)

    def validate(self) -> None:
        _need(len(self.weights) >= 1, "at least one weight")

    @property
    def scale(self) -> int:
        return 2 * common_denominator((*self.weights, self.target))

    def matrix(self) -> RatMatrix:
        return RatMatrix((tuple(self.scale * p for p in self.weights),))

    def affine_map(self) -> AffineMap:
        """The encoding alone, also valid when the instance has no solutions."""
        self.validate()
        return AffineMap(self.matrix(), (-self.scale * self.target,))

    def build(self) -> tuple[AffineMap, ClaimedResult]:
        return self.affine_map(), self.claim()

    def claim(self) -> ClaimedResult:
        ell = len(self.weights)
        t = count_knapsack(self.instance)
        if t == 0:
            raise ConstraintViolation("knapsack instance has no solutions; 0 is not an intersection cardinality")
        return ClaimedResult(t, ell - 1, ell)


def verify(spec: ConstructionSpec) -> bool:
    """Rebuild, recount and certify the map class; True iff everything matches the claim."""
    amap, claim = spec.build()
    rep = count_intersection(amap)
    if rep.count != claim.t:
        return False
    if not amap.is_linear and count_intersection(linearize(amap), certify=False).count != claim.t:
        return False
    if claim.cls is MapClass.ISOMETRY and not rep.is_isometry:
        return False
    if claim.cls is MapClass.CONTRACTION and not rep.is_contraction:
        return False
    return True


def gallery(k_max: int) -> Iterator[ConstructionSpec]:
    """Every in-range parameter choice of every linear variant with ``k <= k_max``."""
    for k in range(1, k_max + 1):
        for j in range(k + 1):
            yield DiagonalIsometry(k, j)
            yield EpsilonContraction(k, j)
            yield EpsilonContraction(k, j, Fraction(1, 2 * k))
        yield AllOnes(k)
        yield TwoRow(k)
        if k >= 2:
            yield HalfPlusOne(k)
        for ell in range(1, k + 1):
            for r in range(1, ell + 1):
                yield BinomialPlusOne(k, ell, r)
        for t in range(1, k):
            for r in range(t):
                yield TwoPowers(k, t, r)
                if t <= k - 2:
                    yield TwoPowers(k, t, r, plus_one=True)
        for j in range(k + 1):
            for ts in combinations(range(k - j + 1), j + 1):
                yield SumOfPowers(k, ts)
        if k == 3:
            yield Isometry3Example()
        if k >= 3:
            yield NearIsometry(k)


# -- combinators ------------------------------------------------------------


def embed(L: RatMatrix, dk: int = 0, dm: int = 0) -> RatMatrix:
    """Add ``dk`` domain columns ``(b, 0, ..., 0)`` and ``dm`` zero rows; the count is kept.

    ``b = sum_i |L_{1i}| + 2`` makes the first image coordinate of any
    point using a new column at least ``2``.
    """
    if dk < 0 or dm < 0:
        raise ValueError("dk and dm must be nonnegative")
    b = sum(abs(a) for a in L.rows[0]) + 2
    rows = [list(r) for r in L.rows]
    rows[0] += [b] * dk
    for r in rows[1:]:
        r += [Fraction(0)] * dk
    rows += [[Fraction(0)] * (L.k + dk) for _ in range(dm)]
    return RatMatrix(tuple(tuple(r) for r in rows))


def direct_sum(A: RatMatrix, B: RatMatrix) -> RatMatrix:
    """Block-diagonal ``A (+) B``; counts multiply."""
    rows = [tuple(r) + (Fraction(0),) * B.k for r in A.rows]
    rows += [(Fraction(0),) * A.k + tuple(r) for r in B.rows]
    return RatMatrix(tuple(rows))


def positivity_violation(L: RatMatrix) -> int | None:
    """Smallest nonzero cube point whose image has no positive coordinate, if any."""
    _, imgs, codes = scaled_images(L)
    bad = ~np.any(imgs > 0, axis=1)
    bad &= codes != 0
    if not bad.any():
        return None
    return int(codes[bad].min())


def has_positivity_property(L: RatMatrix) -> bool:
    """Every nonzero cube point has an image with some coordinate > 0."""
    return positivity_violation(L) is None


def plus_one(L: RatMatrix) -> RatMatrix:
    """Append the all-ones image vector as a new domain column; count goes up by one."""
    bad = positivity_violation(L)
    if bad is not None:
        raise PositivityError(
            f"positivity fails at v = {point_str(bad, L.k)}: L v has no positive coordinate", bad
        )
    return RatMatrix(tuple(tuple(r) + (Fraction(1),) for r in L.rows))
