"""Which subsets of the cube are traces of linear maps, and which sizes occur.

A *pattern* ``T`` is a subset of ``H^k = {0,1}^k`` stored as a bitset over
the ``2^k`` points (bit ``v`` set iff point ``v`` is in ``T``).  It is
*realizable* if some linear ``L`` has ``{v : Lv in H^m} = T`` exactly.

Column-pattern decision
-----------------------
Every row of a realizing ``L`` is a linear functional that is ``0`` or ``1``
on each point of ``T``.  Fix a maximal independent set ``B`` in ``T``; on
``span(B)`` a row is determined by its 0/1 values on ``B`` (its *column
pattern*), and off ``span(B)`` it is free.  Let ``A(T)`` be the set of
column patterns that keep all of ``T`` inside ``{0,1}``.  Then ``T`` is
realizable iff every cube point of ``span(B)`` outside ``T`` is pushed out
of ``{0,1}`` by some pattern in ``A(T)``: any realizing map's rows lie in
``A(T)``, and taking all of ``A(T)`` only adds exclusion power.  Points off
``span(B)`` are pushed out by one extra row that vanishes on ``B`` and is
large and generic on a complement basis.  Affine subspaces reduce to this
linear case by reflecting coordinates (see :func:`cubeslice.intersect.linearize`).

Ternary-row closure
-------------------
If a map keeps more than ``2^(k-1)`` points, each of its rows keeps at
least as many, so for every ``i`` some pair ``v, v + e_i`` survives that
row and the row takes a value in ``{-1, 0, 1}`` on ``e_i``.  Large traces
are therefore exactly the large intersections of traces of
``{-1,0,1}``-rows, a finite closure that settles every size above
``2^(k-1)`` for ``k <= 7``.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .constructions import (
    ConstructionSpec,
    MapClass,
    direct_sum,
    embed,
    gallery,
    has_positivity_property,
    plus_one,
)
from .errors import CapacityError, InvalidPattern
from .intersect import count_intersection, point_str, trace
from .linalg import RatMatrix, inverse, is_contraction

MAX_TABLE_K = 5
MAX_PATTERN_K = 6
MAX_ORBIT_K = 4
MAX_TERNARY_K = 7


# -- patterns ---------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Pattern:
    k: int
    bits: int

    def __post_init__(self) -> None:
        if self.k < 1:
            raise InvalidPattern("k must be >= 1")
        if not 0 <= self.bits < 1 << (1 << self.k):
            raise InvalidPattern(f"bitset does not fit {1 << self.k} points")

    @classmethod
    def from_points(cls, k: int, points: Iterable[int]) -> Pattern:
        bits = 0
        for v in points:
            bits |= 1 << v
        return cls(k, bits)

    @classmethod
    def full(cls, k: int) -> Pattern:
        return cls(k, (1 << (1 << k)) - 1)

    @classmethod
    def from_hex(cls, k: int, text: str) -> Pattern:
        try:
            bits = int(text.strip().lower().removeprefix("0x"), 16)
        except ValueError:
            raise InvalidPattern(f"not a hex bitmask: {text!r}") from None
        return cls(k, bits)

    def hex(self) -> str:
        width = max(1, (1 << self.k) // 4)
        return format(self.bits, f"0{width}x")

    @property
    def size(self) -> int:
        return self.bits.bit_count()

    def points(self) -> list[int]:
        return [v for v in range(1 << self.k) if self.bits >> v & 1]

    def __contains__(self, v: int) -> bool:
        return bool(self.bits >> v & 1)

    def __str__(self) -> str:
        return "{" + ", ".join(point_str(v, self.k) for v in self.points()) + "}"


def _popcount(x: int) -> int:
    return x.bit_count()


# -- symmetry -----------------------------------------------------------------


@lru_cache(maxsize=None)
def _point_perms(k: int) -> tuple[tuple[int, ...], ...]:
    """For each coordinate permutation, the induced permutation of cube points."""
    out = []
    for perm in itertools.permutations(range(k)):
        images = []
        for v in range(1 << k):
            w = 0
            for i in range(k):
                if v >> i & 1:
                    w |= 1 << perm[i]
            images.append(w)
        out.append(tuple(images))
    return tuple(out)


@lru_cache(maxsize=None)
def _chunk_tables(k: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """Per permutation and per 8-point chunk, the permuted image of every chunk value."""
    npts = 1 << k
    width = min(8, npts)
    tables = []
    for images in _point_perms(k):
        per_chunk = []
        for start in range(0, npts, width):
            tab = []
            for val in range(1 << width):
                out = 0
                for b in range(width):
                    if val >> b & 1:
                        out |= 1 << images[start + b]
                tab.append(out)
            per_chunk.append(tuple(tab))
        tables.append(tuple(per_chunk))
    return tuple(tables)


def _orbit(k: int, bits: int) -> set[int]:
    if k <= 5:
        width = min(8, 1 << k)
        mask = (1 << width) - 1
        out = set()
        for per_chunk in _chunk_tables(k):
            img = 0
            for c, tab in enumerate(per_chunk):
                img |= tab[(bits >> (c * width)) & mask]
            out.add(img)
        return out
    pts = [v for v in range(1 << k) if bits >> v & 1]
    return {sum(1 << images[v] for v in pts) for images in _point_perms(k)}


def canonical_pattern(T: Pattern) -> Pattern:
    """Smallest bitset in the orbit of ``T`` under permutations of the ``k`` coordinates."""
    if T.k > MAX_PATTERN_K:
        raise CapacityError(f"k = {T.k} exceeds the pattern cap {MAX_PATTERN_K}")
    return Pattern(T.k, min(_orbit(T.k, T.bits)))


# -- column-pattern decision ----------------------------------------------------


class Status(str, Enum):
    REALIZABLE = "Realizable"
    NOT_REALIZABLE = "NotRealizable"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class RealizabilityResult:
    pattern: Pattern
    status: Status
    witness: RatMatrix | None = None
    certificate: dict = field(default_factory=dict)

    @property
    def m(self) -> int | None:
        return self.witness.m if self.witness is not None else None

    def to_json(self) -> dict:
        out = {"k": self.pattern.k, "pattern": self.pattern.hex(), "size": self.pattern.size, "status": self.status.value}
        if self.witness is not None:
            out["m"] = self.witness.m
            out["witness"] = self.witness.to_text()
        if self.certificate:
            out["certificate"] = self.certificate
        return out


@lru_cache(maxsize=None)
def _cube_matrix(k: int) -> np.ndarray:
    return np.array([[(v >> i) & 1 for i in range(k)] for v in range(1 << k)], dtype=np.int64)


@lru_cache(maxsize=None)
def _bool_columns(r: int) -> np.ndarray:
    return _cube_matrix(r) if r else np.zeros((1, 0), dtype=np.int64)


def _unit_vec(k: int, v: int) -> list[Fraction]:
    return [Fraction(v >> i & 1) for i in range(k)]


def _independent_subset(k: int, candidates: Sequence[int]) -> list[int]:
    """Greedy maximal independent subset, scanning ``candidates`` in order."""
    echelon: list[list[Fraction]] = []  # rows with distinct leading columns
    leads: list[int] = []
    chosen = []
    for v in candidates:
        row = _unit_vec(k, v)
        for e, lead in zip(echelon, leads):
            if row[lead] != 0:
                f = row[lead] / e[lead]
                row = [a - f * b for a, b in zip(row, e)]
        lead = next((i for i, a in enumerate(row) if a != 0), None)
        if lead is None:
            continue
        echelon.append(row)
        leads.append(lead)
        chosen.append(v)
        if len(chosen) == k:
            break
    return chosen


@dataclass
class _Decision:
    ok: bool
    basis: list[int]
    complement: list[int]
    inv: RatMatrix
    admissible: list[tuple[int, ...]]
    stuck: int | None


def _decide(T: Pattern, basis: Sequence[int] | None = None) -> _Decision:
    k = T.k
    pts = T.points()
    nonzero = [v for v in pts if v]
    if basis is None:
        basis = _independent_subset(k, nonzero)
    else:
        basis = list(basis)
        if any(v not in T or v == 0 for v in basis):
            raise InvalidPattern("basis must consist of nonzero points of T")
        if len(_independent_subset(k, basis)) != len(basis):
            raise InvalidPattern("basis points are linearly dependent")
        if len(_independent_subset(k, nonzero)) != len(basis):
            raise InvalidPattern("basis does not span T")
    r = len(basis)
    units = [1 << i for i in range(k)]
    full = _independent_subset(k, basis + units)
    complement = full[r:]
    inv = inverse(RatMatrix.from_columns([_unit_vec(k, v) for v in full]))
    d = inv.denominator()
    inv_int = np.array([[int(a * d) for a in row] for row in inv.rows], dtype=np.int64)
    coords = _cube_matrix(k) @ inv_int.T  # (2^k, k): coordinates * d
    in_span = ~np.any(coords[:, r:] != 0, axis=1)
    cols = _bool_columns(r)
    vals = coords[:, :r] @ cols.T  # (2^k, 2^r)
    good = (vals == 0) | (vals == d)
    member = np.array([T.bits >> v & 1 for v in range(1 << k)], dtype=bool)
    admissible = good[member].all(axis=0)
    forced = np.nonzero(in_span & ~member)[0]
    excluded = (~good[forced][:, admissible]).any(axis=1)
    stuck = None if excluded.all() else int(forced[np.argmin(excluded)])
    return _Decision(
        ok=stuck is None,
        basis=basis,
        complement=complement,
        inv=inv,
        admissible=[tuple(int(x) for x in c) for c in cols[admissible]],
        stuck=stuck,
    )


def _reconstruct(T: Pattern, dec: _Decision, max_attempts: int = 64) -> RatMatrix:
    """Rows: one functional per admissible pattern, plus a big-M row off ``span(B)``.

    The big-M row uses the factors ``N^1, N^2, ...`` on the complement
    basis; ``N`` grows on every retry, which changes both the scale and the
    ratios, until the recounted trace equals ``T``.
    """
    k = T.k
    r = len(dec.basis)
    inv_rows = dec.inv.rows
    rows = []
    for c in dec.admissible:
        rows.append(tuple(sum((inv_rows[b][i] for b in range(r) if c[b]), Fraction(0)) for i in range(k)))
    for attempt in range(max_attempts):
        extra = []
        if dec.complement:
            base = 2 ** (attempt + 1) + 1
            extra.append(
                tuple(
                    sum((base ** (j + 1) * inv_rows[r + j][i] for j in range(len(dec.complement))), Fraction(0))
                    for i in range(k)
                )
            )
        L = RatMatrix(tuple(rows + extra))
        if trace(L) == T.bits:
            return L
    raise RuntimeError(f"witness reconstruction did not converge for pattern {T.hex()}")


def realizable(T: Pattern, basis: Sequence[int] | None = None, witness: bool = True) -> RealizabilityResult:
    """Exact decision whether ``T`` is the trace of some linear map.

    ``basis`` optionally fixes the maximal independent subset of ``T``
    used by the decision; the answer does not depend on it.
    """
    if T.k > MAX_PATTERN_K:
        raise CapacityError(f"k = {T.k} exceeds the single-pattern cap {MAX_PATTERN_K}")
    if 0 not in T:
        raise InvalidPattern("a linear map always keeps the origin; pattern lacks it")
    dec = _decide(T, basis)
    cert = {
        "basis": [point_str(v, T.k) for v in dec.basis],
        "admissible_columns": len(dec.admissible),
    }
    if not dec.ok:
        cert["stuck_point"] = point_str(dec.stuck, T.k)
        return RealizabilityResult(T, Status.NOT_REALIZABLE, None, cert)
    L = _reconstruct(T, dec) if witness else None
    return RealizabilityResult(T, Status.REALIZABLE, L, cert)


# -- exhaustive orbit search ----------------------------------------------------


@dataclass(frozen=True)
class OrbitRecord:
    rep: int
    size: int
    orbit_size: int
    realizable: bool
    stuck: int | None


@dataclass
class SearchResult:
    k: int
    records: list[OrbitRecord]
    complete: bool

    def sizes(self) -> set[int]:
        return {r.size for r in self.records if r.realizable}

    def decided_sizes(self) -> set[int]:
        """Sizes whose status is settled by this search."""
        if self.complete:
            return set(range(1, (1 << self.k) + 1))
        return self.sizes()

    def realizable_by_size(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for r in self.records:
            if r.realizable:
                out[r.size] = out.get(r.size, 0) + 1
        return dict(sorted(out.items()))

    def patterns_by_size(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for r in self.records:
            out[r.size] = out.get(r.size, 0) + 1
        return dict(sorted(out.items()))

    def first_realizable(self, size: int) -> int | None:
        return next((r.rep for r in self.records if r.realizable and r.size == size), None)


def orbit_representatives(k: int) -> list[tuple[int, int]]:
    """``(canonical bits, orbit size)`` for every pattern containing the origin, in increasing order."""
    if k > MAX_ORBIT_K:
        raise CapacityError(f"orbit enumeration is capped at k = {MAX_ORBIT_K}")
    npts = 1 << k
    seen = bytearray(1 << npts)
    reps = []
    for rest in range(1 << (npts - 1)):
        bits = (rest << 1) | 1
        if seen[bits]:
            continue
        orb = _orbit(k, bits)
        for x in orb:
            seen[x] = 1
        reps.append((min(orb), len(orb)))
    reps.sort()
    return reps


def _decide_chunk(args) -> list[tuple[bool, int | None]]:
    k, reps = args
    out = []
    for bits in reps:
        dec = _decide(Pattern(k, bits))
        out.append((dec.ok, dec.stuck))
    return out


def exhaustive_search(k: int, budget: int | None = None, workers: int = 1) -> SearchResult:
    """Decide every canonical pattern containing the origin (``k <= 4``).

    ``budget`` caps the number of canonical patterns decided; the result is
    then marked incomplete.  Output does not depend on ``workers``.
    """
    reps = orbit_representatives(k)
    complete = budget is None or budget >= len(reps)
    if not complete:
        reps = reps[:budget]
    bits_list = [b for b, _ in reps]
    nparts = max(1, min(workers, len(bits_list)))
    chunks = [bits_list[i::nparts] for i in range(nparts)]
    if nparts == 1:
        decided = [_decide_chunk((k, chunks[0]))]
    else:
        with ProcessPoolExecutor(max_workers=nparts) as ex:
            decided = list(ex.map(_decide_chunk, [(k, c) for c in chunks]))
    by_bits = {}
    for chunk, res in zip(chunks, decided):
        by_bits.update(zip(chunk, res))
    records = [
        OrbitRecord(b, _popcount(b), n, by_bits[b][0], by_bits[b][1])
        for b, n in reps
    ]
    return SearchResult(k, records, complete)


# -- ternary-row closure ------------------------------------------------------


@dataclass
class LargeTraces:
    """Every realizable trace larger than ``2^(k-1)``, with the rows that cut it out."""

    k: int
    traces: dict[int, tuple[tuple[int, ...], ...]]
    complete: bool

    def sizes(self) -> set[int]:
        return {_popcount(b) for b in self.traces}

    def witness(self, bits: int) -> RatMatrix:
        rows = self.traces[bits]
        if not rows:
            return RatMatrix.identity(self.k)
        return RatMatrix(rows)

    def first_of_size(self, size: int) -> int | None:
        cands = [b for b in self.traces if _popcount(b) == size]
        return min(cands) if cands else None


def _row_trace(k: int, row: Sequence[int]) -> int:
    vals = _cube_matrix(k) @ np.array(row, dtype=np.int64)
    ok = np.nonzero((vals == 0) | (vals == 1))[0]
    return sum(1 << int(v) for v in ok)


def large_traces(k: int, budget: int | None = None) -> LargeTraces:
    """Closure under intersection of the large traces of ``{-1,0,1}``-rows.

    ``budget`` caps the number of traces kept; hitting it marks the result
    incomplete.
    """
    if k > MAX_TERNARY_K:
        raise CapacityError(f"ternary closure is capped at k = {MAX_TERNARY_K}")
    half = 1 << (k - 1)
    gens: dict[int, tuple[int, ...]] = {}
    for row in itertools.product((0, 1, -1), repeat=k):
        if not any(row):
            continue
        tr = _row_trace(k, row)
        if _popcount(tr) > half:
            gens.setdefault(tr, row)
    full = (1 << (1 << k)) - 1
    gens.pop(full, None)
    found: dict[int, tuple[tuple[int, ...], ...]] = {full: ()}
    for tr, row in sorted(gens.items()):
        found.setdefault(tr, (row,))
    queue = sorted(found)
    complete = True
    i = 0
    gen_items = sorted(gens.items())
    while i < len(queue):
        x = queue[i]
        i += 1
        for g, row in gen_items:
            y = x & g
            if y in found or _popcount(y) <= half:
                continue
            if budget is not None and len(found) >= budget:
                complete = False
                break
            found[y] = found[x] + (row,)
            queue.append(y)
        if not complete:
            break
    return LargeTraces(k, found, complete)


# -- theorem bounds -----------------------------------------------------------


def second_largest_bound(k: int, cls: MapClass | str = MapClass.GENERAL) -> int:
    """Second largest intersection size for linear maps of the given class.

    ``3 * 2^(k-2)`` for general maps (``1`` when ``k = 1``), ``2^(k-1)``
    for contractions and isometries.
    """
    cls = MapClass(cls)
    if k < 1:
        raise ValueError("k must be >= 1")
    if cls is MapClass.GENERAL:
        return 1 if k == 1 else 3 << (k - 2)
    return 1 << (k - 1)


def in_gap(t: int, k: int, cls: MapClass | str) -> bool:
    """True iff ``t`` lies strictly between the second largest bound and ``2^k``."""
    return second_largest_bound(k, cls) < t < 1 << k


# -- random map suites ----------------------------------------------------------

DEFAULT_ENTRIES = tuple(Fraction(x) for x in ("-2", "-1", "-1/2", "0", "1/2", "1", "2"))


def _near_boolean(rng: np.random.Generator, m: int, k: int) -> list[list[Fraction]]:
    p = min(1.0, 1.5 / m)
    vals = (Fraction(1), Fraction(-1), Fraction(1, 2), Fraction(-1, 2), Fraction(2))
    probs = (0.7, 0.15, 0.06, 0.04, 0.05)
    rows = []
    for _ in range(m):
        nz = rng.random(k) < p
        picks = rng.choice(len(vals), size=k, p=probs)
        rows.append([vals[c] if z else Fraction(0) for z, c in zip(nz, picks)])
    return rows


def random_map(
    rng: np.random.Generator, k: int, distribution: str = "default", m: int | None = None
) -> RatMatrix:
    """A random rational ``m x k`` map.

    ``default``: entries uniform over ``{-2,-1,-1/2,0,1/2,1,2}``.
    ``near-boolean``: sparse, mostly ``+1`` entries, which reach high counts.
    ``mixed``: either of the two with equal probability.
    """
    if m is None:
        m = int(rng.integers(1, k + 2))
    if distribution == "mixed":
        distribution = "default" if rng.random() < 0.5 else "near-boolean"
    if distribution == "default":
        idx = rng.integers(0, len(DEFAULT_ENTRIES), size=(m, k))
        return RatMatrix(tuple(tuple(DEFAULT_ENTRIES[i] for i in row) for row in idx))
    if distribution == "near-boolean":
        return RatMatrix(tuple(tuple(r) for r in _near_boolean(rng, m, k)))
    raise ValueError(f"unknown entry distribution {distribution!r}")


def _isqrt_ceil(x: Fraction) -> int:
    s = 0
    while s * s < x:
        s = max(s + 1, s * 2) if s * s * 4 < x else s + 1
    return s


def random_contraction(rng: np.random.Generator, k: int, distribution: str = "mixed") -> RatMatrix:
    """A random map certified exactly as a contraction.

    Draws a map; if it is not a contraction it is divided by an integer
    ``s`` with ``s^2`` at least its squared Frobenius norm.
    """
    L = random_map(rng, k, distribution, m=int(rng.integers(k, 2 * k + 1)))
    if is_contraction(L):
        return L
    fro2 = sum(a * a for r in L.rows for a in r)
    s = _isqrt_ceil(fro2)
    return L.scale(Fraction(1, s))


@dataclass
class GapReport:
    k: int
    cls: MapClass
    samples: int
    seed: int
    bound: int
    violations: list[tuple[RatMatrix, int]]
    histogram: dict[int, int]

    @property
    def ok(self) -> bool:
        return not self.violations


def check_gap_property(
    k: int,
    cls: MapClass | str = MapClass.GENERAL,
    samples: int = 1000,
    seed: int = 0,
    entry_distribution: str = "mixed",
    include: Sequence[RatMatrix] = (),
) -> GapReport:
    """Count random maps of the class and report every count inside the gap.

    Deterministic for a fixed ``seed``.  Maps in ``include`` are checked
    first, in addition to the random ones.
    """
    cls = MapClass(cls)
    rng = np.random.default_rng(seed)
    bound = second_largest_bound(k, cls)
    full = 1 << k
    hist: dict[int, int] = {}
    violations = []
    maps: Iterable[RatMatrix] = list(include)
    for L in itertools.chain(maps, (None for _ in range(samples))):
        if L is None:
            L = random_map(rng, k, entry_distribution) if cls is MapClass.GENERAL else random_contraction(rng, k, entry_distribution)
        if cls is not MapClass.GENERAL and not cls.admits(L):
            raise ValueError(f"included map is not of class {cls.value}: {L}")
        t = count_intersection(L, certify=False).count
        hist[t] = hist.get(t, 0) + 1
        if not (t == full or t <= bound):
            violations.append((L, t))
    return GapReport(k, cls, samples, seed, bound, violations, dict(sorted(hist.items())))


# -- achievability tables -------------------------------------------------------


@dataclass
class Witness:
    matrix: RatMatrix
    provenance: str
    positive: bool = False


def _class_gallery(k: int, cls: MapClass) -> list[ConstructionSpec]:
    out = []
    for spec in gallery(k):
        _, claim = spec.build()
        if claim.k != k:
            continue
        if cls is MapClass.GENERAL or spec.cls is MapClass.ISOMETRY or spec.cls is cls:
            out.append(spec)
    return out


def construction_pool(k_max: int, cls: MapClass | str = MapClass.GENERAL) -> dict[int, dict[int, list[Witness]]]:
    """Counts reachable from the gallery by direct sums (and, for general maps, embed / plus-one).

    Per ``(k, t)`` at most two witnesses are kept: the first one found and
    the first one with the positivity property.
    """
    cls = MapClass(cls)
    pool: dict[int, dict[int, list[Witness]]] = {}

    def offer(k: int, t: int, L: RatMatrix, prov: str) -> None:
        slot = pool[k].setdefault(t, [])
        if not slot:
            slot.append(Witness(L, prov, cls is MapClass.GENERAL and has_positivity_property(L)))
            return
        if cls is MapClass.GENERAL and not any(w.positive for w in slot) and len(slot) < 2:
            if has_positivity_property(L):
                slot.append(Witness(L, prov, True))

    for k in range(1, k_max + 1):
        pool[k] = {}
        for spec in _class_gallery(k, cls):
            amap, claim = spec.build()
            offer(k, claim.t, amap.L, str(spec))
        for k1 in range(1, k // 2 + 1):
            k2 = k - k1
            for t1, w1s in sorted(pool[k1].items()):
                for t2, w2s in sorted(pool[k2].items()):
                    a, b = w1s[0], w2s[0]
                    offer(k, t1 * t2, direct_sum(a.matrix, b.matrix), f"direct_sum({a.provenance}, {b.provenance})")
        if cls is MapClass.GENERAL and k > 1:
            for t, ws in sorted(pool[k - 1].items()):
                offer(k, t, embed(ws[0].matrix, 1, 0), f"embed({ws[0].provenance})")
                for w in ws:
                    if w.positive:
                        offer(k, t + 1, plus_one(w.matrix), f"plus_one({w.provenance})")
    return pool


class EntryStatus(str, Enum):
    REALIZABLE = "Realizable"
    EXCLUDED = "Excluded"
    UNKNOWN = "Unknown"


@dataclass
class TableEntry:
    t: int
    status: EntryStatus
    source: str
    witness: RatMatrix | None = None
    detail: str = ""

    def to_json(self) -> dict:
        out = {"t": self.t, "status": self.status.value, "source": self.source}
        if self.detail:
            out["detail"] = self.detail
        if self.witness is not None:
            out["witness"] = self.witness.to_text()
        return out


@dataclass
class AchievabilityTable:
    k: int
    cls: MapClass
    entries: list[TableEntry]

    def _with(self, status: EntryStatus) -> set[int]:
        return {e.t for e in self.entries if e.status is status}

    @property
    def realizable(self) -> set[int]:
        return self._with(EntryStatus.REALIZABLE)

    @property
    def excluded(self) -> set[int]:
        return self._with(EntryStatus.EXCLUDED)

    @property
    def unknown(self) -> set[int]:
        return self._with(EntryStatus.UNKNOWN)

    def entry(self, t: int) -> TableEntry:
        return self.entries[t - 1]

    def check_invariants(self) -> None:
        full = 1 << self.k
        assert [e.t for e in self.entries] == list(range(1, full + 1))
        assert self.entry(full).status is EntryStatus.REALIZABLE
        for t in range(1, full):
            if in_gap(t, self.k, self.cls):
                assert self.entry(t).status is EntryStatus.EXCLUDED, t
        for e in self.entries:
            if e.status is EntryStatus.REALIZABLE:
                assert e.witness is not None and e.witness.k == self.k
                assert count_intersection(e.witness, certify=False).count == e.t
                assert self.cls.admits(e.witness)

    def absorb(self, t: int, L: RatMatrix, source: str) -> bool:
        """Upgrade an Unknown entry to Realizable using an externally found witness."""
        e = self.entry(t)
        if e.status is not EntryStatus.UNKNOWN or L.k != self.k or not _verified(L, t, self.cls):
            return False
        self.entries[t - 1] = TableEntry(t, EntryStatus.REALIZABLE, source, L, detail="from witness store")
        return True

    def to_json(self) -> dict:
        return {
            "version": 1,
            "k": self.k,
            "class": self.cls.value,
            "entries": [e.to_json() for e in self.entries],
        }


def _verified(L: RatMatrix, t: int, cls: MapClass) -> bool:
    return L.k > 0 and count_intersection(L, certify=False).count == t and cls.admits(L)


def achievable_table(
    k: int,
    cls: MapClass | str = MapClass.GENERAL,
    search_budget: int | None = None,
    workers: int = 1,
) -> AchievabilityTable:
    """Classify every ``t`` in ``[1, 2^k]`` as Realizable, Excluded or Unknown.

    Realizable entries come from the construction pool or, for general
    maps, from search, and every witness is recounted.  Exclusions come
    from the gap bound for the class, or for general maps from a completed
    search: the exhaustive orbit search for ``k <= 4`` and the ternary-row
    closure for sizes above ``2^(k-1)``.  Nothing is excluded from sampling.
    """
    cls = MapClass(cls)
    if k < 1:
        raise ValueError("k must be >= 1")
    if cls is MapClass.GENERAL and k > MAX_TABLE_K:
        raise CapacityError(f"general tables are capped at k = {MAX_TABLE_K}")
    full = 1 << k
    half = 1 << (k - 1)
    entries: dict[int, TableEntry] = {}

    pool = construction_pool(k, cls)[k]
    for t, ws in sorted(pool.items()):
        w = ws[0]
        if not _verified(w.matrix, t, cls):
            raise RuntimeError(f"construction witness for t = {t} failed re-verification: {w.provenance}")
        entries[t] = TableEntry(t, EntryStatus.REALIZABLE, w.provenance, w.matrix)

    bound = second_largest_bound(k, cls)
    for t in range(bound + 1, full):
        if t in entries:
            raise RuntimeError(f"t = {t} is both constructed and inside the gap")
        entries[t] = TableEntry(t, EntryStatus.EXCLUDED, "gap-theorem", detail=f"{bound} < t < {full}")

    if cls is MapClass.GENERAL:
        if k <= MAX_ORBIT_K:
            res = exhaustive_search(k, search_budget, workers)
            by_size = res.patterns_by_size()
            real = res.realizable_by_size()
            for t in range(1, full + 1):
                if t in entries:
                    continue
                rep = res.first_realizable(t)
                if rep is not None:
                    r = realizable(Pattern(k, rep))
                    entries[t] = TableEntry(
                        t, EntryStatus.REALIZABLE, "search", r.witness, detail=f"pattern {Pattern(k, rep).hex()}"
                    )
                elif res.complete:
                    entries[t] = TableEntry(
                        t,
                        EntryStatus.EXCLUDED,
                        "exhaustive-search",
                        detail=f"all {by_size.get(t, 0)} canonical patterns of size {t} are not realizable",
                    )
            for t, n in real.items():
                if entries[t].status is EntryStatus.REALIZABLE and not entries[t].detail:
                    entries[t].detail = f"{n} realizable canonical patterns"
        else:
            lt = large_traces(k, search_budget)
            for t in range(half + 1, full + 1):
                if t in entries:
                    continue
                bits = lt.first_of_size(t)
                if bits is not None:
                    L = lt.witness(bits)
                    entries[t] = TableEntry(t, EntryStatus.REALIZABLE, "search", L, detail=f"pattern {Pattern(k, bits).hex()}")
                elif lt.complete:
                    entries[t] = TableEntry(
                        t,
                        EntryStatus.EXCLUDED,
                        "exhaustive-search",
                        detail=f"no intersection of ternary-row traces has size {t} ({len(lt.traces)} large traces)",
                    )

    out = []
    for t in range(1, full + 1):
        e = entries.get(t) or TableEntry(t, EntryStatus.UNKNOWN, "undecided")
        if e.status is EntryStatus.REALIZABLE and not _verified(e.witness, t, cls):
            raise RuntimeError(f"witness for t = {t} failed re-verification")
        out.append(e)
    return AchievabilityTable(k, cls, out)


# -- conjecture scanners --------------------------------------------------------


def large_conjecture_set(k: int) -> set[int]:
    half = 1 << (k - 1)
    return {half + (1 << i) for i in range(k)}


def amended_large_set(k: int) -> set[int]:
    """The large-element set with the extra value ``35 * 2^(k-6)`` for ``k >= 6``."""
    s = large_conjecture_set(k)
    if k >= 6:
        s.add(35 << (k - 6))
    return s


def scan_conjecture_large(k: int, budget: int | None = None) -> dict:
    """All realizable sizes above ``2^(k-1)``, compared with the conjectured sets."""
    lt = large_traces(k, budget)
    found = sorted(lt.sizes())
    conj = sorted(large_conjecture_set(k))
    amended = sorted(amended_large_set(k))
    witnesses = {}
    for t in found:
        bits = lt.first_of_size(t)
        L = lt.witness(bits)
        if count_intersection(L, certify=False).count != t:
            raise RuntimeError(f"ternary witness for t = {t} failed recount")
        witnesses[t] = L
    return {
        "k": k,
        "complete": lt.complete,
        "large_traces": len(lt.traces),
        "found": found,
        "conjecture": conj,
        "agrees_with_conjecture": found == conj if lt.complete else set(found) <= set(conj),
        "amended": amended,
        "agrees_with_amended": found == amended if lt.complete else set(found) <= set(amended),
        "unexpected": sorted(set(found) - set(conj)),
        "witnesses": {t: L.to_text() for t, L in witnesses.items()},
    }


def scan_conjecture_small(k: int, search_budget: int | None = None) -> dict:
    """Which ``t`` in ``[1, 2^(k-1)+2]`` (clipped to ``2^k``) are realizable."""
    if k > MAX_TABLE_K:
        raise CapacityError(f"small-element scan is capped at k = {MAX_TABLE_K}")
    top = (1 << (k - 1)) + 2
    clipped = top > 1 << k
    hi = min(top, 1 << k)
    table = achievable_table(k, MapClass.GENERAL, search_budget)
    missing = [t for t in range(1, hi + 1) if table.entry(t).status is not EntryStatus.REALIZABLE]
    note = f"interval end {top} exceeds 2^k = {1 << k}; clipped to [1, {hi}]" if clipped else ""
    return {
        "k": k,
        "interval": [1, hi],
        "clipped": clipped,
        "note": note,
        "realizable": [t for t in range(1, hi + 1) if t not in missing],
        "missing": missing,
        "excluded": [t for t in missing if table.entry(t).status is EntryStatus.EXCLUDED],
    }
