"""Counting 0/1 knapsack solutions ``|{v in {0,1}^l : sum p_i v_i = q}|``.

The fast path splits the weights in two halves, enumerates all subset
sums of each half, sorts both lists and joins them with a two-pointer
merge.  Weights are scaled to integers first (exact for rationals).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .errors import CapacityError
from .linalg import RationalLike, as_rational, common_denominator, vector

MAX_WEIGHTS = 40
NAIVE_MAX = 24


@dataclass(frozen=True)
class KnapsackInstance:
    weights: tuple[Fraction, ...]
    target: Fraction

    def __init__(self, weights: Sequence[RationalLike], target: RationalLike):
        object.__setattr__(self, "weights", vector(weights))
        object.__setattr__(self, "target", as_rational(target))

    @property
    def warnings(self) -> list[str]:
        """Inputs outside the nonnegative setting in which the membership claim is made."""
        out = []
        if any(p < 0 for p in self.weights):
            out.append("negative weight: the count is exact, but the H(n,k) membership claim assumes p_i >= 0")
        if self.target < 0:
            out.append("negative target: the H(n,k) membership claim assumes q >= 0")
        return out


def _subset_sums(ws: Sequence[int]) -> list[int]:
    sums = [0]
    for w in ws:
        sums = sums + [s + w for s in sums]
    return sums


def _scaled(inst: KnapsackInstance) -> tuple[list[int], int]:
    d = common_denominator((*inst.weights, inst.target))
    return [int(p * d) for p in inst.weights], int(inst.target * d)


def count_knapsack(inst: KnapsackInstance) -> int:
    """Meet-in-the-middle solution count, exact for rational weights."""
    n = len(inst.weights)
    if n > MAX_WEIGHTS:
        raise CapacityError(f"{n} weights exceed the meet-in-the-middle cap of {MAX_WEIGHTS}")
    ws, q = _scaled(inst)
    left = sorted(_subset_sums(ws[: n // 2]))
    right = sorted(_subset_sums(ws[n // 2 :]), reverse=True)
    i = j = 0
    total = 0
    while i < len(left) and j < len(right):
        s = left[i] + right[j]
        if s < q:
            i += 1
        elif s > q:
            j += 1
        else:
            a = left[i]
            run_l = 0
            while i < len(left) and left[i] == a:
                i += 1
                run_l += 1
            b = right[j]
            run_r = 0
            while j < len(right) and right[j] == b:
                j += 1
                run_r += 1
            total += run_l * run_r
    return total


def count_knapsack_naive(inst: KnapsackInstance) -> int:
    """Direct enumeration: all ``2**l`` subset sums are materialized and compared with ``q``."""
    n = len(inst.weights)
    if n > NAIVE_MAX:
        raise CapacityError(f"{n} weights is too many for naive enumeration")
    ws, q = _scaled(inst)
    if sum(abs(w) for w in ws) + abs(q) >= 1 << 62:
        return sum(
            1
            for v in product((0, 1), repeat=n)
            if sum((p for p, x in zip(inst.weights, v) if x), Fraction(0)) == inst.target
        )
    sums = np.zeros(1, dtype=np.int64)
    for w in ws:
        sums = np.concatenate((sums, sums + w))
    return int(np.count_nonzero(sums == q))
