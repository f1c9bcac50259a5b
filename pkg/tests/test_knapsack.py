from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cubeslice.constructions import KnapsackHyperplane
from cubeslice.errors import CapacityError
from cubeslice.intersect import count
from cubeslice.knapsack import KnapsackInstance, count_knapsack, count_knapsack_naive


@pytest.mark.parametrize(
    "weights, target, expected",
    [((1, 1, 1, 1), 2, 6), ((1, 2, 3), 3, 2), ((), 0, 1), ((), 1, 0), ((0, 0), 0, 4)],
)
def test_examples(weights, target, expected):
    inst = KnapsackInstance(weights, target)
    assert count_knapsack(inst) == expected
    assert count_knapsack_naive(inst) == expected


def test_rational_weights():
    inst = KnapsackInstance(("1/2", "1/3", "1/6", 1), 1)
    assert count_knapsack(inst) == count_knapsack_naive(inst) == 2


def test_warnings():
    assert KnapsackInstance((1, 2), 1).warnings == []
    assert len(KnapsackInstance((1, -2), -1).warnings) == 2


def test_capacity():
    with pytest.raises(CapacityError):
        count_knapsack(KnapsackInstance([1] * 41, 3))
    with pytest.raises(CapacityError):
        count_knapsack_naive(KnapsackInstance([1] * 25, 3))


def test_forty_weights():
    assert count_knapsack(KnapsackInstance([1] * 40, 20)) == 137846528820


weights = st.lists(st.builds(Fraction, st.integers(-4, 6), st.sampled_from([1, 1, 2, 3])), max_size=12)


@given(weights, st.builds(Fraction, st.integers(-4, 12), st.sampled_from([1, 2])))
def test_mitm_matches_naive(ws, q):
    inst = KnapsackInstance(ws, q)
    assert count_knapsack(inst) == count_knapsack_naive(inst)


@given(weights.filter(len), st.integers(0, 8), st.randoms(use_true_random=False))
def test_permutation_invariance_and_hyperplane(ws, q, rnd):
    inst = KnapsackInstance(ws, q)
    shuffled = list(ws)
    rnd.shuffle(shuffled)
    assert count_knapsack(KnapsackInstance(shuffled, q)) == count_knapsack(inst)
    spec = KnapsackHyperplane(tuple(ws), q)
    assert count(spec.affine_map()) == count_knapsack(inst)


def test_hyperplane_half_weight():
    # 2p alone would send v = 1 to 1 here, a false hit
    amap, claim = KnapsackHyperplane((Fraction(1, 2),), 0).build()
    assert amap.L.rows[0] == (2,) and amap.c == (0,)
    assert count(amap) == claim.t == 1


def test_random_integer_instances():
    rng = np.random.default_rng(2)
    for _ in range(20):
        n = int(rng.integers(0, 16))
        ws = [int(x) for x in rng.integers(0, 6, size=n)]
        q = int(rng.integers(0, 3 * n + 1))
        inst = KnapsackInstance(ws, q)
        assert count_knapsack(inst) == count_knapsack_naive(inst)
