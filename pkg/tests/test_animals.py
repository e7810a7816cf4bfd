from collections import Counter
from fractions import Fraction as F
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from lampkernel.animals import (
    AnimalCapExceeded,
    AnimalTree,
    EmptyAnimal,
    animal_probability,
    animals_of_size,
    boundary_by_neighbors,
    boundary_size,
    enumerate_animals,
    probability_partial_sum,
    root_only,
)
from lampkernel.genfun import animal_count_series


def bethe_count(k: int, n: int) -> int:
    # rooted subtrees of the d-regular tree, d = k+1 (closed form from the
    # Lagrange inversion of the branch series)
    d = k + 1
    num = d * comb((d - 1) * n, n - 1)
    den = (d - 2) * n + 2
    assert num % den == 0
    return num // den


def test_root_alone():
    animals = list(enumerate_animals(3, 1))
    assert len(animals) == 1 and animals[0] == root_only(3)


def test_size_two_choices():
    sizes = Counter(t.size for t in enumerate_animals(3, 2))
    assert sizes == {1: 1, 2: 4}


def test_size_three_count():
    assert len(animals_of_size(3, 3)) == 18


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_counts_match_closed_form(k):
    for n in range(1, 8):
        assert len(animals_of_size(k, n)) == bethe_count(k, n)


@pytest.mark.parametrize("k", [1, 3])
def test_counts_match_series(k):
    counts = animal_count_series(k, 10, "exact")
    for n in range(1, 11):
        assert counts[n] == bethe_count(k, n)
    for n in range(1, 7):
        assert counts[n] == len(animals_of_size(k, n))


def test_enumeration_order_and_uniqueness():
    animals = list(enumerate_animals(3, 5))
    keys = [(t.size, t.encoding) for t in animals]
    assert keys == sorted(keys)
    assert len(set(keys)) == len(keys)


def test_cap_names_size():
    with pytest.raises(AnimalCapExceeded) as info:
        list(enumerate_animals(3, 6, cap=100))
    assert info.value.size == 4  # 1 + 4 + 18 = 23 fits, + 88 does not


def test_encoding_roundtrip():
    for t in enumerate_animals(2, 5):
        assert AnimalTree.from_encoding(2, t.encoding) == t
        assert set(t.encoding) <= set("01()")


def test_bad_root_arity():
    with pytest.raises(ValueError):
        AnimalTree(3, (None,) * 3)


def test_boundary_examples():
    assert boundary_size(root_only(3)) == 4
    assert boundary_size(EmptyAnimal()) == 1
    for t in animals_of_size(3, 5):
        assert boundary_size(t) == 12 == boundary_by_neighbors(t)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_boundary_formula_vs_neighbors(k):
    for t in enumerate_animals(k, 8 if k < 3 else 7):
        assert boundary_size(t) == boundary_by_neighbors(t)


def test_boundary_formula_vs_neighbors_size8():
    for t in animals_of_size(3, 8)[::7]:
        assert boundary_size(t) == boundary_by_neighbors(t)


def test_probability_examples():
    p = F(1, 4)
    assert animal_probability(EmptyAnimal(), p) == F(3, 4)
    assert animal_probability(root_only(3), p) == F(81, 1024)
    for t in animals_of_size(3, 2):
        assert animal_probability(t, p) == p**2 * F(3, 4) ** 6


def test_partial_sums_increase_and_stay_below_one():
    p = F(1, 4)
    sums = [probability_partial_sum(3, p, n) for n in range(1, 8)]
    assert all(b > a for a, b in zip(sums, sums[1:]))
    assert sums[-1] < 1
    # sizes 8..10 from the counts (cross-checked against enumeration above)
    s10 = sums[-1] + sum(bethe_count(3, n) * p**n * (1 - p) ** (2 + 2 * n) for n in range(8, 11))
    assert sums[-1] < s10 < 1
    # frozen after computing the exact value 0.9705...
    assert s10 > F(97, 100)


def test_partial_sum_matches_per_animal_sum():
    p = F(1, 5)
    direct = (1 - p) + sum(animal_probability(t, p) for t in enumerate_animals(3, 5))
    assert probability_partial_sum(3, p, 5) == direct


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(2, 9))
def test_k1_probabilities_sum_to_one(extra, m):
    # on the line every size-n animal is an interval: n of them, boundary 2
    p = F(1, m)
    n_max = 4 + extra
    total = probability_partial_sum(1, p, n_max)
    tail = sum(n * p**n * (1 - p) ** 2 for n in range(n_max + 1, 400))
    assert total < 1
    assert abs(total + tail - 1) < F(1, 10**30)
