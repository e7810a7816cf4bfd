from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from lampkernel.animals import animals_of_size
from lampkernel.closedform import c_of_p
from lampkernel.genfun import (
    animal_count_series,
    coefficient_table,
    dimension_partial_sum,
    g_coefficient_oracle,
    g_from_derivative,
    partial_sums,
    probability_mass_sum,
    solve_ab,
)
from lampkernel.matchings import tree_matching_info


def branch_oracle(k, n):
    """(#type A, #type B, sum of nu) over branches of size n.

    A branch is an animal whose root leaves its last slot empty."""
    infos = [tree_matching_info(t) for t in animals_of_size(k, n) if t.root[-1] is None]
    return (
        sum(i.node_type == "A" for i in infos),
        sum(i.node_type == "B" for i in infos),
        sum(i.nu for i in infos),
    )


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_residuals_vanish(k):
    ab = solve_ab(k, 40, "exact")
    for r in ab.residuals():
        assert all(c == 0 for c in r.coeffs)


@pytest.mark.parametrize("k", [2, 3])
def test_branch_series_against_enumeration(k):
    ab = solve_ab(k, 7, "exact")
    assert ab.b1[0] == 1 and ab.a1[0] == 0
    for n in range(1, 7):
        a, b, nu = branch_oracle(k, n)
        assert (ab.a1[n], ab.b1[n], ab.au_plus_bu[n]) == (a, b, nu)


def test_b1_prefix_k3():
    ab = solve_ab(3, 4, "exact")
    assert list(ab.b1.coeffs) == [1, 0, 3, 3, 46]


def test_g_small_examples():
    assert g_coefficient_oracle(3, 1) == 1
    assert g_coefficient_oracle(3, 2) == 0
    # k = 1: the three size-3 intervals each have nullity 1
    assert g_coefficient_oracle(1, 3) == 3


@pytest.mark.parametrize("k, n_max", [(1, 8), (3, 8), (5, 6)])
def test_g_matches_enumeration(k, n_max):
    g = solve_ab(k, n_max, "exact").g
    for n in range(1, n_max + 1):
        assert g[n] == g_coefficient_oracle(k, n)


def test_g_k1_closed_form():
    # on the line: n intervals of size n, nullity n mod 2
    g = solve_ab(1, 30, "exact").g
    assert [g[n] for n in range(1, 31)] == [n * (n % 2) for n in range(1, 31)]


@pytest.mark.parametrize("k", [1, 3, 4])
def test_g_two_routes_agree(k):
    ab = solve_ab(k, 25, "exact")
    assert g_from_derivative(ab) == ab.g


@pytest.mark.parametrize("k", [1, 3])
def test_relaxed_equals_sweeps(k):
    a = solve_ab(k, 15, "exact", method="relaxed")
    b = solve_ab(k, 15, "exact", method="sweeps")
    assert a == b


def test_float_mode_matches_exact():
    ex = solve_ab(3, 50, "exact")
    fl = solve_ab(3, 50, "float", prec=160)
    with mpmath.workprec(160):
        for n in range(51):
            assert abs(fl.g[n] - mpmath.mpf(ex.g[n].numerator) / ex.g[n].denominator) <= abs(fl.g[n]) * mpmath.mpf(2) ** -120


def test_float_mode_precision_floor():
    with pytest.raises(ValueError):
        solve_ab(3, 10, "float", prec=64)


def test_counts_are_s_times_s_minus_one():
    c = animal_count_series(3, 10, "exact")
    assert [int(c[n]) for n in range(1, 11)] == [1, 4, 18, 88, 455, 2448, 13566, 76912, 444015, 2601300]


def test_supercritical_raises():
    with pytest.raises(ValueError):
        dimension_partial_sum(3, 3, 10)
    with pytest.raises(ValueError):
        partial_sums(2, 1, 10)


def test_headline_partial_sum():
    s = dimension_partial_sum(3, 4, 400, "float")
    assert abs(s - mpmath.mpf("0.850971")) < 1e-6


def test_exact_partial_sum_matches_float():
    ex = dimension_partial_sum(3, 5, 40, "exact")
    fl = dimension_partial_sum(3, 5, 40, "float")
    assert isinstance(ex, F)
    with mpmath.workprec(256):
        assert abs(fl - mpmath.mpf(ex.numerator) / ex.denominator) < mpmath.mpf(10) ** -30


@settings(max_examples=8, deadline=None)
@given(st.sampled_from([(1, 2), (1, 5), (2, 3), (2, 6), (3, 4), (3, 7), (4, 5)]))
def test_partial_sums_monotone_and_below_closed_form(km):
    k, m = km
    sums = partial_sums(k, m, 120, "float")
    c = c_of_p(k, m, certify=False).value_float
    assert all(b >= a for a, b in zip(sums, sums[1:]))
    with mpmath.workprec(256):
        assert c - sums[-1] > -mpmath.mpf("1e-30")


def test_probability_mass_deficit():
    total = probability_mass_sum(3, F(1, 4), 400)
    deficit = 1 - total
    assert 0 <= deficit < 1e-6
    # exact and float agree at small N
    ex = probability_mass_sum(3, F(1, 4), 30, "exact")
    fl = probability_mass_sum(3, F(1, 4), 30, "float")
    with mpmath.workprec(256):
        assert abs(fl - mpmath.mpf(ex.numerator) / ex.denominator) < mpmath.mpf(10) ** -35


def test_coefficient_table_columns():
    rows = coefficient_table(3, 8, check_bruteforce=True)
    assert [r["n"] for r in rows] == list(range(1, 9))
    assert all(r["oracle_match"] for r in rows)
    assert rows[0] == {"n": 1, "g_n": 1, "count_n": 1, "oracle_match": True}


def test_oracle_size_limit():
    with pytest.raises(ValueError):
        g_coefficient_oracle(3, 11)
