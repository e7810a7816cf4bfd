from fractions import Fraction as F

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from lampkernel.freeproduct import (
    CRITICAL_POLY,
    IDENTITY,
    GeneralCluster,
    MatchingRankMismatch,
    _fp_block,
    _grow_general,
    cayley_neighbors,
    cluster_nullity,
    critical_polynomial_check,
    cycle_lengths,
    estimate_dimension_freeproduct,
    multiply,
    sample_cluster_general,
    word_str,
)
from lampkernel.matchings import max_matching_bruteforce, nullity_rank_oracle
from lampkernel.percolation import _Uniforms, block_generator

ORDERS = (6, 6)


def a(e):
    return ((0, e),)


def test_identity_neighbors():
    assert set(cayley_neighbors(IDENTITY, ORDERS)) == {a(1), a(5), ((1, 1),), ((1, 5),)}


def test_a_cubed_neighbors():
    w = a(3)
    assert set(cayley_neighbors(w, ORDERS)) == {a(4), a(2), ((0, 3), (1, 1)), ((0, 3), (1, 5))}


def test_word_str():
    assert word_str(IDENTITY) == "e"
    assert word_str(((0, 3), (1, 1))) == "a^3b"


words = st.lists(st.tuples(st.integers(0, 1), st.integers(1, 5)), max_size=8)


def normal_form(raw, orders=ORDERS):
    w = IDENTITY
    for f, e in raw:
        w = multiply(w, f, e, orders)
    return w


@given(words)
def test_adjacency_is_symmetric(raw):
    w = normal_form(raw)
    nbrs = cayley_neighbors(w, ORDERS)
    assert len(nbrs) == 4
    for v in nbrs:
        assert w in cayley_neighbors(v, ORDERS)


@given(words, st.sampled_from([(2, 3), (3, 4), (6, 6)]))
def test_normal_form_invariant(raw, orders):
    w = normal_form(raw, orders)
    for (f1, _), (f2, _) in zip(w, w[1:]):
        assert f1 != f2
    assert all(1 <= e < orders[f] for f, e in w)


def test_hexagon_through_identity():
    # a^6 = e: the six powers of a form a 6-cycle
    g = nx.Graph()
    w = IDENTITY
    for _ in range(6):
        v = multiply(w, 0, 1, ORDERS)
        g.add_edge(w, v)
        w = v
    assert w == IDENTITY
    assert sorted(len(c) for c in nx.cycle_basis(g)) == [6]


def test_critical_polynomial():
    rep = critical_polynomial_check()
    assert rep.roots_in_unit_interval == 1
    assert F(3393, 10**4) < rep.root.lo and rep.root.hi < F(3394, 10**4)
    assert rep.sign_at_one_third * rep.sign_at_034 < 0
    assert rep.ok
    assert CRITICAL_POLY.degree == 5


def test_tiny_p_empty():
    hits = sum(sample_cluster_general(ORDERS, F(1, 10**9), seed=3, index=i).size == 0 for i in range(100))
    assert hits == 100


def test_rejects_supercritical():
    with pytest.raises(ValueError):
        sample_cluster_general(ORDERS, F(1, 2), seed=0)
    with pytest.raises(ValueError):
        estimate_dimension_freeproduct(ORDERS, 2, 10, seed=0)


def test_sample_reproducible():
    a1 = sample_cluster_general(ORDERS, F(1, 3), seed=7, index=4100)
    a2 = sample_cluster_general(ORDERS, F(1, 3), seed=7, index=4100)
    assert a1 == a2


def test_small_clusters_exhaustive_oracles():
    checked = 0
    u = _Uniforms(block_generator(13, 0))
    for _ in range(400):
        c = _grow_general(u, ORDERS, 1 / 3, 10**5)
        if c.size == 0 or c.size > 14:
            continue
        g = c.graph()
        nu_rank = nullity_rank_oracle(g)
        assert nu_rank == c.size - 2 * max_matching_bruteforce(g)
        assert cluster_nullity(c) == (nu_rank, nu_rank)
        assert all(n % 4 == 2 for n in cycle_lengths(c))
        checked += 1
    assert checked > 50


def test_boundary_counts():
    c = GeneralCluster((IDENTITY,), (), 4)
    assert c.size == 1 and cluster_nullity(c) == (1, 1)
    c = sample_cluster_general(ORDERS, F(1, 4), seed=1, index=0)
    i = 0
    while c.size != 1:
        i += 1
        c = sample_cluster_general(ORDERS, F(1, 4), seed=1, index=i)
    assert c.boundary == 4


def test_mismatch_is_hard_error(monkeypatch):
    import lampkernel.freeproduct as fp

    monkeypatch.setattr(fp, "cluster_nullity", lambda c: (0, 1))
    with pytest.raises(MatchingRankMismatch):
        _fp_block((ORDERS, 1 / 3, 0, 0, 50, 10**5))


def test_estimate_and_invariants():
    est = estimate_dimension_freeproduct(ORDERS, 4, 4000, seed=3)
    d = est.diagnostics
    assert d["parity_violations"] == d["cycle_violations"] == d["matching_rank_mismatches"] == 0
    assert d["rank_checked"] == d["accepted"] - d["empty"]
    assert 0 < est.estimate < 1 and est.stderr < 0.02


def test_threads_equal():
    a1 = estimate_dimension_freeproduct(ORDERS, 4, 9000, seed=5, threads=1)
    a2 = estimate_dimension_freeproduct(ORDERS, 4, 9000, seed=5, threads=2)
    assert a1.mean_exact == a2.mean_exact and a1.diagnostics == a2.diagnostics


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6))
def test_random_clusters_cycles_are_2_mod_4(seed):
    c = sample_cluster_general(ORDERS, F(1, 3), seed=seed, index=0)
    if 0 < c.size <= 200:
        assert all(n % 4 == 2 for n in cycle_lengths(c))
        m, r = cluster_nullity(c)
        assert m == r
