import random

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lampkernel.animals import AnimalTree, enumerate_animals
from lampkernel.exactkernel import Polynomial
from lampkernel.matchings import (
    FiniteGraph,
    bareiss_rank,
    berkowitz,
    characteristic_polynomial,
    matching_polynomial,
    max_matching_bruteforce,
    maximum_matching_size,
    nullity_rank_oracle,
    rooted_tree_info,
    sparse_rank,
    tree_matching_info,
    type_bruteforce,
)

x = Polynomial.x()


def path(n):
    return FiniteGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n):
    return FiniteGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star(leaves):
    return FiniteGraph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def tree_to_animal(g: nx.Graph, k: int, root=0) -> AnimalTree:
    def build(v, parent, nslots):
        kids = [u for u in sorted(g[v]) if u != parent]
        assert len(kids) <= nslots
        return tuple(build(u, v, k) for u in kids) + (None,) * (nslots - len(kids))

    return AnimalTree(k, build(root, None, k + 1))


def small_trees(n_max, max_degree):
    for n in range(1, n_max + 1):
        if n == 1:
            g = nx.Graph()
            g.add_node(0)
            yield g
            continue
        for g in nx.nonisomorphic_trees(n):
            if max(d for _, d in g.degree) <= max_degree:
                yield g


def test_single_vertex_info():
    t = AnimalTree(3, (None,) * 4)
    info = tree_matching_info(t)
    assert (info.mu, info.nu, info.node_type) == (0, 1, "A")


def test_edge_info():
    t = AnimalTree.from_encoding(3, "(1000)")
    info = tree_matching_info(t)
    assert (info.mu, info.nu, info.node_type) == (1, 0, "B")


def test_star_info():
    t = AnimalTree.from_encoding(3, "(1110)")
    info = tree_matching_info(t)
    assert (info.mu, info.nu, info.node_type) == (1, 2, "B")
    assert max_matching_bruteforce(star(3)) == 1


def test_rank_oracle_examples():
    assert nullity_rank_oracle(FiniteGraph.from_edges(1, [])) == 1
    assert nullity_rank_oracle(cycle(4)) == 2
    # C6 has eigenvalues 2, 1, 1, -1, -1, -2: no zero eigenvalue
    assert nullity_rank_oracle(cycle(6)) == 0
    evals = np.linalg.eigvalsh(np.array(cycle(6).adjacency(), dtype=float))
    assert np.min(np.abs(evals)) > 0.5


def test_matching_polynomial_examples():
    assert matching_polynomial(path(2)) == x**2 - 1
    assert matching_polynomial(path(3)) == x**3 - 2 * x
    assert matching_polynomial(cycle(3)) == x**3 - 3 * x


def test_characteristic_polynomial_examples():
    assert characteristic_polynomial(path(1)) == x
    assert characteristic_polynomial(path(2)) == x**2 - 1
    c4 = characteristic_polynomial(cycle(4))
    assert c4 == x**4 - 4 * x**2
    assert c4.coeffs[0] == 0


def test_size_caps():
    with pytest.raises(ValueError):
        matching_polynomial(path(40))
    with pytest.raises(ValueError):
        characteristic_polynomial(path(80))


def test_polynomials_agree_on_all_trees_up_to_10():
    # both sides are isomorphism invariants, so unlabelled trees of max degree
    # k+1 = 4 cover every animal of size <= 10 at k = 3
    count = 0
    for g in small_trees(10, 4):
        fg = FiniteGraph.from_edges(g.number_of_nodes(), g.edges)
        assert matching_polynomial(fg) == characteristic_polynomial(fg)
        info = tree_matching_info(tree_to_animal(g, 3))
        assert info.nu == nullity_rank_oracle(fg)
        count += 1
    # trees of max degree 4 (alkane skeletons): 1,1,1,2,3,5,9,18,35,75
    assert count == 150


def test_type_pass_vs_bruteforce_every_root():
    for g in small_trees(8, 4):
        fg = FiniteGraph.from_edges(g.number_of_nodes(), g.edges)
        for r in g.nodes:
            if g.degree[r] > 4:
                continue
            info = tree_matching_info(tree_to_animal(g, 3, root=r))
            assert info.node_type == type_bruteforce(fg, root=r)


def test_animals_size_6_all_oracles():
    for t in enumerate_animals(3, 6):
        g = FiniteGraph.from_animal(t)
        info = tree_matching_info(t)
        assert info.nu == nullity_rank_oracle(g) == t.size - 2 * max_matching_bruteforce(g)
        assert info.nu % 2 == t.size % 2


def random_tree(n, rng):
    if n == 1:
        return []
    if n == 2:
        return [(0, 1)]
    seq = [rng.randrange(n) for _ in range(n - 2)]
    return list(nx.from_prufer_sequence(seq).edges)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 40), st.integers(0, 10**6))
def test_random_tree_nullity(n, seed):
    rng = random.Random(seed)
    edges = random_tree(n, rng)
    g = FiniteGraph.from_edges(n, edges)
    children = [[] for _ in range(n)]
    seen = {0}
    stack = [0]
    nb = g.neighbors()
    while stack:
        v = stack.pop()
        for u in sorted(nb[v]):
            if u not in seen:
                seen.add(u)
                children[v].append(u)
                stack.append(u)
    info = rooted_tree_info(children, 0)
    assert info.nu == nullity_rank_oracle(g) == n - 2 * maximum_matching_size(g)
    assert info.nu % 2 == n % 2


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.floats(0.1, 0.7), st.integers(0, 10**6))
def test_matching_size_vs_networkx(n, density, seed):
    g = nx.gnp_random_graph(n, density, seed=seed)
    fg = FiniteGraph.from_edges(n, g.edges)
    ref = len(nx.max_weight_matching(g, maxcardinality=True))
    assert max_matching_bruteforce(fg) == ref == maximum_matching_size(fg)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 90), st.integers(0, 10**6))
def test_sparse_and_dense_rank_agree(n, seed):
    rng = random.Random(seed)
    g = nx.gnp_random_graph(n, min(1.0, 3 / n), seed=seed)
    adj = [[0] * n for _ in range(n)]
    rows = [dict() for _ in range(n)]
    for u, v in g.edges:
        w = rng.choice([1, 1, 2, -3])
        adj[u][v] = adj[v][u] = w
        rows[u][v] = rows[v][u] = w
    r = bareiss_rank(adj)
    assert r == sparse_rank(n, rows)
    assert r == np.linalg.matrix_rank(np.array(adj, dtype=float))


def test_large_graph_uses_sparse_path():
    g = cycle(102)  # 102 = 2 mod 4: perfect matching, nullity 0
    assert nullity_rank_oracle(g) == 0
    assert nullity_rank_oracle(cycle(100)) == 2


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 9), st.integers(0, 10**6))
def test_berkowitz_vs_numpy(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.integers(-3, 4, size=(n, n))
    ours = berkowitz(a.tolist())
    ref = np.poly(a.astype(float))
    assert ours[0] == 1
    assert np.allclose(ours, ref, atol=1e-6 * max(1.0, np.max(np.abs(ref))))
