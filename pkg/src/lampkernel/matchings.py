"""Maximum matchings, nullity and the A/B root classification of trees,
with exact (integer-only) linear-algebra oracles for arbitrary graphs."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Literal

import networkx as nx

from .animals import AnimalTree, Node
from .exactkernel import Polynomial

NodeType = Literal["A", "B"]

MATCHING_POLY_CAP = 24
CHARPOLY_CAP = 64
EXHAUSTIVE_MATCHING_CUTOFF = 14


@dataclass(frozen=True)
class MatchingInfo:
    mu: int
    nu: int
    node_type: NodeType

    @property
    def size(self) -> int:
        return self.nu + 2 * self.mu


@dataclass(frozen=True)
class FiniteGraph:
    """Simple undirected graph on vertices 0..n-1."""

    n: int
    edges: frozenset

    def __post_init__(self):
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError("loops are not allowed")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) out of range")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable) -> "FiniteGraph":
        return cls(n, frozenset(edges))

    @classmethod
    def from_labelled(cls, vertices: Iterable, edges: Iterable) -> "FiniteGraph":
        index = {v: i for i, v in enumerate(vertices)}
        return cls(len(index), frozenset((index[a], index[b]) for a, b in edges))

    @classmethod
    def from_animal(cls, t: AnimalTree) -> "FiniteGraph":
        return cls.from_labelled(t.vertices(), t.edges())

    def adjacency(self) -> list[list[int]]:
        a = [[0] * self.n for _ in range(self.n)]
        for u, v in self.edges:
            a[u][v] = a[v][u] = 1
        return a

    def neighbors(self) -> list[set[int]]:
        nb = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nb[u].add(v)
            nb[v].add(u)
        return nb

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g


# ---------------------------------------------------------------------------
# trees: one bottom-up pass
# ---------------------------------------------------------------------------


@lru_cache(maxsize=1 << 20)
def _node_info(node: Node) -> tuple[int, int, bool]:
    """(size, mu, is_type_A) of the subtree hanging at ``node``."""
    size, mu, all_b = 1, 0, True
    for child in node:
        if child is None:
            continue  # the empty branch counts as type B
        s, m, a = _node_info(child)
        size += s
        mu += m
        all_b = all_b and not a
    return size, mu + (0 if all_b else 1), all_b


def tree_matching_info(t: AnimalTree) -> MatchingInfo:
    size, mu, is_a = _node_info(t.root)
    return MatchingInfo(mu, size - 2 * mu, "A" if is_a else "B")


def rooted_tree_info(children: list[list[int]], root: int = 0) -> MatchingInfo:
    """Same pass for a rooted tree given as child lists."""
    order = [root]
    for v in order:
        order.extend(children[v])
    mu = [0] * len(children)
    is_a = [True] * len(children)
    for v in reversed(order):
        m, all_b = 0, True
        for c in children[v]:
            m += mu[c]
            all_b = all_b and not is_a[c]
        mu[v] = m + (0 if all_b else 1)
        is_a[v] = all_b
    n = len(order)
    return MatchingInfo(mu[root], n - 2 * mu[root], "A" if is_a[root] else "B")


# ---------------------------------------------------------------------------
# brute force matchings (oracle side)
# ---------------------------------------------------------------------------


def _greedy_matching(nb: list[set[int]]) -> int:
    used = set()
    count = 0
    for v in sorted(range(len(nb)), key=lambda i: len(nb[i])):
        if v in used:
            continue
        for u in sorted(nb[v], key=lambda i: len(nb[i])):
            if u not in used:
                used.update((u, v))
                count += 1
                break
    return count


def max_matching_bruteforce(g: FiniteGraph, exclude: Iterable[int] = ()) -> int:
    """Maximum matching size by branch and bound over vertices."""
    nb = g.neighbors()
    banned = set(exclude)
    for v in banned:
        for u in nb[v]:
            nb[u].discard(v)
        nb[v] = set()
    best = _greedy_matching(nb)
    free = [v for v in range(g.n) if nb[v]]

    def search(i: int, matched: set[int], current: int):
        nonlocal best
        while i < len(free) and free[i] in matched:
            i += 1
        remaining = sum(1 for v in free[i:] if v not in matched)
        if current + remaining // 2 <= best:
            return
        if i == len(free):
            best = max(best, current)
            return
        v = free[i]
        for u in nb[v]:
            if u not in matched:
                matched.add(u)
                matched.add(v)
                search(i + 1, matched, current + 1)
                matched.discard(u)
                matched.discard(v)
        matched.add(v)
        search(i + 1, matched, current)
        matched.discard(v)

    search(0, set(), 0)
    return best


def all_matchings(g: FiniteGraph) -> list[frozenset]:
    edges = sorted(g.edges)
    out = []

    def rec(i: int, used: set[int], chosen: list):
        if i == len(edges):
            out.append(frozenset(chosen))
            return
        rec(i + 1, used, chosen)
        u, v = edges[i]
        if u not in used and v not in used:
            used.update((u, v))
            chosen.append(edges[i])
            rec(i + 1, used, chosen)
            chosen.pop()
            used.difference_update((u, v))

    rec(0, set(), [])
    return out


def type_bruteforce(g: FiniteGraph, root: int = 0) -> NodeType:
    """Type A iff some maximum matching leaves ``root`` uncovered."""
    ms = all_matchings(g)
    mu = max(len(m) for m in ms)
    for m in ms:
        if len(m) == mu and not any(root in e for e in m):
            return "A"
    return "B"


def maximum_matching_size(g: FiniteGraph, cutoff: int = EXHAUSTIVE_MATCHING_CUTOFF) -> int:
    """Exhaustive search up to ``cutoff`` vertices; above it Hopcroft-Karp
    when the graph is bipartite, Edmonds' blossom otherwise."""
    if g.n <= cutoff:
        return max_matching_bruteforce(g)
    h = g.to_networkx()
    if nx.is_bipartite(h):
        size = 0
        for comp in nx.connected_components(h):
            sub = h.subgraph(comp)
            top = nx.bipartite.sets(sub)[0]
            size += len(nx.bipartite.hopcroft_karp_matching(sub, top)) // 2
        return size
    return len(nx.max_weight_matching(h, maxcardinality=True))


# ---------------------------------------------------------------------------
# exact rank
# ---------------------------------------------------------------------------


def bareiss_rank(matrix: list[list[int]]) -> int:
    """Rank of an integer matrix by fraction-free Gaussian elimination."""
    m = [row[:] for row in matrix]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    rank, prev = 0, 1
    for c in range(ncols):
        p = next((r for r in range(rank, nrows) if m[r][c] != 0), None)
        if p is None:
            continue
        m[rank], m[p] = m[p], m[rank]
        piv = m[rank][c]
        for r in range(rank + 1, nrows):
            f = m[r][c]
            row = m[r]
            prow = m[rank]
            for j in range(c, ncols):
                # exact by Sylvester's identity
                row[j] = (piv * row[j] - f * prow[j]) // prev
        prev = piv
        rank += 1
    return rank


def sparse_rank(n: int, rows: list[dict[int, int]]) -> int:
    """Rank of a sparse integer matrix by integer elimination with content
    removal and cheapest-row pivoting."""
    rows = {i: dict(r) for i, r in enumerate(rows) if r}
    cols: dict[int, set[int]] = {}
    for i, r in rows.items():
        for c in r:
            cols.setdefault(c, set()).add(i)
    rank = 0
    while rows:
        r = min(rows, key=lambda i: (len(rows[i]), i))
        prow = rows.pop(r)
        for c in prow:
            cols[c].discard(r)
        c = min(prow, key=lambda j: (len(cols[j]), j))
        a = prow[c]
        for s in list(cols[c]):
            srow = rows[s]
            b = srow[c]
            g = math.gcd(a, b)
            fa, fb = a // g, b // g
            new = {j: fa * v for j, v in srow.items()}
            for j, v in prow.items():
                new[j] = new.get(j, 0) - fb * v
            new = {j: v for j, v in new.items() if v}
            for j in srow:
                if j not in new:
                    cols[j].discard(s)
            for j in new:
                cols.setdefault(j, set()).add(s)
            if new:
                content = math.gcd(*new.values())
                if content > 1:
                    new = {j: v // content for j, v in new.items()}
                rows[s] = new
            else:
                del rows[s]
        rank += 1
    return rank


def nullity_rank_oracle(g: FiniteGraph, dense_limit: int = 64) -> int:
    """n - rank of the adjacency matrix, computed exactly over the integers."""
    if g.n < 1:
        raise ValueError("graph must have at least one vertex")
    if g.n <= dense_limit:
        return g.n - bareiss_rank(g.adjacency())
    rows = [dict() for _ in range(g.n)]
    for u, v in g.edges:
        rows[u][v] = 1
        rows[v][u] = 1
    return g.n - sparse_rank(g.n, rows)


# ---------------------------------------------------------------------------
# polynomials of graphs
# ---------------------------------------------------------------------------


def _ipoly_sub(a: list[int], b: list[int]) -> list[int]:
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]


def _matching_poly_ints(vertices: frozenset, edges: frozenset, memo: dict) -> list[int]:
    """Ascending integer coefficients of the matching polynomial."""
    key = (vertices, edges)
    hit = memo.get(key)
    if hit is not None:
        return hit
    if not edges:
        res = [0] * len(vertices) + [1]
    else:
        deg: dict[int, int] = {}
        for u, v in edges:
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
        # branch on an edge at a minimum-degree vertex to keep recursion shallow
        leaf = min(deg, key=lambda v: (deg[v], v))
        e = min(ed for ed in edges if leaf in ed)
        u, v = e
        deleted = _matching_poly_ints(vertices, edges - {e}, memo)
        rest = frozenset(ed for ed in edges if u not in ed and v not in ed)
        contracted = _matching_poly_ints(vertices - {u, v}, rest, memo)
        # mu(G) = mu(G - e) - mu(G - u - v)
        res = _ipoly_sub(deleted, contracted)
        while len(res) > 1 and res[-1] == 0:
            res.pop()
    memo[key] = res
    return res


def matching_polynomial(g: FiniteGraph) -> Polynomial:
    if g.n > MATCHING_POLY_CAP:
        raise ValueError(f"matching polynomial capped at {MATCHING_POLY_CAP} vertices")
    return Polynomial(tuple(_matching_poly_ints(frozenset(range(g.n)), g.edges, {})))


def berkowitz(matrix: list[list[int]]) -> list[int]:
    """det(xI - M) by Berkowitz's division-free algorithm, descending powers."""
    n = len(matrix)
    # nonzero pattern of each row, for the leading principal submatrices
    nz = [[(j, a) for j, a in enumerate(row) if a] for row in matrix]
    v = [1]
    for r in range(n):
        t = [1, -matrix[r][r]]
        rrow = [(i, a) for i, a in nz[r] if i < r]
        sub = [[(l, a) for l, a in nz[i] if l < r] for i in range(r)]
        vec = [matrix[i][r] for i in range(r)]
        for _ in range(r):
            t.append(-sum(a * vec[i] for i, a in rrow))
            vec = [sum(a * vec[l] for l, a in sub[i]) for i in range(r)]
        out = [0] * (r + 2)
        for j, vj in enumerate(v):
            if vj:
                for i in range(r + 2 - j):
                    out[i + j] += t[i] * vj
        v = out
    return v


def characteristic_polynomial(g: FiniteGraph) -> Polynomial:
    if g.n > CHARPOLY_CAP:
        raise ValueError(f"characteristic polynomial capped at {CHARPOLY_CAP} vertices")
    return Polynomial(tuple(reversed(berkowitz(g.adjacency()))))
