"""Site percolation on Cayley graphs of free products Z_a * Z_b.

Words are in normal form: alternating syllables (factor, exponent) with
factor in {0, 1} and exponent in 1..order-1.  The graph is generated
lazily from the identity; it is never materialised.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx

from .exactkernel import AlgebraicNumber, Polynomial, as_rational, refine_root, sturm_count
from .matchings import FiniteGraph, maximum_matching_size, nullity_rank_oracle
from .percolation import BLOCK, CAP_ABORT_THRESHOLD, _Uniforms, _blocks, _map_blocks, block_generator

Word = tuple  # tuple[tuple[int, int], ...]
IDENTITY: Word = ()

DEFAULT_CAP = 10**5
CYCLE_CHECK_MAX = 20
P = Polynomial.x()
CRITICAL_POLY = 3 * P**5 - 2 * P**4 - 2 * P**3 - 2 * P**2 - 2 * P + 1


class MatchingRankMismatch(AssertionError):
    """Matching nullity and rank nullity disagree: the cycle condition failed."""


class GeneralCapExceeded(RuntimeError):
    pass


def multiply(w: Word, factor: int, step: int, orders: tuple[int, int]) -> Word:
    """Right-multiply ``w`` by generator ``factor`` raised to ``step``."""
    order = orders[factor]
    if w and w[-1][0] == factor:
        e = (w[-1][1] + step) % order
        return w[:-1] if e == 0 else w[:-1] + ((factor, e),)
    e = step % order
    return w if e == 0 else w + ((factor, e),)


def cayley_neighbors(w: Word, orders: tuple[int, int] = (6, 6)) -> list[Word]:
    out = []
    for f in (0, 1):
        for step in (1, -1):
            v = multiply(w, f, step, orders)
            if v not in out:
                out.append(v)
    return out


def word_str(w: Word) -> str:
    if not w:
        return "e"
    return "".join(("a" if f == 0 else "b") + (f"^{e}" if e != 1 else "") for f, e in w)


@dataclass(frozen=True)
class GeneralCluster:
    vertices: tuple  # words, BFS order, identity first when nonempty
    edges: tuple  # index pairs (i, j), i < j
    boundary: int

    @property
    def size(self) -> int:
        return len(self.vertices)

    def graph(self) -> FiniteGraph:
        return FiniteGraph(self.size, frozenset(self.edges))


def _grow_general(u: _Uniforms, orders, p: float, cap: int) -> GeneralCluster:
    if u.take(1)[0] >= p:
        return GeneralCluster((), (), 1)
    occupied = {IDENTITY: True}
    order = [IDENTITY]
    index = {IDENTITY: 0}
    edges = set()
    i = 0
    while i < len(order):
        w = order[i]
        for v in cayley_neighbors(w, orders):
            state = occupied.get(v)
            if state is None:
                state = u.take(1)[0] < p
                occupied[v] = state
                if state:
                    if len(order) >= cap:
                        raise GeneralCapExceeded(f"cluster exceeded {cap} vertices")
                    index[v] = len(order)
                    order.append(v)
            if state:
                j = index[v]
                edges.add((min(i, j), max(i, j)))
        i += 1
    boundary = sum(1 for s in occupied.values() if not s)
    return GeneralCluster(tuple(order), tuple(sorted(edges)), boundary)


def _check_p(orders, p: Fraction):
    if not 0 < p < 1:
        raise ValueError("need 0 < p < 1")
    if tuple(orders) == (6, 6) and p >= Fraction(339303, 10**6):
        raise ValueError("p must be below the Z6*Z6 critical value 0.339303")


def sample_cluster_general(orders, p, seed: int, cap: int = DEFAULT_CAP, index: int = 0) -> GeneralCluster:
    p = as_rational(p)
    _check_p(orders, p)
    block, offset = divmod(index, BLOCK)
    u = _Uniforms(block_generator(seed, block))
    for _ in range(offset):
        try:
            _grow_general(u, orders, float(p), cap)
        except GeneralCapExceeded:
            pass
    return _grow_general(u, orders, float(p), cap)


def cycle_lengths(c: GeneralCluster) -> list[int]:
    g = c.graph().to_networkx()
    return [len(cyc) for cyc in nx.cycle_basis(g)]


def cluster_nullity(c: GeneralCluster) -> tuple[int, int]:
    """(matching-based nullity, rank-based nullity)."""
    g = c.graph()
    return c.size - 2 * maximum_matching_size(g), nullity_rank_oracle(g)


@dataclass
class FreeProductEstimate:
    estimate: float
    stderr: float
    samples: int
    mean_exact: Fraction
    diagnostics: dict = field(default_factory=dict)


def _fp_block(args):
    orders, pf, seed, block, count, cap = args
    u = _Uniforms(block_generator(seed, block))
    tally: Counter = Counter()
    diag: Counter = Counter()
    for _ in range(count):
        try:
            c = _grow_general(u, orders, pf, cap)
        except GeneralCapExceeded:
            diag["cap_aborts"] += 1
            continue
        n = c.size
        if n == 0:
            tally[(1, 0)] += 1
            continue
        nu_match, nu_rank = cluster_nullity(c)
        if nu_match != nu_rank:
            raise MatchingRankMismatch(
                f"block {block}: matching nullity {nu_match} != rank nullity {nu_rank} (size {n})"
            )
        diag["rank_checked"] += 1
        if (nu_match - n) % 2:
            diag["parity_violations"] += 1
        if n <= CYCLE_CHECK_MAX:
            for length in cycle_lengths(c):
                diag["cycles_checked"] += 1
                if length % 4 != 2:
                    diag["cycle_violations"] += 1
        tally[(nu_match, n)] += 1
    return tally, diag


def estimate_dimension_freeproduct(
    orders=(6, 6),
    m: int = 3,
    samples: int = 10**4,
    seed: int = 0,
    cap: int = DEFAULT_CAP,
    threads: int = 1,
    abort_threshold: float = CAP_ABORT_THRESHOLD,
) -> FreeProductEstimate:
    from .percolation import mean_and_stderr

    orders = tuple(orders)
    if m < 2:
        raise ValueError("need m >= 2")
    _check_p(orders, Fraction(1, m))
    tasks = [(orders, 1.0 / m, seed, b, c, cap) for b, c in _blocks(samples)]
    tally: Counter = Counter()
    diag: Counter = Counter()
    for t, d in _map_blocks(_fp_block, tasks, threads):
        tally.update(t)
        diag.update(d)
    if diag["cap_aborts"] / samples > abort_threshold:
        raise RuntimeError(f"cap aborts {diag['cap_aborts']}/{samples} above threshold")
    mean, var, n = mean_and_stderr(tally)
    sizes = Counter()
    for (_, size), c in tally.items():
        sizes[size] += c
    diagnostics = {
        "orders": list(orders),
        "accepted": n,
        "empty": tally[(1, 0)],
        "max_size": max(sizes) if sizes else 0,
        **{key: int(diag[key]) for key in ("cap_aborts", "rank_checked", "parity_violations",
                                            "cycles_checked", "cycle_violations")},
        "matching_rank_mismatches": 0,
    }
    return FreeProductEstimate(float(mean), math.sqrt(var / n), samples, mean, diagnostics)


@dataclass(frozen=True)
class CriticalReport:
    roots_in_unit_interval: int
    root: AlgebraicNumber
    sign_at_one_third: int
    sign_at_034: int

    @property
    def ok(self) -> bool:
        return (
            self.roots_in_unit_interval == 1
            and Fraction(339302, 10**6) < self.root.lo
            and self.root.hi < Fraction(339304, 10**6)
            and self.sign_at_one_third * self.sign_at_034 < 0
        )


def critical_polynomial_check(eps=Fraction(1, 10**9)) -> CriticalReport:
    count = sturm_count(CRITICAL_POLY, 0, 1)
    root = refine_root(AlgebraicNumber(CRITICAL_POLY, 0, 1), as_rational(eps)) if count == 1 else None
    return CriticalReport(
        count,
        root,
        CRITICAL_POLY.sign_at(Fraction(1, 3)),
        CRITICAL_POLY.sign_at(Fraction(34, 100)),
    )
