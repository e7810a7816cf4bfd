"""Lattice animals of the (k+1)-regular tree, as ordered slot trees.

A vertex is a tuple of slots; each slot is ``None`` (no neighbour in the
animal in that generator direction) or a child vertex.  The root carries
k+1 slots, every other vertex k slots (the remaining direction points back
to its parent).

Slot-string grammar, used for canonical ordering and streaming output::

    slot   := "0" | vertex
    vertex := "1"                 # all slots empty
            | "(" slot{d} ")"     # d = k+1 at the root, k elsewhere
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Union

from .exactkernel import as_rational

Node = tuple  # tuple[Optional[Node], ...]

DEFAULT_CAP = 10**8


class AnimalCapExceeded(RuntimeError):
    def __init__(self, size: int, cap: int):
        super().__init__(f"animal cap {cap} exceeded while emitting size {size}")
        self.size = size
        self.cap = cap


@dataclass(frozen=True)
class EmptyAnimal:
    """The empty animal; its boundary is the root itself."""

    size: int = 0

    @property
    def encoding(self) -> str:
        return ""


@dataclass(frozen=True)
class AnimalTree:
    k: int
    root: Node
    size: int = field(default=-1)

    def __post_init__(self):
        if len(self.root) != self.k + 1:
            raise ValueError(f"root needs {self.k + 1} slots, got {len(self.root)}")
        n = _check_and_count(self.root, self.k, top=True)
        if self.size == -1:
            object.__setattr__(self, "size", n)
        elif self.size != n:
            raise ValueError(f"declared size {self.size} but tree has {n} vertices")

    @property
    def encoding(self) -> str:
        return encode(self.root)

    @classmethod
    def from_encoding(cls, k: int, s: str) -> "AnimalTree":
        return cls(k, decode(k, s))

    def vertices(self) -> list[tuple[int, ...]]:
        """Vertex labels as slot-index paths from the root (root = ())."""
        out = []
        stack = [((), self.root)]
        while stack:
            path, node = stack.pop()
            out.append(path)
            for i, child in enumerate(node):
                if child is not None:
                    stack.append((path + (i,), child))
        return sorted(out)

    def edges(self) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
        return [(v[:-1], v) for v in self.vertices() if v]


Animal = Union[AnimalTree, EmptyAnimal]


def _check_and_count(node: Node, k: int, top: bool = False) -> int:
    if not top and len(node) != k:
        raise ValueError(f"internal vertex needs {k} slots, got {len(node)}")
    return 1 + sum(_check_and_count(c, k) for c in node if c is not None)


@lru_cache(maxsize=None)
def encode(node: Node) -> str:
    if all(c is None for c in node):
        return "1"
    return "(" + "".join("0" if c is None else encode(c) for c in node) + ")"


def decode(k: int, s: str) -> Node:
    pos = 0

    def vertex(d: int) -> Node:
        nonlocal pos
        ch = s[pos]
        pos += 1
        if ch == "1":
            return (None,) * d
        if ch != "(":
            raise ValueError(f"bad slot string at {pos - 1}: {s!r}")
        slots = []
        for _ in range(d):
            if s[pos] == "0":
                pos += 1
                slots.append(None)
            else:
                slots.append(vertex(k))
        if s[pos] != ")":
            raise ValueError(f"expected ')' at {pos}: {s!r}")
        pos += 1
        return tuple(slots)

    node = vertex(k + 1)
    if pos != len(s):
        raise ValueError(f"trailing characters in {s!r}")
    return node


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _forests(k: int, sizes: tuple[int, ...], table) -> Iterator[Node]:
    return itertools.product(*(table(s) for s in sizes))


def _subtree_table(k: int):
    """Memoised lists of k-slot subtrees by size (size 0 is the empty slot)."""

    @lru_cache(maxsize=None)
    def table(n: int) -> tuple:
        if n == 0:
            return (None,)
        out = []
        for sizes in _compositions(n - 1, k):
            out.extend(_forests(k, sizes, table))
        return tuple(out)

    return table


def animals_of_size(k: int, n: int, table=None) -> list[AnimalTree]:
    """All animals with exactly n vertices, in canonical order."""
    if k < 1 or n < 1:
        raise ValueError("need k >= 1 and n >= 1")
    table = table or _subtree_table(k)
    roots = []
    for sizes in _compositions(n - 1, k + 1):
        roots.extend(_forests(k, sizes, table))
    roots.sort(key=encode)
    return [AnimalTree(k, r, n) for r in roots]


def enumerate_animals(k: int, n_max: int, cap: int = DEFAULT_CAP) -> Iterator[AnimalTree]:
    """Every animal with 1 <= size <= n_max, by size then by slot string."""
    if k < 1 or n_max < 1:
        raise ValueError("need k >= 1 and n_max >= 1")
    table = _subtree_table(k)
    emitted = 0
    for n in range(1, n_max + 1):
        batch = animals_of_size(k, n, table)
        if emitted + len(batch) > cap:
            raise AnimalCapExceeded(n, cap)
        emitted += len(batch)
        yield from batch


# ---------------------------------------------------------------------------
# boundary and cluster probability
# ---------------------------------------------------------------------------


def boundary_size(t: Animal) -> int:
    if isinstance(t, EmptyAnimal):
        return 1
    return 2 + (t.k - 1) * t.size


def boundary_by_neighbors(t: Animal) -> int:
    """Count outside neighbours directly from vertex labels."""
    if isinstance(t, EmptyAnimal):
        return 1
    inside = set(t.vertices())
    outside = set()
    for v in inside:
        nslots = t.k + 1 if not v else t.k
        nbrs = [v + (i,) for i in range(nslots)]
        if v:
            nbrs.append(v[:-1])
        outside.update(w for w in nbrs if w not in inside)
    return len(outside)


def animal_probability(t: Animal, p) -> Fraction:
    """Probability that the percolation cluster at the root equals t."""
    p = as_rational(p)
    if not 0 < p < 1:
        raise ValueError("need 0 < p < 1")
    return p**t.size * (1 - p) ** boundary_size(t)


def root_only(k: int) -> AnimalTree:
    return AnimalTree(k, (None,) * (k + 1), 1)


def probability_partial_sum(k: int, p, n_max: int) -> Fraction:
    """q plus the cluster probabilities of every animal with size <= n_max."""
    p = as_rational(p)
    # the probability depends on the size only, so tally sizes first
    sizes = Counter(t.size for t in enumerate_animals(k, n_max))
    return (1 - p) + sum(c * p**n * (1 - p) ** (2 + (k - 1) * n) for n, c in sizes.items())
