"""Monte Carlo for subcritical site percolation on the (k+1)-regular tree.

Samples are grouped in fixed blocks; block b draws from a Philox stream
keyed by (master seed, b), so every sample is a pure function of
(seed, index) no matter how blocks are scheduled across workers.  Block
results are integer tallies (exact) or per-bin float arrays reduced in
block order, so outputs are bit-identical for any worker count.
"""
from __future__ import annotations

import math
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .animals import Animal, AnimalTree, EmptyAnimal
from .exactkernel import as_rational

BLOCK = 4096
DEFAULT_CAP = 10**6
DEFAULT_EIGEN_CAP = 2000
CAP_ABORT_THRESHOLD = 1e-6
RESIDUAL_TOL = 1e-10
SYMMETRY_TOL = 1e-8
_CHUNK = 1 << 14
THREADS_ENV = "LAMPKERNEL_THREADS"


class ClusterCapExceeded(RuntimeError):
    pass


def default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def block_generator(seed: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(block,))
    return np.random.Generator(np.random.Philox(ss))


class _Uniforms:
    """Sequential uniform draws from one block stream, buffered."""

    def __init__(self, gen: np.random.Generator):
        self.gen = gen
        self.buf: list[float] = []
        self.pos = 0

    def take(self, d: int) -> list[float]:
        if self.pos + d > len(self.buf):
            self.buf = self.buf[self.pos:] + self.gen.random(_CHUNK).tolist()
            self.pos = 0
        out = self.buf[self.pos:self.pos + d]
        self.pos += d
        return out


def _grow(u: _Uniforms, k: int, p: float, cap: int) -> list[list[int]]:
    """Slot lists of the cluster at the root (child index or -1 per slot);
    the empty list means the root is vacant.  Vertices are in BFS order."""
    if u.take(1)[0] >= p:
        return []
    slots: list = [None]
    i = 0
    while i < len(slots):
        row = []
        for x in u.take(k + 1 if i == 0 else k):
            if x < p:
                if len(slots) >= cap:
                    raise ClusterCapExceeded(f"cluster exceeded {cap} vertices")
                row.append(len(slots))
                slots.append(None)
            else:
                row.append(-1)
        slots[i] = row
        i += 1
    return slots


def _nullity(slots: list[list[int]]) -> int:
    n = len(slots)
    mu = [0] * n
    is_a = [True] * n
    for v in range(n - 1, -1, -1):
        m, all_b = 0, True
        for c in slots[v]:
            if c >= 0:
                m += mu[c]
                all_b = all_b and not is_a[c]
        mu[v] = m + (0 if all_b else 1)
        is_a[v] = all_b
    return n - 2 * mu[0]


def _to_animal(k: int, slots: list[list[int]]) -> Animal:
    if not slots:
        return EmptyAnimal()
    built: list = [None] * len(slots)
    for v in range(len(slots) - 1, -1, -1):
        built[v] = tuple(None if c < 0 else built[c] for c in slots[v])
    return AnimalTree(k, built[0], len(slots))


def _edges(slots: list[list[int]]) -> list[tuple[int, int]]:
    return [(v, c) for v, row in enumerate(slots) for c in row if c >= 0]


# ---------------------------------------------------------------------------
# single samples
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClusterSample:
    animal: Animal
    nu_over_size: Fraction
    seed_record: tuple[int, int]  # (master seed, sample index)

    @property
    def size(self) -> int:
        return self.animal.size


def sample_cluster(k: int, p, seed: int, cap: int = DEFAULT_CAP, index: int = 0) -> ClusterSample:
    """Sample ``index`` of the stream with master seed ``seed``."""
    p = as_rational(p)
    if not 0 < p < Fraction(1, k):
        raise ValueError("need 0 < p < 1/k (subcritical)")
    block, offset = divmod(index, BLOCK)
    u = _Uniforms(block_generator(seed, block))
    pf = float(p)
    for _ in range(offset):
        try:
            _grow(u, k, pf, cap)
        except ClusterCapExceeded:
            pass
    slots = _grow(u, k, pf, cap)
    if not slots:
        return ClusterSample(EmptyAnimal(), Fraction(1), (seed, index))
    return ClusterSample(_to_animal(k, slots), Fraction(_nullity(slots), len(slots)), (seed, index))


# ---------------------------------------------------------------------------
# estimation
# ---------------------------------------------------------------------------


@dataclass
class DimensionEstimate:
    estimate: float
    stderr: float
    samples: int
    mean_exact: Fraction
    diagnostics: dict = field(default_factory=dict)


def _dimension_block(args) -> tuple[Counter, int, Counter]:
    k, pf, seed, block, count, cap = args
    u = _Uniforms(block_generator(seed, block))
    tally: Counter = Counter()  # (nu, size) -> count; (1, 0) is the empty cluster
    small: Counter = Counter()
    aborts = 0
    for _ in range(count):
        try:
            slots = _grow(u, k, pf, cap)
        except ClusterCapExceeded:
            aborts += 1
            continue
        n = len(slots)
        if n == 0:
            tally[(1, 0)] += 1
            small[""] += 1
            continue
        tally[(_nullity(slots), n)] += 1
        if n <= 3:
            small[_to_animal(k, slots).encoding] += 1
    return tally, aborts, small


def _blocks(samples: int):
    nblocks = -(-samples // BLOCK)
    return [(b, min(BLOCK, samples - b * BLOCK)) for b in range(nblocks)]


def _map_blocks(fn, tasks: list, threads: int):
    if threads <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * threads))))


def mean_and_stderr(tally: Counter) -> tuple[Fraction, Fraction, int]:
    """Exact sample mean and sample variance of nu/size from the tallies."""
    n = sum(tally.values())
    s1 = sum((Fraction(nu, size) if size else Fraction(1)) * c for (nu, size), c in tally.items())
    s2 = sum((Fraction(nu, size) ** 2 if size else Fraction(1)) * c for (nu, size), c in tally.items())
    mean = s1 / n
    var = (s2 - n * mean * mean) / (n - 1) if n > 1 else Fraction(0)
    return mean, var, n


def estimate_dimension(
    k: int,
    m: int,
    samples: int,
    seed: int,
    cap: int = DEFAULT_CAP,
    threads: int = 1,
    abort_threshold: float = CAP_ABORT_THRESHOLD,
) -> DimensionEstimate:
    if not (m > k >= 1):
        raise ValueError("need m > k >= 1")
    if samples < 1:
        raise ValueError("need at least one sample")
    pf = 1.0 / m
    tasks = [(k, pf, seed, b, c, cap) for b, c in _blocks(samples)]
    tally: Counter = Counter()
    small: Counter = Counter()
    aborts = 0
    for t, a, s in _map_blocks(_dimension_block, tasks, threads):
        tally.update(t)
        small.update(s)
        aborts += a
    if aborts / samples > abort_threshold:
        raise RuntimeError(f"cap aborts {aborts}/{samples} above threshold {abort_threshold}")
    mean, var, n = mean_and_stderr(tally)
    stderr = math.sqrt(var / n) if n else float("nan")
    sizes = Counter()
    for (nu, size), c in tally.items():
        sizes[size] += c
    diagnostics = {
        "cap": cap,
        "cap_aborts": aborts,
        "accepted": n,
        "empty": tally[(1, 0)],
        "root_only": tally[(1, 1)],
        "max_size": max(sizes) if sizes else 0,
        "mean_size": sum(s * c for s, c in sizes.items()) / n if n else 0.0,
        "small_animals": dict(sorted(small.items())),
    }
    return DimensionEstimate(float(mean), stderr, samples, mean, diagnostics)


# ---------------------------------------------------------------------------
# spectral measure
# ---------------------------------------------------------------------------


@dataclass
class SpectralHistogram:
    edges: np.ndarray
    masses: np.ndarray  # includes the exact atom, placed in the bin containing 0
    atom_at_zero: float
    atom_stderr: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def total_mass(self) -> float:
        return float(math.fsum(self.masses))


def cluster_spectrum(slots: list[list[int]]) -> tuple[np.ndarray, float]:
    """Eigenvalues of the cluster adjacency and the max residual norm."""
    n = len(slots)
    a = np.zeros((n, n))
    for v, c in _edges(slots):
        a[v, c] = a[c, v] = 1.0
    w, vecs = np.linalg.eigh(a)
    resid = float(np.max(np.linalg.norm(a @ vecs - vecs * w, axis=0))) if n else 0.0
    return w, resid


def _spectral_block(args):
    k, pf, seed, block, count, cap, edges, eigen_cap = args
    u = _Uniforms(block_generator(seed, block))
    hist = np.zeros(len(edges) - 1)
    atom_vals = []
    diag = Counter()
    for _ in range(count):
        try:
            slots = _grow(u, k, pf, cap)
        except ClusterCapExceeded:
            diag["cap_aborts"] += 1
            continue
        n = len(slots)
        if n == 0:
            atom_vals.append(1.0)
            continue
        if n > eigen_cap:
            diag["eigen_skipped"] += 1
            continue
        nu = _nullity(slots)
        w, resid = cluster_spectrum(slots)
        if resid > RESIDUAL_TOL * max(1.0, float(np.max(np.abs(w)))):
            diag["residual_violations"] += 1
        ws = np.sort(w)
        if np.max(np.abs(ws + ws[::-1])) > SYMMETRY_TOL:
            diag["symmetry_violations"] += 1
        if ws[0] < -(k + 1) - SYMMETRY_TOL or ws[-1] > k + 1 + SYMMETRY_TOL:
            diag["support_violations"] += 1
        # the nu eigenvalues nearest 0 are the kernel; their mass is taken exactly
        order = np.argsort(np.abs(w), kind="stable")
        if nu and np.max(np.abs(w[order[:nu]])) > 1e-8:
            diag["kernel_mismatch"] += 1
        nonzero = w[order[nu:]]
        idx = np.clip(np.searchsorted(edges, nonzero, side="right") - 1, 0, len(hist) - 1)
        np.add.at(hist, idx, 1.0 / n)
        atom_vals.append(nu / n)
        diag["clusters"] += 1
    return hist, atom_vals, diag


def empirical_spectral_measure(
    k: int,
    m: int,
    samples: int,
    bins: int,
    seed: int,
    cap: int = DEFAULT_CAP,
    eigen_cap: int = DEFAULT_EIGEN_CAP,
    threads: int = 1,
) -> SpectralHistogram:
    if not (m > k >= 1):
        raise ValueError("need m > k >= 1")
    edges = np.linspace(-(k + 1), k + 1, bins + 1)
    pf = 1.0 / m
    tasks = [(k, pf, seed, b, c, cap, edges, eigen_cap) for b, c in _blocks(samples)]
    hist = np.zeros(bins)
    atoms: list[float] = []
    diag = Counter()
    for h, a, d in _map_blocks(_spectral_block, tasks, threads):
        hist += h
        atoms.extend(a)
        diag.update(d)
    used = len(atoms)
    atom = math.fsum(atoms) / used
    var = math.fsum((x - atom) ** 2 for x in atoms) / (used - 1) if used > 1 else 0.0
    masses = hist / used
    zero_bin = int(np.clip(np.searchsorted(edges, 0.0, side="right") - 1, 0, bins - 1))
    masses[zero_bin] += atom
    diagnostics = {"samples": samples, "used": used, **{k_: int(v) for k_, v in diag.items()}}
    for key in ("cap_aborts", "eigen_skipped", "residual_violations", "symmetry_violations",
                "support_violations", "kernel_mismatch"):
        diagnostics.setdefault(key, 0)
    return SpectralHistogram(edges, masses, atom, math.sqrt(var / used), diagnostics)
