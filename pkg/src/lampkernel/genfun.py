"""Series solutions of the type-A/type-B functional equations at u = 1,
the kernel-dimension generating function G and its weighted partial sums.

With S = A + B (the k-ary tree series) the equations read

    A = x B^k,    B = 1 + x (S^k - B^k),

and G(x) = sum over nonempty animals T of nu(T) x^|T|.
"""
from __future__ import annotations

import contextlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

import mpmath

from .animals import animals_of_size
from .exactkernel import TruncatedSeries, as_rational
from .matchings import tree_matching_info

Mode = Literal["exact", "float"]

DEFAULT_EXACT_ORDER = 60
DEFAULT_FLOAT_ORDER = 400
DEFAULT_FLOAT_PREC = 128
ORACLE_MAX_N = 10


@dataclass(frozen=True)
class ABSeries:
    k: int
    order: int
    mode: str
    a1: TruncatedSeries
    b1: TruncatedSeries
    au_plus_bu: TruncatedSeries
    g: TruncatedSeries

    @property
    def s1(self) -> TruncatedSeries:
        return self.a1 + self.b1

    def residuals(self) -> tuple[TruncatedSeries, TruncatedSeries]:
        x = TruncatedSeries.variable(self.order, self._one())
        k = self.k
        r1 = self.a1 - x * self.b1**k
        r2 = self.b1 - 1 - x * (self.s1**k - self.b1**k)
        return r1, r2

    def _one(self):
        return self.b1[0]


def _one(mode: Mode):
    return Fraction(1) if mode == "exact" else mpmath.mpf(1)


@contextlib.contextmanager
def _precision(mode: Mode, prec: int):
    if mode == "float":
        with mpmath.workprec(prec):
            yield
    else:
        yield


class _PowerTracker:
    """Coefficients of F**k, extended one term at a time (F[0] = 1).

    Uses the power recurrence n P_n = sum_j ((k+1) j - n) F_j P_{n-j}.
    """

    def __init__(self, k: int, one):
        self.k = k
        self.p = [one]

    def extend(self, f: list):
        n = len(self.p)
        acc = 0 * self.p[0]
        for j in range(1, n + 1):
            acc += ((self.k + 1) * j - n) * f[j] * self.p[n - j]
        self.p.append(acc / n)


def _solve_relaxed(k: int, order: int, one):
    """Coefficient-by-coefficient fixed point: b_n only depends on
    coefficients of degree < n, so one lazy sweep per coefficient suffices."""
    a, b, s = [0 * one], [one], [one]
    bk, sk = _PowerTracker(k, one), _PowerTracker(k, one)
    for n in range(1, order + 1):
        # a_n = [x^{n-1}] B^k,  b_n = [x^{n-1}] (S^k - B^k)
        a.append(bk.p[n - 1])
        b.append(sk.p[n - 1] - bk.p[n - 1])
        s.append(a[n] + b[n])
        bk.extend(b)
        sk.extend(s)
    return TruncatedSeries(tuple(a)), TruncatedSeries(tuple(b))


def _solve_sweeps(k: int, order: int, one):
    """Plain fixed-point iteration B <- 1 + x((A+B)^k - B^k), A = x B^k."""
    x = TruncatedSeries.variable(order, one)
    b = TruncatedSeries.constant(one, order)
    for _ in range(order + 1):
        a = x * b**k
        b = 1 + x * ((a + b) ** k - b**k)
    return x * b**k, b


def solve_ab(
    k: int,
    N: int,
    mode: Mode = "exact",
    prec: int = DEFAULT_FLOAT_PREC,
    method: Literal["relaxed", "sweeps"] = "relaxed",
) -> ABSeries:
    if k < 1 or N < 1:
        raise ValueError("need k >= 1 and N >= 1")
    if mode not in ("exact", "float"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "float" and prec < 128:
        raise ValueError("float mode needs at least 128 significand bits")
    with _precision(mode, prec):
        one = _one(mode)
        if method == "relaxed":
            a, b = _solve_relaxed(k, N, one)
        else:
            a, b = _solve_sweeps(k, N, one)
        x = TruncatedSeries.variable(N, one)
        s = a + b
        s_km1 = s ** (k - 1)
        denom = 1 - x * s_km1 * k
        assert denom[0] == 1
        au_bu = (2 * (1 - b) + x * s_km1 * s) / denom
        # closed form for G once the u-derivative has been eliminated
        denom_g = k - (k - 1) * s
        assert denom_g[0] == 1
        g = -2 * a * a + s * (a - b + 1) * (2 * s - 1) / denom_g
    return ABSeries(k, N, mode, a, b, au_bu, g)


def g_from_derivative(ab: ABSeries) -> TruncatedSeries:
    """G via -2A^2 + (A_u + B_u)(2A + 2B - 1); independent of the final
    simplification used in :func:`solve_ab`."""
    s = ab.s1
    return -2 * ab.a1 * ab.a1 + ab.au_plus_bu * (2 * s - 1)


def animal_count_series(k: int, N: int, mode: Mode = "exact", prec: int = DEFAULT_FLOAT_PREC) -> TruncatedSeries:
    """Number of animals of each size: F(1, x) = S (S - 1)."""
    with _precision(mode, prec):
        one = _one(mode)
        a, b = _solve_relaxed(k, N, one)
        s = a + b
        return s * (s - 1)


def g_coefficient_oracle(k: int, n: int) -> int:
    """Sum of nullities over all animals of size n, by enumeration."""
    if n > ORACLE_MAX_N:
        raise ValueError(f"oracle is exhaustive; n <= {ORACLE_MAX_N} required")
    return sum(tree_matching_info(t).nu for t in animals_of_size(k, n))


def _check_subcritical(k: int, m: int):
    if not (isinstance(m, int) and m > k >= 1):
        raise ValueError(f"need integers m > k >= 1 (subcritical p = 1/m < 1/k), got k={k}, m={m}")


def dimension_partial_sum(
    k: int,
    m: int,
    N: int,
    mode: Mode = "exact",
    prec: int = DEFAULT_FLOAT_PREC,
    ab: ABSeries | None = None,
):
    """q + q^2 sum_{n<=N} g_n (p q^{k-1})^n / n for p = 1/m."""
    _check_subcritical(k, m)
    if ab is None or ab.order < N or ab.mode != mode:
        ab = solve_ab(k, N, mode, prec)
    p = Fraction(1, m)
    q = 1 - p
    with _precision(mode, prec):
        if mode == "exact":
            x = p * q ** (k - 1)
            total = Fraction(0)
            xn = Fraction(1)
            for n in range(1, N + 1):
                xn *= x
                total += Fraction(ab.g[n]) * xn / n
            return q + q * q * total
        x = mpmath.mpf(p.numerator * q.numerator ** (k - 1)) / (p.denominator * q.denominator ** (k - 1))
        terms = []
        xn = mpmath.mpf(1)
        for n in range(1, N + 1):
            xn *= x
            terms.append(ab.g[n] * xn / n)
        qf = mpmath.mpf(q.numerator) / q.denominator
        return +(qf + qf * qf * mpmath.fsum(terms))


def partial_sums(k: int, m: int, N: int, mode: Mode = "float", prec: int = DEFAULT_FLOAT_PREC) -> list:
    """Every partial sum from 0 to N terms (for monotonicity checks)."""
    _check_subcritical(k, m)
    ab = solve_ab(k, N, mode, prec)
    p = Fraction(1, m)
    q = 1 - p
    with _precision(mode, prec):
        conv = (lambda r: r) if mode == "exact" else (lambda r: mpmath.mpf(r.numerator) / r.denominator)
        x, qq = conv(p * q ** (k - 1)), conv(q)
        out = [qq]
        acc = 0 * qq
        xn = conv(Fraction(1))
        for n in range(1, N + 1):
            xn *= x
            acc += ab.g[n] * xn / n
            out.append(qq + qq * qq * acc)
    return out


def probability_mass_sum(k: int, p, N: int, mode: Mode = "float", prec: int = DEFAULT_FLOAT_PREC):
    """q + sum_{n<=N} count_n p^n q^{2+(k-1)n}: cluster probabilities up to size N."""
    p = as_rational(p)
    q = 1 - p
    counts = animal_count_series(k, N, mode, prec)
    with _precision(mode, prec):
        if mode == "exact":
            return q + sum(Fraction(counts[n]) * p**n * q ** (2 + (k - 1) * n) for n in range(1, N + 1))
        pf = mpmath.mpf(p.numerator) / p.denominator
        qf = mpmath.mpf(q.numerator) / q.denominator
        return +(qf + mpmath.fsum(counts[n] * pf**n * qf ** (2 + (k - 1) * n) for n in range(1, N + 1)))


def coefficient_table(k: int, N: int, check_bruteforce: bool = False, oracle_max: int = 8) -> list[dict]:
    """Rows n, g_n, count_n (and oracle agreement for small n)."""
    ab = solve_ab(k, N, "exact")
    counts = animal_count_series(k, N, "exact")
    rows = []
    for n in range(1, N + 1):
        row = {"n": n, "g_n": int(ab.g[n]), "count_n": int(counts[n])}
        if check_bruteforce and n <= oracle_max:
            row["oracle_match"] = g_coefficient_oracle(k, n) == row["g_n"]
        rows.append(row)
    return rows
