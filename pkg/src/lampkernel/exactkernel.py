"""Exact arithmetic: rationals, polynomials over Q, truncated power series,
Sturm root counting and real algebraic numbers.

Rationals are :class:`fractions.Fraction` throughout; everything here is
immutable and pure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

Rational = Fraction


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions and decimal strings to an exact Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    if isinstance(x, float):
        # floats are exact dyadics; accept but never silently round
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational")


class ReducibleModulusError(ValueError):
    """Raised when an inversion modulo a polynomial exposes a proper factor."""

    def __init__(self, factor: "Polynomial"):
        super().__init__(f"modulus is reducible, factor found: {factor}")
        self.factor = factor


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Polynomial:
    """Univariate polynomial over Q, coefficients in ascending degree."""

    coeffs: tuple[Fraction, ...] = ()

    def __post_init__(self):
        cs = [as_rational(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def const(cls, c) -> "Polynomial":
        return cls((c,))

    @classmethod
    def x(cls) -> "Polynomial":
        return cls((0, 1))

    @classmethod
    def monomial(cls, n: int, c=1) -> "Polynomial":
        return cls((0,) * n + (c,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __call__(self, x):
        acc = 0 * x if not isinstance(x, int) else 0
        for c in reversed(self.coeffs):
            acc = acc * x + (c if isinstance(x, (int, Fraction)) else _to_mpf(c))
        return acc

    # ring operations -----------------------------------------------------

    @staticmethod
    def _coerce(other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        return Polynomial.const(other)

    def __add__(self, other):
        if not isinstance(other, (Polynomial, int, Fraction)):
            return NotImplemented
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return Polynomial(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        if not isinstance(other, (Polynomial, int, Fraction)):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, (Polynomial, int, Fraction)):
            return NotImplemented
        other = self._coerce(other)
        if not self.coeffs or not other.coeffs:
            return Polynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Polynomial(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative polynomial power")
        result, base = Polynomial.const(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __divmod__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Polynomial(), self
        quot = [Fraction(0)] * (dq + 1)
        lead = other.lead
        for i in range(dq, -1, -1):
            c = rem[i + other.degree] / lead
            quot[i] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[i + j] -= c * b
        return Polynomial(tuple(quot)), Polynomial(tuple(rem[: other.degree]))

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Polynomial.const(other).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    # helpers ---------------------------------------------------------------

    def derivative(self) -> "Polynomial":
        return Polynomial(tuple(i * c for i, c in enumerate(self.coeffs) if i))

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        return Polynomial(tuple(c / self.lead for c in self.coeffs))

    def compose(self, inner: "Polynomial") -> "Polynomial":
        acc = Polynomial()
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    def shift(self, c) -> "Polynomial":
        """Return f(t + c)."""
        return self.compose(Polynomial((c, 1)))

    def primitive(self) -> "Polynomial":
        """Integer primitive part with positive leading coefficient."""
        return Polynomial(tuple(self.integer_coeffs()))

    def integer_coeffs(self) -> list[int]:
        """Coefficients scaled to coprime integers, positive leading term."""
        if self.is_zero():
            return []
        den = math.lcm(*(c.denominator for c in self.coeffs))
        ints = [int(c * den) for c in self.coeffs]
        g = math.gcd(*ints)
        if ints[-1] < 0:
            g = -g
        return [v // g for v in ints]

    def sign_at(self, x: Fraction) -> int:
        v = self(as_rational(x))
        return (v > 0) - (v < 0)

    def __repr__(self):
        return f"Polynomial({[str(c) for c in self.coeffs]})"

    def __str__(self):
        if self.is_zero():
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
            if mono and abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}" + (f"*{mono}" if mono else "")
            terms.append(("-" if c < 0 else "+") + " " + body)
        s = " ".join(terms)
        return s[2:] if s.startswith("+") else "-" + s[2:]


def _to_mpf(c: Fraction):
    return mpmath.mpf(c.numerator) / c.denominator


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic gcd via primitive-part Euclid (zero if both are zero)."""
    a, b = a.primitive(), b.primitive()
    while not b.is_zero():
        a, b = b, (a % b).primitive()
    return a.monic()


def poly_arith(a: Polynomial, b: Polynomial, op: str):
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "divmod":
        return divmod(a, b)
    if op == "gcd":
        return poly_gcd(a, b)
    if op == "derivative":
        return a.derivative()
    raise ValueError(f"unknown polynomial op {op!r}")


def squarefree_part(f: Polynomial) -> Polynomial:
    if f.degree <= 0:
        return f
    g = poly_gcd(f, f.derivative())
    return (f // g).primitive() if g.degree > 0 else f.primitive()


# ---------------------------------------------------------------------------
# Sturm sequences
# ---------------------------------------------------------------------------


def sturm_sequence(f: Polynomial) -> list[Polynomial]:
    """Sturm chain with remainders reduced to positive-scaled primitive parts."""
    if f.is_zero():
        raise ValueError("Sturm sequence of the zero polynomial")
    seq = [f.primitive(), f.derivative().primitive()]
    while not seq[-1].is_zero() and seq[-1].degree > 0:
        r = -(seq[-2] % seq[-1])
        if r.is_zero():
            break
        # scaling by a positive constant keeps every sign pattern
        ints = r.integer_coeffs()
        if (ints[-1] > 0) != (r.lead > 0):
            ints = [-v for v in ints]
        seq.append(Polynomial(tuple(ints)))
    return [p for p in seq if not p.is_zero()]


def sign_variations(seq: Sequence[Polynomial], x: Fraction) -> int:
    signs = [s for s in (p.sign_at(x) for p in seq) if s]
    return sum(1 for u, v in zip(signs, signs[1:]) if u != v)


def root_gap_below(f: Polynomial, x0: Fraction) -> Fraction:
    """Rational r > 0 such that f has no root in 0 < |t - x0| < r.

    Cauchy's bound applied to the reversed Taylor expansion at x0.
    """
    h = list(f.shift(x0).coeffs)
    while h and h[0] == 0:
        h.pop(0)
    c0 = abs(h[0])
    big = max((abs(c) for c in h[1:]), default=Fraction(0))
    return c0 / (c0 + big) if big else Fraction(1)


def sturm_count(f: Polynomial, lo, hi) -> int:
    """Number of distinct real roots of ``f`` in the open interval (lo, hi)."""
    if f.is_zero():
        raise ValueError("sturm_count of the zero polynomial")
    lo, hi = as_rational(lo), as_rational(hi)
    if lo >= hi:
        return 0
    if f.degree == 0:
        return 0
    # endpoint roots are excluded: move inward past them, but not past any other root
    if f(lo) == 0:
        lo = lo + min(root_gap_below(f, lo), (hi - lo)) / 2
    if f(hi) == 0:
        hi = hi - min(root_gap_below(f, hi), (hi - lo)) / 2
    seq = sturm_sequence(f)
    return sign_variations(seq, lo) - sign_variations(seq, hi)


# ---------------------------------------------------------------------------
# Real algebraic numbers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AlgebraicNumber:
    """A real root of ``defining`` singled out by the open interval (lo, hi)."""

    defining: Polynomial
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "defining", squarefree_part(self.defining))
        object.__setattr__(self, "lo", as_rational(self.lo))
        object.__setattr__(self, "hi", as_rational(self.hi))
        if self.defining.degree < 1:
            raise ValueError("defining polynomial must be non-constant")
        if self.lo > self.hi:
            raise ValueError("empty isolating interval")
        if self.lo == self.hi:
            if self.defining(self.lo) != 0:
                raise ValueError("degenerate interval is not a root")
        elif sturm_count(self.defining, self.lo, self.hi) != 1:
            raise ValueError(
                f"interval ({self.lo}, {self.hi}) does not isolate exactly one root"
            )

    @classmethod
    def rational(cls, r) -> "AlgebraicNumber":
        r = as_rational(r)
        return cls(Polynomial((-r, 1)), r, r)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def is_rational(self) -> bool:
        return self.defining.degree == 1

    def exact_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational number")
        c = self.defining.coeffs
        return -c[0] / c[1]

    def refine(self, eps) -> "AlgebraicNumber":
        return refine_root(self, eps)

    def to_mpf(self, prec: int = 128):
        """Midpoint of an interval refined below 2**-prec."""
        with mpmath.workprec(prec + 16):
            x = self.refine(Fraction(1, 2 ** (prec + 2)))
            return _to_mpf((x.lo + x.hi) / 2)

    def __contains__(self, value) -> bool:
        if isinstance(value, (int, Fraction)):
            return self.lo <= value <= self.hi
        if isinstance(value, mpmath.mpf):
            # mpf values are dyadic rationals; compare exactly
            man, exp = value.man_exp
            exact = Fraction(man) * Fraction(2) ** exp
            return self.lo <= exact <= self.hi
        return _to_mpf(self.lo) <= value <= _to_mpf(self.hi)


def refine_root(x: AlgebraicNumber, eps) -> AlgebraicNumber:
    """Bisect the isolating interval until its width is below ``eps``."""
    eps = as_rational(eps)
    f = x.defining
    lo, hi = x.lo, x.hi
    if lo == hi or hi - lo < eps:
        return x
    # endpoint roots lie outside the open interval; the inner root is at
    # least one root gap away from them
    if f(lo) == 0:
        lo += root_gap_below(f, lo) / 2
    if f(hi) == 0:
        hi -= root_gap_below(f, hi) / 2
    s_lo = f.sign_at(lo)
    while hi - lo >= eps:
        mid = (lo + hi) / 2
        s = f.sign_at(mid)
        if s == 0:
            return AlgebraicNumber(f, mid, mid)
        if s == s_lo:
            lo = mid
        else:
            hi = mid
    return AlgebraicNumber(f, lo, hi)


# ---------------------------------------------------------------------------
# Truncated power series
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TruncatedSeries:
    """Power series known modulo x**(order+1).

    Coefficients are Fractions (exact mode) or mpmath ``mpf`` (float mode);
    the caller controls float precision via ``mpmath.workprec``.
    """

    coeffs: tuple

    @classmethod
    def from_list(cls, coeffs: Iterable, order: int) -> "TruncatedSeries":
        cs = list(coeffs)[: order + 1]
        zero = cs[0] * 0 if cs else Fraction(0)
        cs += [zero] * (order + 1 - len(cs))
        return cls(tuple(cs))

    @classmethod
    def constant(cls, c, order: int) -> "TruncatedSeries":
        return cls.from_list([c], order)

    @classmethod
    def variable(cls, order: int, one=Fraction(1)) -> "TruncatedSeries":
        return cls.from_list([one * 0, one], order)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n):
        return self.coeffs[n]

    def __len__(self):
        return len(self.coeffs)

    def _lift(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            return other
        return TruncatedSeries.constant(self.coeffs[0] * 0 + other, self.order)

    def __add__(self, other):
        other = self._lift(other)
        n = min(self.order, other.order) + 1
        return TruncatedSeries(tuple(a + b for a, b in zip(self.coeffs[:n], other.coeffs[:n])))

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries(tuple(c * other for c in self.coeffs))
        n = min(self.order, other.order) + 1
        a, b = self.coeffs, other.coeffs
        out = []
        for i in range(n):
            acc = a[0] * b[i]
            for j in range(1, i + 1):
                acc += a[j] * b[i - j]
            out.append(acc)
        return TruncatedSeries(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("series power needs an integer exponent k >= 0")
        result = TruncatedSeries.constant(self.coeffs[0] * 0 + 1, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def shift(self) -> "TruncatedSeries":
        """Multiply by x, keeping the order."""
        return TruncatedSeries((self.coeffs[0] * 0,) + self.coeffs[:-1])

    def inverse(self) -> "TruncatedSeries":
        c0 = self.coeffs[0]
        if c0 == 0:
            raise ZeroDivisionError("series inverse needs a nonzero constant term")
        inv = [1 / c0 if not isinstance(c0, int) else Fraction(1, c0)]
        for n in range(1, self.order + 1):
            acc = self.coeffs[1] * inv[n - 1]
            for j in range(2, n + 1):
                acc += self.coeffs[j] * inv[n - j]
            inv.append(-acc * inv[0])
        return TruncatedSeries(tuple(inv))

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return self * other.inverse()
        return TruncatedSeries(tuple(c / other for c in self.coeffs))

    def truncate(self, order: int) -> "TruncatedSeries":
        return TruncatedSeries(self.coeffs[: order + 1])


def series_op(a: TruncatedSeries, b, op: str) -> TruncatedSeries:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "pow_k":
        return a ** b
    raise ValueError(f"unknown series op {op!r}")


# ---------------------------------------------------------------------------
# Quotient rings Q[t]/(M)
# ---------------------------------------------------------------------------


def inverse_mod(a: Polynomial, modulus: Polynomial) -> Polynomial:
    """Inverse of ``a`` modulo ``modulus`` by the extended Euclidean algorithm."""
    r0, r1 = modulus, a % modulus
    s0, s1 = Polynomial(), Polynomial.const(1)
    if r1.is_zero():
        raise ZeroDivisionError("element is zero in the quotient ring")
    while not r1.is_zero():
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
    if r0.degree > 0:
        factor = r0.monic()
        if factor.degree == modulus.degree:
            raise ZeroDivisionError("element is zero in the quotient ring")
        raise ReducibleModulusError(factor)
    return (s0 * (1 / r0.lead)) % modulus


def _kernel_vector(vectors: list[list[Fraction]]) -> list[Fraction] | None:
    """Coefficients c with sum c_i v_i = 0 and c_last = 1, if the last vector
    depends on the earlier (linearly independent) ones."""
    n = len(vectors)
    dim = len(vectors[0])
    # columns are the vectors; augment by solving for the last one
    rows = [[vectors[j][i] for j in range(n - 1)] + [-vectors[-1][i]] for i in range(dim)]
    pivots = []
    r = 0
    for c in range(n - 1):
        p = next((i for i in range(r, dim) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(dim):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if any(rows[i][-1] != 0 for i in range(r, dim)):
        return None
    sol = [Fraction(0)] * (n - 1)
    for i, c in enumerate(pivots):
        sol[c] = rows[i][-1]
    return sol + [Fraction(1)]


def minimal_polynomial_in_extension(
    elem_num: Polynomial, elem_den: Polynomial, modulus: Polynomial
) -> Polynomial:
    """Monic minimal polynomial of elem_num/elem_den in Q[t]/(modulus)."""
    d = modulus.degree
    if d < 1:
        raise ValueError("modulus must have positive degree")
    elem = (elem_num * inverse_mod(elem_den, modulus)) % modulus

    def vec(p: Polynomial) -> list[Fraction]:
        return list(p.coeffs) + [Fraction(0)] * (d - len(p.coeffs))

    powers = [vec(Polynomial.const(1))]
    cur = Polynomial.const(1)
    for j in range(1, d + 1):
        cur = (cur * elem) % modulus
        powers.append(vec(cur))
        sol = _kernel_vector(powers)
        if sol is not None:
            return Polynomial(tuple(sol))
    raise ArithmeticError("no dependency among powers; modulus degree mismatch")
