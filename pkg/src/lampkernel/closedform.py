"""Closed form of the kernel dimension C(p) for p = 1/m on the (k+1)-regular
tree, the exact identities behind it, and (ir)rationality verdicts.

    tau:   unique root in (1, t0) of m t^k - m t^{k-1} - 1
    C(p) = q - p + (tau - 1)(1 - k + (k+1) tau) / tau^2
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import mpmath

from .exactkernel import (
    AlgebraicNumber,
    Polynomial,
    as_rational,
    minimal_polynomial_in_extension,
    poly_gcd,
    refine_root,
    sturm_count,
)

T = Polynomial.x()
DEFAULT_PRECISION = Fraction(1, 10**30)
DEFAULT_DENOM_BOUND = 10**6
START_BITS = 128


def _check(k: int, m: int):
    if not (isinstance(k, int) and isinstance(m, int) and m > k >= 1):
        raise ValueError(f"need integers m > k >= 1 (p = 1/m below 1/k), got k={k}, m={m}")


def tau_polynomial(k: int, m: int) -> Polynomial:
    return m * T**k - m * T ** (k - 1) - 1


def t0_polynomial(k: int) -> Polynomial:
    return k * T**k - k * T ** (k - 1) - 1


def t0(k: int) -> AlgebraicNumber:
    """Root of t^k - t^{k-1} = 1/k above 1: the critical end of the curve."""
    return AlgebraicNumber(t0_polynomial(k), 1, 3)


def x0(k: int) -> Fraction:
    return Fraction(1, k) * (1 - Fraction(1, k)) ** (k - 1)


def x_of_t(k: int) -> Polynomial:
    return (T - 1) * T ** (k - 1) * (1 + T ** (k - 1) - T**k) ** (k - 1)


def tau_certificate(k: int, m: int) -> tuple[Fraction, int]:
    """Rational hi < t0 with Q(hi) > 0, and the Sturm count of Q on (1, hi)."""
    _check(k, m)
    q = tau_polynomial(k, m)
    r = t0(k)
    while q(r.lo) <= 0:
        r = refine_root(r, r.width / 4)
    return r.lo, sturm_count(q, 1, r.lo)


def tau(k: int, m: int, precision=Fraction(1, 10**6)) -> AlgebraicNumber:
    _check(k, m)
    q = tau_polynomial(k, m)
    if k == 1:
        return AlgebraicNumber.rational(Fraction(m + 1, m))
    hi, count = tau_certificate(k, m)
    if count != 1:
        raise ArithmeticError(f"tau not unique in (1, t0): Sturm count {count}")
    return refine_root(AlgebraicNumber(q, 1, hi), as_rational(precision))


def closed_form_at(k: int, m: int, t):
    """q - p + (t-1)(1-k+(k+1)t)/t^2; increasing in t for t > 1."""
    p = Fraction(1, m)
    if isinstance(t, (int, Fraction)):
        return 1 - 2 * p + (t - 1) * (1 - k + (k + 1) * t) / (t * t)
    return (1 - 2 * mpmath.mpf(p)) + (t - 1) * (1 - k + (k + 1) * t) / (t * t)


def k1_formula(m: int) -> Fraction:
    p = Fraction(1, m)
    return 3 - 2 * p - 2 / (1 + p)


# ---------------------------------------------------------------------------
# results
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RationalValue:
    value: Fraction
    route: str = "exact"
    kind: str = "rational"


@dataclass(frozen=True)
class IrrationalCertified:
    minimal_polynomial: Polynomial
    route: str = "exact"
    kind: str = "irrational_certified"


@dataclass(frozen=True)
class IrrationalUpToBound:
    denom_bound: int
    route: str = "bounded"
    kind: str = "irrational_up_to_bound"


Rationality = Union[RationalValue, IrrationalCertified, IrrationalUpToBound]


@dataclass(frozen=True)
class KernelDimensionResult:
    k: int
    m: int
    tau: AlgebraicNumber
    value_float: object  # mpmath.mpf
    value_exact: AlgebraicNumber
    rationality: Optional[Rationality]
    bits: int
    k1_check: Optional[bool] = None

    @property
    def p(self) -> Fraction:
        return Fraction(1, self.m)

    @property
    def enclosure(self) -> tuple[Fraction, Fraction]:
        return self.value_exact.lo, self.value_exact.hi


def poly_to_json(f: Polynomial) -> dict:
    """Primitive integer coefficients, ascending degree, plus a readable form."""
    return {"coeffs_ascending": f.integer_coeffs(), "text": str(f.primitive())}


def result_to_json(res: KernelDimensionResult, digits: int = 30) -> dict:
    rat = res.rationality
    if rat is None:
        rat_json = None
    elif isinstance(rat, RationalValue):
        rat_json = {"kind": rat.kind, "route": rat.route, "value": str(rat.value)}
    elif isinstance(rat, IrrationalCertified):
        rat_json = {"kind": rat.kind, "route": rat.route,
                    "minimal_polynomial": poly_to_json(rat.minimal_polynomial)}
    else:
        rat_json = {"kind": rat.kind, "route": rat.route, "denom_bound": rat.denom_bound}
    return {
        "k": res.k,
        "m": res.m,
        "p": str(res.p),
        "tau": {
            "defining": poly_to_json(res.tau.defining),
            "interval": [str(res.tau.lo), str(res.tau.hi)],
        },
        "value": mpmath.nstr(res.value_float, digits),
        "value_exact": {
            "defining": poly_to_json(res.value_exact.defining),
            "interval": [str(res.value_exact.lo), str(res.value_exact.hi)],
        },
        "rationality": rat_json,
        "working_bits": res.bits,
        "k1_check": res.k1_check,
        "provenance": {
            "tau": "unique root of m t^k - m t^(k-1) - 1 in (1, t0), Sturm-certified",
            "value": "q - p + (tau-1)(1-k+(k+1)tau)/tau^2 on the exact tau interval",
        },
    }


# ---------------------------------------------------------------------------
# C(p)
# ---------------------------------------------------------------------------


def annihilator(k: int, m: int) -> Polynomial:
    """Monic polynomial with C(p) as a root, from linear algebra in Q[t]/(Q).

    Minimal when Q is irreducible; always an annihilator otherwise.
    """
    p = Fraction(1, m)
    shift = 1 - 2 * p
    e = minimal_polynomial_in_extension((T - 1) * (1 - k + (k + 1) * T), T**2, tau_polynomial(k, m))
    return e.shift(-shift)


def c_of_p(
    k: int,
    m: int,
    precision=DEFAULT_PRECISION,
    certify: bool = True,
    denom_bound: int = DEFAULT_DENOM_BOUND,
) -> KernelDimensionResult:
    _check(k, m)
    precision = as_rational(precision)
    if k == 1:
        t = Fraction(m + 1, m)
        val = closed_form_at(k, m, t)
        with mpmath.workprec(START_BITS):
            vf = mpmath.mpf(val.numerator) / val.denominator
        rat = RationalValue(val) if certify else None
        return KernelDimensionResult(
            k, m, AlgebraicNumber.rational(t), vf, AlgebraicNumber.rational(val),
            rat, START_BITS, k1_check=(val == k1_formula(m)),
        )
    defining = annihilator(k, m)
    bits = START_BITS
    while True:
        tt = tau(k, m, Fraction(1, 2**bits))
        lo, hi = closed_form_at(k, m, tt.lo), closed_form_at(k, m, tt.hi)
        if hi - lo < precision and sturm_count(defining, lo, hi) == 1 and defining(lo) != 0 and defining(hi) != 0:
            break
        bits *= 2
    with mpmath.workprec(bits):
        mid = (lo + hi) / 2
        vf = mpmath.mpf(mid.numerator) / mid.denominator
    exact = AlgebraicNumber(defining, lo, hi)
    rat = rationality_certificate(k, m, denom_bound, _result=(tt, exact)) if certify else None
    return KernelDimensionResult(k, m, tt, vf, exact, rat, bits)


# ---------------------------------------------------------------------------
# rationality
# ---------------------------------------------------------------------------


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def rational_roots(f: Polynomial) -> list[Fraction]:
    """All rational roots by the rational-root test."""
    c = f.integer_coeffs()
    while c and c[0] == 0:
        c = c[1:]
    if len(c) <= 1:
        return [Fraction(0)] if f.coeffs and f.coeffs[0] == 0 else []
    roots = set()
    if f.coeffs[0] == 0:
        roots.add(Fraction(0))
    for a in _divisors(c[0]):
        for b in _divisors(c[-1]):
            for r in (Fraction(a, b), Fraction(-a, b)):
                if f(r) == 0:
                    roots.add(r)
    return sorted(roots)


def certified_irreducible(f: Polynomial) -> bool:
    """Irreducibility over Q for degree <= 3 (no rational root); None-safe for
    larger degree: returns False meaning 'not certified'."""
    if f.degree == 1:
        return True
    if f.degree in (2, 3):
        return not rational_roots(f)
    return False


def continued_fraction_convergents(x: Fraction, bound: int) -> list[Fraction]:
    out = []
    h0, h1, k0, k1 = 0, 1, 1, 0
    while True:
        a = math.floor(x)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        if k1 > bound:
            break
        out.append(Fraction(h1, k1))
        frac = x - a
        if frac == 0:
            break
        x = 1 / frac
    return out


def reconstruct_candidates(lo: Fraction, hi: Fraction, denom_bound: int) -> list[Fraction]:
    """Every a/b with b <= denom_bound that could equal a number in [lo, hi]."""
    if hi - lo >= Fraction(1, 2 * denom_bound**2):
        raise ValueError(
            f"enclosure width {float(hi - lo):.3g} too large for denominators up to {denom_bound}; refine"
        )
    return [c for c in continued_fraction_convergents((lo + hi) / 2, denom_bound)]


def rationality_certificate(
    k: int, m: int, denom_bound: int = DEFAULT_DENOM_BOUND, _result=None
) -> Rationality:
    _check(k, m)
    p = Fraction(1, m)
    if k == 1:
        return RationalValue(closed_form_at(1, m, Fraction(m + 1, m)))
    q_poly = tau_polynomial(k, m)
    shift = 1 - 2 * p
    if certified_irreducible(q_poly):
        e = minimal_polynomial_in_extension((T - 1) * (1 - k + (k + 1) * T), T**2, q_poly)
        cpoly = e.shift(-shift)
        if cpoly.degree == 1:
            return RationalValue(-cpoly.coeffs[0] / cpoly.coeffs[1])
        return IrrationalCertified(cpoly)
    # bounded route
    if _result is None:
        width = Fraction(1, 8 * denom_bound**2)
        res = c_of_p(k, m, precision=width, certify=False)
        tt, exact = res.tau, res.value_exact
    else:
        tt, exact = _result
        if exact.width >= Fraction(1, 2 * denom_bound**2):
            res = c_of_p(k, m, precision=Fraction(1, 8 * denom_bound**2), certify=False)
            tt, exact = res.tau, res.value_exact
    for cand in reconstruct_candidates(exact.lo, exact.hi, denom_bound):
        r = cand - shift
        # C = cand  iff  tau is a root of (t-1)(1-k+(k+1)t) - r t^2
        pc = (T - 1) * (1 - k + (k + 1) * T) - r * T**2
        g = poly_gcd(pc, q_poly)
        if g.degree >= 1 and (g(tt.lo) == 0 or sturm_count(g, tt.lo, tt.hi) >= 1 or g(tt.hi) == 0):
            return RationalValue(cand, route="bounded")
    return IrrationalUpToBound(denom_bound)


# ---------------------------------------------------------------------------
# exact identities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RatFunc:
    """num/den over Q[t], compared by cross-multiplication."""

    num: Polynomial
    den: Polynomial = field(default_factory=lambda: Polynomial.const(1))

    @staticmethod
    def of(x) -> "RatFunc":
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, Polynomial):
            return RatFunc(x)
        return RatFunc(Polynomial.const(x))

    def reduced(self) -> "RatFunc":
        g = poly_gcd(self.num, self.den)
        if g.degree <= 0:
            return self
        return RatFunc(self.num // g, self.den // g)

    def __add__(self, o):
        o = RatFunc.of(o)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den).reduced()

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, o):
        return self + (-RatFunc.of(o))

    def __rsub__(self, o):
        return RatFunc.of(o) - self

    def __mul__(self, o):
        o = RatFunc.of(o)
        return RatFunc(self.num * o.num, self.den * o.den).reduced()

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = RatFunc.of(o)
        return RatFunc(self.num * o.den, self.den * o.num).reduced()

    def __rtruediv__(self, o):
        return RatFunc.of(o) / self

    def __pow__(self, n: int):
        return RatFunc(self.num**n, self.den**n)

    def derivative(self) -> "RatFunc":
        return RatFunc(
            self.num.derivative() * self.den - self.num * self.den.derivative(), self.den**2
        ).reduced()

    def residual(self, other) -> Polynomial:
        """Cross-multiplied numerator of self - other; zero iff equal."""
        o = RatFunc.of(other)
        return self.num * o.den - o.num * self.den


@dataclass(frozen=True)
class IdentityReport:
    k: int
    residuals: dict  # name -> Polynomial

    @property
    def ok(self) -> bool:
        return all(r.is_zero() for r in self.residuals.values())

    def failures(self) -> dict:
        return {n: str(r) for n, r in self.residuals.items() if not r.is_zero()}


def parametrisation(k: int) -> tuple[RatFunc, RatFunc, RatFunc]:
    d = 1 + T ** (k - 1) - T**k
    x = RatFunc(x_of_t(k))
    a = RatFunc(T - 1, T * d)
    b = RatFunc(Polynomial.const(1), T * d)
    return x, a, b


def verify_parametrisation(k: int) -> IdentityReport:
    if not 1 <= k <= 8:
        raise ValueError("verify_parametrisation supports 1 <= k <= 8")
    x, a, b = parametrisation(k)
    return IdentityReport(k, {
        "A = x B^k": a.residual(x * b**k),
        "B = 1 + x((A+B)^k - B^k)": b.residual(1 + x * ((a + b) ** k - b**k)),
    })


def integrand(k: int) -> RatFunc:
    d = 1 + T ** (k - 1) - T**k
    num = (k * T - k + 1) * (
        T ** (2 * k) * (1 - T)
        + T ** (k - 1) * ((2 * k + 1) * T**2 - (4 * k + 2) * T + 2 * k)
        + 2
    )
    return RatFunc(num, T**3 * d**3)


def antiderivative(k: int) -> RatFunc:
    d = 1 + T ** (k - 1) - T**k
    return RatFunc((T - 1) * (1 - k + (k + 1) * T - T ** (k + 1)), T**2 * d**2)


def g_parametrised(k: int) -> RatFunc:
    d = 1 + T ** (k - 1) - T**k
    e = 1 + k * T ** (k - 1) - k * T**k
    num = (T - 1) * (
        T ** (2 * k) * (1 - T)
        + T ** (k - 1) * ((2 * k + 1) * T**2 - (4 * k + 2) * T + 2 * k)
        + 2
    )
    return RatFunc(num, T**2 * d**2 * e)


def dlog_x_factor(k: int) -> RatFunc:
    d = 1 + T ** (k - 1) - T**k
    e = 1 + k * T ** (k - 1) - k * T**k
    return RatFunc((k * T - k + 1) * e, T * (T - 1) * d)


def verify_antiderivative(k: int) -> IdentityReport:
    """Derivative of the antiderivative, the dx/x change of variable, the
    parametrised G, and the evaluation at tau, as polynomial identities."""
    if not 1 <= k <= 8:
        raise ValueError("verify_antiderivative supports 1 <= k <= 8")
    x, a, b = parametrisation(k)
    s = a + b
    g_from_ab = -2 * a * a + s * (a - b + 1) * (2 * s - 1) / (k - (k - 1) * s)
    f = antiderivative(k)
    # with p = t^k - t^{k-1} and q = 1 - p, q^2 F(t) must equal -p + (t-1)(1-k+(k+1)t)/t^2
    p_t = T**k - T ** (k - 1)
    q_t = 1 - p_t
    return IdentityReport(k, {
        "d/dt antiderivative = integrand": f.derivative().residual(integrand(k)),
        "dx/x = factor dt": (RatFunc.of(x.num.derivative()) / x).residual(dlog_x_factor(k)),
        "G(A(t), B(t)) = parametrised G": g_from_ab.residual(g_parametrised(k)),
        "G * dx/x = integrand": (g_parametrised(k) * dlog_x_factor(k)).residual(integrand(k)),
        "antiderivative at 1 = 0": Polynomial.const(f.num(Fraction(1))),
        "q^2 F(tau) = q - p + closed form - q": (q_t**2 * f).residual(
            RatFunc(-p_t * T**2 + (T - 1) * (1 - k + (k + 1) * T), T**2)
        ),
    })


def verify_x0(k: int) -> Polynomial:
    """x(t) - x0 reduced modulo the t0 polynomial (zero iff x(t0) = x0)."""
    return (x_of_t(k) - x0(k)) % t0_polynomial(k)


def radical_value_k3_m4(dps: int = 40):
    """The explicit radical expression for k = 3, p = 1/4."""
    with mpmath.workdps(dps):
        c = mpmath.cbrt(766 + 258 * mpmath.sqrt(129))
        return +(-mpmath.mpf(5) / 6 - 400 / (3 * c) + 2 * c / 3)
