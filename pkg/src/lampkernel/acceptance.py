"""Exit criteria A1-A12, shared by ``lampkernel reproduce`` and the test suite.

Each criterion returns a :class:`CriterionResult`; wall-time budgets are
part of the verdict.
"""
from __future__ import annotations

import io
import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import mpmath

HEADLINE = Fraction(850971, 10**6)
MC_SAMPLES = 10**6
MC_SEED = 20240601
SPECTRAL_SAMPLES = 10**4
SPECTRAL_SEED = 7
FP_SAMPLES = 10**4
FP_SEED = 2026


@dataclass
class CriterionResult:
    id: str
    title: str
    passed: bool
    seconds: float
    budget: float
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"id": self.id, "title": self.title, "passed": self.passed,
                "seconds": round(self.seconds, 3), "budget_seconds": self.budget,
                "details": self.details}

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"{self.id:<4} {verdict}  {self.seconds:8.2f}s / {self.budget:g}s  {self.title}"


CRITERIA: dict[str, tuple[str, float, Callable[[], tuple[bool, dict]]]] = {}


def criterion(cid: str, title: str, budget: float):
    def deco(fn):
        CRITERIA[cid] = (title, budget, fn)
        return fn
    return deco


@lru_cache(maxsize=None)
def _mc(k: int, m: int):
    from .percolation import estimate_dimension

    return estimate_dimension(k, m, MC_SAMPLES, MC_SEED)


# ---------------------------------------------------------------------------


@criterion("A1", "headline constant k=3, p=1/4 via `dimension --f 2 --m 4`", 1.0)
def a1():
    from .cli import main
    from .closedform import radical_value_k3_m4

    out = io.StringIO()
    code = main(["dimension", "--f", "2", "--m", "4"], stdout=out, stderr=io.StringIO())
    doc = json.loads(out.getvalue())
    with mpmath.workdps(40):
        value = mpmath.mpf(doc["result"]["value"])
        radical = radical_value_k3_m4(40)
        gap_radical = abs(radical - value)
        gap_headline = abs(value - mpmath.mpf(HEADLINE.numerator) / HEADLINE.denominator)
    ok = code == 0 and gap_headline <= mpmath.mpf("1e-6") and gap_radical <= mpmath.mpf("1e-20")
    return ok, {"value": doc["result"]["value"], "gap_to_0.850971": mpmath.nstr(gap_headline, 5),
                "gap_to_radical": mpmath.nstr(gap_radical, 5)}


@criterion("A2", "k=1 closed form equals 3 - 2p - 2/(1+p) for m = 2..12", 1.0)
def a2():
    from .closedform import c_of_p, k1_formula

    bad = []
    for m in range(2, 13):
        r = c_of_p(1, m, certify=False)
        if r.value_exact.exact_rational() != k1_formula(m) or not r.k1_check:
            bad.append(m)
    return not bad, {"mismatched_m": bad}


@criterion("A3", "series partial sums (N=400) reach the closed form from below", 30.0)
def a3():
    from .closedform import c_of_p
    from .genfun import partial_sums

    details = {}
    ok = True
    for k, m in [(1, 2), (3, 4), (3, 5)]:
        sums = partial_sums(k, m, 400, "float")
        c = c_of_p(k, m, certify=False).value_float
        mono = all(b >= a for a, b in zip(sums, sums[1:]))
        with mpmath.workprec(256):
            gap = c - sums[-1]
            # tail terms are nonnegative, so the sum may only undershoot
            good = mono and abs(gap) < mpmath.mpf("1e-6") and gap > -mpmath.mpf("1e-30")
        ok = ok and good
        details[f"{k},{m}"] = {"nondecreasing": mono, "C_minus_S400": mpmath.nstr(gap, 5)}
    return ok, details


@criterion("A4", "g_n equals the enumeration oracle (k=3, n<=8; k=1, n<=10)", 120.0)
def a4():
    from .genfun import g_coefficient_oracle, solve_ab

    bad = []
    for k, nmax in [(3, 8), (1, 10)]:
        g = solve_ab(k, nmax, "exact").g
        for n in range(1, nmax + 1):
            if g[n] != g_coefficient_oracle(k, n):
                bad.append((k, n))
    return not bad, {"mismatches": bad}


@criterion("A5", "parametrisation and antiderivative identities vanish for k=1..5", 10.0)
def a5():
    from .closedform import verify_antiderivative, verify_parametrisation

    fails = {}
    for k in range(1, 6):
        for rep in (verify_parametrisation(k), verify_antiderivative(k)):
            if not rep.ok:
                fails[k] = rep.failures()
    return not fails, {"failures": fails}


@criterion("A6", "cluster probabilities up to size 400 sum into (1 - 1e-6, 1]", 10.0)
def a6():
    from .genfun import probability_mass_sum

    total = probability_mass_sum(3, Fraction(1, 4), 400, "float")
    ok = 1 - mpmath.mpf("1e-6") < total <= 1
    return ok, {"sum": mpmath.nstr(total, 20), "deficit": mpmath.nstr(1 - total, 5)}


@criterion("A7", "Monte Carlo (1e6 samples) agrees with the closed form within 4 se", 180.0)
def a7():
    from .closedform import c_of_p

    details = {}
    ok = True
    for k, m in [(1, 2), (3, 4), (5, 6)]:
        est = _mc(k, m)
        c = float(c_of_p(k, m, certify=False).value_float)
        z = abs(est.estimate - c) / est.stderr
        p = 1 / m
        q = 1 - p
        n = est.diagnostics["accepted"]
        freq_checks = {}
        for name, prob in [("empty", q), ("root_only", p * q ** (k + 1))]:
            se = math.sqrt(prob * (1 - prob) / n)
            zf = abs(est.diagnostics[name] / n - prob) / se
            freq_checks[name] = round(zf, 3)
            ok = ok and zf < 4
        ok = ok and z < 4
        details[f"{k},{m}"] = {"estimate": est.estimate, "stderr": est.stderr, "closed_form": c,
                               "z": round(z, 3), "frequency_z": freq_checks}
    return ok, details


@criterion("A8", "spectral measure: atom at 0, symmetry, support (1e4 samples)", 180.0)
def a8():
    from .percolation import empirical_spectral_measure

    h = empirical_spectral_measure(3, 4, SPECTRAL_SAMPLES, 48, SPECTRAL_SEED)
    ref = _mc(3, 4)
    se = math.hypot(h.atom_stderr, ref.stderr)
    z = abs(h.atom_at_zero - ref.estimate) / se
    d = h.diagnostics
    ok = (z < 4 and d["symmetry_violations"] == 0 and d["support_violations"] == 0
          and d["residual_violations"] == 0 and abs(h.total_mass - 1) <= 1e-12)
    return ok, {"atom_at_zero": h.atom_at_zero, "reference": ref.estimate, "z": round(z, 3),
                "total_mass": h.total_mass, "diagnostics": d}


@criterion("A9", "tree nullity, matching vs characteristic polynomial, type A/B (size<=8)", 120.0)
def a9():
    from .animals import enumerate_animals
    from .matchings import (FiniteGraph, characteristic_polynomial, matching_polynomial,
                            nullity_rank_oracle, tree_matching_info, type_bruteforce)

    counts = {"nullity": 0, "polynomial": 0, "type": 0}
    total = 0
    for t in enumerate_animals(3, 8):
        total += 1
        g = FiniteGraph.from_animal(t)
        info = tree_matching_info(t)
        counts["nullity"] += info.nu != nullity_rank_oracle(g)
        counts["polynomial"] += matching_polynomial(g) != characteristic_polynomial(g)
        counts["type"] += info.node_type != type_bruteforce(g, root=0)
    return not any(counts.values()), {"animals": total, "mismatches": counts}


@criterion("A10", "rationality verdicts: (3,4) irrational degree 3; (1,2) equals 2/3", 5.0)
def a10():
    from .closedform import (AlgebraicNumber, IrrationalCertified, RationalValue, c_of_p,
                             rationality_certificate)
    from .exactkernel import sturm_count

    r34 = rationality_certificate(3, 4)
    val = c_of_p(3, 4, certify=False)
    ok34 = isinstance(r34, IrrationalCertified) and r34.minimal_polynomial.degree == 3
    contains = False
    if ok34:
        alg = AlgebraicNumber(r34.minimal_polynomial, val.value_exact.lo, val.value_exact.hi)
        contains = alg.lo <= val.value_exact.lo and val.value_exact.hi <= alg.hi
        contains = contains and sturm_count(r34.minimal_polynomial, alg.lo, alg.hi) == 1
        contains = contains and val.value_float in alg
    r12 = rationality_certificate(1, 2)
    ok12 = isinstance(r12, RationalValue) and r12.value == Fraction(2, 3)
    return ok34 and contains and ok12, {
        "k3_m4": str(getattr(r34, "minimal_polynomial", r34)), "interval_contains_value": contains,
        "k1_m2": str(getattr(r12, "value", r12)),
    }


@criterion("A11", "tau is unique in (1, t0) for k<=6, k<m<=12; tau = 1+p at k=1", 5.0)
def a11():
    from .closedform import tau, tau_certificate, t0

    bad = []
    for k in range(1, 7):
        for m in range(k + 1, 13):
            hi, count = tau_certificate(k, m)
            if count != 1 or not hi < t0(k).hi:
                bad.append((k, m))
    k1_bad = [m for m in range(2, 13) if tau(1, m).exact_rational() != 1 + Fraction(1, m)]
    return not bad and not k1_bad, {"non_unique": bad, "k1_mismatch": k1_bad}


@criterion("A12", "Z6*Z6: critical polynomial, matching = rank nullity, hexagon cycles", 180.0)
def a12():
    from .freeproduct import critical_polynomial_check, estimate_dimension_freeproduct

    crit = critical_polynomial_check()
    est = estimate_dimension_freeproduct((6, 6), 3, FP_SAMPLES, FP_SEED)
    d = est.diagnostics
    ok = (crit.ok and d["cycle_violations"] == 0 and d["parity_violations"] == 0
          and est.stderr <= 5e-3 and d["matching_rank_mismatches"] == 0)
    return ok, {"critical_root": [float(crit.root.lo), float(crit.root.hi)],
                "estimate": est.estimate, "stderr": est.stderr, "diagnostics": d}


# ---------------------------------------------------------------------------


def run_criterion(cid: str) -> CriterionResult:
    title, budget, fn = CRITERIA[cid]
    start = time.perf_counter()
    try:
        passed, details = fn()
    except Exception as e:  # a crash is a failed criterion, reported as such
        passed, details = False, {"error": f"{type(e).__name__}: {e}"}
    seconds = time.perf_counter() - start
    details["within_budget"] = seconds < budget
    return CriterionResult(cid, title, bool(passed) and seconds < budget, seconds, budget, details)


def run_criteria(only=None) -> list[CriterionResult]:
    ids = list(CRITERIA) if not only else [c.upper() for c in only]
    unknown = [c for c in ids if c not in CRITERIA]
    if unknown:
        raise ValueError(f"unknown criteria {unknown}; known: {list(CRITERIA)}")
    return [run_criterion(c) for c in ids]


def format_table(results: list[CriterionResult]) -> str:
    lines = [r.line() for r in results]
    npass = sum(r.passed for r in results)
    lines.append(f"{npass}/{len(results)} criteria passed")
    return "\n".join(lines) + "\n"
