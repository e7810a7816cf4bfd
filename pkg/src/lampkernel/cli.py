"""Command-line entry point: ``lampkernel <subcommand> ...``.

Every JSON document carries the schema version, tool version, the full
config, the master seed and a sha256 of the canonical config, and is
written with sorted keys so repeated runs are byte-identical.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

import mpmath

from . import __version__
from .animals import AnimalCapExceeded, enumerate_animals
from .closedform import c_of_p, result_to_json, verify_antiderivative, verify_parametrisation
from .freeproduct import critical_polynomial_check, estimate_dimension_freeproduct
from .genfun import coefficient_table, solve_ab
from .percolation import default_threads, empirical_spectral_measure, estimate_dimension

SCHEMA = "lampkernel/1"


@dataclass
class RunConfig:
    subcommand: str
    k: Optional[int] = None
    f: Optional[int] = None
    m: Optional[int] = None
    order: Optional[int] = None
    samples: Optional[int] = None
    seed: Optional[int] = None
    precision: Optional[int] = None  # decimal digits
    out: Optional[str] = None
    extra: dict = field(default_factory=dict)

    def resolved_k(self) -> Optional[int]:
        if self.f is not None:
            return 2 * self.f - 1
        return self.k


class UsageError(Exception):
    pass


def _validate(cfg: RunConfig):
    if cfg.k is not None and cfg.f is not None:
        raise UsageError("give exactly one of --k / --f")
    k = cfg.resolved_k()
    needs_k = cfg.subcommand in ("dimension", "genfun", "enumerate", "mc")
    if needs_k and k is None:
        raise UsageError("one of --k / --f is required")
    if k is not None and k < 1:
        raise UsageError("k must be >= 1 (f >= 1)")
    if cfg.subcommand in ("dimension", "mc") and (cfg.m is None or cfg.m <= k):
        raise UsageError(f"--m must be an integer > k = {k} (subcritical p = 1/m)")
    if cfg.subcommand == "freeproduct" and (cfg.m is None or cfg.m < 3):
        raise UsageError("--m must be >= 3 for Z6*Z6 (p below 0.339303)")
    if cfg.samples is not None and cfg.samples < 1:
        raise UsageError("--samples must be positive")


def _envelope(cfg: RunConfig, result, violations: list[str]) -> dict:
    config = asdict(cfg)
    # worker count never changes results, so it stays out of the hashed config
    config["extra"] = {key: v for key, v in config["extra"].items() if key != "threads"}
    config["k_resolved"] = cfg.resolved_k()
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return {
        "schema": SCHEMA,
        "tool_version": __version__,
        "subcommand": cfg.subcommand,
        "config": config,
        "seed": cfg.seed,
        "input_hash": "sha256:" + hashlib.sha256(canon.encode()).hexdigest(),
        "result": result,
        "violations": violations,
    }


def _dump(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\r\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _emit(cfg: RunConfig, doc: dict, tables: dict[str, str], stdout) -> None:
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{cfg.subcommand}.json").write_text(_dump(doc))
        for name, text in tables.items():
            (out / name).write_text(text, newline="")  # keep CRLF as written
    elif cfg.subcommand == "genfun":
        # the table is the product; JSON goes to --out
        stdout.write(tables["genfun.csv"])
    else:
        stdout.write(_dump(doc))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_dimension(cfg: RunConfig):
    k = cfg.resolved_k()
    digits = cfg.precision or 30
    certify = cfg.extra.get("certify", False)
    res = c_of_p(k, cfg.m, precision=Fraction(1, 10**digits), certify=certify,
                 denom_bound=cfg.extra.get("denom_bound", 10**6))
    body = result_to_json(res, digits=digits)
    violations = []
    if res.k1_check is False:
        violations.append("k=1 closed form disagrees with 3 - 2p - 2/(1+p)")
    summary = f"C(1/{cfg.m}) for k={k}: {mpmath.nstr(res.value_float, min(digits, 20))}"
    if res.rationality is not None:
        summary += f" [{res.rationality.kind}]"
    return body, {}, violations, summary


def cmd_genfun(cfg: RunConfig):
    k = cfg.resolved_k()
    order = cfg.order or 12
    check = cfg.extra.get("check_bruteforce", False)
    rows = coefficient_table(k, order, check_bruteforce=check, oracle_max=min(order, 8))
    ab = solve_ab(k, order, "exact")
    r1, r2 = ab.residuals()
    violations = []
    if any(r1.coeffs) or any(r2.coeffs):
        violations.append("functional-equation residual is nonzero")
    if check and not all(r.get("oracle_match", True) for r in rows):
        violations.append("g_n differs from the enumeration oracle")
    cols = ["n", "g_n", "count_n"] + (["oracle_match"] if check else [])
    table = _csv(rows, cols)
    body = {"k": k, "order": order, "rows": rows, "csv_columns": cols}
    return body, {"genfun.csv": table}, violations, f"g_n, count_n for k={k} up to n={order}"


def cmd_enumerate(cfg: RunConfig, stdout):
    k = cfg.resolved_k()
    n_max = cfg.extra.get("n_max", 4)
    cap = cfg.extra.get("cap", 10**8)
    lines = [t.encoding for t in enumerate_animals(k, n_max, cap)]
    text = "\n".join(lines) + "\n"
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "animals.txt").write_text(text)
    else:
        stdout.write(text)
    return f"{len(lines)} animals for k={k}, sizes 1..{n_max}"


def cmd_mc(cfg: RunConfig):
    k = cfg.resolved_k()
    samples = cfg.samples or 10**5
    seed = cfg.seed if cfg.seed is not None else 0
    threads = cfg.extra.get("threads") or default_threads()
    est = estimate_dimension(k, cfg.m, samples, seed, threads=threads)
    body = {
        "k": k, "m": cfg.m,
        "estimate": est.estimate, "stderr": est.stderr, "samples": samples,
        "mean_exact": str(est.mean_exact),
        "diagnostics": est.diagnostics,
    }
    tables = {}
    violations = []
    bins = cfg.extra.get("bins")
    if bins:
        h = empirical_spectral_measure(k, cfg.m, samples, bins, seed, threads=threads)
        rows = [{"bin_lo": repr(float(h.edges[i])), "bin_hi": repr(float(h.edges[i + 1])),
                 "mass": repr(float(h.masses[i]))} for i in range(bins)]
        tables["histogram.csv"] = _csv(rows, ["bin_lo", "bin_hi", "mass"])
        body["spectral"] = {"atom_at_zero": h.atom_at_zero, "atom_stderr": h.atom_stderr,
                            "total_mass": h.total_mass, "diagnostics": h.diagnostics}
        for key in ("symmetry_violations", "support_violations", "residual_violations", "kernel_mismatch"):
            if h.diagnostics[key]:
                violations.append(f"{key}: {h.diagnostics[key]}")
    return body, tables, violations, f"k={k} m={cfg.m}: {est.estimate:.6f} +/- {est.stderr:.6f}"


def cmd_freeproduct(cfg: RunConfig):
    orders = cfg.extra.get("orders", (6, 6))
    samples = cfg.samples or 10**4
    seed = cfg.seed if cfg.seed is not None else 0
    threads = cfg.extra.get("threads") or default_threads()
    crit = critical_polynomial_check()
    est = estimate_dimension_freeproduct(orders, cfg.m, samples, seed, threads=threads)
    report = {
        "critical_polynomial": {
            "roots_in_0_1": crit.roots_in_unit_interval,
            "root_interval": [str(crit.root.lo), str(crit.root.hi)],
            "ok": crit.ok,
        },
        **est.diagnostics,
    }
    violations = []
    if not crit.ok:
        violations.append("critical polynomial check failed")
    for key in ("parity_violations", "cycle_violations"):
        if est.diagnostics[key]:
            violations.append(f"{key}: {est.diagnostics[key]}")
    body = {"orders": list(orders), "m": cfg.m, "estimate": est.estimate, "stderr": est.stderr,
            "samples": samples, "mean_exact": str(est.mean_exact), "invariant_report": report}
    return body, {}, violations, f"Z{orders[0]}*Z{orders[1]} m={cfg.m}: {est.estimate:.6f} +/- {est.stderr:.6f}"


def cmd_verify(cfg: RunConfig):
    ks = cfg.extra.get("ks") or [1, 2, 3, 4, 5]
    body = {}
    violations = []
    for k in ks:
        par, anti = verify_parametrisation(k), verify_antiderivative(k)
        body[str(k)] = {
            "parametrisation": {n: str(r) for n, r in par.residuals.items()},
            "antiderivative": {n: str(r) for n, r in anti.residuals.items()},
            "ok": par.ok and anti.ok,
        }
        if not (par.ok and anti.ok):
            violations.append(f"k={k}: {par.failures() | anti.failures()}")
    return body, {}, violations, f"identities for k in {ks}: {'all zero' if not violations else 'FAILED'}"


def cmd_reproduce(cfg: RunConfig, stdout):
    from .acceptance import run_criteria, format_table

    results = run_criteria(cfg.extra.get("only"))
    if cfg.extra.get("json"):
        stdout.write(_dump({"schema": SCHEMA, "tool_version": __version__,
                            "criteria": [r.to_json() for r in results]}))
    else:
        stdout.write(format_table(results))
    return results


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_kf(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--k", type=int, help="branching number (tree degree k+1)")
    g.add_argument("--f", type=int, help="free-group rank; k = 2f - 1")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lampkernel", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("dimension", help="closed-form kernel dimension C(1/m)")
    _add_kf(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--precision", type=int, default=30, help="decimal digits")
    p.add_argument("--certify", action="store_true", help="add a rationality verdict")
    p.add_argument("--denom-bound", type=int, default=10**6)
    p.add_argument("--out")

    p = sub.add_parser("genfun", help="coefficient table of G and animal counts (CSV)")
    _add_kf(p)
    p.add_argument("--order", type=int, default=12)
    p.add_argument("--check-bruteforce", action="store_true")
    p.add_argument("--out")

    p = sub.add_parser("enumerate", help="stream animals as slot strings")
    _add_kf(p)
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--cap", type=int, default=10**8)
    p.add_argument("--out")

    p = sub.add_parser("mc", help="Monte Carlo estimate of the kernel dimension")
    _add_kf(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--samples", type=int, default=10**5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bins", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--out")

    p = sub.add_parser("freeproduct", help="Monte Carlo on Z_a * Z_b")
    p.add_argument("--orders", default="6,6")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--samples", type=int, default=10**4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int)
    p.add_argument("--out")

    p = sub.add_parser("verify", help="parametrisation and antiderivative identities")
    p.add_argument("--k", type=int, action="append", dest="ks")
    p.add_argument("--out")

    p = sub.add_parser("reproduce", help="run the acceptance criteria")
    p.add_argument("--only", action="append", help="criterion id, e.g. A1 (repeatable)")
    p.add_argument("--json", action="store_true")
    return ap


def _config_from_args(ns) -> RunConfig:
    known = {"subcommand", "k", "f", "m", "order", "samples", "seed", "precision", "out"}
    d = vars(ns)
    cfg = RunConfig(**{key: d[key] for key in known if key in d})
    cfg.extra = {key: v for key, v in d.items() if key not in known and v is not None and v is not False}
    if "orders" in cfg.extra:
        try:
            orders = tuple(int(x) for x in cfg.extra["orders"].split(","))
        except ValueError:
            raise UsageError("--orders expects two integers, e.g. 6,6")
        if len(orders) != 2 or min(orders) < 2:
            raise UsageError("--orders expects two integers >= 2")
        cfg.extra["orders"] = orders
    return cfg


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        cfg = _config_from_args(ns)
        _validate(cfg)
    except UsageError as e:
        ap.print_usage(stderr)
        stderr.write(f"lampkernel: error: {e}\n")
        return 2
    try:
        if cfg.subcommand == "enumerate":
            stderr.write(cmd_enumerate(cfg, stdout) + "\n")
            return 0
        if cfg.subcommand == "reproduce":
            results = cmd_reproduce(cfg, stdout)
            return 0 if all(r.passed for r in results) else 1
        handler = {
            "dimension": cmd_dimension,
            "genfun": cmd_genfun,
            "mc": cmd_mc,
            "freeproduct": cmd_freeproduct,
            "verify": cmd_verify,
        }[cfg.subcommand]
        body, tables, violations, summary = handler(cfg)
    except (ValueError, ArithmeticError, RuntimeError, AssertionError, AnimalCapExceeded) as e:
        stdout.write(_dump({"schema": SCHEMA, "tool_version": __version__,
                            "error": {"type": type(e).__name__, "message": str(e)}}))
        return 1
    doc = _envelope(cfg, body, violations)
    _emit(cfg, doc, tables, stdout)
    stderr.write(summary + ("" if not violations else f" ({len(violations)} violations)") + "\n")
    return 0 if not violations else 1


if __name__ == "__main__":
    sys.exit(main())
