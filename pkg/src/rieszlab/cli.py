"""Command line front end: ``means``, ``verify`` and ``report``.

Exit codes: 0 success (all checks pass), 1 some check failed, 2 usage,
parse or evaluation error, 3 some check inconclusive and none failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import (ConvergenceError, DomainError, EvaluationError, InvalidArgumentError,
                     SingularDerivativeError)
from .hardy import MEAN_TOL, MeansTable, integral_mean
from .maps import (BoundarySamples, DiskAnalytic, FourierHarmonic, HolomorphicPolynomial,
                   MapSpec, PlanarHarmonic, PluriharmonicPair, SharpnessExample,
                   ShearCounterexample, coordinate, hyperbolic_poisson_extend, poisson_extend)
from .quadrature import sphere_rule
from .verify import SUITES, SuiteConfig, VerificationReport, run_suite, suite_verdict

EXIT_OK, EXIT_FAIL, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2, 3
REPORT_FIELDS = ("section", "check", "parameters", "lhs", "rhs", "margin", "err", "verdict")


class MapSpecError(ValueError):
    """Malformed map specification."""


# --------------------------------------------------------------------------
# map specifications


def _complex(v, where: str) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(t, (int, float)) for t in v):
        return complex(float(v[0]), float(v[1]))
    raise MapSpecError(f"{where}: expected a number or an [re, im] pair, got {v!r}")


def _complex_list(v, where: str) -> np.ndarray:
    if not isinstance(v, list):
        raise MapSpecError(f"{where}: expected a list")
    return np.array([_complex(t, f"{where}[{i}]") for i, t in enumerate(v)], dtype=complex)


def _real_list(v, where: str) -> np.ndarray:
    if not isinstance(v, list) or not all(isinstance(t, (int, float)) for t in v):
        raise MapSpecError(f"{where}: expected a list of real numbers")
    return np.asarray(v, dtype=float)


def _number(spec: dict, key: str, default=None) -> float:
    if key not in spec:
        if default is None:
            raise MapSpecError(f"missing field {key!r}")
        return default
    v = spec[key]
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise MapSpecError(f"field {key!r} must be a number")
    return float(v)


def _polynomial(spec, n: int, where: str) -> HolomorphicPolynomial:
    """Components as lists of ``{"exponent": [...], "coeff": [re, im]}`` terms."""
    if not isinstance(spec, list) or len(spec) != n:
        raise MapSpecError(f"{where}: expected {n} components")
    comps = []
    for k, terms in enumerate(spec):
        c = {}
        for t, term in enumerate(terms):
            if not isinstance(term, dict) or "exponent" not in term or "coeff" not in term:
                raise MapSpecError(f"{where}[{k}][{t}]: expected {{'exponent', 'coeff'}}")
            e = term["exponent"]
            if not (isinstance(e, list) and len(e) == n and all(isinstance(i, int) and i >= 0 for i in e)):
                raise MapSpecError(f"{where}[{k}][{t}]: exponent must be {n} non-negative integers")
            c[tuple(e)] = c.get(tuple(e), 0) + _complex(term["coeff"], f"{where}[{k}][{t}].coeff")
        comps.append(c)
    return HolomorphicPolynomial(n, tuple(comps))


def _boundary(spec, n: int):
    """Boundary data: real polynomial terms in ``zeta`` or sphere samples."""
    if not isinstance(spec, dict):
        raise MapSpecError("boundary: expected an object")
    if "samples" in spec:
        s = spec["samples"]
        try:
            return BoundarySamples(np.asarray(s["nodes"], dtype=float), np.asarray(s["values"], dtype=float))
        except (KeyError, TypeError, ValueError) as exc:
            raise MapSpecError(f"boundary.samples: {exc}") from exc
    if "polynomial" in spec:
        comps = spec["polynomial"]
        if not isinstance(comps, list) or not comps:
            raise MapSpecError("boundary.polynomial: expected a non-empty list of components")
        terms = []
        for k, comp in enumerate(comps):
            row = []
            for t, term in enumerate(comp):
                e = term.get("exponent") if isinstance(term, dict) else None
                if not (isinstance(e, list) and len(e) == n and all(isinstance(i, int) and i >= 0 for i in e)):
                    raise MapSpecError(f"boundary.polynomial[{k}][{t}]: bad exponent")
                row.append((np.asarray(e), _number(term, "coeff")))
            terms.append(row)

        def phi(z, terms=terms):
            return np.column_stack([sum(c * np.prod(z ** e, axis=1) for e, c in row) + 0.0 * z[:, 0]
                                    for row in terms])
        return phi
    raise MapSpecError("boundary: expected 'polynomial' or 'samples'")


def parse_map_spec(spec: dict) -> MapSpec:
    """Build a map from a decoded specification (see ``docs/mapspec.md``)."""
    if not isinstance(spec, dict) or "variant" not in spec:
        raise MapSpecError("map specification must be an object with a 'variant' field")
    kind = spec["variant"]
    try:
        if kind == "DiskAnalytic":
            return DiskAnalytic(_complex_list(spec.get("coeffs"), "coeffs"))
        if kind == "PlanarHarmonic":
            return PlanarHarmonic(_complex_list(spec.get("h"), "h"), _complex_list(spec.get("g", [0]), "g"))
        if kind == "FourierHarmonic":
            return FourierHarmonic(_real_list(spec.get("a"), "a"), _real_list(spec.get("b", [0.0]), "b"))
        if kind == "SharpnessExample":
            return SharpnessExample(_number(spec, "K"))
        if kind == "ShearCounterexample":
            return ShearCounterexample(_number(spec, "kappa"))
        if kind == "Identity":
            n = int(_number(spec, "n", 1.0))
            h = HolomorphicPolynomial.identity(n)
            return PluriharmonicPair(h, HolomorphicPolynomial.linear(np.zeros((n, n))))
        if kind == "PluriharmonicPair":
            n = int(_number(spec, "n"))
            h = _polynomial(spec.get("h"), n, "h")
            g = _polynomial(spec["g"], n, "g") if "g" in spec else HolomorphicPolynomial.linear(np.zeros((n, n)))
            return PluriharmonicPair(h, g)
        if kind in ("HarmonicExtension", "InvariantHarmonicExtension"):
            n = int(_number(spec, "n"))
            level = int(_number(spec, "level")) if "level" in spec else None
            phi = _boundary(spec.get("boundary"), n)
            extend = poisson_extend if kind == "HarmonicExtension" else hyperbolic_poisson_extend
            return extend(phi, n, rule_level=level)
    except (InvalidArgumentError, DomainError) as exc:
        raise MapSpecError(f"{kind}: {exc}") from exc
    raise MapSpecError(f"unknown variant {kind!r}")


def load_map_spec(path) -> MapSpec:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise MapSpecError(f"cannot read map specification {str(path)!r}: {exc.strerror}") from exc
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MapSpecError(f"{path}: invalid JSON ({exc})") from exc
    try:
        return parse_map_spec(spec)
    except MapSpecError as exc:
        raise MapSpecError(f"{path}: {exc}") from exc


# --------------------------------------------------------------------------
# output helpers


def write_atomic(path, text: str) -> None:
    """Write-then-rename so that readers never see a partial file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _stamp(enabled: bool) -> str:
    if not enabled:
        return ""
    return f"# generated {datetime.now(timezone.utc).isoformat(timespec='seconds')}\n"


def _emit(text: str, out) -> None:
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _floats(s: str, name: str) -> tuple:
    try:
        return tuple(float(t) for t in s.split(",") if t.strip())
    except ValueError:
        raise InvalidArgumentError(f"--{name}: expected comma-separated numbers, got {s!r}") from None


def _section(check: str) -> str:
    return check.split(".")[0]


def summary_csv(records, stamp: bool = True) -> str:
    """One row per record, grouped by section (the part of the check name before any dot)."""
    buf = io.StringIO()
    buf.write(_stamp(stamp))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_FIELDS)
    for rec in sorted(records, key=lambda r: (_section(r["check_name"]), r["check_name"])):
        w.writerow([_section(rec["check_name"]), rec["check_name"],
                    json.dumps(rec["parameters"], sort_keys=True),
                    repr(rec["lhs"]), repr(rec["rhs"]), repr(rec["margin"]), repr(rec["err"]),
                    rec["verdict"]])
    return buf.getvalue()


def report_document(records, stamp: bool = True) -> str:
    doc = {"reports": records}
    if stamp:
        doc = {"generated": datetime.now(timezone.utc).isoformat(timespec="seconds"), **doc}
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


def record_key(rec: dict) -> str:
    return rec["check_name"] + json.dumps(rec["parameters"], sort_keys=True)


# --------------------------------------------------------------------------
# commands


def cmd_means(args) -> int:
    f = load_map_spec(args.map)
    if args.coordinate is not None:
        f = coordinate(f, args.coordinate)
    ps = _floats(args.p, "p")
    rs = _floats(args.r, "r")
    if not ps or not rs:
        raise InvalidArgumentError("--p and --r need at least one value")
    rule = sphere_rule(f.domain_dim, args.level) if args.level is not None else None
    tol = args.tolerance if args.tolerance is not None else MEAN_TOL
    table = MeansTable()
    for r in rs:
        for p in ps:
            if rule is None:
                table.add(r, p, *integral_mean(f, r, p, tol=tol))
            else:
                table.add(r, p, *integral_mean(f, r, p, rule))
    _emit(_stamp(args.timestamp == "on") + table.to_csv(), args.out)
    return EXIT_OK


def _suite_config(args) -> SuiteConfig:
    kw = {"seed": args.seed}
    if args.p is not None:
        kw["p_list"] = _floats(args.p, "p")
    if args.r is not None:
        kw["r_grid"] = _floats(args.r, "r")
    if args.K is not None:
        kw["K_list"] = _floats(args.K, "K")
    if args.kappa is not None:
        kw["kappa"] = args.kappa
    if args.level is not None:
        kw["level"] = args.level
    if args.tolerance is not None:
        kw["tolerance"] = args.tolerance
    if args.coordinate is not None:
        kw["coordinate"] = args.coordinate
    if args.map is not None:
        kw["map"] = load_map_spec(args.map)
        kw["map_label"] = Path(args.map).stem
    return SuiteConfig(args.suite, **kw)


def cmd_verify(args) -> int:
    if args.suite not in SUITES:
        raise InvalidArgumentError(f"unknown suite {args.suite!r}; expected one of {', '.join(SUITES)}")
    reports = run_suite(_suite_config(args))
    records = [r.to_record() for r in reports]
    stamp = args.timestamp == "on"
    if args.out and str(args.out).endswith(".csv"):
        _emit(summary_csv(records, stamp), args.out)
    elif args.out:
        _emit(report_document(records, stamp), args.out)
    else:
        sys.stdout.write(summary_csv(records, stamp))
    verdict = suite_verdict(reports)
    print(f"{args.suite}: {len(reports)} checks, verdict {verdict}", file=sys.stderr)
    return {"pass": EXIT_OK, "fail": EXIT_FAIL, "inconclusive": EXIT_INCONCLUSIVE}[verdict]


def load_report(path) -> list:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise InvalidArgumentError(f"cannot read report {str(path)!r}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"{path}: invalid JSON ({exc})") from exc
    recs = doc.get("reports") if isinstance(doc, dict) else None
    if not isinstance(recs, list):
        raise InvalidArgumentError(f"{path}: expected an object with a 'reports' list")
    fields = set(VerificationReport.__dataclass_fields__)
    for rec in recs:
        if not isinstance(rec, dict) or not fields <= set(rec):
            raise InvalidArgumentError(f"{path}: malformed record {rec!r:.80}")
    return recs


def merge_reports(paths) -> list:
    merged: dict[str, dict] = {}
    for path in paths:
        for rec in load_report(path):
            key = record_key(rec)
            if key in merged and merged[key] != rec:
                raise InvalidArgumentError(f"conflicting records for {key}")
            merged[key] = rec
    return list(merged.values())


def cmd_report(args) -> int:
    records = merge_reports(args.reports)
    _emit(summary_csv(records, args.timestamp == "on"), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rieszlab", description="Integral means and inequality checks for harmonic maps.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output path (default: standard output)")
        p.add_argument("--timestamp", choices=("on", "off"), default="on",
                       help="write a '# generated' line (off for reproducible artifacts)")

    m = sub.add_parser("means", help="table of integral means M_p(r, f)")
    m.add_argument("--map", required=True, help="map specification file (JSON)")
    m.add_argument("--p", required=True, help="comma-separated exponents")
    m.add_argument("--r", required=True, help="comma-separated radii in [0, 1)")
    m.add_argument("--coordinate", type=int, help="use the k-th real coordinate (1-based)")
    m.add_argument("--level", type=int, help="fixed sphere rule level instead of adaptive refinement")
    m.add_argument("--tolerance", type=float, help="relative tolerance of the adaptive means")
    common(m)
    m.set_defaults(func=cmd_means)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", required=True, help=f"one of {', '.join(SUITES)}")
    v.add_argument("--map", help="map specification used instead of the suite's families")
    v.add_argument("--p", help="comma-separated exponents")
    v.add_argument("--r", help="comma-separated radii")
    v.add_argument("--K", help="comma-separated dilatations (sharpness, cor_1_2)")
    v.add_argument("--kappa", type=float, help="second dilatation bound")
    v.add_argument("--coordinate", type=int, help="coordinate index (1-based)")
    v.add_argument("--seed", type=lambda s: int(s, 0), default=0x5EED, help="random seed (default 0x5EED)")
    v.add_argument("--level", type=int, help="boundary rule level for extensions")
    v.add_argument("--tolerance", type=float, help="suite tolerance override")
    common(v)
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("report", help="merge report documents into a summary CSV")
    r.add_argument("reports", nargs="*", help="report documents written by 'verify --out X.json'")
    common(r)
    r.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (MapSpecError, InvalidArgumentError, DomainError, EvaluationError, ConvergenceError,
            SingularDerivativeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
