"""Command-line front end: read a problem file, run a classifier, print a report.

    warpedhardy hardy problem.json
    warpedhardy interval problem.json --format table
    warpedhardy surface problem.json --out report.json
    warpedhardy sweep grid.json

Exit codes: 0 success, 2 invalid input, 3 quadrature failure (the report is
still written, with Unknown verdicts).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Any, Optional

from .core import (
    DEFAULT_TOL,
    INF,
    DomainError,
    Interval,
    Orientation,
    OutOfScope,
    Tolerances,
    TolFailure,
    WarpedHardyError,
    make_exponents,
)
from .cylinder import CylinderSpec, classify_cylinder
from .hardy import (
    DegenerateTestFunction,
    HardyProblem,
    WitnessNotFound,
    divergence_witness,
    extremal_ratio,
    hardy_constant,
)
from .interval_cohom import classify_interval, safe_chi
from .surface import SurfaceSpec, classify_surface
from .symfun import GrammarError, MultiTermPower, parse_symfun

SCHEMA_VERSION = "1"
EXIT_OK, EXIT_INVALID, EXIT_TOLERANCE = 0, 2, 3

COMMON = {"schema_version", "kind", "tolerances"}
FIELDS = {
    "hardy": COMMON | {"p", "q", "v0", "v1", "interval", "orientation"},
    "interval": COMMON | {"p", "q", "v0", "v1", "interval"},
    "cylinder": COMMON | {"p", "q", "f", "interval", "n", "j", "assertions"},
    "surface": COMMON | {"p", "q", "f", "n", "j"},
    "sweep": COMMON | {"p", "q", "alpha", "n", "j"},
}
REQUIRED = {
    "hardy": {"p", "q", "v0", "v1", "interval"},
    "interval": {"p", "q", "v0", "v1", "interval"},
    "cylinder": {"p", "q", "f", "interval", "n", "j"},
    "surface": {"p", "q", "f", "n", "j"},
    "sweep": {"p", "alpha", "n"},
}
COMMAND_KINDS = {
    "hardy": ("hardy",),
    "oracle": ("hardy",),
    "interval": ("interval", "hardy"),
    "cylinder": ("cylinder",),
    "surface": ("surface",),
    "sweep": ("sweep",),
}


class InputError(WarpedHardyError):
    """Invalid problem file; the message names the failing field."""


# -- parsing ---------------------------------------------------------------------


def _number(data: dict, key: str) -> float | Fraction:
    v = data[key]
    if isinstance(v, bool) or not isinstance(v, (int, float, str)):
        raise InputError(f"field '{key}': expected a number, got {v!r}")
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError):
            raise InputError(f"field '{key}': cannot read {v!r} as a number") from None
    return v


def _integer(data: dict, key: str, minimum: int = 1) -> int:
    v = data[key]
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise InputError(f"field '{key}': expected an integer >= {minimum}, got {v!r}")
    return v


def _endpoint(v: Any, key: str) -> float:
    if isinstance(v, str) and v.strip().lower() in ("inf", "+inf", "infinity"):
        return INF
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InputError(f"field '{key}': expected a number or \"inf\", got {v!r}")
    return float(v)


def _interval(data: dict, orientation: Orientation = Orientation.FORWARD) -> Interval:
    iv = data["interval"]
    if not isinstance(iv, list) or len(iv) != 2:
        raise InputError("field 'interval': expected [lo, hi] with hi a number or \"inf\"")
    try:
        return Interval(_endpoint(iv[0], "interval[0]"), _endpoint(iv[1], "interval[1]"), orientation)
    except DomainError as exc:
        raise InputError(f"field 'interval': {exc}") from None


def _tolerances(data: dict, args: argparse.Namespace) -> Tolerances:
    tol = DEFAULT_TOL
    over = data.get("tolerances") or {}
    if not isinstance(over, dict):
        raise InputError("field 'tolerances': expected an object")
    allowed = {"rel_tol", "abs_tol", "max_doublings", "divergence_growth", "sup_grid_points"}
    for k in over:
        if k not in allowed:
            raise InputError(f"field 'tolerances.{k}': unknown tolerance")
    if args.tol is not None:
        over = {**over, "rel_tol": args.tol}
    if args.max_doublings is not None:
        over = {**over, "max_doublings": args.max_doublings}
    try:
        return replace(tol, **over)
    except (TypeError, ValueError) as exc:
        raise InputError(f"field 'tolerances': {exc}") from None


def _function(data: dict, key: str, domain: Interval):
    text = data[key]
    if not isinstance(text, str):
        raise InputError(f"field '{key}': expected a function string")
    try:
        return parse_symfun(text, domain)
    except (GrammarError, DomainError) as exc:
        raise InputError(f"field '{key}': {exc}") from None


def _exponents(data: dict, q_default=None):
    q = data.get("q", q_default)
    try:
        return make_exponents(_number(data, "p"), q if not isinstance(q, str) else Fraction(q))
    except OutOfScope as exc:
        raise InputError(f"fields 'p', 'q': {exc}") from None


def load_problem(path: str, command: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise InputError("problem file must hold a JSON object")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise InputError(f"field 'schema_version': expected \"{SCHEMA_VERSION}\", got {version!r}")
    kind = data.get("kind", COMMAND_KINDS[command][0])
    if kind not in COMMAND_KINDS[command]:
        raise InputError(f"field 'kind': {kind!r} cannot be run with '{command}'")
    unknown = sorted(set(data) - FIELDS[kind])
    if unknown:
        raise InputError(f"field '{unknown[0]}': not allowed for kind '{kind}'")
    missing = sorted(REQUIRED[kind] - set(data))
    if missing:
        raise InputError(f"field '{missing[0]}': required for kind '{kind}'")
    return {**data, "kind": kind}


def hardy_problem(data: dict, orientation: Orientation | None = None) -> HardyProblem:
    if orientation is None:
        name = data.get("orientation", "forward")
        try:
            orientation = Orientation(name)
        except ValueError:
            raise InputError(f"field 'orientation': expected 'forward' or 'reversed', got {name!r}") from None
    iv = _interval(data, orientation)
    dom = iv.forward()
    return HardyProblem(_exponents(data), iv, _function(data, "v0", dom), _function(data, "v1", dom))


# -- report formatting ----------------------------------------------------------------


def clean(obj: Any) -> Any:
    """JSON-ready copy with floats at 12 significant digits and infinities as strings."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if hasattr(obj, "item"):
        obj = obj.item()
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return float(f"{obj:.12g}")
    if hasattr(obj, "value"):
        return clean(obj.value)
    return str(obj)


def render(report: dict, fmt: str) -> str:
    report = clean(report)
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    lines: list[str] = []
    if "rows" in report:
        rows = report["rows"]
        cols = list(dict.fromkeys(k for r in rows for k in r))
        lines.append("\t".join(cols))
        lines += ["\t".join(str(r.get(c, "")) for c in cols) for r in rows]
        return "\n".join(lines) + "\n"

    def walk(prefix: str, v: Any):
        if isinstance(v, dict):
            for k, sub in v.items():
                walk(f"{prefix}.{k}" if prefix else k, sub)
        elif isinstance(v, list) and v and isinstance(v[0], (dict, list)):
            lines.append(f"{prefix}\t[{len(v)} items]")
        else:
            lines.append(f"{prefix}\t{json.dumps(v)}")

    walk("", report)
    return "\n".join(lines) + "\n"


def _has_quadrature_failure(obj: Any) -> bool:
    if isinstance(obj, dict):
        note = obj.get("note")
        if isinstance(note, str) and note.startswith("quadrature failed"):
            return True
        return any(_has_quadrature_failure(v) for v in obj.values())
    if isinstance(obj, (list, tuple)):
        return any(_has_quadrature_failure(v) for v in obj)
    return False


# -- commands ---------------------------------------------------------------------------


@dataclass
class Outcome:
    report: dict
    profile: tuple = ()


def run_hardy(data: dict, tol: Tolerances) -> Outcome:
    pr = hardy_problem(data)
    res = hardy_constant(pr, tol)
    fwd = hardy_problem(data, Orientation.FORWARD)
    other = safe_chi(fwd.with_interval(fwd.interval.reversed()) if pr.forward else fwd, tol)
    chi_fwd, chi_bwd = (res, other) if pr.forward else (other, res)
    report = {
        "chi": res.as_dict(),
        "chi_forward": chi_fwd.as_dict(),
        "chi_backward": chi_bwd.as_dict(),
        "verdicts": {},
    }
    return Outcome(report, res.profile)


def run_oracle(data: dict, tol: Tolerances) -> Outcome:
    pr = hardy_problem(data)
    res = hardy_constant(pr, tol)
    report: dict = {"chi": res.as_dict()}
    if res.chi.is_divergent:
        try:
            report["witness"] = divergence_witness(pr, tol).as_dict()
        except WitnessNotFound as exc:
            report["witness"] = {"not_found": str(exc)}
    elif res.chi.is_finite and pr.exps.sup_form and isinstance(res.argmax_tau, float):
        try:
            report["extremal_ratio"] = {"tau": res.argmax_tau, "ratio": extremal_ratio(pr, res.argmax_tau, tol)}
        except (DegenerateTestFunction, DomainError) as exc:
            report["extremal_ratio"] = {"not_available": str(exc)}
    report["verdicts"] = {}
    return Outcome(report, res.profile)


def run_interval(data: dict, tol: Tolerances) -> Outcome:
    rep = classify_interval(hardy_problem(data, Orientation.FORWARD), tol)
    d = rep.as_dict()
    verdicts = {k: d.pop(k) for k in (
        "h1_relative", "h1_absolute", "h1bar_absolute", "h1bar_relative", "torsion_absolute", "torsion_relative")}
    report = {
        "chi_forward": d.pop("chi_forward"),
        "chi_backward": d.pop("chi_backward"),
        "verdicts": verdicts,
        **d,
    }
    return Outcome(report, rep.chi_forward.profile)


def run_cylinder(data: dict, tol: Tolerances) -> Outcome:
    iv = _interval(data)
    assertions = data.get("assertions") or {}
    if not isinstance(assertions, dict) or set(assertions) - {"fiber_pairing_nontrivial"}:
        raise InputError("field 'assertions': only 'fiber_pairing_nontrivial' is recognised")
    flag = assertions.get("fiber_pairing_nontrivial", False)
    if not isinstance(flag, bool):
        raise InputError("field 'assertions.fiber_pairing_nontrivial': expected true or false")
    try:
        spec = CylinderSpec(_function(data, "f", iv), iv, _integer(data, "n"), _integer(data, "j"),
                            _exponents(data), flag)
        rep = classify_cylinder(spec, tol)
    except DomainError as exc:
        raise InputError(f"fields 'n', 'j': {exc}") from None
    except MultiTermPower as exc:
        raise InputError(f"field 'f': {exc}") from None
    d = rep.as_dict()
    report = {
        "chi_forward": d.pop("chi_forward"),
        "chi_backward": d.pop("chi_backward"),
        "verdicts": {"hj_relative": d.pop("hj_relative"), "torsion": d.pop("torsion")},
        **d,
    }
    return Outcome(report, rep.chi_forward.profile if rep.chi_forward else ())


def _surface_spec(data: dict) -> SurfaceSpec:
    f = _function(data, "f", Interval(0.0))
    try:
        return SurfaceSpec(f, _integer(data, "n"), _integer(data, "j"), _exponents(data))
    except DomainError as exc:
        raise InputError(f"fields 'f', 'n', 'j': {exc}") from None


def run_surface(data: dict, tol: Tolerances) -> Outcome:
    rep = classify_surface(_surface_spec(data), tol)
    d = rep.as_dict()
    report = {
        "chi_forward": d.pop("chi0"),
        "chi_backward": d.pop("chi_inf"),
        "verdicts": {"torsion_j": d.pop("torsion_j"), "torsion_all_degrees": d.pop("torsion_all_degrees")},
        **d,
    }
    return Outcome(report, rep.chi0.profile)


def _as_list(v: Any, key: str) -> list:
    if v is None:
        return []
    return v if isinstance(v, list) else [v]


def sweep_cells(data: dict) -> list[dict]:
    ps = _as_list(data["p"], "p")
    qs = data.get("q", "same")
    alphas = _as_list(data["alpha"], "alpha")
    n = _integer(data, "n")
    js = _as_list(data.get("j", [1, n + 1]), "j")
    cells = []
    for p in ps:
        for q in ([p] if qs == "same" else _as_list(qs, "q")):
            for a in alphas:
                for j in js:
                    cells.append({"p": p, "q": q, "alpha": a, "n": n, "j": j})
    return cells


def sweep_row(cell: dict, tol: Tolerances) -> dict:
    row: dict = dict(cell)
    row["profile"] = f"(t+1)^{cell['alpha']}"
    try:
        exps = make_exponents(cell["p"], cell["q"])
        f = parse_symfun(f"(t+1)^{cell['alpha']}", Interval(0.0))
        rep = classify_surface(SurfaceSpec(f, cell["n"], cell["j"], exps), tol)
    except OutOfScope as exc:
        row.update(status="OutOfScope", reason=str(exc))
        return row
    except (WarpedHardyError, ValueError) as exc:
        row.update(status="Error", reason=f"{type(exc).__name__}: {exc}")
        return row
    row.update(
        status="ok",
        chi0=rep.chi0.chi.tag.value,
        chi_inf=rep.chi_inf.chi.tag.value,
        f_limit=rep.f_limit.value,
        volume=rep.volume.tag.value,
        torsion_j=rep.torsion_j.status.value,
        torsion_j_rule=rep.torsion_j.rule,
        torsion_all_degrees=rep.torsion_all_degrees.status.value,
        torsion_all_rule=rep.torsion_all_degrees.rule,
    )
    return row


def run_sweep(data: dict, tol: Tolerances, jobs: int = 1) -> Outcome:
    cells = sweep_cells(data)
    if jobs > 1 and len(cells) > 1:
        from concurrent.futures import ProcessPoolExecutor
        from functools import partial

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(partial(sweep_row, tol=tol), cells))
    else:
        rows = [sweep_row(c, tol) for c in cells]
    return Outcome({"rows": rows})


RUNNERS = {
    "hardy": run_hardy,
    "oracle": run_oracle,
    "interval": run_interval,
    "cylinder": run_cylinder,
    "surface": run_surface,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="warpedhardy", description="Weighted Hardy constants and L_{p,q}-cohomology verdicts.")
    ap.add_argument("command", choices=sorted(COMMAND_KINDS))
    ap.add_argument("input", help="problem file (JSON)")
    ap.add_argument("--out", help="write the report here instead of stdout")
    ap.add_argument("--emit-profile", metavar="PATH", help="write tau,profile_value samples as CSV")
    ap.add_argument("--tol", type=float, help="relative tolerance override")
    ap.add_argument("--max-doublings", type=int, help="cutoff doubling budget override")
    ap.add_argument("--format", choices=("json", "table"), default="json")
    ap.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker processes for sweep")
    return ap


def _write(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_profile(path: str, samples) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["tau", "profile_value"])
        for tau, val in samples:
            w.writerow([f"{tau:.12g}", f"{val:.12g}"])


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    code = EXIT_OK
    try:
        data = load_problem(args.input, args.command)
        tol = _tolerances(data, args)
        echo = {k: data[k] for k in sorted(data)}
        if args.command == "sweep":
            out = run_sweep(data, tol, args.jobs)
        else:
            out = RUNNERS[args.command](data, tol)
    except InputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    except TolFailure as exc:
        report = {"input": echo, "error": str(exc), "evidence": exc.evidence, "verdicts": {}}
        _write(render(report, args.format), args.out)
        return EXIT_TOLERANCE
    report = {"input": echo, "command": args.command, **out.report}
    if _has_quadrature_failure(report):
        code = EXIT_TOLERANCE
    if args.emit_profile:
        _write_profile(args.emit_profile, out.profile)
        report["profile_csv"] = args.emit_profile
    _write(render(report, args.format), args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
