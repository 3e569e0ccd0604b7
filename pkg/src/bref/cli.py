"""Command-line front end.

Subcommands cover every experiment: ``chsh``, ``mermin``, ``scan``, ``fit``,
``peres`` and ``povm``.  Output is deterministic (floats printed with 12
significant digits, fixed field order) so identical invocations produce
byte-identical CSV/JSON bodies.  The expensive scan keeps an on-disk cache of
finished rows; ``--resume`` skips rows already cached.

Exit codes: 0 success, 1 violation not found (soft condition), 2 usage or
parse error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import os
import sys
import tempfile
from pathlib import Path
from typing import Any, Iterable, Sequence

from .angular import HalfInt
from .bell import chained_chsh_parity, chsh_pair, mermin_value, mermin_value_numeric
from .correlations import (
    UNBOUNDED,
    FrameSize,
    pair_correlation_analytic,
    pair_correlation_numeric,
)
from .errors import DimensionTooLarge, InvalidSpin, ParseError
from .measurements import Povm, bounded_povm
from .search import NotFoundBelowCap, ScanRecord, maximize_chained_chsh, minimal_rf_scan, quadratic_fit
from .states import Direction

__all__ = ["main"]

log = logging.getLogger("bref")

ENV_CACHE_DIR = "BREF_CACHE_DIR"
DEFAULT_CACHE_DIR = ".bref-cache"

SCAN_CSV_HEADER = "two_js,two_jrf_min,delta_theta_opt,s_max"

_MERMIN_NUMERIC_MAX = 20


def fmt(x: float) -> str:
    """12-significant-digit decimal rendering used for all emitted floats."""
    return f"{x:.12g}"


def _json_float(x: float) -> float:
    return float(fmt(x))


def parse_half_int(text: str, name: str) -> HalfInt:
    """Accepts '5/2', '2.5' or '3'; anything else is a ParseError."""
    try:
        return HalfInt.of(text)
    except InvalidSpin as exc:
        raise ParseError(f"{name}: {text!r} is not a half-integer") from exc


def parse_frame(text: str, name: str) -> FrameSize:
    if text.strip().lower() in ("inf", "unbounded"):
        return UNBOUNDED
    return parse_half_int(text, name)


def resolve_cache_dir(flag: str | None) -> Path:
    if flag:
        return Path(flag)
    env = os.environ.get(ENV_CACHE_DIR)
    if env:
        return Path(env)
    return Path(DEFAULT_CACHE_DIR)


def cache_key(command: str, params: dict[str, Any]) -> str:
    canon = json.dumps({"command": command, "params": params},
                       sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def cache_get(cache_dir: Path, key: str) -> dict[str, Any] | None:
    path = cache_dir / f"{key}.json"
    try:
        with path.open("r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        return None
    except json.JSONDecodeError:
        return None


def cache_put(cache_dir: Path, key: str, payload: dict[str, Any]) -> None:
    """Write-temp-then-rename so concurrent writers never expose torn files."""
    cache_dir.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=cache_dir, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(payload, fh)
        os.replace(tmp, cache_dir / f"{key}.json")
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _write_lines(path: str | None, lines: Iterable[str]) -> None:
    fh, close = _open_out(path)
    try:
        for line in lines:
            fh.write(line + "\n")
    finally:
        if close:
            fh.close()


def povm_json_dict(povm: Povm, j_rf: HalfInt, direction: Direction) -> dict[str, Any]:
    """JSON form of a POVM: two_j_rf, two_j_s, theta, phi, outcomes with
    complex matrices as nested [re, im] pairs."""
    outcomes = []
    for m, op in povm.outcomes:
        matrix = [
            [[_json_float(z.real), _json_float(z.imag)] for z in row]
            for row in op.tolist()
        ]
        outcomes.append({"two_m": m.twice, "matrix": matrix})
    return {
        "two_j_rf": j_rf.twice,
        "two_j_s": povm.j_s.twice,
        "theta": _json_float(direction.theta),
        "phi": _json_float(direction.phi),
        "outcomes": outcomes,
    }


def _report(pairs: Sequence[tuple[str, Any]], as_json: bool) -> None:
    if as_json:
        obj = {k: (_json_float(v) if isinstance(v, float) else v) for k, v in pairs}
        print(json.dumps(obj))
        return
    parts = []
    for key, value in pairs:
        if isinstance(value, float):
            parts.append(f"{key}={fmt(value)}")
        elif isinstance(value, bool):
            parts.append(f"{key}={'true' if value else 'false'}")
        else:
            parts.append(f"{key}={value}")
    print(" ".join(parts))


def cmd_chsh(args: argparse.Namespace) -> int:
    j1 = parse_half_int(args.j1, "--j1")
    j2 = parse_half_int(args.j2, "--j2")
    res = chsh_pair(j1, j2)
    _report([("j1", str(j1)), ("j2", str(j2)), ("value", res.value),
             ("bound", res.bound), ("violated", res.violated)], args.json)
    if args.curve:
        k = args.curve
        if k < 2:
            raise ParseError("--curve needs at least 2 points")
        lines = ["theta,E_analytic,E_numeric"]
        for i in range(k):
            theta = math.pi * i / (k - 1)
            ea = pair_correlation_analytic(j1, j2, theta)
            en = pair_correlation_numeric(j1, j2, theta)
            lines.append(f"{fmt(theta)},{fmt(ea)},{fmt(en)}")
        _write_lines(args.out, lines)
    return 0 if res.violated else 1


def cmd_mermin(args: argparse.Namespace) -> int:
    if args.frames:
        frames = [parse_frame(tok, "--frames") for tok in args.frames.split(",") if tok]
        if not frames:
            raise ParseError("--frames list is empty")
    else:
        if args.n is None or args.j is None:
            raise ParseError("give either --frames or both --n and --j")
        if args.n < 1:
            raise ParseError("--n must be positive")
        frames = [parse_frame(args.j, "--j")] * args.n
    n = len(frames)
    if any(f is UNBOUNDED for f in frames):
        if n > _MERMIN_NUMERIC_MAX:
            raise DimensionTooLarge(
                f"numeric path capped at {_MERMIN_NUMERIC_MAX} parties, got {n}")
        res = mermin_value_numeric(frames)
        path = "numeric"
    else:
        res = mermin_value(n, frames)
        path = "analytic"
    _report([("n", n), ("value", res.value), ("bound", res.bound),
             ("violated", res.violated), ("path", path)], args.json)
    return 0 if res.violated else 1


def _default_cap(j_s: HalfInt) -> HalfInt:
    # 20 j_s^2 + 50, comfortably above the fitted boundary.
    return HalfInt(10 * j_s.twice * j_s.twice + 100)


def _scan_row(j_s: HalfInt, cap: HalfInt, cache_dir: Path,
              resume: bool) -> dict[str, Any]:
    params = {"two_js": j_s.twice, "two_jrf_cap": cap.twice}
    key = cache_key("scan_row", params)
    if resume:
        hit = cache_get(cache_dir, key)
        if hit is not None:
            log.info("row 2j_s=%d: cached", j_s.twice)
            return hit
    try:
        rec = minimal_rf_scan(j_s, cap)
        payload: dict[str, Any] = {
            "two_js": rec.two_j_s,
            "two_jrf_min": rec.two_j_rf_min,
            "delta_theta_opt": rec.delta_theta_opt,
            "s_max": rec.s_max,
        }
    except NotFoundBelowCap as miss:
        payload = {
            "two_js": j_s.twice,
            "two_jrf_min": None,
            "delta_theta_opt": None,
            "s_max": None,
            "best_s": miss.best_s,
        }
    cache_put(cache_dir, key, payload)
    return payload


def _scan_csv_line(row: dict[str, Any]) -> str:
    if row["two_jrf_min"] is None:
        return f"{row['two_js']},,,"
    return (f"{row['two_js']},{row['two_jrf_min']},"
            f"{fmt(row['delta_theta_opt'])},{fmt(row['s_max'])}")


def cmd_scan(args: argparse.Namespace) -> int:
    js_max = parse_half_int(args.js_max, "--js-max")
    if js_max.twice < 1:
        raise ParseError("--js-max must be at least 1/2")
    cache_dir = resolve_cache_dir(args.cache_dir)
    fixed_cap = parse_half_int(args.cap, "--cap") if args.cap else None
    rows = []
    missing = 0
    for twice in range(1, js_max.twice + 1):
        j_s = HalfInt(twice)
        cap = fixed_cap if fixed_cap is not None else _default_cap(j_s)
        row = _scan_row(j_s, cap, cache_dir, args.resume)
        if row["two_jrf_min"] is None:
            missing += 1
            log.warning("row 2j_s=%d: no violation below cap (best S = %s)",
                        twice, fmt(row.get("best_s", float("nan"))))
        rows.append(row)
    lines = [SCAN_CSV_HEADER] + [_scan_csv_line(r) for r in rows]
    _write_lines(args.out, lines)
    return 1 if missing else 0


def _read_scan_csv(path: str) -> list[ScanRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != SCAN_CSV_HEADER:
            raise ParseError(f"unexpected scan CSV header: {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            two_js, two_jrf_min, dt, smax = line.split(",")
            if two_jrf_min == "":
                continue
            records.append(ScanRecord(
                two_j_s=int(two_js), two_j_rf_min=int(two_jrf_min),
                delta_theta_opt=float(dt), s_max=float(smax)))
    return records


def cmd_fit(args: argparse.Namespace) -> int:
    records = _read_scan_csv(args.infile)
    fit = quadratic_fit(records)
    pairs: list[tuple[str, Any]] = [
        ("a", fit.a), ("b", fit.b), ("rms_residual", fit.rms_residual)]
    if fit.cubic_coeff is not None:
        pairs.append(("cubic", fit.cubic_coeff))
    _report(pairs, args.json)
    return 0


def cmd_peres(args: argparse.Namespace) -> int:
    j_s = parse_half_int(args.js, "--js")
    j_rf = parse_frame(args.jrf, "--jrf")
    if args.optimize:
        dtheta, value = maximize_chained_chsh(j_s, j_rf)
        res = chained_chsh_parity(j_s, j_rf, dtheta)
        value = max(value, res.value)
    else:
        if args.dtheta is None:
            raise ParseError("give either --dtheta or --optimize")
        dtheta = args.dtheta
        if not 0.0 <= dtheta <= math.pi / 3.0:
            raise ParseError(f"--dtheta must lie in [0, pi/3], got {dtheta}")
        value = chained_chsh_parity(j_s, j_rf, dtheta).value
    violated = value > 2.0 + 1e-9
    _report([("js", str(j_s)), ("jrf", "inf" if j_rf is UNBOUNDED else str(j_rf)),
             ("dtheta", dtheta), ("value", value), ("bound", 2.0),
             ("violated", violated)], args.json)
    return 0 if violated else 1


def cmd_povm(args: argparse.Namespace) -> int:
    j_rf = parse_half_int(args.jrf, "--jrf")
    j_s = parse_half_int(args.js, "--js")
    if not 0.0 <= args.theta <= math.pi:
        raise ParseError(f"--theta must lie in [0, pi], got {args.theta}")
    direction = Direction(args.theta, args.phi)
    povm = bounded_povm(j_rf, j_s, direction)
    doc = povm_json_dict(povm, j_rf, direction)
    _write_lines(args.out, [json.dumps(doc)])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bref",
        description="Bell tests with bounded spin-coherent-state reference frames")
    parser.add_argument("--cache-dir", default=None,
                        help=f"result cache directory (default: ${ENV_CACHE_DIR} "
                             f"or {DEFAULT_CACHE_DIR})")
    parser.add_argument("-q", "--quiet", action="store_true",
                        help="suppress per-row progress lines")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("chsh", help="CHSH value for a pair of frame spins")
    p.add_argument("--j1", required=True, help="first frame spin (e.g. 5/2)")
    p.add_argument("--j2", required=True, help="second frame spin")
    p.add_argument("--curve", type=int, metavar="K",
                   help="emit K-row CSV of (theta, E_analytic, E_numeric)")
    p.add_argument("--out", default=None, help="CSV output path (default stdout)")
    p.add_argument("--json", action="store_true", help="report as JSON")
    p.set_defaults(func=cmd_chsh)

    p = sub.add_parser("mermin", help="Mermin expression for N frames")
    p.add_argument("--frames", default=None,
                   help="comma list of frame spins; 'inf' for classical frames")
    p.add_argument("--n", type=int, default=None, help="number of parties")
    p.add_argument("--j", default=None, help="common frame spin")
    p.add_argument("--json", action="store_true", help="report as JSON")
    p.set_defaults(func=cmd_mermin)

    p = sub.add_parser("scan", help="minimal frame size per system spin (CSV)")
    p.add_argument("--js-max", required=True, help="largest system spin")
    p.add_argument("--out", required=True, help="CSV output path ('-' for stdout)")
    p.add_argument("--resume", action="store_true",
                   help="reuse cached rows instead of recomputing")
    p.add_argument("--cap", default=None,
                   help="frame-size cap (default 20 j_s^2 + 50)")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("fit", help="quadratic fit of a scan CSV")
    p.add_argument("--in", dest="infile", required=True, help="scan CSV path")
    p.add_argument("--json", action="store_true", help="report as JSON")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("peres", help="chained CHSH for parity measurements")
    p.add_argument("--js", required=True, help="system spin")
    p.add_argument("--jrf", required=True, help="frame spin or 'inf'")
    p.add_argument("--dtheta", type=float, default=None, help="angle step")
    p.add_argument("--optimize", action="store_true",
                   help="maximize over the angle step")
    p.add_argument("--json", action="store_true", help="report as JSON")
    p.set_defaults(func=cmd_peres)

    p = sub.add_parser("povm", help="serialize a relational POVM to JSON")
    p.add_argument("--jrf", required=True, help="frame spin")
    p.add_argument("--js", required=True, help="system spin")
    p.add_argument("--theta", type=float, default=0.0, help="frame polar angle")
    p.add_argument("--phi", type=float, default=0.0, help="frame azimuth")
    p.add_argument("--out", default=None, help="JSON output path (default stdout)")
    p.set_defaults(func=cmd_povm)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr,
                        level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ParseError, InvalidSpin, DimensionTooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
