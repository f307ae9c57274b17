"""Command-line front end: ``wpvol compute | check | table``.

Exit status: 0 when everything passes, 1 when a check fails, 2 on usage
errors (including unstable ``(g, n)``).  Every run produces a manifest; it
is printed as a footer by ``check`` and ``table`` and written to stderr by
``compute`` so that stdout holds only the polynomial.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import asdict, dataclass, field

from .identities import intersection_numbers
from .laplace import transform
from .recursion import (
    CACHE_ENV,
    ENGINE_VERSION,
    UnstableError,
    VolumeTable,
    default_cache_path,
    is_stable,
    keys_up_to,
    volume,
)
from .render import render_latex, render_text
from .ring import format_rational
from .suites import SUITES, run_suites, summarize

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class RunManifest:
    command: str
    parameters: dict
    engine_version: str
    cache_state: str
    cache_hash: str
    results: dict = field(default_factory=dict)
    timestamp: float = field(default_factory=time.time)

    def to_json(self, with_timestamp: bool = True) -> dict:
        d = asdict(self)
        if not with_timestamp:
            d.pop("timestamp")
        return d


def _cache_hash(table: VolumeTable) -> str:
    if table.path is None or not table.path.exists():
        return "none"
    return hashlib.sha256(table.path.read_bytes()).hexdigest()


def _open_table(args) -> VolumeTable:
    if args.no_cache:
        return VolumeTable()
    return VolumeTable(args.cache_path or default_cache_path())


def _save(table: VolumeTable) -> None:
    if table.path is not None:
        try:
            table.save()
        except OSError as exc:
            print(f"warning: could not write cache {table.path}: {exc}", file=sys.stderr)


def _manifest(args, table: VolumeTable, params: dict) -> RunManifest:
    return RunManifest(args.command, params, ENGINE_VERSION, table.cache_state, _cache_hash(table))


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, default=str)


# ---------------------------------------------------------------------------
# compute
# ---------------------------------------------------------------------------


def _render(V, fmt: str, g: int, n: int, sup: bool) -> str:
    if fmt == "latex":
        return render_latex(V)
    if fmt == "json":
        return _dump({"g": g, "n": n, "super": sup, "terms": V.to_json()})
    return render_text(V)


def cmd_compute(args) -> int:
    if args.g < 0 or args.n < 1 or not is_stable(args.g, args.n):
        print("error: unstable: 2g-2+n must be positive", file=sys.stderr)
        return EXIT_USAGE
    table = _open_table(args)
    man = _manifest(args, table, {"g": args.g, "n": args.n, "super": args.super, "format": args.format})
    V = volume(args.g, args.n, args.super, table)
    _save(table)
    print(_render(V, args.format, args.g, args.n, args.super))
    man.results = {"terms": len(V.terms)}
    print(_dump({"manifest": man.to_json()}), file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


def _entry_line(e: dict) -> str:
    key = "" if e["key"] is None else "(%d,%d) " % tuple(e["key"])
    extra = ""
    if "K" in e["detail"]:
        extra = f"  K={e['detail']['K']}"
    elif "rows" in e["detail"]:
        worst = max(r["rel_err"] for r in e["detail"]["rows"])
        extra = f"  max_rel_err={worst:.2e}"
    elif "rel_err" in e["detail"]:
        extra = f"  rel_err={e['detail']['rel_err']:.2e}"
    elif e["status"] == "skipped":
        extra = f"  ({e['detail']['reason']})"
    return f"{e['status'].upper():7s} {e['suite']:10s} {key}{e['name']}  [{e['anchor']}]{extra}"


def cmd_check(args) -> int:
    if args.max_dim < 1:
        print("error: --max-dim must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    table = _open_table(args)
    man = _manifest(args, table, {"suite": args.suite, "max_dim": args.max_dim, "tol": args.tol})
    entries = run_suites(args.suite, args.max_dim, table, args.tol)
    _save(table)
    man.results = summarize(entries)
    if args.format == "json":
        print(_dump({"checks": entries, "manifest": man.to_json()}))
    else:
        for e in entries:
            print(_entry_line(e))
        s = man.results
        print(f"# {s['pass']} passed, {s['fail']} failed, {s['skipped']} skipped")
        print("# manifest " + _dump(man.to_json()))
    return EXIT_FAIL if man.results["fail"] else EXIT_OK


# ---------------------------------------------------------------------------
# table
# ---------------------------------------------------------------------------


def _volume_rows(max_dim, table, sup, fmt):
    rows = []
    for g, n in keys_up_to(max_dim):
        V = volume(g, n, sup, table)
        if fmt == "json":
            rows.append({"g": g, "n": n, "super": sup, "terms": V.to_json()})
        else:
            body = render_latex(V) if fmt == "latex" else render_text(V)
            rows.append(f"V{'su' if sup else ''}_{{{g},{n}}} = {body}")
    return rows


def _intersection_rows(max_dim, table, fmt):
    rows = []
    for g, n in keys_up_to(max_dim):
        for idx, value in intersection_numbers(g, n, table).items():
            if fmt == "json":
                rows.append({"g": g, "alphas": list(idx.alphas), "value": format_rational(value)})
            else:
                taus = " ".join(f"tau_{a}" for a in idx.alphas)
                rows.append(f"<{taus}>_{g} = {value}")
    return rows


def _laplace_rows(max_dim, table, sup, fmt):
    rows = []
    for g, n in keys_up_to(max_dim):
        if sup and g == 0:
            continue
        F = transform(g, n, sup, table)
        if fmt == "json":
            terms = {",".join(map(str, e)): c.to_canonical() for e, c in sorted(F.poly.terms.items())}
            rows.append({"g": g, "n": n, "super": sup, "terms": terms})
        else:
            names = [f"t{i + 1}" for i in range(n)]
            rows.append(f"F{'su' if sup else ''}_{{{g},{n}}} = {render_text(F.poly, names)}")
    return rows


def cmd_table(args) -> int:
    table = _open_table(args)
    params = {"kind": args.kind, "max_dim": args.max_dim, "super": args.super, "format": args.format}
    man = _manifest(args, table, params)
    if args.kind == "volumes":
        rows = _volume_rows(args.max_dim, table, args.super, args.format)
    elif args.kind == "intersections":
        rows = _intersection_rows(args.max_dim, table, args.format)
    else:
        rows = _laplace_rows(args.max_dim, table, args.super, args.format)
    _save(table)
    man.results = {"rows": len(rows)}
    if args.format == "json":
        print(_dump({"rows": rows, "manifest": man.to_json()}))
    else:
        for r in rows:
            print(r)
        print("# manifest " + _dump(man.to_json()))
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cache-path", help=f"volume cache file (default: ${CACHE_ENV} or ./wpvol_cache.json)")
    common.add_argument("--no-cache", action="store_true", help="do not read or write the cache file")

    p = argparse.ArgumentParser(prog="wpvol", description="Exact Weil-Petersson and super volumes over Q[pi^2].")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", parents=[common], help="print one volume polynomial")
    c.add_argument("--g", type=int, required=True)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--super", action="store_true", help="super volume instead of the ordinary one")
    c.add_argument("--format", choices=("text", "latex", "json"), default="text")
    c.set_defaults(func=cmd_compute)

    k = sub.add_parser("check", parents=[common], help="run verification suites")
    k.add_argument("--suite", choices=("all",) + SUITES, default="all")
    k.add_argument("--max-dim", type=int, default=5, help="include keys with 3g-3+n <= D (default 5)")
    k.add_argument("--tol", type=float, default=1e-8, help="relative tolerance for quadrature checks")
    k.add_argument("--format", choices=("text", "json"), default="text")
    k.set_defaults(func=cmd_check)

    t = sub.add_parser("table", parents=[common], help="emit a table of volumes, intersections or transforms")
    t.add_argument("kind", choices=("volumes", "intersections", "laplace"))
    t.add_argument("--max-dim", type=int, default=2)
    t.add_argument("--super", action="store_true")
    t.add_argument("--format", choices=("text", "latex", "json"), default="text")
    t.set_defaults(func=cmd_table)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "table" and args.kind == "laplace" and args.format == "latex":
        parser.error("laplace tables support text and json only")
    try:
        return args.func(args)
    except UnstableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
