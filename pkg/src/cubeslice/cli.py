"""Command-line interface.

Exit codes: 0 success, 1 a claim was violated or verification failed,
2 malformed input.  ``CUBESLICE_THREADS`` overrides ``--threads``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

from . import __version__
from .constructions import MapClass, spec_from_json, verify
from .errors import CapacityError, ConstraintViolation, InvalidPattern, NoIntersectionError, ParseError, StoreError
from .intersect import AffineMap, IntersectionReport, count_intersection, parse_point
from .knapsack import KnapsackInstance, count_knapsack
from .linalg import format_rational, parse_matrix_text, parse_rational, parse_vector_text
from .patterns import (
    AchievabilityTable,
    Pattern,
    achievable_table,
    check_gap_property,
    realizable,
    scan_conjecture_large,
    scan_conjecture_small,
)
from .store import WitnessStore, update_store

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

TABLE_CSV_COLUMNS = ("t", "status", "source", "detail")
COUNT_CSV_COLUMNS = ("k", "m", "count", "is_isometry", "is_contraction", "gap_class")


def _threads(args) -> int:
    env = os.environ.get("CUBESLICE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, getattr(args, "threads", 1) or 1)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _csv(rows, columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([r.get(c, "") for c in columns])
    return buf.getvalue()


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def report_json(rep: IntersectionReport) -> dict:
    out = {
        "version": 1,
        "k": rep.k,
        "m": rep.m,
        "count": rep.count,
        "is_isometry": rep.is_isometry,
        "is_contraction": rep.is_contraction,
        "gap_class": rep.gap_class.value,
    }
    if rep.witnesses is not None:
        out["witnesses"] = rep.witness_strings()
    return out


def table_text(table: AchievabilityTable) -> str:
    lines = [f"k = {table.k}, class = {table.cls.value}"]
    for e in table.entries:
        extra = f"  ({e.detail})" if e.detail else ""
        lines.append(f"{e.t:>5}  {e.status.value:<10}  {e.source}{extra}")
    return "\n".join(lines) + "\n"


# -- commands -----------------------------------------------------------------


def cmd_count(args) -> int:
    L = parse_matrix_text(_read(args.matrix), source=args.matrix)
    c = parse_vector_text(_read(args.offset), source=args.offset) if args.offset else ()
    rep = count_intersection(AffineMap(L, c), args.witnesses, workers=_threads(args))
    data = report_json(rep)
    if args.format == "json":
        print(_dump(data))
    elif args.format == "csv":
        print(_csv([data], COUNT_CSV_COLUMNS), end="")
    else:
        print(f"t = {rep.count}  (k = {rep.k}, m = {rep.m}, {rep.gap_class.value})")
        print(f"isometry: {rep.is_isometry}  contraction: {rep.is_contraction}")
        if rep.witnesses is not None:
            print("witnesses: " + " ".join(rep.witness_strings()))
    return EXIT_OK


def cmd_table(args) -> int:
    table = achievable_table(args.k, args.cls, args.budget, _threads(args))
    if args.store:
        store = WitnessStore.load(args.store)
        for e in list(table.entries):
            hit = store.get(args.k, args.cls, e.t)
            if hit is not None:
                table.absorb(e.t, hit.matrix, hit.provenance)
        update_store(args.store, table)
    if args.format == "json":
        print(_dump(table.to_json()))
    elif args.format == "csv":
        print(_csv([e.to_json() for e in table.entries], TABLE_CSV_COLUMNS), end="")
    else:
        print(table_text(table), end="")
    return EXIT_OK


def cmd_check_theorem(args) -> int:
    cls = MapClass.GENERAL if args.theorem == "gap" else MapClass.CONTRACTION
    if cls is MapClass.GENERAL and args.k <= 2:
        print(f"note: gap property is vacuous for k={args.k}")
    rep = check_gap_property(args.k, cls, args.samples, args.seed, args.distribution)
    print(
        f"{args.theorem}: k={rep.k} samples={rep.samples} seed={rep.seed} bound={rep.bound} "
        f"violations={len(rep.violations)}"
    )
    for L, t in rep.violations:
        print(f"VIOLATION t = {t}")
        print(L.to_text(), end="")
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_construct(args) -> int:
    raw = _read(args.spec[1:]) if args.spec.startswith("@") else args.spec
    try:
        spec = spec_from_json(raw)
    except (json.JSONDecodeError, TypeError) as exc:
        raise ConstraintViolation(f"bad construction spec: {exc}") from None
    amap, claim = spec.build()
    ok = verify(spec)
    sidecar = {
        "version": 1,
        "spec": spec.to_json(),
        "claim": {"t": claim.t, "k": claim.k, "n": claim.n, "class": claim.cls.value},
        "offset": [format_rational(x) for x in amap.c],
        "verified": ok,
    }
    if args.out:
        Path(args.out + ".matrix").write_text(amap.L.to_text(), encoding="utf-8")
        Path(args.out + ".claim.json").write_text(_dump(sidecar) + "\n", encoding="utf-8")
    else:
        print(amap.L.to_text(), end="")
    print(_dump(sidecar))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_realizable(args) -> int:
    T = Pattern.from_hex(args.k, args.pattern)
    basis = [parse_point(b, args.k) for b in args.basis] if args.basis else None
    res = realizable(T, basis)
    print(_dump(res.to_json()))
    return EXIT_OK


def cmd_scan(args) -> int:
    if args.which == "large":
        rep = scan_conjecture_large(args.k, args.budget)
        rep["witnesses"] = {str(t): w for t, w in rep["witnesses"].items()}
    else:
        rep = scan_conjecture_small(args.k, args.budget)
    print(_dump(rep))
    return EXIT_OK


def cmd_knapsack(args) -> int:
    try:
        weights = [parse_rational(w) for w in args.weights.split(",") if w.strip()]
        q = parse_rational(args.target)
    except ValueError as exc:
        raise ParseError(str(exc), 1, 1, "--weights/--target") from None
    inst = KnapsackInstance(weights, q)
    out = {"count": count_knapsack(inst), "l": len(weights), "q": format_rational(q)}
    if inst.warnings:
        out["warnings"] = inst.warnings
    print(_dump(out))
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cubeslice", description="Exact hypercube/subspace intersection counts.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, formats=True):
        sp.add_argument("--threads", type=int, default=1)
        if formats:
            sp.add_argument("--format", choices=("json", "csv", "human"), default="human")

    sp = sub.add_parser("count", help="count cube points mapped into the cube")
    sp.add_argument("matrix")
    sp.add_argument("offset", nargs="?")
    sp.add_argument("--witnesses", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("table", help="achievability table for one k and map class")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--class", dest="cls", choices=[c.value for c in MapClass], default="general")
    sp.add_argument("--budget", type=int, default=None)
    sp.add_argument("--store", default=None)
    common(sp)
    sp.set_defaults(func=cmd_table)

    sp = sub.add_parser("check-theorem", help="random-map check of a gap theorem")
    sp.add_argument("theorem", choices=("gap", "contraction-gap"))
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--distribution", choices=("default", "near-boolean", "mixed"), default="mixed")
    common(sp, formats=False)
    sp.set_defaults(func=cmd_check_theorem)

    sp = sub.add_parser("construct", help="build and verify a gallery construction")
    sp.add_argument("spec", help='JSON object such as {"variant": "AllOnes", "k": 4}, or @file')
    sp.add_argument("--out", default=None, help="write PREFIX.matrix and PREFIX.claim.json")
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("realizable", help="decide whether a pattern is a linear trace")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--pattern", required=True, help="hex bitmask over the 2^k cube points")
    sp.add_argument("--basis", nargs="*", help="basis points as digit strings v_1...v_k")
    sp.set_defaults(func=cmd_realizable)

    sp = sub.add_parser("scan", help="conjecture scanners")
    sp.add_argument("which", choices=("large", "small"))
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--budget", type=int, default=None)
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("knapsack", help="count 0/1 knapsack solutions")
    sp.add_argument("--weights", required=True, help="comma-separated rationals")
    sp.add_argument("--target", required=True)
    sp.set_defaults(func=cmd_knapsack)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InvalidPattern, ConstraintViolation, NoIntersectionError, CapacityError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except StoreError as exc:
        print(f"store error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
