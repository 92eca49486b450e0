"""Command line entry point: ``iprkit <command> ...``.

Exit codes: 0 on success / Forced / satisfied, 1 on Avoidable / not satisfied /
absent, 2 on usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from pathlib import Path

from . import conditions, core, families, search, systems
from .cnf import export_cnf

SCHEMA = 1


class UsageError(Exception):
    pass


def parse_seq(text: str) -> tuple[int, ...]:
    tokens = [t for t in re.split(r"[,\s]+", text.strip()) if t]
    try:
        return tuple(int(t) for t in tokens)
    except ValueError:
        raise UsageError(f"malformed integer sequence {text!r}") from None


def _read_matrix(path: str) -> core.Matrix:
    try:
        return core.parse_matrix(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _report(command: str, inputs: dict, result: dict, started: float, threads: int = 1) -> dict:
    return {
        "schema": SCHEMA,
        "command": command,
        "inputs": inputs,
        "result": result,
        "timing": {"wall_seconds": round(time.perf_counter() - started, 6)},
        "determinism": {"threads": threads, "deterministic": True},
    }


def _print_json(report: dict):
    sys.stdout.write(json.dumps(report, indent=2, sort_keys=True) + "\n")


# -- commands ----------------------------------------------------------------

def cmd_seq(args) -> int:
    x = tuple(args.values)
    if args.op == "delete-zeros":
        print(" ".join(map(str, core.delete_zeros(x))))
    elif args.op == "compress":
        print(" ".join(map(str, core.compress(x))))
    else:
        ok = core.is_compressed(x)
        print("true" if ok else "false")
        return 0 if ok else 1
    return 0


def cmd_gen(args) -> int:
    if args.what == "schur":
        A = core.schur_matrix()
    elif args.what == "vdw":
        A = core.vdw_matrix(args.n)
    else:
        kind = families.Kind.WEAK_MT if args.what == "wmt-matrix" else families.Kind.MT
        trunc = families.enumerate_rows(families.RowFamily(kind, parse_seq(args.a)), args.width, args.row_cap)
        text = core.render_matrix(trunc.matrix)
        if trunc.truncated:
            text = f"# truncated: first {trunc.matrix.u} of {trunc.total} rows\n" + text
        _emit(text, args.output)
        return 0
    _emit(core.render_matrix(A), args.output)
    return 0


def cmd_check(args) -> int:
    started = time.perf_counter()
    if args.what == "first-entries":
        A = _read_matrix(args.file)
        rep = conditions.first_entries_check(A)
        _print_json(_report("check first-entries", {"matrix": args.file}, rep.to_json(), started))
        return 0 if rep.satisfied else 1
    if args.what == "columns-condition":
        A = _read_matrix(args.file)
        cert = conditions.columns_condition_check(A)
        result = {"satisfied": cert is not None, "certificate": cert.to_json() if cert else None}
        _print_json(_report("check columns-condition", {"matrix": args.file}, result, started))
        return 0 if cert else 1
    # subtracted
    A = _read_matrix(args.matrix)
    inputs = {"matrix": args.matrix, "n": args.n, "k": args.k}
    if args.m_matrix:
        evidence = families.DeclaredM(_read_matrix(args.m_matrix))
        inputs["m_matrix"] = args.m_matrix
    elif args.evidence == "first-entries":
        evidence = families.FirstEntriesEvidence()
    elif args.evidence in ("wmt", "mt"):
        if not args.a:
            raise UsageError("--a is required for family evidence")
        kind = families.Kind.WEAK_MT if args.evidence == "wmt" else families.Kind.MT
        evidence = families.FamilyEvidence(families.RowFamily(kind, parse_seq(args.a)))
        inputs["a"] = list(parse_seq(args.a))
    else:
        if args.N is None:
            raise UsageError("--N is required for search evidence")
        evidence = families.SearchEvidence(args.N, args.r, args.xmax)
        inputs.update(N=args.N, r=args.r, xmax=args.xmax)
    inputs["evidence"] = "declared-M" if args.m_matrix else args.evidence
    finite_search = None
    if args.finite_search:
        if args.N is None:
            raise UsageError("--finite-search needs --N")
        finite_search = families.SearchEvidence(args.N, args.r, args.xmax)
        inputs["finite_search"] = True
    rep = families.validate_subtracted(A, args.n, args.k, evidence, finite_search)
    _print_json(_report("check subtracted", inputs, rep.to_json(), started))
    return 0 if rep.passed else 1


def cmd_sets(args) -> int:
    x = parse_seq(args.x)
    if args.kind_ == "subsystem":
        blocks = systems.BlockSystem.parse(args.blocks)
        fn = systems.sum_subsystem if args.kind == "sum" else systems.product_subsystem
        print(" ".join(map(str, fn(x, blocks))))
        return 0
    if args.kind_ in ("fs", "fp"):
        fn = systems.fs_set if args.kind_ == "fs" else systems.fp_set
        values = fn(x, allow_long=args.allow_long)
    else:
        if not args.a:
            raise UsageError("--a is required")
        fn = {"wmt": systems.wmt_set, "mt": systems.mt_set, "pmt": systems.pmt_set}[args.kind_]
        values = fn(parse_seq(args.a), x, allow_long=args.allow_long)
    for v in values:
        print(v)
    return 0


def _verdict_code(verdict) -> int:
    return 0 if isinstance(verdict, search.Forced) else 1


def cmd_verify(args) -> int:
    started = time.perf_counter()
    A = _read_matrix(args.matrix)
    threads = args.threads or search.default_threads()
    if args.xmax is not None and A.max_row_sum() * args.xmax < args.N:
        print(f"warning: xmax={args.xmax} is too small for images to reach N={args.N}", file=sys.stderr)
    inputs = {"matrix": args.matrix, "N": args.N, "r": args.r, "xmax": args.xmax}
    if args.deepen:
        inputs["max_N"] = args.max_N
        run = search.deepen(A, args.r, args.N, args.max_N, args.xmax, args.cap, threads)
        verdict = run.verdict
        result = search.verdict_to_json(verdict)
        result["forced_at"] = run.forced_at
        result["history"] = [{"N": n, "verdict": k} for n, k in run.history]
        text = (f"Forced at N={run.forced_at}" if run.forced_at else
                f"not forced up to N={args.max_N}: {verdict.describe()}")
    else:
        verdict = search.verify_ipr_finite(A, args.N, args.r, args.xmax, args.cap, threads)
        result = search.verdict_to_json(verdict)
        text = verdict.describe()
    if args.json:
        _print_json(_report("verify", inputs, result, started, threads))
    else:
        print(text)
        if isinstance(verdict, search.Avoidable):
            sys.stdout.write(verdict.coloring.to_text())
    return _verdict_code(verdict)


def cmd_witness(args) -> int:
    started = time.perf_counter()
    A = _read_matrix(args.matrix)
    try:
        coloring = search.Coloring.from_text(Path(args.coloring).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {args.coloring}: {exc.strerror}") from None
    found = search.find_monochromatic_witness(A, coloring, args.xmax)
    if args.json:
        result = {"found": found is not None}
        if found:
            result.update(x=list(found[0]), color=found[1])
        _print_json(_report("witness", {"matrix": args.matrix, "coloring": args.coloring}, result, started))
    elif found:
        print(f"x = {' '.join(map(str, found[0]))}  color = {found[1]}")
    else:
        print("no monochromatic image")
    return 0 if found else 1


def cmd_diagsum(args) -> int:
    blocks = [_read_matrix(p) for p in args.files]
    _emit(core.render_matrix(core.diagonal_sum(blocks)), args.output)
    return 0


def cmd_export_cnf(args) -> int:
    A = _read_matrix(args.matrix)
    images = search.enumerate_images(A, args.N, args.xmax)
    _emit(export_cnf(images, args.N, args.r).to_dimacs(), args.output)
    return 0


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="iprkit", description="Image partition regularity toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("seq", help="zero deletion and compression of sequences")
    s.add_argument("op", choices=["delete-zeros", "compress", "is-compressed"])
    s.add_argument("values", nargs="*", type=int)
    s.set_defaults(func=cmd_seq)

    g = sub.add_parser("gen", help="emit a matrix in text format")
    gs = g.add_subparsers(dest="what", required=True)
    gs.add_parser("schur")
    gv = gs.add_parser("vdw")
    gv.add_argument("--n", type=int, required=True)
    for name in ("wmt-matrix", "mt-matrix"):
        gf = gs.add_parser(name)
        gf.add_argument("--a", required=True)
        gf.add_argument("--width", type=int, required=True)
        gf.add_argument("--row-cap", type=int, default=families.DEFAULT_ROW_CAP)
    for gp in gs.choices.values():
        gp.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("check", help="first-entries, columns condition, subtracted structure")
    cs = c.add_subparsers(dest="what", required=True)
    cs.add_parser("first-entries").add_argument("file")
    cs.add_parser("columns-condition").add_argument("file")
    ct = cs.add_parser("subtracted")
    ct.add_argument("--matrix", required=True)
    ct.add_argument("--n", type=int, required=True)
    ct.add_argument("--k", type=int, required=True)
    ct.add_argument("--m-matrix")
    ct.add_argument("--evidence", choices=["first-entries", "wmt", "mt", "search"], default="first-entries")
    ct.add_argument("--a")
    ct.add_argument("--N", type=int)
    ct.add_argument("--r", type=int, default=2)
    ct.add_argument("--xmax", type=int)
    ct.add_argument("--finite-search", action="store_true")
    c.set_defaults(func=cmd_check)

    st = sub.add_parser("sets", help="finite MT / WMT / PMT / FS / FP sets and subsystems")
    ss = st.add_subparsers(dest="kind_", required=True)
    for name in ("wmt", "mt", "pmt", "fs", "fp"):
        sp = ss.add_parser(name)
        sp.add_argument("--a")
        sp.add_argument("--x", required=True)
        sp.add_argument("--allow-long", action="store_true")
    sb = ss.add_parser("subsystem")
    sb.add_argument("--kind", choices=["sum", "product"], required=True)
    sb.add_argument("--x", required=True)
    sb.add_argument("--blocks", required=True, help="1-based blocks, e.g. '1,2;3,4'")
    st.set_defaults(func=cmd_sets)

    v = sub.add_parser("verify", help="finite image partition regularity decision")
    v.add_argument("--matrix", required=True)
    v.add_argument("--N", type=int, required=True)
    v.add_argument("--r", type=int, required=True)
    v.add_argument("--xmax", type=int)
    v.add_argument("--deepen", action="store_true")
    v.add_argument("--max-N", type=int, default=40)
    v.add_argument("--cap", type=int, default=search.DEFAULT_IMAGE_CAP)
    v.add_argument("--threads", type=int)
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)

    w = sub.add_parser("witness", help="find a monochromatic image under a coloring")
    w.add_argument("--matrix", required=True)
    w.add_argument("--coloring", required=True)
    w.add_argument("--xmax", type=int)
    w.add_argument("--json", action="store_true")
    w.set_defaults(func=cmd_witness)

    d = sub.add_parser("diagsum", help="block-diagonal sum of matrix files")
    d.add_argument("files", nargs="+")
    d.add_argument("-o", "--output")
    d.set_defaults(func=cmd_diagsum)

    e = sub.add_parser("export-cnf", help="DIMACS CNF for avoiding colorings")
    e.add_argument("--matrix", required=True)
    e.add_argument("--N", type=int, required=True)
    e.add_argument("--r", type=int, required=True)
    e.add_argument("--xmax", type=int)
    e.add_argument("-o", "--output")
    e.set_defaults(func=cmd_export_cnf)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, core.MatrixFormatError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
