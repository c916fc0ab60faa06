"""Command-line front end.

Exit codes: 0 success, 1 usage or input-format error, 2 verification failure.
All computations are deterministic; identical flags give identical bytes on
stdout or in output files, regardless of thread count.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .algebra import (
    ExponentMatrix,
    check_bh_equivalence,
    fourier_exponents,
    fully_normalize,
    is_difference_matrix,
    is_prime,
    matrices_from_text,
    matrices_to_text,
    matrix_to_text,
)
from .orders import builtin_order, canonical_kind
from .parallel import (
    ParallelConfig,
    default_divide,
    profile_orders,
    profile_to_csv,
    run_parallel,
)
from .plane import (
    build_incidence,
    canonical_frame,
    elation_symmetry,
    extract_exponent_matrix,
    plane_to_text,
    symmetry_preserves_incidence,
    verify_plane_axioms,
)
from .search import count_prefixes, enumerate_solutions, with_transposes

USAGE_ERROR = 1
VERIFY_ERROR = 2


class UsageError(Exception):
    pass


def _parse_index(text: str) -> tuple[int, int]:
    try:
        i, j = (int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"expected an index of the form r,s, got {text!r}") from None
    return i, j


def _check_prime(p: int) -> int:
    if not is_prime(p) or p > 31:
        raise UsageError(f"p must be a prime <= 31, got {p}")
    return p


def _write_output(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="ascii")


def _read_matrices(path: str) -> list[ExponentMatrix]:
    try:
        text = Path(path).read_text(encoding="ascii")
        matrices = matrices_from_text(text)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise UsageError(f"malformed matrix file {path}: {exc}") from exc
    if not matrices:
        raise UsageError(f"no matrix records in {path}")
    return matrices


def cmd_enumerate(args: argparse.Namespace) -> int:
    p = _check_prime(args.p)
    prune = not args.no_prune
    if p >= 17 and not args.long:
        raise UsageError(
            f"a full classification at p={p} is a cluster-scale computation; "
            "pass --long to run it anyway"
        )
    if p <= 3 or (args.threads == 1 and not args.checkpoint):
        solutions, _ = enumerate_solutions(p, None if p == 2 else builtin_order(args.order, p),
                                           transpose_pruning=prune)
    else:
        order = builtin_order(args.order, p)
        divide = _parse_index(args.divide) if args.divide else default_divide(p, order)
        config = ParallelConfig(
            p, order, divide,
            workers=args.threads, transpose_pruning=prune,
            checkpoint_path=args.checkpoint,
        )
        solutions, _ = run_parallel(config)
    final = with_transposes(solutions)
    _write_output(matrices_to_text(final), args.out)
    return 0


def cmd_count(args: argparse.Namespace) -> int:
    p = _check_prime(args.p)
    order = builtin_order(args.order, p)
    until = _parse_index(args.until)
    if until not in order:
        raise UsageError(f"{until} is not a core index for p={p}")
    n = count_prefixes(p, order, until, transpose_pruning=not args.no_prune)
    sys.stdout.write(f"{n}\n")
    return 0


def cmd_profile(args: argparse.Namespace) -> int:
    p = _check_prime(args.p)
    kinds = [canonical_kind(k) for k in args.orders.split(",")]
    max_index = _parse_index(args.max_index) if args.max_index else None
    rows = profile_orders(p, kinds, max_index, transpose_pruning=not args.no_prune)
    _write_output(profile_to_csv(rows), args.out)
    return 0


def cmd_normalize(args: argparse.Namespace) -> int:
    matrices = _read_matrices(args.input)
    out = []
    for k, m in enumerate(matrices):
        if not is_difference_matrix(m):
            sys.stderr.write(f"matrix {k}: not a difference matrix; cannot normalize\n")
            return VERIFY_ERROR
        normalized, _ = fully_normalize(m)
        out.append(normalized)
    _write_output(matrices_to_text(out), args.out)
    return 0


def cmd_plane(args: argparse.Namespace) -> int:
    checks = args.check.split(",") if args.check != "all" else ["axioms", "symmetry", "roundtrip"]
    unknown = set(checks) - {"axioms", "symmetry", "roundtrip"}
    if unknown:
        raise UsageError(f"unknown checks: {sorted(unknown)}")
    if args.source:
        matrices = _read_matrices(args.source)
    else:
        p = _check_prime(args.p)
        matrices = [fourier_exponents(p)]
    failed = False
    exported = []
    for k, m in enumerate(matrices):
        try:
            plane = build_incidence(m)
        except ValueError as exc:
            sys.stdout.write(f"matrix {k}: cannot build a plane: {exc}\n")
            failed = True
            continue
        exported.append(plane)
        lines = [f"matrix {k}: plane of order {plane.n} with {plane.size} points/lines"]
        if "axioms" in checks:
            report = verify_plane_axioms(plane)
            lines.append("  axioms: " + ("PASS" if report.ok else "FAIL"))
            if not report.ok:
                lines.append("    " + report.as_text().replace("\n", "\n    ").rstrip())
                failed = True
        if "symmetry" in checks:
            ok = symmetry_preserves_incidence(plane, elation_symmetry(plane.n))
            lines.append("  shift symmetry: " + ("PASS" if ok else "FAIL"))
            failed |= not ok
        if "roundtrip" in checks:
            try:
                extracted = extract_exponent_matrix(canonical_frame(plane))
                ok = extracted == m
            except ValueError:
                ok = False
            lines.append("  exponent round trip: " + ("PASS" if ok else "FAIL"))
            failed |= not ok
        sys.stdout.write("\n".join(lines) + "\n")
    if args.out:
        Path(args.out).write_text("".join(plane_to_text(q) for q in exported), encoding="ascii")
    return VERIFY_ERROR if failed else 0


def cmd_verify(args: argparse.Namespace) -> int:
    matrices = _read_matrices(args.input)
    failed = False
    for k, m in enumerate(matrices):
        diff = is_difference_matrix(m)
        bh = check_bh_equivalence(m)
        ok = diff and bh
        sys.stdout.write(f"matrix {k}: {'OK' if ok else 'FAIL'}\n")
        failed |= not ok
    return VERIFY_ERROR if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="butson",
        description="Classify difference matrices over F_p and their projective planes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    enum = sub.add_parser("enumerate", help="classify all fully normalized matrices")
    enum.add_argument("--p", type=int, required=True)
    enum.add_argument("--order", default="H", help="traversal order: D, D2 or H")
    enum.add_argument("--threads", type=int, default=1)
    enum.add_argument("--divide", default=None, help="dividing index r,s for the parallel driver")
    enum.add_argument("--no-prune", action="store_true", help="disable the transpose reduction")
    enum.add_argument("--checkpoint", default=None, help="prefix shard file for resumable runs")
    enum.add_argument("--long", action="store_true", help="allow cluster-scale p (>= 17)")
    enum.add_argument("--out", default=None)
    enum.set_defaults(fn=cmd_enumerate)

    count = sub.add_parser("count", help="count surviving prefixes through an index")
    count.add_argument("--p", type=int, required=True)
    count.add_argument("--order", default="H")
    count.add_argument("--until", required=True, help="index r,s")
    count.add_argument("--no-prune", action="store_true")
    count.set_defaults(fn=cmd_count)

    prof = sub.add_parser("profile", help="per-index prefix counts and timings, as CSV")
    prof.add_argument("--p", type=int, required=True)
    prof.add_argument("--orders", default="D,D2,H")
    prof.add_argument("--max-index", default=None, help="profile indices up to r,s")
    prof.add_argument("--no-prune", action="store_true")
    prof.add_argument("--out", default=None)
    prof.set_defaults(fn=cmd_profile)

    norm = sub.add_parser("normalize", help="fully normalize difference matrices")
    norm.add_argument("--in", dest="input", required=True)
    norm.add_argument("--out", default=None)
    norm.set_defaults(fn=cmd_normalize)

    plane = sub.add_parser("plane", help="build the incidence plane and verify it")
    plane.add_argument("--p", type=int, default=None)
    plane.add_argument("--from", dest="source", default=None, help="matrix record file")
    plane.add_argument("--check", default="all", help="all, or comma list of axioms,symmetry,roundtrip")
    plane.add_argument("--out", default=None, help="write the incidence matrix text here")
    plane.set_defaults(fn=cmd_plane)

    ver = sub.add_parser("verify", help="test matrix records for the defining property")
    ver.add_argument("--in", dest="input", required=True)
    ver.set_defaults(fn=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else USAGE_ERROR
        return 0 if code == 0 else USAGE_ERROR
    if args.fn is cmd_plane and args.source is None and args.p is None:
        sys.stderr.write("error: plane needs --p or --from\n")
        return USAGE_ERROR
    try:
        return args.fn(args)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return USAGE_ERROR
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return USAGE_ERROR
    except RuntimeError as exc:
        # worker failures and accounting mismatches: some prefixes unprocessed
        sys.stderr.write(f"error: {exc}\n")
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
