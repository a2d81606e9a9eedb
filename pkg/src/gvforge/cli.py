"""Command-line front end.

Subcommands: bounds (rate-bound sweeps), construct (emit a code file),
verify (re-check a code file), certify (parameter certificate at q), and
tower (class-field-tower criterion for a discriminant).

Exit codes: 0 success, 1 argument or domain error, 2 failed or undecidable
check, 3 capacity refusal. Given identical arguments (including --seed) the
output bytes are identical.
"""

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import bounds as bd
from . import enclosure as enc
from . import lenstra as ln
from . import numtheory as nt
from . import quadfield as qf
from .errors import (CapacityError, ConditionFailure, DomainError,
                     GvforgeError, IndeterminateError)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CHECK = 2
EXIT_CAPACITY = 3


@dataclass(frozen=True)
class RunConfig:
    """Global options; same config (seed included) means same output bytes."""

    command: str
    seed: Optional[int]
    threads: int
    sieve_limit: Optional[int]
    output: Optional[str]

    @classmethod
    def from_args(cls, args):
        return cls(command=args.command, seed=args.seed, threads=args.threads,
                   sieve_limit=args.sieve_limit,
                   output=getattr(args, "output", None))


def _fraction(text: str) -> Fraction:
    try:
        if "/" in text:
            return Fraction(text)
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError("bad rational %r" % text)


def _delta_grid(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("grid must be start:stop:step")
    start, stop, step = (_fraction(p) for p in parts)
    if step <= 0 or start > stop:
        raise argparse.ArgumentTypeError("need start <= stop and step > 0")
    out = []
    v = start
    while v <= stop:
        out.append(v)
        v += step
    return out


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; remap to the documented code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print("error: %s" % message, file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="gvforge",
        description="codes from quadratic-field lattices and certified rate bounds")
    p.add_argument("--seed", type=int, default=None,
                   help="determinism token recorded in the run config")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="worker threads for pairwise scans")
    p.add_argument("--sieve-limit", type=int, default=None,
                   help="cap on sieve size (default: GVFORGE_SIEVE_LIMIT or 2^32)")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bounds", help="rate-bound sweep to CSV or JSON")
    b.add_argument("--q", type=int, action="append", required=True,
                   help="alphabet size (repeatable)")
    b.add_argument("--delta", type=_fraction, action="append", default=None,
                   help="relative distance (repeatable)")
    b.add_argument("--delta-grid", type=_delta_grid, default=None,
                   help="start:stop:step over relative distances")
    b.add_argument("--budget", type=int, default=6,
                   help="witness search budget (eps halvings)")
    b.add_argument("--format", choices=("csv", "json"), default="csv")
    b.add_argument("--output", default=None)

    c = sub.add_parser("construct", help="build a code file from a field")
    c.add_argument("--disc", type=int, required=True)
    c.add_argument("--factors", default=None,
                   help="comma-separated prime divisors of disc (for large disc)")
    c.add_argument("--r", type=int, required=True)
    c.add_argument("--q", type=int, required=True)
    c.add_argument("--G", type=int, required=True)
    c.add_argument("--grid", type=int, default=64,
                   help="initial translate-search grid")
    c.add_argument("--max-grid", type=int, default=1024)
    c.add_argument("--output", default=None,
                   help="code file path (default: stdout)")

    v = sub.add_parser("verify", help="re-check a code file")
    v.add_argument("path")

    t = sub.add_parser("certify", help="parameter certificate at q")
    t.add_argument("--q", type=int, required=True)
    t.add_argument("--schedule", choices=("theorem2", "theorem1"),
                   default="theorem2")
    t.add_argument("--C0", type=_fraction, default=None,
                   help="leading constant for the theorem1 schedule")
    t.add_argument("--format", choices=("json", "text"), default="json")
    t.add_argument("--output", default=None)

    w = sub.add_parser("tower", help="class-field-tower criterion")
    w.add_argument("--disc", type=int, required=True)
    w.add_argument("--factors", default=None,
                   help="comma-separated prime divisors of disc")
    w.add_argument("--sc-size", type=int, default=0)
    w.add_argument("--genus-only", action="store_true",
                   help="use the genus lower bound even when the exact "
                        "class group is in reach")
    return p


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w") as fp:
            fp.write(text)
    else:
        sys.stdout.write(text)


def _parse_factors(text: Optional[str]):
    if text is None:
        return None
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise DomainError("bad --factors list %r" % text)


def cmd_bounds(args, cfg: RunConfig) -> int:
    deltas = []
    if args.delta:
        deltas.extend(args.delta)
    if args.delta_grid:
        deltas.extend(args.delta_grid)
    if not deltas:
        raise DomainError("provide --delta or --delta-grid")
    rows = []
    for q in args.q:
        for d in deltas:
            pt = bd.bound_point(q, d, budget=args.budget)
            w = pt.witness
            rows.append({
                "q": q,
                "delta": "%s" % float(d),
                "gv": enc.fmt(pt.gv, 15),
                "plotkin": enc.fmt(pt.plotkin, 15),
                "nfc": enc.fmt(pt.nfc, 15) if pt.nfc is not None else "",
                "r": w.r if w else "",
                "ell": w.ell if w else "",
                "k": w.k if w else "",
            })
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()),
                                lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        _emit(buf.getvalue(), args.output)
    else:
        _emit(json.dumps(rows, indent=2) + "\n", args.output)
    return EXIT_OK


def cmd_construct(args, cfg: RunConfig) -> int:
    K = qf.make_field(args.disc, prime_divisors=_parse_factors(args.factors))
    code = ln.build_code(K, args.r, args.q, args.G,
                         start_grid=args.grid, max_grid=args.max_grid,
                         seed=cfg.seed)
    text = ln.format_code_file(code)
    summary = ("n=%d M=%d d_bound=%d target=%d\n"
               % (code.n, len(code.codewords), code.n + 1 - code.G,
                  ln.minkowski_target(code.r, code.G, abs(code.disc))))
    if args.output:
        _emit(text, args.output)
        sys.stdout.write(summary)
    else:
        sys.stdout.write(text)
        sys.stderr.write(summary)
    return EXIT_OK


def cmd_verify(args, cfg: RunConfig) -> int:
    code = ln.read_code_file(args.path)
    bad_symbol = None
    for i, w in enumerate(code.codewords):
        for s in w:
            if not 0 <= s < code.q:
                bad_symbol = (i, s)
                break
        if bad_symbol:
            break
    check = ln.verify_code(code, threads=cfg.threads)
    required_d = code.n + 1 - code.G
    ok = check.ok and bad_symbol is None
    print("M=%d d=%d n=%d" % (check.M, check.d, code.n))
    print("required: M >= %d, d >= %d, injective, symbols in [0, %d)"
          % (check.min_target, required_d, code.q))
    if bad_symbol is not None:
        print("fail: word %d has symbol %d outside [0, %d)"
              % (bad_symbol[0], bad_symbol[1], code.q))
    if not check.injective:
        print("fail: duplicate codewords (M=%d of %d rows)"
              % (check.M, len(code.codewords)))
    if check.d < required_d and check.worst_pair is not None:
        print("fail: words %d and %d at distance %d < %d"
              % (check.worst_pair[0], check.worst_pair[1], check.d, required_d))
    if check.M < check.min_target:
        print("fail: M=%d below the volume target %d" % (check.M, check.min_target))
    print("ok" if ok else "FAILED")
    return EXIT_OK if ok else EXIT_CHECK


def _certificate_text(cert) -> str:
    lines = ["q=%d schedule=%s overall=%s" % (cert.q, cert.schedule, cert.overall)]
    if cert.witness:
        w = cert.witness
        lines.append("witness: r=%d ell=%d k=%d Nq=%d" % (w.r, w.ell, w.k, w.Nq))
    for c in cert.checks:
        lines.append("%-40s %-13s lhs=%s rhs=%s margin=%s width=%s"
                     % (c.name, c.status, c.lhs, c.rhs, c.margin, c.width))
    return "\n".join(lines) + "\n"


def cmd_certify(args, cfg: RunConfig) -> int:
    if args.schedule == "theorem1" and args.C0 is None:
        raise DomainError("--schedule theorem1 requires --C0")
    cert = bd.certify(args.q, schedule=args.schedule, C0=args.C0)
    if args.format == "json":
        _emit(json.dumps(cert.as_dict(), indent=2) + "\n", args.output)
    else:
        _emit(_certificate_text(cert), args.output)
    if cert.overall == enc.PASS:
        return EXIT_OK
    return EXIT_CHECK


def cmd_tower(args, cfg: RunConfig) -> int:
    K = qf.make_field(args.disc, prime_divisors=_parse_factors(args.factors))
    if not args.genus_only and K.disc < 0 and -K.disc <= qf.CLASS_GROUP_CAP:
        summary = qf.class_group_imaginary(K)
        d2, d2_kind = summary.two_rank, "exact (h=%d)" % summary.h
    else:
        d2, d2_kind = qf.genus_two_rank_lower(K), "genus lower bound"
    cert = qf.golod_shafarevich_check(K, d2, args.sc_size)
    print("disc=%d d2=%d (%s) S_c=%d" % (K.disc, d2, d2_kind, args.sc_size))
    print("threshold: 2 + 2*sqrt(%d) = %s (width %s)"
          % (args.sc_size + K.archimedean_places + 1,
             enc.fmt(cert.threshold, 12), enc.fmt_width(cert.threshold)))
    print("tower certified" if cert.passes else "criterion FAILED")
    return EXIT_OK if cert.passes else EXIT_CHECK


_DISPATCH = {
    "bounds": cmd_bounds,
    "construct": cmd_construct,
    "verify": cmd_verify,
    "certify": cmd_certify,
    "tower": cmd_tower,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.sieve_limit is not None:
        nt.set_sieve_cap(args.sieve_limit)
    if args.threads is not None and args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        return _DISPATCH[args.command](args, RunConfig.from_args(args))
    except (DomainError, FileNotFoundError) as e:
        print("error: %s" % e, file=sys.stderr)
        return EXIT_USAGE
    except (ConditionFailure, IndeterminateError) as e:
        print("check failed: %s" % e, file=sys.stderr)
        return EXIT_CHECK
    except CapacityError as e:
        print("capacity: %s" % e, file=sys.stderr)
        return EXIT_CAPACITY


if __name__ == "__main__":
    sys.exit(main())
