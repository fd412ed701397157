"""Command-line entry point: ``nontidy <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction

from nontidy.cohomology import sw_height
from nontidy.crystal import (
    coindex_one_witness,
    find_odd_involution,
    replay_certificate,
    torsion_free_certificate,
)
from nontidy.pipeline import FORMATS, MODES, PipelineConfig, emit_report, run_pipeline
from nontidy.simplicial import ComplexBuildError, build_quotient_model, export_text

log = logging.getLogger("nontidy")


def _write(data: bytes, out: str | None) -> None:
    if out:
        with open(out, "wb") as fh:
            fh.write(data)
        log.info("wrote %s", out)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("dimension must be >= 1")
    return n


def _cmd_verify(args) -> int:
    cfg = PipelineConfig(args.dim, args.resolution, args.mode)
    report = run_pipeline(cfg)
    _write(emit_report(report, args.format), args.out)
    return report.exit_status


def _cmd_torsion(args) -> int:
    cert = torsion_free_certificate(args.dim)
    replay_certificate(cert)
    _write((cert.to_json() + "\n").encode(), None)
    return 0 if cert.verdict == "torsion-free" else 1


def _cmd_involution(args) -> int:
    alpha = find_odd_involution(args.dim)
    w = coindex_one_witness(args.dim)
    payload = {
        "dim": args.dim,
        "odd_involution": None if alpha is None else list(alpha.twice),
        "coindex_witness": list(w.twice),
        "coindex": 1 if alpha is None else None,
    }
    _write((json.dumps(payload) + "\n").encode(), None)
    return 0 if alpha is None else 1


def _cmd_cohomology(args) -> int:
    m = build_quotient_model(args.dim, args.resolution)
    rep = sw_height(m)
    _write((rep.to_json() + "\n").encode(), None)
    return 0 if rep.height == args.dim else 1


def _cmd_export(args) -> int:
    m = build_quotient_model(args.dim, args.resolution)
    with open(args.out, "w") as fh:
        fh.write(export_text(m))
    _write((json.dumps(m.summary()) + "\n").encode(), None)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nontidy", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the full verification pipeline")
    v.add_argument("--dim", type=_positive, required=True)
    v.add_argument("--resolution", type=Fraction, default=Fraction(1, 4))
    v.add_argument("--mode", choices=MODES, default=None)
    v.add_argument("--format", choices=FORMATS, default="json")
    v.add_argument("--out")
    v.set_defaults(func=_cmd_verify)

    t = sub.add_parser("torsion", help="emit the torsion-freeness certificate")
    t.add_argument("--dim", type=_positive, required=True)
    t.set_defaults(func=_cmd_torsion)

    i = sub.add_parser("involution", help="decide whether an odd involution exists")
    i.add_argument("--dim", type=_positive, required=True)
    i.set_defaults(func=_cmd_involution)

    c = sub.add_parser("cohomology", help="Betti numbers and Stiefel-Whitney height")
    c.add_argument("--dim", type=_positive, required=True)
    c.add_argument("--resolution", type=Fraction, default=Fraction(1, 4))
    c.set_defaults(func=_cmd_cohomology)

    e = sub.add_parser("export-complex", help="write the quotient complex as text")
    e.add_argument("--dim", type=_positive, required=True)
    e.add_argument("--resolution", type=Fraction, default=Fraction(1, 4))
    e.add_argument("--out", required=True)
    e.set_defaults(func=_cmd_export)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ComplexBuildError as exc:
        log.error("complex build failed: %s", exc)
        return 2
    except ValueError as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
