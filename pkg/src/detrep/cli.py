"""Command-line front end: ``detrep <subcommand> [options]``.

Every subcommand reads JSON files and writes one JSON document to stdout
(or ``--out``). Exit status: 0 on success, 2 for domain errors (singular
pencil, singular ``D``, failed pipeline checks), 3 for malformed input. Error
details go to stderr as JSON.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import serialize as io
from .core import DimensionError, DomainError, parse_word
from .evaluate import det_pencil, eval_transfer, nc_coeff
from .inversion import invert
from .polynomial import det_poly
from .polyrep import agler_reflection, pipeline_extract, stability_sample, univariate_detrep, verify_detrep
from .structure import controllable_spaces, is_controllable, is_minimal, is_observable, minimize, \
    observable_spaces

EXIT_DOMAIN = 2
EXIT_FORMAT = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_n(text):
    try:
        return [int(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as exc:
        raise UsageError(f"bad --n {text!r}") from exc


def _need(args, *names):
    missing = [f"--{nm.replace('_', '-')}" for nm in names if getattr(args, nm) is None]
    if missing:
        raise UsageError(f"{args.command} requires {', '.join(missing)}")


def _load_kfile(args):
    shape, n, K = io.kfile_from_json(io.load(args.K))
    if args.n is not None:
        n = _parse_n(args.n)
    if n is None:
        raise UsageError("multiplicities missing: pass --n or include \"n\" in the K file")
    return shape, n, K


def cmd_eval(args):
    _need(args, "colligation", "point")
    coll = io.colligation_from_json(io.load(args.colligation))
    point = io.point_from_json(io.load(args.point), coll.shape)
    return {"s": point.s, "transfer": io.matrix_to_json(eval_transfer(coll, point))}


def cmd_coeff(args):
    _need(args, "colligation", "word")
    coll = io.colligation_from_json(io.load(args.colligation))
    word = parse_word(args.word)
    return {"word": [list(a) for a in word], "coeff": io.matrix_to_json(nc_coeff(coll, word))}


def cmd_pencil_det(args):
    _need(args, "colligation", "point")
    coll = io.colligation_from_json(io.load(args.colligation))
    point = io.point_from_json(io.load(args.point), coll.shape)
    return {"det": io.complex_to_json(det_pencil(coll, point))}


def cmd_minimal(args):
    _need(args, "colligation")
    coll = io.colligation_from_json(io.load(args.colligation))
    return {"is_minimal": is_minimal(coll), "controllable": is_controllable(coll),
            "observable": is_observable(coll), "n": list(coll.n),
            "controllable_dims": list(controllable_spaces(coll).dims),
            "observable_dims": list(observable_spaces(coll).dims)}


def cmd_minimize(args):
    _need(args, "colligation")
    return io.colligation_to_json(minimize(io.colligation_from_json(io.load(args.colligation))))


def cmd_invert(args):
    _need(args, "colligation")
    return io.colligation_to_json(invert(io.colligation_from_json(io.load(args.colligation))))


def cmd_detpoly(args):
    _need(args, "K")
    shape, n, K = _load_kfile(args)
    return io.poly_to_json(det_poly(K, n, shape))


def cmd_verify(args):
    _need(args, "poly", "K", "seed")
    p = io.poly_from_json(io.load(args.poly))
    shape, n, K = _load_kfile(args)
    if shape != p.shape:
        raise DimensionError("K file and polynomial shapes differ", where=("shape",))
    return verify_detrep(p, K, n, samples=args.samples or 200, seed=args.seed).to_dict()


def cmd_univariate(args):
    _need(args, "poly")
    p = io.poly_from_json(io.load(args.poly))
    K, n = univariate_detrep(p)
    return io.kfile_to_json(p.shape, n, K)


def cmd_stability(args):
    _need(args, "poly", "samples", "seed")
    p = io.poly_from_json(io.load(args.poly))
    return stability_sample(p, args.samples, args.seed).to_dict()


def cmd_pipeline(args):
    _need(args, "poly", "colligation", "rho", "c", "seed")
    p = io.poly_from_json(io.load(args.poly))
    coll = io.colligation_from_json(io.load(args.colligation))
    res = pipeline_extract(p, coll, args.rho, args.c, samples=args.samples or 200, seed=args.seed)
    out = io.kfile_to_json(p.shape, res.n_min, res.K)
    out["report"] = res.report
    return out


def cmd_reflect(args):
    _need(args, "poly", "n", "seed")
    p = io.poly_from_json(io.load(args.poly))
    q, report = agler_reflection(p, _parse_n(args.n), samples=args.samples or 100, seed=args.seed)
    out = io.poly_to_json(q)
    out["report"] = report
    return out


COMMANDS = {
    "eval": (cmd_eval, "transfer matrix of a colligation at a point"),
    "coeff": (cmd_coeff, "noncommutative series coefficient of a word"),
    "pencil-det": (cmd_pencil_det, "det(I - A (.) Z) at a point"),
    "minimal": (cmd_minimal, "controllability / observability / minimality report"),
    "minimize": (cmd_minimize, "compress a colligation to a minimal one"),
    "invert": (cmd_invert, "colligation of the inverse transfer function"),
    "detpoly": (cmd_detpoly, "expand det(I - K Z_n) as a polynomial"),
    "verify": (cmd_verify, "check p = det(I - K Z_n) with ||K|| < 1"),
    "univariate": (cmd_univariate, "diagonal representation of a univariate polynomial"),
    "stability": (cmd_stability, "sampled minimum of |p| over the closed polyball"),
    "pipeline": (cmd_pipeline, "extract K from a realization of c / p(rho z)"),
    "reflect": (cmd_reflect, "numerator z^n conj(p)(1/z) of the inner function"),
}


def build_parser():
    parser = _Parser(prog="detrep", description="Structured realizations and determinantal representations.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--colligation", metavar="F")
        sp.add_argument("--point", metavar="F")
        sp.add_argument("--poly", metavar="F")
        sp.add_argument("--K", metavar="F", help="JSON {shape, n, K}")
        sp.add_argument("--word", metavar="r,i,j;...")
        sp.add_argument("--n", metavar="n1,n2,...")
        sp.add_argument("--samples", type=int, metavar="N")
        sp.add_argument("--seed", type=int, metavar="S")
        sp.add_argument("--rho", type=float, metavar="R")
        sp.add_argument("--c", type=float, metavar="C")
        sp.add_argument("--out", metavar="F")
    return parser


def _fail(code, kind, exc):
    doc = {"error": kind, "type": type(exc).__name__, "message": str(exc)}
    if getattr(exc, "report", None):
        doc["step"] = exc.step
        doc["report"] = exc.report
    sys.stderr.write(io.dumps(doc) + "\n")
    return code


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required: " + ", ".join(COMMANDS))
        result = COMMANDS[args.command][0](args)
        text = io.dumps(result) + "\n"
    except DomainError as exc:
        return _fail(EXIT_DOMAIN, "domain", exc)
    except (UsageError, io.FormatError, DimensionError, ValueError, KeyError, TypeError, OSError,
            json.JSONDecodeError) as exc:
        return _fail(EXIT_FORMAT, "validation", exc)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
