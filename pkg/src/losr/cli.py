"""Command-line front end.

Exit codes: 0 success (or Free / Yes), 1 domain negative (NonFree, No,
invalid resource), 2 usage or parse error, 3 Inconclusive (or Unknown).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Any, Sequence

import numpy as np

from . import io
from .freeset import FreeVerdict, _jsonable, assemblage_is_unsteerable, box_convertible, box_is_local, state_is_ppt
from .games import GameError, TypeMismatch, evaluate, load_game
from .resources import InvalidResource, validate
from .transforms import TransformError, apply, sq_decode, sq_encode
from .types import GlobalType, Kind, PartitionType, Verdict, global_encodes_sufficient, partition_encodes

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3

_VERDICT_EXIT = {
    FreeVerdict.FREE: EXIT_OK,
    FreeVerdict.NONFREE: EXIT_NEGATIVE,
    FreeVerdict.INCONCLUSIVE: EXIT_INCONCLUSIVE,
}


class UsageError(Exception):
    pass


def _report(args, inputs: Sequence[str], outputs: dict[str, Any], t0: float) -> dict:
    return {
        "command": args.argv,
        "inputs": {p: io.sha256_file(p) for p in inputs},
        "outputs": _jsonable(outputs),
        "timing_s": round(time.perf_counter() - t0, 6),
        "tol": args.tol,
        "seed": args.seed,
    }


def _emit(args, report: dict, text: str) -> None:
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        print(text)


# --------------------------------------------------------------------------
# commands


def cmd_validate(args) -> int:
    t0 = time.perf_counter()
    r = io.load_resource(args.resource, args.tol)
    violations = validate(r, args.tol)
    out = {
        "type": str(r.type),
        "wiring": r.wiring.to_json(),
        "valid": not violations,
        "violations": [{"check": v.check, "magnitude": v.magnitude} for v in violations],
    }
    lines = [f"{args.resource}: {r.wiring} ({r.type})"]
    lines += [f"  violation {v}" for v in violations] or ["  valid"]
    _emit(args, _report(args, [args.resource], out, t0), "\n".join(lines))
    return EXIT_OK if not violations else EXIT_NEGATIVE


def cmd_encode(args) -> int:
    t0 = time.perf_counter()
    r = io.load_resource(args.resource, args.tol)
    out_r = r
    for party in args.party:
        _, out = out_r.wiring.party(party)
        if out.kind is not Kind.Q:
            raise UsageError(f"party {party} has output {out}; the semiquantum encoder needs a quantum output")
        out_r = apply(sq_encode(party, out.dim), out_r, args.tol)
    return _write_resource(args, out_r, [args.resource], t0)


def cmd_decode(args) -> int:
    t0 = time.perf_counter()
    r = io.load_resource(args.resource, args.tol)
    out_r = r
    kind = Kind.parse(args.input_kind) if args.input_kind else None
    for party in args.party:
        _, out = out_r.wiring.party(party)
        d = int(round(np.sqrt(out.dim)))
        if out.kind is not Kind.C or d * d != out.dim:
            raise UsageError(f"party {party} has output {out}; decoding needs a classical output of square dimension")
        out_r = apply(sq_decode(party, d, kind), out_r, args.tol)
    return _write_resource(args, out_r, [args.resource], t0)


def _write_resource(args, r, inputs, t0) -> int:
    obj = io.resource_to_json(r)
    if args.output:
        io.dump_json(obj, args.output)
    out = {"type": str(r.type), "wiring": r.wiring.to_json(), "file": args.output}
    if args.json or args.output:
        _emit(args, _report(args, inputs, out, t0), f"wrote {args.output}: {r.wiring} ({r.type})")
    else:
        print(io.dump_json(obj))
    return EXIT_OK


def cmd_eval(args) -> int:
    t0 = time.perf_counter()
    g = load_game(args.game)
    r = io.load_resource(args.resource, args.tol)
    try:
        value = evaluate(g, r)
    except TypeMismatch as exc:
        raise UsageError(f"{exc}; see `losr encode`") from exc
    out = {"game": args.game, "game_type": str(g.type), "value": value}
    _emit(args, _report(args, [args.resource], out, t0), f"{g.name} on {r.type}: {value:.12g}")
    return EXIT_OK


def cmd_seesaw(args) -> int:
    from .seesaw import performance_seesaw

    t0 = time.perf_counter()
    g = load_game(args.game)
    r = io.load_resource(args.resource, args.tol)
    res = performance_seesaw(g, r, mem=args.mem, restarts=args.restarts, iters=args.iters, seed=args.seed or 0)
    out = {"lower_bound": res.value, "restart": res.restart, "sweeps": len(res.history) - 1,
           "transform": res.transform.to_json()}
    _emit(args, _report(args, [args.resource], out, t0),
          f"see-saw lower bound {res.value:.12g} (restart {res.restart}, {len(res.history) - 1} sweeps)")
    return EXIT_OK


def cmd_membership(args) -> int:
    t0 = time.perf_counter()
    obj = io.load_json(args.file)
    if args.kind == "local":
        rep = box_is_local(io.box_from_json(obj), args.tol)
    elif args.kind == "ppt":
        rho, dA, dB = io.state_from_json(obj)
        rep = state_is_ppt(rho, dA, dB, args.tol)
    else:
        rep = assemblage_is_unsteerable(io.assemblage_from_json(obj), args.tol, max_iter=args.iters or 50_000)
    out = rep.to_json()
    cert = rep.certificate
    text = f"{args.kind}: {rep.verdict.value}"
    if "bound" in cert and "value" in cert:
        text += f" (value {cert['value']:.10g}, free bound {cert['bound']:.10g})"
    _emit(args, _report(args, [args.file], out, t0), text)
    return _VERDICT_EXIT[rep.verdict]


def cmd_convert_box(args) -> int:
    t0 = time.perf_counter()
    p = io.box_from_json(io.load_json(args.source))
    q = io.box_from_json(io.load_json(args.target))
    rep = box_convertible(p, q, args.tol)
    cert = rep.certificate
    text = f"convertible: {rep.verdict.value}"
    if "bound" in cert:
        text += f" (value {cert['value']:.10g}, wiring bound {cert['bound']:.10g})"
    _emit(args, _report(args, [args.source, args.target], rep.to_json(), t0), text)
    return _VERDICT_EXIT[rep.verdict]


def cmd_type_order(args) -> int:
    t0 = time.perf_counter()
    try:
        if "->" in args.t and len(args.t.split("->")[0].strip()) > 1:
            v = global_encodes_sufficient(GlobalType.parse(args.t), GlobalType.parse(args.u))
        else:
            v = partition_encodes(PartitionType.parse(args.t), PartitionType.parse(args.u))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out = {"t": args.t, "u": args.u, "verdict": v.value.value, "provenance": v.provenance}
    _emit(args, _report(args, [], out, t0), f"{args.t} encodes {args.u}: {v.value.value} ({v.provenance})")
    return {Verdict.YES: EXIT_OK, Verdict.NO: EXIT_NEGATIVE, Verdict.UNKNOWN: EXIT_INCONCLUSIVE}[v.value]


def cmd_acceptance(args) -> int:
    from .acceptance import run_all

    t0 = time.perf_counter()
    checks = run_all()
    out = {"checks": [{"name": c.name, "passed": c.passed, "detail": c.detail, "seconds": c.seconds} for c in checks]}
    text = "\n".join(c.line() for c in checks)
    text += f"\n{sum(c.passed for c in checks)}/{len(checks)} passed"
    _emit(args, _report(args, [], out, t0), text)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_NEGATIVE


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-9, help="numerical tolerance (default 1e-9)")
    common.add_argument("--seed", type=int, default=None, help="seed for all randomness")
    common.add_argument("--json", action="store_true", help="emit a JSON run report")
    common.add_argument("--iters", type=int, default=None, help="iteration cap for iterative solvers")
    common.add_argument("--restarts", type=int, default=None, help="restarts for the see-saw")

    parser = argparse.ArgumentParser(prog="losr", description="LOSR resource theory toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a resource file")
    p.add_argument("resource")
    p.set_defaults(func=cmd_validate)

    for name, func, help_ in (("encode", cmd_encode, "apply the semiquantum encoder"),
                              ("decode", cmd_decode, "apply the semiquantum decoder")):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("resource")
        p.add_argument("--party", choices=["A", "B"], action="append", required=True,
                       help="party to act on; repeat for both")
        p.add_argument("--scheme", choices=["sq"], default="sq")
        p.add_argument("-o", "--output", help="write the resulting resource here")
        if name == "decode":
            p.add_argument("--input-kind", choices=["I", "C", "Q"], help="kind of the restored input")
        p.set_defaults(func=func)

    p = sub.add_parser("eval", parents=[common], help="evaluate a game on a resource")
    p.add_argument("game", help="chsh, witness:<file>, pushforward:<game>:<encoder> or a game file")
    p.add_argument("resource")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("seesaw", parents=[common], help="see-saw lower bound on game performance")
    p.add_argument("game")
    p.add_argument("resource")
    p.add_argument("--mem", type=int, default=2, help="comb memory dimension")
    p.set_defaults(func=cmd_seesaw)

    p = sub.add_parser("membership", parents=[common], help="free-set membership test")
    p.add_argument("kind", choices=["local", "ppt", "lhs"])
    p.add_argument("file")
    p.set_defaults(func=cmd_membership)

    p = sub.add_parser("convert-box", parents=[common], help="single-copy LOSR convertibility of boxes")
    p.add_argument("source")
    p.add_argument("target")
    p.set_defaults(func=cmd_convert_box)

    p = sub.add_parser("type-order", parents=[common], help="does type t encode type u")
    p.add_argument("t")
    p.add_argument("u")
    p.set_defaults(func=cmd_type_order)

    p = sub.add_parser("acceptance", parents=[common], help="run the acceptance suite")
    p.set_defaults(func=cmd_acceptance)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    args.argv = ["losr", *argv]
    if args.restarts is None:
        args.restarts = 20
    if args.iters is None and args.command == "seesaw":
        args.iters = 300
    if args.seed is not None:
        np.random.seed(args.seed % 2**32)
    try:
        return args.func(args)
    except (UsageError, io.ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidResource as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    except (TransformError, GameError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
