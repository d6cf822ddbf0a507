"""Single command-line entry point.

Subcommands: numrange, disc-check, optimal-a, idempotent, realize, average,
expect, channel, obstruction, verify-all.  All numeric JSON output uses
full double precision (shortest round-trip formatting); boundary sweeps are
CSV.  Exit codes: 0 success, 1 domain error, 2 verification failure,
64 usage error.  Matrix files are bare matrix JSON; structured outputs
carry a ``generated_at`` stamp unless ``--reproducible`` is given.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import acceptance
from .channel import (
    ChannelSpec,
    apply_channel,
    compression_mixture_channel,
    geometric_weights,
    pinching_channel,
    verify_channel,
)
from .errors import DomainError, FormatError, PinchlabError
from .expectation import check_reduction, conditional_expectation, parse_blocks
from .idempotent import idempotent_canonical, oblique_projection, self_adjoint_defect
from .linalg import matrix_from_json, matrix_to_json, operator_norm
from .numrange import disc_in_nr, nr_boundary, optimal_disc_parameter, support_profile
from .pinching import (
    PinchingPlan,
    hermitian_orbit_distance,
    realize_diagonal,
    realize_normal_blocks,
    two_orbit_average,
)
from .report import render_boundary, write_boundary_csv

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_VERIFY = 2
EXIT_USAGE = 64


@dataclass(frozen=True)
class RunConfig:
    """Shared knobs: seed, sweep resolution, tolerance, margin, output path."""

    seed: int = 0
    resolution: int = 720
    tol: float = 1e-10
    margin: float = 1e-8
    output_path: str | None = None

    def __post_init__(self):
        if self.resolution < 3:
            raise DomainError(f"resolution must be >= 3, got {self.resolution}")
        if self.tol <= 0:
            raise DomainError(f"tol must be > 0, got {self.tol}")
        if self.margin < 0:
            raise DomainError(f"margin must be >= 0, got {self.margin}")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _config(args) -> RunConfig:
    return RunConfig(
        seed=getattr(args, "seed", 0),
        resolution=getattr(args, "resolution", 720),
        tol=getattr(args, "tol", 1e-10),
        margin=getattr(args, "margin", 1e-8),
        output_path=getattr(args, "output", None),
    )


def _load_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read JSON from {path}: {exc}") from exc


def _load_matrix(path) -> np.ndarray:
    return matrix_from_json(_load_json(path))


def _emit_json(payload: dict, args, *, stamp: bool = True) -> None:
    if stamp and not getattr(args, "reproducible", False):
        payload = {"generated_at": _now(), **payload}
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    output = getattr(args, "output", None)
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def _add_common(parser, *, seed=False, resolution=False, margin=False, tol=False):
    parser.add_argument("--reproducible", action="store_true",
                        help="suppress the timestamp field for byte-stable output")
    if seed:
        parser.add_argument("--seed", type=int, default=0)
    if resolution:
        parser.add_argument("--resolution", type=int, default=720)
    if margin:
        parser.add_argument("--margin", type=float, default=1e-8)
    if tol:
        parser.add_argument("--tol", type=float, default=1e-10)


# --- subcommand handlers ------------------------------------------------------


def _cmd_numrange(args) -> int:
    cfg = _config(args)
    boundary = nr_boundary(_load_matrix(args.input), cfg.resolution)
    write_boundary_csv(args.output, boundary)
    if args.svg:
        render_boundary(args.svg, boundary)
    return EXIT_OK


def _cmd_disc_check(args) -> int:
    cfg = _config(args)
    if (args.input is None) == (args.ma is None):
        raise _UsageError("provide exactly one of --input or --ma")
    matrix = oblique_projection(args.ma) if args.ma is not None else _load_matrix(args.input)
    profile = support_profile(matrix, cfg.resolution)
    contains = bool(np.min(profile.supports) >= args.radius)
    _emit_json(
        {
            "contains": contains,
            "radius": args.radius,
            "min_support": float(np.min(profile.supports)),
            "resolution": cfg.resolution,
        },
        args,
    )
    return EXIT_OK if contains else EXIT_VERIFY


def _cmd_optimal_a(args) -> int:
    opt = optimal_disc_parameter()
    _emit_json(
        {"a_star": opt.a_star, "r_star_sq": opt.r_star_sq, "norm": opt.norm}, args
    )
    return EXIT_OK


def _cmd_idempotent(args) -> int:
    cfg = _config(args)
    matrix = _load_matrix(args.input)
    if args.mode == "canon":
        form = idempotent_canonical(matrix, cfg.tol)
        _emit_json(
            {
                "k": form.k,
                "m": form.m,
                "sigmas": [float(s) for s in form.sigmas],
                "basis": matrix_to_json(form.basis),
                "norm": form.norm(),
            },
            args,
        )
    else:
        report = self_adjoint_defect(matrix, cfg.tol)
        _emit_json(
            {
                "pos_norm": report.pos_norm,
                "neg_norm": report.neg_norm,
                "holds": report.holds,
            },
            args,
        )
    return EXIT_OK


def _parse_values(obj) -> np.ndarray:
    if not isinstance(obj, list):
        raise FormatError("values JSON must be a list")
    out = []
    for entry in obj:
        if isinstance(entry, (int, float)):
            out.append(complex(entry))
        elif isinstance(entry, (list, tuple)) and len(entry) == 2:
            out.append(complex(float(entry[0]), float(entry[1])))
        else:
            raise FormatError(f"bad value entry {entry!r}; use numbers or [re, im]")
    return np.asarray(out, dtype=complex)


def _cmd_realize(args) -> int:
    payload = _load_json(args.values)
    a = None if args.a == "auto" else float(args.a)
    if args.block_mode:
        blocks = [matrix_from_json(m) for m in payload]
        plan = realize_normal_blocks(blocks, a)
    else:
        plan = realize_diagonal(_parse_values(payload), a)
    _emit_json(plan.to_json(), args)
    return EXIT_OK


def _cmd_average(args) -> int:
    plan = PinchingPlan.from_json(_load_json(args.plan))
    u, v, average = two_orbit_average(plan)
    n = len(plan.prescribed_positions)
    off = max(operator_norm(average[:n, n:]), operator_norm(average[n:, :n]))
    _emit_json(
        {
            "unitary_u": matrix_to_json(u),
            "unitary_v": matrix_to_json(v),
            "average": matrix_to_json(average),
            "offdiagonal_norm": off,
        },
        args,
    )
    return EXIT_OK


def _cmd_expect(args) -> int:
    cfg = _config(args)
    matrix = _load_matrix(args.input)
    masa = parse_blocks(args.blocks, matrix.shape[0])
    if args.mode == "apply":
        expected = conditional_expectation(matrix, masa)
        text = json.dumps(matrix_to_json(expected), indent=2, sort_keys=True) + "\n"
        if args.output:
            Path(args.output).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        return EXIT_OK
    report = check_reduction(
        matrix,
        masa,
        args.samples,
        margin=cfg.margin,
        resolution=cfg.resolution,
        rng=np.random.default_rng(cfg.seed),
    )
    _emit_json(
        {
            "passed": report.passed,
            "points_checked": report.points_checked,
            "worst_excess": report.worst_excess,
            "witness": None
            if report.witness is None
            else [report.witness.real, report.witness.imag],
        },
        args,
    )
    return EXIT_OK if report.passed else EXIT_VERIFY


def _cmd_channel(args) -> int:
    if args.mode == "build":
        if args.kind == "pinching":
            if not args.blocks:
                raise _UsageError("--kind pinching requires --blocks")
            spec = pinching_channel(parse_blocks(args.blocks, args.dim))
        else:
            if not args.plans:
                raise _UsageError("--kind mixture requires --plans")
            plans = [PinchingPlan.from_json(p) for p in _load_json(args.plans)]
            if args.weights == "auto":
                weights = geometric_weights(len(plans))
            else:
                weights = tuple(float(w) for w in args.weights.split(","))
            spec = compression_mixture_channel(plans, weights)
        _emit_json(spec.to_json(), args)
        return EXIT_OK

    if not args.input:
        raise _UsageError("channel verify requires --input")
    spec = ChannelSpec.from_json(_load_json(args.input))
    report = verify_channel(
        spec, args.trials, rng=np.random.default_rng(getattr(args, "seed", 0))
    )
    _emit_json(report.to_json(), args)
    return EXIT_OK if report.declared_ok else EXIT_VERIFY


def _cmd_obstruction(args) -> int:
    distance = hermitian_orbit_distance(
        _load_matrix(args.a_path), _load_matrix(args.x_path)
    )
    _emit_json({"distance": distance}, args)
    return EXIT_OK


def _cmd_verify_all(args) -> int:
    results = acceptance.run_all(seed=args.seed, echo=print)
    if args.output:
        payload = {"seed": args.seed, "results": [r.to_json() for r in results]}
        if not args.reproducible:
            payload = {"generated_at": _now(), **payload}
        Path(args.output).write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


# --- parser -------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="pinchlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("numrange", help="boundary sweep to CSV (optionally a figure)")
    p.add_argument("--input", required=True, help="matrix JSON file")
    p.add_argument("--output", required=True, help="CSV path (theta,support,re,im)")
    p.add_argument("--svg", default=None, help="also render the boundary polyline")
    _add_common(p, resolution=True)
    p.set_defaults(func=_cmd_numrange)

    p = sub.add_parser("disc-check", help="is the disc of given radius inside W?")
    p.add_argument("--input", default=None, help="matrix JSON file")
    p.add_argument("--ma", type=float, default=None,
                   help="use the built-in 2x2 oblique projection with this parameter")
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--output", default=None)
    _add_common(p, resolution=True)
    p.set_defaults(func=_cmd_disc_check)

    p = sub.add_parser("optimal-a", help="least disc-covering parameter")
    p.add_argument("--output", default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_optimal_a)

    p = sub.add_parser("idempotent", help="canonical form / Hermitian-part defect")
    p.add_argument("mode", choices=["canon", "defect"])
    p.add_argument("--input", required=True)
    p.add_argument("--output", default=None)
    _add_common(p, tol=True)
    p.set_defaults(func=_cmd_idempotent)

    p = sub.add_parser("realize", help="realize diagonal values or normal blocks")
    p.add_argument("--values", required=True,
                   help="JSON list of values ([re,im] pairs) or matrices (--block-mode)")
    p.add_argument("--block-mode", action="store_true")
    p.add_argument("--a", default="auto",
                   help="oblique-projection parameter (default: auto)")
    p.add_argument("--output", default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_realize)

    p = sub.add_parser("average", help="two-unitary block-diagonal average of a plan")
    p.add_argument("--plan", required=True)
    p.add_argument("--output", default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_average)

    p = sub.add_parser("expect", help="conditional expectation onto coordinate blocks")
    p.add_argument("mode", nargs="?", choices=["apply", "check"], default="apply")
    p.add_argument("--input", required=True)
    p.add_argument("--blocks", required=True,
                   help='1-based partition grammar, e.g. "1;2;3,4"')
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--output", default=None)
    _add_common(p, seed=True, resolution=True, margin=True)
    p.set_defaults(func=_cmd_expect)

    p = sub.add_parser("channel", help="build or verify a positive linear map")
    p.add_argument("mode", choices=["build", "verify"])
    p.add_argument("--kind", choices=["pinching", "mixture"], default="pinching")
    p.add_argument("--blocks", default=None)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--plans", default=None, help="JSON list of plan objects")
    p.add_argument("--weights", default="auto")
    p.add_argument("--input", default=None, help="channel JSON (verify mode)")
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--output", default=None)
    _add_common(p, seed=True)
    p.set_defaults(func=_cmd_channel)

    p = sub.add_parser("obstruction", help="distance between Hermitian unitary orbits")
    p.add_argument("--A", dest="a_path", required=True)
    p.add_argument("--X", dest="x_path", required=True)
    p.add_argument("--output", default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_obstruction)

    p = sub.add_parser("verify-all", help="run the full acceptance suite")
    p.add_argument("--output", default=None, help="also write a JSON report")
    _add_common(p, seed=True)
    p.set_defaults(func=_cmd_verify_all)

    return parser


def dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PinchlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
