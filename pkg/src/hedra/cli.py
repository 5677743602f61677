"""Command-line front end: ``hedra build|ik|traj|relax|export``.

Exit codes: 0 success, 2 invalid arguments, 3 infeasible solve, 4 relaxation did
not converge, 5 file I/O. ``HEDRA_LOG`` (error, info, debug) sets stderr verbosity.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys

import numpy as np

from . import __version__
from . import io as hio
from .errors import (
    DivergenceError,
    InvalidParameterError,
    NotStaticallyFeasibleError,
    SlackImpossibleError,
)
from .ik import DEFAULT_Q_MIN, DEFAULT_TOL, solve_pose
from .motion import (
    DEFAULT_NODE_MASS,
    RelaxationParams,
    TrajectorySpec,
    pose_sequence,
    relax,
    run_trajectory,
)
from .statics import DEFAULT_MASS_PER_LENGTH, gravity_loads
from .structure import (
    DEFAULT_BAR_STIFFNESS,
    DEFAULT_CABLE_STIFFNESS,
    DEFAULT_JOINT_GAP,
    ModulePose,
    TetraParams,
    build_hedra,
)

log = logging.getLogger("hedra")

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_DIVERGED, EXIT_IO = 0, 2, 3, 4, 5


def _configure_logging():
    level = os.environ.get("HEDRA_LOG", "error").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.ERROR),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


# --- shared flag groups -----------------------------------------------------


def _add_geometry_flags(p):
    p.add_argument("--modules", type=int, default=5, help="number of stacked tetrahedra (default 5)")
    p.add_argument("--radius", type=float, default=0.1, help="face circumradius in m (default 0.1)")
    p.add_argument("--height", type=float, default=0.15, help="module height in m (default 0.15)")
    p.add_argument(
        "--gap",
        type=float,
        default=DEFAULT_JOINT_GAP,
        help="depth of each upper apex below the face beneath it, m (default 0.02)",
    )
    p.add_argument("--cables", type=int, default=3, choices=(3, 6), help="active cable count")
    p.add_argument("--cable-stiffness", type=float, default=DEFAULT_CABLE_STIFFNESS, help="N/m")
    p.add_argument("--bar-stiffness", type=float, default=DEFAULT_BAR_STIFFNESS, help="N/m")


def _add_model_flags(p):
    p.add_argument("--model", help="hedra_model_v1 file; omitted: build from the geometry flags")
    _add_geometry_flags(p)


def _add_load_flags(p):
    p.add_argument("--qmin", type=float, default=DEFAULT_Q_MIN, help="minimum cable force density, N/m")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="equilibrium residual tolerance, N")
    p.add_argument("--no-gravity", action="store_true", help="solve without self weight")
    p.add_argument(
        "--mass-per-length",
        type=float,
        default=DEFAULT_MASS_PER_LENGTH,
        help="bar mass per unit length, kg/m (default 0.05)",
    )
    p.add_argument(
        "--payload-mass",
        type=float,
        default=0.0,
        help="end-effector payload in kg, shared by the top face nodes",
    )


def _add_motion_flags(p, default_mode):
    modes = ("bend", "twist", "contract")
    if default_mode == "identity":
        modes = ("identity",) + modes
    p.add_argument("--mode", default=default_mode, choices=modes)
    p.add_argument("--angle", type=float, default=0.0, help="total bend or twist angle, degrees")
    p.add_argument("--azimuth", type=float, default=0.0, help="bending direction in the xy plane, degrees")
    p.add_argument("--ratio", type=float, default=1.0, help="contraction ratio in (0, 1]")


def _add_relax_flags(p):
    p.add_argument("--time-step", type=float, default=None, help="s; default from the stiffest node")
    p.add_argument("--node-mass", type=float, default=DEFAULT_NODE_MASS, help="kg")
    p.add_argument("--max-iterations", type=int, default=200_000)
    p.add_argument("--force-tol", type=float, default=1e-6, help="N")
    p.add_argument(
        "--viscous",
        type=float,
        default=None,
        help="viscous damping coefficient, N s/m (default: kinetic damping)",
    )


def _relax_params(args) -> RelaxationParams:
    return RelaxationParams(
        time_step=args.time_step,
        node_mass=args.node_mass,
        damping="kinetic" if args.viscous is None else args.viscous,
        max_iterations=args.max_iterations,
        force_tolerance=args.force_tol,
    )


def _model(args):
    if getattr(args, "model", None):
        return hio.read_model(args.model)
    return build_hedra(
        args.modules,
        TetraParams(args.radius, args.height),
        joint_gap=args.gap,
        active_cable_count=args.cables,
        cable_stiffness=args.cable_stiffness,
        bar_stiffness=args.bar_stiffness,
    )


def _loads(model, args):
    if args.no_gravity and args.payload_mass == 0.0:
        return None
    rho = 0.0 if args.no_gravity else args.mass_per_length
    payload = None
    if args.payload_mass:
        if args.payload_mass < 0:
            raise InvalidParameterError("payload mass must be non-negative")
        face = model.modules[-1][1:]
        share = -9.81 * args.payload_mass / len(face)
        payload = [(nid, (0.0, 0.0, share)) for nid in face]
    return lambda X: gravity_loads(model, X, member_mass_per_length=rho, payload=payload)


def _spec(args, steps):
    if args.mode == "contract":
        magnitude = args.ratio
    else:
        magnitude = math.radians(args.angle)
    return TrajectorySpec(args.mode, magnitude, math.radians(args.azimuth), steps)


def _params(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


# --- commands ---------------------------------------------------------------


def cmd_build(args) -> int:
    model = _model(args)
    hio.write_model(model, args.output)
    hio.write_manifest(args.output, "build", [], _params(args), [args.output])
    print(f"wrote {args.output}: {model.n_nodes} nodes, {model.n_cables} cables, {model.n_bars} bars")
    return EXIT_OK


def cmd_ik(args) -> int:
    model = _model(args)
    if args.poses:
        with open(args.poses, encoding="utf-8") as fh:
            doc = json.load(fh)
        poses = [ModulePose(tuple(p["euler"]), tuple(p["translation"])) for p in doc["poses"]]
    elif args.mode == "identity":
        poses = [ModulePose()] * (model.module_count - 1)
    else:
        poses = pose_sequence(_spec(args, 1), model)[-1]
    sol = solve_pose(model, poses, loads=_loads(model, args), q_min=args.qmin, tol=args.tol)
    hio.write_solution(sol, args.output, poses=poses, q_min=args.qmin)
    inputs = [args.model] if args.model else []
    if args.poses:
        inputs.append(args.poses)
    hio.write_manifest(args.output, "ik", inputs, _params(args), [args.output])
    print(f"residual {float(sol.residual)!r} N")
    print(f"objective {float(sol.objective)!r} J")
    return EXIT_OK


def cmd_traj(args) -> int:
    model = _model(args)
    spec = _spec(args, args.steps)
    result = run_trajectory(
        model,
        spec,
        loads=_loads(model, args),
        q_min=args.qmin,
        tol=args.tol,
        validate=args.validate,
        relax_params=_relax_params(args),
    )
    hio.write_trace_csv(result.trace, args.trace)
    hio.write_schedule_csv(result.schedule(), args.schedule)
    hio.write_manifest(
        args.trace,
        "traj",
        [args.model] if args.model else [],
        _params(args),
        [args.trace, args.schedule],
    )
    tr = result.trace
    print(
        f"{len(tr)} steps; final bend {float(tr.bend_deg[-1])!r} deg, "
        f"twist {float(tr.twist_deg[-1])!r} deg"
    )
    return EXIT_OK


def cmd_relax(args) -> int:
    model = _model(args)
    sol = hio.read_solution(args.solution)
    initial = hio.read_configuration(args.initial) if args.initial else None
    X, diag = relax(model, sol.member_rest_lengths, sol.loads, _relax_params(args), initial=initial)
    err = float(np.max(np.linalg.norm(X - sol.positions, axis=1)))
    diag = dict(diag, max_error_to_target=err)
    hio.write_configuration(X, args.output, diag)
    inputs = [p for p in (args.model, args.solution, args.initial) if p]
    hio.write_manifest(args.output, "relax", inputs, _params(args), [args.output])
    print(f"converged in {diag['iterations']} iterations; max distance to IK target {err!r} m")
    return EXIT_OK


def cmd_export(args) -> int:
    model = _model(args)
    config = None
    if args.solution:
        config = hio.read_solution(args.solution).positions
    elif args.configuration:
        config = hio.read_configuration(args.configuration)
    hio.write_obj(model, args.output, config)
    inputs = [p for p in (args.model, args.solution, args.configuration) if p]
    hio.write_manifest(args.output, "export", inputs, _params(args), [args.output])
    print(f"wrote {args.output}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hedra",
        description="Stacked tetrahedral tensegrity manipulator toolkit.",
    )
    parser.add_argument("--version", action="version", version=f"hedra {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="write a hedra_model_v1 model file")
    _add_geometry_flags(p)
    p.add_argument("-o", "--output", default="model.json")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("ik", help="solve force densities and rest lengths for one pose")
    _add_model_flags(p)
    _add_load_flags(p)
    _add_motion_flags(p, "identity")
    p.add_argument("--poses", help="JSON file with a 'poses' list of {euler, translation}")
    p.add_argument("-o", "--output", default="solution.json")
    p.set_defaults(func=cmd_ik)

    p = sub.add_parser("traj", help="solve a bend, twist or contraction trajectory")
    _add_model_flags(p)
    _add_load_flags(p)
    _add_motion_flags(p, "bend")
    _add_relax_flags(p)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--validate", action="store_true", help="relax every step forward and report the error")
    p.add_argument("--trace", default="trace.csv")
    p.add_argument("--schedule", default="schedule.csv")
    p.set_defaults(func=cmd_traj)

    p = sub.add_parser("relax", help="forward-simulate an IK solution to equilibrium")
    _add_model_flags(p)
    _add_relax_flags(p)
    p.add_argument("--solution", required=True)
    p.add_argument("--initial", help="hedra_configuration_v1 start state (default: reference)")
    p.add_argument("-o", "--output", default="configuration.json")
    p.set_defaults(func=cmd_relax)

    p = sub.add_parser("export", help="write OBJ line geometry")
    _add_model_flags(p)
    p.add_argument("--solution", help="take node positions from an IK solution")
    p.add_argument("--configuration", help="take node positions from a relaxed configuration")
    p.add_argument("-o", "--output", default="hedra.obj")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NotStaticallyFeasibleError, SlackImpossibleError) as exc:
        print(f"hedra: pose not statically feasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except DivergenceError as exc:
        print(f"hedra: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"hedra: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InvalidParameterError, ValueError) as exc:
        print(f"hedra: invalid arguments: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
