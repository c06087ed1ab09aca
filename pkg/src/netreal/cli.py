"""Command-line front end.

Every checking subcommand prints a staged report (human-readable by
default, ``--json`` for the machine format described by
``schemas/report.schema.json``) and exits 0 when all stages pass, 1 when
a mathematical check fails, 2 on unusable input.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .algebra import add, invert, multiply, node_major_indices
from .demos import run_demo_remark1, run_demo_river
from .errors import InputError, NetRealError, NumericalError, PoleError
from .imc import imc_controller
from .loops import close_loop, q_param, verify_identities
from .realization import (
    DMode,
    certify_witness,
    check_compatibility,
    eval_transfer,
    scaled_deviation,
    spectral_radius,
    transfer_equal,
)
from .sim import simulate_distributed, simulate_lti
from .sysio import (
    Report,
    read_system,
    read_trajectory,
    trajectory_to_csv,
    trajectory_to_obj,
    write_system,
    write_trajectory,
)

_POINTWISE_RETRIES = 8


def _d_mode(args) -> DMode:
    return DMode.EDGE_SPARSE if args.d_mode == "edge" else DMode.STRICT


def _emit(report: Report, args) -> int:
    if args.json:
        print(json.dumps(report.to_obj(), indent=2))
    else:
        if report.name:
            print(f"report: {report.name}")
        for stage in report.stages:
            verdict = "PASS" if stage.passed else "FAIL"
            parts = ", ".join(f"{k}={_fmt(v)}" for k, v in stage.detail.items())
            print(f"  [{verdict}] {stage.name}" + (f" ({parts})" if parts else ""))
        if report.note:
            print(f"note: {report.note}")
        print(f"overall: {'PASS' if report.passed else 'FAIL'}")
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(report.to_obj(), fh, indent=2)
            fh.write("\n")
    return 0 if report.passed else 1


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.3e}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(str(v) for v in value) + "]"
    return str(value)


def _pointwise(result, factors, combine, num_points):
    """Worst scaled gap between the result's transfer and a pointwise oracle."""
    rho = max(spectral_radius(r) for r in [result, *factors])
    radius = 2.0 * (1.0 + rho)
    worst = 0.0
    for k in range(num_points):
        z = radius * np.exp(2j * np.pi * k / num_points)
        for _ in range(_POINTWISE_RETRIES):
            try:
                got = eval_transfer(result, z)
                want = combine([eval_transfer(f, z) for f in factors])
                break
            except (PoleError, np.linalg.LinAlgError):
                z *= 1.37
        else:
            raise NumericalError(
                f"no usable sample point near radius {radius:.3e}")
        worst = max(worst, scaled_deviation(got, want))
    return worst


def _cmd_check(args) -> int:
    real, graph, name = read_system(args.system)
    cert = certify_witness(real, graph, _d_mode(args), tol=args.pbh_tol)
    report = Report(name=name or str(args.system))
    report.add(
        "compatibility",
        cert.compatibility.ok,
        mode=args.d_mode,
        violations=[f"{v.matrix}{v.block}" for v in cert.compatibility.violations],
    )
    report.add(
        "pbh-stabilizable",
        cert.pbh.stabilizable,
        offending=[
            str(m.eigenvalue) for m in cert.pbh.offending_modes
            if m.test == "stabilizable"
        ],
    )
    report.add(
        "pbh-detectable",
        cert.pbh.detectable,
        offending=[
            str(m.eigenvalue) for m in cert.pbh.offending_modes
            if m.test == "detectable"
        ],
    )
    return _emit(report, args)


def _cmd_compose(args) -> int:
    first, graph, name1 = read_system(args.first)
    if args.op == "inv":
        if args.second is not None:
            raise InputError("--op inv takes a single system")
        result = invert(first)
        factors = [first]
        combine = lambda vals: np.linalg.inv(vals[0])
        label = f"inv({name1 or args.first})"
    else:
        if args.second is None:
            raise InputError(f"--op {args.op} needs two systems")
        second, graph2, name2 = read_system(args.second)
        if graph2 != graph:
            raise InputError("composed systems must share one graph")
        factors = [first, second]
        if args.op == "add":
            result = add(first, second)
            combine = lambda vals: vals[0] + vals[1]
        else:
            result = multiply(first, second)
            combine = lambda vals: vals[0] @ vals[1]
        label = f"{args.op}({name1 or args.first}, {name2 or args.second})"

    report = Report(name=label)
    compat = check_compatibility(result, graph, _d_mode(args))
    report.add(
        "compatibility",
        compat.ok,
        mode=args.d_mode,
        states=result.n,
        violations=[f"{v.matrix}{v.block}" for v in compat.violations],
    )
    worst = _pointwise(result, factors, combine, args.points)
    report.add(
        "pointwise-transfer", worst <= args.rtol,
        max_deviation=worst, rel_tol=args.rtol, num_points=args.points,
    )
    if args.save:
        write_system(args.save, result, graph, name=label)
    return _emit(report, args)


def _cmd_closeloop(args) -> int:
    plant, graph, name1 = read_system(args.plant)
    controller, graph2, name2 = read_system(args.controller)
    if graph2 != graph:
        raise InputError("plant and controller must share one graph")
    loop = close_loop(plant, controller)

    report = Report(
        name=f"loop({name1 or args.plant}, {name2 or args.controller})")
    compat = check_compatibility(loop.realization, graph, _d_mode(args))
    report.add(
        "compatibility",
        compat.ok,
        mode=args.d_mode,
        states=loop.realization.n,
        violations=[f"{v.matrix}{v.block}" for v in compat.violations],
    )

    chan_perm = node_major_indices(plant.dims.outputs, plant.dims.inputs)
    p = plant.p

    def oracle(vals):
        p_z, c_z = vals
        m = p_z.shape[1]
        big = np.zeros((p + m, p + m), dtype=complex)
        big[:p, :p] = np.eye(p)
        big[:p, p:] = -p_z
        big[p:, :p] = c_z
        big[p:, p:] = np.eye(m)
        return np.linalg.inv(big[np.ix_(chan_perm, chan_perm)])

    worst = _pointwise(loop.realization, [plant, controller], oracle, args.points)
    report.add(
        "pointwise-inverse", worst <= args.rtol,
        max_deviation=worst, rel_tol=args.rtol, num_points=args.points,
    )
    identities = verify_identities(
        plant, controller, num_points=args.points, rel_tol=args.rtol)
    report.add(
        "identities", identities.passed,
        deviations=identities.deviations, rel_tol=args.rtol,
    )
    report.add(
        "stability", loop.stable, spectral_radius=loop.spectral_radius,
    )
    if args.save:
        write_system(args.save, loop.realization, graph, name=report.name)
    return _emit(report, args)


def _cmd_imc(args) -> int:
    plant, graph, name1 = read_system(args.plant)
    q, graph2, name2 = read_system(args.q)
    if graph2 != graph:
        raise InputError("plant and design parameter must share one graph")
    controller = imc_controller(plant, q)

    report = Report(name=f"imc({name1 or args.plant}, {name2 or args.q})")
    compat = check_compatibility(controller, graph, _d_mode(args))
    report.add(
        "controller-compatibility",
        compat.ok,
        mode=args.d_mode,
        states=controller.n,
        violations=[f"{v.matrix}{v.block}" for v in compat.violations],
    )
    recovered = q_param(plant, controller)
    roundtrip = transfer_equal(
        recovered, q, num_points=args.points, rel_tol=args.rtol)
    report.add(
        "parameter-roundtrip", roundtrip.equal,
        max_deviation=roundtrip.max_deviation, rel_tol=args.rtol,
        num_points=roundtrip.num_points,
    )
    if args.save:
        write_system(args.save, controller, graph, name=report.name)
    return _emit(report, args)


def _cmd_simulate(args) -> int:
    real, graph, _ = read_system(args.system)
    u = read_trajectory(args.input)
    x0 = None
    if args.x0:
        try:
            x0 = [float(v) for v in args.x0.split(",")]
        except ValueError:
            raise InputError(
                f"--x0 must be comma-separated numbers, got {args.x0!r}") from None
    if args.distributed:
        y, _, messages = simulate_distributed(real, graph, u, x0)
        print(f"messages: {messages}", file=sys.stderr)
    else:
        y, _ = simulate_lti(real, u, x0)
    if args.out:
        write_trajectory(args.out, y)
    else:
        if args.json:
            print(json.dumps(trajectory_to_obj(y)))
        else:
            sys.stdout.write(trajectory_to_csv(y))
    return 0


def _cmd_demo(args) -> int:
    if args.scenario == "river":
        q = None
        if args.q_file:
            q, _, _ = read_system(args.q_file)
        report = run_demo_river(q, num_points=args.points, rel_tol=args.rtol)
    else:
        report = run_demo_remark1()
    return _emit(report, args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netreal",
        description="Certify, compose, and simulate networked state-space systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_help="also write the JSON report to this path"):
        p.add_argument("--d-mode", choices=["strict", "edge"], default="strict",
                       help="direct-term rule: block-diagonal only, or edges too")
        p.add_argument("--json", action="store_true",
                       help="print the machine-readable report")
        p.add_argument("-o", "--out", help=out_help)

    def tolerances(p):
        p.add_argument("--points", type=int, default=16,
                       help="sample frequencies per pointwise check")
        p.add_argument("--rtol", type=float, default=1e-8,
                       help="scaled-deviation tolerance for pointwise checks")

    p = sub.add_parser("check", help="certify one system against its graph")
    p.add_argument("system", help="system JSON file")
    p.add_argument("--pbh-tol", type=float, default=1e-9,
                   help="rank-test tolerance for the PBH certificates")
    common(p)
    p.set_defaults(handler=_cmd_check)

    p = sub.add_parser("compose", help="combine systems and check the result")
    p.add_argument("first", help="system JSON file (left factor)")
    p.add_argument("second", nargs="?", help="system JSON file (right factor)")
    p.add_argument("--op", choices=["add", "mul", "inv"], required=True)
    p.add_argument("--save", help="write the composed system to this path")
    tolerances(p)
    common(p)
    p.set_defaults(handler=_cmd_compose)

    p = sub.add_parser("closeloop", help="close a feedback loop and check it")
    p.add_argument("plant", help="plant system JSON file (strictly proper)")
    p.add_argument("controller", help="controller system JSON file")
    p.add_argument("--save", help="write the closed-loop system to this path")
    tolerances(p)
    common(p)
    p.set_defaults(handler=_cmd_closeloop)

    p = sub.add_parser("imc", help="build an internal-model controller")
    p.add_argument("plant", help="plant system JSON file (strictly proper)")
    p.add_argument("q", help="design-parameter system JSON file")
    p.add_argument("--save", help="write the controller to this path")
    tolerances(p)
    common(p)
    p.set_defaults(handler=_cmd_imc)

    p = sub.add_parser("simulate", help="run a system on an input trajectory")
    p.add_argument("system", help="system JSON file")
    p.add_argument("--input", required=True,
                   help="input trajectory (.csv or .json)")
    p.add_argument("--x0", help="comma-separated initial state")
    p.add_argument("--distributed", action="store_true",
                   help="per-node run that only reads along edges")
    p.add_argument("--json", action="store_true",
                   help="print the trajectory as JSON instead of CSV")
    p.add_argument("-o", "--out",
                   help="write the output trajectory here (.csv or .json)")
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("demo", help="run a packaged scenario")
    p.add_argument("scenario", choices=["river", "remark1"])
    p.add_argument("--q-file", help="river only: design parameter override")
    tolerances(p)
    common(p)
    p.set_defaults(handler=_cmd_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else 2
    try:
        return args.handler(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NetRealError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
