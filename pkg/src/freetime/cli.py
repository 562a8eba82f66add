"""Command-line interface.

Exit codes: 0 success with all checks passed, 1 usage error, 2 numerical
failure, 3 a verification check failed.
"""
import argparse
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io
from .action import action
from .central import (HomotheticSpec, find_minimal_configuration, homothetic_action,
                      homothetic_path)
from .configuration import max_body_distance, moment_of_inertia, potential
from .dynamics import (diagnostics, fit_power_law, g_monotonicity, integrate_newton,
                       lagrange_jacobi_residual, parabolic_diagnostic)
from .errors import CollisionTrapped, FreeTimeError, NonConvergence
from .free_time import minimize_free_time, phi, verify_free_time_minimizer
from .minimize import MinimizeOptions, minimize_fixed_time

DEFAULTS = {
    "nodes": 512,
    "tol": 1e-8,
    "restarts": 4,
    "max_iters": 5000,
    "seed": 0,
    "collision_guard": 1e-9,
    "integrator_tol": 1e-12,
    "samples": 2001,
    "lambda_list": [0.5, 2.0, 4.0],
    "scaling_rtol": 2e-3,
    "energy_rtol": 1e-3,
    "central_residual": 1e-6,
    "lagrange_jacobi": 1e-4,
}
OUTPUT_DIR_ENV = "FREETIME_OUTPUT_DIR"
COMMANDS = ("minimize", "free-minimize", "phi", "central-config", "homothetic", "integrate",
            "diagnose", "verify-ftm", "scaling-check")
EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_CHECK = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{message}\n\n{self.format_usage()}")


def build_parser():
    p = _Parser(prog="freetime", description="Free time minimizers of the Newtonian N-body problem.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--problem", type=Path, help="problem file (JSON)")
    p.add_argument("--from", dest="from_", metavar="NAME", help="start configuration")
    p.add_argument("--to", metavar="NAME", help="end configuration")
    p.add_argument("--tau", type=float, help="transfer time for fixed-time minimization")
    p.add_argument("--nodes", type=int, help="path nodes or output samples")
    p.add_argument("--tol", type=float, help="gradient tolerance (integrator tolerance for integrate/diagnose)")
    p.add_argument("--max-iters", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--t0", type=float)
    p.add_argument("--t1", type=float)
    p.add_argument("--lambda-list", help="comma separated scale factors")
    p.add_argument("--out", type=Path, help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    return p


class _Settings:
    """CLI flags over problem-file options over DEFAULTS."""

    def __init__(self, args, problem):
        self.args = args
        self.options = problem.options if problem is not None else {}

    def get(self, key):
        value = getattr(self.args, key, None)
        if value is not None:
            return value
        if key in self.options:
            return self.options[key]
        return DEFAULTS.get(key)

    def minimize_options(self):
        return MinimizeOptions(max_iters=int(self.get("max_iters")),
                               grad_tol=float(self.get("tol")),
                               restarts=int(self.get("restarts")),
                               rng_seed=int(self.get("seed")),
                               collision_guard=float(self.get("collision_guard")))


def _path_doc(path):
    return {"times": path.times, "nodes": path.nodes}


def _check(name, passed, value, tolerance):
    return {"name": name, "passed": bool(passed), "value": float(value),
            "tolerance": float(tolerance)}


def _lower_bound_check(sys, x, y, A, tau):
    lhs, rhs = 2 * A * tau, sys.min_mass * max_body_distance(x, y) ** 2
    return _check("action_lower_bound", lhs >= rhs, lhs - rhs, 0.0)


def _endpoints(problem, args):
    if args.from_ is None or args.to is None:
        raise UsageError("this command needs --from and --to")
    return problem.configuration(args.from_), problem.configuration(args.to)


def cmd_minimize(problem, s):
    sys_ = problem.system()
    x, y = _endpoints(problem, s.args)
    tau = s.get("tau")
    if tau is None:
        raise UsageError("minimize needs --tau")
    n = int(s.get("nodes"))
    r = minimize_fixed_time(sys_, x, y, float(tau), n, s.minimize_options())
    out = {"action": r.action_value, "grad_norm": r.grad_norm, "iterations": r.iterations,
           "converged": r.converged, "min_separation": r.min_separation,
           "path": _path_doc(r.path)}
    return out, [_check("converged", r.converged, r.grad_norm, float(s.get("tol"))),
                 _lower_bound_check(sys_, x, y, r.action_value, float(tau))], None


def cmd_free_minimize(problem, s):
    sys_ = problem.system()
    x, y = _endpoints(problem, s.args)
    r = minimize_free_time(sys_, x, y, int(s.get("nodes")), s.minimize_options())
    mid = r.path.nodes[len(r.path) // 2]
    e_tol = DEFAULTS["energy_rtol"] * potential(sys_, mid)
    out = {"phi": r.phi_value, "tau_star": r.tau_star, "energy_residual": r.energy_residual,
           "method": r.method, "bracket": [r.bracket.t_lo, r.bracket.t_hi],
           "probes": [[p.tau, p.phi, p.mean_energy] for p in r.probes],
           "probe_columns": ["tau [time]", "phi [action]", "mean_energy [energy]"],
           "path": _path_doc(r.path)}
    checks = [_check("zero_energy", r.energy_residual <= e_tol, r.energy_residual, e_tol),
              _lower_bound_check(sys_, x, y, r.phi_value, r.tau_star)]
    return out, checks, None


def cmd_phi(problem, s):
    sys_ = problem.system()
    x, y = _endpoints(problem, s.args)
    return {"phi": phi(sys_, x, y, int(s.get("nodes")), s.minimize_options())}, [], None


def _central(problem, s):
    sys_ = problem.system()
    opts = replace(s.minimize_options(), grad_tol=min(float(s.get("tol")), 1e-10))
    return sys_, find_minimal_configuration(sys_, seed=int(s.get("seed")), opts=opts)


def cmd_central_config(problem, s):
    sys_, r = _central(problem, s)
    spec = HomotheticSpec.from_configuration(sys_, r.a0)
    I_err = abs(moment_of_inertia(sys_, r.a0) - 1)
    out = {"a0": r.a0, "U0": r.U0, "mu0": spec.mu0, "tangent_residual": r.tangent_residual,
           "central_residual": r.central_residual}
    tol = DEFAULTS["central_residual"]
    return out, [_check("central_residual", r.central_residual <= tol, r.central_residual, tol),
                 _check("normalized", I_err <= 1e-10, I_err, 1e-10)], None


def cmd_homothetic(problem, s):
    sys_ = problem.system()
    if s.args.from_ is not None:
        spec = HomotheticSpec.from_configuration(sys_, problem.configuration(s.args.from_))
    else:
        spec = HomotheticSpec.from_configuration(sys_, _central(problem, s)[1].a0)
    t0, t1 = float(s.get("t0") or 1.0), float(s.get("t1") or 8.0)
    path = homothetic_path(spec, t0, t1, int(s.get("nodes")))
    exact, discrete = homothetic_action(spec, t0, t1), action(sys_, path)
    report = verify_free_time_minimizer(sys_, path)
    out = {"a0": spec.a0, "U0": spec.U0, "mu0": spec.mu0, "t0": t0, "t1": t1,
           "action_exact": exact, "action_discrete": discrete, "path": _path_doc(path)}
    checks = [_check(c.name, c.passed, c.value, c.tolerance) for c in report.checks]
    return out, checks, None


def _sample_times(t0, t1, n):
    # log spacing resolves the fast early phase of expanding motions
    if t0 > 0:
        return np.geomspace(t0, t1, n)
    return np.linspace(t0, t1, n)


def _integrate(problem, s):
    sys_ = problem.system()
    if s.args.from_ is None:
        raise UsageError("this command needs --from")
    x0 = problem.configuration(s.args.from_)
    if s.args.from_ not in problem.velocities:
        raise UsageError(f"no velocities named {s.args.from_!r} in the problem file")
    v0 = problem.velocities[s.args.from_]
    t0, t1 = s.get("t0"), s.get("t1")
    if t0 is None or t1 is None:
        raise UsageError("this command needs --t0 and --t1")
    n = int(s.args.nodes or s.options.get("samples") or DEFAULTS["samples"])
    tol = float(s.args.tol if s.args.tol is not None else s.get("integrator_tol"))
    traj = integrate_newton(sys_, x0, v0, (float(t0), float(t1)), tol=tol,
                            t_eval=_sample_times(float(t0), float(t1), n))
    return sys_, traj


def cmd_integrate(problem, s):
    _, traj = _integrate(problem, s)
    if traj.collision_approach:
        raise _NumericalFailure("CollisionApproach: integration stopped near a collision",
                                io.trajectory_document(traj))
    if s.args.format == "csv":
        raise UsageError("integrate emits JSON only; use diagnose --format csv for series")
    return {"trajectory": io.trajectory_document(traj)}, [], None


def cmd_diagnose(problem, s):
    sys_, traj = _integrate(problem, s)
    if traj.collision_approach:
        raise _NumericalFailure("CollisionApproach: integration stopped near a collision", None)
    series = diagnostics(sys_, traj)
    lj = lagrange_jacobi_residual(sys_, traj, series)
    out = {"lagrange_jacobi_residual": lj, "max_energy_drift": traj.max_energy_drift,
           "com_drift": float(series.com.max())}
    checks = [_check("lagrange_jacobi", lj <= DEFAULTS["lagrange_jacobi"], lj,
                     DEFAULTS["lagrange_jacobi"])]
    try:
        fI = fit_power_law(series.times, series.I)
        fU = fit_power_law(series.times, series.U)
        out["fit_I"] = {"exponent": fI.exponent, "coefficient": fI.coefficient,
                        "r_squared": fI.r_squared, "window": list(fI.window)}
        out["fit_U"] = {"exponent": fU.exponent, "coefficient": fU.coefficient,
                        "r_squared": fU.r_squared, "window": list(fU.window)}
    except ValueError as exc:
        out["fit_error"] = str(exc)
    par = parabolic_diagnostic(series, 0.5)
    out["parabolic"] = {"T_tail_max": par.T_tail_max, "decreasing": par.decreasing}
    scale = np.max(np.abs(series.U))
    if abs(traj.energy0) <= 1e-8 * scale:
        mono = g_monotonicity(series)
        out["g_min_increment"] = mono.min_increment
        checks.append(_check("g_nondecreasing", mono.is_nondecreasing, mono.min_increment, -1e-8))
    if s.args.format == "csv":
        return out, checks, io.serialize_series(series, "csv")
    out["series"] = io.series_document(series)
    return out, checks, None


def cmd_verify_ftm(problem, s):
    if problem.path is None:
        raise UsageError("verify-ftm needs a problem file with a 'path' block")
    report = verify_free_time_minimizer(problem.system(), problem.path)
    checks = [_check(c.name, c.passed, c.value, c.tolerance) for c in report.checks]
    return {"passed": report.passed, "failed": report.failed()}, checks, None


def cmd_scaling_check(problem, s):
    sys_ = problem.system()
    x, y = _endpoints(problem, s.args)
    raw = s.get("lambda_list")
    lams = [float(v) for v in raw.split(",")] if isinstance(raw, str) else [float(v) for v in raw]
    n = int(s.get("nodes"))
    opts = s.minimize_options()
    base = phi(sys_, x, y, n, opts)
    rows, worst = [], 0.0
    for lam in lams:
        val = phi(sys_, lam * x, lam * y, n, opts)
        dev = abs(val - lam**0.5 * base) / base
        worst = max(worst, dev)
        rows.append([lam, val, lam**0.5 * base, dev])
    tol = DEFAULTS["scaling_rtol"]
    out = {"phi": base, "columns": ["lambda", "phi_scaled", "sqrt(lambda)*phi", "rel_dev"],
           "rows": rows, "max_rel_dev": worst}
    return out, [_check("scaling", worst <= tol, worst, tol)], None


HANDLERS = {
    "minimize": cmd_minimize, "free-minimize": cmd_free_minimize, "phi": cmd_phi,
    "central-config": cmd_central_config, "homothetic": cmd_homothetic,
    "integrate": cmd_integrate, "diagnose": cmd_diagnose, "verify-ftm": cmd_verify_ftm,
    "scaling-check": cmd_scaling_check,
}


class _NumericalFailure(Exception):
    def __init__(self, message, payload):
        super().__init__(message)
        self.payload = payload


def _emit(data, out):
    if out is None:
        sys.stdout.write(data.decode())
        return
    base = os.environ.get(OUTPUT_DIR_ENV)
    target = Path(base) / out if base and not out.is_absolute() else out
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_bytes(data)


def run_command(argv):
    """Run one CLI invocation and return its exit code."""
    start = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    raw = b""
    problem = None
    try:
        if args.problem is None:
            raise UsageError("--problem is required")
        raw = args.problem.read_bytes()
        problem = io.parse_problem(raw)
        if args.format == "csv" and args.command not in ("diagnose", "integrate"):
            raise UsageError("--format csv is only available for series output (diagnose)")
        settings = _Settings(args, problem)
        outputs, checks, alt = HANDLERS[args.command](problem, settings)
        code = EXIT_OK if all(c["passed"] for c in checks) else EXIT_CHECK
        status = "ok" if code == EXIT_OK else "check failed"
    except (UsageError, io.ProblemError, OSError) as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (_NumericalFailure, NonConvergence, CollisionTrapped, FreeTimeError) as exc:
        sys.stderr.write(f"numerical failure: {type(exc).__name__}: {exc}\n")
        outputs, checks, alt = {"error": f"{type(exc).__name__}: {exc}"}, [], None
        code, status = EXIT_NUMERICAL, "numerical failure"
        settings = _Settings(args, problem)
    except ValueError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE

    if alt is not None:
        data = alt
    else:
        report = {
            "command": ["freetime"] + list(argv),
            "input_digest": io.digest(raw),
            "seed": int(settings.get("seed")),
            "defaults": DEFAULTS,
            "status": status,
            "outputs": outputs,
            "checks": checks,
        }
        data = io.canonical_json(report).encode()
    _emit(data, args.out)
    for c in checks:
        if not c["passed"]:
            sys.stderr.write(f"check failed: {c['name']} (value {c['value']:.6g}, "
                             f"tolerance {c['tolerance']:.6g})\n")
    sys.stderr.write(f"wall clock: {time.perf_counter() - start:.3f} s\n")
    return code


def main():
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
