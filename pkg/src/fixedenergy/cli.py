"""Command-line driver.

Exit codes: 0 ok, 2 input error, 3 domain error, 4 no convergence,
5 check failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import experiment
from .errors import (
    DimensionMismatch,
    DomainError,
    EmptyWindow,
    KappaDomainError,
    NoConvergence,
    PolePassageError,
    StepFailure,
)
from .formats import InputError, read_potential, read_shifts, shifts_csv_text
from .inversion import NewtonConfig, newton_solve
from .perturb import PerturbationSpec, perturbation_offsets
from .scattering import (
    PhaseShiftSet,
    PiecewiseConstantPotential,
    kappa_from_potential,
    phase_shifts,
)

EXIT_OK, EXIT_INPUT, EXIT_DOMAIN, EXIT_NOCONV, EXIT_CHECK = 0, 2, 3, 4, 5

log = logging.getLogger("fixedenergy")


class CliExit(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _emit(text: str, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _resolve_k(flag, *candidates):
    for k in (flag, *candidates):
        if k is not None:
            if not k > 0:
                raise CliExit(EXIT_INPUT, f"k must be positive, got {k}")
            return float(k)
    raise CliExit(EXIT_INPUT, "wave number unknown: pass --k or include 'k' in the potential file")


def _kappas(pot, k):
    try:
        return kappa_from_potential(pot, k)
    except KappaDomainError as exc:
        raise CliExit(EXIT_DOMAIN, str(exc)) from exc


# -- forward ---------------------------------------------------------------


def cmd_forward(args):
    pot, k_file = read_potential(args.potential)
    k = _resolve_k(args.k, k_file)
    kv = _kappas(pot, k)
    try:
        shifts = phase_shifts(kv, pot.breakpoints, args.lmax + 1)
    except PolePassageError as exc:
        raise CliExit(EXIT_DOMAIN, str(exc)) from exc
    _emit(shifts_csv_text(shifts.deltas), args.out)
    return EXIT_OK


# -- perturb ---------------------------------------------------------------


def cmd_perturb(args):
    deltas, tokens = read_shifts(args.shifts)
    spec = PerturbationSpec(args.start_l, args.magnitude, args.seed)
    offsets = perturbation_offsets(deltas.size, spec)
    kept = [tok if off == 0.0 else None for tok, off in zip(tokens, offsets)]
    _emit(shifts_csv_text(deltas + offsets, kept), args.out)
    return EXIT_OK


# -- invert ----------------------------------------------------------------


def _parse_grid(spec, n):
    """Breakpoints from ``uniform:<dr>``, a comma list, or a potential JSON path."""
    if spec is None:
        return experiment.STEP * np.arange(1, n + 1), None
    if spec.startswith("uniform:"):
        try:
            dr = float(spec.split(":", 1)[1])
        except ValueError as exc:
            raise CliExit(EXIT_INPUT, f"bad grid spec {spec!r}") from exc
        return dr * np.arange(1, n + 1), None
    if "," in spec:
        try:
            return np.array([float(t) for t in spec.split(",")]), None
        except ValueError as exc:
            raise CliExit(EXIT_INPUT, f"bad grid spec {spec!r}") from exc
    pot, k = read_potential(spec)
    return pot.breakpoints, k


def _initial_potential(init, truth_path, breakpoints):
    n = breakpoints.size
    if init == "zero":
        return PiecewiseConstantPotential(breakpoints, np.zeros(n))
    if init == "truth":
        if truth_path:
            pot, _ = read_potential(truth_path)
            values = pot.values
        else:
            values = experiment.q_orig_formula(n)
        if values.size != n:
            raise CliExit(EXIT_INPUT, f"truth potential has {values.size} intervals, grid has {n}")
        return PiecewiseConstantPotential(breakpoints, values)
    if init.startswith("file:"):
        pot, _ = read_potential(init[5:])
        if pot.n_intervals != n:
            raise CliExit(EXIT_INPUT, f"initial potential has {pot.n_intervals} intervals, grid has {n}")
        return PiecewiseConstantPotential(breakpoints, pot.values)
    raise CliExit(EXIT_INPUT, f"--init must be zero, truth or file:<path>, got {init!r}")


def cmd_invert(args):
    deltas, _ = read_shifts(args.shifts)
    breakpoints, k_grid = _parse_grid(args.grid, deltas.size)
    if breakpoints.size != deltas.size:
        raise CliExit(
            EXIT_INPUT,
            f"dimension mismatch: {deltas.size} phase shifts for {breakpoints.size} intervals",
        )
    truth_k = read_potential(args.truth)[1] if args.truth else None
    k = _resolve_k(args.k, k_grid, truth_k, experiment.K)
    try:
        cfg = NewtonConfig(args.gamma, args.eps, args.eps1, args.max_iter)
        init = _kappas(_initial_potential(args.init, args.truth, breakpoints), k)
    except DomainError as exc:
        raise CliExit(EXIT_INPUT if not isinstance(exc, KappaDomainError) else EXIT_DOMAIN, str(exc)) from exc

    target = PhaseShiftSet(k, deltas)
    code = EXIT_OK
    try:
        kv, trace = newton_solve(target, breakpoints, init, cfg)
    except NoConvergence as exc:
        kv, trace, code = exc.kappa, exc.trace, EXIT_NOCONV
        log.error("%s", exc)
    except StepFailure as exc:
        kv, trace, code = exc.trace.final_kappa, exc.trace, EXIT_DOMAIN
        log.error("%s", exc)
    except (DomainError, DimensionMismatch) as exc:
        raise CliExit(EXIT_DOMAIN, str(exc)) from exc

    recomputed = phase_shifts(kv, breakpoints, deltas.size).deltas
    report = {
        "k": k,
        "breakpoints": [float(r) for r in breakpoints],
        "q": [float(q) for q in kv.potential_values()],
        "kappa": [float(x) for x in kv.kappas],
        "converged": trace.converged,
        "iterations": trace.iterations,
        "residual_l2": trace.residual_l2[-1],
        "residual_sup": trace.residual_sup[-1],
        "truncation_events": [int(t) for t in trace.truncation_events],
        "target_shifts": [float(d) for d in deltas],
        "recomputed_shifts": [float(d) for d in recomputed],
        "config": {"gamma": cfg.gamma, "eps": cfg.eps, "eps1": cfg.eps1, "max_iter": cfg.max_iter},
        "trace": trace.to_dict(),
    }
    _emit(_dump(report), args.out)
    return code


# -- table1 ----------------------------------------------------------------


def cmd_table1(args):
    cfg = NewtonConfig(args.gamma, args.eps, args.eps1, args.max_iter)
    report = experiment.run_table1(cfg)
    sys.stdout.write(experiment.format_table1(report) + "\n")
    if args.out:
        _emit(_dump(report), args.out)
    return EXIT_OK if report["passed"] else EXIT_CHECK


# -- check -----------------------------------------------------------------


def run_checks(pot: PiecewiseConstantPotential, k: float, lmax: int = 8, with_range: bool = False) -> dict:
    from . import verification as ver
    from .sensitivity import jacobian

    kv = kappa_from_potential(pot, k)
    checks = []

    sweep = ver.wronskian_sweep()
    checks.append({
        "name": "wronskian",
        "max_error": sweep["wronskian_max_abs_err"],
        "tolerance": 1e-10,
        "passed": sweep["wronskian_max_abs_err"] < 1e-10,
    })

    n = pot.n_intervals
    J = jacobian(kv, pot.breakpoints, n)
    F = ver.finite_difference_jacobian(kv, pot.breakpoints, n, fd_step=1e-7, dps=50)
    mask = np.abs(F) > 1e-12
    jerr = float(np.max(np.abs(J - F)[mask] / np.abs(F)[mask])) if mask.any() else 0.0
    checks.append({"name": "jacobian_vs_fd", "max_rel_error": jerr, "tolerance": 1e-5, "passed": jerr < 1e-5})

    ls = list(range(lmax + 1))
    transfer = phase_shifts(kv, pot.breakpoints, lmax + 1).deltas
    oracle = np.array([s.delta for s in ver.ode_phase_shifts(pot, k, ls)])
    oerr = float(np.max(np.abs(transfer - oracle)))
    checks.append({"name": "transfer_vs_ode", "max_abs_error": oerr, "tolerance": 1e-7, "passed": oerr < 1e-7})

    if with_range:
        entry = {"name": "range_estimate", "support_radius": pot.radius}
        try:
            shifts = phase_shifts(kv, pot.breakpoints, 31)
            diag = ver.range_estimate(shifts, range(15, 31), pot=pot)
            final = diag.final_estimate
            entry.update({
                "ls": diag.ls.tolist(),
                "estimates": [None if not np.isfinite(a) else float(a) for a in diag.estimates],
                "final_estimate": final,
                "relative_deviation": abs(final - pot.radius) / pot.radius,
                "monotone_increasing": diag.is_monotone_increasing(),
                "warning": diag.warning,
            })
            entry["passed"] = diag.warning is not None or entry["relative_deviation"] <= 0.35
        except EmptyWindow as exc:
            entry.update({"informational": f"EmptyWindow: {exc}", "passed": True})
        checks.append(entry)

    return {"k": k, "checks": checks, "passed": all(c["passed"] for c in checks)}


def cmd_check(args):
    pot, k_file = read_potential(args.potential)
    k = _resolve_k(args.k, k_file)
    _kappas(pot, k)
    try:
        report = run_checks(pot, k, args.lmax, args.range)
    except PolePassageError as exc:
        raise CliExit(EXIT_DOMAIN, str(exc)) from exc
    _emit(_dump(report), args.out)
    return EXIT_OK if report["passed"] else EXIT_CHECK


# -- parser ----------------------------------------------------------------


def _newton_flags(p):
    d = NewtonConfig()
    p.add_argument("--gamma", type=float, default=d.gamma, help="Newton damping step (default %(default)s)")
    p.add_argument("--eps", type=float, default=d.eps, help="stop when ||Phi||_2 < eps (default %(default)s)")
    p.add_argument("--eps1", type=float, default=d.eps1, help="pivot truncation threshold (default %(default)s)")
    p.add_argument("--max-iter", type=int, default=d.max_iter, dest="max_iter")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fixedenergy", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("forward", help="phase shifts of a potential file")
    p.add_argument("potential")
    p.add_argument("--k", type=float)
    p.add_argument("--lmax", type=int, default=9)
    p.add_argument("--out")
    p.set_defaults(func=cmd_forward)

    p = sub.add_parser("perturb", help="add seeded uniform noise to phase shifts")
    p.add_argument("shifts")
    p.add_argument("--start-l", type=int, default=5, dest="start_l")
    p.add_argument("--magnitude", type=float, default=1e-5)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out")
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("invert", help="reconstruct a step potential from phase shifts")
    p.add_argument("shifts")
    p.add_argument("--grid", help="uniform:<dr>, comma-separated breakpoints, or a potential JSON path")
    p.add_argument("--k", type=float)
    p.add_argument("--init", default="truth", help="zero | truth | file:<path> (default %(default)s)")
    p.add_argument("--truth", help="potential JSON used by --init truth (default: the 10-step experiment)")
    _newton_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("table1", help="rerun the ten-interval ambiguity experiment")
    _newton_flags(p)
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("check", help="numerical self-checks for a potential")
    p.add_argument("potential")
    p.add_argument("--k", type=float)
    p.add_argument("--lmax", type=int, default=8)
    p.add_argument("--range", action="store_true", help="include the high-l range estimate")
    p.add_argument("--out")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CliExit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
