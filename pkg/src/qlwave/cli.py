"""Command-line interface.

Subcommands: simulate, conv-time, conv-space, filter-check, energy-check,
local-error.  Configuration comes from a flat key-value file plus
``-o key=value`` overrides; every run writes machine-readable CSV next to
a short human summary.  Exit codes: 0 success, 1 malformed configuration,
2 a check failed, 3 the integration diverged.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from . import filters as flt
from .energy import positivity_probes, u_term, apply_l_operator, apply_position_filter
from .exceptions import DivergenceError, EstimationError, QlwaveError
from .harness import (
    ConvergenceRow,
    ExperimentPlan,
    estimate_order,
    estimate_spatial_order,
    rows_by_series,
    run_convergence_space,
    run_convergence_time,
    write_rows_csv,
    _fmt,
)
from .integrator import IntegratorConfig, StatePair, evolve
from .problem import ellipticity_report, linear_problem, model_problem, power_law_initial_data
from .reference import ReferenceConfig, local_error
from .spectral import SpectralField, derivative, inner_product

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_CHECK_FAILED = 2
EXIT_DIVERGED = 3


def load_config(path: str | None, overrides: list[str]) -> dict[str, str]:
    """Flat ``key = value`` file plus command-line overrides."""
    cfg: dict[str, str] = {}
    if path is not None:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise QlwaveError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
                key, value = line.split("=", 1)
                cfg[key.strip()] = value.strip()
    for item in overrides:
        if "=" not in item:
            raise QlwaveError(f"override {item!r} must look like key=value")
        key, value = item.split("=", 1)
        cfg[key.strip()] = value.strip()
    return cfg


def _get(cfg, key, default=None, required=False):
    if key in cfg:
        return cfg[key]
    if required:
        raise QlwaveError(f"missing required config key {key!r}")
    return default


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.replace(",", " ").split()]


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.replace(",", " ").split()]


def _problem_from(cfg):
    name = _get(cfg, "problem.name", "model")
    kappa = float(_get(cfg, "problem.kappa", "0.01"))
    if name == "model":
        return model_problem(kappa)
    if name == "linear":
        return linear_problem()
    raise QlwaveError(f"unknown problem.name {name!r} (model|linear)")


def _filter_from(cfg, default="sinc:2"):
    kind = _get(cfg, "filter.kind", default)
    if kind == "sinc" and "filter.c" in cfg:
        kind = f"sinc:{cfg['filter.c']}"
    return flt.parse_filter(kind)


def _ref_cfg_from(cfg) -> ReferenceConfig:
    return ReferenceConfig(
        refine_factor=int(_get(cfg, "reference.refine_factor", "64")),
        cross_check=_get(cfg, "reference.cross_check", "false").lower() in ("1", "true", "yes"),
    )


def _out_dir(args) -> str:
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _print_order_table(rows: list[ConvergenceRow], spatial: bool = False) -> list[str]:
    lines = []
    for (label, K), series in sorted(rows_by_series(rows).items()):
        try:
            est = estimate_spatial_order(series) if spatial else estimate_order(series)
            lines.append(
                f"{label:>10s}  K={K:<5d} order={est.slope:6.3f}  R^2={est.r_squared:.5f}"
            )
        except EstimationError as exc:
            lines.append(f"{label:>10s}  K={K:<5d} order=n/a ({exc})")
    return lines


# -- subcommands -------------------------------------------------------


def cmd_simulate(args) -> int:
    cfg = load_config(args.config, args.override)
    problem = _problem_from(cfg)
    K = int(_get(cfg, "grid.K", required=True))
    tau = float(_get(cfg, "time.tau", required=True))
    if "time.n_steps" in cfg:
        n_steps = int(cfg["time.n_steps"])
    else:
        T = float(_get(cfg, "time.T", required=True))
        n_steps = round(T / tau)
    spec = _filter_from(cfg)
    icfg = IntegratorConfig(
        tau=tau, K=K, filter=spec, max_norm=float(_get(cfg, "guard.max_norm", "1e6"))
    )
    u0, ud0 = power_law_initial_data(K)
    state = StatePair(u0, ud0)

    out = _out_dir(args)
    rows = [(0, 0.0, state.norm(1.0))]
    every = int(_get(cfg, "output.every", "1"))

    def observer(n, t, s):
        if n % every == 0:
            rows.append((n, t, s.norm(1.0)))

    try:
        final = evolve(state, problem, icfg, n_steps, observer=observer)
    except DivergenceError as exc:
        print(f"diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    with open(os.path.join(out, "trajectory.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("n", "t", "pair_norm_h2h1"))
        for n, t, norm in rows:
            writer.writerow((n, _fmt(t), _fmt(norm)))
    print(
        f"simulate: {problem.name} kappa={problem.kappa:g} K={K} tau={tau:g} "
        f"steps={n_steps} filter={spec.label}"
    )
    print(f"final |(u, u_t)|_1 = {final.norm(1.0):.12g} (initial {state.norm(1.0):.12g})")
    print(f"wrote {os.path.join(out, 'trajectory.csv')}")
    return EXIT_OK


def _plan_from(cfg, args) -> ExperimentPlan:
    return ExperimentPlan(
        problem=_problem_from(cfg),
        K_list=_ints(_get(cfg, "sweep.K", required=True)),
        tau_list=_floats(_get(cfg, "sweep.tau", required=True)),
        T=float(_get(cfg, "time.T", required=True)),
        filters=[flt.parse_filter(t) for t in _get(cfg, "sweep.filters", "sinc:2").split(",")],
        out_dir=args.out,
        max_norm=float(_get(cfg, "guard.max_norm", "1e6")),
    )


def cmd_conv_time(args) -> int:
    cfg = load_config(args.config, args.override)
    plan = _plan_from(cfg, args)
    rows = run_convergence_time(plan, _ref_cfg_from(cfg))
    out = _out_dir(args)
    path = os.path.join(out, "conv_time.csv")
    write_rows_csv(rows, path)
    print(f"wrote {path} ({len(rows)} rows)")
    for line in _print_order_table(rows):
        print(line)
    return EXIT_OK


def cmd_conv_space(args) -> int:
    cfg = load_config(args.config, args.override)
    plan = _plan_from(cfg, args)
    K_ref = int(_get(cfg, "grid.K_ref", required=True))
    rows = run_convergence_space(plan, K_ref)
    out = _out_dir(args)
    path = os.path.join(out, "conv_space.csv")
    write_rows_csv(rows, path)
    print(f"wrote {path} ({len(rows)} rows)")
    for line in _print_order_table(rows, spatial=True):
        print(line)
    return EXIT_OK


def cmd_filter_check(args) -> int:
    spec = flt.parse_filter(args.filter)
    report = flt.check_assumptions(spec, delta=args.delta, a0=args.A0)
    print(f"filter {spec.label}: c0={spec.c0:g}")
    print(f"  bounds (|phi|<=1, quadratic closeness): {'pass' if report.assumption1_ok else 'FAIL'}")
    print(f"  sinc compatibility psi1 = sinc*phi:     {'pass' if report.assumption2_ok else 'FAIL'}")
    print(
        f"  damping A0*sin^2(xi/2)*phi^2 <= 1-delta: {'pass' if report.assumption3_ok else 'FAIL'}"
        f"  (margin {report.worst_margin:.6g} at xi={report.worst_xi:.6g})"
    )
    print(f"  smallest admissible sinc parameter c:   {flt.min_c_for(args.A0, args.delta):.6g}")
    return EXIT_OK if report.all_ok else EXIT_CHECK_FAILED


def cmd_energy_check(args) -> int:
    cfg = load_config(args.config, args.override)
    problem = _problem_from(cfg)
    K = int(_get(cfg, "grid.K", "32"))
    tau = float(_get(cfg, "time.tau", "1e-3"))
    spec = _filter_from(cfg)
    n_probes = int(_get(cfg, "energy.probes", "200"))
    icfg = IntegratorConfig(tau=tau, K=K, filter=spec)
    u0, _ = power_law_initial_data(K)

    rep = ellipticity_report(problem, u0)
    if rep.hyperbolicity_lost:
        print(f"hyperbolicity lost: min 1 + kappa*a(u) = {rep.delta_est:.3e}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    delta = rep.delta_est

    out = _out_dir(args)
    path = os.path.join(out, "energy_margins.csv")
    worst = np.inf
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("probe", "margin"))
        for label, margin in positivity_probes(u0, problem, icfg, n_probes, delta):
            worst = min(worst, margin)
            writer.writerow((label, _fmt(margin)))

    uf = apply_position_filter(u0, cfg=icfg)
    rng = np.random.default_rng(7)
    resid = 0.0
    for _ in range(16):
        c = rng.standard_normal(2 * K + 1) + 1j * rng.standard_normal(2 * K + 1)
        e = SpectralField(0.5 * (c + np.conj(c[::-1])))
        ef = apply_position_filter(e, icfg)
        lhs = problem.kappa * u_term(ef, uf, problem, icfg, projected=False)
        exx = derivative(e, 2)
        rhs = inner_product(apply_l_operator(uf, exx, problem, icfg), exx, s=0.0)
        resid = max(resid, abs(lhs - rhs) / (1.0 + abs(lhs)))

    print(f"energy-check: {problem.name} kappa={problem.kappa:g} K={K} tau={tau:g} "
          f"filter={spec.label}")
    print(f"  ellipticity: delta_est={rep.delta_est:.6g} A0_est={rep.A0_est:.6g}")
    print(f"  worst Rayleigh margin vs delta/8: {worst:.6g}")
    print(f"  energy/operator identity residual: {resid:.3e}")
    print(f"  wrote {path}")
    ok = worst >= 0.0 and resid <= 1e-11
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_local_error(args) -> int:
    cfg = load_config(args.config, args.override)
    problem = _problem_from(cfg)
    K = int(_get(cfg, "grid.K", "64"))
    spec = _filter_from(cfg)
    taus = _floats(_get(cfg, "local.tau", "0.0625 0.03125 0.015625 0.0078125"))
    ref_cfg = _ref_cfg_from(cfg)
    u0, ud0 = power_law_initial_data(K)
    state = StatePair(u0, ud0)

    out = _out_dir(args)
    path = os.path.join(out, "local_error.csv")
    rows = []
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("tau", "err_h2h1"))
        for tau in sorted(taus, reverse=True):
            err = local_error(problem, state, tau, K, spec, ref_cfg)
            rows.append(ConvergenceRow(spec.label, K, tau, err))
            writer.writerow((_fmt(tau), _fmt(err)))
    est = estimate_order(rows)
    print(f"local-error: K={K} filter={spec.label} kappa={problem.kappa:g}")
    print(f"  one-step order {est.slope:.3f} (R^2={est.r_squared:.5f})")
    print(f"  wrote {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qlwave",
        description="Trigonometric integrators for 1-D periodic quasilinear wave equations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="flat key=value config file")
        p.add_argument("-o", "--override", action="append", default=[],
                       help="override a config key: -o key=value")
        p.add_argument("--out", default="out", help="output directory (default: ./out)")

    common(sub.add_parser("simulate", help="run one trajectory"))
    common(sub.add_parser("conv-time", help="temporal convergence sweep"))
    common(sub.add_parser("conv-space", help="spatial convergence sweep"))
    common(sub.add_parser("energy-check", help="energy positivity and identity margins"))
    common(sub.add_parser("local-error", help="one-step error vs tau"))

    pf = sub.add_parser("filter-check", help="sampled filter admissibility check")
    pf.add_argument("--filter", required=True, help="impulse | hl | gh | sinc:<c>")
    pf.add_argument("--A0", type=float, required=True, help="amplitude bound")
    pf.add_argument("--delta", type=float, required=True, help="hyperbolicity margin in (0,1)")
    return parser


_COMMANDS = {
    "simulate": cmd_simulate,
    "conv-time": cmd_conv_time,
    "conv-space": cmd_conv_space,
    "filter-check": cmd_filter_check,
    "energy-check": cmd_energy_check,
    "local-error": cmd_local_error,
}


def cli_main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except DivergenceError as exc:
        print(f"diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (QlwaveError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
