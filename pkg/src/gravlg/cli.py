"""Command-line interface.

Exit status: 0 success, 1 invalid input, 2 numerical failure (including a
failed ``verify``).  Errors go to stderr as ``error[<Code>]: message``.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import closed_form, fock, io, plotting, scan, semiclassical, verify
from .errors import GravLGError, NumericalError, ValidationError
from .model import (
    PAIR_LABELS,
    SIGN_PAIRS,
    CoherentSuperposition,
    Ground,
    ModelParams,
    Squeezed,
    Thermal,
    dimensionless_from_si,
    init_label,
    reference_setup,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def _model_options() -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    g = p.add_argument_group("model (override --config)")
    g.add_argument("--config", help="JSON run configuration")
    g.add_argument("--lambda", dest="lam", type=float, help="coupling g/omega")
    g.add_argument("--lambda2", type=float, help="squared coupling (default via config)")
    g.add_argument("--omega-ratio", type=float, help="Omega/omega (default 0)")
    g.add_argument("--phi", type=float, help="measurement axis azimuth in radians (default 0)")
    g.add_argument("--init", choices=io.INIT_KINDS, help="oscillator initial state (default ground)")
    g.add_argument("--nbar", type=float, help="thermal occupation")
    g.add_argument("--zeta", type=float, help="real squeezing parameter (sign sets the axis)")
    g.add_argument("--zeta-abs", type=float, help="squeezing magnitude")
    g.add_argument("--theta", type=float, help="squeezing phase")
    g.add_argument("--xi0", type=complex, help="first coherent amplitude, e.g. 2+0j")
    g.add_argument("--xi1", type=complex, help="second coherent amplitude")
    g.add_argument("--engine", choices=io.ENGINE_CHOICES, help="evaluation engine (default closed)")
    g.add_argument("--n-fock", type=int, help="Fock truncation for the oracle (default automatic)")
    g.add_argument("--period-units", action="store_true",
                   help="read all times as multiples of pi instead of radians")
    g.add_argument("--output", "-o", help="output file or prefix")
    return p


def _config(args) -> io.RunConfig:
    if args.config:
        cfg = io.load_config(args.config)
    elif args.lam is None and args.lambda2 is None:
        raise ValidationError("give --lambda, --lambda2 or --config")
    else:
        cfg = io.RunConfig(params=ModelParams(lam=0.0))
    p = cfg.params
    if args.lam is not None:
        p = p.with_(lam=args.lam)
    if args.lambda2 is not None:
        p = ModelParams.from_lambda2(args.lambda2, big_omega_ratio=p.big_omega_ratio, phi=p.phi)
    if args.omega_ratio is not None:
        p = p.with_(big_omega_ratio=args.omega_ratio)
    if args.phi is not None:
        p = p.with_(phi=args.phi)
    if p.lam < 0:
        raise ValidationError("coupling must be >= 0")
    cfg.params = p
    if args.init is not None:
        cfg.init = _init_from_args(args)
    if args.engine is not None:
        cfg.engine = args.engine
    if args.n_fock is not None:
        cfg.n_fock = args.n_fock
    if args.output is not None:
        cfg.output = args.output
    return cfg


def _init_from_args(args):
    if args.init == "thermal":
        return Thermal(args.nbar or 0.0)
    if args.init == "squeezed":
        if args.zeta is not None:
            return Squeezed.real(args.zeta)
        return Squeezed(args.zeta_abs or 0.0, args.theta or 0.0)
    if args.init == "superposition":
        if args.xi0 is None or args.xi1 is None:
            raise ValidationError("superposition needs --xi0 and --xi1")
        return CoherentSuperposition(args.xi0, args.xi1)
    return Ground()


def _time(args, value):
    return value * math.pi if args.period_units else value


def _emit(rows, header, out):
    if out:
        io.write_rows(out, header, rows)
    else:
        print(",".join(header))
        for row in rows:
            print(",".join(x if isinstance(x, str) else io.fmt(x) for x in row))


def _sidecar(out, command, cfg, **extra):
    if out:
        meta = {"command": command, "config": cfg.to_dict() if cfg else None, **extra}
        io.write_sidecar(Path(str(out)).with_suffix(".meta.json"), meta)


def _evaluator(cfg):
    if cfg.engine == "oracle":
        fcfg = fock.FockConfig(cfg.n_fock) if cfg.n_fock else fock.auto_config(cfg.params, cfg.init)
        rep = fock.build_space(fcfg, cfg.params)
        rho = fock.initial_state(rep, cfg.init)
        return lambda t1, t2: fock.quasiprob_oracle(rep, rho, t1, t2)
    if cfg.engine == "ns":
        raise ValidationError("use the ns subcommand for the semiclassical model")
    return lambda t1, t2: closed_form.quasiprob(t1, t2, cfg.params, cfg.init)


# -- subcommands -------------------------------------------------------------------------------


def cmd_eval(args):
    cfg = _config(args)
    t1 = _time(args, args.t1 if args.t1 is not None else cfg.t1)
    t2v = args.t2 if args.t2 is not None else cfg.t2
    if t2v is None:
        raise ValidationError("eval needs --t2")
    t2 = _time(args, t2v)
    s1 = args.s1 if args.s1 is not None else cfg.s1
    s2 = args.s2 if args.s2 is not None else cfg.s2
    res = _evaluator(cfg)(t1, t2)
    if cfg.output:
        io.write_csv(res, cfg.output)
        _sidecar(cfg.output, "eval", cfg, t1=t1, t2=t2)
    print("key,value")
    print(f"q,{io.fmt(res.q[(s1, s2)])}")
    for k, v in io.quasi_rows(res):
        print(f"{k},{io.fmt(v)}")
    return 0


def _scan_grid(args, cfg):
    lo, hi = cfg.tau_range
    if args.tau_max is not None:
        lo, hi = 0.0, _time(args, args.tau_max)
    res = args.resolution or cfg.resolution
    if cfg.engine == "oracle" and not args.resolution:
        res = min(res, scan.MAX_ORACLE_RESOLUTION)
    return scan.grid_scan((lo, hi), res, cfg.params, cfg.init, cfg.engine,
                          workers=args.workers or cfg.workers, n_fock=cfg.n_fock)


def cmd_scan(args):
    cfg = _config(args)
    grid = _scan_grid(args, cfg)
    masks = {pair: scan.region_mask(grid, pair) for pair in SIGN_PAIRS}
    rows = []
    for pair in SIGN_PAIRS:
        m = masks[pair]
        qmin = float(np.nanmin(grid.values[pair]))
        rows.append([PAIR_LABELS[pair], pair[0], pair[1], m.n_negative, m.n_components, qmin])
    header = ["pair", "s1", "s2", "negative_cells", "components", "q_min"]
    _emit(rows, header, None)
    out = cfg.output
    if out:
        base = Path(out)
        grid_csv = base.with_suffix(".csv")
        mask_csv = base.with_name(base.stem + "_mask.csv")
        io.write_csv(grid, grid_csv)
        io.write_mask_csv(grid, masks, mask_csv)
        png = base.with_suffix(".png")
        plotting.write_script(base.with_suffix(".plot"), plotting.scan_script(mask_csv.name, png.name))
        if not args.no_figure:
            plotting.render_scan(grid, masks, png)
        _sidecar(base, "scan", cfg, resolution=grid.tau1_axis.size,
                 summary={PAIR_LABELS[p]: masks[p].n_negative for p in SIGN_PAIRS})
    return 0


def cmd_minima(args):
    cfg = _config(args)
    grid = _scan_grid(args, cfg)
    predicted = None
    if not isinstance(cfg.init, CoherentSuperposition):
        predicted, _ = closed_form.min_quasiprob_predicted(cfg.init, cfg.params.lam)
    rows = []
    for pair in SIGN_PAIRS:
        for comp in scan.region_mask(grid, pair).components:
            t1, t2, q = scan.refine_minimum(grid, comp.min_cell, pair)
            ratio = q / predicted if predicted else float("nan")
            rows.append([pair[0], pair[1], t1, t2, t1 / math.pi, t2 / math.pi, q,
                         predicted if predicted is not None else float("nan"), ratio])
    header = ["s1", "s2", "tau1", "tau2", "tau1_over_pi", "tau2_over_pi", "q_min", "predicted", "ratio"]
    _emit(rows, header, cfg.output)
    _sidecar(cfg.output, "minima", cfg, init=init_label(cfg.init))
    return 0


def cmd_negativity(args):
    cfg = _config(args)
    lam = cfg.params.lam
    taus = np.linspace(0.0, _time(args, args.tau_max) if args.tau_max else 2 * math.pi, args.points)
    closed = closed_form.negativity_closed(taus, lam)
    cols = {"negativity_closed": closed, "negativity_squared": closed**2}
    if args.oracle:
        fcfg = fock.FockConfig(cfg.n_fock) if cfg.n_fock else fock.auto_config(cfg.params, Ground())
        rep = fock.build_space(fcfg, cfg.params)
        psi = fock.initial_ket(rep, Ground())
        cols["negativity_oracle"] = np.array([fock.negativity_oracle(rep, psi, t) for t in taus])
    q0 = np.array([closed_form.quasiprob_negativity_form(t, cfg.params).result.q[(1, -1)] for t in taus])
    cols["q_pm_t1_zero"] = q0
    header = ["tau"] + list(cols)
    rows = [[t, *(c[i] for c in cols.values())] for i, t in enumerate(taus)]
    _emit(rows, header, cfg.output)
    if cfg.output:
        base = Path(cfg.output)
        png = base.with_suffix(".png")
        plotting.write_script(base.with_suffix(".plot"),
                              plotting.curve_script(base.name, png.name, list(cols), "omega t / pi", "N"))
        if not args.no_figure:
            plotting.render_curves(taus, {k: v for k, v in cols.items() if k != "negativity_squared"},
                                   png, r"$\omega t/\pi$", "negativity / quasiprobability")
        _sidecar(base, "negativity", cfg)
    return 0


def cmd_ns(args):
    cfg = _config(args)
    if not isinstance(cfg.init, Ground):
        raise ValidationError("the semiclassical model starts from the symmetric ground configuration")
    hi = _time(args, args.tau_max) if args.tau_max else 4 * math.pi
    axis = np.linspace(0.0, hi, args.resolution or 101)
    ns_vals, max_x = semiclassical.ns_scan(axis, cfg.params, args.dtau or semiclassical.DEFAULT_DTAU,
                                           rule=args.rule)
    quantum = closed_form.quasiprob_arrays(axis[:, None], axis[None, :], cfg.params)
    upper = axis[:, None] <= axis[None, :]
    rows = []
    for pair in SIGN_PAIRS:
        rows.append([PAIR_LABELS[pair], pair[0], pair[1], float(np.nanmin(ns_vals[pair])),
                     float(quantum[pair][upper].min()), max_x])
    header = ["pair", "s1", "s2", "ns_min", "quantum_min", "max_abs_mean_x"]
    _emit(rows, header, cfg.output)
    _sidecar(cfg.output, "ns", cfg, rule=args.rule)
    return 0


def cmd_estimate(args):
    kw = {}
    for name, key in (("m", "m"), ("rho", "rho"), ("M", "M"), ("L", "L"), ("ell", "ell"),
                      ("omega_si", "omega_si"), ("temperature", "T")):
        v = getattr(args, name)
        if v is not None:
            kw[key] = v
    if args.period is not None:
        kw["omega_si"] = 2 * math.pi / args.period
    if "M" in kw:
        kw.setdefault("rho", None)
        if kw["rho"] is not None:
            raise ValidationError("give --M or --rho, not both")
    setup = reference_setup(**kw)
    est = dimensionless_from_si(setup, approximate=setup.rho is not None)
    rows = [("lambda2_exact", est.lambda_sq)]
    if est.lambda_sq_approx is not None:
        rows.append(("lambda2_approx", est.lambda_sq_approx))
    rows += [("nbar", est.nbar), ("nbar_lambda2", est.nbar_lambda_sq)]
    _emit(rows, ["key", "value"], args.output)
    return 0


def cmd_verify(args):
    reports = verify.run_suite(args.count, args.seed)
    worst = max(reports, key=lambda r: r.max_abs_diff)
    failed = [r for r in reports if r.max_abs_diff > args.tol]
    rows = [("cases", len(reports)), ("failures", len(failed)), ("max_abs_diff", worst.max_abs_diff),
            ("tolerance", args.tol)]
    _emit(rows, ["key", "value"], args.output)
    if failed:
        raise NumericalError(f"{len(failed)} case(s) exceed {args.tol:g}; worst {worst.max_abs_diff:.3e}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    model = _model_options()
    parser = _Parser(
        prog="gravlg",
        description="Two-time quasiprobabilities for a gravitationally coupled qubit and oscillator.",
        epilog="config defaults:\n" + io.config_defaults_help(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[model], help="one quasiprobability result")
    p.add_argument("--t1", type=float, help="first time omega t1 (default 0)")
    p.add_argument("--t2", type=float, help="second time omega t2")
    p.add_argument("--s1", type=int, choices=(1, -1))
    p.add_argument("--s2", type=int, choices=(1, -1))
    p.set_defaults(func=cmd_eval)

    for name, func, helptext in (("scan", cmd_scan, "grid scan with negative-region masks"),
                                 ("minima", cmd_minima, "refined minima of every negative region")):
        p = sub.add_parser(name, parents=[model], help=helptext)
        p.add_argument("--resolution", type=int, help="points per axis (default 401; oracle 101)")
        p.add_argument("--tau-max", type=float, help="scan [0, tau_max] (default 4 pi)")
        p.add_argument("--workers", type=int, help="scan threads; output does not depend on it")
        p.add_argument("--no-figure", action="store_true", help="skip the rendered PNG")
        p.set_defaults(func=func)

    p = sub.add_parser("negativity", parents=[model], help="entanglement negativity curve")
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--tau-max", type=float, help="curve on [0, tau_max] (default 2 pi)")
    p.add_argument("--oracle", action="store_true", help="add the partial-transpose column")
    p.add_argument("--no-figure", action="store_true")
    p.set_defaults(func=cmd_negativity)

    p = sub.add_parser("ns", parents=[model], help="Newton-Schroedinger comparison")
    p.add_argument("--resolution", type=int, help="points per axis (default 101)")
    p.add_argument("--tau-max", type=float)
    p.add_argument("--dtau", type=float, help="RK4 step (default 2 pi / 2000)")
    p.add_argument("--rule", choices=("collapse", "meanfield"), default="collapse")
    p.set_defaults(func=cmd_ns)

    p = sub.add_parser("estimate", help="SI setup to lambda^2 and nbar (reference values by default)")
    p.add_argument("--m", type=float, help="particle mass in kg (default 2.2e-25)")
    p.add_argument("--rho", type=float, help="oscillator density in kg/m^3 (default 2e4)")
    p.add_argument("--M", type=float, help="oscillator mass in kg (instead of --rho)")
    p.add_argument("--L", type=float, help="separation in m (default ell)")
    p.add_argument("--ell", type=float, help="superposition split in m (default 1e-3)")
    p.add_argument("--omega-si", type=float, help="angular frequency in rad/s (default 2 pi / 10)")
    p.add_argument("--period", type=float, help="oscillation period in s")
    p.add_argument("--temperature", type=float, help="K (default 300)")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("verify", help="oracle vs closed-form agreement on random tuples")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=verify.DEFAULT_TOL)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_verify)
    return parser


def run_command(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except GravLGError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return exc.exit_status
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"error[NumericalError]: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run_command())


if __name__ == "__main__":
    main()
