"""Command-line front end.

    prespa simulate | sweep | lifetime | budget | wigner | plan | heating-fit
        [--config PATH] [--out DIR] [--jobs N] [--tol X]

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, budget, cascade, codes, config, heating, hilbert, planner, solver, tomography
from .model import TWO_PI, build_effective_model

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

UNITS = "frequencies cyclic (MHz, kHz where noted); cascade rates angular rad/us; times us; budget rates 1/ms"

log = logging.getLogger("prespa")


def _metadata(cfg: config.RunConfig, command: str) -> dict:
    return {"command": command, "config_hash": cfg.hash(), "version": __version__, "units": UNITS}


def _header_lines(meta: dict) -> list[str]:
    return [f"{k}: {v}" for k, v in meta.items()]


def _write_json(path: Path, meta: dict, payload: dict) -> None:
    path.write_text(json.dumps({"metadata": meta, **payload}, indent=2, sort_keys=True, default=_jsonable) + "\n")


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"cannot serialise {type(obj)}")


def _write_columns(path: Path, meta: dict, columns: dict[str, np.ndarray]) -> None:
    with open(path, "w", newline="") as fh:
        for line in _header_lines(meta):
            fh.write(f"# {line}\n")
        w = csv.writer(fh)
        names = list(columns)
        w.writerow(names)
        for row in zip(*(columns[n] for n in names)):
            w.writerow([f"{v:.10g}" for v in row])


def _tolerances(cfg: config.RunConfig) -> tuple[float, float]:
    return cfg.solver.rtol, cfg.solver.atol


def cmd_simulate(cfg: config.RunConfig, out: Path, jobs: int) -> dict:
    meta = _metadata(cfg, "simulate")
    s = cfg.simulate
    grid = solver.TimeGrid(0.0, s.t_end, s.n_points)
    rtol, atol = _tolerances(cfg)

    def run(n):
        return n, solver.conversion_curve(cfg.system, cfg.drives, n, grid, cfg.dims, thermal=s.thermal, rtol=rtol, atol=atol)

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as ex:
        results = list(ex.map(run, s.initial_even_fock))
    summary = {}
    for n, curve in results:
        _write_columns(out / f"conversion_from_{n}.csv", meta, curve.as_columns())
        end = curve.at(s.t_end)
        summary[str(n)] = {
            "converted_at_end": end["converted"],
            "p_ng_at_end": end["p_g"],
            "transmon_e_at_end": end["transmon_e"],
            "halftime_us": curve.halftime,
            "trace_drift": curve.trace_drift,
        }
        ht = "n/a" if curve.halftime is None else f"{curve.halftime:.3f} us"
        print(f"start |{n},g,0>: P(|{n + 1},g>) at {s.t_end:g} us = {end['p_g']:.4f}, halftime {ht}")
    _write_json(out / "simulate.json", meta, {"results": summary})
    return summary


def cmd_sweep(cfg: config.RunConfig, out: Path, jobs: int) -> dict:
    meta = _metadata(cfg, "sweep")
    kappa = TWO_PI * cfg.system.kappa_r
    sw = cfg.sweep
    n = sw.n_grid
    o1 = np.linspace(0.0, sw.omega1_max * kappa, n)
    o2 = np.linspace(0.0, sw.omega2_max * kappa, n)

    def row(i):
        rates = np.empty(n)
        mask = np.empty(n, dtype=bool)
        for j, b in enumerate(o2):
            m = cascade.CascadeMatrix(o1[i], b, kappa)
            rates[j] = cascade.analyze(m).rate
            mask[j] = cascade.is_oscillatory(m)
        return rates, mask

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as ex:
        rows = list(ex.map(row, range(n)))
    land = cascade.RateLandscape(o1, o2, np.array([r for r, _ in rows]), np.array([m for _, m in rows]), kappa)
    land.to_csv(out / "landscape.csv", header=_header_lines(meta))
    a, b, r = land.argmax_nonoscillatory()
    summary = {
        "kappa_rad_per_us": kappa,
        "argmax_omega1": a,
        "argmax_omega2": b,
        "argmax_rate": r,
        "argmax_omega1_over_kappa": a / kappa,
        "argmax_omega2_over_kappa": b / kappa,
    }
    _write_json(out / "sweep.json", meta, summary)
    print(f"non-oscillatory argmax: omega1 = kappa/{kappa / a if a else math.inf:.2f}, omega2 = kappa/{kappa / b if b else math.inf:.2f}, rate {r:.4g} 1/us")
    return summary


def cmd_lifetime(cfg: config.RunConfig, out: Path, jobs: int) -> dict:
    meta = _metadata(cfg, "lifetime")
    lt = cfg.lifetime
    rtol, atol = _tolerances(cfg)
    cases = {
        "binomial_corrected": (lt.kappa_cor, codes.binomial_code(lt.n_cav), lt.t_end),
        "binomial_uncorrected": (0.0, codes.binomial_code(lt.n_cav), lt.uncorrected_t_end),
        "fock01": (0.0, codes.fock01_code(lt.n_cav), lt.t_end),
    }

    def run(item):
        name, (kc, code, t_end) = item
        model = build_effective_model(kc, cfg.system, n_cav=lt.n_cav, cavity_dephasing=lt.cavity_dephasing)
        fit = codes.logical_lifetime(model, code, solver.TimeGrid(0.0, t_end, lt.n_points), rtol=rtol, atol=atol)
        return name, fit

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as ex:
        fits = dict(ex.map(run, cases.items()))
    payload = {name: fit.to_dict() for name, fit in fits.items()}
    payload["ratio_corrected_to_fock01"] = fits["binomial_corrected"].tau_process / fits["fock01"].tau_process
    _write_json(out / "lifetime.json", meta, payload)
    for name, fit in fits.items():
        t1e = "n/a" if fit.t_1e is None else f"{fit.t_1e:.1f}"
        print(f"{name:<22} T_p {fit.T_p:8.1f}  T_eq {fit.T_eq:8.1f}  tau_process {fit.tau_process:8.1f}  1/e time {t1e} us")
    return payload


def cmd_budget(cfg: config.RunConfig, out: Path, jobs: int) -> dict:
    meta = _metadata(cfg, "budget")
    b = cfg.budget
    passive = budget.passive_budget(
        cfg.system, b.kappa_cor, b.nbar, b.gamma_up, b.omega2, recovery_loss_per_cycle=b.recovery_loss_per_cycle
    )
    active = budget.active_budget(cfg.system, budget.ActiveQecParams(**dataclasses.asdict(b.active)), b.nbar)
    report = budget.compare(passive, active)
    _write_json(out / "budget.json", meta, {"passive": passive.to_dict(), "active": active.to_dict(), "comparison": report})
    text = "\n\n".join([passive.scheme + "\n" + passive.to_text(), active.scheme + "\n" + active.to_text(), budget.compare_text(report)])
    (out / "budget.txt").write_text("\n".join(f"# {h}" for h in _header_lines(meta)) + "\n" + text + "\n")
    print(text)
    return report


def _wigner_state(name: str, n_cav: int) -> np.ndarray:
    if name == "vacuum":
        return hilbert.basis(n_cav, 0)
    if name == "fock1":
        return hilbert.basis(n_cav, 1)
    code = codes.binomial_code(n_cav)
    return {"binomial_zero": code.zero_L, "binomial_one": code.one_L, "binomial_plus": codes.cardinal_states(code)[2]}[name]


def cmd_wigner(cfg: config.RunConfig, out: Path, jobs: int) -> dict:
    meta = _metadata(cfg, "wigner")
    w = cfg.wigner
    psi = _wigner_state(w.state, w.n_cav)
    if w.kerr_time:
        a = hilbert.annihilation(w.n_cav)
        n = np.real(np.diag(a.conj().T @ a))
        phase = np.exp(1j * TWO_PI * cfg.system.K * 1e-3 / 2 * n * (n - 1) * w.kerr_time)
        psi = phase * psi
    axis = tomography.default_axis(w.extent, w.n_points)
    wm = tomography.wigner(hilbert.ket2dm(psi), axis)
    wm.to_csv(out / "wigner.csv", header=_header_lines(meta))
    if w.pgm:
        wm.to_pgm(out / "wigner.pgm")
    summary = {"state": w.state, "integral": wm.integral(), "W_origin": float(wm.values[w.n_points // 2, w.n_points // 2])}
    _write_json(out / "wigner.json", meta, summary)
    print(f"Wigner map of {w.state}: integral {summary['integral']:.4f}")
    return summary


def cmd_plan(cfg: config.RunConfig, out: Path, jobs: int) -> dict:
    meta = _metadata(cfg, "plan")
    p = planner.plan(cfg.system, cfg.drives.omega1, cfg.drives.omega2, cfg.drives.photon_targets)
    warnings_ = planner.collision_check(p, cfg.system, cfg.plan.guard_band)
    payload = {"plan": p.to_dict(), "collisions": warnings_, "stage1_base_MHz": planner.stage1_base(cfg.system), "stage2_base_MHz": planner.stage2_base(cfg.system)}
    _write_json(out / "plan.json", meta, payload)
    (out / "plan.txt").write_text("\n".join(f"# {h}" for h in _header_lines(meta)) + "\n" + p.to_text() + "\n")
    print(p.to_text())
    for w in warnings_:
        print("collision:", w)
    return payload


def cmd_heating_fit(cfg: config.RunConfig, out: Path, jobs: int, data: Path) -> dict:
    meta = _metadata(cfg, "heating-fit")
    meta["data"] = data.name
    try:
        times, pops = heating.read_population_csv(data)
    except (OSError, ValueError) as exc:
        raise config.ConfigError(f"cannot read population data: {exc}") from exc
    fit = heating.fit_heating_rate(times, pops, cfg.heating.T1ge, cfg.heating.T1ef)
    payload = {**dataclasses.asdict(fit), "gamma_up_per_ms": fit.gamma_up_per_ms}
    _write_json(out / "heating_fit.json", meta, payload)
    print(f"r = {fit.r:.5f}, gamma_up = {fit.gamma_up_per_ms:.3f} 1/ms")
    return payload


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "lifetime": cmd_lifetime,
    "budget": cmd_budget,
    "wigner": cmd_wigner,
    "plan": cmd_plan,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="prespa", description="Parity-recovery AQEC simulation and analysis")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in list(COMMANDS) + ["heating-fit"]:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="YAML file overriding the bundled defaults")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument("--jobs", type=int, default=1, help="worker threads")
        p.add_argument("--tol", type=float, help="integrator relative tolerance (absolute = tol/100)")
        p.add_argument("-v", "--verbose", action="store_true")
        if name == "heating-fit":
            p.add_argument("data", type=Path, help="CSV with pump_time_us, g, e, f columns")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config.load(args.config)
        if args.tol is not None:
            if not 0 < args.tol < 1:
                raise config.ConfigError("--tol must lie in (0, 1)")
            cfg = dataclasses.replace(cfg, solver=config.SolverConfig(args.tol, args.tol / 100))
        if args.jobs < 1:
            raise config.ConfigError("--jobs must be >= 1")
        args.out.mkdir(parents=True, exist_ok=True)
        if args.command == "heating-fit":
            cmd_heating_fit(cfg, args.out, args.jobs, args.data)
        else:
            COMMANDS[args.command](cfg, args.out, args.jobs)
    except config.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (solver.IntegrationError, codes.FitConvergenceError, heating.FitError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
