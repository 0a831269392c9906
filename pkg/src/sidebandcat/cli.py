"""Command-line interface.

Subcommands: prepare, fringe, validate, fit, rabi-flop,
sweep-instability, cat-visibility, optimize-detection.  Values resolve
as defaults < --config JSON < explicit flags.  Exit codes: 0 success,
1 numerical-check failure, 2 usage/config error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .errors import AliasingError, ConfigError, SimulationError
from .fockspace import FockDistribution, fock_distribution, parity_expectation
from .interferometry import (
    BSB_FIRST,
    BSB_VERIFICATION_AREA,
    RSB_FIRST,
    RSB_VERIFICATION_AREA,
    SINGLE_PULSE,
    TWO_PULSE,
    VerificationSpec,
    analytic_spectrum,
    averaged_metrics,
    fourier_spectrum,
    scan_fringe,
    uniform_grid,
)
from .checks import run_validation
from .estimation import (
    FlopModel,
    RabiFlopRecord,
    estimate_w,
    fit_phonon_distribution,
    simulate_rabi_flop,
    synthesize_fringe,
)
from .noise import DecoherenceModel, W_MIXTURE, apply_model
from .preparation import (
    HALF_TRANSFER_AREA,
    ScenarioSpec,
    sqrt_compensated_areas,
)
from .sideband import BEYOND_LD, DEFAULT_ETA, LAMB_DICKE, RabiModel
from .scenarios import (
    CatSpec,
    cat_metrics,
    instability_sweep,
    optimize_detection_areas,
)
from . import reporting

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_CONFIG = 2


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument("--config", type=Path, help="JSON file with default parameter values")
    common.add_argument("--seed", type=int, help="base RNG seed")
    common.add_argument("--n-max", type=int, dest="n_max", help="Fock cutoff")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--threads", type=int, help="worker threads for Monte Carlo sweeps")
    common.add_argument("--no-plot", action="store_true", default=None,
                        help="skip figure rendering")
    p = argparse.ArgumentParser(prog="sidebandcat", description=__doc__, allow_abbrev=False)
    sub = p.add_subparsers(dest="command", required=True)

    def add_command(name, help_text):
        return sub.add_parser(name, help=help_text, parents=[common], allow_abbrev=False)

    sp = add_command("prepare", "run a preparation sequence, write state and P(n)")
    sp.add_argument("--n", type=int, help="number of preparation pulses")
    sp.add_argument("--areas", help="'half_transfer', 'sqrt_compensated' or comma list")
    sp.add_argument("--phases", help="'random' or comma list of radians")
    sp.add_argument("--samples", type=int, help="phase draws for the averaged distribution")

    sp = add_command("fringe", "fringe surface, averaged metrics, spectrum")
    sp.add_argument("--n", type=int)
    sp.add_argument("--w", type=float, help="coherence factor of the w-mixture model")
    sp.add_argument("--model", help="decoherence kind (default w_mixture)")
    sp.add_argument("--samples", type=int)
    sp.add_argument("--grid", type=int, help="points per phase axis")
    sp.add_argument("--t1", type=float, help="RSB verification area")
    sp.add_argument("--t2", type=float, help="BSB verification area")
    sp.add_argument("--mode", choices=[SINGLE_PULSE, TWO_PULSE, "single", "two"])
    sp.add_argument("--order", choices=[RSB_FIRST, BSB_FIRST])
    sp.add_argument("--slice-mode", dest="slice_mode", choices=["mean", "best", "zero"])

    sp = add_command("validate", "run the numerical validation suite")
    sp.add_argument("--quick", action="store_true")

    sp = add_command("fit", "phonon-distribution fit and w estimation")
    sp.add_argument("--flop-csv", dest="flop_csv", help="ingest a rabi-flop CSV")
    sp.add_argument("--n", type=int, help="scenario pulses for the synthetic demo")
    sp.add_argument("--w", type=float)
    sp.add_argument("--shots", type=int)
    sp.add_argument("--points", type=int)
    sp.add_argument("--tmax", type=float, help="flop record span (ms)")
    sp.add_argument("--n-fit-max", dest="n_fit_max", type=int)
    sp.add_argument("--omega0-khz", dest="omega0_khz", type=float)
    sp.add_argument("--gamma0", type=float)
    sp.add_argument("--eta", type=float)
    sp.add_argument("--lamb-dicke", dest="lamb_dicke", action="store_true",
                    help="Lamb-Dicke frequencies instead of beyond-LD")

    sp = add_command("rabi-flop", "simulate a shot-limited rabi flop record")
    sp.add_argument("--n", type=int)
    sp.add_argument("--shots", type=int)
    sp.add_argument("--points", type=int)
    sp.add_argument("--tmax", type=float)
    sp.add_argument("--omega0-khz", dest="omega0_khz", type=float)
    sp.add_argument("--gamma0", type=float)
    sp.add_argument("--eta", type=float)

    sp = add_command("sweep-instability", "contrast vs phase-instability comparison")
    sp.add_argument("--method", choices=["sideband", "rabi_gate", "both"])
    sp.add_argument("--n", type=int)
    sp.add_argument("--dphi", help="comma list of instability scales")
    sp.add_argument("--samples", type=int)
    sp.add_argument("--grid", type=int)
    sp.add_argument("--trotter-steps", dest="trotter_steps", type=int)

    sp = add_command("cat-visibility", "analytic cat-state fringe metrics")
    sp.add_argument("--alpha", type=complex)
    sp.add_argument("--weights", help="comma list of qubit weights w")

    sp = add_command("optimize-detection", "detection-pulse-area optimization")
    sp.add_argument("--n", help="comma list of sequence lengths")
    sp.add_argument("--samples", type=int)
    sp.add_argument("--budget", type=int, help="objective evaluations per realization")
    sp.add_argument("--grid", type=int)

    return p


def resolve_config(args: argparse.Namespace, defaults: dict) -> dict:
    """defaults < config file < explicit CLI flags."""
    cfg = dict(defaults)
    if args.config is not None:
        try:
            file_cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(file_cfg, dict):
            raise ConfigError("config file must hold a JSON object")
        for key, value in file_cfg.items():
            if key in cfg:
                cfg[key] = value
    for key in cfg:
        value = getattr(args, key, None)
        if value is not None and value is not False:
            cfg[key] = value
    return cfg


GLOBAL_DEFAULTS = {"seed": 0, "n_max": 32, "out": ".", "threads": 1, "no_plot": False}


def _outdir(cfg) -> Path:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


# presentation-only keys excluded from the hashed config so identical
# scientific parameters give identical output bytes
_UNHASHED = ("out", "no_plot", "threads", "config", "quick")


def _cfg_json(cfg) -> dict:
    return {k: (str(v) if isinstance(v, Path) else v)
            for k, v in cfg.items() if k not in _UNHASHED}


def _scenario(cfg) -> ScenarioSpec:
    if cfg.get("n") is None:
        raise ConfigError("the number of preparation pulses (--n) is required")
    n = int(cfg["n"])
    areas = cfg.get("areas", "half_transfer")
    if areas in (None, "half_transfer"):
        areas_arr = None
    elif areas == "sqrt_compensated":
        areas_arr = sqrt_compensated_areas(n)
    else:
        areas_arr = np.asarray(_float_list(areas) if isinstance(areas, str) else areas)
    phases = cfg.get("phases", "random")
    if isinstance(phases, str) and phases != "random":
        phases = np.asarray(_float_list(phases))
    elif isinstance(phases, list):
        phases = np.asarray(phases, dtype=float)
    return ScenarioSpec(
        n_pulses=n,
        areas=areas_arr,
        phases=phases,
        samples=int(cfg.get("samples") or 512),
        seed=int(cfg["seed"]),
        n_max=int(cfg["n_max"]),
    )


def cmd_prepare(args) -> int:
    cfg = resolve_config(args, {**GLOBAL_DEFAULTS, "n": None, "areas": "half_transfer",
                                "phases": "random", "samples": 512})
    scenario = _scenario(cfg)
    out = _outdir(cfg)
    draws = scenario.phase_draws()
    acc = np.zeros(scenario.n_max + 1)
    first_state = None
    for phases in draws:
        state = scenario.prepare_one(phases)
        if first_state is None:
            first_state = state
        acc += fock_distribution(state).probs
    avg = FockDistribution(acc / len(draws))
    doc = json.loads(first_state.to_json())
    cfg_json = _cfg_json(cfg)
    reporting.write_json(out / "state.json", doc, cfg_json, cfg["seed"])
    reporting.write_csv(out / "distribution.csv",
                        {"n": np.arange(len(avg.probs)), "p": avg.probs},
                        cfg_json, cfg["seed"])
    summary = {
        "mean_n": avg.mean,
        "std_n": avg.std,
        "parity_g": parity_expectation(first_state, "g"),
        "parity_e": parity_expectation(first_state, "e"),
        "samples": len(draws),
    }
    reporting.write_json(out / "summary.json", summary, cfg_json, cfg["seed"])
    if not cfg["no_plot"]:
        reporting.plot_distribution(out / "distribution.png", avg, cfg_json)
    print(f"prepare: N={scenario.n_pulses} mean_n={avg.mean:.4f} std_n={avg.std:.4f}")
    return EXIT_OK


def _verification(cfg) -> VerificationSpec:
    mode = cfg.get("mode") or TWO_PULSE
    if mode == "single":
        mode = SINGLE_PULSE
    if mode == "two":
        mode = TWO_PULSE
    grid = uniform_grid(int(cfg.get("grid") or 32))
    t1 = cfg.get("t1")
    t2 = cfg.get("t2")
    t1 = RSB_VERIFICATION_AREA if t1 is None else float(t1)
    if mode == SINGLE_PULSE:
        t2 = 0.0
    else:
        t2 = BSB_VERIFICATION_AREA if t2 is None else float(t2)
    return VerificationSpec(mode, t1, t2, grid, grid, cfg.get("order") or RSB_FIRST)


def cmd_fringe(args) -> int:
    cfg = resolve_config(args, {**GLOBAL_DEFAULTS, "n": None, "w": 1.0, "model": W_MIXTURE,
                                "samples": 512, "grid": 32, "t1": None, "t2": None,
                                "mode": TWO_PULSE, "order": RSB_FIRST, "slice_mode": "mean",
                                "areas": "half_transfer", "phases": "random"})
    scenario = _scenario(cfg)
    spec = _verification(cfg)
    model = DecoherenceModel(cfg["model"], float(cfg["w"]))
    out = _outdir(cfg)
    cfg_json = _cfg_json(cfg)

    metrics = averaged_metrics(scenario, model, spec, slice_mode=cfg["slice_mode"],
                               threads=int(cfg["threads"]))
    payload = {"samples": metrics.samples, "axes": {}}
    for name, stat in metrics.axes.items():
        payload["axes"][name] = {
            "mean_contrast": stat.mean_contrast,
            "mean_visibility": stat.mean_visibility,
            "stderr_contrast": stat.stderr_contrast,
            "stderr_visibility": stat.stderr_visibility,
        }
    reporting.write_json(out / "metrics.json", payload, cfg_json, cfg["seed"])

    # representative realization for the surface and the spectrum
    state = scenario.prepare_one(scenario.phase_draws()[0])
    target = apply_model(state, model)
    surface = scan_fringe(target, spec, cfg["slice_mode"])
    p1, p2 = np.meshgrid(surface.grid1, surface.grid2, indexing="ij")
    reporting.write_csv(out / "fringe.csv",
                        {"phi1": p1.ravel(), "phi2": p2.ravel(), "pg": surface.pg.ravel()},
                        cfg_json, cfg["seed"])
    if spec.mode == TWO_PULSE:
        spectrum = fourier_spectrum(surface)
        reporting.write_json(out / "spectrum.json", spectrum.to_json_obj(), cfg_json, cfg["seed"])
    if not cfg["no_plot"]:
        reporting.plot_fringe(out / "fringe.png", surface, cfg_json)
    for name, stat in metrics.axes.items():
        print(f"fringe[{name}]: <C>={stat.mean_contrast:.4f} <V>={stat.mean_visibility:.4f}")
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = resolve_config(args, {**GLOBAL_DEFAULTS, "quick": False})
    results = run_validation(quick=bool(cfg["quick"]), seed=int(cfg["seed"]))
    out = _outdir(cfg)
    cfg_json = _cfg_json(cfg)
    payload = {
        "checks": [
            {"name": r.name, "passed": r.passed, "value": r.value, "threshold": r.threshold}
            for r in results
        ]
    }
    reporting.write_json(out / "validation.json", payload, cfg_json, cfg["seed"])
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERICAL


def _flop_model(cfg) -> FlopModel:
    kind = LAMB_DICKE if cfg.get("lamb_dicke") else BEYOND_LD
    eta = float(cfg.get("eta") or DEFAULT_ETA)
    omega0 = 2 * math.pi * float(cfg.get("omega0_khz") or 21.7)
    return FlopModel(omega0, float(cfg.get("gamma0", 0.1)), rabi_model=RabiModel(kind, eta))


def cmd_fit(args) -> int:
    cfg = resolve_config(args, {**GLOBAL_DEFAULTS, "flop_csv": None, "n": 2, "w": 0.9,
                                "shots": 100, "points": 160, "tmax": 4.0, "n_fit_max": 12,
                                "omega0_khz": 21.7, "gamma0": 0.1, "eta": DEFAULT_ETA,
                                "lamb_dicke": False})
    out = _outdir(cfg)
    cfg_json = _cfg_json(cfg)
    model = _flop_model(cfg)

    if cfg["flop_csv"]:
        try:
            times, pg, shots = reporting.read_flop_csv(cfg["flop_csv"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        record = RabiFlopRecord(times, pg, shots)
        w_payload = None
    else:
        scenario = ScenarioSpec(n_pulses=int(cfg["n"]), samples=1, seed=int(cfg["seed"]),
                                n_max=int(cfg["n_max"]))
        state = scenario.prepare_one(scenario.phase_draws()[0])
        dist = fock_distribution(state)
        times = np.linspace(0.01, float(cfg["tmax"]), int(cfg["points"]))
        record = simulate_rabi_flop(dist, model, times, int(cfg["shots"]), int(cfg["seed"]))
        phis, fringe_pg, probs = synthesize_fringe(
            scenario, float(cfg["w"]), RSB_VERIFICATION_AREA, "rsb",
            points=128, shots=int(cfg["shots"]), seed=int(cfg["seed"]) + 1,
        )
        est = estimate_w(phis, fringe_pg, probs, RSB_VERIFICATION_AREA, "rsb")
        w_payload = {
            "w_true": float(cfg["w"]),
            "w_hat": est.w_hat,
            "area_hat": est.area_hat,
            "clipped": est.clipped,
        }

    fit = fit_phonon_distribution(record, model, int(cfg["n_fit_max"]), seed=int(cfg["seed"]))
    reporting.write_json(out / "phonon_fit.json", {
        "probs": [float(x) for x in fit.probs],
        "sigmas": [float(x) for x in fit.uncertainties],
        "residual": fit.residual,
        "degenerate": fit.degenerate,
    }, cfg_json, cfg["seed"])
    if w_payload is not None:
        reporting.write_json(out / "w_estimate.json", w_payload, cfg_json, cfg["seed"])
        print(f"fit: w_hat={w_payload['w_hat']:.4f} (true {w_payload['w_true']})")
    if not cfg["no_plot"]:
        reporting.plot_flop(out / "flop.png", record, cfg_json, model.curve(fit.probs, record.times))
        reporting.plot_fit(out / "phonon_fit.png", fit, cfg_json)
    print(f"fit: residual={fit.residual:.5f} sum_p={fit.probs.sum():.4f}")
    return EXIT_OK


def cmd_rabi_flop(args) -> int:
    cfg = resolve_config(args, {**GLOBAL_DEFAULTS, "n": 8, "shots": 100, "points": 160,
                                "tmax": 4.0, "omega0_khz": 21.7, "gamma0": 0.1,
                                "eta": DEFAULT_ETA, "lamb_dicke": False})
    out = _outdir(cfg)
    cfg_json = _cfg_json(cfg)
    scenario = ScenarioSpec(n_pulses=int(cfg["n"]), samples=1, seed=int(cfg["seed"]),
                            n_max=int(cfg["n_max"]))
    state = scenario.prepare_one(scenario.phase_draws()[0])
    model = _flop_model(cfg)
    times = np.linspace(0.01, float(cfg["tmax"]), int(cfg["points"]))
    record = simulate_rabi_flop(fock_distribution(state), model, times,
                                int(cfg["shots"]), int(cfg["seed"]))
    reporting.write_csv(out / "rabi_flop.csv",
                        {"time_ms": record.times, "pg": record.pg,
                         "shots": np.full(len(record.times), record.shots_per_point)},
                        cfg_json, cfg["seed"])
    if not cfg["no_plot"]:
        reporting.plot_flop(out / "rabi_flop.png", record, cfg_json)
    print(f"rabi-flop: wrote {len(times)} points at {record.shots_per_point} shots/point")
    return EXIT_OK


def cmd_sweep_instability(args) -> int:
    cfg = resolve_config(args, {**GLOBAL_DEFAULTS, "method": "both", "n": 4,
                                "dphi": "0,0.2,0.4,0.6,0.8", "samples": 48, "grid": 12,
                                "trotter_steps": 32})
    out = _outdir(cfg)
    cfg_json = _cfg_json(cfg)
    dphis = _float_list(cfg["dphi"]) if isinstance(cfg["dphi"], str) else list(cfg["dphi"])
    methods = ["sideband", "rabi_gate"] if cfg["method"] == "both" else [cfg["method"]]
    cols = {"method": [], "dphi": [], "mean_contrast": [], "mean_visibility": [], "stderr": []}
    series = {}
    for method in methods:
        pts = instability_sweep(method, int(cfg["n"]), dphis, samples=int(cfg["samples"]),
                                seed=int(cfg["seed"]), n_max=max(int(cfg["n_max"]), 44),
                                grid_points=int(cfg["grid"]),
                                trotter_steps=int(cfg["trotter_steps"]))
        series[method] = [p.mean_contrast for p in pts]
        for p in pts:
            cols["method"].append(method)
            cols["dphi"].append(p.dphi)
            cols["mean_contrast"].append(p.mean_contrast)
            cols["mean_visibility"].append(p.mean_visibility)
            cols["stderr"].append(p.stderr)
        print(f"sweep {method}: C(dphi) = "
              + " ".join(f"{c:.3f}" for c in series[method]))
    names = np.array(cols.pop("method"))
    arrays = {"method": names}
    arrays.update({k: np.asarray(v) for k, v in cols.items()})
    reporting.write_csv(out / "instability.csv", arrays, cfg_json, cfg["seed"])
    if not cfg["no_plot"]:
        reporting.plot_series(out / "instability.png", dphis, series, cfg_json,
                              "dphi", "mean max contrast")
    return EXIT_OK


def cmd_cat_visibility(args) -> int:
    cfg = resolve_config(args, {**GLOBAL_DEFAULTS, "alpha": 1.2 + 0j,
                                "weights": "0.5,0.6,0.7,0.8,0.9"})
    out = _outdir(cfg)
    cfg_json = _cfg_json({**cfg, "alpha": str(cfg["alpha"])})
    alpha = complex(cfg["alpha"])
    weights = _float_list(cfg["weights"]) if isinstance(cfg["weights"], str) else list(cfg["weights"])
    rows = {"w": [], "a": [], "b": [], "contrast": [], "visibility": [],
            "swapped_contrast": [], "swapped_visibility": []}
    for w in weights:
        state = CatSpec(alpha, alpha, w)
        a, b, c, v = cat_metrics(state, CatSpec(alpha, alpha, 0.5))
        _, _, c2, v2 = cat_metrics(state, CatSpec(alpha, alpha, 1.0 - w))
        rows["w"].append(w)
        rows["a"].append(a)
        rows["b"].append(b)
        rows["contrast"].append(c)
        rows["visibility"].append(v)
        rows["swapped_contrast"].append(c2)
        rows["swapped_visibility"].append(v2)
        print(f"cat w={w}: V={v:.4f} C={c:.4f} (swapped measurement: V={v2:.4f} C={c2:.4f})")
    reporting.write_csv(out / "cat_metrics.csv",
                        {k: np.asarray(v) for k, v in rows.items()}, cfg_json, cfg["seed"])
    if not cfg["no_plot"]:
        reporting.plot_series(out / "cat_metrics.png", rows["w"],
                              {"V (balanced meas.)": rows["visibility"],
                               "C_opt (swapped meas.)": rows["swapped_contrast"]},
                              cfg_json, "weight w", "metric")
    return EXIT_OK


def cmd_optimize_detection(args) -> int:
    cfg = resolve_config(args, {**GLOBAL_DEFAULTS, "n": "2,4,6", "samples": 16,
                                "budget": 150, "grid": 12})
    out = _outdir(cfg)
    cfg_json = _cfg_json(cfg)
    n_list = ([int(x) for x in str(cfg["n"]).split(",")]
              if isinstance(cfg["n"], str) else [int(cfg["n"])])
    rows = {"N": [], "mean_visibility": [], "mean_contrast": [], "baseline_visibility": []}
    for n in n_list:
        opt = optimize_detection_areas(n, samples=int(cfg["samples"]), seed=int(cfg["seed"]),
                                       optimizer_budget=int(cfg["budget"]),
                                       n_max=int(cfg["n_max"]), grid_points=int(cfg["grid"]))
        rows["N"].append(n)
        rows["mean_visibility"].append(opt.mean_visibility)
        rows["mean_contrast"].append(opt.mean_contrast)
        rows["baseline_visibility"].append(opt.baseline_visibility)
        print(f"optimize-detection N={n}: <V>={opt.mean_visibility:.4f} "
              f"<C>={opt.mean_contrast:.4f}")
    reporting.write_csv(out / "detection_optimization.csv",
                        {k: np.asarray(v) for k, v in rows.items()}, cfg_json, cfg["seed"])
    if not cfg["no_plot"]:
        reporting.plot_series(out / "detection_optimization.png", rows["N"],
                              {"<V>": rows["mean_visibility"], "<C>": rows["mean_contrast"]},
                              cfg_json, "N", "metric")
    return EXIT_OK


COMMANDS = {
    "prepare": cmd_prepare,
    "fringe": cmd_fringe,
    "validate": cmd_validate,
    "fit": cmd_fit,
    "rabi-flop": cmd_rabi_flop,
    "sweep-instability": cmd_sweep_instability,
    "cat-visibility": cmd_cat_visibility,
    "optimize-detection": cmd_optimize_detection,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, AliasingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SimulationError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
