"""Command-line front end: scenario configuration, sweeps, CSV/JSON emission.

Every subcommand is a deterministic, random-free computation: the same
scenario produces byte-identical data files (timestamps appear only in the
metadata header).  Configuration uses INI files with one section per block;
command-line flags override the file.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import hashlib
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    coincidence_counts_analytic,
    coincidence_counts_regression,
    concurrence,
    detection_rate,
    prepared_ges_density_matrix,
    rate_scaling_n,
    steady_state_concurrence,
    tomography,
    trace_distance,
    two_photon_intensity,
)
from .design import (
    ConvergenceError,
    condition_delta2,
    continuation_curve_n4,
    flow_graph,
    ges_energy_n2,
    ges_mixing_angle_n2,
    ges_state_n2,
    one_photon_eigensystem,
    solve_ges_n4,
)
from .dynamics import (
    DensityMatrix,
    NumericsError,
    PulseShape,
    convergence_check,
    propagate,
    pulse_population_map,
    steady_state,
)
from .hilbert import build_space
from .model import UNIT_COUPLING, ParamsN2, ParamsN4, hamiltonian
from .oracle import DecayParams, decay_populations, one_photon_peak


class ConfigError(ValueError):
    """Scenario configuration is invalid; message names the offending field."""


CONDITION_MINUS = condition_delta2(1.0, UNIT_COUPLING, -1)  # -0.20710678...
FIG5_DELTA2 = condition_delta2(5.0, UNIT_COUPLING, -1)  # -0.04950975...


@dataclass
class Scenario:
    """Fully deterministic description of one run."""

    system: str = "n2"
    run: str = "design"
    params: dict = field(default_factory=dict)
    pulse: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    coincidence: dict = field(default_factory=dict)
    n_max: int | None = None
    workers: int = 1
    out_dir: str = "out"

    def content_hash(self) -> str:
        payload = dataclasses.asdict(self)
        payload.pop("out_dir", None)  # where results land does not change them
        payload.pop("workers", None)
        blob = json.dumps(payload, sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def params_n2(self) -> ParamsN2:
        p = dict(self.params)
        try:
            return ParamsN2(
                j=float(p.pop("j")),
                delta1=float(p.pop("delta1")),
                delta2=float(p.pop("delta2")),
                kappa=float(p.pop("kappa", 0.0)),
                rabi=float(p.pop("rabi", 0.0)),
                pump_port=int(p.pop("pump_port", 2)),
                pump_detuning=float(p.pop("pump_detuning", 0.0)),
                g2p=float(p.pop("g2p", UNIT_COUPLING)),
            )
        except KeyError as exc:
            raise ConfigError(f"params: missing field {exc.args[0]!r}") from None
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"params: {exc}") from None

    def params_n4(self) -> ParamsN4:
        p = dict(self.params)
        try:
            g1 = float(p.pop("g1", UNIT_COUPLING))
            if "g2" in p:
                g2 = float(p.pop("g2"))
            else:
                g2 = float(p.pop("g2_over_g1", p.pop("ratio", 2.0))) * g1
            return ParamsN4(
                j=float(p.pop("j")),
                delta1=float(p.pop("delta1")),
                delta2=float(p.pop("delta2")),
                delta_b=float(p.pop("delta_b")),
                g1=g1,
                g2=g2,
                kappa=float(p.pop("kappa", 0.0)),
                rabi=float(p.pop("rabi", 0.0)),
                pump_port=int(p.pop("pump_port", 1)),
                pump_detuning=float(p.pop("pump_detuning", 0.0)),
                variant=self.system == "n4-variant",
            )
        except KeyError as exc:
            raise ConfigError(f"params: missing field {exc.args[0]!r}") from None
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"params: {exc}") from None

    def any_params(self):
        if self.system == "n2":
            return self.params_n2()
        if self.system in ("n4", "n4-variant"):
            return self.params_n4()
        raise ConfigError(f"scenario: unknown system {self.system!r}")


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------

def _meta_lines(scenario: Scenario, extra: dict | None = None) -> list[str]:
    lines = [
        f"# nooncav {__version__}",
        f"# scenario_hash: {scenario.content_hash()}",
        f"# system: {scenario.system}",
        f"# run: {scenario.run}",
    ]
    for key, val in (extra or {}).items():
        lines.append(f"# {key}: {val}")
    lines.append(f"# generated: {datetime.now(timezone.utc).isoformat()}")
    return lines


def write_csv(path: Path, scenario: Scenario, columns, rows, extra_meta=None) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        for line in _meta_lines(scenario, extra_meta):
            fh.write(line + "\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, complex):
        return f"{v.real!r}{v.imag:+}j"
    return str(v)


def write_json(path: Path, scenario: Scenario, payload: dict, extra_meta=None) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {
        "meta": {
            "tool": f"nooncav {__version__}",
            "scenario_hash": scenario.content_hash(),
            "system": scenario.system,
            "run": scenario.run,
            **(extra_meta or {}),
            "generated": datetime.now(timezone.utc).isoformat(),
        },
        **payload,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, default=_json_default)
        fh.write("\n")
    return path


def _json_default(obj):
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _complex_matrix_payload(mat: np.ndarray) -> dict:
    return {"real": np.real(mat).tolist(), "imag": np.imag(mat).tolist()}


# ---------------------------------------------------------------------------
# Runs
# ---------------------------------------------------------------------------

def run_design_n2(scenario: Scenario) -> dict:
    p = scenario.params_n2()
    branches = {}
    for s in (-1, +1):
        delta2 = condition_delta2(p.delta1, p.g2p, s)
        state = ges_state_n2(p.delta1, p.g2p, s)
        branches[f"{s:+d}"] = {
            "delta2": delta2,
            "energy": ges_energy_n2(p.delta1, p.g2p, s),
            "mixing_angle": ges_mixing_angle_n2(p.delta1, p.g2p, s),
            "amplitudes": {
                "B,00": state[0],
                "G,20": state[1],
                "G,11": state[2],
                "G,02": state[3],
            },
        }
    payload = {"delta1": p.delta1, "g2p": p.g2p, "branches": branches}
    write_json(Path(scenario.out_dir) / "design_n2.json", scenario, payload)
    return payload


def run_fig9(scenario: Scenario) -> dict:
    grid = scenario.grid
    lo = float(grid.get("ratio_min", 1.5))
    hi = float(grid.get("ratio_max", 3.0))
    n = int(grid.get("points", 31))
    _validate_grid(n, lo, hi, "ratio")
    ratios = np.linspace(lo, hi, n)
    rows = []
    n_solved = 0
    for ratio, sol in continuation_curve_n4(ratios):
        if sol is None:
            rows.append((ratio, math.nan, math.nan, math.nan, math.nan, math.nan, math.nan))
        else:
            n_solved += 1
            rows.append(
                (ratio, sol.j, sol.delta1, sol.delta2, sol.delta_b, sol.energy, sol.residual)
            )
    write_csv(
        Path(scenario.out_dir) / "fig9.csv",
        scenario,
        ["ratio", "j", "delta1", "delta2", "delta_b", "energy", "residual"],
        rows,
    )
    return {"solved": n_solved, "total": len(rows)}


def _sweep_point(args):
    (base, delta2, n_max) = args
    p = dataclasses.replace(base, delta2=delta2, pump_detuning=delta2)
    rho = steady_state(p, n_max=n_max)
    tomo = tomography(rho)
    purity = trace_distance(tomo)
    intensity = two_photon_intensity(rho, p.kappa)
    return (
        delta2,
        purity.concurrence,
        purity.trace_distance,
        purity.theta_opt,
        intensity,
    )


def run_sweep_delta2(scenario: Scenario) -> dict:
    p = scenario.params_n2()
    grid = scenario.grid
    lo = float(grid.get("delta2_min", -1.0))
    hi = float(grid.get("delta2_max", 2.0))
    n = int(grid.get("points", 601))
    _validate_grid(n, lo, hi, "delta2")
    n_max = scenario.n_max or 3
    values = np.linspace(lo, hi, n)
    jobs = [(p, float(d2), n_max) for d2 in values]
    rows = _pool_map(_sweep_point, jobs, scenario.workers)
    write_csv(
        Path(scenario.out_dir) / "sweep_delta2.csv",
        scenario,
        ["delta2", "concurrence", "trace_distance", "theta", "intensity"],
        rows,
        extra_meta={"n_max": n_max},
    )
    best = max(rows, key=lambda r: r[1])
    return {"points": len(rows), "max_concurrence": best[1], "argmax_delta2": best[0]}


def _map_point(args):
    (base, kappa, rabi, n_max, solver) = args
    p = dataclasses.replace(base, kappa=kappa, rabi=rabi)
    return (kappa, rabi, steady_state_concurrence(p, n_max=n_max, solver=solver))


def run_concurrence_map(scenario: Scenario) -> dict:
    if scenario.system == "n2":
        base = scenario.params_n2()
        n_max = scenario.n_max or 3
        solver = "direct"
    else:
        base = scenario.params_n4()
        n_max = scenario.n_max or 4
        solver = "sector"
    grid = scenario.grid
    kappas = _axis(grid, "kappa", default=(0.01, 2.0, 21, "log"))
    rabis = _axis(grid, "rabi", default=(0.01, 1.0, 21, "log"))
    jobs = [(base, float(k), float(om), n_max, solver) for k in kappas for om in rabis]
    rows = _pool_map(_map_point, jobs, scenario.workers)
    write_csv(
        Path(scenario.out_dir) / "concurrence_map.csv",
        scenario,
        ["kappa", "rabi", "concurrence"],
        rows,
        extra_meta={"n_max": n_max, "grid": f"{len(kappas)}x{len(rabis)}"},
    )
    result = {"points": len(rows)}
    if len(rows) == 1:
        p = dataclasses.replace(base, kappa=float(kappas[0]), rabi=float(rabis[0]))
        rho = steady_state(p, n_max=n_max)
        tomo = tomography(rho)
        payload = {
            "concurrence": concurrence(tomo),
            "tomography": _complex_matrix_payload(tomo.mat),
        }
        if scenario.system == "n2":
            purity = trace_distance(tomo)
            payload["trace_distance"] = purity.trace_distance
            payload["theta_opt"] = purity.theta_opt
        write_json(Path(scenario.out_dir) / "tomography.json", scenario, payload)
        result["concurrence"] = payload["concurrence"]
        if "trace_distance" in payload:
            result["trace_distance"] = payload["trace_distance"]
    return result


def _pulse_shape(scenario: Scenario) -> PulseShape:
    pulse = scenario.pulse
    power = float(pulse.get("power", 45.0))
    duration = float(pulse.get("duration", 10**0.95))
    t_peak = pulse.get("t_peak")
    return PulseShape.from_power(power, duration, float(t_peak) if t_peak else None)


def run_pulse(scenario: Scenario) -> dict:
    p = scenario.params_n2() if scenario.system == "n2" else scenario.params_n4()
    out = {}
    grid = scenario.grid
    if "power_min" in grid or "duration_min" in grid:
        powers = _axis(grid, "power", default=(10.0, 250.0, 15, "linear"))
        durations = _axis(grid, "duration", default=(10**0.5, 10**1.3, 15, "log"))
        pmap = pulse_population_map(
            p, powers, durations, n_max=scenario.n_max or 3, rtol=1e-5, atol=1e-8
        )
        rows = [
            (float(pw), float(du), float(pmap[i, j]))
            for i, pw in enumerate(powers)
            for j, du in enumerate(durations)
        ]
        write_csv(
            Path(scenario.out_dir) / "pulse_map.csv",
            scenario,
            ["power", "duration", "p_ges"],
            rows,
            extra_meta={"n_max": scenario.n_max or 3, "readout": "t_peak + 2*duration"},
        )
        out["map_points"] = len(rows)
        out["map_max"] = float(pmap.max())
    else:
        shape = _pulse_shape(scenario)
        t_end = shape.t_peak + 2.0 * shape.width
        t_grid = np.linspace(0.0, t_end, int(scenario.grid.get("trace_points", 201)))
        result = propagate(p, pulse=shape, t_grid=t_grid, n_max=scenario.n_max or 6,
                           rtol=1e-8, atol=1e-11)
        _write_trace(Path(scenario.out_dir) / "pulse_trace.csv", scenario, result.trace)
        out["p_ges_final"] = float(result.trace.p_ges[-1])
        out["p_residual_final"] = float(result.trace.p_2r[-1] + result.trace.p_m[-1])
    return out


def _write_trace(path: Path, scenario: Scenario, trace, analytic=None) -> None:
    label = "p_2002" if scenario.system == "n2" else "p_4004"
    columns = ["time", label, "p_1photon", "p_g00", "p_2r", "p_m"]
    rows = zip(trace.times, trace.p_ges, trace.p_1photon, trace.p_g00, trace.p_2r, trace.p_m)
    write_csv(path, scenario, columns, rows)


def run_decay(scenario: Scenario) -> dict:
    p = scenario.params_n2()
    shape = _pulse_shape(scenario)
    t_end = shape.t_peak + 2.0 * shape.width
    n_max = scenario.n_max or 6
    prep = propagate(p, pulse=shape, t_grid=np.array([0.0, t_end]), n_max=n_max,
                     rtol=1e-8, atol=1e-11)
    horizon = float(scenario.grid.get("decay_horizon", 600.0))
    points = int(scenario.grid.get("points", 121))
    t_grid = np.linspace(t_end, t_end + horizon, points)
    free = propagate(p, rho0=prep.final, t_grid=t_grid, n_max=n_max)
    _write_trace(Path(scenario.out_dir) / "decay_qme.csv", scenario, free.trace)

    s = min((-1, +1), key=lambda b: abs(p.delta2 - ges_energy_n2(p.delta1, p.g2p, b) / 2))
    dp = DecayParams.from_params(p, s)
    rel_t = t_grid - t_grid[0]
    ana = decay_populations(dp, rel_t)
    p0 = float(free.trace.p_ges[0])
    rows = zip(
        t_grid,
        p0 * ana.p_ges,
        p0 * (ana.p_1p_plus + ana.p_1p_minus),
        p0 * ana.p_g00,
        np.zeros_like(rel_t),
        np.zeros_like(rel_t),
    )
    write_csv(
        Path(scenario.out_dir) / "decay_analytic.csv",
        scenario,
        ["time", "p_2002", "p_1photon", "p_g00", "p_2r", "p_m"],
        rows,
        extra_meta={"eta": dp.eta, "scaled_by_initial_p": p0},
    )
    t_peak, value = one_photon_peak(dp)
    return {"eta": dp.eta, "one_photon_peak_time": t_peak, "one_photon_peak_value": value}


def run_coincidence(scenario: Scenario) -> dict:
    p = scenario.params_n2()
    opts = scenario.coincidence
    s = int(opts.get("branch", -1))
    de = math.sqrt((p.delta1 - p.delta2) ** 2 + 4 * p.j**2)
    windows = opts.get("windows")
    if windows is None:
        windows = [0.1 / de, 1.0 / de, 10.0 / de]
    else:
        windows = [float(w) for w in str(windows).split()]
    rho0 = prepared_ges_density_matrix(p, s)
    records = []
    for w in windows:
        reg = coincidence_counts_regression(p, rho0, w)
        ana = coincidence_counts_analytic(p, w)
        records.append(
            {
                "window": w,
                "window_times_delta_e1": w * de,
                "regression": _record_payload(reg),
                "analytic": _record_payload(ana),
                "concurrence_from_counts": reg.concurrence_from_counts(),
            }
        )
    payload = {"delta_e1": de, "records": records}
    write_json(Path(scenario.out_dir) / "coincidence.json", scenario, payload)
    return {"windows": len(records)}


def _record_payload(rec) -> dict:
    return {
        "n11": rec.n11,
        "n22": rec.n22,
        "n12": rec.n12,
        "n1122": rec.n1122,
        "method": rec.method,
    }


def run_rate(scenario: Scenario) -> dict:
    p = scenario.params_n2()
    g_ref_ev = float(scenario.params.get("g_ref_ev", 50e-6))
    rate_hz = detection_rate(p, g_ref_ev)
    payload = {
        "rate_hz": rate_hz,
        "rate_mhz": rate_hz / 1e6,
        "g_ref_ev": g_ref_ev,
        "scaling": {
            str(n): rate_scaling_n(n, p.kappa, p.j) for n in (2, 3, 4)
        },
    }
    write_json(Path(scenario.out_dir) / "rate.json", scenario, payload)
    return payload


def run_check_candidate(scenario: Scenario) -> dict:
    p = scenario.any_params()
    space = build_space(p.model, p.model.noon_order)
    graph = flow_graph(hamiltonian(p, space))
    blocking = graph.blocking_states()
    payload = {
        "system": scenario.system,
        "candidate": graph.candidate,
        "incoming_path_count": {str(k): v for k, v in graph.incoming_path_count.items()},
        "blocking_states": [str(b) for b in blocking],
    }
    write_json(Path(scenario.out_dir) / "candidate.json", scenario, payload)
    if graph.candidate:
        print(f"candidate: true ({scenario.system})")
    else:
        blocked = ", ".join(
            f"{b} ({graph.incoming_path_count[b]} incoming path)" for b in blocking
        )
        print(f"candidate: false, blocking state {blocked}")
    return payload


def run_convergence(scenario: Scenario) -> dict:
    p = scenario.any_params()
    n_list = scenario.grid.get("n_max_list")
    if n_list is None:
        base = p.model.noon_order
        n_list = [base, base + 1]
    else:
        n_list = [int(x) for x in str(n_list).split()]
    solver = "sector" if scenario.system != "n2" else "direct"
    report = convergence_check(
        p, n_list, lambda pp, nn: steady_state_concurrence(pp, n_max=nn, solver=solver)
    )
    payload = {
        "n_max": list(report.n_max_values),
        "values": list(report.values),
        "max_successive_diff": report.max_successive_diff,
        "tol": report.tol,
        "passed": report.passed,
    }
    write_json(Path(scenario.out_dir) / "convergence.json", scenario, payload)
    return payload


RUNS = {
    "design-n2": run_design_n2,
    "fig9": run_fig9,
    "sweep-delta2": run_sweep_delta2,
    "concurrence-map": run_concurrence_map,
    "pulse": run_pulse,
    "decay": run_decay,
    "coincidence": run_coincidence,
    "rate": run_rate,
    "check-candidate": run_check_candidate,
    "convergence": run_convergence,
}

_DEFAULT_SCENARIOS = {
    "design-n2": dict(system="n2", params={"j": 2.0, "delta1": 1.0, "delta2": CONDITION_MINUS}),
    "fig9": dict(system="n4", params={}),
    "sweep-delta2": dict(
        system="n2",
        params={
            "j": 2.0, "delta1": 1.0, "delta2": CONDITION_MINUS,
            "kappa": 0.1, "rabi": 0.05, "pump_port": 2,
        },
    ),
    "concurrence-map": dict(
        system="n2",
        params={
            "j": 2.0, "delta1": 1.0, "delta2": CONDITION_MINUS,
            "pump_detuning": CONDITION_MINUS, "pump_port": 2,
            "kappa": 0.1, "rabi": 0.05,
        },
    ),
    "pulse": dict(
        system="n2",
        params={
            "j": 5.0, "delta1": 5.0, "delta2": -0.05,
            "pump_detuning": -0.05, "kappa": 0.1, "pump_port": 2,
        },
    ),
    "decay": dict(
        system="n2",
        params={
            "j": 5.0, "delta1": 5.0, "delta2": FIG5_DELTA2,
            "pump_detuning": FIG5_DELTA2, "kappa": 0.1, "pump_port": 2,
        },
    ),
    "coincidence": dict(
        system="n2",
        params={
            "j": 5.0, "delta1": 5.0, "delta2": FIG5_DELTA2,
            "pump_detuning": FIG5_DELTA2, "kappa": 0.1, "pump_port": 2,
        },
    ),
    "rate": dict(
        system="n2",
        params={"j": 5.0, "delta1": 5.0, "delta2": -0.05, "kappa": 0.1},
    ),
    "check-candidate": dict(
        system="n4-variant",
        params={"j": 1.61, "delta1": -0.78, "delta2": 1.90, "delta_b": 2.68, "ratio": 2.0},
    ),
    "convergence": dict(
        system="n2",
        params={
            "j": 2.0, "delta1": 1.0, "delta2": CONDITION_MINUS,
            "pump_detuning": CONDITION_MINUS, "kappa": 0.1, "rabi": 0.05, "pump_port": 2,
        },
    ),
}


# ---------------------------------------------------------------------------
# Grid / config plumbing
# ---------------------------------------------------------------------------

def _axis(grid: dict, name: str, default):
    lo, hi, n, scale = default
    lo = float(grid.get(f"{name}_min", lo))
    hi = float(grid.get(f"{name}_max", hi))
    n = int(grid.get(f"{name}_points", n))
    scale = str(grid.get(f"{name}_scale", scale))
    _validate_grid(n, lo, hi, name)
    if scale == "log":
        if lo <= 0 or hi <= 0:
            raise ConfigError(f"grid: {name} log axis requires positive bounds")
        return np.geomspace(lo, hi, n)
    if scale == "linear":
        return np.linspace(lo, hi, n)
    raise ConfigError(f"grid: unknown scale {scale!r} for axis {name!r}")


def _validate_grid(n: int, lo: float, hi: float, name: str) -> None:
    if n < 1:
        raise ConfigError(f"grid: {name} needs at least one point, got {n}")
    if n > 1 and not hi > lo:
        raise ConfigError(f"grid: {name} bounds must satisfy max > min, got [{lo}, {hi}]")


def _pool_map(fn, jobs, workers: int):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (8 * workers))))


def load_scenario(run: str, config_path: str | None) -> Scenario:
    if run not in RUNS:
        raise ConfigError(f"unknown run kind {run!r}")
    defaults = _DEFAULT_SCENARIOS[run]
    scenario = Scenario(run=run, system=defaults.get("system", "n2"),
                        params=dict(defaults.get("params", {})))
    if config_path is None:
        return scenario
    parser = configparser.ConfigParser()
    read = parser.read(config_path)
    if not read:
        raise ConfigError(f"config file not found: {config_path}")
    known = {"scenario", "params", "pulse", "grid", "coincidence", "output"}
    unknown = set(parser.sections()) - known
    if unknown:
        raise ConfigError(f"config: unknown sections {sorted(unknown)}")
    if parser.has_section("scenario"):
        sec = parser["scenario"]
        scenario.system = sec.get("system", scenario.system)
        if "run" in sec and sec["run"] != run:
            raise ConfigError(
                f"config run kind {sec['run']!r} does not match subcommand {run!r}"
            )
        if scenario.system not in ("n2", "n4", "n4-variant"):
            raise ConfigError(f"scenario: unknown system {scenario.system!r}")
        if "n_max" in sec:
            scenario.n_max = sec.getint("n_max")
        if "workers" in sec:
            scenario.workers = sec.getint("workers")
    known_params = {
        "j", "delta1", "delta2", "delta_b", "kappa", "rabi", "pump_port",
        "pump_detuning", "g2p", "g1", "g2", "g2_over_g1", "ratio", "g_ref_ev",
    }
    for section, target in (
        ("params", scenario.params),
        ("pulse", scenario.pulse),
        ("grid", scenario.grid),
        ("coincidence", scenario.coincidence),
    ):
        if parser.has_section(section):
            values = dict(parser[section])
            if section == "params":
                bad = set(values) - known_params
                if bad:
                    raise ConfigError(f"params: unknown fields {sorted(bad)}")
            target.update(values)
    if parser.has_section("output") and "dir" in parser["output"]:
        scenario.out_dir = parser["output"]["dir"]
    return scenario


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nooncav",
        description="NOON-state generator design and simulation runs",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in RUNS:
        cmd = sub.add_parser(name, help=f"run the {name} scenario")
        cmd.add_argument("--config", type=str, default=None, help="INI scenario file")
        cmd.add_argument("--out", type=str, default=None, help="output directory")
        cmd.add_argument("--n-max", type=int, default=None, help="photon truncation per cavity")
        cmd.add_argument("--workers", type=int, default=None, help="parallel grid workers")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        scenario = load_scenario(args.command, args.config)
        if args.out is not None:
            scenario.out_dir = args.out
        if args.n_max is not None:
            scenario.n_max = args.n_max
        if args.workers is not None:
            scenario.workers = args.workers
        summary = RUNS[args.command](scenario)
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (NumericsError, ConvergenceError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    for key, val in summary.items():
        if isinstance(val, (int, float, str, bool)):
            print(f"{key}: {val}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
