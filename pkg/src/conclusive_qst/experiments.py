"""Reproduction runs and disorder sweeps that write CSV tables plus a JSON manifest.

CSV files start with a single ``# config=...`` comment line carrying the resolved
configuration, so a table is reproducible on its own; read them with
``pandas.read_csv(path, comment="#")``. The manifest next to them repeats the
configuration and adds seeds, library versions and wall-clock time.
"""
from __future__ import annotations

import csv
import io
import json
import os
import platform
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .chain import ChainSpec, DisorderModel, chain_spectrum, sample_random_chain
from .engine import Cooling, QubitState, run_protocol
from .scheduler import (DEFAULT_RESOLUTION, WINDOW_FACTOR, greedy_steps,
                        max_eta1_curve)
from .timing import TIME_UNITS, EtaProfile, Schedule, average_decoding_time

OUT_ENV = "CONCLUSIVE_QST_OUT"

#: every column a table may carry, in output order
COLUMNS = (
    "N", "seed", "stat", "step", "tau", "t", "eta", "eta_cum", "memories",
    "t_j", "T_bar", "ratio", "t_ns", "t_j_ns", "T_bar_ns", "p_loss", "fidelity_min",
    "check", "max_deviation", "tolerance", "passed",
)
PROBABILITY_COLUMNS = ("eta", "eta_cum", "p_loss", "fidelity_min")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    n: list[int] = field(default_factory=lambda: [10])
    steps: int = 40
    eta_target: float = 0.99
    delta: float = 0.0
    seeds: int = 1
    seed: int = 0
    tau_window: float = WINDOW_FACTOR
    grid: int = DEFAULT_RESOLUTION
    j_cap: int = 200
    j_units_kelvin: float | None = None
    time_unit: str = "h"
    cooling: str = "reset"
    workers: int = 1
    out: str | None = None

    def validate(self) -> "RunConfig":
        if not self.n or any(N < 2 for N in self.n):
            raise ConfigError(f"chain lengths must be >= 2, got {self.n}")
        if self.steps < 1:
            raise ConfigError("--steps must be at least 1")
        if not 0.0 < self.eta_target < 1.0:
            raise ConfigError("--eta-target must lie in (0, 1)")
        if not 0.0 <= self.delta < 1.0:
            raise ConfigError("--delta must lie in [0, 1)")
        if self.seeds < 1:
            raise ConfigError("--seeds must be at least 1")
        if self.tau_window <= 0:
            raise ConfigError("--tau-window must be positive")
        if self.grid < 100:
            raise ConfigError("--grid must be at least 100")
        if self.j_units_kelvin is not None and self.j_units_kelvin <= 0:
            raise ConfigError("--j-units-kelvin must be positive")
        if self.time_unit not in TIME_UNITS:
            raise ConfigError(f"--time-unit must be one of {TIME_UNITS}")
        try:
            Cooling(self.cooling)
        except ValueError:
            raise ConfigError(f"unknown cooling mode {self.cooling!r}") from None
        if self.workers < 1:
            raise ConfigError("--workers must be at least 1")
        return self

    def out_dir(self) -> Path:
        return Path(self.out or os.environ.get(OUT_ENV, "results"))

    def window(self, spec: ChainSpec) -> float:
        return self.tau_window * spec.N / float(np.mean(spec.couplings))

    def reproducibility_dict(self) -> dict:
        """Configuration without fields that do not affect results."""
        d = asdict(self)
        d.pop("out")
        d.pop("workers")
        return d


class ResultTable:
    """Column-oriented records written as CSV."""

    def __init__(self, name: str, columns: dict[str, list]):
        unknown = set(columns) - set(COLUMNS)
        if unknown:
            raise ValueError(f"unknown columns {sorted(unknown)}")
        lengths = {len(v) for v in columns.values()}
        if len(lengths) > 1:
            raise ValueError(f"column lengths differ: { {k: len(v) for k, v in columns.items()} }")
        for c in PROBABILITY_COLUMNS:
            vals = [v for v in columns.get(c, []) if v is not None]
            if any(not -1e-12 <= v <= 1 + 1e-9 for v in vals):
                raise ValueError(f"column {c} holds values outside [0, 1]")
        self.name = name
        self.columns = {c: list(columns[c]) for c in COLUMNS if c in columns}

    def __len__(self) -> int:
        return len(next(iter(self.columns.values()), []))

    def __getitem__(self, key):
        return self.columns[key]

    def rows(self):
        return zip(*self.columns.values())

    def to_csv(self, config: RunConfig | None = None) -> str:
        buf = io.StringIO()
        if config is not None:
            buf.write("# config=" + json.dumps(config.reproducibility_dict(), sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns.keys())
        for row in self.rows():
            w.writerow(_fmt(v) for v in row)
        return buf.getvalue()


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".12g")
    return str(v)


def write_outputs(config: RunConfig, tables: list[ResultTable], summary: dict,
                  wall_clock: float, seeds: list[int] | None = None) -> list[Path]:
    out = config.out_dir()
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for t in tables:
        p = out / f"{t.name}.csv"
        p.write_text(t.to_csv(config))
        paths.append(p)
    manifest = {
        "command": config.command,
        "config": config.reproducibility_dict(),
        "seeds": seeds if seeds is not None else [config.seed],
        "versions": {"conclusive_qst": __version__, "numpy": np.__version__,
                     "scipy": scipy.__version__, "python": platform.python_version()},
        "wall_clock_s": wall_clock,
        "outputs": [p.name for p in paths],
        "summary": summary,
    }
    mp = out / f"{config.command}_manifest.json"
    mp.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=_json_default) + "\n")
    return paths + [mp]


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"not JSON serialisable: {type(o)}")


def _greedy(spec: ChainSpec, config: RunConfig, j: int):
    gen = greedy_steps(spec, config.window(spec), config.grid)
    steps = [next(gen) for _ in range(j)]
    return Schedule(tuple(s.tau for s in steps)), EtaProfile(np.array([s.eta for s in steps]))


def _greedy_until(spec: ChainSpec, config: RunConfig):
    """Greedy steps until the target is met (or ``j_cap``); returns (schedule, profile, reached)."""
    taus, etas = [], []
    for step in greedy_steps(spec, config.window(spec), config.grid):
        taus.append(step.tau)
        etas.append(step.eta)
        if sum(etas) >= config.eta_target:
            return Schedule(tuple(taus)), EtaProfile(np.array(etas)), True
        if len(taus) >= config.j_cap:
            return Schedule(tuple(taus)), EtaProfile(np.array(etas)), False


def cmd_fig2(config: RunConfig):
    rows = max_eta1_curve(config.n, window_factor=config.tau_window, resolution=config.grid)
    table = ResultTable("fig2", {"N": [r[0] for r in rows], "eta": [r[1] for r in rows],
                                 "tau": [r[2] for r in rows]})
    below = [N for N, eta, _ in rows if N < 25 and eta <= 0.5]
    return [table], {"rows": len(rows), "N_below_25_with_eta1_le_half": below}


def cmd_fig3(config: RunConfig):
    cols = {c: [] for c in ("N", "step", "tau", "t", "eta", "eta_cum")}
    summary = {}
    for N in config.n:
        sch, prof = _greedy(ChainSpec.uniform(N), config, config.steps)
        for i in range(len(sch)):
            cols["N"].append(N)
            cols["step"].append(i + 1)
            cols["tau"].append(sch.taus[i])
            cols["t"].append(sch.times[i])
            cols["eta"].append(prof.eta[i])
            cols["eta_cum"].append(prof.cumulative[i])
        reach = np.nonzero(prof.cumulative >= config.eta_target)[0]
        summary[str(N)] = {"eta_cum_final": prof.total,
                           "steps_to_target": int(reach[0]) + 1 if reach.size else None}
    return [ResultTable("fig3", cols)], summary


def cmd_example5(config: RunConfig):
    """Greedy schedule to the target, transfer, cool, decode; times in ns when J is in kelvin."""
    N = config.n[0]
    spec = ChainSpec.uniform(N)
    sch, prof, reached = _greedy_until(spec, config)
    sd = chain_spectrum(spec)
    p_loss, report = run_protocol(QubitState(0, 1), sd, sch, cooling=config.cooling)
    kelvin = config.j_units_kelvin
    timing = average_decoding_time(prof, sch, kelvin, config.time_unit)
    j = len(sch)
    cols = {"N": [N] * j, "step": list(range(1, j + 1)), "tau": list(sch.taus),
            "t": list(sch.times), "eta": list(report.eta), "eta_cum": list(report.cumulative)}
    if kelvin is not None:
        scale = timing.full_time_s / timing.full_time * 1e9
        cols["t_ns"] = [t * scale for t in sch.times]
    steps = ResultTable("example5", cols)
    s = {"N": [N], "memories": [j if reached else None], "t_j": [timing.full_time],
         "T_bar": [timing.mean_time], "ratio": [timing.ratio], "eta_cum": [report.total],
         "p_loss": [p_loss]}
    if kelvin is not None:
        s["t_j_ns"] = [timing.full_time_s * 1e9]
        s["T_bar_ns"] = [timing.mean_time_s * 1e9]
    summary_table = ResultTable("example5_summary", s)
    summary = {k: v[0] for k, v in s.items()}
    summary["target_reached"] = reached
    summary["time_unit"] = config.time_unit if kelvin is not None else "natural"
    return [steps, summary_table], summary


def _sweep_point(args):
    config, N, seed = args
    spec = sample_random_chain(DisorderModel(1.0, config.delta, seed), N)
    sch, prof, reached = _greedy_until(spec, config)
    timing = average_decoding_time(prof, sch, config.j_units_kelvin, config.time_unit)
    sd = chain_spectrum(spec)
    rng = np.random.default_rng(seed)
    fid = 1.0
    for _ in range(3):
        _, rep = run_protocol(QubitState.random(rng), sd, sch, cooling=config.cooling)
        fid = min(fid, float(np.nanmin(rep.fidelities)))
    return {"N": N, "seed": seed, "memories": len(sch) if reached else None,
            "eta": float(prof.eta[0]), "eta_cum": prof.total, "t_j": timing.full_time,
            "T_bar": timing.mean_time, "ratio": timing.ratio, "fidelity_min": fid,
            "t_j_ns": None if timing.full_time_s is None else timing.full_time_s * 1e9,
            "T_bar_ns": None if timing.mean_time_s is None else timing.mean_time_s * 1e9}


def sweep_seeds(config: RunConfig) -> list[int]:
    """Per-run seeds derived from the master seed (independent of worker count)."""
    children = np.random.SeedSequence(config.seed).spawn(config.seeds)
    return [int(c.generate_state(1)[0]) for c in children]


def cmd_disorder_sweep(config: RunConfig):
    seeds = sweep_seeds(config)
    work = [(config, N, s) for N in config.n for s in seeds]
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as ex:
            results = list(ex.map(_sweep_point, work))
    else:
        results = [_sweep_point(w) for w in work]
    keys = ("N", "seed", "memories", "eta", "eta_cum", "t_j", "T_bar", "ratio",
            "t_j_ns", "T_bar_ns", "fidelity_min")
    if config.j_units_kelvin is None:
        keys = tuple(k for k in keys if not k.endswith("_ns"))
    runs = ResultTable("sweep", {k: [r[k] for r in results] for k in keys})

    stat_keys = ("memories", "eta", "t_j", "T_bar", "ratio")
    agg = {c: [] for c in ("N", "stat") + stat_keys}
    summary = {}
    for N in config.n:
        sub = [r for r in results if r["N"] == N]
        for stat, fn in (("mean", np.mean), ("std", np.std)):
            agg["N"].append(N)
            agg["stat"].append(stat)
            for k in stat_keys:
                vals = [r[k] for r in sub if r[k] is not None]
                agg[k].append(float(fn(vals)) if vals else None)
        uniform_j = _greedy_until(ChainSpec.uniform(N), config)
        summary[str(N)] = {
            "mean_memories": agg["memories"][-2],
            "uniform_memories": len(uniform_j[0]) if uniform_j[2] else None,
            "unreached": sum(r["memories"] is None for r in sub),
            "min_fidelity": min(r["fidelity_min"] for r in sub),
        }
    summary["conclusive"] = all(r["fidelity_min"] >= 1 - 1e-9 for r in results)
    return [runs, ResultTable("sweep_summary", agg)], summary, seeds


def cmd_verify(config: RunConfig):
    from .verify import run_all

    results = run_all(config.seed)
    checks = [{"check": name, "max_deviation": float(dev), "tolerance": tol,
               "passed": bool(dev <= tol)} for name, dev, tol in results]
    table = ResultTable("verify", {k: [c[k] for c in checks]
                                   for k in ("check", "max_deviation", "tolerance", "passed")})
    return [table], {"checks": checks, "all_passed": all(c["passed"] for c in checks)}
