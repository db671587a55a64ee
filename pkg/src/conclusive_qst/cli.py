"""Command-line front end: ``conclusive-qst {fig2,fig3,example5,sweep,verify}``."""
from __future__ import annotations

import argparse
import sys
import time

from . import experiments as ex
from .scheduler import DEFAULT_RESOLUTION, WINDOW_FACTOR

DEFAULTS = {
    "fig2": dict(n=list(range(2, 31))),
    "fig3": dict(n=[5, 10, 20, 30], steps=40),
    "example5": dict(n=[10], j_units_kelvin=20.0),
    "sweep": dict(n=[10], delta=0.1, seeds=100),
    "verify": dict(),
}


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _n_range(text: str) -> list[int]:
    lo, _, hi = text.partition(":")
    if not hi:
        raise argparse.ArgumentTypeError("expected LO:HI")
    return list(range(int(lo), int(hi) + 1))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_mutually_exclusive_group()
    g.add_argument("--n", type=_int_list, help="chain length(s), comma separated")
    g.add_argument("--n-range", type=_n_range, dest="n", help="inclusive range LO:HI")
    common.add_argument("--steps", type=int, help="greedy steps per chain (fig3)")
    common.add_argument("--eta-target", type=float, help="target cumulative success probability")
    common.add_argument("--delta", type=float, help="relative coupling spread")
    common.add_argument("--seeds", type=int, help="number of disorder realisations")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--tau-window", type=float,
                        help=f"search window in units of N/J (default {WINDOW_FACTOR})")
    common.add_argument("--grid", type=int, help=f"grid points per search (default {DEFAULT_RESOLUTION})")
    common.add_argument("--j-cap", type=int, help="give up after this many memories")
    common.add_argument("--j-units-kelvin", type=float,
                        help="coupling in kelvin; enables physical time columns")
    common.add_argument("--time-unit", choices=("h", "hbar"),
                        help="natural time unit h/(k_B J) or hbar/(k_B J) (default h)")
    common.add_argument("--no-cooling", action="store_const", const="none", dest="cooling",
                        help="keep residual chain excitation instead of resetting it")
    common.add_argument("--workers", type=int, help="parallel processes for sweeps")
    common.add_argument("--out", help=f"output directory (default ${ex.OUT_ENV} or ./results)")

    p = argparse.ArgumentParser(prog="conclusive-qst", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("fig2", parents=[common], help="max first-step success vs N")
    sub.add_parser("fig3", parents=[common], help="cumulative success vs step for several N")
    sub.add_parser("example5", parents=[common], help="N=10 memory budget and decoding times")
    sub.add_parser("sweep", parents=[common], help="disorder Monte Carlo sweep")
    sub.add_parser("verify", parents=[common], help="run oracle and invariant cross-checks")
    return p


def config_from_args(ns: argparse.Namespace) -> ex.RunConfig:
    values = dict(DEFAULTS[ns.command])
    for k, v in vars(ns).items():
        if k != "command" and v is not None:
            values[k] = v
    return ex.RunConfig(command=ns.command, **values).validate()


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        config = config_from_args(ns)
    except ex.ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    start = time.perf_counter()
    seeds = None
    if config.command == "sweep":
        tables, summary, seeds = ex.cmd_disorder_sweep(config)
    else:
        runner = {"fig2": ex.cmd_fig2, "fig3": ex.cmd_fig3, "example5": ex.cmd_example5,
                  "verify": ex.cmd_verify}[config.command]
        tables, summary = runner(config)
    paths = ex.write_outputs(config, tables, summary, time.perf_counter() - start, seeds)
    ok = _report(config, tables, summary)
    for p in paths:
        print(f"wrote {p}")
    return 0 if ok else 1


def _report(config, tables, summary) -> bool:
    if config.command == "verify":
        for c in summary["checks"]:
            flag = "PASS" if c["passed"] else "FAIL"
            print(f"[{flag}] {c['check']}: max deviation {c['max_deviation']:.3e} "
                  f"(tol {c['tolerance']:.0e})")
        return summary["all_passed"]
    if config.command == "example5":
        s = summary
        print(f"N={s['N']}: memories for eta>={config.eta_target}: {s['memories']}")
        print(f"t_j = {s['t_j']:.4f}, T_bar = {s['T_bar']:.4f} (natural units), "
              f"T_bar/t_j = {s['ratio']:.4f} (~1/{1 / s['ratio']:.1f})")
        if "t_j_ns" in s:
            print(f"t_j = {s['t_j_ns']:.4f} ns, T_bar = {s['T_bar_ns']:.4e} ns "
                  f"[time unit {s['time_unit']}/(k_B J), J = {config.j_units_kelvin} K]")
        return s["target_reached"]
    if config.command == "sweep":
        for N, s in summary.items():
            if N != "conclusive":
                print(f"N={N}: mean memories {s['mean_memories']} (uniform {s['uniform_memories']}), "
                      f"min fidelity {s['min_fidelity']:.12f}")
        return summary["conclusive"]
    for t in tables:
        print(t.to_csv(), end="")
    return True


if __name__ == "__main__":
    sys.exit(main())
