"""Command-line front end.

    heliasdo case1 --observer asosmo --disturbance sinusoid --out runs/c1
    heliasdo case2 --set elev.ctrl.mu=0.2
    heliasdo simulate --scenario my.cfg
    heliasdo verify-gains
    heliasdo compare-observers --disturbance sinusoid
    heliasdo metrics --series runs/case2/series.csv

Run directories contain ``series.csv``, ``metrics.txt`` (JSON),
``plots/*.dat`` and ``manifest.cfg`` (the fully resolved scenario, readable
back with ``--scenario``).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import fileio, metrics, observer
from .errors import ConfigError, SimulationError
from .scenario import (
    CONSTANT,
    SINUSOID,
    Scenario,
    preset_case1,
    preset_case2,
    simulate,
    validate_scenario,
)

log = logging.getLogger("heliasdo")

EXIT_FAILED_CHECK = 1
EXIT_CONFIG = 2
EXIT_SIMULATION = 3
EXIT_IO = 4

RUN_PLOTS = {
    "disturbance_elev": ["d1", "d1_hat"],
    "disturbance_pitch": ["d2", "d2_hat"],
    "inputs": ["Vf", "Vb"],
    "tracking_elev": ["x1", "x1d", "z1"],
    "tracking_pitch": ["x3", "x3d", "z3"],
    "adaptive": ["Ld1", "Ld2", "p_hat1", "p_hat2"],
}

COMPARE_PLOTS = {
    "compare_d1": ["asdo.d1", "asdo.d1_hat", "asosmo.d1_hat"],
    "compare_d2": ["asdo.d2", "asdo.d2_hat", "asosmo.d2_hat"],
    "compare_Vf": ["asdo.Vf", "asosmo.Vf"],
    "compare_Vb": ["asdo.Vb", "asosmo.Vb"],
}


def _parse_sets(items) -> dict[str, str]:
    out = {}
    for item in items or ():
        key, eq, value = item.partition("=")
        if not eq:
            raise ConfigError(f"override {item!r} is not KEY=VALUE")
        out[key.strip()] = value.strip()
    return out


def resolve_scenario(args, base: Scenario, validate: bool = True) -> Scenario:
    if getattr(args, "scenario", None):
        path = Path(args.scenario)
        if not path.is_file():
            raise FileNotFoundError(f"scenario file not found: {path}")
        base = fileio.read_scenario(path, base)
    flags = {}
    for name in ("step", "duration", "integrator", "filter_substeps"):
        value = getattr(args, name, None)
        if value is not None:
            flags[name] = str(value)
    flags.update(_parse_sets(getattr(args, "set", None)))
    sc = fileio.apply_overrides(base, flags)
    if validate:
        validate_scenario(sc)
    return sc


def write_run(ts, sc: Scenario, out: Path, report: metrics.MetricsReport) -> None:
    (out / "plots").mkdir(parents=True, exist_ok=True)
    fileio.write_scenario(sc, out / "manifest.cfg")
    fileio.write_csv(ts, out / "series.csv")
    (out / "metrics.txt").write_text(json.dumps(report.as_dict(), indent=2) + "\n", encoding="utf-8")
    for name, cols in RUN_PLOTS.items():
        fileio.emit_plot_data(ts, cols, out / "plots" / f"{name}.dat")


def _summary(report: metrics.MetricsReport) -> str:
    def fmt(v):
        return "not settled" if v is None else f"{v:.4g} s"

    return "\n".join([
        f"settle |z1|<={report.band}: {fmt(report.settle_z1)}, |z3|: {fmt(report.settle_z3)}",
        f"rmse z1={report.rmse_z1:.4g} z3={report.rmse_z3:.4g} rad",
        f"max |d-d_hat| after {report.transient}s: elev {report.max_obs_err1_after:.4g}, "
        f"pitch {report.max_obs_err2_after:.4g}",
        f"total variation Vf={report.tv_Vf:.6g} Vb={report.tv_Vb:.6g} V",
        f"saturation fraction {report.saturation_fraction:.4g}",
    ])


def _run_one(sc: Scenario, out: Path, args) -> int:
    ts = simulate(sc)
    report = metrics.compute_metrics(ts, args.band, args.hold, args.transient)
    write_run(ts, sc, out, report)
    print(_summary(report))
    print(f"wrote {out}")
    return 0


def cmd_case1(args) -> int:
    sc = resolve_scenario(args, preset_case1(args.observer, args.disturbance))
    return _run_one(sc, Path(args.out or f"runs/case1_{args.observer}_{args.disturbance}"), args)


def cmd_case2(args) -> int:
    sc = resolve_scenario(args, preset_case2())
    return _run_one(sc, Path(args.out or "runs/case2"), args)


def cmd_simulate(args) -> int:
    sc = resolve_scenario(args, Scenario())
    return _run_one(sc, Path(args.out or "runs/simulate"), args)


def cmd_verify_gains(args) -> int:
    # no validation here: a violated condition is the report, not an error
    sc = resolve_scenario(args, preset_case1(), validate=False)
    ok = True
    lines = []
    for name in ("elev", "pitch"):
        g = getattr(sc, name).effective_asdo()
        if g.mode != observer.ASDO:
            lines.append(f"[{name}] m={g.m:g}: ASOSMO mode, gain condition not applicable")
            continue
        rep = observer.verify_gain_condition(g)
        ok &= rep.all_ok
        lines.append(f"[{name}] k=({g.k1:g}, {g.k2:g}, {g.k3:g}, {g.k4:g}) m={g.m:g}")
        lines += ["  " + s for s in rep.lines()]
    text = "\n".join(lines)
    print(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        fileio.write_scenario(sc, out / "manifest.cfg")
        (out / "gains.txt").write_text(text + "\n", encoding="utf-8")
    return 0 if ok else EXIT_FAILED_CHECK


def cmd_compare(args) -> int:
    base = resolve_scenario(args, preset_case1(observer.ASDO, args.disturbance))
    scs = {
        mode: replace(base, elev=replace(base.elev, observer_mode=mode),
                      pitch=replace(base.pitch, observer_mode=mode))
        for mode in (observer.ASDO, observer.ASOSMO)
    }
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=2) as pool:
            futures = {m: pool.submit(simulate, s) for m, s in scs.items()}
            runs = {m: f.result() for m, f in futures.items()}
    else:
        runs = {m: simulate(s) for m, s in scs.items()}
    out = Path(args.out or f"runs/compare_{args.disturbance}")
    reports = {}
    for mode, ts in runs.items():
        reports[mode] = metrics.compute_metrics(ts, args.band, args.hold, args.transient)
        write_run(ts, scs[mode], out / mode, reports[mode])
    (out / "plots").mkdir(parents=True, exist_ok=True)
    for name, cols in COMPARE_PLOTS.items():
        fileio.emit_plot_data(runs, cols, out / "plots" / f"{name}.dat")
    fileio.write_scenario(base, out / "manifest.cfg")
    a, b = reports[observer.ASDO], reports[observer.ASOSMO]
    smoother = a.tv_Vf < b.tv_Vf and a.tv_Vb < b.tv_Vb
    summary = {
        "asdo": a.as_dict(),
        "asosmo": b.as_dict(),
        "asdo_smoother_inputs": smoother,
    }
    (out / "metrics.txt").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    print(f"{'':>24}{'asdo':>14}{'asosmo':>14}")
    for key in ("tv_Vf", "tv_Vb", "tv_d1_hat", "tv_d2_hat", "max_obs_err1_after", "max_obs_err2_after"):
        print(f"{key:>24}{getattr(a, key):>14.6g}{getattr(b, key):>14.6g}")
    print(f"ASDO inputs smoother than ASOSMO: {'yes' if smoother else 'no'}")
    print(f"wrote {out}")
    return 0


def cmd_metrics(args) -> int:
    path = Path(args.series)
    if not path.is_file():
        raise FileNotFoundError(f"series file not found: {path}")
    ts = fileio.read_csv(path)
    report = metrics.compute_metrics(ts, args.band, args.hold, args.transient)
    text = json.dumps(report.as_dict(), indent=2)
    print(text)
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "metrics.txt").write_text(text + "\n", encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heliasdo", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_flags(p, scenario_required=False):
        p.add_argument("--scenario", required=scenario_required, help="scenario config file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--step", type=float)
        p.add_argument("--duration", type=float)
        p.add_argument("--integrator", choices=("euler", "rk4"))
        p.add_argument("--filter-substeps", dest="filter_substeps", type=int)
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="dotted config override, repeatable")

    def metric_flags(p):
        p.add_argument("--band", type=float, default=0.01, help="settling band (rad)")
        p.add_argument("--hold", type=float, default=2.0, help="settling hold (s)")
        p.add_argument("--transient", type=float, default=5.0,
                       help="start of the post-transient window (s)")

    p = sub.add_parser("case1", help="observer comparison preset")
    p.add_argument("--observer", choices=(observer.ASDO, observer.ASOSMO), default=observer.ASDO)
    p.add_argument("--disturbance", choices=(CONSTANT, SINUSOID), default=CONSTANT)
    scenario_flags(p)
    metric_flags(p)
    p.set_defaults(func=cmd_case1)

    p = sub.add_parser("case2", help="tracking preset with d = sin(2t)")
    scenario_flags(p)
    metric_flags(p)
    p.set_defaults(func=cmd_case2)

    p = sub.add_parser("simulate", help="run a scenario file")
    scenario_flags(p, scenario_required=True)
    metric_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify-gains", help="check the observer gain condition and matrices")
    scenario_flags(p)
    p.set_defaults(func=cmd_verify_gains)

    p = sub.add_parser("compare-observers", help="ASDO vs ASOSMO on one scenario")
    p.add_argument("--disturbance", choices=(CONSTANT, SINUSOID), default=SINUSOID)
    p.add_argument("--jobs", type=int, default=2)
    scenario_flags(p)
    metric_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("metrics", help="metrics of an existing series.csv")
    p.add_argument("--series", required=True)
    p.add_argument("--out")
    metric_flags(p)
    p.set_defaults(func=cmd_metrics)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        warnings.showwarning = lambda msg, cat, *a, **k: log.warning("%s", msg)
        try:
            return args.func(args)
        except ConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except SimulationError as exc:
            print(f"simulation aborted: {exc}", file=sys.stderr)
            return EXIT_SIMULATION
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
