"""Command line interface: calibrate, run, sweep, extend and report."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .econ import REPORT_COLUMNS, read_report, report_row, write_report
from .errors import TracenetError
from .network import extend_graph, load_graph
from .scenarios import APP_PROPORTIONS, ASYMPTOMATIC_RATIOS, build_scenario, load_config
from .simulate import SERIES, calibrate_r0, default_p_grid, run_ensemble, sweep_app_usage
from .synthetic import synthetic_graph

log = logging.getLogger("tracenet")


def get_graph(args):
    if args.data:
        log.info("loading contact data from %s", args.data)
        return load_graph(args.data)
    return synthetic_graph()


def out_dir(args):
    path = Path(args.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def scenario_config(args, scenario, app, asym):
    """Scenario config with file overrides and then command-line overrides applied."""
    if args.config:
        base = load_config(args.config)
        cfg = replace(build_scenario(scenario, app, asym), disease=base.disease, trace=base.trace,
                      horizon_days=base.horizon_days, trials=base.trials, seed=base.seed)
    else:
        cfg = build_scenario(scenario, app, asym)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.trials is not None:
        cfg = replace(cfg, trials=args.trials)
    return cfg


def write_series(path, agg):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("day",) + SERIES)
        for t in range(len(agg.mean_series["S"])):
            w.writerow([t] + [round(float(agg.mean_series[k][t]), 4) for k in SERIES])


def cmd_calibrate(args):
    from .plotting import plot_r0

    out = out_dir(args)
    grid = default_p_grid() if args.points is None else np.round(np.arange(args.points) * 0.0025, 6)
    curve = calibrate_r0(get_graph(args), grid, trials=args.trials or 1800,
                         seed=20201221 if args.seed is None else args.seed, workers=args.workers)
    with open(out / "r0.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("p", "r0"))
        w.writerows((p, round(r, 4)) for p, r in curve)
    plot_r0(curve, out / "r0.png")
    for p, r in curve:
        if abs(p - 0.10) < 1e-9:
            print(f"p=0.10 R0={r:.3f}")
    print(f"wrote {out / 'r0.csv'}")


def cmd_run(args):
    from .plotting import plot_series

    out = out_dir(args)
    graph = get_graph(args)
    cfg = scenario_config(args, args.scenario, args.app, args.asymp)
    agg = run_ensemble(cfg, graph, workers=args.workers)
    baseline = None
    if args.app > 0:
        baseline = run_ensemble(baseline_config(args, cfg), graph, workers=args.workers)
    row = report_row(cfg, agg, baseline)
    stem = f"s{cfg.scenario_id}_app{round(args.app * 100):02d}_asym{round(args.asymp * 100):02d}"
    write_report(out / f"{stem}.csv", [row])
    write_series(out / f"{stem}_series.csv", agg)
    plot_series(agg, out / f"{stem}.png", title=f"{cfg.name}, {args.app:.0%} app, {args.asymp:.0%} asymptomatic")
    for k in REPORT_COLUMNS:
        print(f"{k:>20}: {row[k]}")


def cmd_sweep(args):
    from .plotting import plot_sweep

    out = out_dir(args)
    cfg = scenario_config(args, args.scenario, 0.0, args.asymp)
    rows = sweep_app_usage(cfg, get_graph(args), workers=args.workers)
    stem = f"sweep_s{cfg.scenario_id}_asym{round(args.asymp * 100):02d}"
    with open(out / f"{stem}.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("app_proportion", "infected"))
        w.writerows((p, round(inf, 3)) for p, inf, _ in rows)
    plot_sweep(rows, out / f"{stem}.png", title=cfg.name)
    print(f"wrote {out / (stem + '.csv')}")


def cmd_extend(args):
    out = out_dir(args)
    graph = get_graph(args)
    seed = 0 if args.seed is None else args.seed
    big = extend_graph(graph, args.target_n, np.random.default_rng(seed))
    path = out / f"extended_{args.target_n}.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("day", "i", "j", "duration"))
        for t, day in enumerate(big.base_days):
            for i, j, d in zip(day.i.tolist(), day.j.tolist(), day.d.tolist()):
                w.writerow((t, i, j, d))
    print(f"mean degree {graph.mean_degree():.2f} -> {big.mean_degree():.2f}")
    print(f"wrote {path}")


def baseline_config(args, cfg):
    """Scenario 1 without app users on the same graph as ``cfg``."""
    return replace(scenario_config(args, 1, 0.0, cfg.asymptomatic_ratio), population=cfg.population,
                   use_extended_graph=cfg.use_extended_graph)


def cmd_report(args):
    from .plotting import plot_costs, plot_series

    out = out_dir(args)
    graph = get_graph(args)
    rows, baselines = [], {}
    for asym in args.asymp_ratios:
        for sid in args.scenarios:
            for app in args.apps:
                cfg = scenario_config(args, sid, app, asym)
                base_cfg = baseline_config(args, cfg)
                key = (asym, cfg.use_extended_graph)
                if key not in baselines:
                    baselines[key] = run_ensemble(base_cfg, graph, workers=args.workers)
                baseline = baselines[key]
                agg = baseline if (sid, app) == (1, 0.0) else run_ensemble(cfg, graph, workers=args.workers)
                rows.append(report_row(cfg, agg, baseline))
                name = f"s{sid}_app{round(app * 100):02d}_asym{round(asym * 100):02d}"
                write_series(out / f"{name}_series.csv", agg)
                plot_series(agg, out / f"{name}.png", title=f"{cfg.name}, {app:.0%} app, {asym:.0%} asymptomatic")
                log.info("%s infected %.2f", name, agg.infected)
    write_report(out / "report.csv", rows)
    plot_costs(read_report(out / "report.csv"), out / "costs.png")
    print(f"wrote {out / 'report.csv'} ({len(rows)} rows)")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="master seed")
    common.add_argument("--trials", type=int, default=None, help="trials per ensemble")
    common.add_argument("--config", default=None, help="JSON file with parameter overrides")
    common.add_argument("--data", default=None, help="proximity log (t i j ...); synthetic school if omitted")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--workers", type=int, default=1, help="worker processes")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="tracenet", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", parents=[common], help="R0 as a function of p")
    p.add_argument("--points", type=int, default=None, help="number of p values (default 100)")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("run", parents=[common], help="one scenario ensemble")
    p.add_argument("--scenario", type=int, required=True, choices=range(1, 6))
    p.add_argument("--app", type=float, default=0.0, help="proportion of app users")
    p.add_argument("--asymp", type=float, default=0.40, help="asymptomatic ratio")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", parents=[common], help="infections against app usage 0..100%%")
    p.add_argument("--scenario", type=int, default=3, choices=range(1, 6))
    p.add_argument("--asymp", type=float, default=0.40)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("extend", parents=[common], help="grow the contact graph")
    p.add_argument("--target-n", type=int, required=True)
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("report", parents=[common], help="scenario grid with costs")
    p.add_argument("--scenarios", type=int, nargs="+", default=[1, 2, 3, 4], choices=range(1, 6))
    p.add_argument("--apps", type=float, nargs="+", default=list(APP_PROPORTIONS))
    p.add_argument("--asymp-ratios", type=float, nargs="+", default=[0.40, 0.80],
                   help=f"any of {ASYMPTOMATIC_RATIOS}")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (TracenetError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
