"""Command-line entry points.

    qaoa-lab gen-graph  --n 12 --d 3 --weighted --seed 1 --out g.txt
    qaoa-lab simulate   --graph g.txt --params params.json [--dump-state psi.bin]
    qaoa-lab optimize   --graph g.txt --strategy fourier --q inf --R 10
                        --alpha 0.6 --p-max 20 --seed 0 --out results.json
    qaoa-lab anneal     --graph g.txt --T 50 [--schedule file.txt]
                        [--populations --k 4] --out pops.csv
    qaoa-lab tts        --records dir/ --kind qaoa --pd 0.99 --out tts.csv
    qaoa-lab fit        --points curve.csv --model exp
    qaoa-lab noise-sim  --graph g.txt --start-level 1 --init educated
                        --eps 0.1 --xi 0.05 --delta 0.01 --seeds 10 --out dir/
    qaoa-lab bandwidth  --graph g.txt [--renumber --out g2.txt]
    qaoa-lab run-plan   --plan fig4 [--plan-file plan.json] --out dir/
    qaoa-lab verify     --records dir/

The default output directory for run-plan honors $QAOA_LAB_CACHE.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import annealer, graphs, harness, optimizer, shot_noise, statevector, tts as tts_mod


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--out", type=str, default=None)


def _load_params(path: str) -> statevector.QaoaParams:
    payload = json.loads(Path(path).read_text())
    if "u" in payload:
        fp = optimizer.FourierParams(np.asarray(payload["u"]), np.asarray(payload["v"]),
                                     payload.get("p", len(payload["u"])))
        return optimizer.fourier_to_direct(fp)
    return statevector.QaoaParams(np.asarray(payload["gammas"]),
                                  np.asarray(payload["betas"]))


def cmd_gen_graph(args) -> int:
    g = graphs.generate_random_regular(args.n, args.d, args.seed)
    if args.weighted:
        g = graphs.assign_random_weights(g, args.seed + 1)
    out = args.out or f"{'w' if args.weighted else 'u'}{args.d}R_n{args.n}_s{args.seed}.txt"
    graphs.save_graph(g, out)
    print(f"wrote {out}: N={g.n_vertices} M={g.n_edges} kind={g.kind}")
    return 0


def cmd_simulate(args) -> int:
    g = graphs.load_graph(args.graph)
    params = _load_params(args.params)
    cost = statevector.build_diagonal_cost(g)
    state = statevector.qaoa_state(cost, params)
    f, var = statevector.expectation_and_variance(state, cost)
    cut = graphs.brute_force_maxcut(g)
    p_gs = statevector.ground_state_population(state, cut)
    print(f"p={params.p} F={f:.10g} r={f / cut.c_max:.10g} "
          f"p_GS={p_gs:.10g} Var={var:.10g} T_p={params.total_time:.10g}")
    if args.dump_state:
        statevector.dump_state(state, args.dump_state)
        print(f"state -> {args.dump_state}")
    return 0


def cmd_optimize(args) -> int:
    g = graphs.load_graph(args.graph)
    if args.config:
        cfg = optimizer.StrategyConfig.from_json(Path(args.config).read_text())
    else:
        q = None if args.q in (None, "inf") else int(args.q)
        cfg = optimizer.StrategyConfig(
            strategy=args.strategy, q=q, r=args.R, alpha=args.alpha,
            p_max=args.p_max, seed=args.seed, n_seeds=args.n_seeds,
            objective_tol=args.tol, method=args.method,
        )
    results = optimizer.run_strategy(g, cfg)
    payload = [optimizer.level_result_to_dict(lr) for lr in results]
    text = json.dumps(payload, indent=2)
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out} ({len(payload)} level records)")
    else:
        print(text)
    return 0


def cmd_anneal(args) -> int:
    g = graphs.load_graph(args.graph)
    if args.schedule and args.schedule != "linear":
        schedule = annealer.load_schedule(args.schedule)
    else:
        schedule = annealer.linear_ramp(args.T)
    cut = graphs.brute_force_maxcut(g)
    if args.populations:
        times = np.linspace(0.0, schedule.total_time, args.n_times)
        ts, pops = annealer.instantaneous_populations(g, schedule, times, k=args.k)
        out = args.out or "populations.csv"
        with open(out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t"] + [f"pop_{i}" for i in range(args.k)])
            for t, row in zip(ts, pops):
                writer.writerow([repr(float(t))] + [repr(float(x)) for x in row])
        print(f"wrote {out}")
    state = annealer.evolve(g, schedule, basis=statevector.PARITY_POSITIVE)
    p_gs = statevector.ground_state_population(state, cut)
    print(f"T={schedule.total_time:.10g} p_GS={p_gs:.10g} "
          f"TTS={tts_mod.tts(schedule.total_time, p_gs):.10g}")
    return 0


def cmd_tts(args) -> int:
    records_dir = Path(args.records)
    rows = []
    for path in sorted(records_dir.glob("records/*.json")) or sorted(records_dir.glob("*.json")):
        rec = json.loads(path.read_text())
        key = "tts_qaoa" if args.kind == "qaoa" else "tts_qa"
        for entry in rec.get("outputs", {}).get(key, []):
            p_gs = entry["p_gs"]
            value = tts_mod.tts(entry["run_time"], p_gs, args.pd)
            rows.append([rec["graph_file"], entry["control"], entry["run_time"],
                         repr(p_gs), repr(value) if math.isfinite(value) else "inf"])
    if not rows:
        print("no matching records", file=sys.stderr)
        return 1
    out = args.out or f"tts_{args.kind}.csv"
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["graph", "control", "run_time", "p_gs", "tts"])
        writer.writerows(rows)
    print(f"wrote {out} ({len(rows)} rows)")
    return 0


def cmd_fit(args) -> int:
    pts = []
    with open(args.points, newline="") as fh:
        for row in csv.DictReader(fh):
            pts.append((float(row["p"]), float(row[args.column])))
    model = {"exp": tts_mod.MODEL_EXPONENTIAL, "stretched": tts_mod.MODEL_STRETCHED}[args.model]
    fit = tts_mod.fit_scaling(pts, model)
    print(f"model={fit.model} p0={fit.p0:.8g} prefactor={fit.prefactor:.8g} "
          f"residual={fit.residual:.8g}")
    return 0


def cmd_noise_sim(args) -> int:
    g = graphs.load_graph(args.graph)
    out = Path(args.out or "noise_sim")
    out.mkdir(parents=True, exist_ok=True)
    for s in range(args.seeds):
        cfg = shot_noise.NoiseConfig(epsilon=args.eps, xi=args.xi,
                                     delta=args.delta, seed=args.seed + s)
        ledger, results = shot_noise.run_noisy_experiment(
            g, args.start_level, args.init, cfg, args.p_max)
        ledger.save_csv(out / f"ledger_seed{args.seed + s:04d}.csv")
        summary = [optimizer.level_result_to_dict(lr) for lr in results]
        (out / f"levels_seed{args.seed + s:04d}.json").write_text(
            json.dumps(summary, indent=2))
    print(f"wrote {args.seeds} ledgers to {out}/")
    return 0


def cmd_bandwidth(args) -> int:
    g = graphs.load_graph(args.graph)
    numbering = graphs.cuthill_mckee(g)
    before = graphs.bandwidth(g)
    after = graphs.bandwidth(graphs.apply_numbering(g, numbering))
    print(f"bandwidth: {before} -> {after}")
    if args.renumber:
        out = args.out or (str(args.graph) + ".renumbered")
        graphs.save_graph(graphs.apply_numbering(g, numbering), out)
        print(f"wrote {out}")
    return 0


def cmd_run_plan(args) -> int:
    if args.plan_file:
        plan = harness.ExperimentPlan.from_json(Path(args.plan_file).read_text())
    else:
        plan = harness.builtin_plan(args.plan)
    out = args.out or os.environ.get("QAOA_LAB_CACHE", "qaoa_lab_runs")
    out = Path(out) / plan.recipe
    manifest = harness.run_plan(plan, out, workers=args.workers)
    print(f"{len(manifest['records'])} records, {len(manifest['failures'])} failures")
    for name in manifest["summaries"]:
        print(f"  {out / name}")
    return 1 if manifest["failures"] else 0


def cmd_verify(args) -> int:
    report = harness.verify_records(args.records)
    if report.clean:
        print(f"OK: {report.n_records} records verified")
        return 0
    for issue in report.issues:
        print(f"ISSUE: {issue}")
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qaoa-lab", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-graph", help="random regular MaxCut instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--weighted", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_gen_graph)

    p = sub.add_parser("simulate", help="evaluate a parametrized circuit")
    p.add_argument("--graph", required=True)
    p.add_argument("--params", required=True, help="JSON with gammas/betas or u/v")
    p.add_argument("--dump-state", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("optimize", help="run a parameter-search strategy")
    p.add_argument("--graph", required=True)
    p.add_argument("--strategy", default="fourier", choices=["ri", "interp", "fourier"])
    p.add_argument("--q", default="inf")
    p.add_argument("--R", type=int, default=10)
    p.add_argument("--alpha", type=float, default=0.6)
    p.add_argument("--p-max", type=int, default=20)
    p.add_argument("--n-seeds", type=int, default=100, help="RI strategy only")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--method", default="bfgs", choices=["bfgs", "nelder-mead"])
    p.add_argument("--config", default=None, help="JSON StrategyConfig (overrides flags)")
    _add_common(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("anneal", help="Schrodinger evolution under a schedule")
    p.add_argument("--graph", required=True)
    p.add_argument("--T", type=float, default=10.0)
    p.add_argument("--schedule", default="linear", help="'linear' or a knot file")
    p.add_argument("--populations", action="store_true")
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--n-times", type=int, default=41)
    _add_common(p)
    p.set_defaults(func=cmd_anneal)

    p = sub.add_parser("tts", help="tabulate TTS from stored run records")
    p.add_argument("--records", required=True)
    p.add_argument("--kind", choices=["qa", "qaoa"], required=True)
    p.add_argument("--pd", type=float, default=0.99)
    _add_common(p)
    p.set_defaults(func=cmd_tts)

    p = sub.add_parser("fit", help="fit a scaling model to (p, 1-r) points")
    p.add_argument("--points", required=True, help="CSV with columns p and 1-r")
    p.add_argument("--model", choices=["exp", "stretched"], required=True)
    p.add_argument("--column", default="mean_one_minus_r")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("noise-sim", help="projection-noise Monte Carlo")
    p.add_argument("--graph", required=True)
    p.add_argument("--start-level", type=int, choices=[1, 5], default=1)
    p.add_argument("--init", choices=["educated", "random"], default="educated")
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--xi", type=float, default=0.05)
    p.add_argument("--delta", type=float, default=0.01)
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--p-max", type=int, default=6)
    _add_common(p)
    p.set_defaults(func=cmd_noise_sim)

    p = sub.add_parser("bandwidth", help="interaction-range reduction")
    p.add_argument("--graph", required=True)
    p.add_argument("--renumber", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_bandwidth)

    p = sub.add_parser("run-plan", help="execute a named experiment plan")
    p.add_argument("--plan", default="scaling")
    p.add_argument("--plan-file", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_run_plan)

    p = sub.add_parser("verify", help="re-check invariants of stored records")
    p.add_argument("--records", required=True)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
