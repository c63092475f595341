"""Experiment orchestration: named plans, run records, summary tables.

A plan names a reproduction recipe, an instance ensemble and the module
configuration; running it generates the ensemble, executes one task per
instance (in parallel across a worker pool), persists one JSON RunRecord per
task, and emits summary CSVs.  Records are content-addressed by a hash of
(recipe, graph hash, config, seed), so re-running a completed plan recomputes
nothing and reproduces byte-identical summaries.

Recipes (desk-scale analogues of the benchmark figures):

* ``params``    optimal-parameter patterns per level (gamma_i up, beta_i down)
* ``heuristic`` median random restarts needed to match the heuristic
* ``scaling``   ensemble-average fractional error vs level + model fits
* ``tts``       optimal time-to-solution, circuit vs annealing, per instance
* ``hard``      deep dive on a small-gap instance: p_GS(T) bump, level scan,
                converted annealing path, instantaneous populations
* ``noise``     measurement-cost curves under projection noise + QA baselines
* ``adiabatic`` adiabaticity measure along the path

Aliases fig2/fig3b/fig4/fig5/fig6/fig7/fig8a map to these in the same order.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import annealer, graphs, optimizer, shot_noise, tts as tts_mod
from .statevector import (
    PARITY_POSITIVE,
    STATEVECTOR_CAP,
    build_diagonal_cost,
    ground_state_population,
)

SCHEMA_VERSION = 1

RECIPE_ALIASES = {
    "fig2": "params",
    "fig3b": "heuristic",
    "fig4": "scaling",
    "fig5": "tts",
    "fig6": "hard",
    "fig7": "noise",
    "fig8a": "adiabatic",
}


@dataclass
class ExperimentPlan:
    """Recipe + ensemble + config.  ``config`` keys are recipe-specific and
    merged over the recipe's defaults."""

    recipe: str
    n_list: list[int] = field(default_factory=lambda: [10])
    kind: str = "w3R"  # e.g. u3R, w3R, u2R, w4R
    count: int = 10
    seed: int = 0
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        self.recipe = RECIPE_ALIASES.get(self.recipe, self.recipe)
        if self.recipe not in RECIPES:
            raise ValueError(f"unknown recipe {self.recipe!r}")
        if max(self.n_list) > STATEVECTOR_CAP:
            raise ValueError(f"N={max(self.n_list)} above statevector cap {STATEVECTOR_CAP}")

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2)

    @staticmethod
    def from_json(text: str) -> "ExperimentPlan":
        return ExperimentPlan(**json.loads(text))


def make_instance(kind: str, n: int, seed: int) -> graphs.Graph:
    """Ensemble member: 'u<d>R' / 'w<d>R' regular graphs or 'wCG' complete."""
    if kind == "wCG":
        return graphs.assign_random_weights(graphs.complete_graph(n), seed + 1)
    weighted = kind[0] == "w"
    d = int(kind[1:-1])
    g = graphs.generate_random_regular(n, d, seed)
    return graphs.assign_random_weights(g, seed + 1) if weighted else g


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _record_id(recipe: str, graph_sha: str, config: dict, seed: int) -> str:
    blob = json.dumps({"recipe": recipe, "graph": graph_sha, "config": config,
                       "seed": seed}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


# ---------------------------------------------------------------------------
# recipe task bodies: (graph, config, seed) -> JSON-serializable outputs


def _strategy_config(config: dict, seed: int) -> optimizer.StrategyConfig:
    return optimizer.StrategyConfig(
        strategy=config.get("strategy", "fourier"),
        q=config.get("q"),
        r=config.get("r", 10),
        alpha=config.get("alpha", 0.6),
        p_max=config.get("p_max", 10),
        seed=seed,
        objective_tol=config.get("objective_tol", 1e-6),
        step_tol=config.get("step_tol", 1e-8),
        method=config.get("method", "bfgs"),
    )


def _best_chain(results):
    return [lr for lr in results if lr.chain == optimizer.CHAIN_B] or results


def _task_params(g, config, seed):
    res = optimizer.run_fourier_strategy(g, _strategy_config(config, seed))
    return {"levels": [optimizer.level_result_to_dict(lr) for lr in _best_chain(res)]}


def _task_heuristic(g, config, seed):
    cfg = _strategy_config(config, seed)
    res = _best_chain(optimizer.run_fourier_strategy(g, cfg))
    out = []
    for lr in res:
        match = optimizer.runs_to_match(
            g, lr.p, lr.f_value, tol=config.get("match_tol", 1e-4),
            seed=seed + 7919 * lr.p, cap=config.get("cap", 1000),
            objective_tol=cfg.objective_tol,
        )
        out.append({"p": lr.p, "f_heuristic": lr.f_value, "r_heuristic": lr.r,
                    "runs": match.runs, "censored": match.censored})
    return {"runs_to_match": out}


def _task_scaling(g, config, seed):
    return _task_params(g, config, seed)


def _task_tts(g, config, seed):
    cfg = _strategy_config(config, seed)
    res = _best_chain(optimizer.run_fourier_strategy(g, cfg))
    qaoa_records = tts_mod.qaoa_tts_curve(res, config.get("p_d", 0.99))
    t_grid = config.get("t_grid") or np.geomspace(2, 200, 25).tolist()
    qa_records = tts_mod.qa_tts_curve(g, t_grid, config.get("p_d", 0.99))
    gap = annealer.min_gap(g, resolution=config.get("gap_resolution", 0.02))
    return {
        "delta_min": gap.delta_min,
        "s_star": gap.s_star,
        "tts_qaoa": [asdict(r) for r in qaoa_records],
        "tts_qa": [asdict(r) for r in qa_records],
        "tts_qaoa_opt": list(tts_mod.opt_tts(qaoa_records)),
        "tts_qa_opt": list(tts_mod.opt_tts(qa_records)),
    }


def _task_hard(g, config, seed):
    cut = graphs.brute_force_maxcut(g)
    cost = build_diagonal_cost(g)
    gap = annealer.min_gap(g, resolution=config.get("gap_resolution", 0.02))
    t_grid = config.get("t_grid") or np.geomspace(1, 1000, 25).tolist()
    pgs_curve = []
    for T in t_grid:
        state = annealer.evolve(cost, annealer.linear_ramp(float(T)),
                                basis=PARITY_POSITIVE)
        pgs_curve.append([float(T), ground_state_population(state, cut)])
    cfg = _strategy_config(config, seed)
    res = _best_chain(optimizer.run_fourier_strategy(g, cfg))
    best = max(res, key=lambda lr: lr.p_gs)
    schedule = annealer.qaoa_to_schedule(best.params)
    times = np.linspace(0, schedule.total_time, config.get("n_pop_times", 41))
    tpop, pops = annealer.instantaneous_populations(
        g, schedule, times, k=config.get("k_levels", 4))
    return {
        "delta_min": gap.delta_min,
        "s_star": gap.s_star,
        "qa_pgs_vs_T": pgs_curve,
        "levels": [optimizer.level_result_to_dict(lr) for lr in res],
        "schedule_knots": [list(k) for k in schedule.knots],
        "population_times": tpop.tolist(),
        "populations": pops.tolist(),
    }


def _task_noise(g, config, seed):
    cfg = shot_noise.NoiseConfig(
        epsilon=config.get("epsilon", 0.1), xi=config.get("xi", 0.05),
        delta=config.get("delta", 0.01), seed=seed,
    )
    p_max = config.get("p_max", 6)
    out = {}
    for label, (level, init) in {
        "educated_p1": (1, "educated"), "educated_p5": (5, "educated"),
        "random_p1": (1, "random"),
    }.items():
        ledger, _ = shot_noise.run_noisy_experiment(g, level, init, cfg, p_max)
        out[label] = ledger.best_curve().tolist()
    qa = shot_noise.qa_baseline_ledger(
        g, config.get("qa_times", [10.0, 100.0]), config.get("qa_shots", 2000),
        seed=seed)
    for T, ledger in qa.items():
        out[f"qa_T{int(T)}"] = ledger.best_curve().tolist()
    cut = graphs.brute_force_maxcut(g)
    return {"c_max": cut.c_max, "curves": out}


def _task_adiabatic(g, config, seed):
    T = config.get("T", 40.0)
    k = config.get("k_levels", 3)
    s_grid = np.linspace(0.0, 1.0, config.get("n_points", 101))
    rows = [[float(s)] + annealer.adiabaticity_measure(g, float(s), k, T).tolist()
            for s in s_grid]
    return {"T": T, "k": k, "measure": rows}


RECIPES = {
    "params": _task_params,
    "heuristic": _task_heuristic,
    "scaling": _task_scaling,
    "tts": _task_tts,
    "hard": _task_hard,
    "noise": _task_noise,
    "adiabatic": _task_adiabatic,
}


# ---------------------------------------------------------------------------
# plan execution


def _json_sanitize(obj):
    """Replace non-finite floats with None so records stay strict JSON."""
    if isinstance(obj, float):
        return obj if np.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _json_sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_sanitize(v) for v in obj]
    return obj


def _run_task(args):
    recipe, graph_path, config, seed = args
    g = graphs.load_graph(graph_path)
    start = time.perf_counter()
    outputs = RECIPES[recipe](g, config, seed)
    return _json_sanitize(outputs), time.perf_counter() - start


def run_plan(plan: ExperimentPlan, out_dir, workers: int = 1) -> dict:
    """Execute the plan; returns the manifest (also written to disk)."""
    out = Path(out_dir)
    (out / "graphs").mkdir(parents=True, exist_ok=True)
    (out / "records").mkdir(exist_ok=True)

    tasks = []
    for n in plan.n_list:
        for idx in range(plan.count):
            gseed = plan.seed + 104729 * n + idx
            gpath = out / "graphs" / f"{plan.kind}_n{n}_{idx:04d}.txt"
            if not gpath.exists():
                graphs.save_graph(make_instance(plan.kind, n, gseed), gpath)
            sha = file_sha256(gpath)
            rid = _record_id(plan.recipe, sha, plan.config, gseed)
            tasks.append({"n": n, "idx": idx, "seed": gseed, "graph": gpath,
                          "sha": sha, "rid": rid})

    pending = [t for t in tasks if not (out / "records" / f"{t['rid']}.json").exists()]
    failures = []
    results = {}
    args = [(plan.recipe, str(t["graph"]), plan.config, t["seed"]) for t in pending]
    if workers > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = list(pool.map(_run_task_safe, args))
    else:
        futures = [_run_task_safe(a) for a in args]
    for t, res in zip(pending, futures):
        if isinstance(res, str):
            failures.append({"record": t["rid"], "graph": str(t["graph"]), "error": res})
            continue
        outputs, wall = res
        record = {
            "schema_version": SCHEMA_VERSION,
            "recipe": plan.recipe,
            "graph_file": os.path.relpath(t["graph"], out),
            "graph_sha256": t["sha"],
            "config": plan.config,
            "seed": t["seed"],
            "n": t["n"],
            "outputs": outputs,
            "wall_time_s": wall,
            "timestamp": datetime.now(timezone.utc).isoformat(),
        }
        _atomic_write(out / "records" / f"{t['rid']}.json",
                      json.dumps(record, sort_keys=True))
    for t in tasks:
        path = out / "records" / f"{t['rid']}.json"
        if path.exists():
            results[t["rid"]] = json.loads(path.read_text())

    summary_files = _summarize(plan, results, out)
    manifest = {
        "recipe": plan.recipe,
        "plan": json.loads(plan.to_json()),
        "records": sorted(results),
        "failures": failures,
        "summaries": summary_files,
    }
    _atomic_write(out / "manifest.json", json.dumps(manifest, sort_keys=True, indent=2))
    return manifest


def _run_task_safe(args):
    try:
        return _run_task(args)
    except Exception as exc:  # noqa: BLE001 - failures land in the manifest
        return f"{type(exc).__name__}: {exc}"


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _summarize(plan: ExperimentPlan, results: dict, out: Path) -> list[str]:
    """Emit recipe-specific CSVs; returns the file names written."""
    written = []
    recs = [results[k] for k in sorted(results)]

    if plan.recipe in ("params",):
        rows = []
        for rec in recs:
            for lv in rec["outputs"]["levels"]:
                for i, (gamma, beta) in enumerate(zip(lv["gammas"], lv["betas"]), 1):
                    rows.append([rec["graph_file"], rec["n"], lv["p"], i,
                                 repr(gamma), repr(beta)])
        _write_csv(out / "params.csv",
                   ["graph", "n", "p", "i", "gamma_i", "beta_i"], rows)
        written.append("params.csv")

    elif plan.recipe == "heuristic":
        per_p: dict[int, list[int]] = {}
        rows = []
        for rec in recs:
            for row in rec["outputs"]["runs_to_match"]:
                rows.append([rec["graph_file"], rec["n"], row["p"], row["runs"],
                             row["censored"], repr(row["r_heuristic"])])
                per_p.setdefault(row["p"], []).append(row["runs"])
        _write_csv(out / "runs_to_match.csv",
                   ["graph", "n", "p", "runs", "censored", "r_heuristic"], rows)
        med = [[p, repr(float(np.median(v)))] for p, v in sorted(per_p.items())]
        _write_csv(out / "runs_to_match_median.csv", ["p", "median_runs"], med)
        written += ["runs_to_match.csv", "runs_to_match_median.csv"]

    elif plan.recipe == "scaling":
        per_np: dict[tuple[int, int], list[float]] = {}
        for rec in recs:
            for lv in rec["outputs"]["levels"]:
                per_np.setdefault((rec["n"], lv["p"]), []).append(1.0 - lv["r"])
        rows = [[n, p, repr(float(np.mean(v))), len(v)]
                for (n, p), v in sorted(per_np.items())]
        _write_csv(out / "mean_error_vs_p.csv",
                   ["n", "p", "mean_one_minus_r", "instances"], rows)
        fit_rows = []
        for n in sorted({n for n, _ in per_np}):
            pts = [(p, float(np.mean(v))) for (nn, p), v in sorted(per_np.items())
                   if nn == n]
            for model in (tts_mod.MODEL_EXPONENTIAL, tts_mod.MODEL_STRETCHED):
                fit = tts_mod.fit_scaling(pts, model)
                fit_rows.append([n, model, repr(fit.p0), repr(fit.prefactor),
                                 repr(fit.residual)])
        _write_csv(out / "scaling_fits.csv",
                   ["n", "model", "p0", "prefactor", "residual"], fit_rows)
        written += ["mean_error_vs_p.csv", "scaling_fits.csv"]

    elif plan.recipe == "tts":
        rows = []
        for rec in recs:
            o = rec["outputs"]
            rows.append([rec["graph_file"], rec["n"], repr(o["delta_min"]),
                         repr(o["tts_qaoa_opt"][0]), repr(o["tts_qaoa_opt"][1]),
                         repr(o["tts_qa_opt"][0]), repr(o["tts_qa_opt"][1])])
        _write_csv(out / "tts_opt.csv",
                   ["graph", "n", "delta_min", "tts_qaoa_opt", "p_opt",
                    "tts_qa_opt", "T_opt"], rows)
        xs = [r["outputs"]["tts_qaoa_opt"][0] for r in recs]
        ys = [r["outputs"]["tts_qa_opt"][0] for r in recs]
        try:
            rho = tts_mod.log_correlation(xs, ys)
        except ValueError:
            rho = float("nan")
        _write_csv(out / "tts_correlation.csv", ["rho_log"], [[repr(rho)]])
        written += ["tts_opt.csv", "tts_correlation.csv"]

    elif plan.recipe == "hard":
        for rec in recs:
            stem = Path(rec["graph_file"]).stem
            o = rec["outputs"]
            _write_csv(out / f"hard_{stem}_pgs_vs_T.csv", ["T", "p_gs"],
                       [[repr(a), repr(b)] for a, b in o["qa_pgs_vs_T"]])
            _write_csv(out / f"hard_{stem}_levels.csv",
                       ["p", "r", "p_gs", "total_time"],
                       [[lv["p"], repr(lv["r"]), repr(lv["p_gs"]),
                         repr(lv["total_time"])] for lv in o["levels"]])
            k = len(o["populations"][0]) if o["populations"] else 0
            _write_csv(out / f"hard_{stem}_populations.csv",
                       ["t"] + [f"pop_{i}" for i in range(k)],
                       [[repr(t)] + [repr(x) for x in row]
                        for t, row in zip(o["population_times"], o["populations"])])
            written += [f"hard_{stem}_pgs_vs_T.csv", f"hard_{stem}_levels.csv",
                        f"hard_{stem}_populations.csv"]

    elif plan.recipe == "noise":
        curves: dict[str, list[np.ndarray]] = {}
        c_maxes = {}
        for rec in recs:
            c_maxes[rec["graph_file"]] = rec["outputs"]["c_max"]
            for label, curve in rec["outputs"]["curves"].items():
                curves.setdefault(label, []).append(
                    np.array(curve) / rec["outputs"]["c_max"])
        rows = []
        for label, cs in sorted(curves.items()):
            m = min(len(c) for c in cs)
            avg = np.mean([c[:m] for c in cs], axis=0)
            rows += [[label, i + 1, repr(float(1.0 - v))] for i, v in enumerate(avg)]
        _write_csv(out / "noise_error_vs_measurements.csv",
                   ["strategy", "measurement", "mean_one_minus_r"], rows)
        written.append("noise_error_vs_measurements.csv")

    elif plan.recipe == "adiabatic":
        for rec in recs:
            stem = Path(rec["graph_file"]).stem
            o = rec["outputs"]
            k = len(o["measure"][0]) - 1
            _write_csv(out / f"adiabatic_{stem}.csv",
                       ["s"] + [f"level_{i+1}" for i in range(k)],
                       [[repr(v) for v in row] for row in o["measure"]])
            written.append(f"adiabatic_{stem}.csv")

    return written


# ---------------------------------------------------------------------------
# verification


@dataclass
class VerifyReport:
    n_records: int
    issues: list[str]

    @property
    def clean(self) -> bool:
        return not self.issues


def verify_records(out_dir) -> VerifyReport:
    """Re-check stored records: graph hashes, ratio ranges, monotone ledgers."""
    out = Path(out_dir)
    issues = []
    record_files = sorted((out / "records").glob("*.json")) if (out / "records").is_dir() else []
    for path in record_files:
        try:
            rec = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            issues.append(f"{path.name}: unreadable ({exc})")
            continue
        gpath = out / rec.get("graph_file", "")
        if not gpath.is_file():
            issues.append(f"{path.name}: missing graph file {rec.get('graph_file')}")
        elif file_sha256(gpath) != rec.get("graph_sha256"):
            issues.append(f"{path.name}: graph hash mismatch")
        for lv in rec.get("outputs", {}).get("levels", []):
            if not -1e-9 <= lv.get("r", 0.0) <= 1.0 + 1e-9:
                issues.append(f"{path.name}: r={lv.get('r')} outside [0, 1]")
        for label, curve in rec.get("outputs", {}).get("curves", {}).items():
            if any(b < a for a, b in zip(curve, curve[1:])):
                issues.append(f"{path.name}: best-so-far curve {label} not monotone")
    for csv_path in sorted(out.glob("*_ledger*.csv")):
        ledger = shot_noise.load_ledger_csv(csv_path)
        best = ledger.best_curve()
        if best.size and np.any(np.diff(best) < 0):
            issues.append(f"{csv_path.name}: ledger not monotone")
    return VerifyReport(len(record_files), issues)


def builtin_plan(name: str) -> ExperimentPlan:
    """Desk-scale defaults for each named reproduction."""
    name = RECIPE_ALIASES.get(name, name)
    presets = {
        "params": ExperimentPlan("params", n_list=[16], kind="u3R", count=10,
                                 config={"p_max": 5, "r": 10}),
        "heuristic": ExperimentPlan("heuristic", n_list=[10], kind="w3R", count=10,
                                    config={"p_max": 6, "r": 10, "cap": 300}),
        "scaling": ExperimentPlan("scaling", n_list=[12], kind="w3R", count=20,
                                  config={"p_max": 12, "r": 10}),
        "tts": ExperimentPlan("tts", n_list=[10], kind="w3R", count=50,
                              config={"p_max": 20, "r": 10}),
        "hard": ExperimentPlan("hard", n_list=[14], kind="w3R", count=1,
                               config={"p_max": 30, "r": 10}),
        "noise": ExperimentPlan("noise", n_list=[14], kind="w3R", count=5,
                                config={"p_max": 6}),
        "adiabatic": ExperimentPlan("adiabatic", n_list=[10], kind="w3R", count=1,
                                    config={"T": 40.0}),
    }
    if name not in presets:
        raise ValueError(f"no builtin plan named {name!r}")
    return presets[name]
