# app/experiment_manager.py
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
import pandas as pd
from tqdm import tqdm

from algorithms import build_runner
from algorithms.apr import AprResult
from algorithms.ssh import error_bound, h2, k_star, x_of_k
from app.config import algorithm_label, params_digest
from core import analysis
from core.environment import gaps
from core.errors import DomainError, ParArmError
from core.seeding import child_seed

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["experiment", "algorithm", "params", "rep", "seed", "success",
               "virtual_time", "total_pulls", "wall_seconds", "error"]


@dataclass
class ResultRow:
    experiment: str
    algorithm: str
    params: str
    rep: int
    seed: int
    success: bool
    virtual_time: float
    total_pulls: int
    wall_seconds: float
    error: str = ""


class ExperimentManager:
    """
    Runs every (algorithm, replication) pair of an experiment config.

    Rows come back in (algorithm, replication) order whatever the worker
    count. Run results, with their full traces, are kept only when
    keep_traces is set.
    """

    def __init__(self, config, workers=None, progress=False, keep_traces=False):
        self.config = config
        self.workers = workers or config.workers
        self.progress = progress
        self.keep_traces = keep_traces
        self.spec = config.scaling_function()
        self.rows = []
        self.results = {}

    def _tasks(self):
        tasks = []
        for alg_index, algorithm in enumerate(self.config.algorithms):
            params = self.config.algorithm_params(algorithm)
            runner = build_runner(algorithm["name"], params)
            label = algorithm_label(algorithm)
            digest = params_digest({"name": algorithm["name"], **params})
            for rep in range(self.config.replications):
                pair_index = alg_index * self.config.replications + rep
                tasks.append((label, digest, runner, rep, child_seed(self.config.base_seed, pair_index)))
        return tasks

    def _run_one(self, task):
        label, digest, runner, rep, seed = task
        instance = self.config.make_instance(rep)
        start = time.perf_counter()
        try:
            result = runner(instance, self.spec, seed, max_total_pulls=self.config.max_total_pulls)
        except ParArmError as e:
            logger.info(f"{self.config.experiment} {label} rep {rep}: {type(e).__name__}: {e}")
            return ResultRow(self.config.experiment, label, digest, rep, seed, False, math.nan, 0,
                             time.perf_counter() - start, type(e).__name__), None
        row = ResultRow(self.config.experiment, label, digest, rep, seed,
                        bool(result.best_arm == instance.best_arm), float(result.virtual_time),
                        int(result.total_pulls), time.perf_counter() - start)
        return row, (result if self.keep_traces else None)

    def run_experiment(self):
        tasks = self._tasks()
        logger.info(f"Running {self.config.experiment}: {len(tasks)} runs on {self.workers} worker(s)")
        bar = tqdm(total=len(tasks), desc=self.config.experiment, disable=not self.progress)

        def run_and_tick(task):
            outcome = self._run_one(task)
            bar.update(1)
            return outcome

        if self.workers == 1:
            outcomes = [run_and_tick(task) for task in tasks]
        else:
            with ThreadPoolExecutor(max_workers=self.workers) as executor:
                outcomes = list(executor.map(run_and_tick, tasks))
        bar.close()

        self.rows = [row for row, _ in outcomes]
        self.results = {(row.algorithm, row.params, row.rep): result
                        for row, result in outcomes if result is not None}
        return self.rows

    def write_traces(self, directory):
        """Round or stage trace CSVs per run, plus the instance of every replication as JSON."""
        if not self.keep_traces:
            raise DomainError("traces were not kept; construct the manager with keep_traces=True")
        os.makedirs(directory, exist_ok=True)
        written = []
        experiment = _safe_name(self.config.experiment)
        for rep in range(self.config.replications):
            path = os.path.join(directory, f"{experiment}_instance_rep{rep}.json")
            with open(path, "w") as f:
                f.write(self.config.make_instance(rep).to_json())
            written.append(path)
        for (label, digest, rep), result in self.results.items():
            frame = trace_frame(result)
            if frame is None:
                continue
            safe = _safe_name(f"{self.config.experiment}_{label}")
            path = os.path.join(directory, f"{safe}_{digest}_rep{rep}.csv")
            frame.to_csv(path, index=False)
            written.append(path)
        return written


def _safe_name(text):
    return "".join(c if c.isalnum() or c in "-_=" else "_" for c in text)


def run_experiment(config, workers=None, progress=False):
    return ExperimentManager(config, workers=workers, progress=progress).run_experiment()


def rows_frame(rows, include_timing=False):
    frame = pd.DataFrame([asdict(row) for row in rows], columns=CSV_COLUMNS)
    if not include_timing:
        frame["wall_seconds"] = np.nan
    return frame


def write_csv(rows, path, include_timing=False):
    """Write result rows; wall_seconds stays blank unless timing is requested."""
    rows_frame(rows, include_timing).to_csv(path, index=False)


def summarize(rows):
    """Per (experiment, algorithm): mean success and virtual time with standard errors."""
    if not rows:
        raise DomainError("cannot summarize an empty set of rows")
    frame = rows_frame(rows, include_timing=True)
    frame["success"] = frame["success"].astype(float)
    frame["failed"] = (frame["error"] != "").astype(int)
    grouped = frame.groupby(["experiment", "algorithm"], sort=False)
    summary = grouped.agg(
        runs=("success", "size"),
        errors=("failed", "sum"),
        success_mean=("success", "mean"),
        success_se=("success", "sem"),
        virtual_time_mean=("virtual_time", "mean"),
        virtual_time_se=("virtual_time", "sem"),
    ).reset_index()
    summary["degenerate"] = summary["runs"] < 2
    if summary["degenerate"].any():
        logger.warning("Standard errors of single-replication groups are reported as 0")
    summary.loc[summary["degenerate"], ["success_se", "virtual_time_se"]] = 0.0
    return summary


def trace_frame(result):
    if isinstance(result, AprResult):
        return pd.DataFrame({
            "round": [r.round for r in result.trace],
            "t_r": [r.allocated for r in result.trace],
            "survivors": [r.survivors for r in result.trace],
            "q_r": [r.pulls_per_arm for r in result.trace],
            "virtual_time_cum": [r.virtual_time_cum for r in result.trace],
            "eliminated_list": [";".join(map(str, r.eliminated)) for r in result.trace],
        })
    if hasattr(result, "stage_trace"):
        return pd.DataFrame({
            "stage": [s.stage for s in result.stage_trace],
            "survivors_in": [s.survivors_in for s in result.stage_trace],
            "pulls_per_arm": [s.pulls_per_arm for s in result.stage_trace],
            "survivors_out": [s.survivors_out for s in result.stage_trace],
            "virtual_time_cum": [s.virtual_time_cum for s in result.stage_trace],
        })
    return None


def analyze_report(config):
    """Planner value, runtime and error bounds for the config's instance (replication 0)."""
    spec = config.scaling_function()
    instance = config.make_instance(0)
    gapvec = gaps(instance)
    n = instance.n
    report = {
        "experiment": config.experiment,
        "n": n,
        "best_arm": instance.best_arm,
        "gaps": gapvec.deltas.tolist(),
    }
    planner = analysis.tstar(gapvec, spec)
    report["tstar"] = {"value": planner.value, "schedule": list(planner.schedule)}
    hardness = h2(gapvec)
    report["h2"] = hardness

    # both settings report every field; fixed-deadline configs take delta and beta from the defaults
    apr = next((a for a in config.algorithms if a["name"] == "apr"), {})
    params = config.algorithm_params(apr)
    delta = float(params.get("delta", 0.1))
    beta = float(params.get("beta", 2.0))
    nbars = analysis.nbar_vector(gapvec, delta, n)
    t2 = analysis.dp_tstar(nbars, spec)
    report["nbar"] = nbars
    report["t2_nbar"] = {"value": t2.value, "schedule": list(t2.schedule)}
    report["theorem1_bound"] = analysis.theorem1_bound(beta, n, t2.value)
    report["beta"] = beta
    report["delta"] = delta
    if delta <= 0.15:
        report["lower_bound"] = analysis.lower_bound_value(delta, config.c_lambda, planner.value)
    else:
        report["lower_bound"] = None

    report["deadlines"] = []
    if config.setting == "fixed_deadline":
        deadlines = sorted({float(config.algorithm_params(a)["deadline"]) for a in config.algorithms})
        for T in deadlines:
            k = k_star(n, T, spec)
            report["deadlines"].append({
                "deadline": T,
                "k_star": k,
                "x_k_star": x_of_k(k, n, T, spec),
                "x_1": x_of_k(1, n, T, spec),
                "error_bound_k_star": error_bound(k, n, T, spec, hardness),
                "error_bound_sh": error_bound(1, n, T, spec, hardness),
            })
    return report
