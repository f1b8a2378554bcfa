import logging
import math
import os
import time
from multiprocessing import Pool
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from apis.instances_api import InstanceLibraryClient
from circuit import build_ansatz, compile_circuit, get_table_cache
from engine import value_and_gradient
from graphs import gen_graph, parse_graph, parse_graph_text, write_graph
from modspace import Graph, dim_module, project_maxcut
from optimize import OptimizerConfig, RunResult, solve_instance
from reporting import get_template, write_json, write_rows_csv, write_trace_csv
from verify import BRUTE_FORCE_MAX_N, best_cut, brute_force_maxcut, run_verification


# Move to init ---------------------------------------------------------------------------
from dotenv import load_dotenv
load_dotenv()

# automatic brute-force reference stops here; larger instances need --known-optimum
BRUTE_FORCE_AUTO_N = BRUTE_FORCE_MAX_N

# Global variables to hold initialized services
_instance_client: Optional[InstanceLibraryClient] = None


def default_seed() -> int:
    return int(os.getenv("MATCHGATE_SEED", "0"))


def default_out_dir() -> str:
    return os.getenv("MATCHGATE_OUT_DIR", "runs")


def log_level() -> str:
    return os.getenv("MATCHGATE_LOG_LEVEL", "INFO").upper()


def worker_count(requested: Optional[int] = None) -> int:
    if requested:
        return max(1, requested)
    configured = os.getenv("MATCHGATE_WORKERS")
    if configured:
        return max(1, int(configured))
    return max(1, os.cpu_count() or 1)


def initialize_instance_client(base_url: Optional[str] = None) -> InstanceLibraryClient:
    global _instance_client
    _instance_client = InstanceLibraryClient(base_url=base_url or os.getenv("MATCHGATE_INSTANCE_URL", ""))
    return _instance_client


def initialize_services(instance_url: Optional[str] = None):
    get_table_cache()
    logging.info("[Initializer] Gate-table cache initialized.")

    if instance_url or os.getenv("MATCHGATE_INSTANCE_URL"):
        initialize_instance_client(instance_url)
        logging.info("[Initializer] InstanceLibraryClient initialized.")

    logging.info("[Initializer] All services initialized successfully.")


def _run_dir(out: str, name: str) -> Path:
    return Path(out) / name


#GRAPH STEPS --------------------------------------------------------------------------------------------------

def generate_instance(n: int, kind: str, p: float, weights: str, seed: int) -> Dict[str, Any]:
    graph = gen_graph(n, kind, seed, p=p, weights=weights)
    logging.info("[Steps : generate_instance] " + get_template(
        "graph", name=graph.name, n=graph.n_vertices, m=len(graph.edges), total_weight=graph.total_weight))
    return {"graph": graph}


def write_instance_file(graph: Graph, out: str) -> Dict[str, Any]:
    path = write_graph(graph, Path(out) / f"{graph.name}.txt")
    return {"path": str(path), "artifacts": [str(path)]}


def load_instance(instance: Optional[str], remote: Optional[str], instance_url: Optional[str],
                  n: Optional[int], kind: str, p: float, weights: str, seed: int, out: str) -> Dict[str, Any]:
    if instance:
        graph = parse_graph(instance)
    elif remote:
        client = _instance_client
        if client is None or instance_url:
            client = initialize_instance_client(instance_url)
        text = client.fetch_cached(remote, Path(out) / "instances")
        graph = parse_graph_text(text, name=Path(remote).stem)
    else:
        graph = gen_graph(n, kind, seed, p=p, weights=weights)
    logging.info("[Steps : load_instance] " + get_template(
        "graph", name=graph.name, n=graph.n_vertices, m=len(graph.edges), total_weight=graph.total_weight))
    return {"graph": graph}


def reference_optimum(graph: Graph, known_optimum: Optional[int]) -> Dict[str, Any]:
    """Reference energy W - 2*cut from --known-optimum, else from brute force on small instances."""
    if known_optimum is not None:
        cut = known_optimum
    elif graph.n_vertices <= BRUTE_FORCE_AUTO_N:
        cut = best_cut(graph, brute_force_maxcut(graph))
    else:
        logging.info(f"[Steps : reference_optimum] n={graph.n_vertices} too large for brute force; "
                     f"success means a consistent readout only")
        return {"reference_energy": None, "reference_cut": None}
    energy = graph.total_weight - 2 * cut
    logging.info("[Steps : reference_optimum] " + get_template(
        "reference", instance=graph.name, cut=cut, energy=energy))
    return {"reference_energy": energy, "reference_cut": cut}


#SOLVE STEPS --------------------------------------------------------------------------------------------------

def solve_trials(graph: Graph, context, seed: int, reference_energy: Optional[int]) -> Dict[str, Any]:
    result = solve_instance(graph, context.optimizer_config(), seed=seed, reference_energy=reference_energy)
    return {"result": result}


def summarize(graph: Graph, result: RunResult, reference_cut: Optional[int] = None) -> Dict[str, Any]:
    return {
        "instance": graph.name,
        "n": graph.n_vertices,
        "best_cost": result.final_cost,
        "cut": result.cut_value,
        "bits": result.bits,
        "trials": result.trials_used,
        "iterations": result.total_iterations,
        "wall_ms": result.total_wall_ms,
        "success": result.success,
        "sector": result.sector,
        "seed": result.seed,
        "reference_cut": reference_cut,
    }


def write_solve_artifacts(graph: Graph, result: RunResult, out: str,
                          reference_cut: Optional[int]) -> Dict[str, Any]:
    run_dir = _run_dir(out, graph.name or "instance")
    summary = summarize(graph, result, reference_cut)
    trace_path = write_trace_csv(run_dir / "trace.csv", result.trace, result.lrs)
    summary_path = write_json(run_dir / "summary.json", summary)
    logging.info("[Steps : write_solve_artifacts]\n" + get_template("summary", **summary))
    return {"summary": summary, "artifacts": [str(trace_path), str(summary_path)]}


#SUCCESS TABLE STEPS -------------------------------------------------------------------------------------------

def instance_seed(seed: int, n: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, n, index]).generate_state(1)[0])


def build_instance_jobs(sizes: List[int], instances: int, seed: int, context) -> Dict[str, Any]:
    config = context.optimizer_config().model_dump()
    jobs = []
    for n in sizes:
        for index in range(instances):
            graph = gen_graph(n, "3regular", instance_seed(seed, n, index))
            energy = None
            if n <= BRUTE_FORCE_AUTO_N:
                energy = brute_force_maxcut(graph).E_g
            jobs.append({
                "n": n,
                "index": index,
                "graph": graph.model_dump(),
                "reference_energy": None if energy is None else int(round(energy)),
                "seed": instance_seed(seed + 1, n, index),
                "config": config,
            })
    logging.info(f"[Steps : build_instance_jobs] {len(jobs)} instances over sizes {sizes}")
    return {"jobs": jobs}


def solve_job(job: Dict[str, Any]) -> Dict[str, Any]:
    """One instance; top-level so worker processes can unpickle it."""
    graph = Graph.model_validate(job["graph"])
    config = OptimizerConfig.model_validate(job["config"])
    result = solve_instance(graph, config, seed=job["seed"], reference_energy=job["reference_energy"])
    reference = job["reference_energy"]
    return {
        "n": job["n"],
        "instance": graph.name,
        "success": result.success,
        "best_cost": result.final_cost,
        "cut": result.cut_value,
        "reference_cut": None if reference is None else (graph.total_weight - reference) // 2,
        "trials": result.trials_used,
        "iterations": result.total_iterations,
    }


def run_instance_jobs(jobs: List[Dict[str, Any]], workers: Optional[int]) -> Dict[str, Any]:
    count = min(worker_count(workers), max(1, len(jobs)))
    logging.info(f"[Steps : run_instance_jobs] {len(jobs)} jobs on {count} worker(s)")
    if count == 1:
        rows = [solve_job(job) for job in jobs]
    else:
        with Pool(processes=count) as pool:
            rows = pool.map(solve_job, jobs)
    return {"rows": rows}


def tabulate_success(rows: List[Dict[str, Any]], sizes: List[int]) -> Dict[str, Any]:
    table = []
    for n in sizes:
        mine = [row for row in rows if row["n"] == n]
        successes = sum(1 for row in mine if row["success"])
        entry = {"n": n, "instances": len(mine), "successes": successes,
                 "rate": successes / len(mine) if mine else 0.0}
        logging.info("[Steps : tabulate_success] " + get_template("success_row", **entry))
        table.append(entry)
    return {"table": table}


def write_success_table(table: List[Dict[str, Any]], rows: List[Dict[str, Any]], out: str) -> Dict[str, Any]:
    run_dir = _run_dir(out, "success_table")
    json_path = write_json(run_dir / "success_table.json", {"table": table, "instances": rows})
    csv_path = write_rows_csv(run_dir / "success_table.csv", table, ["n", "instances", "successes", "rate"])
    return {"artifacts": [str(json_path), str(csv_path)]}


#BENCH STEPS --------------------------------------------------------------------------------------------------

def time_sizes(sizes: List[int], repetitions: int, seed: int, blocks: Optional[int]) -> Dict[str, Any]:
    rows = []
    for n in sizes:
        graph = gen_graph(n, "3regular", seed)
        circuit = build_ansatz(n, seed, blocks)
        eta = project_maxcut(graph)
        tables = compile_circuit(circuit, 4)
        init_bits = "0" * n
        value_and_gradient(circuit, circuit.theta, init_bits, eta, tables)
        started = time.perf_counter()
        for _ in range(repetitions):
            value_and_gradient(circuit, circuit.theta, init_bits, eta, tables)
        mean_ms = (time.perf_counter() - started) * 1000.0 / repetitions
        row = {"n": n, "params": circuit.n_params, "dim": dim_module(4, n),
               "mean_ms": mean_ms, "repetitions": repetitions}
        logging.info("[Steps : time_sizes] " + get_template("bench_row", **row))
        rows.append(row)
    return {"rows": rows}


def fit_slope(rows: List[Dict[str, Any]]) -> Dict[str, Any]:
    if len(rows) < 2:
        return {"slope": None}
    log_n = [math.log(row["n"]) for row in rows]
    log_t = [math.log(row["mean_ms"]) for row in rows]
    slope = float(np.polyfit(log_n, log_t, 1)[0])
    logging.info("[Steps : fit_slope] " + get_template("bench_slope", slope=slope))
    return {"slope": slope}


def write_bench_table(rows: List[Dict[str, Any]], slope: Optional[float], out: str) -> Dict[str, Any]:
    run_dir = _run_dir(out, "bench")
    csv_path = write_rows_csv(run_dir / "bench.csv", rows, ["n", "params", "dim", "mean_ms", "repetitions"])
    json_path = write_json(run_dir / "bench.json", {"rows": rows, "slope": slope})
    return {"artifacts": [str(csv_path), str(json_path)]}


#VERIFY STEPS -------------------------------------------------------------------------------------------------

def run_checks(seed: int, sizes: List[int], cases: int, inject_fault: bool) -> Dict[str, Any]:
    checks = run_verification(seed=seed, inject_fault=inject_fault, sizes=sizes, cases=cases)
    for check in checks:
        logging.info("[Steps : run_checks] " + get_template(
            "check", status="PASS" if check.passed else "FAIL", name=check.name,
            max_error=check.max_error, tolerance=check.tolerance, detail=check.detail))
    return {"checks": [check.model_dump() for check in checks],
            "passed": all(check.passed for check in checks)}


def write_verification_report(checks: List[Dict[str, Any]], passed: bool, out: str) -> Dict[str, Any]:
    path = write_json(_run_dir(out, "verify") / "verification.json", {"checks": checks, "passed": passed})
    logging.info("[Steps : write_verification_report] " + get_template(
        "verify_footer", passed=sum(1 for c in checks if c["passed"]), total=len(checks)))
    return {"artifacts": [str(path)]}


STEP_REGISTRY = {
    "generate_instance": generate_instance,
    "write_instance_file": write_instance_file,
    "load_instance": load_instance,
    "reference_optimum": reference_optimum,
    "solve_trials": solve_trials,
    "write_solve_artifacts": write_solve_artifacts,
    "build_instance_jobs": build_instance_jobs,
    "run_instance_jobs": run_instance_jobs,
    "tabulate_success": tabulate_success,
    "write_success_table": write_success_table,
    "time_sizes": time_sizes,
    "fit_slope": fit_slope,
    "write_bench_table": write_bench_table,
    "run_checks": run_checks,
    "write_verification_report": write_verification_report,
}
