import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Union


def get_template(key: str, **kwargs) -> str:
    template = REPORT_TEMPLATES.get(key)
    if not template:
        raise ValueError(f"Report template '{key}' not found.")
    return template.format(**kwargs)


REPORT_TEMPLATES = {
    "summary": (
        "instance {instance} (n={n}): best cost {best_cost:.6f}, cut {cut}, bits {bits}\n"
        "  trials {trials}, iterations {iterations}, success {success}, wall {wall_ms:.1f} ms"
    ),

    "reference": "reference optimum for {instance}: cut {cut} (energy {energy})",

    "success_row": "n={n:>3}  instances={instances:>3}  successes={successes:>3}  rate={rate:.2f}",

    "bench_row": "n={n:>3}  params={params:>5}  dim B_4={dim:>9}  mean {mean_ms:.3f} ms over {repetitions} runs",

    "bench_slope": "log-log slope of time vs n: {slope:.3f}",

    "check": "{status}  {name:<20} max error {max_error:.3g} (tol {tolerance:g})  {detail}",

    "verify_footer": "{passed}/{total} checks passed",

    "graph": "graph {name}: {n} vertices, {m} edges, total weight {total_weight}",
}


TRACE_HEADER = ("iteration", "cost", "lr")


def trace_rows(trace: Sequence[float], lrs: Sequence[float]) -> List[List[Any]]:
    return [[i, repr(float(cost)), repr(float(lr))] for i, (cost, lr) in enumerate(zip(trace, lrs))]


def write_trace_csv(path: Union[str, Path], trace: Sequence[float], lrs: Sequence[float]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(TRACE_HEADER)
        writer.writerows(trace_rows(trace, lrs))
    logging.info(f"[Report] trace with {len(trace)} rows -> {path}")
    return path


def write_rows_csv(path: Union[str, Path], rows: Iterable[Dict[str, Any]], columns: Sequence[str]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(columns), extrasaction="ignore")
        writer.writeheader()
        writer.writerows(rows)
    logging.info(f"[Report] table -> {path}")
    return path


def write_json(path: Union[str, Path], document: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n")
    logging.info(f"[Report] document -> {path}")
    return path


def read_json(path: Union[str, Path]) -> Any:
    return json.loads(Path(path).read_text())
