import csv
from argparse import Namespace

import pytest

from apis.instances_api import InstanceLibraryClient
from context import SolveContext, VerifyContext
from decomp import Decomposer
from executor import Execute
from graphs import parse_graph, write_graph
from main import main
from modspace import Graph
from reporting import read_json


EDGE = Graph(n_vertices=2, edges=[(1, 2, 1)], name="edge")


def test_gen_graph_writes_an_instance(tmp_path):
    assert main(["--out", str(tmp_path), "--seed", "1", "gen-graph", "--n", "6"]) == 0
    graph = parse_graph(tmp_path / "3reg_n6_s1.txt")
    assert graph.n_vertices == 6
    assert len(graph.edges) == 9


def test_gen_graph_rejects_odd_regular_size(tmp_path):
    assert main(["--out", str(tmp_path), "gen-graph", "--n", "5"]) == 2


def test_solve_writes_trace_and_summary(tmp_path):
    instance = write_graph(EDGE, tmp_path / "edge.txt")
    code = main(["--out", str(tmp_path / "runs"), "solve", "--instance", str(instance),
                 "--sectors", "odd", "--trials", "1", "--max-iterations", "50"])
    assert code == 0
    summary = read_json(tmp_path / "runs" / "edge" / "summary.json")
    assert summary["instance"] == "edge"
    assert summary["reference_cut"] == 1
    assert summary["trials"] == 1
    assert summary["sector"] == "odd"
    assert summary["best_cost"] == pytest.approx(-1.0)
    with open(tmp_path / "runs" / "edge" / "trace.csv", newline="") as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ["iteration", "cost", "lr"]
    assert len(rows) == 51
    assert float(rows[1][2]) == 0.05


def test_summary_totals_cover_every_trial(tmp_path):
    square = Graph(n_vertices=4, edges=[(1, 2, 1), (2, 3, 1), (3, 4, 1), (1, 4, 1)], name="square")
    instance = write_graph(square, tmp_path / "square.txt")
    # a cut of 3 is impossible on a 4-cycle, so every trial fails
    code = main(["--out", str(tmp_path / "runs"), "solve", "--instance", str(instance), "--known-optimum", "3",
                 "--sectors", "even", "--trials", "2", "--max-iterations", "10"])
    assert code == 0
    summary = read_json(tmp_path / "runs" / "square" / "summary.json")
    assert not summary["success"]
    assert summary["trials"] == 2
    assert summary["iterations"] == 20
    with open(tmp_path / "runs" / "square" / "trace.csv", newline="") as handle:
        assert len(list(csv.reader(handle))) == 11


def test_solve_uses_known_optimum(tmp_path):
    code = main(["--out", str(tmp_path), "solve", "--n", "4", "--known-optimum", "4",
                 "--trials", "1", "--sectors", "even", "--max-iterations", "20"])
    assert code == 0
    summary = read_json(tmp_path / "3reg_n4_s0" / "summary.json")
    assert summary["reference_cut"] == 4


def test_solve_reports_missing_instance(tmp_path):
    assert main(["--out", str(tmp_path), "solve", "--instance", str(tmp_path / "missing.txt")]) == 2


def test_solve_needs_a_source():
    with pytest.raises(SystemExit):
        main(["solve", "--trials", "1"])


def test_bench_writes_table(tmp_path):
    assert main(["--out", str(tmp_path), "bench", "--sizes", "4,6", "--repetitions", "2"]) == 0
    document = read_json(tmp_path / "bench" / "bench.json")
    assert [row["n"] for row in document["rows"]] == [4, 6]
    assert document["rows"][0]["dim"] == 70
    assert document["slope"] > 0


def test_success_table_runs_in_process(tmp_path):
    code = main(["--out", str(tmp_path), "success-table", "--sizes", "4", "--instances", "2",
                 "--workers", "1", "--trials", "1", "--max-iterations", "30"])
    assert code == 0
    document = read_json(tmp_path / "success_table" / "success_table.json")
    assert document["table"][0]["n"] == 4
    assert document["table"][0]["instances"] == 2
    assert len(document["instances"]) == 2
    assert all(row["reference_cut"] == 4 for row in document["instances"])


@pytest.mark.slow
def test_small_three_regular_instances_are_all_solved(tmp_path):
    assert main(["--out", str(tmp_path), "success-table", "--sizes", "4,8,12", "--instances", "10"]) == 0
    document = read_json(tmp_path / "success_table" / "success_table.json")
    assert [row["n"] for row in document["table"]] == [4, 8, 12]
    for row in document["table"]:
        assert row["instances"] == 10
        assert row["rate"] == 1.0


@pytest.mark.slow
def test_gradient_cost_grows_at_most_like_n_to_the_5_8(tmp_path):
    assert main(["--out", str(tmp_path), "bench", "--sizes", "16,24,32,40,48", "--repetitions", "10"]) == 0
    document = read_json(tmp_path / "bench" / "bench.json")
    assert [row["n"] for row in document["rows"]] == [16, 24, 32, 40, 48]
    assert document["slope"] <= 5.8


def test_verify_rejects_sizes_beyond_the_dense_oracle(tmp_path):
    assert main(["--out", str(tmp_path), "verify", "--sizes", "14"]) == 2


@pytest.mark.slow
def test_verify_passes_and_catches_an_injected_fault(tmp_path):
    assert main(["--out", str(tmp_path), "verify", "--sizes", "4,6", "--cases", "2"]) == 0
    report = read_json(tmp_path / "verify" / "verification.json")
    assert report["passed"]
    assert {c["name"] for c in report["checks"]} == {
        "oracle_equivalence", "gradient", "basis_state_weights", "reachability_bound", "conservation"}

    assert main(["--out", str(tmp_path), "verify", "--sizes", "4,6", "--cases", "2", "--inject-fault"]) == 1
    report = read_json(tmp_path / "verify" / "verification.json")
    failed = [c["name"] for c in report["checks"] if not c["passed"]]
    assert failed == ["oracle_equivalence"]


def test_decomposer_fills_defaults():
    args = Namespace(command="verify", seed=None, out=None, sizes=None, cases=3, inject_fault=None)
    context = Decomposer(args=args, command="verify").run()
    assert isinstance(context, VerifyContext)
    assert context.sizes == [4, 6, 8, 10]
    assert context.cases == 3
    assert context.inject_fault is False
    assert context.out


def test_decomposer_rejects_unknown_command():
    with pytest.raises(ValueError):
        Decomposer(args=Namespace(command="plot"), command="plot")


def test_sector_flag_parsing():
    assert SolveContext(n=4, sectors="both").sectors == ["even", "odd"]
    assert SolveContext(n=4, sectors="odd").sectors == ["odd"]
    with pytest.raises(ValueError):
        SolveContext(n=4, instance="a.txt")


def test_executor_passes_context_fields_by_name():
    context = VerifyContext(cases=2)

    def count_cases(cases, inject_fault):
        return {"passed": cases == 2 and not inject_fault}

    Execute("verify", ["count_cases"], context, registry={"count_cases": count_cases}).run()
    assert context.passed is True


def test_executor_errors():
    context = VerifyContext()
    with pytest.raises(ValueError):
        Execute("verify", ["nope"], context, registry={}).run()
    with pytest.raises(ValueError):
        Execute("verify", ["step"], context, registry={"step": lambda missing: {}}).run()
    with pytest.raises(ValueError):
        Execute("verify", [], context).run()


class FakeResponse:
    def __init__(self, text, status_code=200):
        self.text = text
        self.status_code = status_code

    def raise_for_status(self):
        raise RuntimeError(f"status {self.status_code}")


def test_remote_instances_are_downloaded_once(tmp_path, monkeypatch):
    calls = []

    def fake_get(url, timeout):
        calls.append(url)
        return FakeResponse("2 1\n1 2 1\n")

    monkeypatch.setattr("apis.instances_api.requests.get", fake_get)
    client = InstanceLibraryClient("https://example.org/lib/")
    assert client.url_for("g05_60.0") == "https://example.org/lib/g05_60.0"
    first = client.fetch_cached("g05_60.0", tmp_path)
    second = client.fetch_cached("g05_60.0", tmp_path)
    assert first == second == "2 1\n1 2 1\n"
    assert calls == ["https://example.org/lib/g05_60.0"]


def test_remote_failure_is_raised(monkeypatch):
    monkeypatch.setattr("apis.instances_api.requests.get", lambda url, timeout: FakeResponse("", 404))
    with pytest.raises(RuntimeError):
        InstanceLibraryClient("https://example.org").fetch("missing")


def test_client_needs_a_base_url():
    with pytest.raises(ValueError):
        InstanceLibraryClient("")
