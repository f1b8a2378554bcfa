import numpy as np
import pytest

from circuit import Circuit, Gate, Generator, build_ansatz, compile_circuit
from engine import (
    AmbiguousReadout,
    evolve,
    expectation,
    extract_bits,
    gradient,
    value_and_gradient,
    z_expectations,
)
from graphs import gen_graph
from modspace import Graph, project_maxcut
from verify import basis_state_vector, dense_evolve, dense_expectation, finite_difference, maxcut_diagonal


def single_gate_circuit(kind, site, n):
    return Circuit(n=n, gates=[Gate(Generator(kind, site, n), 1, 2, site)], theta=np.zeros(1))


PATH3 = Graph(n_vertices=3, edges=[(1, 2, 1), (2, 3, 1)])


def test_identity_circuit_gives_basis_state_energy():
    circuit = single_gate_circuit("XX", 1, 3)
    eta = project_maxcut(PATH3)
    assert expectation(circuit, [0.0], "000", eta) == pytest.approx(2.0)
    assert expectation(circuit, [0.0], "010", eta) == pytest.approx(-2.0)


@pytest.mark.parametrize("theta", [0.0, 0.3, np.pi / 8, 1.2, -2.5])
def test_single_gate_closed_form(theta):
    circuit = single_gate_circuit("XX", 2, 3)
    eta = project_maxcut(PATH3)
    value, grad = value_and_gradient(circuit, [theta], "000", eta)
    assert value == pytest.approx(1.0 + np.cos(2 * theta), abs=1e-12)
    assert grad[0] == pytest.approx(-2.0 * np.sin(2 * theta), abs=1e-12)


def test_single_gate_gradient_value():
    circuit = single_gate_circuit("XX", 2, 3)
    grad = gradient(circuit, [np.pi / 8], "000", project_maxcut(PATH3))
    assert grad[0] == pytest.approx(-np.sqrt(2.0), abs=1e-12)


def test_z_expectations_of_simple_circuits():
    circuit = single_gate_circuit("XY", 1, 2)
    np.testing.assert_allclose(z_expectations(circuit, [np.pi / 2], "00"), [-1.0, -1.0], atol=1e-12)
    np.testing.assert_allclose(z_expectations(circuit, [0.0], "10"), [-1.0, 1.0], atol=1e-12)


@pytest.mark.parametrize("n", [4, 6])
def test_projected_cost_matches_dense_statevector(n):
    rng = np.random.default_rng(n)
    for case in range(4):
        graph = gen_graph(n, "3regular", seed=case)
        circuit = build_ansatz(n, rng_seed=case)
        theta = rng.uniform(-np.pi, np.pi, circuit.n_params)
        for bits in ("0" * n, "1" + "0" * (n - 1)):
            projected = expectation(circuit, theta, bits, project_maxcut(graph))
            dense = dense_expectation(circuit, theta, basis_state_vector(bits), maxcut_diagonal(graph))
            assert projected == pytest.approx(dense, abs=1e-9)


def test_projected_cost_with_signed_weights_matches_dense():
    graph = gen_graph(6, "erdos_renyi", seed=4, p=0.6, weights="pm1")
    circuit = build_ansatz(6, rng_seed=8)
    theta = np.random.default_rng(1).uniform(-np.pi, np.pi, circuit.n_params)
    projected = expectation(circuit, theta, "000000", project_maxcut(graph))
    dense = dense_expectation(circuit, theta, basis_state_vector("000000"), maxcut_diagonal(graph))
    assert projected == pytest.approx(dense, abs=1e-9)


def test_z_expectations_match_dense_statevector():
    n = 5
    circuit = build_ansatz(n, rng_seed=2)
    theta = np.random.default_rng(3).uniform(-np.pi, np.pi, circuit.n_params)
    psi = dense_evolve(circuit, theta, basis_state_vector("10000"))
    probs = np.abs(psi) ** 2
    index = np.arange(1 << n)
    expected = [np.sum(probs * (1 - 2 * ((index >> k) & 1))) for k in range(n)]
    np.testing.assert_allclose(z_expectations(circuit, theta, "10000"), expected, atol=1e-10)


def test_gradient_matches_finite_differences():
    n = 6
    graph = gen_graph(n, "3regular", seed=11)
    eta = project_maxcut(graph)
    circuit = build_ansatz(n, rng_seed=5)
    theta = np.random.default_rng(6).uniform(-np.pi, np.pi, circuit.n_params)
    grad = gradient(circuit, theta, "000000", eta)
    fd = finite_difference(circuit, theta, "000000", eta)
    np.testing.assert_allclose(grad, fd, atol=1e-6)


@pytest.mark.parametrize("stride", [1, 4, 7])
def test_checkpointed_gradient_is_unchanged(stride):
    n = 6
    eta = project_maxcut(gen_graph(n, "3regular", seed=2))
    circuit = build_ansatz(n, rng_seed=9)
    theta = np.random.default_rng(0).uniform(-np.pi, np.pi, circuit.n_params)
    value, grad = value_and_gradient(circuit, theta, "000000", eta)
    value_cp, grad_cp = value_and_gradient(circuit, theta, "000000", eta, checkpoint_stride=stride)
    assert value_cp == pytest.approx(value, abs=1e-12)
    np.testing.assert_allclose(grad_cp, grad, atol=1e-10)


def test_evolution_preserves_module_norm():
    n = 6
    circuit = build_ansatz(n, rng_seed=4)
    theta = np.random.default_rng(4).uniform(-np.pi, np.pi, circuit.n_params)
    for kappa in (2, 4):
        start = evolve(circuit, np.zeros(circuit.n_params), "000000", kappa)
        end = evolve(circuit, theta, "000000", kappa)
        phi_start = start.phi4 if kappa == 4 else start.phi2
        phi_end = end.phi4 if kappa == 4 else end.phi2
        assert phi_end.norm() == pytest.approx(phi_start.norm(), rel=1e-12)


def test_cost_stays_within_hamiltonian_range():
    n = 6
    graph = gen_graph(n, "3regular", seed=3)
    eta = project_maxcut(graph)
    circuit = build_ansatz(n, rng_seed=3)
    tables = compile_circuit(circuit, 4)
    rng = np.random.default_rng(7)
    for _ in range(20):
        cost = expectation(circuit, rng.uniform(-np.pi, np.pi, circuit.n_params), "000000", eta, tables)
        assert -graph.total_weight - 1e-9 <= cost <= graph.total_weight + 1e-9


def test_engine_rejects_mismatched_inputs():
    circuit = single_gate_circuit("XX", 1, 3)
    eta = project_maxcut(PATH3)
    with pytest.raises(ValueError):
        expectation(circuit, [0.0, 1.0], "000", eta)
    with pytest.raises(ValueError):
        expectation(circuit, [0.0], "00", eta)
    with pytest.raises(ValueError):
        expectation(circuit, [0.0], "000", project_maxcut(Graph(n_vertices=4, edges=[(1, 2, 1)])))


def test_extract_bits():
    assert extract_bits([0.9, -0.8, 0.51, -1.0]) == "0101"
    with pytest.raises(AmbiguousReadout):
        extract_bits([0.9, 0.5])
    with pytest.raises(AmbiguousReadout):
        extract_bits([0.2, -0.9])
    assert extract_bits([0.2, -0.9], threshold=0.1) == "01"
