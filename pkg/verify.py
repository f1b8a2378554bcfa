"""
Dense small-n oracles and the reachability checks.

Everything here works on explicit 2^n statevectors and diagonals, so it is an
independent ground truth for the projected engine. Basis index bit mu-1 holds
qubit mu, the same layout as PauliString.to_dense.
"""
import logging
import math
from typing import Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field

from algebra import PauliString
from circuit import GENERATOR_KINDS, Circuit, Generator, apply_gate, build_ansatz, compile_circuit, get_table_cache
from graphs import gen_graph
from engine import expectation, value_and_gradient
from modspace import (
    Graph,
    ModuleVector,
    basis_state_module_weights,
    dim_module,
    module_weights_dense,
    project_maxcut,
)


BRUTE_FORCE_MAX_N = 30
DENSE_MAX_N = 12
REACHABILITY_MAX_N = 10
CHUNK_BITS = 20
GROUND_BITS_LIMIT = 4096


class DegenerateGround(ValueError):
    pass


class Spectrum(BaseModel):
    E_g: float
    E_1: Optional[float] = None
    ground_bits: List[str] = Field(default_factory=list)
    degeneracy: int = 0


class ReachabilityReport(BaseModel):
    pi_g: float
    bound: float
    min_sampled_cost: float
    E_g: float
    E_1: float
    weights_initial: Dict[int, float]
    weights_ground: Dict[int, float]
    weights_equal: bool
    holds: bool


class CheckResult(BaseModel):
    name: str
    passed: bool
    tolerance: float
    max_error: float = 0.0
    detail: str = ""


def index_to_bits(index: int, n: int) -> str:
    return "".join(str((index >> k) & 1) for k in range(n))


def bits_to_index(bits: str) -> int:
    return sum(int(b) << k for k, b in enumerate(bits))


def _chunk_energies(graph: Graph, start: int, stop: int) -> np.ndarray:
    index = np.arange(start, stop, dtype=np.int64)
    energies = np.zeros(stop - start, dtype=np.int64)
    for u, v, w in graph.edges:
        # z_u z_v = +1 iff the two bits agree
        disagree = ((index >> (u - 1)) ^ (index >> (v - 1))) & 1
        energies += w * (1 - 2 * disagree)
    return energies


def maxcut_diagonal(graph: Graph) -> np.ndarray:
    """Diagonal of sum w_ij Z_i Z_j over all 2^n basis states (n <= 30)."""
    n = graph.n_vertices
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"[Verify] enumeration limited to n <= {BRUTE_FORCE_MAX_N}, got {n}")
    return _chunk_energies(graph, 0, 1 << n).astype(np.float64)


def symmetry_broken_diagonal(graph: Graph, scale: float = 0.25) -> np.ndarray:
    """
    H + sum_i eps_i Z_i with eps_i = scale * 2^-i. The fields are distinct powers
    of two, so no two basis states tie; with scale < 1 the integer MaxCut
    levels keep their order.
    """
    n = graph.n_vertices
    diag = maxcut_diagonal(graph)
    index = np.arange(1 << n, dtype=np.int64)
    for i in range(1, n + 1):
        z = 1 - 2 * ((index >> (i - 1)) & 1)
        diag = diag + scale * 2.0 ** (-i) * z
    return diag


def diagonal_spectrum(diag: np.ndarray, atol: float = 1e-9) -> Spectrum:
    n = int(round(math.log2(len(diag))))
    e_g = float(diag.min())
    ground = np.flatnonzero(np.abs(diag - e_g) <= atol)
    above = diag[diag > e_g + atol]
    e_1 = float(above.min()) if above.size else None
    return Spectrum(E_g=e_g, E_1=e_1, degeneracy=len(ground),
                    ground_bits=[index_to_bits(int(i), n) for i in ground[:GROUND_BITS_LIMIT]])


def brute_force_maxcut(graph: Graph) -> Spectrum:
    """Exact ground level, first excited level and optimal bitstrings, in chunks of 2^20 states."""
    n = graph.n_vertices
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"[Verify] brute force limited to n <= {BRUTE_FORCE_MAX_N}, got {n}")
    total = 1 << n
    chunk = 1 << CHUNK_BITS
    levels: List[int] = []
    ground: List[int] = []
    degeneracy = 0
    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        energies = _chunk_energies(graph, start, stop)
        lowest = np.unique(energies)[:2].tolist()
        merged = sorted(set(levels) | set(lowest))[:2]
        if not levels or merged[0] < levels[0]:
            ground, degeneracy = [], 0
        levels = merged
        hits = np.flatnonzero(energies == levels[0])
        degeneracy += len(hits)
        room = GROUND_BITS_LIMIT - len(ground)
        ground.extend(int(start + h) for h in hits[:max(room, 0)])
    spectrum = Spectrum(
        E_g=float(levels[0]),
        E_1=float(levels[1]) if len(levels) > 1 else None,
        ground_bits=[index_to_bits(i, n) for i in ground],
        degeneracy=degeneracy,
    )
    logging.debug(f"[Verify] brute force n={n}: E_g={spectrum.E_g} degeneracy={degeneracy}")
    return spectrum


def best_cut(graph: Graph, spectrum: Optional[Spectrum] = None) -> int:
    spectrum = spectrum or brute_force_maxcut(graph)
    return int(round((graph.total_weight - spectrum.E_g) / 2))


# ---- dense statevector oracle ---------------------------------------------------

def basis_state_vector(bits: str) -> np.ndarray:
    psi = np.zeros(1 << len(bits), dtype=complex)
    psi[bits_to_index(bits)] = 1.0
    return psi


def plus_state(n: int) -> np.ndarray:
    return np.full(1 << n, 2.0 ** (-n / 2), dtype=complex)


def apply_pauli(psi: np.ndarray, pauli: PauliString) -> np.ndarray:
    """(P psi)[y ^ x] = i^{phase + x.z} (-1)^{z.y} psi[y]."""
    y = np.arange(len(psi), dtype=np.int64)
    signs = 1 - 2 * (np.bitwise_count(y & pauli.z) & 1).astype(np.int64)
    factor = 1j ** ((pauli.phase + bin(pauli.x & pauli.z).count("1")) % 4)
    out = np.empty_like(psi)
    out[y ^ pauli.x] = factor * signs * psi
    return out


def dense_evolve(circuit: Circuit, theta: Sequence[float], psi: np.ndarray) -> np.ndarray:
    """exp(i theta gamma) = cos(theta) I + i sin(theta) gamma, gate by gate."""
    if circuit.n > DENSE_MAX_N:
        raise ValueError(f"[Verify] dense evolution limited to n <= {DENSE_MAX_N}, got {circuit.n}")
    theta = circuit.check_theta(theta)
    psi = np.asarray(psi, dtype=complex).copy()
    if psi.shape != (1 << circuit.n,):
        raise ValueError(f"[Verify] state has shape {psi.shape}, expected ({1 << circuit.n},)")
    for gate, angle in zip(circuit.gates, theta):
        psi = np.cos(angle) * psi + 1j * np.sin(angle) * apply_pauli(psi, gate.generator.pauli)
    return psi


def dense_expectation(circuit: Circuit, theta: Sequence[float], init_state: np.ndarray,
                      hamiltonian: np.ndarray) -> float:
    """<psi|H|psi>; `hamiltonian` is a diagonal (1-D) or a full matrix."""
    psi = dense_evolve(circuit, theta, init_state)
    hamiltonian = np.asarray(hamiltonian)
    if hamiltonian.ndim == 1:
        return float(np.sum(hamiltonian * np.abs(psi) ** 2))
    return float(np.real(np.vdot(psi, hamiltonian @ psi)))


# ---- reachability ---------------------------------------------------------------

def overlap_cap(weights_initial: Dict[int, float], weights_ground: Dict[int, float]) -> float:
    return float(sum(weights_ground[k] * weights_initial.get(k, 0.0) for k in weights_ground))


def reachability_check(graph: Graph, init_state: np.ndarray, samples: int,
                       rng: np.random.Generator, symmetry_break: float = 0.25,
                       n_blocks: Optional[int] = None) -> ReachabilityReport:
    """
    Lower bound C(theta) >= E_g pi_g + E_1 (1 - pi_g) with pi_g the sum over
    modules of ||rho^g_kappa|| ||rho^i_kappa||, checked against `samples` random
    parameter draws. `symmetry_break` = 0 uses the raw MaxCut diagonal, whose
    ground level is always degenerate.
    """
    n = graph.n_vertices
    if n > REACHABILITY_MAX_N:
        raise ValueError(f"[Verify] reachability check limited to n <= {REACHABILITY_MAX_N}, got {n}")
    diag = symmetry_broken_diagonal(graph, symmetry_break) if symmetry_break else maxcut_diagonal(graph)
    spectrum = diagonal_spectrum(diag)
    if spectrum.degeneracy != 1 or spectrum.E_1 is None:
        raise DegenerateGround(
            f"[Verify] ground level {spectrum.E_g} has degeneracy {spectrum.degeneracy}; "
            f"the bound needs a unique ground state"
        )
    ground = basis_state_vector(spectrum.ground_bits[0])
    weights_initial = module_weights_dense(init_state, n)
    weights_ground = module_weights_dense(ground, n)
    pi_g = overlap_cap(weights_initial, weights_ground)
    bound = spectrum.E_g * pi_g + spectrum.E_1 * (1.0 - pi_g)

    circuit = build_ansatz(n, int(rng.integers(2 ** 31)), n_blocks)
    costs = [
        dense_expectation(circuit, rng.uniform(-np.pi, np.pi, circuit.n_params), init_state, diag)
        for _ in range(samples)
    ]
    min_cost = float(min(costs)) if costs else float("inf")
    weights_equal = all(abs(weights_initial[k] - weights_ground[k]) <= 1e-12 for k in weights_ground)
    return ReachabilityReport(
        pi_g=pi_g, bound=bound, min_sampled_cost=min_cost, E_g=spectrum.E_g, E_1=spectrum.E_1,
        weights_initial=weights_initial, weights_ground=weights_ground,
        weights_equal=weights_equal, holds=min_cost >= bound - 1e-9,
    )


def remark_check(n: int, trials: int, rng: Optional[np.random.Generator] = None) -> bool:
    """Every computational basis state has the same module weights: sqrt(C(n, m) / 2^n) at grade 2m."""
    if n > REACHABILITY_MAX_N:
        raise ValueError(f"[Verify] basis-state weight check limited to n <= {REACHABILITY_MAX_N}, got {n}")
    rng = rng or np.random.default_rng(0)
    closed = basis_state_module_weights(n)
    for _ in range(trials):
        first, second = (
            index_to_bits(int(rng.integers(1 << n)), n) for _ in range(2)
        )
        w1 = module_weights_dense(basis_state_vector(first), n)
        w2 = module_weights_dense(basis_state_vector(second), n)
        for kappa in closed:
            if abs(w1[kappa] - w2[kappa]) > 1e-12 or abs(w1[kappa] - closed[kappa]) > 1e-12:
                return False
    return True


# ---- verification suite -----------------------------------------------------------

def random_regular_instance(n: int, seed: int) -> Graph:
    return gen_graph(n, "3regular", seed)


def check_oracle_equivalence(sizes: Sequence[int] = (4, 6, 8, 10), cases: int = 20, seed: int = 0,
                             corrupt_sign: bool = False) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for n in sizes:
        for case in range(cases):
            graph = random_regular_instance(n, int(rng.integers(2 ** 31)))
            circuit = build_ansatz(n, int(rng.integers(2 ** 31)))
            theta = rng.uniform(-np.pi, np.pi, circuit.n_params)
            bits = "0" * n if case % 2 == 0 else "1" + "0" * (n - 1)
            tables = compile_circuit(circuit, 4, corrupt_sign=corrupt_sign)
            projected = expectation(circuit, theta, bits, project_maxcut(graph), tables)
            dense = dense_expectation(circuit, theta, basis_state_vector(bits), maxcut_diagonal(graph))
            worst = max(worst, abs(projected - dense))
    return CheckResult(name="oracle_equivalence", passed=worst <= 1e-9, tolerance=1e-9, max_error=worst,
                       detail=f"sizes={list(sizes)} cases={cases}")


def finite_difference(circuit: Circuit, theta: np.ndarray, bits: str, eta: ModuleVector,
                      h: float = 1e-5) -> np.ndarray:
    tables = compile_circuit(circuit, 4)
    fd = np.zeros(circuit.n_params)
    for q in range(circuit.n_params):
        plus, minus = theta.copy(), theta.copy()
        plus[q] += h
        minus[q] -= h
        fd[q] = (expectation(circuit, plus, bits, eta, tables)
                 - expectation(circuit, minus, bits, eta, tables)) / (2 * h)
    return fd


def check_gradient(n: int = 6, instances: int = 5, seed: int = 1, checkpoint_stride: int = 0) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(instances):
        graph = random_regular_instance(n, int(rng.integers(2 ** 31)))
        circuit = build_ansatz(n, int(rng.integers(2 ** 31)))
        theta = rng.uniform(-np.pi, np.pi, circuit.n_params)
        eta = project_maxcut(graph)
        _, grad = value_and_gradient(circuit, theta, "0" * n, eta, checkpoint_stride=checkpoint_stride)
        fd = finite_difference(circuit, theta, "0" * n, eta)
        worst = max(worst, float(np.max(np.abs(grad - fd)) / max(1.0, float(np.max(np.abs(fd))))))
    return CheckResult(name="gradient", passed=worst <= 1e-5, tolerance=1e-5, max_error=worst,
                       detail=f"n={n} instances={instances}")


def check_basis_state_weights(sizes: Sequence[int] = (4, 8), trials: int = 50, seed: int = 2) -> CheckResult:
    rng = np.random.default_rng(seed)
    passed = all(remark_check(n, trials, rng) for n in sizes)
    return CheckResult(name="basis_state_weights", passed=passed, tolerance=1e-12, detail=f"sizes={list(sizes)} trials={trials}")


def check_reachability_bound(sizes: Sequence[int] = (4, 6), samples: int = 200, seed: int = 3) -> CheckResult:
    rng = np.random.default_rng(seed)
    passed = True
    details = []
    worst = 0.0
    for n in sizes:
        graph = random_regular_instance(n, int(rng.integers(2 ** 31)))
        report = reachability_check(graph, plus_state(n), samples, rng)
        basis = reachability_check(graph, basis_state_vector("0" * n), 1, rng)
        worst = max(worst, report.bound - report.min_sampled_cost)
        passed = passed and report.holds and basis.weights_equal
        details.append(f"n={n} pi_g={report.pi_g:.6f} bound={report.bound:.6f} min={report.min_sampled_cost:.6f}")
    return CheckResult(name="reachability_bound", passed=passed, tolerance=1e-9, max_error=max(worst, 0.0),
                       detail="; ".join(details))


def check_conservation(n: int = 6, gates: int = 1000, seed: int = 4) -> CheckResult:
    """Random gates preserve ||phi|| in B_2 and B_4; a gate followed by its inverse is the identity."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for kappa in (2, 4):
        v = ModuleVector(n, kappa, rng.standard_normal(dim_module(kappa, n)))
        norm = v.norm()
        for _ in range(gates):
            kind = GENERATOR_KINDS[rng.integers(len(GENERATOR_KINDS))]
            site = int(rng.integers(1, n + 1 if kind == "Z" else n))
            table = get_table_cache().get(Generator(kind, site, n), kappa)
            angle = rng.uniform(-np.pi, np.pi)
            before = v.coeffs.copy()
            apply_gate(v, table, angle)
            worst = max(worst, abs(v.norm() - norm) / norm)
            restored = apply_gate(v.copy(), table, -angle)
            worst = max(worst, float(np.max(np.abs(restored.coeffs - before))))
    return CheckResult(name="conservation", passed=worst <= 1e-12, tolerance=1e-12, max_error=worst,
                       detail=f"n={n} gates={gates}")


def run_verification(seed: int = 0, inject_fault: bool = False, sizes: Sequence[int] = (4, 6, 8, 10),
                     cases: int = 20) -> List[CheckResult]:
    checks = [
        check_oracle_equivalence(sizes, cases, seed=seed, corrupt_sign=inject_fault),
        check_gradient(seed=seed + 1),
        check_basis_state_weights(seed=seed + 2),
        check_reachability_bound(seed=seed + 3),
        check_conservation(seed=seed + 4),
    ]
    return checks
