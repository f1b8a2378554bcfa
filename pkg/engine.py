"""
Projected cost evaluation.

The cost C(theta) = Tr[U rho U^dag H] is computed entirely inside B_4: the
initial basis state is projected to phi, pushed through every gate table, and
contracted with eta, the projection of the MaxCut Hamiltonian. Readout runs
the same gate sequence on the B_2 projection to get <Z_i>.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from circuit import Circuit, GateTable, apply_gate, compile_circuit
from modspace import ModuleVector, pair_rank, project_basis_state


READOUT_THRESHOLD = 0.5


class AmbiguousReadout(ValueError):
    """Some <Z_i> is too close to zero to round to a bit."""

    def __init__(self, z: Sequence[float], threshold: float):
        self.z = np.asarray(z, dtype=np.float64)
        self.threshold = threshold
        worst = int(np.argmin(np.abs(self.z)))
        super().__init__(
            f"[Engine] ambiguous readout: |<Z_{worst + 1}>| = {abs(self.z[worst]):.4f} <= {threshold}"
        )


@dataclass
class EvalState:
    """Module vectors of one trial; checkpoints hold phi4 before gates k*stride."""
    phi4: Optional[ModuleVector] = None
    phi2: Optional[ModuleVector] = None
    checkpoints: Dict[int, np.ndarray] = field(default_factory=dict)


def _tables(circuit: Circuit, kappa: int, tables: Optional[List[GateTable]]) -> List[GateTable]:
    if tables is None:
        return compile_circuit(circuit, kappa)
    if len(tables) != circuit.n_params:
        raise ValueError(f"[Engine] {len(tables)} tables for {circuit.n_params} gates")
    return tables


def _check_eta(circuit: Circuit, eta: ModuleVector) -> None:
    if eta.kappa != 4 or eta.n != circuit.n:
        raise ValueError(f"[Engine] eta lives in B_{eta.kappa} on n={eta.n}, expected B_4 on n={circuit.n}")


def evolve(circuit: Circuit, theta: np.ndarray, init_bits: str, kappa: int,
           tables: Optional[List[GateTable]] = None,
           checkpoint_stride: int = 0) -> EvalState:
    """Forward sweep; optionally snapshots the vector every `checkpoint_stride` gates."""
    theta = circuit.check_theta(theta)
    if len(init_bits) != circuit.n:
        raise ValueError(f"[Engine] initial bits {init_bits!r} do not fit n={circuit.n}")
    tables = _tables(circuit, kappa, tables)
    phi = project_basis_state(init_bits, kappa)
    checkpoints: Dict[int, np.ndarray] = {}
    for q, table in enumerate(tables):
        if checkpoint_stride and q % checkpoint_stride == 0:
            checkpoints[q] = phi.coeffs.copy()
        apply_gate(phi, table, theta[q])
    if kappa == 4:
        return EvalState(phi4=phi, checkpoints=checkpoints)
    return EvalState(phi2=phi, checkpoints=checkpoints)


def expectation(circuit: Circuit, theta: Sequence[float], init_bits: str, eta: ModuleVector,
                tables: Optional[List[GateTable]] = None) -> float:
    _check_eta(circuit, eta)
    state = evolve(circuit, theta, init_bits, 4, tables)
    return state.phi4.dot(eta)


def value_and_gradient(circuit: Circuit, theta: Sequence[float], init_bits: str, eta: ModuleVector,
                       tables: Optional[List[GateTable]] = None,
                       checkpoint_stride: int = 0) -> Tuple[float, np.ndarray]:
    """
    One forward sweep, then a reverse sweep carrying the adjoint lam (starting at
    eta) and the state v back through inverse rotations. For the pair action
    R(theta) = exp(2 theta J) with J v_l = -s v_l', J v_l' = s v_l:

        dC/dtheta_q = 2 sum s (lam_l' v_l - lam_l v_l')    (v taken after gate q)
    """
    _check_eta(circuit, eta)
    theta = circuit.check_theta(theta)
    tables = _tables(circuit, 4, tables)
    state = evolve(circuit, theta, init_bits, 4, tables, checkpoint_stride)
    value = state.phi4.dot(eta)

    v = state.phi4
    lam = eta.copy()
    grad = np.zeros(circuit.n_params)
    for q in range(len(tables) - 1, -1, -1):
        table = tables[q]
        if len(table):
            v_l, v_r = v.coeffs[table.left], v.coeffs[table.right]
            lam_l, lam_r = lam.coeffs[table.left], lam.coeffs[table.right]
            grad[q] = 2.0 * float(np.sum(table.sign * (lam_r * v_l - lam_l * v_r)))
            apply_gate(lam, table, -theta[q])
            if q in state.checkpoints:
                v.coeffs[:] = state.checkpoints[q]
            else:
                apply_gate(v, table, -theta[q])
    return value, grad


def gradient(circuit: Circuit, theta: Sequence[float], init_bits: str, eta: ModuleVector,
             tables: Optional[List[GateTable]] = None,
             checkpoint_stride: int = 0) -> np.ndarray:
    return value_and_gradient(circuit, theta, init_bits, eta, tables, checkpoint_stride)[1]


def z_expectations(circuit: Circuit, theta: Sequence[float], init_bits: str,
                   tables: Optional[List[GateTable]] = None) -> np.ndarray:
    """<Z_i> for every qubit from the evolved B_2 coefficients."""
    state = evolve(circuit, theta, init_bits, 2, tables)
    n = circuit.n
    ranks = [pair_rank(site, n) for site in range(1, n + 1)]
    return state.phi2.coeffs[ranks] * 2.0 ** (n / 2)


def extract_bits(z: Sequence[float], threshold: float = READOUT_THRESHOLD) -> str:
    z = np.asarray(z, dtype=np.float64)
    if np.any(np.abs(z) <= threshold):
        raise AmbiguousReadout(z, threshold)
    bits = "".join("0" if value > threshold else "1" for value in z)
    logging.debug(f"[Engine] readout {bits} from <Z> = {np.round(z, 4).tolist()}")
    return bits
