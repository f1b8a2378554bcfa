"""
Group modules B_kappa: colex numbering of Majorana subsets, the real basis
convention, and projections of basis states and MaxCut Hamiltonians.

Basis element of rank l in B_kappa is b_l = P_l / 2^{n/2}, P_l the phase-free
Pauli word of the Majorana product of the rank-l subset. With this convention
every projected state or Ising Hamiltonian has real coefficients.
"""
import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import chain, combinations
from typing import Dict, List, Sequence, Tuple

import networkx as nx
import numpy as np
from pydantic import BaseModel, Field, model_validator
from scipy.linalg import hadamard

from algebra import PauliString, grade_table, majorana_product, support_masks


def dim_module(kappa: int, n: int) -> int:
    if not 0 <= kappa <= 2 * n:
        return 0
    return math.comb(2 * n, kappa)


def rank(indices: Sequence[int], kappa: int, n: int) -> int:
    """Colex rank: sum_j C(a_j, j+1) over the sorted indices a_0 < a_1 < ..."""
    indices = tuple(indices)
    if len(indices) != kappa:
        raise ValueError(f"[ModSpace] expected {kappa} indices, got {len(indices)}")
    for j, index in enumerate(indices):
        if not 0 <= index < 2 * n:
            raise ValueError(f"[ModSpace] Majorana index {index} out of range for n={n}")
        if j and index <= indices[j - 1]:
            raise ValueError(f"[ModSpace] indices must be strictly increasing, got {indices}")
    return sum(math.comb(index, j + 1) for j, index in enumerate(indices))


def unrank(r: int, kappa: int, n: int) -> Tuple[int, ...]:
    if not 0 <= r < dim_module(kappa, n):
        raise ValueError(f"[ModSpace] rank {r} out of range for kappa={kappa}, n={n}")
    indices: List[int] = []
    top = 2 * n - 1
    for j in range(kappa, 0, -1):
        while math.comb(top, j) > r:
            top -= 1
        indices.append(top)
        r -= math.comb(top, j)
        top -= 1
    return tuple(reversed(indices))


@lru_cache(maxsize=None)
def binomial_table(m: int, kappa: int) -> np.ndarray:
    """table[a, j] = C(a, j) for a < m, j <= kappa, as int64."""
    table = np.zeros((m + 1, kappa + 1), dtype=np.int64)
    for a in range(m + 1):
        for j in range(kappa + 1):
            table[a, j] = math.comb(a, j)
    return table


def rank_array(subsets: np.ndarray, n: int) -> np.ndarray:
    """Colex ranks of the rows of a sorted (count, kappa) index array."""
    kappa = subsets.shape[1]
    table = binomial_table(2 * n, kappa)
    ranks = np.zeros(subsets.shape[0], dtype=np.int64)
    for j in range(kappa):
        ranks += table[subsets[:, j], j + 1]
    return ranks


@lru_cache(maxsize=32)
def combination_array(m: int, k: int) -> np.ndarray:
    """All k-subsets of range(m), lexicographic, as a read-only (C(m,k), k) array."""
    count = math.comb(m, k)
    if k == 0:
        out = np.zeros((1, 0), dtype=np.int64)
    else:
        flat = np.fromiter(chain.from_iterable(combinations(range(m), k)),
                           dtype=np.int64, count=count * k)
        out = flat.reshape(count, k)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class BasisElement:
    n: int
    kappa: int
    indices: Tuple[int, ...]

    @classmethod
    def from_rank(cls, r: int, kappa: int, n: int) -> "BasisElement":
        return cls(n, kappa, unrank(r, kappa, n))

    @property
    def rank(self) -> int:
        return rank(self.indices, self.kappa, self.n)

    @property
    def product(self) -> PauliString:
        return majorana_product(self.indices, self.n)

    @property
    def pauli(self) -> PauliString:
        """The Hermitian word i^s * product; b = pauli / 2^{n/2}."""
        return self.product.bare()


def basis_phase_convention(element: BasisElement) -> int:
    """Exponent s such that i^s * (Majorana product) is the phase-free word."""
    return (-element.product.phase) % 4


@dataclass
class ModuleVector:
    """Dense real coefficients over B_kappa (phi, eta, or an adjoint)."""
    n: int
    kappa: int
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.float64)
        expected = dim_module(self.kappa, self.n)
        if self.coeffs.shape != (expected,):
            raise ValueError(
                f"[ModSpace] B_{self.kappa} on n={self.n} has dimension {expected}, "
                f"got coefficient shape {self.coeffs.shape}"
            )

    @classmethod
    def zeros(cls, n: int, kappa: int) -> "ModuleVector":
        return cls(n, kappa, np.zeros(dim_module(kappa, n)))

    def copy(self) -> "ModuleVector":
        return ModuleVector(self.n, self.kappa, self.coeffs.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def dot(self, other: "ModuleVector") -> float:
        if (self.n, self.kappa) != (other.n, other.kappa):
            raise ValueError("[ModSpace] inner product of vectors from different modules")
        return float(self.coeffs @ other.coeffs)


class Graph(BaseModel):
    """Weighted simple graph, 1-based vertices, edges stored with u < v."""
    n_vertices: int = Field(ge=1)
    edges: List[Tuple[int, int, int]] = Field(default_factory=list)
    name: str = ""

    @model_validator(mode="after")
    def _check_edges(self):
        seen = set()
        normalized = []
        for u, v, w in self.edges:
            if u == v:
                raise ValueError(f"self-loop on vertex {u}")
            if u > v:
                u, v = v, u
            if u < 1 or v > self.n_vertices:
                raise ValueError(f"edge ({u},{v}) outside vertices 1..{self.n_vertices}")
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u},{v})")
            seen.add((u, v))
            normalized.append((u, v, int(w)))
        self.edges = normalized
        return self

    @property
    def total_weight(self) -> int:
        return sum(w for _, _, w in self.edges)

    def spins(self, bits: str) -> np.ndarray:
        if len(bits) != self.n_vertices or set(bits) - {"0", "1"}:
            raise ValueError(f"[Graph] bitstring {bits!r} does not fit {self.n_vertices} vertices")
        return np.array([1 - 2 * int(b) for b in bits], dtype=np.int64)

    def energy(self, bits: str) -> int:
        """Classical Ising energy sum w_ij z_i z_j."""
        z = self.spins(bits)
        return int(sum(w * z[u - 1] * z[v - 1] for u, v, w in self.edges))

    def cut_value(self, bits: str) -> int:
        return (self.total_weight - self.energy(bits)) // 2

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(1, self.n_vertices + 1))
        graph.add_weighted_edges_from(self.edges)
        return graph


def _bits_vector(bits: str) -> np.ndarray:
    if not bits or set(bits) - {"0", "1"}:
        raise ValueError(f"[ModSpace] invalid bitstring {bits!r}")
    return np.array([int(b) for b in bits], dtype=np.int64)


def pair_rank(site: int, n: int) -> int:
    """Rank in B_2 of {c^X_site, c^Y_site} (site is 1-based), the Z_site element."""
    return rank((2 * site - 2, 2 * site - 1), 2, n)


def project_basis_state(bits: str, kappa: int) -> ModuleVector:
    """
    phi_l = Tr[b_l |bits><bits|].

    Only subsets made of whole site pairs {c^X_mu, c^Y_mu} reduce to {I,Z}-words,
    so the nonzero entries are (-1)^{sum of bits on those sites} / 2^{n/2}.
    """
    x = _bits_vector(bits)
    n = len(x)
    if kappa % 2:
        raise ValueError(f"[ModSpace] basis states only project onto even grades, got kappa={kappa}")
    vector = ModuleVector.zeros(n, kappa)
    m = kappa // 2
    if m > n:
        return vector
    sites = combination_array(n, m)
    pairs = np.empty((sites.shape[0], kappa), dtype=np.int64)
    pairs[:, 0::2] = 2 * sites
    pairs[:, 1::2] = 2 * sites + 1
    signs = 1 - 2 * (x[sites].sum(axis=1) % 2) if m else np.ones(1, dtype=np.int64)
    vector.coeffs[rank_array(pairs, n)] = signs * 2.0 ** (-n / 2)
    return vector


def project_maxcut(graph: Graph) -> ModuleVector:
    """eta_l = Tr[b_l H]; edge (i,j,w) lands on the rank of {2i-2, 2i-1, 2j-2, 2j-1}."""
    n = graph.n_vertices
    if n < 2:
        raise ValueError("[ModSpace] the MaxCut module needs at least two vertices")
    vector = ModuleVector.zeros(n, 4)
    scale = 2.0 ** (n / 2)
    for u, v, w in graph.edges:
        l = rank((2 * u - 2, 2 * u - 1, 2 * v - 2, 2 * v - 1), 4, n)
        vector.coeffs[l] += w * scale
    return vector


def basis_element_matrix(element: BasisElement) -> np.ndarray:
    """Dense b_l (oracle use only)."""
    return element.pauli.to_dense() / 2.0 ** (element.n / 2)


def pauli_coefficients(rho: np.ndarray, n: int) -> np.ndarray:
    """
    T[x, z] = Tr[W(x, z) rho] for every Hermitian word W(x, z).

    Tr[W rho] = i^{x.z} sum_y (-1)^{z.y} rho[y, y ^ x], a Walsh-Hadamard
    transform along y for each x.
    """
    dim = 1 << n
    y = np.arange(dim, dtype=np.int64)
    shifted = rho[y[None, :], y[None, :] ^ y[:, None]]    # [x, y] -> rho[y, y^x]
    transform = shifted @ hadamard(dim)
    x = y[:, None]
    z = y[None, :]
    phases = 1j ** (np.bitwise_count(x & z) % 4)
    return phases * transform


def module_weights_dense(state: np.ndarray, n: int) -> Dict[int, float]:
    """
    Hilbert-Schmidt norm of the projection of a density matrix onto each B_kappa.

    Accepts a density matrix or a pure state vector. Oracle for n <= 12.
    """
    if n > 12:
        raise ValueError(f"[ModSpace] dense module weights limited to n <= 12, got {n}")
    rho = np.asarray(state, dtype=complex)
    if rho.ndim == 1:
        rho = np.outer(rho, rho.conj())
    dim = 1 << n
    if rho.shape != (dim, dim):
        raise ValueError(f"[ModSpace] expected a {dim}x{dim} density matrix, got {rho.shape}")
    if not np.isclose(np.trace(rho).real, 1.0, atol=1e-9):
        raise ValueError(f"[ModSpace] state is not normalized (trace {np.trace(rho).real:.6g})")
    squared = np.abs(pauli_coefficients(rho, n)) ** 2 / dim
    grades = grade_table(n)
    totals = np.bincount(grades.ravel(), weights=squared.ravel(), minlength=2 * n + 1)
    return {kappa: float(np.sqrt(totals[kappa])) for kappa in range(2 * n + 1)}


def basis_state_module_weights(n: int) -> Dict[int, float]:
    """Closed form for any computational basis state: ||rho_{2m}||^2 = C(n, m) / 2^n."""
    weights = {kappa: 0.0 for kappa in range(2 * n + 1)}
    for m in range(n + 1):
        weights[2 * m] = math.sqrt(math.comb(n, m) / 2 ** n)
    return weights


def support_word(indices: Sequence[int], n: int) -> PauliString:
    x, z = support_masks(indices, n)
    return PauliString(n, x, z, 0)
