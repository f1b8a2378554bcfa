"""
Matchgate ansatz and the sparse effective action of each gate on B_kappa.

Every gate is U(theta) = exp(i theta gamma) with gamma a quadratic Majorana
operator. On a basis element b that anticommutes with gamma,

    U b U^dag = cos(2 theta) b + sin(2 theta) (i gamma b),

and i gamma b = s b' for another basis element b' with s = +-1. A gate table
stores these (l, l', s) pairs with l < l'; ranks missing from the table commute
with the generator and are left alone.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from algebra import (
    PauliString,
    majorana_mask_arrays,
    majorana_product,
    product_phase_array,
)
from modspace import ModuleVector, combination_array, dim_module, rank_array


GENERATOR_KINDS = ("Z", "XX", "XY", "YX", "YY")
TWO_QUBIT_KINDS = ("XX", "XY", "YX", "YY")

# Majorana support of each kind relative to site i (0-based): offsets into 2i.
#   Z_i       = -i c^X_i c^Y_i
#   X_i X_i+1 = -i c^Y_i c^X_i+1
#   X_i Y_i+1 = -i c^Y_i c^Y_i+1
#   Y_i X_i+1 =  i c^X_i c^X_i+1
#   Y_i Y_i+1 =  i c^X_i c^Y_i+1
_SUPPORT_OFFSETS = {
    "Z": (0, 1),
    "XX": (1, 2),
    "XY": (1, 3),
    "YX": (0, 2),
    "YY": (0, 3),
}


@dataclass(frozen=True)
class Generator:
    """A matchgate generator; `site` is the 1-based qubit (first qubit of the pair)."""
    kind: str
    site: int
    n: int

    def __post_init__(self):
        if self.kind not in GENERATOR_KINDS:
            raise ValueError(f"[Circuit] unknown generator kind {self.kind!r}")
        last = self.n if self.kind == "Z" else self.n - 1
        if not 1 <= self.site <= last:
            raise ValueError(f"[Circuit] {self.kind} generator on site {self.site} outside 1..{last}")

    @property
    def support(self) -> Tuple[int, int]:
        first, second = _SUPPORT_OFFSETS[self.kind]
        base = 2 * (self.site - 1)
        return base + first, base + second

    @property
    def pauli(self) -> PauliString:
        letters = ["I"] * self.n
        if self.kind == "Z":
            letters[self.site - 1] = "Z"
        else:
            letters[self.site - 1] = self.kind[0]
            letters[self.site] = self.kind[1]
        return PauliString.from_letters("".join(letters))

    def check_quadratic(self) -> None:
        """gamma must be +-i times the product of its two Majoranas and square to I."""
        product = majorana_product(self.support, self.n)
        gamma = self.pauli
        if not product.same_word(gamma) or product.phase not in (1, 3):
            raise RuntimeError(f"[Circuit] {self} is not a quadratic Majorana generator")
        if (gamma * gamma) != PauliString.identity(self.n):
            raise RuntimeError(f"[Circuit] {self} does not square to identity")

    def __str__(self) -> str:
        if self.kind == "Z":
            return f"Z({self.site})"
        return f"{self.kind}({self.site},{self.site + 1})"


@dataclass
class GateTable:
    """Pairing of basis ranks under one generator: left < right, sign = +-1."""
    generator: Generator
    kappa: int
    left: np.ndarray
    right: np.ndarray
    sign: np.ndarray

    @property
    def pairs(self) -> List[Tuple[int, int, int]]:
        return [(int(l), int(r), int(s)) for l, r, s in zip(self.left, self.right, self.sign)]

    def __len__(self) -> int:
        return len(self.left)

    def is_involution(self) -> bool:
        touched = np.concatenate([self.left, self.right])
        return bool(np.all(self.left < self.right)) and len(np.unique(touched)) == len(touched)

    def with_flipped_signs(self) -> "GateTable":
        return GateTable(self.generator, self.kappa, self.left, self.right, -self.sign)


def build_gate_table(gen: Generator, kappa: int, n: int) -> GateTable:
    """
    Pair every basis element meeting the generator support {a, b} in exactly one
    index: S = {a} u T and S' = {b} u T for T a (kappa-1)-subset of the other
    2n-2 indices. The sign comes from the exact phase of i * gamma * P_S.
    """
    if kappa not in (2, 4):
        raise ValueError(f"[Circuit] gate tables are built for kappa in (2, 4), got {kappa}")
    if gen.n != n:
        raise ValueError(f"[Circuit] generator built for n={gen.n}, table requested for n={n}")
    if n > 64:
        raise ValueError(f"[Circuit] symplectic masks limit n to 64, got {n}")
    a, b = gen.support
    others = np.array([k for k in range(2 * n) if k not in (a, b)], dtype=np.int64)
    rest = others[combination_array(2 * n - 2, kappa - 1)]

    first = np.sort(np.concatenate([np.full((len(rest), 1), a), rest], axis=1), axis=1)
    second = np.sort(np.concatenate([np.full((len(rest), 1), b), rest], axis=1), axis=1)
    rank_first = rank_array(first, n)
    rank_second = rank_array(second, n)

    mx, mz = majorana_mask_arrays(n)
    rest_x = np.bitwise_xor.reduce(mx[rest], axis=1)
    rest_z = np.bitwise_xor.reduce(mz[rest], axis=1)
    x_first, z_first = rest_x ^ mx[a], rest_z ^ mz[a]

    gamma = gen.pauli
    gx = np.uint64(gamma.x)
    gz = np.uint64(gamma.z)
    # i * gamma * P_first = i^{1+e} P_second
    e = product_phase_array(np.full_like(x_first, gx), np.full_like(z_first, gz), x_first, z_first)
    total = (1 + e) % 4
    if np.any(total % 2):
        raise RuntimeError(f"[Circuit] i[gamma, b] is not real for {gen}, kappa={kappa}")
    if np.any((x_first ^ gx) != (rest_x ^ mx[b])) or np.any((z_first ^ gz) != (rest_z ^ mz[b])):
        raise RuntimeError(f"[Circuit] partner word mismatch for {gen}, kappa={kappa}")
    sign_first_to_second = np.where(total == 0, 1.0, -1.0)

    # orient so that left < right; i gamma b' = -s b reverses the sign
    swap = rank_first > rank_second
    left = np.where(swap, rank_second, rank_first)
    right = np.where(swap, rank_first, rank_second)
    sign = np.where(swap, -sign_first_to_second, sign_first_to_second)
    order = np.argsort(left, kind="stable")
    return GateTable(gen, kappa, left[order], right[order], sign[order])


def apply_gate(v: ModuleVector, table: GateTable, theta: float) -> ModuleVector:
    """In-place planar rotation of every pair by angle 2*theta."""
    if v.kappa != table.kappa or v.n != table.generator.n:
        raise ValueError(
            f"[Circuit] vector in B_{v.kappa} (n={v.n}) does not match table "
            f"B_{table.kappa} (n={table.generator.n})"
        )
    c = np.cos(2.0 * theta)
    s = np.sin(2.0 * theta) * table.sign
    coeffs = v.coeffs
    first = coeffs[table.left]
    second = coeffs[table.right]
    coeffs[table.left] = c * first - s * second
    coeffs[table.right] = c * second + s * first
    return v


@dataclass(frozen=True)
class Gate:
    generator: Generator
    block: int
    layer: int
    position: int


@dataclass
class Circuit:
    n: int
    gates: List[Gate]
    theta: np.ndarray
    seed: Optional[int] = None

    @property
    def n_params(self) -> int:
        return len(self.gates)

    def check_theta(self, theta: Sequence[float]) -> np.ndarray:
        theta = np.asarray(theta, dtype=np.float64)
        if theta.shape != (self.n_params,):
            raise ValueError(f"[Circuit] expected {self.n_params} parameters, got shape {theta.shape}")
        return theta

    def describe(self) -> List[str]:
        return [f"b{g.block} l{g.layer} {g.generator}" for g in self.gates]


def initial_theta(rng: np.random.Generator, count: int) -> np.ndarray:
    return rng.uniform(-np.pi, np.pi, size=count)


def build_ansatz(n: int, rng_seed: int, n_blocks: Optional[int] = None) -> Circuit:
    """
    n blocks (or `n_blocks`); each block is a layer of Z gates on every qubit
    followed by a brickwork of two-qubit gates: layer 2 on pairs (1,2),(3,4),...
    and layer 3 on (2,3),(4,5),.... Two-qubit kinds are drawn uniformly per
    (block, layer, pair); every gate carries its own parameter.
    """
    if n < 2:
        raise ValueError(f"[Circuit] the ansatz needs n >= 2, got {n}")
    blocks = n if n_blocks is None else n_blocks
    if blocks < 1:
        raise ValueError(f"[Circuit] block count must be positive, got {blocks}")
    rng = np.random.default_rng(rng_seed)
    gates: List[Gate] = []
    for block in range(1, blocks + 1):
        for site in range(1, n + 1):
            gates.append(Gate(Generator("Z", site, n), block, 1, site))
        for layer, start in ((2, 1), (3, 2)):
            for site in range(start, n, 2):
                kind = TWO_QUBIT_KINDS[rng.integers(len(TWO_QUBIT_KINDS))]
                gates.append(Gate(Generator(kind, site, n), block, layer, site))
    theta = initial_theta(rng, len(gates))
    return Circuit(n=n, gates=gates, theta=theta, seed=rng_seed)


@dataclass
class GateTableCache:
    """Tables built once per (kind, site, kappa, n) and shared by every block."""
    tables: Dict[Tuple[str, int, int, int], GateTable] = field(default_factory=dict)

    def get(self, gen: Generator, kappa: int) -> GateTable:
        key = (gen.kind, gen.site, kappa, gen.n)
        table = self.tables.get(key)
        if table is None:
            gen.check_quadratic()
            table = build_gate_table(gen, kappa, gen.n)
            self.tables[key] = table
        return table


_table_cache: Optional[GateTableCache] = None


def get_table_cache() -> GateTableCache:
    global _table_cache
    if _table_cache is None:
        _table_cache = GateTableCache()
        logging.debug("[Circuit] gate-table cache initialized.")
    return _table_cache


def compile_circuit(circuit: Circuit, kappa: int, cache: Optional[GateTableCache] = None,
                    corrupt_sign: bool = False) -> List[GateTable]:
    """Tables aligned with circuit.gates. `corrupt_sign` is a fault-injection hook."""
    cache = cache or get_table_cache()
    tables = [cache.get(gate.generator, kappa) for gate in circuit.gates]
    if corrupt_sign:
        # Z gates in the first layer act trivially on a projected basis state
        for position, table in enumerate(tables):
            if table.generator.kind != "Z" and len(table):
                logging.warning(f"[Circuit] injecting a sign fault into {table.generator} (B_{kappa}).")
                tables[position] = table.with_flipped_signs()
                break
    return tables


def pair_count(kappa: int, n: int) -> int:
    """Closed-form pairs per quadratic generator: C(2n-2, kappa-1)."""
    return dim_module(kappa - 1, n - 1)
