"""
Phase-tracked Pauli-string arithmetic and Jordan-Wigner Majorana operators.

A Pauli word on n sites is stored in the symplectic form (x, z) with bit mu of
each integer describing site mu+1:

    I = (0, 0), X = (1, 0), Z = (0, 1), Y = (1, 1)

and the full operator is i^phase * W(x, z), where W(x, z) = i^{x.z} X^x Z^z is
the Hermitian word (so Y = iXZ carries no extra phase). Phases are exponents of
i modulo 4, never floats.

Majorana index k in [0, 2n) maps to site mu = k // 2 + 1 and flavor X (k even)
or Y (k odd):

    c_k = Z_1 ... Z_{mu-1} (X or Y)_mu I ... I
"""
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np


LETTERS = "IXZY"    # index = x + 2*z
PHASE_SYMBOLS = ("+1", "+i", "-1", "-i")


def _popcount(value: int) -> int:
    return bin(value).count("1")


def product_phase(x1: int, z1: int, x2: int, z2: int) -> int:
    """Exponent e with W(x1,z1) W(x2,z2) = i^e W(x1^x2, z1^z2)."""
    x3, z3 = x1 ^ x2, z1 ^ z2
    return (_popcount(x1 & z1) + _popcount(x2 & z2) + 2 * _popcount(z1 & x2)
            - _popcount(x3 & z3)) % 4


def product_phase_array(x1, z1, x2, z2) -> np.ndarray:
    """Vectorized `product_phase` over uint64 mask arrays (n <= 64)."""
    x3 = np.bitwise_xor(x1, x2)
    z3 = np.bitwise_xor(z1, z2)
    e = (np.bitwise_count(x1 & z1).astype(np.int64)
         + np.bitwise_count(x2 & z2).astype(np.int64)
         + 2 * np.bitwise_count(z1 & x2).astype(np.int64)
         - np.bitwise_count(x3 & z3).astype(np.int64))
    return np.mod(e, 4)


@dataclass(frozen=True, slots=True)
class PauliString:
    """
    i^phase * P_1 (x) ... (x) P_n in symplectic form.

    Attributes:
        n: number of qubits
        x: bitmask, bit mu set iff site mu+1 is X or Y
        z: bitmask, bit mu set iff site mu+1 is Z or Y
        phase: exponent of i in {0, 1, 2, 3}
    """
    n: int
    x: int
    z: int
    phase: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"[PauliString] n must be positive, got {self.n}")
        limit = 1 << self.n
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise ValueError(f"[PauliString] masks exceed {self.n} sites")
        if self.phase not in (0, 1, 2, 3):
            raise ValueError(f"[PauliString] phase exponent must be in 0..3, got {self.phase}")

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, 0, 0, 0)

    @classmethod
    def from_letters(cls, letters: str, phase: int = 0) -> "PauliString":
        """Create from letter notation, site 1 first (e.g. "ZXI")."""
        x = z = 0
        for mu, letter in enumerate(letters.upper()):
            if letter not in LETTERS:
                raise ValueError(f"[PauliString] invalid Pauli letter {letter!r}")
            code = LETTERS.index(letter)
            x |= (code & 1) << mu
            z |= (code >> 1) << mu
        return cls(len(letters), x, z, phase % 4)

    @property
    def letters(self) -> str:
        return "".join(
            LETTERS[((self.x >> mu) & 1) + 2 * ((self.z >> mu) & 1)]
            for mu in range(self.n)
        )

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    def is_diagonal(self) -> bool:
        return self.x == 0

    def bare(self) -> "PauliString":
        """The same word with phase +1."""
        return PauliString(self.n, self.x, self.z, 0)

    def same_word(self, other: "PauliString") -> bool:
        return self.n == other.n and self.x == other.x and self.z == other.z

    def __mul__(self, other: "PauliString") -> "PauliString":
        return multiply(self, other)

    def __repr__(self) -> str:
        return f"{PHASE_SYMBOLS[self.phase]}*{self.letters}"

    def to_dense(self) -> np.ndarray:
        """Dense 2^n x 2^n matrix; basis index bit mu is qubit mu+1."""
        if self.n > 12:
            raise ValueError(f"[PauliString] dense matrix limited to n <= 12, got {self.n}")
        dim = 1 << self.n
        cols = np.arange(dim, dtype=np.int64)
        signs = 1 - 2 * (np.bitwise_count(cols & self.z) & 1).astype(np.int64)
        factor = 1j ** ((self.phase + _popcount(self.x & self.z)) % 4)
        matrix = np.zeros((dim, dim), dtype=complex)
        matrix[cols ^ self.x, cols] = factor * signs
        return matrix


def _check_same_n(a: PauliString, b: PauliString) -> None:
    if a.n != b.n:
        raise ValueError(f"[Algebra] mismatched qubit counts {a.n} and {b.n}")


def multiply(a: PauliString, b: PauliString) -> PauliString:
    _check_same_n(a, b)
    phase = (a.phase + b.phase + product_phase(a.x, a.z, b.x, b.z)) % 4
    return PauliString(a.n, a.x ^ b.x, a.z ^ b.z, phase)


def anticommutes(a: PauliString, b: PauliString) -> bool:
    # odd number of sites where both letters are non-identity and differ
    _check_same_n(a, b)
    return _popcount((a.x & b.z) ^ (a.z & b.x)) % 2 == 1


def majorana_masks(index: int, n: int) -> Tuple[int, int]:
    if not 0 <= index < 2 * n:
        raise ValueError(f"[Algebra] Majorana index {index} out of range for n={n}")
    mu, flavor = divmod(index, 2)
    x = 1 << mu
    z = (1 << mu) - 1
    if flavor:
        z |= 1 << mu
    return x, z


def majorana_pauli(index: int, n: int) -> PauliString:
    """Jordan-Wigner string of c_index, phase +1."""
    x, z = majorana_masks(index, n)
    return PauliString(n, x, z, 0)


def _check_increasing(indices: Sequence[int], n: int) -> None:
    for first, second in zip(indices, indices[1:]):
        if second <= first:
            raise ValueError(f"[Algebra] Majorana indices must be strictly increasing, got {list(indices)}")
    for index in indices:
        if not 0 <= index < 2 * n:
            raise ValueError(f"[Algebra] Majorana index {index} out of range for n={n}")


def majorana_product(indices: Sequence[int], n: int) -> PauliString:
    indices = tuple(indices)
    _check_increasing(indices, n)
    result = PauliString.identity(n)
    for index in indices:
        result = multiply(result, majorana_pauli(index, n))
    return result


def majorana_decompose(pauli: PauliString) -> Tuple[Tuple[int, ...], int]:
    """
    Majorana support of a Pauli word.

    Returns (indices, s) with pauli = i^s * majorana_product(indices). Sites are
    read from the top down: the parity t of the x-bits above a site says how many
    Jordan-Wigner Z's the higher indices leave on it.
    """
    indices: List[int] = []
    parity_above = 0
    for mu in reversed(range(pauli.n)):
        x_bit = (pauli.x >> mu) & 1
        z_bit = (pauli.z >> mu) & 1
        if x_bit:
            indices.append(2 * mu + (z_bit ^ parity_above))
        elif z_bit ^ parity_above:
            indices.extend((2 * mu + 1, 2 * mu))
        parity_above ^= x_bit
    indices.reverse()
    product = majorana_product(indices, pauli.n)
    if not product.same_word(pauli):
        raise RuntimeError(f"[Algebra] decomposition of {pauli} did not close")
    return tuple(indices), (pauli.phase - product.phase) % 4


def majorana_grade(pauli: PauliString) -> int:
    return len(majorana_decompose(pauli)[0])


def grade_table(n: int) -> np.ndarray:
    """grade[x, z] for every word on n sites (dense oracle, n <= 12)."""
    if n > 12:
        raise ValueError(f"[Algebra] grade table limited to n <= 12, got {n}")
    dim = 1 << n
    x = np.arange(dim, dtype=np.int64)[:, None]
    z = np.arange(dim, dtype=np.int64)[None, :]
    grade = np.zeros((dim, dim), dtype=np.int64)
    parity_above = np.zeros((dim, 1), dtype=np.int64)
    for mu in reversed(range(n)):
        x_bit = (x >> mu) & 1
        z_bit = (z >> mu) & 1
        grade += x_bit + 2 * (1 - x_bit) * (z_bit ^ parity_above)
        parity_above = parity_above ^ x_bit
    return grade


def support_masks(indices: Iterable[int], n: int) -> Tuple[int, int]:
    """Symplectic masks of the word of a Majorana product (phase dropped)."""
    x = z = 0
    for index in indices:
        mx, mz = majorana_masks(index, n)
        x ^= mx
        z ^= mz
    return x, z


def majorana_mask_arrays(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """uint64 (x, z) masks of all 2n Majoranas, indexed by Majorana index."""
    if n > 64:
        raise ValueError(f"[Algebra] mask arrays limited to n <= 64, got {n}")
    masks = [majorana_masks(k, n) for k in range(2 * n)]
    x = np.array([m[0] for m in masks], dtype=np.uint64)
    z = np.array([m[1] for m in masks], dtype=np.uint64)
    return x, z
