import itertools

import numpy as np
import pytest

from algebra import (
    PauliString,
    anticommutes,
    grade_table,
    majorana_decompose,
    majorana_grade,
    majorana_pauli,
    majorana_product,
    multiply,
    product_phase,
    product_phase_array,
)


def all_words(n):
    for letters in itertools.product("IXYZ", repeat=n):
        yield PauliString.from_letters("".join(letters))


def test_letters_round_trip():
    word = PauliString.from_letters("IXZY")
    assert word.letters == "IXZY"
    assert word.weight == 3
    assert not word.is_diagonal()
    assert PauliString.from_letters("ZIZ").is_diagonal()


def test_single_site_products():
    x, y, z = (PauliString.from_letters(c) for c in "XYZ")
    assert (x * y).letters == "Z" and (x * y).phase == 1
    assert (y * x).phase == 3
    assert (z * x).letters == "Y" and (z * x).phase == 1
    assert (y * z).letters == "X" and (y * z).phase == 1
    assert (y * y) == PauliString.identity(1)


def test_invalid_inputs():
    with pytest.raises(ValueError):
        PauliString.from_letters("XQ")
    with pytest.raises(ValueError):
        PauliString(2, 4, 0)
    with pytest.raises(ValueError):
        PauliString(2, 0, 0, 5)


def test_product_matches_dense():
    rng = np.random.default_rng(7)
    words = list(all_words(3))
    for _ in range(60):
        a, b = (words[i] for i in rng.integers(len(words), size=2))
        np.testing.assert_allclose((a * b).to_dense(), a.to_dense() @ b.to_dense(), atol=1e-12)


def test_hermitian_words_are_hermitian_and_square_to_identity():
    for word in all_words(2):
        dense = word.to_dense()
        np.testing.assert_allclose(dense, dense.conj().T, atol=1e-12)
        np.testing.assert_allclose(dense @ dense, np.eye(4), atol=1e-12)


def test_anticommutes_agrees_with_dense():
    words = list(all_words(2))
    for a in words:
        for b in words:
            da, db = a.to_dense(), b.to_dense()
            expected = np.allclose(da @ db, -db @ da)
            assert anticommutes(a, b) == expected


def test_product_phase_array_matches_scalar():
    rng = np.random.default_rng(3)
    x1, z1, x2, z2 = (rng.integers(0, 1 << 10, size=50) for _ in range(4))
    vector = product_phase_array(*(a.astype(np.uint64) for a in (x1, z1, x2, z2)))
    scalar = [product_phase(int(a), int(b), int(c), int(d)) for a, b, c, d in zip(x1, z1, x2, z2)]
    assert vector.tolist() == scalar


def test_majoranas_satisfy_clifford_relations():
    n = 3
    ops = [majorana_pauli(k, n).to_dense() for k in range(2 * n)]
    for j in range(2 * n):
        for k in range(2 * n):
            anti = ops[j] @ ops[k] + ops[k] @ ops[j]
            np.testing.assert_allclose(anti, 2 * np.eye(8) * (j == k), atol=1e-12)


def test_majorana_pair_on_one_site_is_z():
    product = majorana_product((0, 1), 1)
    assert product.letters == "Z"
    assert product.phase == 1


def test_majorana_product_rejects_unsorted_indices():
    with pytest.raises(ValueError):
        majorana_product((2, 1), 2)
    with pytest.raises(ValueError):
        majorana_product((0, 4), 2)


def test_decompose_reconstructs_every_word():
    for word in all_words(3):
        phased = PauliString(word.n, word.x, word.z, 2)
        indices, s = majorana_decompose(phased)
        rebuilt = majorana_product(indices, 3)
        assert rebuilt.same_word(phased)
        assert (rebuilt.phase + s) % 4 == phased.phase


def test_grade_table_matches_decomposition():
    table = grade_table(3)
    for word in all_words(3):
        assert table[word.x, word.z] == majorana_grade(word)


def test_diagonal_words_have_even_grade():
    for word in all_words(3):
        if word.is_diagonal():
            assert majorana_grade(word) % 2 == 0
    assert majorana_grade(PauliString.from_letters("ZZI")) == 4
    assert majorana_grade(PauliString.from_letters("XII")) == 1


def test_jordan_wigner_strings():
    assert majorana_pauli(0, 3).letters == "XII"
    assert majorana_pauli(2, 3).letters == "ZXI"
    assert majorana_pauli(5, 3).letters == "ZZY"
    assert all(majorana_pauli(k, 3).phase == 0 for k in range(6))
    with pytest.raises(ValueError):
        majorana_pauli(6, 3)


def test_multiply_examples():
    zx, xi = PauliString.from_letters("ZX"), PauliString.from_letters("XI")
    product = multiply(zx, xi)
    assert product.letters == "YX" and product.phase == 1
    zz = PauliString.from_letters("ZZ")
    assert multiply(zz, zz) == PauliString.identity(2)
    with pytest.raises(ValueError):
        multiply(zz, PauliString.from_letters("Z"))


def test_majorana_product_examples():
    four = majorana_product((0, 1, 2, 3), 2)
    assert four.letters == "ZZ" and four.phase == 2
    assert majorana_product((), 3) == PauliString.identity(3)


def test_anticommutes_examples():
    letters = PauliString.from_letters
    assert anticommutes(letters("X"), letters("Z"))
    assert not anticommutes(letters("ZZ"), letters("ZI"))
    assert anticommutes(letters("XX"), letters("ZI"))
