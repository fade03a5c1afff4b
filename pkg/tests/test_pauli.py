"""Pauli-string realization against a dense Kronecker-product oracle."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symqoc.pauli import (
    DimensionError,
    OperatorMatrix,
    PauliString,
    PauliTermSum,
    embed_pair_zz,
    embed_single,
    export_coo,
    import_coo,
    pauli_string_zz,
    realize,
)

SIGMA = {
    "I": np.eye(2),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1.0, -1.0]).astype(complex),
}


def kron_oracle(letters: str, coefficient: float = 1.0) -> np.ndarray:
    m = np.array([[coefficient]], dtype=complex)
    for c in letters:
        m = np.kron(m, SIGMA[c])
    return m


letters_st = st.text(alphabet="IXYZ", min_size=1, max_size=6)


@given(letters_st, st.floats(-5, 5, allow_nan=False))
@settings(max_examples=150, deadline=None)
def test_single_string_matches_kron(letters, coeff):
    got = realize(PauliTermSum(len(letters), (PauliString(len(letters), letters, coeff),)))
    np.testing.assert_allclose(got.dense(), kron_oracle(letters, coeff), atol=1e-14)


@given(st.lists(letters_st.filter(lambda s: len(s) == 3), min_size=1, max_size=5),
       st.lists(st.floats(-2, 2, allow_nan=False), min_size=5, max_size=5))
@settings(max_examples=60, deadline=None)
def test_term_sum_is_linear(strings, coeffs):
    terms = tuple(PauliString(3, s, c) for s, c in zip(strings, coeffs))
    got = realize(PauliTermSum(3, terms)).dense()
    want = sum(kron_oracle(s, c) for s, c in zip(strings, coeffs))
    np.testing.assert_allclose(got, want, atol=1e-13)


def test_all_up_is_first_basis_state():
    # site 1 = most significant bit, spin-up = bit 0
    z1 = realize(PauliTermSum(2, (PauliString(2, "ZI"),))).dense()
    assert z1[0, 0] == 1.0  # |up,up> has eigenvalue +1


def test_diagonal_storage_for_z_sums():
    op = realize(PauliTermSum(3, (PauliString(3, "ZIZ", 0.5),)))
    assert op.storage == "diagonal"
    np.testing.assert_allclose(np.diag(op.diagonal()), kron_oracle("ZIZ", 0.5).real)


def test_sparse_storage_for_single_flip():
    op = realize(PauliTermSum(5, (PauliString(5, "XIIII"),)))
    assert op.storage == "coo"


def test_hermiticity_of_real_weighted_sums():
    op = realize(PauliTermSum(3, (PauliString(3, "XYZ", 0.7), PauliString(3, "YII", -0.3))))
    assert op.is_hermitian()


def test_embed_single_matches_string():
    got = embed_single(3, 2, "y").dense()
    np.testing.assert_allclose(got, kron_oracle("IYI"), atol=1e-15)


def test_embed_pair_zz_wraps_around_ring():
    got = embed_pair_zz(4, 4, 1).dense()
    np.testing.assert_allclose(got, kron_oracle("ZIIZ"), atol=1e-15)
    assert pauli_string_zz(4, 4, 1).letters == "ZIIZ"


def test_size_guard():
    with pytest.raises(DimensionError):
        realize(PauliTermSum(15, (PauliString(15, "I" * 15),)))


def test_invalid_letters_rejected():
    with pytest.raises(ValueError):
        PauliString(2, "XQ")


def test_coo_round_trip(tmp_path):
    op = realize(PauliTermSum(3, (PauliString(3, "XYI", 0.25), PauliString(3, "ZZZ", -1.5))))
    path = tmp_path / "op.coo"
    export_coo(op, path)
    back = import_coo(path)
    np.testing.assert_array_equal(back.dense(), op.dense())


def test_operator_matrix_apply_matches_dense():
    rng = np.random.default_rng(0)
    op = realize(PauliTermSum(3, (PauliString(3, "XZY", 0.3),)))
    v = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    np.testing.assert_allclose(op.apply(v), op.dense() @ v, atol=1e-14)
