"""Basis-change construction: first blocks, full adjoints, block structure."""

import numpy as np
import pytest

from symqoc import adjoint, model
from symqoc.pauli import DimensionError, realize

BRACELET_DIMS = {3: 4, 4: 6, 5: 8, 6: 13, 7: 18, 8: 30}


@pytest.mark.parametrize("n", range(3, 9))
def test_first_block_dimensions(n):
    assert adjoint.build_dicke_first_block(n).ncols == n + 1
    assert adjoint.build_bracelet_first_block(n).ncols == BRACELET_DIMS[n]


@pytest.mark.parametrize("n", [2, 4, 6])
def test_dicke_columns_are_orthonormal(n):
    a = adjoint.build_dicke_first_block(n).matrix.dense()
    np.testing.assert_allclose(a.conj().T @ a, np.eye(n + 1), atol=1e-12)


@pytest.mark.parametrize("n", [3, 5, 6])
def test_bracelet_columns_are_orthonormal(n):
    a = adjoint.build_bracelet_first_block(n).matrix.dense()
    np.testing.assert_allclose(a.conj().T @ a, np.eye(a.shape[1]), atol=1e-12)


def test_dicke_first_block_values():
    # n=2: M=1 column is (|01> + |10>)/sqrt(2)
    a = adjoint.build_dicke_first_block(2).matrix.dense()
    np.testing.assert_allclose(a[:, 1], [0, 1 / np.sqrt(2), 1 / np.sqrt(2), 0])


def test_bracelet_label_ordering():
    blk = adjoint.build_bracelet_first_block(4)
    weights = [lab.split()[1].count("1") for lab in blk.blocks.first_block_labels]
    assert weights == sorted(weights)
    assert blk.blocks.first_block_labels[0] == "bracelet 0000"


@pytest.mark.parametrize("group,n", [("sn", 3), ("sn", 5), ("dn", 4), ("dn", 6)])
def test_full_adjoint_is_unitary(group, n):
    a = adjoint.build_full_adjoint(n, group)
    m = a.matrix.dense()
    np.testing.assert_allclose(m.conj().T @ m, np.eye(1 << n), atol=1e-10)
    assert a.blocks.total == 1 << n


@pytest.mark.parametrize("group,n", [("sn", 4), ("dn", 5)])
def test_full_adjoint_block_diagonalizes_controls(group, n):
    couplings = (0.2,) if group == "dn" else ()
    cfg = model.ModelConfig(n, 1.0, couplings)
    a = adjoint.build_full_adjoint(n, group)
    hx, hy = model.control_hamiltonian_terms(cfg)
    for op in (model.static_hamiltonian(cfg), hx, hy):
        rep = adjoint.verify_block_structure(
            adjoint.transform(realize(op), a), a.blocks
        )
        assert rep.passed, rep


def test_untransformed_control_fails_block_check():
    cfg = model.uncoupled_config(4)
    a = adjoint.build_full_adjoint(4, "sn")
    hx, _ = model.control_hamiltonian_terms(cfg)
    rep = adjoint.verify_block_structure(realize(hx), a.blocks)
    assert not rep.passed


def test_first_block_embeds_in_full_adjoint():
    # the leading columns of the full S_n adjoint span the Dicke block
    n = 4
    full = adjoint.build_full_adjoint(n, "sn").matrix.dense()
    first = adjoint.build_dicke_first_block(n).matrix.dense()
    lead = full[:, : n + 1]
    overlap = np.abs(first.conj().T @ lead)
    np.testing.assert_allclose(overlap @ overlap.T, np.eye(n + 1), atol=1e-10)


def test_compress_reproduces_uncoupled_ladder():
    n = 4
    blk = adjoint.build_dicke_first_block(n)
    h0 = blk.compress(realize(model.static_hamiltonian(model.uncoupled_config(n))))
    want = np.diag([0.5 * (n - 2 * m) for m in range(n + 1)])
    np.testing.assert_allclose(h0, want, atol=1e-12)


def test_block_coords_round_trip():
    blk = adjoint.build_bracelet_first_block(4)
    rng = np.random.default_rng(1)
    phi = rng.standard_normal(blk.ncols) + 1j * rng.standard_normal(blk.ncols)
    back = blk.to_block_coords(blk.from_block_coords(phi))
    np.testing.assert_allclose(back, phi, atol=1e-12)


def test_size_guards():
    with pytest.raises(DimensionError):
        adjoint.build_full_adjoint(13, "sn")
    with pytest.raises(DimensionError):
        adjoint.build_full_adjoint(11, "dn")


def test_export_block_structure(tmp_path):
    blk = adjoint.build_bracelet_first_block(3)
    path = tmp_path / "blocks.txt"
    adjoint.export_block_structure(blk.blocks, path)
    text = path.read_text()
    assert text.startswith("block sizes: 4")
    assert "bracelet" in text
