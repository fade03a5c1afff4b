"""Model assembly: Hamiltonian structure, coupling schedules, config parsing."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symqoc import analysis, model
from symqoc.pauli import realize


def kron_chain(mats):
    out = np.array([[1.0]], dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


SZ = np.diag([1.0, -1.0]).astype(complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
ID = np.eye(2, dtype=complex)


def oracle_static(n, bz, couplings):
    dim = 1 << n
    h = np.zeros((dim, dim), dtype=complex)
    for i in range(n):
        h += 0.5 * bz * kron_chain([SZ if k == i else ID for k in range(n)])
    for k, c in enumerate(couplings, start=1):
        for i in range(n):
            j = (i + k) % n
            h += 0.25 * c * kron_chain(
                [SZ if q in (i, j) else ID for q in range(n)]
            )
    return h


@pytest.mark.parametrize("n,couplings", [(3, (0.2,)), (4, (0.2, 0.1)), (5, (0.1, 0.05))])
def test_static_hamiltonian_matches_oracle(n, couplings):
    cfg = model.ModelConfig(n, 1.3, couplings)
    got = realize(model.static_hamiltonian(cfg)).dense()
    np.testing.assert_allclose(got, oracle_static(n, 1.3, couplings), atol=1e-13)


def test_even_n_furthest_offset_double_counts():
    # the offset-n/2 sum runs over all i, so each physical pair enters twice
    cfg = model.ModelConfig(4, 0.0, (0.0, 0.1))
    got = realize(model.static_hamiltonian(cfg)).dense()
    single_pair = 0.25 * 0.1 * (
        kron_chain([SZ, ID, SZ, ID]) + kron_chain([ID, SZ, ID, SZ])
    )
    np.testing.assert_allclose(got, 2.0 * single_pair, atol=1e-14)


def test_global_control_sums_over_sites():
    cfg = model.uncoupled_config(3)
    hx, hy = model.control_hamiltonian_terms(cfg)
    got = realize(hx).dense()
    want = sum(0.5 * kron_chain([SX if k == i else ID for k in range(3)]) for i in range(3))
    np.testing.assert_allclose(got, want, atol=1e-14)


def test_per_qubit_controls_are_single_site():
    cfg = model.ModelConfig(3, control_mode="per-qubit")
    pairs = model.control_hamiltonian_terms(cfg)
    assert len(pairs) == 3
    for i, (hx_i, _) in enumerate(pairs, start=1):
        assert len(hx_i.terms) == 1
        assert hx_i.terms[0].support() == (i,)


def test_coupling_count_guard():
    with pytest.raises(ValueError):
        model.ModelConfig(4, couplings=(0.1, 0.1, 0.1))


def test_symmetry_group_selection():
    assert model.uncoupled_config(4).symmetry_group == "sn"
    assert model.nearest_neighbor_config(4).symmetry_group == "dn"


def test_full_coupling_schedule_is_geometric():
    c = model.full_coupling_schedule(6)
    assert len(c) == 3
    assert c[0] == pytest.approx(0.2)
    assert c[1] / c[0] == pytest.approx(c[2] / c[1])


def test_retry_changes_gap_structure_not_just_scale():
    c0 = model.full_coupling_schedule(6, attempt=0)
    c1 = model.full_coupling_schedule(6, attempt=1)
    ratios = [a / b for a, b in zip(c0, c1)]
    assert not np.allclose(ratios, ratios[0])


def test_degeneracy_breaking_succeeds_at_n4():
    cfg = model.choose_degeneracy_breaking_couplings(4)
    cascade = analysis.energy_cascade(cfg, "first-block-d")
    assert analysis.count_distinct_gaps(cascade) == len(cascade.allowed_gaps) == 6


def test_degeneracy_breaking_impossible_for_n5():
    # middle transitions between complementary weight classes sit at exactly bz
    with pytest.raises(RuntimeError):
        model.choose_degeneracy_breaking_couplings(5)


@given(st.integers(2, 8), st.floats(0.1, 3.0), st.integers(0, 3))
@settings(max_examples=40, deadline=None)
def test_config_round_trip(n, bz, ncpl):
    couplings = tuple(0.05 * (k + 1) for k in range(min(ncpl, n // 2)))
    cfg = model.ModelConfig(n, bz, couplings)
    assert model.parse_config(model.serialize_config(cfg)) == cfg
