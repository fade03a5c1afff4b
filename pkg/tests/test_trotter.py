"""Trotter factorization: swap adjoints, plan structure, error order, gradient."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symqoc import model, trotter
from symqoc.pauli import PauliString, PauliTermSum, realize


def one_site(n, i, letter):
    s = "".join(letter if k == i else "I" for k in range(1, n + 1))
    return realize(PauliTermSum(n, (PauliString(n, s),))).dense()


@given(st.integers(2, 6), st.data())
@settings(max_examples=30, deadline=None)
def test_swap_conjugation_moves_site_to_last(n, data):
    i = data.draw(st.integers(1, n))
    letter = data.draw(st.sampled_from("XYZ"))
    m = trotter.build_swap_adjoint(i, n)
    np.testing.assert_array_equal(
        one_site(n, n, letter)[np.ix_(m, m)], one_site(n, i, letter)
    )


def test_swap_with_last_is_identity_and_involution():
    m = trotter.build_swap_adjoint(4, 4)
    np.testing.assert_array_equal(m, np.arange(16))
    m2 = trotter.build_swap_adjoint(2, 4)
    np.testing.assert_array_equal(m2[m2], np.arange(16))


def test_last_site_operator_is_block_broadcast():
    # sigma_alpha on the last site = I_{2^{n-1}} (x) sigma_alpha
    n = 4
    for letter, small in (("X", [[0, 1], [1, 0]]), ("Z", [[1, 0], [0, -1]])):
        full = one_site(n, n, letter)
        want = np.kron(np.eye(1 << (n - 1)), np.array(small, dtype=complex))
        np.testing.assert_array_equal(full, want)


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(0.01, 1.0))
@settings(max_examples=60, deadline=None)
def test_expm_2x2_matches_eigendecomposition(vx, vy, vz, tau):
    h = np.array([[vz, vx - 1j * vy], [vx + 1j * vy, -vz]])
    w, v = np.linalg.eigh(h)
    want = (v * np.exp(-1j * tau * w)) @ v.conj().T
    np.testing.assert_allclose(trotter.expm_2x2(h, tau), want, atol=1e-12)


def test_plan_requires_per_qubit_controls():
    with pytest.raises(ValueError):
        trotter.PerQubitPlan(model.nearest_neighbor_config(3), 0.05)


def test_zero_everything_gives_identity_step():
    cfg = model.ModelConfig(3, 0.0, (), "per-qubit")
    plan = trotter.PerQubitPlan(cfg, 0.05)
    psi = np.zeros(8, dtype=complex)
    psi[5] = 1.0
    out = plan.apply_step(psi, np.zeros(3), np.zeros(3))
    np.testing.assert_allclose(out, psi, atol=1e-14)


def test_uncoupled_plan_is_exact():
    # without coupling the factors commute with each other: no splitting error
    cfg = model.ModelConfig(3, 1.0, (), "per-qubit")
    tau = 0.3
    plan = trotter.PerQubitPlan(cfg, tau)
    bx, by = trotter.benchmark_controls(cfg, 1, tau)
    got = plan.step_unitary(bx[0], by[0])
    want = trotter.exact_step_unitary(cfg, bx[0], by[0], tau)
    np.testing.assert_allclose(got, want, atol=1e-12)


@pytest.mark.parametrize("n", [3, 4])
def test_step_unitarity(n):
    cfg = model.ModelConfig(n, 1.0, (0.2,), "per-qubit")
    plan = trotter.PerQubitPlan(cfg, 0.05)
    bx, by = trotter.benchmark_controls(cfg, 1, 0.05)
    k = plan.step_unitary(bx[0], by[0])
    np.testing.assert_allclose(k.conj().T @ k, np.eye(1 << n), atol=1e-10)


def test_halving_tau_quarters_the_error():
    cfg = model.ModelConfig(4, 1.0, (0.2,), "per-qubit")
    errs = []
    for tau in (0.1, 0.05):
        f = trotter.fidelity_replay(cfg, tau, int(round(25.0 / tau)),
                                    record_every=10**6)
        errs.append(1.0 - f[-1])
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.25)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_error_order_slope(n):
    cfg = model.ModelConfig(n, 1.0, (0.2,), "per-qubit")
    taus = (0.1, 0.05, 0.025)
    errs = [
        1.0 - trotter.fidelity_replay(cfg, tau, int(round(25.0 / tau)),
                                      record_every=10**6)[-1]
        for tau in taus
    ]
    slope = np.polyfit(np.log(taus), np.log(errs), 1)[0]
    assert 1.8 <= slope <= 2.3


def test_strang_flag_improves_error_order():
    cfg = model.ModelConfig(3, 1.0, (0.2,), "per-qubit")
    lts = 1.0 - trotter.fidelity_replay(cfg, 0.05, 500, record_every=10**6)[-1]
    strang = 1.0 - trotter.fidelity_replay(cfg, 0.05, 500, record_every=10**6,
                                           strang=True)[-1]
    assert strang < 0.01 * lts


def test_fidelity_replay_tracks_direct_accumulation():
    cfg = model.ModelConfig(3, 1.0, (0.2,), "per-qubit")
    tau, steps = 0.05, 40
    fids = trotter.fidelity_replay(cfg, tau, steps)
    plan = trotter.PerQubitPlan(cfg, tau)
    bx, by = trotter.benchmark_controls(cfg, steps, tau)
    ka = np.eye(8, dtype=complex)
    kb = np.eye(8, dtype=complex)
    for j in range(steps):
        ka = trotter.exact_step_unitary(cfg, bx[j], by[j], tau) @ ka
        kb = plan.apply_step(kb, bx[j], by[j])
    direct = abs(np.trace(ka.conj().T @ kb) / 8) ** 2
    assert fids[-1] == pytest.approx(direct, abs=1e-12)


def test_plan_general_xx_example():
    h = PauliTermSum(4, (PauliString(4, "XXII", 1.0),))
    plan = trotter.plan_general(h, 0.01)
    (term,) = plan.terms
    assert term.group == "S2"
    assert term.l == 2
    assert term.template.shape[0] == 4
    assert term.repetitions == 4
    assert sorted(term.refined_blocks) == [1, 3]


def test_plan_general_diagonal_is_single_exact_factor():
    h = model.static_hamiltonian(model.ModelConfig(4, 1.0, (0.2, 0.1)))
    plan = trotter.plan_general(h, 0.02)
    assert plan.splitting_free
    hd = realize(h).dense()
    w, v = np.linalg.eigh(hd)
    want = (v * np.exp(-1j * 0.02 * w)) @ v.conj().T
    np.testing.assert_allclose(plan.step_unitary(), want, atol=1e-13)


def test_plan_general_error_quadratic_in_tau():
    rng = np.random.default_rng(5)
    h = PauliTermSum(3, (
        PauliString(3, "IXY", float(rng.standard_normal())),
        PauliString(3, "ZXI", float(rng.standard_normal())),
        PauliString(3, "XII", float(rng.standard_normal())),
    ))
    hd = realize(h).dense()
    devs = []
    for tau in (1e-3, 5e-4, 2.5e-4):
        w, v = np.linalg.eigh(hd)
        want = (v * np.exp(-1j * tau * w)) @ v.conj().T
        devs.append(np.max(np.abs(trotter.plan_general(h, tau).step_unitary() - want)))
    assert devs[0] / devs[1] == pytest.approx(4.0, rel=0.2)
    assert devs[1] / devs[2] == pytest.approx(4.0, rel=0.2)


def test_single_factor_plan_is_exact_for_asymmetric_pattern():
    # pattern sort here is a 3-cycle, exercising the non-involutive case
    h = PauliTermSum(3, (PauliString(3, "XII", 0.9),))
    plan = trotter.plan_general(h, 0.2)
    hd = realize(h).dense()
    w, v = np.linalg.eigh(hd)
    want = (v * np.exp(-1j * 0.2 * w)) @ v.conj().T
    np.testing.assert_allclose(plan.step_unitary(), want, atol=1e-13)


def test_plan_general_factor_broadcast_matches_embedding():
    h = PauliTermSum(4, (PauliString(4, "IXXI", 0.8),))
    plan = trotter.plan_general(h, 0.1)
    (term,) = plan.terms
    full = trotter.factor_full_matrix(term, 4)
    np.testing.assert_allclose(full, realize(h).dense(), atol=1e-12)


def test_factor_gradient_matches_finite_difference():
    h0 = np.diag([0.5, -0.5]).astype(complex)
    hc = 0.5 * np.array([[0, 1], [1, 0]], dtype=complex)
    tau, b, h = 1e-3, 0.4, 1e-7
    g = trotter.trotter_factor_gradient(h0, hc, b, tau)

    def u(bb):
        w, v = np.linalg.eigh(h0 + bb * hc)
        return (v * np.exp(-1j * tau * w)) @ v.conj().T

    fd = (u(b + h) - u(b - h)) / (2 * h)
    assert np.max(np.abs(g - fd)) < 10 * tau**2


def test_factor_gradient_bias_shrinks_with_tau():
    h0 = np.diag([0.5, -0.5]).astype(complex)
    hc = 0.5 * np.array([[0, 1], [1, 0]], dtype=complex)
    b, h = 0.4, 1e-7

    def bias(tau):
        g = trotter.trotter_factor_gradient(h0, hc, b, tau)

        def u(bb):
            w, v = np.linalg.eigh(h0 + bb * hc)
            return (v * np.exp(-1j * tau * w)) @ v.conj().T

        fd = (u(b + h) - u(b - h)) / (2 * h)
        return np.max(np.abs(g - fd))

    assert bias(0.1) / bias(0.05) == pytest.approx(4.0, rel=0.3)


def test_factor_gradient_zero_at_zero_tau():
    h0 = np.diag([0.5, -0.5]).astype(complex)
    hc = 0.5 * np.array([[0, 1], [1, 0]], dtype=complex)
    assert np.max(np.abs(trotter.trotter_factor_gradient(h0, hc, 0.1, 0.0))) == 0.0


def test_benchmark_controls_are_phase_staggered():
    cfg = model.ModelConfig(4, 1.0, (0.2,), "per-qubit")
    bx, by = trotter.benchmark_controls(cfg, 10, 0.05)
    t = (np.arange(10) + 0.5) * 0.05
    np.testing.assert_allclose(bx[:, 0], 0.05 * np.cos(t + 2 * np.pi / 4), atol=1e-14)
    np.testing.assert_allclose(by[:, 3], 0.05 * np.sin(t + 2 * np.pi), atol=1e-14)
