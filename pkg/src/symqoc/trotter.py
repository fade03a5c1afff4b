"""Symmetry-aware Lie-Trotter-Suzuki propagator factory.

Per-qubit controlled rings are split into n single-qubit factors plus the
constant diagonal coupling factor (applied tau/n at a time, interleaved);
each single-qubit factor is a 2x2 exponential broadcast over 2^(n-1)
identical blocks via the qubit-swap permutation.  A generic planner
decomposes any Pauli sum into factors keyed by letter pattern, each
exponentiating one 2^(n-l) template repeated 2^l times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import adjoint as adjoint_mod
from . import groups
from . import model as model_mod
from .pauli import OperatorMatrix, PauliString, PauliTermSum, realize

_SIGMA = {
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128),
}


def build_swap_adjoint(i: int, n: int) -> np.ndarray:
    """Fock-index map of the permutation swapping qubits i and n.

    The matrix is its own inverse; for i = n this is the identity map.
    """
    if not 1 <= i <= n:
        raise IndexError(f"site {i} out of range 1..{n}")
    perm = list(range(1, n + 1))
    perm[i - 1], perm[n - 1] = perm[n - 1], perm[i - 1]
    return groups.fock_index_map(groups.GroupElement(tuple(perm), ("p", -1)))


def swap_adjoint_matrix(i: int, n: int) -> OperatorMatrix:
    perm = list(range(1, n + 1))
    perm[i - 1], perm[n - 1] = perm[n - 1], perm[i - 1]
    return groups.index_permutation_matrix(groups.GroupElement(tuple(perm), ("p", -1)))


def expm_2x2(h: np.ndarray, tau: float) -> np.ndarray:
    """exp(-i tau H) for a 2x2 Hermitian H, in closed form."""
    c0 = 0.5 * (h[0, 0] + h[1, 1]).real
    vx = h[0, 1].real
    vy = -h[0, 1].imag
    vz = 0.5 * (h[0, 0] - h[1, 1]).real
    r = math.sqrt(vx * vx + vy * vy + vz * vz)
    phase = np.exp(-1j * tau * c0)
    if r < 1e-300:
        return phase * np.eye(2, dtype=np.complex128)
    c, s = math.cos(tau * r), math.sin(tau * r)
    nx, ny, nz = vx / r, vy / r, vz / r
    return phase * np.array(
        [
            [c - 1j * s * nz, -1j * s * (nx - 1j * ny)],
            [-1j * s * (nx + 1j * ny), c + 1j * s * nz],
        ]
    )


class PerQubitPlan:
    """The transformed Trotter plan for a ring with per-qubit controls.

    One step applies, for i = n..1, the constant coupling factor
    exp(-i (tau/n) H_cpl) followed by the swap-transformed single-qubit
    factor for qubit i.  The coupling factor and swap maps are precomputed
    once; only n 2x2 exponentials are time dependent.
    """

    def __init__(self, cfg: model_mod.ModelConfig, tau: float,
                 strang: bool = False):
        if cfg.control_mode != "per-qubit":
            raise ValueError("per-qubit plan needs control_mode='per-qubit'")
        self.cfg = cfg
        self.n = cfg.n
        self.tau = tau
        self.strang = strang
        self.dim = 1 << cfg.n
        self.swap_maps = [build_swap_adjoint(i, cfg.n) for i in range(1, cfg.n + 1)]
        self.h0_2 = 0.5 * cfg.bz * _SIGMA["Z"]
        self.hx2 = 0.5 * _SIGMA["X"]
        self.hy2 = 0.5 * _SIGMA["Y"]
        if cfg.coupled:
            cpl = PauliTermSum(
                cfg.n,
                tuple(
                    model_mod.pauli_string_zz(cfg.n, i, k, 0.25 * c)
                    for k, c in enumerate(cfg.couplings, start=1)
                    if c != 0.0
                    for i in range(1, cfg.n + 1)
                ),
            )
            diag = realize(cpl).diagonal()
            self.cpl_phase = np.exp(-1j * (tau / cfg.n) * diag)
            self.cpl_phase_half = np.exp(-1j * (0.5 * tau / cfg.n) * diag)
        else:
            self.cpl_phase = None
            self.cpl_phase_half = None

    def factor_2x2(self, bx: float, by: float, tau: float | None = None) -> np.ndarray:
        return expm_2x2(
            self.h0_2 + bx * self.hx2 + by * self.hy2,
            self.tau if tau is None else tau,
        )

    def _apply_single(self, arr: np.ndarray, i: int, u: np.ndarray) -> np.ndarray:
        """A_i (I x u) A_i applied to a state or to the rows of a matrix."""
        perm = self.swap_maps[i - 1]
        a = arr[perm]
        if a.ndim == 1:
            a = (a.reshape(-1, 2) @ u.T).reshape(-1)
        else:
            a = np.einsum("ab,xbd->xad", u, a.reshape(-1, 2, a.shape[1])).reshape(a.shape)
        return a[perm]

    def _apply_coupling(self, arr: np.ndarray, phase) -> np.ndarray:
        if phase is None:
            return arr
        return arr * phase if arr.ndim == 1 else arr * phase[:, None]

    def apply_step(self, arr: np.ndarray, bx: np.ndarray, by: np.ndarray) -> np.ndarray:
        """One Trotter step applied to a state vector or unitary accumulator."""
        if len(bx) != self.n or len(by) != self.n:
            raise ValueError("need one control pair per qubit")
        if self.strang:
            # mirror half sweep, then forward half sweep (second-order splitting)
            half = 0.5 * self.tau
            for i in range(1, self.n + 1):
                arr = self._apply_single(
                    arr, i, self.factor_2x2(bx[i - 1], by[i - 1], half)
                )
                arr = self._apply_coupling(arr, self.cpl_phase_half)
            for i in range(self.n, 0, -1):
                arr = self._apply_coupling(arr, self.cpl_phase_half)
                arr = self._apply_single(
                    arr, i, self.factor_2x2(bx[i - 1], by[i - 1], half)
                )
            return arr
        for i in range(self.n, 0, -1):
            arr = self._apply_coupling(arr, self.cpl_phase)
            arr = self._apply_single(arr, i, self.factor_2x2(bx[i - 1], by[i - 1]))
        return arr

    def step_unitary(self, bx: np.ndarray, by: np.ndarray) -> np.ndarray:
        return self.apply_step(np.eye(self.dim, dtype=np.complex128), bx, by)


def plan_per_qubit_coupled(cfg: model_mod.ModelConfig, tau: float) -> PerQubitPlan:
    return PerQubitPlan(cfg, tau)


def benchmark_controls(cfg: model_mod.ModelConfig, n_steps: int, tau: float,
                       amplitude: float = 0.05):
    """Pinned per-qubit drive for fidelity replays: phase-staggered resonant tones."""
    t = (np.arange(n_steps) + 0.5) * tau
    n = cfg.n
    bx = np.empty((n_steps, n))
    by = np.empty((n_steps, n))
    for i in range(1, n + 1):
        phi = 2.0 * np.pi * i / n
        bx[:, i - 1] = amplitude * np.cos(cfg.bz * t + phi)
        by[:, i - 1] = amplitude * np.sin(cfg.bz * t + phi)
    return bx, by


def _sparse_model_parts(cfg: model_mod.ModelConfig):
    import scipy.sparse as sp

    h0 = sp.csr_matrix(realize(model_mod.static_hamiltonian(cfg)).dense())
    pairs = model_mod.control_hamiltonian_terms(cfg)
    hx = [sp.csr_matrix(realize(a).dense()) for a, _ in pairs]
    hy = [sp.csr_matrix(realize(b).dense()) for _, b in pairs]
    return h0, hx, hy


def _taylor_expm_apply(h_sparse, tau: float, b: np.ndarray,
                       tol: float = 1e-13) -> np.ndarray:
    """exp(-i tau H) B by a truncated Taylor series (tau * ||H|| must be small)."""
    out = b.astype(np.complex128, copy=True)
    term = out.copy()
    for k in range(1, 80):
        term = h_sparse.dot(term) * (-1j * tau / k)
        out += term
        if np.max(np.abs(term)) < tol * max(1.0, np.max(np.abs(out))):
            return out
    raise RuntimeError("Taylor series for the step exponential did not converge")


def fidelity_replay(cfg: model_mod.ModelConfig, tau: float, n_steps: int,
                    controls=None, record_every: int = 1,
                    strang: bool = False) -> np.ndarray:
    """Per-step unitary fidelities |Tr(K_exact^+ K_trotter)/2^n|^2.

    Tracks W = K_trotter K_exact^+ directly: each step right-multiplies by the
    inverse exact step (sparse Taylor applicator) and left-multiplies by the
    Trotter step, so the fidelity is read off the trace of W.
    """
    plan = PerQubitPlan(cfg, tau, strang=strang)
    if controls is None:
        bx, by = benchmark_controls(cfg, n_steps, tau)
    else:
        bx, by = controls
    h0, hx, hy = _sparse_model_parts(cfg)
    dim = 1 << cfg.n
    w_acc = np.eye(dim, dtype=np.complex128)
    fids = np.empty(-(-n_steps // record_every))
    out = 0
    for j in range(n_steps):
        h = h0.copy()
        for i in range(cfg.n):
            h = h + bx[j, i] * hx[i] + by[j, i] * hy[i]
        # W <- U_trotter (W U_exact^+); the right factor via a dagger sandwich
        w_acc = _taylor_expm_apply(h, tau, w_acc.conj().T).conj().T
        w_acc = plan.apply_step(w_acc, bx[j], by[j])
        if (j + 1) % record_every == 0 or j == n_steps - 1:
            fids[out] = abs(np.trace(w_acc)) ** 2 / dim**2
            out += 1
    return fids[:out]


def exact_step_unitary(cfg: model_mod.ModelConfig, bx: np.ndarray, by: np.ndarray,
                       tau: float) -> np.ndarray:
    """Reference propagator exp(-i tau (H0 + Hc'(t))) with per-qubit controls."""
    n = cfg.n
    h = realize(model_mod.static_hamiltonian(cfg)).dense().astype(np.complex128)
    pairs = model_mod.control_hamiltonian_terms(cfg)
    for i, (hx_i, hy_i) in enumerate(pairs):
        h = h + bx[i] * realize(hx_i).dense() + by[i] * realize(hy_i).dense()
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * tau * w)) @ v.conj().T


# ---------------------------------------------------------------------------
# Generic (G, I) factorization of an arbitrary Pauli sum
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrotterTerm:
    """One factor of the generic plan.

    ``perm_map`` sorts qubit indices so identity slots come first; the
    template acts on the trailing n - l slots and repeats 2^l times.  The
    symmetry refinement A_G (per-letter symmetric-group adjoints) and its
    block sizes are recorded for inspection.
    """

    label: str
    group: str
    sites: tuple[int, ...]
    l: int
    perm_map: np.ndarray | None
    template: np.ndarray  # Hermitian 2^(n-l) x 2^(n-l)
    repetitions: int
    refined_blocks: tuple[int, ...]
    is_diagonal: bool
    diag: np.ndarray | None = None


@dataclass(frozen=True)
class TrotterPlan:
    n: int
    tau: float
    terms: tuple[TrotterTerm, ...]

    @property
    def splitting_free(self) -> bool:
        return len(self.terms) <= 1

    def step_unitary(self) -> np.ndarray:
        """Dense product of the factor exponentials (verification scale)."""
        dim = 1 << self.n
        k = np.eye(dim, dtype=np.complex128)
        for term in self.terms:
            k = apply_factor(term, self.tau, k)
        return k


def _pattern_permutation(n: int, x_sites, y_sites, z_sites) -> tuple[np.ndarray, int]:
    """Fock map sending the pattern sites to the trailing slots (order X, Y, Z)."""
    support = list(x_sites) + list(y_sites) + list(z_sites)
    ident = [i for i in range(1, n + 1) if i not in set(support)]
    order = ident + support  # source site for each target slot 1..n
    perm = [0] * n
    for slot, site in enumerate(order, start=1):
        perm[site - 1] = slot
    e = groups.GroupElement(tuple(perm), ("p", -1))
    return groups.fock_index_map(e), len(ident)


def _refine_blocks(m: int, p: int, q: int, template: np.ndarray):
    """Block sizes of the template under A_{S_m} x A_{S_p} x A_{S_q}."""
    mats = []
    for count in (m, p, q):
        if count:
            mats.append(adjoint_mod.build_full_adjoint(count, "sn"))
    if not mats:
        return (1,) * template.shape[0], template
    a = mats[0].matrix.dense()
    sizes = list(mats[0].blocks.sizes)
    for extra in mats[1:]:
        a = np.kron(a, extra.matrix.dense())
        sizes = [s1 * s2 for s1 in sizes for s2 in extra.blocks.sizes]
    transformed = a.conj().T @ template @ a
    # the kron of block structures refines as the flat product above
    return tuple(sizes), transformed


def plan_general(h: PauliTermSum, tau: float) -> TrotterPlan:
    """Decompose a Pauli sum into symmetry-keyed Trotter factors.

    All diagonal (I/Z-only) terms merge into one exact diagonal factor; the
    remaining terms group by their (X-sites, Y-sites, Z-sites) pattern, each
    contributing one transformed template of dimension 2^(n-l).
    """
    n = h.n
    diag_terms = [t for t in h.terms if t.is_diagonal]
    other = [t for t in h.terms if not t.is_diagonal]
    factors = []
    if diag_terms:
        d = realize(PauliTermSum(n, tuple(diag_terms))).diagonal()
        factors.append(
            TrotterTerm(
                "diagonal",
                "dn" if any(len(t.support()) > 1 for t in diag_terms) else "sn",
                tuple(range(1, n + 1)),
                0,
                None,
                np.diag(d).astype(np.complex128),
                1,
                (len(d),),
                True,
                np.asarray(d, dtype=np.float64),
            )
        )
    patterns: dict[tuple, list[PauliString]] = {}
    for t in other:
        xs = tuple(i + 1 for i, c in enumerate(t.letters) if c == "X")
        ys = tuple(i + 1 for i, c in enumerate(t.letters) if c == "Y")
        zs = tuple(i + 1 for i, c in enumerate(t.letters) if c == "Z")
        patterns.setdefault((xs, ys, zs), []).append(t)
    for (xs, ys, zs), terms in sorted(patterns.items()):
        perm_map, l = _pattern_permutation(n, xs, ys, zs)
        m_, p_, q_ = len(xs), len(ys), len(zs)
        coeff = sum(t.coefficient for t in terms)
        small = np.array([[coeff]], dtype=np.complex128)
        for letter, count in (("X", m_), ("Y", p_), ("Z", q_)):
            for _ in range(count):
                small = np.kron(small, _SIGMA[letter])
        sizes, _ = _refine_blocks(m_, p_, q_, small)
        group_label = "x".join(
            f"S{c}" for c in (m_, p_, q_) if c
        ) or "S0"
        factors.append(
            TrotterTerm(
                f"pattern x={xs} y={ys} z={zs}",
                group_label,
                xs + ys + zs,
                l,
                perm_map,
                small,
                1 << l,
                sizes,
                False,
            )
        )
    return TrotterPlan(n, tau, tuple(factors))


def factor_full_matrix(term: TrotterTerm, n: int) -> np.ndarray:
    """The factor's transformed Hamiltonian embedded back in the full space."""
    if term.is_diagonal:
        return term.template
    big = np.kron(np.eye(1 << term.l, dtype=np.complex128), term.template)
    return big[np.ix_(term.perm_map, term.perm_map)]


def apply_factor(term: TrotterTerm, tau: float, arr: np.ndarray) -> np.ndarray:
    """exp(-i tau H_factor) applied to a state or matrix accumulator."""
    if term.is_diagonal:
        phase = np.exp(-1j * tau * term.diag)
        return arr * phase if arr.ndim == 1 else arr * phase[:, None]
    w, v = np.linalg.eigh(term.template)
    u_small = (v * np.exp(-1j * tau * w)) @ v.conj().T
    dsmall = u_small.shape[0]
    # the factor is A^+ exp(-i tau K) A with K = I (x) template and A the
    # pattern-sort permutation; A psi = psi[inv], A^+ t = t[perm_map]
    inv = np.empty_like(term.perm_map)
    inv[term.perm_map] = np.arange(len(term.perm_map))
    out = arr[inv] if arr.ndim == 1 else arr[inv, :]
    if out.ndim == 1:
        out = (out.reshape(-1, dsmall) @ u_small.T).reshape(-1)
    else:
        out = np.einsum(
            "ab,xbd->xad", u_small, out.reshape(-1, dsmall, out.shape[1])
        ).reshape(out.shape)
    return out[term.perm_map] if out.ndim == 1 else out[term.perm_map, :]


def trotter_factor_gradient(
    h0_t: np.ndarray, hc_t: np.ndarray, b: float, tau: float
) -> np.ndarray:
    """First-order derivative of exp(-i tau (H0~ + B Hc~)) w.r.t. B.

    Returns -i tau Hc~ exp(-i tau (H0~ + B Hc~)); the bias versus the exact
    derivative is O(tau^2).
    """
    h = h0_t + b * hc_t
    w, v = np.linalg.eigh(h)
    u = (v * np.exp(-1j * tau * w)) @ v.conj().T
    return -1j * tau * hc_t @ u
