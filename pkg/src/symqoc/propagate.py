"""Exact time evolution with piecewise-constant controls.

Matrix exponentials go through the Hermitian eigendecomposition, which keeps
every propagator factor unitary to machine precision and lets the optimizer
reuse the eigen-pairs for exact gradients.  Controls are sampled at step
midpoints (j + 1/2) * tau.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import adjoint as adjoint_mod
from . import model as model_mod
from .pauli import DimensionError, OperatorMatrix, realize

NORM_TOL = 1e-10
BLOCK_SUPPORT_TOL = 1e-12

BACKENDS = ("full", "first-block-s", "first-block-d")


@dataclass(frozen=True)
class TimeGrid:
    """Total duration T split into N equal steps of length tau = T/N."""

    T: float
    N: int

    def __post_init__(self):
        if self.N < 0 or (self.N > 0 and self.T <= 0):
            raise ValueError("need T > 0 and N >= 0")

    @property
    def tau(self) -> float:
        return self.T / self.N if self.N else 0.0

    def midpoints(self) -> np.ndarray:
        return (np.arange(self.N) + 0.5) * self.tau


def normalize(psi: np.ndarray) -> np.ndarray:
    return psi / np.linalg.norm(psi)


def expm_hermitian(h: OperatorMatrix | np.ndarray, scale: float):
    """exp(-i * scale * H) for Hermitian H, plus the (eigvals, eigvecs) cache."""
    m = h.dense() if isinstance(h, OperatorMatrix) else np.asarray(h)
    w, v = np.linalg.eigh(m)
    u = (v * np.exp(-1j * scale * w)) @ v.conj().T
    return OperatorMatrix.from_dense(u), (w, v)


class Backend:
    """Concrete matrices for one propagation space (full or first-block)."""

    def __init__(self, cfg: model_mod.ModelConfig, kind: str):
        if kind not in BACKENDS:
            raise ValueError(f"unknown backend {kind!r}")
        if kind == "first-block-s" and cfg.coupled:
            raise ValueError("coupled models break S_n symmetry; use first-block-d")
        self.kind = kind
        self.cfg = cfg
        h0 = realize(model_mod.static_hamiltonian(cfg))
        if cfg.control_mode != "global":
            raise ValueError("propagation backends expect global controls")
        hx_sum, hy_sum = model_mod.control_hamiltonian_terms(cfg)
        hx, hy = realize(hx_sum), realize(hy_sum)
        if kind == "full":
            self.block = None
            self.h0 = h0.dense().astype(np.complex128)
            self.hx = hx.dense().astype(np.complex128)
            self.hy = hy.dense().astype(np.complex128)
        else:
            builder = (
                adjoint_mod.build_dicke_first_block
                if kind == "first-block-s"
                else adjoint_mod.build_bracelet_first_block
            )
            self.block = builder(cfg.n)
            self.h0 = self.block.compress(h0)
            self.hx = self.block.compress(hx)
            self.hy = self.block.compress(hy)
        self.dim = self.h0.shape[0]

    def hamiltonian(self, bx: float, by: float) -> np.ndarray:
        return self.h0 + bx * self.hx + by * self.hy

    def encode(self, psi_full: np.ndarray) -> np.ndarray:
        """Map a full-space state into this backend's coordinates."""
        if self.block is None:
            return np.asarray(psi_full, dtype=np.complex128)
        phi = self.block.to_block_coords(np.asarray(psi_full, dtype=np.complex128))
        if abs(np.linalg.norm(phi) - np.linalg.norm(psi_full)) > BLOCK_SUPPORT_TOL * max(
            1.0, np.linalg.norm(psi_full)
        ):
            raise ValueError("state has support outside the first block")
        return phi

    def decode(self, phi: np.ndarray) -> np.ndarray:
        if self.block is None:
            return phi
        return self.block.from_block_coords(phi)

    def basis_state(self, label: str) -> np.ndarray:
        """'all-up' or 'all-down' in backend coordinates."""
        psi = np.zeros(self.dim, dtype=np.complex128)
        if self.block is None:
            idx = 0 if label == "all-up" else (1 << self.cfg.n) - 1
        else:
            idx = 0 if label == "all-up" else self.dim - 1
        psi[idx] = 1.0
        return psi


def step(
    psi: np.ndarray,
    backend: Backend,
    bx: float,
    by: float,
    tau: float,
) -> np.ndarray:
    """One midpoint-sampled propagation step exp(-i tau (H0 + Hc)) psi."""
    if psi.shape[0] != backend.dim:
        raise DimensionError("state dimension does not match backend")
    u, _ = expm_hermitian(backend.hamiltonian(bx, by), tau)
    out = u.apply(psi)
    if abs(np.linalg.norm(out) - 1.0) > NORM_TOL and abs(np.linalg.norm(psi) - 1.0) < NORM_TOL:
        raise FloatingPointError("propagation step lost normalization")
    return out


def propagate_all(
    psi0: np.ndarray,
    bx: np.ndarray,
    by: np.ndarray,
    backend: Backend,
    tau: float,
    keep_trajectory: bool = False,
):
    """Propagate through all steps; optionally keep the per-step states.

    Returns (final state, trajectory) where trajectory[j] is the state before
    step j (trajectory[0] = psi0), or None when not requested.
    """
    n_steps = len(bx)
    if len(by) != n_steps:
        raise ValueError("Bx and By must have equal length")
    psi = np.asarray(psi0, dtype=np.complex128)
    traj = [psi.copy()] if keep_trajectory else None
    for j in range(n_steps):
        u, _ = expm_hermitian(backend.hamiltonian(bx[j], by[j]), tau)
        psi = u.apply(psi)
        if keep_trajectory:
            traj.append(psi.copy())
    return psi, traj


def unitary_fidelity(ka: np.ndarray, kb: np.ndarray) -> float:
    """F = |Tr(Ka† Kb) / dim|^2, invariant under a global phase."""
    ka = np.asarray(ka)
    kb = np.asarray(kb)
    if ka.shape != kb.shape:
        raise DimensionError("unitaries must share a dimension")
    return float(abs(np.trace(ka.conj().T @ kb) / ka.shape[0]) ** 2)


def export_trajectory_csv(traj, tau: float, path, populations_only: bool = False):
    """Trajectory CSV: step, time, then amplitude pairs or populations."""
    with open(path, "w") as fh:
        dim = traj[0].shape[0]
        if populations_only:
            header = ["step", "time"] + [f"p{k}" for k in range(dim)]
        else:
            header = ["step", "time"]
            for k in range(dim):
                header += [f"re{k}", f"im{k}"]
        fh.write(",".join(header) + "\n")
        for j, psi in enumerate(traj):
            row = [str(j), f"{j * tau:.17g}"]
            if populations_only:
                row += [f"{abs(a) ** 2:.17g}" for a in psi]
            else:
                for a in psi:
                    row += [f"{a.real:.17g}", f"{a.imag:.17g}"]
            fh.write(",".join(row) + "\n")
