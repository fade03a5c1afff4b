"""Adjoint matrices that block-diagonalize symmetric spin-ring Hamiltonians.

Columns are orthonormal symmetry-adapted basis vectors grouped contiguously
by block; block 1 always contains the all-up and all-down Fock states.  Two
production builders materialize only the first block (Dicke basis for S_n,
bracelet basis for D_n); full square adjoints are built for verification at
small n via Clebsch-Gordan recursion (S_n) or irrep projectors (D_n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import groups
from .pauli import DimensionError, MAX_QUBITS, OperatorMatrix

FULL_SN_MAX = 12  # dense 2^n x 2^n guard for the CG recursion
FULL_DN_MAX = 10  # projector + Gram-Schmidt path

GS_RANK_TOL = 1e-8  # discard projected vectors with smaller residual norm


@dataclass(frozen=True)
class BlockStructure:
    """Ordered block sizes of a transformed Hamiltonian."""

    sizes: tuple[int, ...]
    first_block_labels: tuple[str, ...] = ()

    @property
    def total(self) -> int:
        return sum(self.sizes)


@dataclass(frozen=True)
class AdjointMatrix:
    """Unitary (full) or isometric (first-block) basis-change matrix."""

    n: int
    group: str  # 'sn' | 'dn'
    mode: str  # 'full' | 'first-block'
    matrix: OperatorMatrix
    blocks: BlockStructure

    @property
    def dim(self) -> int:
        return 1 << self.n

    @property
    def ncols(self) -> int:
        return self.blocks.total if self.mode == "full" else self.blocks.sizes[0]

    def columns(self) -> np.ndarray:
        m = self.matrix.dense()
        return m

    def compress(self, op: OperatorMatrix) -> np.ndarray:
        """A† H A as a dense ncols x ncols array."""
        a = self.matrix.sparse()
        return np.asarray((a.conj().T @ op.sparse() @ a).todense())

    def to_block_coords(self, psi: np.ndarray) -> np.ndarray:
        return self.matrix.sparse().conj().T @ psi

    def from_block_coords(self, phi: np.ndarray) -> np.ndarray:
        return self.matrix.sparse() @ phi


def _weight(x: int) -> int:
    return bin(x).count("1")


def build_dicke_first_block(n: int) -> AdjointMatrix:
    """Columns M = 0..n: uniform superpositions of all states with M down spins."""
    if not 1 <= n <= MAX_QUBITS:
        raise DimensionError(f"n={n} outside supported range [1, {MAX_QUBITS}]")
    dim = 1 << n
    rows, cols, data = [], [], []
    for x in range(dim):
        m = _weight(x)
        rows.append(x)
        cols.append(m)
        data.append(1.0 / math.sqrt(math.comb(n, m)))
    mat = sp.coo_matrix((data, (rows, cols)), shape=(dim, n + 1))
    labels = tuple(f"dicke M={m}" for m in range(n + 1))
    return AdjointMatrix(
        n,
        "sn",
        "first-block",
        OperatorMatrix.from_sparse(mat),
        BlockStructure((n + 1,), labels),
    )


def _dihedral_orbit(x: int, n: int) -> frozenset[int]:
    """All rotation/reflection images of the bit string x of length n."""
    mask = (1 << n) - 1
    images = set()
    for m in range(n):
        r = ((x << m) | (x >> (n - m))) & mask
        images.add(r)
        # bit reversal of the rotated string
        rev = int(format(r, f"0{n}b")[::-1], 2)
        images.add(rev)
    return frozenset(images)


def enumerate_bracelets(n: int) -> list[frozenset[int]]:
    """D_n orbits of length-n bit strings, by (Hamming weight, canonical rep)."""
    seen = set()
    orbits = []
    for x in range(1 << n):
        if x in seen:
            continue
        orb = _dihedral_orbit(x, n)
        seen |= orb
        orbits.append(orb)
    orbits.sort(key=lambda o: (_weight(min(o)), min(o)))
    return orbits


def build_bracelet_first_block(n: int) -> AdjointMatrix:
    """Columns: normalized uniform superpositions over binary-bracelet orbits."""
    if not 3 <= n <= MAX_QUBITS:
        raise DimensionError(f"n={n} outside supported range [3, {MAX_QUBITS}]")
    dim = 1 << n
    orbits = enumerate_bracelets(n)
    rows, cols, data = [], [], []
    labels = []
    for c, orb in enumerate(orbits):
        w = 1.0 / math.sqrt(len(orb))
        for x in sorted(orb):
            rows.append(x)
            cols.append(c)
            data.append(w)
        labels.append(f"bracelet {min(orb):0{n}b}")
    mat = sp.coo_matrix((data, (rows, cols)), shape=(dim, len(orbits)))
    return AdjointMatrix(
        n,
        "dn",
        "first-block",
        OperatorMatrix.from_sparse(mat),
        BlockStructure((len(orbits),), tuple(labels)),
    )


def _cg_full_sn(n: int) -> tuple[np.ndarray, list[int], list[str]]:
    """Full S_n-adapted basis by iterated spin-1/2 coupling.

    Multiplets are kept separate through the recursion; the returned columns
    are grouped by multiplet, multiplets ordered by descending total spin so
    the maximal-spin (Dicke) multiplet comes first.
    """
    up = np.array([1.0, 0.0])
    down = np.array([0.0, 1.0])
    # each multiplet: (two_j, [vectors indexed by two_m from +two_j down to -two_j])
    multiplets = [(1, [up, down])]
    for _ in range(n - 1):
        nxt = []
        for two_j, vecs in multiplets:
            dim = vecs[0].shape[0]
            norm = 2.0 * (two_j + 1)
            # J = j + 1/2 branch: |J, M> = a |j, M-1/2>|up> + b |j, M+1/2>|down>
            plus = []
            for idx in range(two_j + 2):
                two_m = two_j + 1 - 2 * idx
                v = np.zeros(2 * dim)
                if idx <= two_j:
                    v += math.sqrt((two_j + two_m + 1) / norm) * np.kron(vecs[idx], up)
                if idx >= 1:
                    v += math.sqrt((two_j - two_m + 1) / norm) * np.kron(vecs[idx - 1], down)
                plus.append(v)
            nxt.append((two_j + 1, plus))
            # J = j - 1/2 branch: |J, M> = -a'|j, M-1/2>|up> + b'|j, M+1/2>|down>
            if two_j >= 1:
                minus = []
                for idx in range(two_j):
                    two_m = two_j - 1 - 2 * idx
                    v = -math.sqrt((two_j - two_m + 1) / norm) * np.kron(vecs[idx + 1], up)
                    v += math.sqrt((two_j + two_m + 1) / norm) * np.kron(vecs[idx], down)
                    minus.append(v)
                nxt.append((two_j - 1, minus))
        multiplets = nxt
    multiplets.sort(key=lambda t: -t[0])
    cols = []
    sizes = []
    for _, vecs in multiplets:
        sizes.append(len(vecs))
        cols.extend(vecs)
    labels = [f"dicke M={m}" for m in range(multiplets[0][0] + 1)]
    return np.column_stack(cols), sizes, labels


def _dn_full_projected(n: int) -> tuple[np.ndarray, list[int], list[str]]:
    """Full D_n-adapted basis from matrix-element projectors + Gram-Schmidt."""
    table = groups.build_irrep_table("dn", n)
    dim = 1 << n
    order = sorted(range(dim), key=lambda x: (_weight(x), x))
    cols = []
    sizes = []
    for ir in table.irreps:
        for j in range(1, ir.dim + 1):
            proj = groups.build_projector(table, ir.label, j).matrix.sparse()
            block_cols = []
            for x in order:
                v = np.asarray(proj[:, x].todense()).ravel().astype(np.complex128)
                for u in block_cols:
                    v -= (u.conj() @ v) * u
                nrm = np.linalg.norm(v)
                if nrm > GS_RANK_TOL:
                    block_cols.append(v / nrm)
            if block_cols:
                sizes.append(len(block_cols))
                cols.extend(block_cols)
    labels = [f"bracelet {min(o):0{n}b}" for o in enumerate_bracelets(n)]
    return np.column_stack(cols), sizes, labels


def build_full_adjoint(n: int, group: str) -> AdjointMatrix:
    """Square unitary adjoint with recorded block sizes (verification path)."""
    group = group.lower()
    if group == "sn":
        if not 1 <= n <= FULL_SN_MAX:
            raise DimensionError(f"full S_n adjoint limited to n <= {FULL_SN_MAX}")
        mat, sizes, labels = _cg_full_sn(n)
    elif group == "dn":
        if not 3 <= n <= FULL_DN_MAX:
            raise DimensionError(f"full D_n adjoint limited to 3 <= n <= {FULL_DN_MAX}")
        mat, sizes, labels = _dn_full_projected(n)
    else:
        raise ValueError(f"unknown group {group!r}")
    if sum(sizes) != 1 << n:
        raise AssertionError("rank deficiency: adjoint columns do not span the space")
    return AdjointMatrix(
        n,
        group,
        "full",
        OperatorMatrix.from_dense(mat),
        BlockStructure(tuple(sizes), tuple(labels)),
    )


def transform(h: OperatorMatrix, a: AdjointMatrix) -> OperatorMatrix:
    """A† H A: the full conjugation or the first-block compression."""
    if h.dim != a.dim:
        raise DimensionError(f"operator dim {h.dim} vs adjoint dim {a.dim}")
    return OperatorMatrix.from_dense(a.compress(h))


@dataclass(frozen=True)
class BlockReport:
    sizes: tuple[int, ...]
    max_off_block: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_off_block <= self.tol


def verify_block_structure(
    m: OperatorMatrix, blocks: BlockStructure, tol: float = 1e-10
) -> BlockReport:
    """Report the largest matrix element outside the declared blocks."""
    if blocks.total != m.dim:
        raise DimensionError("block sizes do not sum to the matrix dimension")
    dense = m.dense()
    mask = np.ones_like(dense, dtype=bool)
    start = 0
    for s in blocks.sizes:
        mask[start : start + s, start : start + s] = False
        start += s
    off = np.abs(dense[mask])
    worst = float(off.max()) if off.size else 0.0
    return BlockReport(blocks.sizes, worst, tol)


def export_block_structure(blocks: BlockStructure, path) -> None:
    with open(path, "w") as fh:
        fh.write("block sizes: " + " ".join(map(str, blocks.sizes)) + "\n")
        for lab in blocks.first_block_labels:
            fh.write(lab + "\n")
