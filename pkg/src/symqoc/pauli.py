"""Symbolic Pauli-string algebra and its realization as concrete matrices.

Conventions: site 1 is the most significant bit of the Fock index, spin-up is
bit 0, so the all-up state is the first basis vector.  All coefficients are
real (Hamiltonians here are real-weighted; the Pauli letter Y carries the
imaginary structure inside the matrix).  Atomic units with hbar = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

MAX_QUBITS = 14

# fill fraction below which realized matrices are stored in coordinate form
SPARSE_FILL_THRESHOLD = 0.10

_LETTERS = frozenset("IXYZ")


class DimensionError(ValueError):
    """Qubit count or matrix dimension outside the supported range."""


@dataclass(frozen=True)
class PauliString:
    """One weighted tensor-product Pauli string, e.g. 0.5 * 'IXZI'."""

    n: int
    letters: str
    coefficient: float = 1.0

    def __post_init__(self):
        if len(self.letters) != self.n:
            raise ValueError(f"letters {self.letters!r} must have length n={self.n}")
        bad = set(self.letters) - _LETTERS
        if bad:
            raise ValueError(f"unknown Pauli letters {sorted(bad)}")

    @property
    def is_diagonal(self) -> bool:
        return set(self.letters) <= {"I", "Z"}

    def support(self) -> tuple[int, ...]:
        """1-based site indices with a non-identity letter."""
        return tuple(i + 1 for i, c in enumerate(self.letters) if c != "I")


@dataclass(frozen=True)
class PauliTermSum:
    """A real-weighted sum of Pauli strings on a fixed number of qubits."""

    n: int
    terms: tuple[PauliString, ...] = ()

    def __post_init__(self):
        for t in self.terms:
            if t.n != self.n:
                raise ValueError("all terms must share the same qubit count")
        object.__setattr__(self, "terms", tuple(self.terms))

    def __add__(self, other: "PauliTermSum") -> "PauliTermSum":
        if other.n != self.n:
            raise ValueError("qubit counts differ")
        return PauliTermSum(self.n, self.terms + other.terms)

    def scaled(self, factor: float) -> "PauliTermSum":
        return PauliTermSum(
            self.n,
            tuple(PauliString(t.n, t.letters, t.coefficient * factor) for t in self.terms),
        )

    @property
    def is_diagonal(self) -> bool:
        return all(t.is_diagonal for t in self.terms)


@dataclass(frozen=True)
class OperatorMatrix:
    """A dim x dim operator with an explicit storage-kind tag.

    storage 'dense'    -> data is a (dim, dim) ndarray
    storage 'diagonal' -> data is a length-dim ndarray of diagonal entries
    storage 'coo'      -> data is a scipy sparse matrix
    """

    dim: int
    storage: str
    data: object = field(repr=False)

    def __post_init__(self):
        if self.storage not in ("dense", "diagonal", "coo"):
            raise ValueError(f"unknown storage kind {self.storage!r}")

    @classmethod
    def from_dense(cls, m: np.ndarray) -> "OperatorMatrix":
        m = np.asarray(m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("matrix must be square")
        return cls(m.shape[0], "dense", m)

    @classmethod
    def from_diagonal(cls, d: np.ndarray) -> "OperatorMatrix":
        d = np.asarray(d)
        return cls(d.shape[0], "diagonal", d)

    @classmethod
    def from_sparse(cls, m) -> "OperatorMatrix":
        m = sp.coo_matrix(m)
        return cls(m.shape[0], "coo", m)

    def dense(self) -> np.ndarray:
        if self.storage == "dense":
            return np.asarray(self.data)
        if self.storage == "diagonal":
            return np.diag(np.asarray(self.data))
        return np.asarray(self.data.todense())

    def sparse(self):
        """The operator as a scipy CSR matrix."""
        if self.storage == "coo":
            return sp.csr_matrix(self.data)
        if self.storage == "diagonal":
            return sp.diags(np.asarray(self.data)).tocsr()
        return sp.csr_matrix(np.asarray(self.data))

    def diagonal(self) -> np.ndarray:
        if self.storage == "diagonal":
            return np.asarray(self.data)
        if self.storage == "coo":
            return np.asarray(self.data.tocsr().diagonal())
        return np.diag(np.asarray(self.data))

    def apply(self, vec: np.ndarray) -> np.ndarray:
        if vec.shape[0] != self.dim:
            raise DimensionError(f"vector of length {vec.shape[0]} vs dim {self.dim}")
        if self.storage == "diagonal":
            return np.asarray(self.data) * vec
        if self.storage == "coo":
            return self.sparse() @ vec
        return np.asarray(self.data) @ vec

    def hermiticity_defect(self) -> float:
        """Max elementwise deviation from the conjugate transpose."""
        if self.storage == "diagonal":
            return float(np.max(np.abs(np.imag(np.asarray(self.data)))))
        m = self.sparse()
        d = m - m.conj().T
        return float(np.max(np.abs(d.data))) if d.nnz else 0.0

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return self.hermiticity_defect() <= tol


def _bit(x: np.ndarray, n: int, site: int) -> np.ndarray:
    """Bit of Fock indices x at 1-based site (site 1 = MSB); 1 means spin-down."""
    return (x >> (n - site)) & 1


def _string_action(term: PauliString):
    """Column action of one Pauli string: rows, columns and complex weights.

    Every Pauli string is a generalized permutation: column x maps to row
    x ^ flipmask with a phase determined by the Z/Y letters.
    """
    n = term.n
    dim = 1 << n
    cols = np.arange(dim, dtype=np.int64)
    flipmask = 0
    phase = np.full(dim, term.coefficient, dtype=np.complex128)
    for site, letter in enumerate(term.letters, start=1):
        if letter == "I":
            continue
        b = _bit(cols, n, site)
        if letter == "Z":
            phase = phase * (1.0 - 2.0 * b)
        elif letter == "X":
            flipmask |= 1 << (n - site)
        elif letter == "Y":
            flipmask |= 1 << (n - site)
            # sigma_y |up> = i |down>,  sigma_y |down> = -i |up>
            phase = phase * (1j - 2j * b)
    rows = cols ^ flipmask
    return rows, cols, phase


def realize(term_sum: PauliTermSum) -> OperatorMatrix:
    """Realize a Pauli term sum as a concrete 2^n x 2^n matrix.

    Storage is auto-selected: diagonal for pure-{I, Z} sums, coordinate form
    for sparse sums (fill <= 10%), dense otherwise.
    """
    n = term_sum.n
    if not 1 <= n <= MAX_QUBITS:
        raise DimensionError(f"n={n} outside supported range [1, {MAX_QUBITS}]")
    dim = 1 << n
    if term_sum.is_diagonal:
        diag = np.zeros(dim, dtype=np.float64)
        for t in term_sum.terms:
            _, cols, phase = _string_action(t)
            diag[cols] += phase.real
        return OperatorMatrix.from_diagonal(diag)
    rows, cols, data = [], [], []
    for t in term_sum.terms:
        r, c, p = _string_action(t)
        rows.append(r)
        cols.append(c)
        data.append(p)
    if not rows:
        return OperatorMatrix.from_diagonal(np.zeros(dim))
    m = sp.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    )
    m.sum_duplicates()
    if m.nnz <= SPARSE_FILL_THRESHOLD * dim * dim:
        return OperatorMatrix.from_sparse(m)
    return OperatorMatrix.from_dense(np.asarray(m.todense()))


def embed_single(n: int, i: int, alpha: str) -> OperatorMatrix:
    """The 2^n x 2^n realization of sigma_alpha acting on site i."""
    if not 1 <= n <= MAX_QUBITS:
        raise DimensionError(f"n={n} outside supported range [1, {MAX_QUBITS}]")
    if not 1 <= i <= n:
        raise IndexError(f"site index {i} out of range 1..{n}")
    alpha = alpha.lower()
    if alpha not in ("x", "y", "z"):
        raise ValueError(f"axis must be x, y or z, got {alpha!r}")
    letters = "".join(alpha.upper() if k == i else "I" for k in range(1, n + 1))
    return realize(PauliTermSum(n, (PauliString(n, letters),)))


def embed_pair_zz(n: int, i: int, offset: int) -> OperatorMatrix:
    """sigma_z^(i) sigma_z^(i+offset) with periodic wraparound on the ring."""
    if not 1 <= n <= MAX_QUBITS:
        raise DimensionError(f"n={n} outside supported range [1, {MAX_QUBITS}]")
    if not 1 <= i <= n:
        raise IndexError(f"site index {i} out of range 1..{n}")
    if offset < 1 or offset >= n:
        raise ValueError(f"offset must be in 1..{n - 1}, got {offset}")
    j = (i + offset - 1) % n + 1
    letters = "".join("Z" if k in (i, j) else "I" for k in range(1, n + 1))
    return realize(PauliTermSum(n, (PauliString(n, letters),)))


def pauli_string_zz(n: int, i: int, offset: int, coefficient: float = 1.0) -> PauliString:
    """The symbolic string behind :func:`embed_pair_zz`."""
    j = (i + offset - 1) % n + 1
    letters = "".join("Z" if k in (i, j) else "I" for k in range(1, n + 1))
    return PauliString(n, letters, coefficient)


def export_coo(op: OperatorMatrix, path) -> None:
    """Write an operator in the plain-text coordinate format.

    Header line ``dim nnz`` followed by ``row col re im`` lines (0-based).
    """
    m = sp.coo_matrix(op.sparse())
    m.sum_duplicates()
    with open(path, "w") as fh:
        fh.write(f"{op.dim} {m.nnz}\n")
        for r, c, v in zip(m.row, m.col, m.data):
            fh.write(f"{r} {c} {v.real:.17g} {v.imag:.17g}\n")


def import_coo(path) -> OperatorMatrix:
    """Read an operator written by :func:`export_coo`."""
    with open(path) as fh:
        header = fh.readline().split()
        dim, nnz = int(header[0]), int(header[1])
        rows = np.empty(nnz, dtype=np.int64)
        cols = np.empty(nnz, dtype=np.int64)
        data = np.empty(nnz, dtype=np.complex128)
        for k in range(nnz):
            parts = fh.readline().split()
            rows[k] = int(parts[0])
            cols[k] = int(parts[1])
            data[k] = float(parts[2]) + 1j * float(parts[3])
    m = sp.coo_matrix((data, (rows, cols)), shape=(dim, dim))
    return OperatorMatrix.from_sparse(m)
