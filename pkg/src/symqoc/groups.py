"""Finite-group machinery for qubit-index symmetries.

S_n and D_n elements act on qubit indices (not on physical positions); the
induced action on the Fock basis permutes tensor slots.  Irreducible
representations are realized explicitly: the standard real forms for D_n and
the Young orthogonal representation for S_n.  Group-algebra operators built
from irrep diagonal entries yield the matrix-element projectors used to
generate symmetry-adapted bases.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .pauli import OperatorMatrix

MAX_SN_ENUMERATION = 8  # 8! = 40320 elements

# Projector normalization d/|G| makes idempotency exact; the bare
# group-algebra operator differs only by this scale.


@dataclass(frozen=True)
class GroupElement:
    """A permutation of qubit indices 1..n with a structural tag.

    ``perm[i-1]`` is the image of site i.  Tags are ``("r", m)`` for the
    rotation by m, ``("s", m)`` for reflection-after-rotation, and
    ``("p", k)`` for a general permutation (k = enumeration index).
    """

    perm: tuple[int, ...]
    tag: tuple[str, int]

    def __post_init__(self):
        n = len(self.perm)
        if sorted(self.perm) != list(range(1, n + 1)):
            raise ValueError(f"perm {self.perm} is not a bijection on 1..{n}")

    @property
    def n(self) -> int:
        return len(self.perm)

    def __call__(self, i: int) -> int:
        return self.perm[i - 1]

    def compose(self, other: "GroupElement") -> "GroupElement":
        """self after other: (self*other)(i) = self(other(i))."""
        perm = tuple(self.perm[other.perm[i] - 1] for i in range(self.n))
        return GroupElement(perm, ("p", -1))

    def inverse(self) -> "GroupElement":
        inv = [0] * self.n
        for i, j in enumerate(self.perm, start=1):
            inv[j - 1] = i
        return GroupElement(tuple(inv), ("p", -1))


def identity_element(n: int) -> GroupElement:
    return GroupElement(tuple(range(1, n + 1)), ("r", 0))


def rotation_element(n: int, m: int) -> GroupElement:
    """Cyclic shift i -> i + m (mod n)."""
    perm = tuple((i - 1 + m) % n + 1 for i in range(1, n + 1))
    return GroupElement(perm, ("r", m % n))


def reflection_element(n: int, m: int) -> GroupElement:
    """s * r^m where s is the reversal i -> n + 1 - i."""
    perm = tuple(n - (i - 1 + m) % n for i in range(1, n + 1))
    return GroupElement(perm, ("s", m % n))


def enumerate_group(group: str, n: int) -> list[GroupElement]:
    """All elements of S_n or D_n, identity first.

    D_n requires n >= 3 (D_1 and D_2 are degenerate as index groups); S_n
    enumeration is guarded at n <= 8.
    """
    group = group.lower()
    if group == "dn":
        if n < 3:
            raise ValueError("D_n requires n >= 3")
        rots = [rotation_element(n, m) for m in range(n)]
        refls = [reflection_element(n, m) for m in range(n)]
        return rots + refls
    if group == "sn":
        if n > MAX_SN_ENUMERATION:
            raise ValueError(f"S_n enumeration limited to n <= {MAX_SN_ENUMERATION}")
        elems = []
        for k, p in enumerate(itertools.permutations(range(1, n + 1))):
            elems.append(GroupElement(p, ("p", k)))
        return elems
    raise ValueError(f"unknown group {group!r} (expected 'sn' or 'dn')")


def fock_index_map(e: GroupElement) -> np.ndarray:
    """Image of every Fock index under the slot permutation of e.

    The bit at slot e(i) of the image equals the bit at slot i of the source
    (site 1 is the most significant bit).
    """
    n = e.n
    x = np.arange(1 << n, dtype=np.int64)
    y = np.zeros_like(x)
    for i in range(1, n + 1):
        bit = (x >> (n - i)) & 1
        y |= bit << (n - e(i))
    return y


def index_permutation_matrix(e: GroupElement) -> OperatorMatrix:
    """The 2^n x 2^n 0/1 matrix permuting Fock states by tensor slots."""
    n = e.n
    dim = 1 << n
    y = fock_index_map(e)
    m = sp.coo_matrix((np.ones(dim), (y, np.arange(dim))), shape=(dim, dim))
    return OperatorMatrix.from_sparse(m)


# ---------------------------------------------------------------------------
# Irreducible representations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Irrep:
    """One unitary irrep: label, dimension and a matrix for every element."""

    label: str
    dim: int

    def matrix(self, e: GroupElement) -> np.ndarray:
        raise NotImplementedError

    def diag(self, e: GroupElement) -> np.ndarray:
        return np.diag(self.matrix(e))


@dataclass(frozen=True)
class DihedralIrrep(Irrep):
    n: int
    kind: str  # 'trivial' | 'sign' | 'alt-rot' | 'alt-ref' | '2dim'
    k: int = 0  # angular index of the 2-dim irreps

    def matrix(self, e: GroupElement) -> np.ndarray:
        kind, m = e.tag
        if kind not in ("r", "s"):
            raise ValueError("dihedral irreps need tagged D_n elements")
        if self.kind == "trivial":
            return np.array([[1.0]])
        if self.kind == "sign":
            return np.array([[1.0 if kind == "r" else -1.0]])
        if self.kind == "alt-rot":
            return np.array([[(-1.0) ** m]])
        if self.kind == "alt-ref":
            v = (-1.0) ** m
            return np.array([[v if kind == "r" else -v]])
        theta = 2.0 * math.pi * self.k * m / self.n
        c, s = math.cos(theta), math.sin(theta)
        rot = np.array([[c, -s], [s, c]])
        if kind == "r":
            return rot
        return np.array([[1.0, 0.0], [0.0, -1.0]]) @ rot


def _partitions(n: int):
    """Partitions of n in reverse lexicographic order."""

    def gen(remaining, maximum):
        if remaining == 0:
            yield ()
            return
        for first in range(min(remaining, maximum), 0, -1):
            for rest in gen(remaining - first, first):
                yield (first,) + rest

    return list(gen(n, n))


def _standard_tableaux(shape: tuple[int, ...]):
    """All standard Young tableaux of the given shape.

    A tableau is a tuple of row tuples; entries 1..n increase along rows and
    down columns.
    """
    n = sum(shape)
    results = []

    def place(k, rows):
        if k > n:
            results.append(tuple(tuple(r) for r in rows))
            return
        for r, row in enumerate(rows):
            if len(row) < shape[r] and (r == 0 or len(rows[r - 1]) > len(row)):
                row.append(k)
                place(k + 1, rows)
                row.pop()

    place(1, [[] for _ in shape])
    return results


def _tableau_positions(tableau):
    pos = {}
    for r, row in enumerate(tableau):
        for c, entry in enumerate(row):
            pos[entry] = (r, c)
    return pos


@dataclass(frozen=True)
class SymmetricIrrep(Irrep):
    """Young orthogonal representation of S_n for one partition."""

    n: int
    shape: tuple[int, ...]

    def __post_init__(self):
        tableaux = _standard_tableaux(self.shape)
        object.__setattr__(self, "_tableaux", tableaux)
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(tableaux)})
        gens = [self._adjacent_matrix(k) for k in range(1, self.n)]
        object.__setattr__(self, "_gens", gens)

    def _adjacent_matrix(self, k: int) -> np.ndarray:
        """Matrix of the adjacent transposition (k, k+1)."""
        d = self.dim
        m = np.zeros((d, d))
        for idx, tab in enumerate(self._tableaux):
            pos = _tableau_positions(tab)
            r1, c1 = pos[k]
            r2, c2 = pos[k + 1]
            ax = (c2 - r2) - (c1 - r1)  # axial distance
            m[idx, idx] = 1.0 / ax
            swapped = tuple(
                tuple(k + 1 if e == k else k if e == k + 1 else e for e in row)
                for row in tab
            )
            if swapped in self._index:
                m[self._index[swapped], idx] = math.sqrt(1.0 - 1.0 / ax**2)
        return m

    def matrix(self, e: GroupElement) -> np.ndarray:
        m = np.eye(self.dim)
        # bubble-sort decomposition into adjacent transpositions
        perm = list(e.perm)
        for i in range(len(perm)):
            for j in range(len(perm) - 1 - i):
                if perm[j] > perm[j + 1]:
                    perm[j], perm[j + 1] = perm[j + 1], perm[j]
                    m = m @ self._gens[j]
        return m.T


@dataclass(frozen=True)
class IrrepTable:
    group: str
    n: int
    irreps: tuple[Irrep, ...]
    elements: tuple[GroupElement, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    def irrep(self, label: str) -> Irrep:
        for ir in self.irreps:
            if ir.label == label:
                return ir
        raise KeyError(f"no irrep labeled {label!r}")

    def dimension_check(self) -> bool:
        return sum(ir.dim**2 for ir in self.irreps) == self.order

    def dump(self) -> str:
        """Structured-text dump: irrep label, dim, element tag, diag entries."""
        lines = []
        for ir in self.irreps:
            for e in self.elements:
                diag = ", ".join(f"{v:.17g}" for v in ir.diag(e))
                lines.append(f"{ir.label}, {ir.dim}, {e.tag[0]}{e.tag[1]}, {diag}")
        return "\n".join(lines) + "\n"


@lru_cache(maxsize=32)
def build_irrep_table(group: str, n: int) -> IrrepTable:
    """Irrep table for S_n (Young orthogonal, n <= 8) or D_n (n >= 3)."""
    group = group.lower()
    elements = tuple(enumerate_group(group, n))
    if group == "dn":
        irreps: list[Irrep] = [
            DihedralIrrep("A1", 1, n, "trivial"),
            DihedralIrrep("A2", 1, n, "sign"),
        ]
        if n % 2 == 0:
            irreps.append(DihedralIrrep("B1", 1, n, "alt-rot"))
            irreps.append(DihedralIrrep("B2", 1, n, "alt-ref"))
        for k in range(1, (n - 1) // 2 + 1):
            irreps.append(DihedralIrrep(f"E{k}", 2, n, "2dim", k))
    else:
        irreps = []
        for shape in _partitions(n):
            label = "(" + ",".join(map(str, shape)) + ")"
            dim = len(_standard_tableaux(shape))
            irreps.append(SymmetricIrrep(label, dim, n, shape))
    table = IrrepTable(group, n, tuple(irreps), elements)
    if not table.dimension_check():
        raise AssertionError("irrep dimension law sum(d^2) = |G| violated")
    return table


@dataclass(frozen=True)
class ProjectorOperator:
    """Matrix-element projector P = (d/|G|) sum_e conj(A_jj(e)) M(e)."""

    group: str
    label: str
    j: int
    n: int
    matrix: OperatorMatrix


def build_projector(table: IrrepTable, label: str, j: int) -> ProjectorOperator:
    """The (irrep, j) projector on the 2^n Fock space, stored sparse."""
    ir = table.irrep(label)
    if not 1 <= j <= ir.dim:
        raise ValueError(f"diagonal index {j} out of range 1..{ir.dim}")
    n = table.n
    dim = 1 << n
    cols = np.arange(dim, dtype=np.int64)
    acc = sp.csr_matrix((dim, dim), dtype=np.float64)
    for e in table.elements:
        coeff = ir.diag(e)[j - 1]
        if abs(coeff) < 1e-15:
            continue
        rows = fock_index_map(e)
        acc = acc + sp.coo_matrix(
            (np.full(dim, coeff), (rows, cols)), shape=(dim, dim)
        ).tocsr()
    acc = acc * (ir.dim / table.order)
    return ProjectorOperator(table.group, label, j, n, OperatorMatrix.from_sparse(acc))


def all_projectors(table: IrrepTable) -> list[ProjectorOperator]:
    return [
        build_projector(table, ir.label, j)
        for ir in table.irreps
        for j in range(1, ir.dim + 1)
    ]
