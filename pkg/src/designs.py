"""
Combinatorial designs behind dual and 2-unitary gates.

A permutation gate P|ij⟩ = |k_ij l_ij⟩ carries two d×d tables K and L of
one-based symbols. A unitary whose columns are all product states carries
the quantum analogue: tables 𝒦 and 𝓛 of unit vectors with
U|ij⟩ = |𝒦_ij⟩ ⊗ |𝓛_ij⟩.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np

from .config import DEFAULT_SETTINGS
from .errors import EntangledColumn, NotAPermutation
from .linalg import RngStream, local_dim, realign
from .measures import DualityFlags

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PermutationGate:
    """
    Permutation of d² symbols in compact form: pi[r] is the one-based column
    of the single 1 in row r+1.
    """
    d: int
    pi: tuple[int, ...]

    def __post_init__(self):
        n = self.d * self.d
        if self.d < 2 or len(self.pi) != n or sorted(self.pi) != list(range(1, n + 1)):
            raise NotAPermutation(
                f"expected a bijection on 1..{n}, got {list(self.pi)}", 'PermutationGate')

    @classmethod
    def from_compact(cls, pi: Sequence[int]) -> 'PermutationGate':
        d = math.isqrt(len(pi))
        if d * d != len(pi):
            raise NotAPermutation(f"length {len(pi)} is not a perfect square", 'PermutationGate')
        return cls(d=d, pi=tuple(int(v) for v in pi))

    @classmethod
    def from_images(cls, d: int, image: Sequence[int]) -> 'PermutationGate':
        """Build from the zero-based map column c → row image[c]."""
        image = np.asarray(image)
        pi = np.empty(d * d, dtype=int)
        pi[image] = np.arange(d * d) + 1
        return cls(d=d, pi=tuple(int(v) for v in pi))

    @classmethod
    def from_dense(cls, M: np.ndarray, tol: float = 1e-12) -> 'PermutationGate':
        """
        Raises:
            NotAPermutation: M is not a 0/1 permutation matrix
        """
        M = np.asarray(M)
        d = local_dim(M, 'PermutationGate.from_dense')
        if not (np.all((np.abs(M) < tol) | (np.abs(M - 1) < tol))
                and np.allclose(np.abs(M).sum(axis=0), 1) and np.allclose(np.abs(M).sum(axis=1), 1)):
            raise NotAPermutation("matrix is not a 0/1 permutation matrix", 'PermutationGate.from_dense')
        return cls(d=d, pi=tuple(int(c) + 1 for c in np.argmax(np.abs(M), axis=1)))

    @classmethod
    def random(cls, d: int, rng: RngStream) -> 'PermutationGate':
        return cls(d=d, pi=tuple(int(v) + 1 for v in rng.generator.permutation(d * d)))

    @property
    def image(self) -> np.ndarray:
        """Zero-based column → row map: P|c⟩ = |image[c]⟩."""
        image = np.empty(self.d * self.d, dtype=int)
        image[np.asarray(self.pi) - 1] = np.arange(self.d * self.d)
        return image

    def dense(self) -> np.ndarray:
        return dense_permutation(self)

    def __str__(self) -> str:
        return '{' + ','.join(str(v) for v in self.pi) + '}'


def dense_permutation(P: Union[PermutationGate, Sequence[int]]) -> np.ndarray:
    """Real 0/1 matrix of a compact permutation."""
    if not isinstance(P, PermutationGate):
        P = PermutationGate.from_compact(P)
    n = P.d * P.d
    M = np.zeros((n, n))
    M[np.arange(n), np.asarray(P.pi) - 1] = 1.0
    return M


class LatinMode(Enum):
    ROW = 'row'
    COL = 'col'
    FULL = 'full'


@dataclass(frozen=True)
class DesignTable:
    """d×d table of one-based symbols."""
    entries: np.ndarray

    @property
    def d(self) -> int:
        return self.entries.shape[0]

    def row_latin(self) -> bool:
        return all(len(set(row)) == self.d for row in self.entries.tolist())

    def col_latin(self) -> bool:
        return all(len(set(col)) == self.d for col in self.entries.T.tolist())

    def __eq__(self, other) -> bool:
        return isinstance(other, DesignTable) and np.array_equal(self.entries, other.entries)

    def __hash__(self) -> int:
        return hash(self.entries.tobytes())


def permutation_to_KL(P: PermutationGate) -> tuple[DesignTable, DesignTable]:
    """K[i][j] and L[i][j] are the two base-d digits (one-based) of P's image of |ij⟩."""
    image = P.image.reshape(P.d, P.d)
    return DesignTable(image // P.d + 1), DesignTable(image % P.d + 1)


def ols_to_permutation(K: DesignTable, L: DesignTable) -> PermutationGate:
    """
    Permutation with the given K and L tables.

    Raises:
        NotAPermutation: some ordered pair (k, l) repeats
    """
    d = K.d
    image = ((K.entries - 1) * d + (L.entries - 1)).reshape(-1)
    if np.unique(image).size != d * d:
        raise NotAPermutation("the (K, L) pairs do not cover every symbol pair once", 'ols_to_permutation')
    return PermutationGate.from_images(d, image)


def latin_check(T: DesignTable, mode: Union[str, LatinMode] = LatinMode.FULL) -> bool:
    mode = LatinMode(mode)
    if mode is LatinMode.ROW:
        return T.row_latin()
    if mode is LatinMode.COL:
        return T.col_latin()
    return T.row_latin() and T.col_latin()


def ols_check(K: DesignTable, L: DesignTable) -> bool:
    """Both tables Latin and every ordered pair (k, l) distinct."""
    if not (latin_check(K) and latin_check(L)):
        return False
    pairs = set(zip(K.entries.reshape(-1).tolist(), L.entries.reshape(-1).tolist()))
    return len(pairs) == K.d * K.d


def _latin_violations(T: DesignTable, axis: int) -> int:
    lines = T.entries if axis == 0 else T.entries.T
    return sum(T.d - len(set(line)) for line in lines.tolist())


def permutation_duality(P: PermutationGate) -> DualityFlags:
    """
    Duality flags from K and L alone: dual iff K is r-Latin and L is
    c-Latin, T-dual iff K is c-Latin and L is r-Latin.

    The dual and T-dual defects are counts of repeated symbols, not norms.
    """
    K, L = permutation_to_KL(P)
    dual_defect = float(_latin_violations(K, 0) + _latin_violations(L, 1))
    t_dual_defect = float(_latin_violations(K, 1) + _latin_violations(L, 0))
    dense = P.dense()
    self_dual_defect = float(np.linalg.norm(realign(dense) - dense))
    return DualityFlags(
        dual=dual_defect == 0,
        t_dual=t_dual_defect == 0,
        two_unitary=dual_defect == 0 and t_dual_defect == 0,
        self_dual=self_dual_defect == 0,
        dual_defect=dual_defect,
        t_dual_defect=t_dual_defect,
        self_dual_defect=self_dual_defect,
    )


# ---------------------------------------------------------------------------
# Quantum designs

@dataclass(frozen=True)
class QuantumDesign:
    """
    Tables of unit vectors with U|ij⟩ = |𝒦_ij⟩ ⊗ |𝓛_ij⟩.

    k_side and l_side have shape (d, d, d): the last axis holds the vector.
    Cardinalities count distinct vectors up to phase at overlap_tol.
    """
    d: int
    k_side: np.ndarray
    l_side: np.ndarray
    cardinalities: tuple[int, int]
    dual: bool
    overlap_tol: float

    @property
    def classical(self) -> bool:
        return self.cardinalities == (self.d, self.d)


def _column_states(U: np.ndarray, d: int) -> np.ndarray:
    """(d², d, d) stack: column c of U as a d×d coefficient matrix."""
    return np.asarray(U).T.reshape(d * d, d, d)


def column_entanglements(U: np.ndarray) -> np.ndarray:
    """Linear entropy 1 − Tr ρ² of the first-factor reduced state of each column U|ij⟩."""
    d = local_dim(np.asarray(U), 'column_entanglements')
    states = _column_states(U, d)
    rho = states @ np.conj(np.swapaxes(states, 1, 2))
    purity = np.einsum('nij,nji->n', rho, rho).real
    return 1.0 - purity


def universal_entangler_candidate(U: np.ndarray, tol: Optional[float] = None) -> bool:
    """Every column entangled; necessary for a universal entangler, not sufficient."""
    tol = DEFAULT_SETTINGS.product_tol if tol is None else tol
    return bool(np.all(column_entanglements(U) > tol))


def count_distinct(vectors: np.ndarray, overlap_tol: Optional[float] = None) -> int:
    """Number of distinct unit vectors up to global phase."""
    overlap_tol = DEFAULT_SETTINGS.overlap_tol if overlap_tol is None else overlap_tol
    representatives: list[np.ndarray] = []
    for v in vectors:
        if not any(abs(np.vdot(w, v)) >= 1 - overlap_tol for w in representatives):
            representatives.append(v)
    return len(representatives)


def _orthonormal(vectors: np.ndarray, tol: float) -> bool:
    gram = vectors.conj() @ vectors.T
    return bool(np.linalg.norm(gram - np.eye(len(vectors))) <= tol)


def extract_quantum_design(U: np.ndarray, product_tol: Optional[float] = None,
                           overlap_tol: Optional[float] = None) -> QuantumDesign:
    """
    Factor every column of U into a product and collect the factors.

    Each column, reshaped to d×d, is split by its dominant singular pair.
    The design is dual when every 𝒦 row and every 𝓛 column is an
    orthonormal basis.

    Raises:
        EntangledColumn: some column has linear entropy above product_tol
    """
    product_tol = DEFAULT_SETTINGS.product_tol if product_tol is None else product_tol
    overlap_tol = DEFAULT_SETTINGS.overlap_tol if overlap_tol is None else overlap_tol
    U = np.asarray(U, dtype=complex)
    d = local_dim(U, 'extract_quantum_design')

    entropies = column_entanglements(U)
    bad = [divmod(c, d) for c in np.flatnonzero(entropies > product_tol)]
    if bad:
        raise EntangledColumn(bad)

    u, s, vh = np.linalg.svd(_column_states(U, d))
    k_side = u[:, :, 0].reshape(d, d, d)
    l_side = (s[:, :1] * vh[:, 0, :]).reshape(d, d, d)

    check_tol = 1e-8
    dual = (all(_orthonormal(k_side[i], check_tol) for i in range(d))
            and all(_orthonormal(l_side[:, j], check_tol) for j in range(d)))
    cardinalities = (count_distinct(k_side.reshape(-1, d), overlap_tol),
                     count_distinct(l_side.reshape(-1, d), overlap_tol))
    logger.info("quantum design d=%d: cardinalities %s, dual=%s", d, cardinalities, dual)
    return QuantumDesign(d=d, k_side=k_side, l_side=l_side,
                         cardinalities=cardinalities, dual=dual, overlap_tol=overlap_tol)


# ---------------------------------------------------------------------------
# Block conditions and AME coefficients

@dataclass(frozen=True)
class BlockDecomposition:
    """U = Σ |i⟩⟨j| ⊗ X_ij; blocks[i, j] is X_ij."""
    d: int
    blocks: np.ndarray

    @classmethod
    def of(cls, U: np.ndarray) -> 'BlockDecomposition':
        d = local_dim(np.asarray(U), 'BlockDecomposition')
        return cls(d=d, blocks=np.asarray(U).reshape(d, d, d, d).transpose(0, 2, 1, 3))

    def reassemble(self) -> np.ndarray:
        d = self.d
        return self.blocks.transpose(0, 2, 1, 3).reshape(d * d, d * d)


def block_2unitary_conditions(U: np.ndarray) -> tuple[float, float, float]:
    """
    Block-form defects (unitarity, duality, T-duality).

    1: max over (i, k) of ‖Σ_j X_ij X_kj† − δ_ik I‖
    2: max over pairs of |Tr(X_kl† X_ij) − δ_ik δ_jl|
    3: max over (j, l) of ‖Σ_i X_ij X_il† − δ_jl I‖
    """
    X = BlockDecomposition.of(U).blocks
    d = X.shape[0]
    eye = np.eye(d)

    rows = np.einsum('ijab,kjcb->ikac', X, X.conj())
    unitary = max(np.linalg.norm(rows[i, k] - (i == k) * eye) for i in range(d) for k in range(d))

    flat = X.reshape(d * d, d * d)
    overlaps = flat.conj() @ flat.T
    dual = float(np.max(np.abs(overlaps - np.eye(d * d))))

    cols = np.einsum('ijab,ilcb->jlac', X, X.conj())
    t_dual = max(np.linalg.norm(cols[j, l] - (j == l) * eye) for j in range(d) for l in range(d))
    return float(unitary), dual, float(t_dual)


def ame_coefficients(U: np.ndarray) -> np.ndarray:
    """T[i, j, k, l] = U[(i,j), (k,l)]/d, normalized so that Σ|T|² = 1 for unitary U."""
    U = np.asarray(U)
    d = local_dim(U, 'ame_coefficients')
    return U.reshape(d, d, d, d) / d


# ---------------------------------------------------------------------------
# Text grids

def format_design_grid(K: DesignTable, L: Optional[DesignTable] = None) -> str:
    """
    Box grid of a design table; with L given, each cell shows the pair kl.
    """
    d = K.d
    if L is None:
        cells = [[str(v) for v in row] for row in K.entries.tolist()]
    else:
        cells = [[f"{k}{l}" for k, l in zip(krow, lrow)]
                 for krow, lrow in zip(K.entries.tolist(), L.entries.tolist())]
    width = max(len(c) for row in cells for c in row)
    rule = '+' + '+'.join('-' * (width + 2) for _ in range(d)) + '+'
    lines = [rule]
    for row in cells:
        lines.append('| ' + ' | '.join(c.rjust(width) for c in row) + ' |')
        lines.append(rule)
    return '\n'.join(lines)


def _vector_label(v: np.ndarray, representatives: list[np.ndarray], overlap_tol: float) -> str:
    for index, w in enumerate(representatives):
        if abs(np.vdot(w, v)) >= 1 - overlap_tol:
            return f"v{index + 1}"
    representatives.append(v)
    return f"v{len(representatives)}"


def format_quantum_design(design: QuantumDesign) -> str:
    """Both sides as grids of vector labels, followed by the label legend."""
    out = []
    for name, side in (('K', design.k_side), ('L', design.l_side)):
        reps: list[np.ndarray] = []
        labels = np.array([[_vector_label(side[i, j], reps, design.overlap_tol)
                            for j in range(design.d)] for i in range(design.d)], dtype=object)
        width = max(len(s) for s in labels.reshape(-1))
        rule = '+' + '+'.join('-' * (width + 2) for _ in range(design.d)) + '+'
        out.append(f"{name} (cardinality {len(reps)})")
        out.append(rule)
        for row in labels:
            out.append('| ' + ' | '.join(s.rjust(width) for s in row) + ' |')
            out.append(rule)
        for index, v in enumerate(reps):
            entries = ', '.join(f"{z.real:+.4f}{z.imag:+.4f}j" for z in v)
            out.append(f"  v{index + 1} = ({entries})")
    return '\n'.join(out)
