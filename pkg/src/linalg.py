"""
Complex matrix substrate: subsystem rearrangements, polar projection,
unitarity diagnostics and random sampling.

Bipartite operators act on C^d ⊗ C^d. Row/column index (i, α) linearizes as
i*d + α (zero-based), so a d²×d² matrix reshapes to the tensor M[i, α, j, β]
with rows (i, α) and columns (j, β).
"""

import logging
import math
from enum import Enum
from typing import Optional, Union

import numpy as np
from scipy.linalg import qr

from .config import DEFAULT_SETTINGS
from .errors import DimensionError, RankDeficient

logger = logging.getLogger(__name__)


class Rearrangement(Enum):
    """Index rearrangements of a bipartite operator."""
    R1 = 'R1'
    R2 = 'R2'
    G1 = 'G1'  # partial transpose on the first factor
    G2 = 'G2'  # partial transpose on the second factor
    GR = 'GR'  # G2 after R2

    @classmethod
    def parse(cls, value: Union[str, 'Rearrangement']) -> 'Rearrangement':
        if isinstance(value, cls):
            return value
        key = str(value).upper().replace('Γ', 'G').replace('GAMMA', 'G')
        try:
            return cls(key)
        except ValueError:
            raise DimensionError(f"unknown rearrangement {value!r}", 'rearrange') from None


# Tensor axis orders for M[i, α, j, β]; result = M4.transpose(axes)
_AXES = {
    Rearrangement.R2: (0, 2, 1, 3),  # out[(i,j),(α,β)] = M[(i,α),(j,β)]
    Rearrangement.R1: (3, 1, 2, 0),  # out[(β,α),(j,i)] = M[(i,α),(j,β)]
    Rearrangement.G2: (0, 3, 2, 1),  # out[(i,β),(j,α)] = M[(i,α),(j,β)]
    Rearrangement.G1: (2, 1, 0, 3),  # out[(j,α),(i,β)] = M[(i,α),(j,β)]
    Rearrangement.GR: (0, 3, 1, 2),  # G2 of R2(M): out[i,a,b,c] = M[i,b,c,a]
}


class RngStream:
    """
    Reproducible random stream.

    Identical (seed, stream_id, parent) triples replay identical draws.
    Streams are never shared between workers; use split() to derive
    independent children.
    """

    def __init__(self, seed: int, stream_id: int = 0, parent_key: tuple[int, ...] = ()):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self.key = tuple(parent_key) + (self.stream_id,)
        sequence = np.random.SeedSequence(entropy=self.seed & 0xFFFFFFFFFFFFFFFF, spawn_key=self.key)
        self.generator = np.random.default_rng(sequence)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, key={self.key})"

    def child(self, stream_id: int) -> 'RngStream':
        """Independent child stream with the given id."""
        return RngStream(self.seed, stream_id, parent_key=self.key)

    def split(self, n: int) -> list['RngStream']:
        """n independent child streams with ids 0..n-1."""
        return [self.child(k) for k in range(n)]

    def standard_normal(self, size) -> np.ndarray:
        return self.generator.standard_normal(size)

    def uniform(self, low: float, high: float, size) -> np.ndarray:
        return self.generator.uniform(low, high, size)

    def integers(self, low: int, high: int, size=None):
        return self.generator.integers(low, high, size)


def local_dim(M: np.ndarray, operation: str = 'local_dim') -> int:
    """
    Local dimension d of a square d²×d² matrix.

    Raises:
        DimensionError: when M is not square or its size is not d² with d ≥ 2
    """
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}", operation)
    d = math.isqrt(M.shape[0])
    if d < 2 or d * d != M.shape[0]:
        raise DimensionError(f"size {M.shape[0]} is not d² for an integer d ≥ 2", operation)
    return d


def rearrange(M: np.ndarray, kind: Union[str, Rearrangement]) -> np.ndarray:
    """Apply one of the index rearrangements R1, R2, G1, G2 or GR."""
    kind = Rearrangement.parse(kind)
    M = np.asarray(M)
    d = local_dim(M, operation=f'rearrange[{kind.value}]')
    return M.reshape(d, d, d, d).transpose(_AXES[kind]).reshape(d * d, d * d)


def rearrange_batch(stack: np.ndarray, kind: Union[str, Rearrangement]) -> np.ndarray:
    """rearrange() applied to every matrix of an (N, d², d²) stack."""
    kind = Rearrangement.parse(kind)
    stack = np.asarray(stack)
    if stack.ndim != 3:
        raise DimensionError(f"expected an (N, n, n) stack, got shape {stack.shape}", 'rearrange_batch')
    d = local_dim(stack[0], operation='rearrange_batch')
    axes = (0,) + tuple(a + 1 for a in _AXES[kind])
    return stack.reshape(-1, d, d, d, d).transpose(axes).reshape(-1, d * d, d * d)


def realign(M: np.ndarray, variant: Union[str, Rearrangement] = Rearrangement.R2) -> np.ndarray:
    """
    Realignment M^R.

    Args:
        M: d²×d² matrix
        variant: R2 (default) or R1

    Returns:
        Rearranged matrix; both variants are involutions
    """
    variant = Rearrangement.parse(variant)
    if variant not in (Rearrangement.R1, Rearrangement.R2):
        raise DimensionError(f"realign takes R1 or R2, not {variant.value}", 'realign')
    return rearrange(M, variant)


def partial_transpose(M: np.ndarray, variant: Union[str, Rearrangement] = Rearrangement.G2) -> np.ndarray:
    """
    Partial transpose M^Γ.

    Args:
        M: d²×d² matrix
        variant: G2 (default, transposes the second factor) or G1

    Returns:
        Rearranged matrix; both variants are involutions
    """
    variant = Rearrangement.parse(variant)
    if variant not in (Rearrangement.G1, Rearrangement.G2):
        raise DimensionError(f"partial_transpose takes G1 or G2, not {variant.value}", 'partial_transpose')
    return rearrange(M, variant)


def unitarity_defect(M: np.ndarray) -> float:
    """Frobenius norm of M†M − I; zero iff M is unitary."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}", 'unitarity_defect')
    gram = M.conj().T @ M
    return float(np.linalg.norm(gram - np.eye(M.shape[0])))


def is_unitary(M: np.ndarray, tol: Optional[float] = None) -> bool:
    tol = DEFAULT_SETTINGS.unitarity_tol if tol is None else tol
    return unitarity_defect(M) <= tol


def polar_unitary(M: np.ndarray, min_sv_tol: Optional[float] = None) -> np.ndarray:
    """
    Nearest unitary to M in Frobenius norm, W·V† from the SVD M = W·Σ·V†.

    Args:
        M: square matrix
        min_sv_tol: smallest admissible singular value relative to the
            largest one (default from settings)

    Returns:
        Unitary polar factor

    Raises:
        RankDeficient: when σ_min < min_sv_tol·σ_max; the map step is then
            undefined
    """
    tol = DEFAULT_SETTINGS.rank_tol if min_sv_tol is None else min_sv_tol
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}", 'polar_unitary')
    w, s, vh = np.linalg.svd(M)
    scale = s[0] if s[0] > 0 else 1.0
    if s[-1] < tol * scale:
        raise RankDeficient(
            f"smallest singular value {s[-1]:.3e} below {tol:.1e} relative tolerance",
            'polar_unitary',
            smallest=float(s[-1]),
        )
    return w @ vh


def sample_cue(n: int, rng: RngStream) -> np.ndarray:
    """
    Haar-random n×n unitary.

    QR of a complex Ginibre matrix with the diagonal of R made real
    positive, which makes the factorization unique.
    """
    if n < 1:
        raise DimensionError(f"n must be ≥ 1, got {n}", 'sample_cue')
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def sample_diagonal(n: int, rng: RngStream) -> np.ndarray:
    """Diagonal unitary with i.i.d. phases uniform on [0, 2π)."""
    if n < 1:
        raise DimensionError(f"n must be ≥ 1, got {n}", 'sample_diagonal')
    return np.diag(np.exp(1j * rng.uniform(0.0, 2 * np.pi, n)))


def dense_swap(d: int) -> np.ndarray:
    """SWAP on C^d ⊗ C^d."""
    S = np.zeros((d * d, d * d))
    for i in range(d):
        for a in range(d):
            S[a * d + i, i * d + a] = 1.0
    return S


def phase_distance(A: np.ndarray, B: np.ndarray) -> float:
    """Frobenius distance between A and B after the best global rephasing of B."""
    overlap = np.vdot(B, A)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.linalg.norm(A - phase * B))


def su_normalize(U: np.ndarray) -> np.ndarray:
    """Rescale a unitary to determinant 1 (principal root of the determinant)."""
    n = U.shape[0]
    return U / np.linalg.det(U) ** (1.0 / n)


def enphase(U: np.ndarray, rng: RngStream) -> np.ndarray:
    """D1·U·D2 with fresh random diagonal unitaries."""
    n = U.shape[0]
    return sample_diagonal(n, rng) @ U @ sample_diagonal(n, rng)


def local_dressing(U: np.ndarray, rng: RngStream) -> tuple[np.ndarray, tuple[np.ndarray, ...]]:
    """
    Random local-unitary copy (u1⊗u2)·U·(v1⊗v2).

    Returns:
        Tuple of (dressed matrix, (u1, u2, v1, v2))
    """
    d = local_dim(U, 'local_dressing')
    u1, u2, v1, v2 = (sample_cue(d, rng) for _ in range(4))
    return np.kron(u1, u2) @ U @ np.kron(v1, v2), (u1, u2, v1, v2)
