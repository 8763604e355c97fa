"""
Named gates: the dual and 2-unitary examples used across the toolkit.

Builders are memoized; named_gate hands out copies so callers may mutate
what they receive.
"""

import logging
import re
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.linalg import block_diag

from .cartan import canonical_matrix
from .designs import PermutationGate, dense_permutation
from .errors import UnknownGate
from .linalg import RngStream, dense_swap, enphase

logger = logging.getLogger(__name__)

# Compact forms (one-based column of the 1 in each row)
PERMUTATIONS = {
    'P9': (1, 5, 9, 6, 7, 2, 8, 3, 4),
    'P16': (1, 6, 11, 16, 8, 3, 14, 9, 10, 13, 4, 7, 15, 12, 5, 2),
    'P25': (1, 7, 13, 19, 25, 22, 3, 9, 15, 16, 18, 24, 5, 6, 12, 14, 20, 21, 2, 8, 10, 11, 17, 23, 4),
    'P25R': (1, 7, 13, 19, 25, 8, 14, 20, 21, 2, 15, 16, 22, 3, 9, 17, 23, 4, 10, 11, 24, 5, 6, 12, 18),
    # the two LUS classes at ep = 2/3, d = 3
    'P_EP23': (1, 4, 8, 2, 5, 7, 6, 3, 9),
    'P_EP23_PRIME': (1, 4, 9, 2, 5, 8, 6, 3, 7),
    'CNOT': (1, 2, 4, 3),
    'DCNOT': (1, 4, 2, 3),
}

ENPHASED_P16_SEED = 16

_O16_ROWS = """
 1  .  .  .  .  1  .  .  .  . -1  .  .  .  . -1
 .  1  .  . -1  .  .  .  .  .  . -1  .  . -1  .
 .  . -1  .  .  .  .  1 -1  .  .  .  . -1  .  .
 .  .  . -1  .  .  1  .  .  1  .  .  1  .  .  .
 .  1  .  . -1  .  .  .  .  .  .  1  .  .  1  .
-1  .  .  .  .  1  .  .  .  .  1  .  .  .  . -1
 .  .  . -1  .  .  1  .  . -1  .  . -1  .  .  .
 .  . -1  .  .  .  . -1  1  .  .  .  . -1  .  .
 .  . -1  .  .  .  . -1 -1  .  .  .  .  1  .  .
 .  .  .  1  .  .  1  .  . -1  .  .  1  .  .  .
-1  .  .  .  . -1  .  .  .  . -1  .  .  .  . -1
 . -1  .  . -1  .  .  .  .  .  . -1  .  .  1  .
 .  .  . -1  .  . -1  .  . -1  .  .  1  .  .  .
 .  .  1  .  .  .  . -1 -1  .  .  .  . -1  .  .
 .  1  .  .  1  .  .  .  .  .  . -1  .  .  1  .
 1  .  .  .  . -1  .  .  .  .  1  .  .  .  . -1
"""

# ±1 blocks of D4 = P16·O16·P16ᵀ, each orthogonal after scaling by 1/2.
# The signs are the ones the printed O16 forces, not the normalized Hadamard form.
HADAMARD_BLOCKS = (
    ((1, 1, -1, -1), (-1, 1, 1, -1), (-1, -1, -1, -1), (1, -1, 1, -1)),
    ((-1, -1, -1, 1), (1, -1, -1, -1), (-1, 1, -1, -1), (-1, -1, 1, -1)),
    ((-1, 1, 1, 1), (-1, 1, -1, -1), (1, 1, -1, 1), (-1, -1, -1, 1)),
    ((1, -1, 1, 1), (1, -1, -1, -1), (1, 1, -1, 1), (-1, -1, -1, 1)),
)

_S = 1 / np.sqrt(2)
_H = np.sqrt(3) / 2

# (row, column, value), zero-based
_U9_ENTRIES = (
    (0, 0, 1), (1, 3, 1), (2, 6, _S), (2, 7, _S), (3, 1, -1), (4, 4, 1),
    (5, 6, _S), (5, 7, -_S), (6, 2, _S), (6, 8, _S), (7, 2, _S), (7, 8, -_S), (8, 5, 1),
)
_UND_ENTRIES = (
    (0, 0, 1), (1, 2, _H), (1, 3, 0.5), (2, 5, _H), (2, 6, -0.5), (3, 7, 1), (4, 1, 1),
    (5, 4, 1), (6, 8, 1), (7, 2, -0.5), (7, 3, _H), (8, 5, 0.5), (8, 6, _H),
)
_UND_PRIME_ENTRIES = (
    (0, 0, _H), (0, 5, 0.5), (1, 8, 1), (2, 2, 0.5), (2, 6, -_H), (3, 4, 1), (4, 7, 1),
    (5, 1, 1), (6, 0, 0.5), (6, 5, -_H), (7, 3, 1), (8, 2, _H), (8, 6, 0.5),
)

# U_nd = (u1⊗u2)·U_nd'·(v1⊗v2)
UND_LOCALS = {
    'u1': np.array([[-_H, 0, -0.5], [0, 1, 0], [-0.5, 0, _H]]),
    'u2': np.array([[1, 0, 0], [0, 0, 1], [0, -1, 0]]),
    'v1': np.array([[1, 0, 0], [0, 0, 1], [0, -1, 0]]),
    'v2': np.diag([-1.0, 1.0, -1.0]),
}


def _from_entries(n: int, entries) -> np.ndarray:
    M = np.zeros((n, n))
    for r, c, v in entries:
        M[r, c] = v
    return M


@lru_cache(maxsize=None)
def permutation(name: str) -> PermutationGate:
    return PermutationGate.from_compact(PERMUTATIONS[name])


@lru_cache(maxsize=None)
def o16() -> np.ndarray:
    """O16 entry by entry as printed (entries ±1/2)."""
    rows = [line.split() for line in _O16_ROWS.strip().splitlines()]
    return np.array([[0.0 if v == '.' else float(v) for v in row] for row in rows]) / 2


@lru_cache(maxsize=None)
def d4() -> np.ndarray:
    """Block-diagonal real orthogonal D4 = ⊕ H_k/2."""
    return block_diag(*[np.array(b, dtype=float) / 2 for b in HADAMARD_BLOCKS])


@lru_cache(maxsize=None)
def o16_from_blocks() -> np.ndarray:
    """O16 rebuilt as P16ᵀ·D4·P16."""
    P = dense_permutation(permutation('P16'))
    return P.T @ d4() @ P


@lru_cache(maxsize=None)
def u9() -> np.ndarray:
    return _from_entries(9, _U9_ENTRIES)


@lru_cache(maxsize=None)
def u_nd() -> np.ndarray:
    return _from_entries(9, _UND_ENTRIES)


@lru_cache(maxsize=None)
def u_nd_prime() -> np.ndarray:
    return _from_entries(9, _UND_PRIME_ENTRIES)


def u_nd_from_prime() -> np.ndarray:
    """U_nd rebuilt from U_nd' and UND_LOCALS."""
    loc = UND_LOCALS
    return np.kron(loc['u1'], loc['u2']) @ u_nd_prime() @ np.kron(loc['v1'], loc['v2'])


def identity(d: int) -> np.ndarray:
    return np.eye(d * d)


def fourier(d: int) -> np.ndarray:
    """Discrete Fourier transform on d² levels."""
    n = d * d
    k = np.arange(n)
    return np.exp(2j * np.pi * np.outer(k, k) / n) / np.sqrt(n)


def controlled_shift(d: int) -> np.ndarray:
    """|ij⟩ → |j, i+j mod d⟩; dual for every d."""
    n = d * d
    M = np.zeros((n, n))
    for i in range(d):
        for j in range(d):
            M[j * d + (i + j) % d, i * d + j] = 1.0
    return M


def xxx(c: float) -> np.ndarray:
    """exp[-ic Σ σ_k⊗σ_k], a fractional power of SWAP up to phase."""
    return canonical_matrix((c, c, c))


def enphased_p16(seed: int = ENPHASED_P16_SEED) -> np.ndarray:
    """D1·P16·D2 with phases drawn from the given seed."""
    return enphase(dense_permutation(permutation('P16')), RngStream(seed, stream_id=16))


_FIXED: dict[str, Callable[[], np.ndarray]] = {
    'P9': lambda: dense_permutation(permutation('P9')),
    'P16': lambda: dense_permutation(permutation('P16')),
    'P25': lambda: dense_permutation(permutation('P25')),
    'P25R': lambda: dense_permutation(permutation('P25R')),
    'P_EP23': lambda: dense_permutation(permutation('P_EP23')),
    'P_EP23_PRIME': lambda: dense_permutation(permutation('P_EP23_PRIME')),
    'CNOT': lambda: dense_permutation(permutation('CNOT')),
    'DCNOT': lambda: dense_permutation(permutation('DCNOT')),
    'O16': o16,
    'D4': d4,
    'U9': u9,
    'U_ND': u_nd,
    'U_ND_PRIME': u_nd_prime,
}

_FAMILIES: dict[str, Callable[..., np.ndarray]] = {
    'SWAP': lambda d=2, **_: dense_swap(d),
    'IDENTITY': lambda d=2, **_: identity(d),
    'FOURIER': lambda d=2, **_: fourier(d),
    'CSHIFT': lambda d=2, **_: controlled_shift(d),
    'XXX': lambda c=np.pi / 8, **_: xxx(c),
    'P16_ENPHASED': lambda seed=ENPHASED_P16_SEED, **_: enphased_p16(seed),
}

# SWAP3, identity4, fourier2, cshift5
_SIZED = re.compile(r'^(SWAP|IDENTITY|FOURIER|CSHIFT)(\d+)$')


def known_names() -> list[str]:
    return sorted(list(_FIXED) + list(_FAMILIES))


def named_gate(name: str, d: Optional[int] = None, c: Optional[float] = None,
               seed: Optional[int] = None) -> np.ndarray:
    """
    Look up a catalog gate.

    Args:
        name: catalog name, case-insensitive; sized families also accept
            a trailing dimension (SWAP3)
        d: local dimension for sized families
        c: angle for XXX
        seed: enphasing seed for P16_ENPHASED

    Returns:
        Fresh copy of the gate matrix

    Raises:
        UnknownGate: name not in the catalog
    """
    key = name.strip().upper().replace("'", '_PRIME').replace('-', '_')
    sized = _SIZED.match(key)
    if sized:
        key, d = sized.group(1), int(sized.group(2))

    if key in _FIXED:
        return np.array(_FIXED[key](), copy=True)
    if key in _FAMILIES:
        params = {k: v for k, v in (('d', d), ('c', c), ('seed', seed)) if v is not None}
        logger.debug("named_gate %s with %s", key, params)
        return np.array(_FAMILIES[key](**params), copy=True)
    raise UnknownGate(name, known_names())
