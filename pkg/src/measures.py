"""
Entanglement measures of bipartite unitaries: Schmidt spectrum, operator
entanglement, entangling power, gate typicality and duality classification.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import DEFAULT_SETTINGS
from .linalg import (
    Rearrangement,
    local_dim,
    partial_transpose,
    realign,
    rearrange_batch,
    unitarity_defect,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SchmidtSpectrum:
    """Operator Schmidt weights λ_j, descending, summing to d²."""
    d: int
    values: np.ndarray

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self.values > 1e-12 * self.d ** 2))


@dataclass(frozen=True)
class MeasureSet:
    """E(U), E(US), scaled entangling power and gate typicality."""
    d: int
    e_op: float
    e_op_swapped: float
    ep: float
    gt: float


@dataclass(frozen=True)
class DualityFlags:
    """Definitions of dual, T-dual, 2-unitary and self-dual, with the defects behind them."""
    dual: bool
    t_dual: bool
    two_unitary: bool
    self_dual: bool
    dual_defect: float
    t_dual_defect: float
    self_dual_defect: float

    @property
    def defects(self) -> tuple[float, float, float]:
        return self.dual_defect, self.t_dual_defect, self.self_dual_defect

    def label(self) -> str:
        if self.two_unitary:
            return '2-unitary'
        if self.dual:
            return 'self-dual' if self.self_dual else 'dual'
        if self.t_dual:
            return 't-dual'
        return 'generic'


def swap_entanglement(d: int) -> float:
    """E(S) = 1 − 1/d², the maximal operator entanglement."""
    return 1.0 - 1.0 / d ** 2


def schmidt_spectrum(U: np.ndarray) -> SchmidtSpectrum:
    """Squared singular values of U^R (R2), descending."""
    d = local_dim(U, 'schmidt_spectrum')
    s = np.linalg.svd(realign(U), compute_uv=False)
    return SchmidtSpectrum(d=d, values=np.sort(s ** 2)[::-1])


def _linear_entropy_of(A: np.ndarray, d: int) -> float:
    gram = A @ A.conj().T
    return float(1.0 - np.trace(gram @ gram).real / d ** 4)


def operator_entanglement(U: np.ndarray) -> float:
    """E(U) = 1 − Tr[(U^R U^R†)²]/d⁴."""
    d = local_dim(U, 'operator_entanglement')
    return _linear_entropy_of(realign(U), d)


def swapped_entanglement(U: np.ndarray) -> float:
    """E(US) = 1 − Tr[(U^Γ U^Γ†)²]/d⁴."""
    d = local_dim(U, 'swapped_entanglement')
    return _linear_entropy_of(partial_transpose(U), d)


def measure_set(U: np.ndarray) -> MeasureSet:
    """All four measures of U in one pass."""
    d = local_dim(U, 'measure_set')
    e_u = operator_entanglement(U)
    e_us = swapped_entanglement(U)
    e_s = swap_entanglement(d)
    return MeasureSet(
        d=d,
        e_op=e_u,
        e_op_swapped=e_us,
        ep=(e_u + e_us - e_s) / e_s,
        gt=(e_u - e_us + e_s) / (2 * e_s),
    )


def entangling_power(U: np.ndarray) -> float:
    """Scaled entangling power, 0 for SWAP and 1 for 2-unitaries."""
    return measure_set(U).ep


def gate_typicality(U: np.ndarray) -> float:
    return measure_set(U).gt


def entangling_power_batch(stack: np.ndarray) -> np.ndarray:
    """
    Scaled entangling power of every matrix in an (N, d², d²) stack.

    Used by the permutation scans where per-matrix calls dominate runtime.
    """
    stack = np.asarray(stack)
    d = local_dim(stack[0], 'entangling_power_batch')
    e_s = swap_entanglement(d)

    def linear(kind: Rearrangement) -> np.ndarray:
        A = rearrange_batch(stack, kind)
        gram = A @ np.conj(np.swapaxes(A, 1, 2))
        return 1.0 - np.einsum('nij,nji->n', gram, gram).real / d ** 4

    e_u = linear(Rearrangement.R2)
    e_us = linear(Rearrangement.G2)
    return (e_u + e_us - e_s) / e_s


def classify_duality(U: np.ndarray, tol: Optional[float] = None) -> DualityFlags:
    """
    Dual, T-dual, 2-unitary and self-dual flags.

    Args:
        U: d²×d² unitary
        tol: classification tolerance on each defect

    Returns:
        DualityFlags
    """
    tol = DEFAULT_SETTINGS.classify_tol if tol is None else tol
    local_dim(U, 'classify_duality')
    U_r = realign(U)
    dual_defect = unitarity_defect(U_r)
    t_dual_defect = unitarity_defect(partial_transpose(U))
    self_dual_defect = float(np.linalg.norm(U_r - U))
    dual = dual_defect <= tol
    t_dual = t_dual_defect <= tol
    return DualityFlags(
        dual=dual,
        t_dual=t_dual,
        two_unitary=dual and t_dual,
        self_dual=self_dual_defect <= tol,
        dual_defect=dual_defect,
        t_dual_defect=t_dual_defect,
        self_dual_defect=self_dual_defect,
    )


def ame_purities(U: np.ndarray) -> tuple[float, float, float]:
    """
    Purities of the AB, AC and AD marginals of the four-party state
    (U ⊗ I)|Φ⟩|Φ⟩; all equal 1/d² exactly when U is 2-unitary.
    """
    d = local_dim(U, 'ame_purities')
    T = np.asarray(U).reshape(d, d, d, d) / d
    purities = []
    for axes in ((0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)):
        psi = T.transpose(axes).reshape(d * d, d * d)
        rho = psi @ psi.conj().T
        purities.append(float(np.trace(rho @ rho).real))
    return tuple(purities)


def linear_entropy_mean(U: np.ndarray) -> float:
    """
    Haar average over product inputs of the linear entropy of the first
    factor, (d/(d+1))²·[E(U) + E(US) − E(S)].
    """
    m = measure_set(U)
    return (m.d / (m.d + 1)) ** 2 * (m.e_op + m.e_op_swapped - swap_entanglement(m.d))
