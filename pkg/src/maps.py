"""
Nonlinear maps towards dual and 2-unitary gates.

Each step rearranges the current unitary (realignment, partial transpose or
both) and projects back to the nearest unitary. The stochastic variants
multiply the projection by fresh random diagonal unitaries on both sides.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import block_diag
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .config import DEFAULT_SETTINGS
from .errors import RankDeficient
from .linalg import (
    Rearrangement,
    RngStream,
    dense_swap,
    local_dim,
    partial_transpose,
    phase_distance,
    polar_unitary,
    realign,
    rearrange,
    sample_cue,
    sample_diagonal,
    unitarity_defect,
)
from .measures import entangling_power

logger = logging.getLogger(__name__)


class MapKind(Enum):
    MR = 'MR'
    MGAMMA = 'MGamma'
    MGAMMAR = 'MGammaR'
    MR_STOCHASTIC = 'MR_stochastic'
    MGAMMAR_STOCHASTIC = 'MGammaR_stochastic'

    @property
    def stochastic(self) -> bool:
        return self in (MapKind.MR_STOCHASTIC, MapKind.MGAMMAR_STOCHASTIC)

    @property
    def deterministic(self) -> 'MapKind':
        """The kick-free counterpart."""
        return {
            MapKind.MR_STOCHASTIC: MapKind.MR,
            MapKind.MGAMMAR_STOCHASTIC: MapKind.MGAMMAR,
        }.get(self, self)

    @property
    def rearrangement(self) -> Rearrangement:
        base = self.deterministic
        if base is MapKind.MR:
            return Rearrangement.R2
        if base is MapKind.MGAMMA:
            return Rearrangement.G2
        return Rearrangement.GR

    @classmethod
    def parse(cls, value) -> 'MapKind':
        if isinstance(value, cls):
            return value
        lowered = str(value).replace('Γ', 'Gamma').lower()
        for kind in cls:
            if kind.value.lower() == lowered:
                return kind
        raise ValueError(f"unknown map kind {value!r}")


class Target(Enum):
    DUAL = 'dual'
    T_DUAL = 't_dual'
    TWO_UNITARY = 'two_unitary'


class StopReason(Enum):
    CONVERGED = 'converged'
    MAX_ITERS = 'max_iters'
    RANK_DEFICIENT = 'rank_deficient'


@dataclass(frozen=True)
class StopRule:
    """When to stop iterating and how often to keep diagnostics."""
    max_iters: int = 10000
    target_defect: float = 1e-8
    target: Target = Target.DUAL
    store_every: int = 1
    store_unitaries: bool = False
    polish_iters: int = 100  # kick-free tail for stochastic kinds

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be ≥ 1, got {self.max_iters}")
        if self.target_defect <= 0:
            raise ValueError(f"target_defect must be > 0, got {self.target_defect}")
        if self.store_every < 1:
            raise ValueError(f"store_every must be ≥ 1, got {self.store_every}")


@dataclass
class StepRecord:
    """Diagnostics of one iterate."""
    iteration: int
    dual_defect: float
    t_dual_defect: float
    ep: float
    unitary: Optional[np.ndarray] = None


@dataclass
class Trajectory:
    """Result of iterate()."""
    kind: MapKind
    seed: np.ndarray
    steps: list[StepRecord] = field(default_factory=list)
    final: Optional[np.ndarray] = None
    stop_reason: StopReason = StopReason.MAX_ITERS
    iterations: int = 0
    note: str = ''

    @property
    def converged(self) -> bool:
        return self.stop_reason is StopReason.CONVERGED

    @property
    def last(self) -> StepRecord:
        return self.steps[-1]


@dataclass(frozen=True)
class BlockStructure:
    """Support blocks of U·SWAP."""
    d: int
    sizes: tuple[int, ...]
    labels: np.ndarray

    @property
    def multiples_of_d(self) -> bool:
        return all(size % self.d == 0 for size in self.sizes)


def step(kind, U: np.ndarray, rng: Optional[RngStream] = None) -> np.ndarray:
    """
    One application of a map.

    Args:
        kind: MapKind (or its name)
        U: current unitary
        rng: required for stochastic kinds, rejected for deterministic ones

    Returns:
        Next unitary

    Raises:
        RankDeficient: the rearranged matrix is singular; the map is undefined
    """
    kind = MapKind.parse(kind)
    if kind.stochastic and rng is None:
        raise ValueError(f"{kind.value} needs an RngStream")
    if not kind.stochastic and rng is not None:
        raise ValueError(f"{kind.value} is deterministic and takes no RngStream")

    try:
        projected = polar_unitary(rearrange(U, kind.rearrangement))
    except RankDeficient as e:
        e.operation = f'step[{kind.value}]'
        raise

    if kind.stochastic:
        n = projected.shape[0]
        return sample_diagonal(n, rng) @ projected @ sample_diagonal(n, rng)
    return projected


def _defects(U: np.ndarray) -> tuple[float, float]:
    return unitarity_defect(realign(U)), unitarity_defect(partial_transpose(U))


def _target_defect(target: Target, dual_defect: float, t_dual_defect: float) -> float:
    if target is Target.DUAL:
        return dual_defect
    if target is Target.T_DUAL:
        return t_dual_defect
    return max(dual_defect, t_dual_defect)


def _record(n: int, U: np.ndarray, defects: tuple[float, float], keep: bool) -> StepRecord:
    return StepRecord(
        iteration=n,
        dual_defect=defects[0],
        t_dual_defect=defects[1],
        ep=entangling_power(U),
        unitary=U.copy() if keep else None,
    )


def _run(kind: MapKind, U: np.ndarray, start: int, count: int, stop: StopRule,
         rng: Optional[RngStream], traj: Trajectory) -> tuple[np.ndarray, tuple[float, float], int, bool]:
    """Advance up to count steps; returns (U, defects, last index, converged)."""
    defects = _defects(U)
    n = start
    for n in range(start + 1, start + count + 1):
        U = step(kind, U, rng if kind.stochastic else None)
        defects = _defects(U)
        reached = _target_defect(stop.target, *defects) <= stop.target_defect
        if reached:
            traj.steps.append(_record(n, U, defects, stop.store_unitaries))
            return U, defects, n, True
        if n % stop.store_every == 0:
            traj.steps.append(_record(n, U, defects, stop.store_unitaries))
        logger.debug("%s iter %d: defects %.3e / %.3e", kind.value, n, *defects)
    return U, defects, n, False


def iterate(kind, U0: np.ndarray, stop: StopRule = StopRule(), rng: Optional[RngStream] = None) -> Trajectory:
    """
    Iterate a map from U0 until the target defect is reached.

    Stochastic kinds run their kicked phase for max_iters − polish_iters
    steps at most, then a kick-free polish of up to polish_iters steps;
    success is judged after the polish.

    Returns:
        Trajectory; a RankDeficient abort is recorded as its stop reason
    """
    kind = MapKind.parse(kind)
    traj = Trajectory(kind=kind, seed=np.asarray(U0).copy())
    U = np.asarray(U0, dtype=complex)
    defects = _defects(U)
    traj.steps.append(_record(0, U, defects, stop.store_unitaries))

    if _target_defect(stop.target, *defects) <= stop.target_defect:
        traj.final, traj.stop_reason = U, StopReason.CONVERGED
        logger.info("%s: seed already meets the target", kind.value)
        return traj

    n = 0
    converged = False
    try:
        if kind.stochastic:
            kicked = max(stop.max_iters - stop.polish_iters, 1)
            U, defects, n, converged = _run(kind, U, 0, kicked, stop, rng, traj)
            U, defects, n, converged = _run(kind.deterministic, U, n, stop.polish_iters, stop, None, traj)
        else:
            U, defects, n, converged = _run(kind, U, 0, stop.max_iters, stop, None, traj)
    except RankDeficient as e:
        traj.stop_reason = StopReason.RANK_DEFICIENT
        traj.note = e.describe()
        traj.final = U
        traj.iterations = traj.steps[-1].iteration
        logger.warning("%s aborted: %s", kind.value, traj.note)
        return traj

    traj.final = U
    traj.iterations = n
    traj.stop_reason = StopReason.CONVERGED if converged else StopReason.MAX_ITERS
    if traj.steps[-1].iteration != n:
        traj.steps.append(_record(n, U, defects, stop.store_unitaries))
    logger.info("%s: %s after %d iterations (defects %.2e / %.2e)",
                kind.value, traj.stop_reason.value, n, *defects)
    return traj


def run_many(kind, seeds: Sequence[np.ndarray], stop: StopRule = StopRule(),
             rng: Optional[RngStream] = None, workers: int = 1) -> list[Trajectory]:
    """
    Iterate many seeds, one child stream per seed; results in seed order.
    """
    kind = MapKind.parse(kind)
    streams = rng.split(len(seeds)) if (rng is not None and kind.stochastic) else [None] * len(seeds)

    def run_one(index: int) -> Trajectory:
        return iterate(kind, seeds[index], stop, streams[index])

    if workers <= 1:
        return [run_one(k) for k in range(len(seeds))]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_one, range(len(seeds))))


def detect_period(U: np.ndarray, kind, max_period: int = 3, tol: Optional[float] = None) -> Optional[int]:
    """
    Smallest p ≤ max_period with step^p(U) equal to U up to global phase.

    Returns:
        The period, or None when no period is found or the map is undefined
        along the orbit
    """
    kind = MapKind.parse(kind)
    if kind.stochastic:
        raise ValueError("detect_period needs a deterministic map")
    tol = DEFAULT_SETTINGS.period_tol if tol is None else tol
    current = np.asarray(U, dtype=complex)
    for p in range(1, max_period + 1):
        try:
            current = step(kind, current)
        except RankDeficient as e:
            logger.info("detect_period stopped at p=%d: %s", p, e.describe())
            return None
        if phase_distance(current, U) <= tol:
            return p
    return None


def block_structure(U: np.ndarray, threshold: Optional[float] = None) -> BlockStructure:
    """
    Block sizes of the support of U·SWAP (the T-dual partner of a dual U).

    Rows and columns are nodes of a bipartite graph joined by every entry of
    modulus above threshold; each connected component is one block.
    """
    threshold = DEFAULT_SETTINGS.support_threshold if threshold is None else threshold
    d = local_dim(U, 'block_structure')
    n = d * d
    rows, cols = np.nonzero(np.abs(U @ dense_swap(d)) > threshold)
    graph = coo_matrix((np.ones(rows.size), (rows, cols + n)), shape=(2 * n, 2 * n))
    _, labels = connected_components(graph, directed=False)
    row_labels = labels[:n]
    sizes = tuple(sorted(np.bincount(row_labels)[np.unique(row_labels)].tolist(), reverse=True))
    return BlockStructure(d=d, sizes=sizes, labels=row_labels)


def sample_diagonal_dual(d: int, rng: RngStream) -> np.ndarray:
    """Diagonal ensemble: D·S with random phases."""
    return sample_diagonal(d * d, rng) @ dense_swap(d)


def sample_block_dual(d: int, rng: RngStream) -> np.ndarray:
    """Block-diagonal ensemble: (Σ_i |i⟩⟨i| ⊗ u_i)·S with CUE blocks."""
    controlled = block_diag(*[sample_cue(d, rng) for _ in range(d)])
    return controlled @ dense_swap(d)


def cue_seeds(d: int, count: int, rng: RngStream) -> list[np.ndarray]:
    """count CUE seeds of size d², each from its own child stream."""
    return [sample_cue(d * d, stream) for stream in rng.split(count)]
