"""
Local-unitary (in)equivalence tools.

Two gates related by local unitaries produce the same distribution of
entanglement over Haar-random product inputs, so distinguishable
distributions prove LU inequivalence. For permutation gates the local
orbits and entangling classes are enumerated directly.
"""

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np
from scipy.stats import ks_2samp

from .catalog import controlled_shift, permutation
from .config import DEFAULT_SETTINGS
from .designs import PermutationGate
from .errors import MeasureMismatch
from .linalg import RngStream, local_dim, local_dressing, partial_transpose
from .measures import entangling_power_batch, linear_entropy_mean

logger = logging.getLogger(__name__)

_EP_KEY_SCALE = 1e9  # ep values closer than 1e-9 share a class


class Measure(Enum):
    VON_NEUMANN = 'von_neumann'
    LINEAR = 'linear'

    @classmethod
    def parse(cls, value) -> 'Measure':
        if isinstance(value, cls):
            return value
        aliases = {'vn': cls.VON_NEUMANN, 'von_neumann': cls.VON_NEUMANN, 'linear': cls.LINEAR, 'lin': cls.LINEAR}
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown entanglement measure {value!r}") from None


@dataclass
class EntanglementHistogram:
    """Sorted entanglement samples of one gate; binning happens on demand."""
    measure: Measure
    d: int
    sorted_values: np.ndarray
    seed: Optional[int] = None
    label: str = ''

    @property
    def samples(self) -> int:
        return int(self.sorted_values.size)

    @property
    def mean(self) -> float:
        return float(np.mean(self.sorted_values))

    @property
    def std(self) -> float:
        return float(np.std(self.sorted_values, ddof=1)) if self.samples > 1 else 0.0

    @property
    def upper_bound(self) -> float:
        """Largest value the measure can take."""
        return math.log(self.d) if self.measure is Measure.VON_NEUMANN else 1 - 1 / self.d

    def histogram(self, bins: int = 100) -> tuple[np.ndarray, np.ndarray]:
        """(bin_edges, counts) over [0, upper_bound]."""
        counts, edges = np.histogram(self.sorted_values, bins=bins, range=(0.0, self.upper_bound))
        return edges, counts


@dataclass(frozen=True)
class ComparisonVerdict:
    statistic: float
    threshold: float
    distinguishable: bool
    sample_sizes: tuple[int, int]
    alpha: float
    pvalue: float


@dataclass(frozen=True)
class LinearMeanCheck:
    expected: float
    observed: float
    z_score: float


@dataclass(frozen=True)
class ClassRow:
    ep: float
    gt: float
    representative: PermutationGate
    member_count: int


@dataclass
class ClassTable:
    """Entangling classes of dual permutations, ordered by ep."""
    d: int
    rows: list[ClassRow] = field(default_factory=list)
    exhaustive: bool = True
    scanned: int = 0

    @property
    def lower_bound(self) -> bool:
        return not self.exhaustive

    @property
    def ep_values(self) -> list[float]:
        return [row.ep for row in self.rows]


@dataclass
class OrbitResult:
    """Distinct local-permutation conjugates of a permutation."""
    d: int
    members: list[PermutationGate]
    multiplicities: np.ndarray
    total: int
    exhaustive: bool = True

    @property
    def lower_bound(self) -> bool:
        return not self.exhaustive

    def __len__(self) -> int:
        return len(self.members)


# ---------------------------------------------------------------------------
# Entanglement distributions

def _entropies(U: np.ndarray, d: int, count: int, measure: Measure, rng: RngStream) -> np.ndarray:
    def haar_states() -> np.ndarray:
        z = rng.standard_normal((count, d)) + 1j * rng.standard_normal((count, d))
        return z / np.linalg.norm(z, axis=1, keepdims=True)

    a, b = haar_states(), haar_states()
    product = (a[:, :, None] * b[:, None, :]).reshape(count, d * d)
    out = (product @ U.T).reshape(count, d, d)
    p = np.linalg.svd(out, compute_uv=False) ** 2
    if measure is Measure.LINEAR:
        return 1.0 - np.sum(p ** 2, axis=1)
    with np.errstate(divide='ignore', invalid='ignore'):
        terms = np.where(p > 0, -p * np.log(np.where(p > 0, p, 1.0)), 0.0)
    return np.clip(np.sum(terms, axis=1), 0.0, None)


def sample_product_entanglement(U: np.ndarray, N: int, measure, rng: RngStream,
                                block_size: int = 10000, workers: int = 1) -> EntanglementHistogram:
    """
    Entanglement of U(|φ_A⟩⊗|φ_B⟩) for N Haar-random product inputs.

    Samples are drawn in blocks of block_size, block k from child stream k,
    so the result does not depend on the worker count.

    Args:
        U: d²×d² unitary
        N: number of samples
        measure: von Neumann entropy (natural log) or linear entropy of the
            first factor
        rng: parent stream
    """
    if N < 1:
        raise ValueError(f"N must be ≥ 1, got {N}")
    measure = Measure.parse(measure)
    U = np.asarray(U, dtype=complex)
    d = local_dim(U, 'sample_product_entanglement')

    sizes = [min(block_size, N - start) for start in range(0, N, block_size)]
    streams = rng.split(len(sizes))

    def run_block(k: int) -> np.ndarray:
        return _entropies(U, d, sizes[k], measure, streams[k])

    if workers <= 1:
        blocks = [run_block(k) for k in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(run_block, range(len(sizes))))

    values = np.sort(np.concatenate(blocks))
    logger.info("sampled %d %s values, mean %.6f", N, measure.value, float(values.mean()))
    return EntanglementHistogram(measure=measure, d=d, sorted_values=values, seed=rng.seed)


def ks_critical_value(alpha: float) -> float:
    """Asymptotic two-sample KS coefficient c(α) = √(−ln(α/2)/2)."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return math.sqrt(-0.5 * math.log(alpha / 2))


def compare_histograms(h1: EntanglementHistogram, h2: EntanglementHistogram,
                       alpha: Optional[float] = None) -> ComparisonVerdict:
    """
    Two-sample Kolmogorov-Smirnov comparison of two entanglement samples.

    Distinguishable samples mean the gates are LU-inequivalent; the converse
    does not follow.

    Raises:
        MeasureMismatch: the samples use different measures
    """
    alpha = DEFAULT_SETTINGS.ks_alpha if alpha is None else alpha
    if h1.measure is not h2.measure:
        raise MeasureMismatch(
            f"cannot compare {h1.measure.value} with {h2.measure.value}", 'compare_histograms')
    n, m = h1.samples, h2.samples
    if min(n, m) < 10_000:
        logger.warning("compare_histograms with %d and %d samples; the test wants ≥ 10⁴ each", n, m)

    result = ks_2samp(h1.sorted_values, h2.sorted_values)
    threshold = ks_critical_value(alpha) * math.sqrt((n + m) / (n * m))
    verdict = ComparisonVerdict(
        statistic=float(result.statistic),
        threshold=threshold,
        distinguishable=bool(result.statistic > threshold),
        sample_sizes=(n, m),
        alpha=alpha,
        pvalue=float(result.pvalue),
    )
    logger.info("KS D=%.5f threshold=%.5f -> %s", verdict.statistic, threshold,
                'distinguishable' if verdict.distinguishable else 'not distinguishable')
    return verdict


def linear_mean_check(U: np.ndarray, hist: EntanglementHistogram) -> LinearMeanCheck:
    """z-score of the sampled linear-entropy mean against its closed form."""
    if hist.measure is not Measure.LINEAR:
        raise MeasureMismatch("linear_mean_check needs linear-entropy samples", 'linear_mean_check')
    expected = linear_entropy_mean(U)
    error = hist.std / math.sqrt(hist.samples) if hist.samples > 1 else float('inf')
    z = (hist.mean - expected) / error if error > 0 else 0.0
    return LinearMeanCheck(expected=expected, observed=hist.mean, z_score=float(z))


def gamma_invariants(U: np.ndarray) -> np.ndarray:
    """Singular values of the partial transpose, descending; unchanged by local unitaries."""
    return np.sort(np.linalg.svd(partial_transpose(np.asarray(U)), compute_uv=False))[::-1]


# ---------------------------------------------------------------------------
# Permutation images
#
# Permutations are handled as zero-based image arrays, img[c] = row hit by
# column c, so that img(A·B) = img_A[img_B].

def _local_images(d: int) -> np.ndarray:
    """Images of all (d!)² local permutations p1⊗p2."""
    perms = np.array(list(itertools.permutations(range(d))))
    p1 = perms[:, None, :, None]
    p2 = perms[None, :, None, :]
    return (p1 * d + p2).reshape(-1, d * d)


def _swap_image(d: int) -> np.ndarray:
    i, j = np.divmod(np.arange(d * d), d)
    return j * d + i


def _latin_flags(images: np.ndarray, d: int) -> tuple[np.ndarray, np.ndarray]:
    """(dual, t_dual) for a stack of images, from the K/L repeat conditions."""
    k = (images // d).reshape(-1, d, d)
    l = (images % d).reshape(-1, d, d)
    target = np.arange(d)

    def distinct(tables: np.ndarray, axis: int) -> np.ndarray:
        return np.all(np.sort(tables, axis=axis) == (target[None, None, :] if axis == 2 else target[None, :, None]),
                      axis=(1, 2))

    dual = distinct(k, 2) & distinct(l, 1)
    t_dual = distinct(k, 1) & distinct(l, 2)
    return dual, t_dual


_FILTERS = ('dual', 't_dual', 'two_unitary')


def _filter_mask(images: np.ndarray, d: int, name: Optional[str]) -> np.ndarray:
    if name is None:
        return np.ones(len(images), dtype=bool)
    dual, t_dual = _latin_flags(images, d)
    return {'dual': dual, 't_dual': t_dual, 'two_unitary': dual & t_dual}[name]


def _dense_stack(images: np.ndarray, d: int) -> np.ndarray:
    n = d * d
    stack = np.zeros((len(images), n, n))
    rows = np.arange(len(images))[:, None]
    stack[rows, images, np.arange(n)[None, :]] = 1.0
    return stack


def local_permutation_orbit(P: PermutationGate, filter: Union[str, Callable, None] = None,
                            budget: Optional[int] = None, rng: Optional[RngStream] = None,
                            workers: int = 1) -> OrbitResult:
    """
    All distinct (p1⊗p2)·P·(p3⊗p4) over local permutations.

    Args:
        P: permutation gate
        filter: 'dual', 't_dual', 'two_unitary' or a predicate on
            PermutationGate applied to the distinct members
        budget: number of random conjugates drawn when d > 4; the result is
            then a lower bound
        rng: required for the sampled mode
        workers: threads over the outer (p1, p2) pairs

    Returns:
        OrbitResult with per-member hit counts
    """
    d = P.d
    base = P.image
    name = filter if isinstance(filter, str) else None
    if name is not None and name not in _FILTERS:
        raise ValueError(f"unknown orbit filter {filter!r}; use one of {_FILTERS}")

    if d <= 4:
        locals_ = _local_images(d)

        def outer(index: int) -> np.ndarray:
            candidates = locals_[index][base[locals_]]
            return candidates[_filter_mask(candidates, d, name)]

        if workers <= 1:
            chunks = [outer(k) for k in range(len(locals_))]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                chunks = list(pool.map(outer, range(len(locals_))))
        total = len(locals_) ** 2
        exhaustive = True
    else:
        if rng is None:
            raise ValueError("sampled orbit mode (d > 4) needs an RngStream")
        budget = budget or 100_000
        gen = rng.generator
        draws = np.array([gen.permutation(d) for _ in range(4 * budget)]).reshape(budget, 4, d)
        left = draws[:, 0, :, None] * d + draws[:, 1, None, :]
        right = draws[:, 2, :, None] * d + draws[:, 3, None, :]
        left, right = left.reshape(budget, -1), right.reshape(budget, -1)
        candidates = np.take_along_axis(left, base[right], axis=1)
        chunks = [candidates[_filter_mask(candidates, d, name)]]
        total = budget
        exhaustive = False
        logger.warning("orbit of %s sampled with %d draws; counts are lower bounds", P, budget)

    hits = np.concatenate(chunks) if chunks else np.empty((0, d * d), dtype=int)
    if len(hits) == 0:
        return OrbitResult(d=d, members=[], multiplicities=np.array([], dtype=int), total=total, exhaustive=exhaustive)
    unique, counts = np.unique(hits, axis=0, return_counts=True)
    members = [PermutationGate.from_images(d, img) for img in unique]
    if callable(filter):
        keep = [k for k, m in enumerate(members) if filter(m)]
        members, counts = [members[k] for k in keep], counts[keep]
    logger.info("orbit of %s: %d distinct members from %d conjugates", P, len(members), total)
    return OrbitResult(d=d, members=members, multiplicities=counts, total=total, exhaustive=exhaustive)


def _in_orbit(image: np.ndarray, target: np.ndarray, locals_: np.ndarray) -> bool:
    for left in locals_:
        if np.any(np.all(left[image[locals_]] == target, axis=1)):
            return True
    return False


def lus_search(P: PermutationGate, P_other: PermutationGate) -> bool:
    """
    True iff P_other is a local-permutation conjugate of P, SP, PS or SPS.

    Raises:
        ValueError: d > 4
    """
    if P.d != P_other.d:
        return False
    d = P.d
    if d > 4:
        raise ValueError("lus_search enumerates local permutations and needs d ≤ 4")
    swap = _swap_image(d)
    img = P.image
    variants = (img, swap[img], img[swap], swap[img[swap]])
    locals_ = _local_images(d)
    target = P_other.image
    return any(_in_orbit(v, target, locals_) for v in variants)


# ---------------------------------------------------------------------------
# Entangling classes

def _class_rows(d: int, images: np.ndarray, workers: int = 1, chunk: int = 20000) -> dict[int, list]:
    """ep key → [ep, gt, representative image, count] for a stack of dual images."""
    bins: dict[int, list] = {}
    for start in range(0, len(images), chunk):
        block = images[start:start + chunk]
        ep = entangling_power_batch(_dense_stack(block, d))
        keys = np.rint(ep * _EP_KEY_SCALE).astype(np.int64)
        unique, first, counts = np.unique(keys, return_index=True, return_counts=True)
        for key, index, count in zip(unique.tolist(), first.tolist(), counts.tolist()):
            if key in bins:
                bins[key][3] += count
            else:
                value = float(ep[index])
                # dual gates have E(U) = E(S), so gt = 1 − ep/2
                bins[key] = [value, 1.0 - value / 2, block[index].copy(), count]
    return bins


def _table(d: int, bins: dict[int, list], exhaustive: bool, scanned: int) -> ClassTable:
    rows = [ClassRow(ep=v[0], gt=v[1], representative=PermutationGate.from_images(d, v[2]), member_count=v[3])
            for _, v in sorted(bins.items())]
    return ClassTable(d=d, rows=rows, exhaustive=exhaustive, scanned=scanned)


def class_table_from_permutations(perms: Iterable[PermutationGate]) -> ClassTable:
    """Bin an explicit list of permutations by entangling power (non-dual ones are skipped)."""
    perms = list(perms)
    if not perms:
        raise ValueError("class_table_from_permutations needs at least one permutation")
    d = perms[0].d
    images = np.array([p.image for p in perms])
    dual, _ = _latin_flags(images, d)
    return _table(d, _class_rows(d, images[dual]), exhaustive=False, scanned=len(perms))


def _seed_images(d: int) -> list[np.ndarray]:
    seeds = [_swap_image(d), PermutationGate.from_dense(controlled_shift(d)).image]
    if d == 4:
        seeds.append(permutation('P16').image)
    elif d == 3:
        seeds.append(permutation('P9').image)
    return seeds


def sampled_class_search(d: int, budget: int, rng: RngStream, walkers: int = 256,
                         restart_every: int = 12, stay_probability: float = 0.3) -> ClassTable:
    """
    Entangling classes of dual permutations found by random transposition
    walks started from structured dual seeds (SWAP, controlled shift, and
    P9/P16 where available).

    Each step moves every walker by one random transposition of its image;
    moves into non-dual permutations are taken with stay_probability only,
    and walkers restart from a seed every restart_every steps. The result is
    a lower bound on the number of classes.
    """
    gen = rng.generator
    n = d * d
    seeds = _seed_images(d)
    bins = _class_rows(d, np.array(seeds))
    state = np.array([seeds[k % len(seeds)] for k in range(walkers)])
    scanned = len(seeds)
    step = 0
    while scanned < budget:
        step += 1
        if step % restart_every == 0:
            state = np.array([seeds[k] for k in gen.integers(0, len(seeds), walkers)])
        a = gen.integers(0, n, walkers)
        b = (a + gen.integers(1, n, walkers)) % n
        rows = np.arange(walkers)
        moved = state.copy()
        moved[rows, a], moved[rows, b] = state[rows, b], state[rows, a]

        dual, _ = _latin_flags(moved, d)
        if np.any(dual):
            for key, value in _class_rows(d, moved[dual]).items():
                if key in bins:
                    bins[key][3] += value[3]
                else:
                    bins[key] = value
        accept = dual | (gen.random(walkers) < stay_probability)
        state[accept] = moved[accept]
        scanned += walkers
    table = _table(d, bins, exhaustive=False, scanned=scanned)
    logger.info("sampled class search d=%d: %d classes from %d candidates (lower bound)",
                d, len(table.rows), scanned)
    return table


def _all_images(d: int, chunk: int = 50000):
    iterator = itertools.permutations(range(d * d))
    while True:
        block = list(itertools.islice(iterator, chunk))
        if not block:
            return
        yield np.array(block, dtype=np.int64)


def enumerate_dual_permutation_classes(d: int, budget: Optional[int] = None,
                                       rng: Optional[RngStream] = None) -> ClassTable:
    """
    Entangling classes of dual permutation gates.

    d = 2 and d = 3 scan every permutation of d² symbols and are exact;
    larger d falls back to sampled_class_search under the given budget.
    """
    if d <= 3:
        bins: dict[int, list] = {}
        scanned = 0
        for images in _all_images(d):
            scanned += len(images)
            dual, _ = _latin_flags(images, d)
            for key, value in _class_rows(d, images[dual]).items():
                if key in bins:
                    bins[key][3] += value[3]
                else:
                    bins[key] = value
        table = _table(d, bins, exhaustive=True, scanned=scanned)
        logger.info("exhaustive d=%d: %d dual entangling classes over %d permutations",
                    d, len(table.rows), scanned)
        return table
    if rng is None:
        rng = RngStream(DEFAULT_SETTINGS.seed)
    return sampled_class_search(d, budget or 1_000_000, rng)


def local_dressings(U: np.ndarray, count: int, rng: RngStream) -> list[np.ndarray]:
    """count independent random local-unitary copies of U."""
    return [local_dressing(U, stream)[0] for stream in rng.split(count)]


def dense_stack(perms: Sequence[PermutationGate]) -> np.ndarray:
    """Dense matrices of a list of permutations as one (N, d², d²) array."""
    d = perms[0].d
    return _dense_stack(np.array([p.image for p in perms]), d)


__all__ = [
    'ClassRow', 'ClassTable', 'ComparisonVerdict', 'EntanglementHistogram', 'LinearMeanCheck', 'Measure',
    'OrbitResult', 'class_table_from_permutations', 'compare_histograms', 'dense_stack',
    'enumerate_dual_permutation_classes', 'gamma_invariants', 'ks_critical_value', 'linear_mean_check',
    'local_dressings', 'local_permutation_orbit', 'lus_search', 'sample_product_entanglement',
    'sampled_class_search',
]
