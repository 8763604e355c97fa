"""
Two-qubit canonical forms and the realignment map restricted to them.

A two-qubit gate is LU-equivalent to exp[-i Σ c_k σ_k⊗σ_k] for a point
(c1, c2, c3) of the Weyl chamber π/4 ≥ c1 ≥ c2 ≥ |c3|. The canonical matrix
has the X shape

    [[α, 0, 0, β],
     [0, δ, γ, 0],
     [0, γ, δ, 0],
     [β, 0, 0, α]]

and the realignment map sends X-shaped matrices to X-shaped matrices, so it
reduces to a map on (α, β, γ, δ) and further to a map on the chamber.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np

from .config import DEFAULT_SETTINGS
from .errors import DimensionError, RankDeficient
from .linalg import local_dim
from .maps import MapKind, detect_period
from .measures import classify_duality

logger = logging.getLogger(__name__)

QUARTER_PI = np.pi / 4

# Columns are the magic basis states; canonical gates are diagonal in it
MAGIC = np.array([
    [1, 0, 0, 1j],
    [0, 1j, 1, 0],
    [0, 1j, -1, 0],
    [1, 0, 0, -1j],
], dtype=complex) / np.sqrt(2)

# Below this modulus a denominator of the canonical step counts as zero
_STEP_FLOOR = 1e-12
_FOLD_TOL = 1e-10


@dataclass(frozen=True)
class CartanPoint:
    c1: float
    c2: float
    c3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3])

    def in_chamber(self, tol: float = 1e-12) -> bool:
        return QUARTER_PI + tol >= self.c1 >= self.c2 - tol and self.c2 + tol >= abs(self.c3)

    def distance(self, other: 'CartanPoint') -> float:
        return float(np.max(np.abs(self.as_array() - other.as_array())))

    def __iter__(self):
        return iter((self.c1, self.c2, self.c3))


@dataclass(frozen=True)
class CanonicalGate:
    """Entries of the X-shaped canonical matrix."""
    alpha: complex
    beta: complex
    gamma: complex
    delta: complex

    def to_matrix(self) -> np.ndarray:
        a, b, g, d = self.alpha, self.beta, self.gamma, self.delta
        return np.array([
            [a, 0, 0, b],
            [0, d, g, 0],
            [0, g, d, 0],
            [b, 0, 0, a],
        ], dtype=complex)

    @classmethod
    def from_matrix(cls, U: np.ndarray, tol: float = 1e-10) -> 'CanonicalGate':
        """
        Read the entries of an X-shaped 4×4 matrix.

        Raises:
            DimensionError: U is not 4×4 or has weight outside the X pattern
        """
        U = np.asarray(U, dtype=complex)
        if local_dim(U, 'CanonicalGate.from_matrix') != 2:
            raise DimensionError("canonical gates are 4×4", 'CanonicalGate.from_matrix')
        gate = cls(alpha=U[0, 0], beta=U[0, 3], gamma=U[1, 2], delta=U[1, 1])
        if np.linalg.norm(U - gate.to_matrix()) > tol:
            raise DimensionError("matrix is not of the X-shaped canonical form", 'CanonicalGate.from_matrix')
        return gate

    def constraint_defects(self) -> dict[str, float]:
        """Residuals of the unitarity and SU conditions; all vanish for a valid gate."""
        a, b, g, d = self.alpha, self.beta, self.gamma, self.delta
        return {
            'outer_norm': abs(abs(a) ** 2 + abs(b) ** 2 - 1),
            'inner_norm': abs(abs(g) ** 2 + abs(d) ** 2 - 1),
            'outer_phase': abs((a * np.conj(b)).real),
            'inner_phase': abs((g * np.conj(d)).real),
            'special': abs((a ** 2 - b ** 2) * (d ** 2 - g ** 2) - 1),
        }

    def angles(self) -> tuple[float, float, float, float]:
        """θ± = Arg(α ± δ) and φ± = Arg(β ± γ)."""
        a, b, g, d = self.alpha, self.beta, self.gamma, self.delta
        return (float(np.angle(a + d)), float(np.angle(a - d)),
                float(np.angle(b + g)), float(np.angle(b - g)))

    def cartan(self, mirror: bool = False) -> CartanPoint:
        """
        Chamber point of this gate, read off the four eigenphases
        α ± β and δ ± γ.
        """
        A = np.angle(self.alpha + self.beta)
        B = np.angle(self.alpha - self.beta)
        C = np.angle(self.delta + self.gamma)
        D = np.angle(self.delta - self.gamma)
        diff = (B - A) / 2   # c1 − c2
        total = (D - C) / 2  # c1 + c2
        c3 = (C + D - A - B) / 4
        return weyl_fold(((total + diff) / 2, (total - diff) / 2, c3), mirror=mirror)


def weyl_fold(c: Iterable[float], mirror: bool = False, tol: float = _FOLD_TOL) -> CartanPoint:
    """
    Move any real triple into the Weyl chamber with local moves.

    The moves are π/2 shifts of one coordinate, permutations, and sign flips
    of two coordinates at once. When c1 = π/4 the sign of c3 is also free.

    Args:
        c: real triple
        mirror: identify c3 with −c3 (the complex-conjugate gate)
        tol: snapping tolerance for the π/4 boundary

    Returns:
        CartanPoint in the chamber
    """
    v = np.asarray(list(c), dtype=float)
    # into (−π/4, π/4]
    v = QUARTER_PI - np.mod(QUARTER_PI - v, np.pi / 2)
    v[np.abs(v + QUARTER_PI) < tol] = QUARTER_PI
    v = v[np.argsort(-np.abs(v), kind='stable')]

    negative = int(np.count_nonzero(v < 0))
    v = np.abs(v)
    if negative % 2 == 1 and not mirror:
        v[2] = -v[2]
    if mirror or abs(v[0] - QUARTER_PI) < tol:
        v[2] = abs(v[2])
    v[np.abs(v) < tol] = 0.0
    logger.debug("weyl_fold %s -> %s", list(c), v)
    return CartanPoint(float(v[0]), float(v[1]), float(v[2]))


def canonical_gate(c) -> CanonicalGate:
    """α, β, γ, δ of exp[-i Σ c_k σ_k⊗σ_k]."""
    c1, c2, c3 = c
    c_minus, c_plus = np.cos(c1 - c2), np.cos(c1 + c2)
    s_minus, s_plus = np.sin(c1 - c2), np.sin(c1 + c2)
    return CanonicalGate(
        alpha=np.exp(-1j * c3) * c_minus,
        beta=-1j * np.exp(-1j * c3) * s_minus,
        gamma=-1j * np.exp(1j * c3) * s_plus,
        delta=np.exp(1j * c3) * c_plus,
    )


def canonical_matrix(c) -> np.ndarray:
    """
    Explicit 4×4 matrix of exp[-i Σ c_k σ_k⊗σ_k]; any real triple is
    accepted and the determinant is 1.
    """
    return canonical_gate(c).to_matrix()


def cartan_extract(U: np.ndarray) -> CartanPoint:
    """
    Chamber coordinates of a two-qubit unitary.

    The gate is normalized to determinant 1 and moved to the magic basis
    (m = Q†UQ); the eigenvalues of mᵀm are exp(−2iλ_k), where λ_k are the
    eigenphases of Σ c_k σ_k⊗σ_k. Every branch and ordering choice in
    recovering c from λ is one of the local moves undone by weyl_fold.
    """
    U = np.asarray(U, dtype=complex)
    if local_dim(U, 'cartan_extract') != 2:
        raise DimensionError("cartan_extract needs a 4×4 unitary", 'cartan_extract')

    U4 = U / np.linalg.det(U) ** 0.25
    m = MAGIC.conj().T @ U4 @ MAGIC
    mu = np.linalg.eigvals(m.T @ m)
    theta = -np.angle(mu) / 2
    theta[3] = -(theta[0] + theta[1] + theta[2])
    raw = ((theta[0] + theta[1]) / 2, (theta[1] + theta[2]) / 2, (theta[0] + theta[2]) / 2)
    return weyl_fold(raw)


def _check_denominators(values: Sequence[complex], operation: str):
    smallest = min(abs(v) for v in values)
    if smallest < _STEP_FLOOR:
        raise RankDeficient(
            f"canonical step denominator {smallest:.3e} vanishes",
            operation,
            smallest=float(smallest),
        )


def canonical_step(g: CanonicalGate) -> CanonicalGate:
    """
    Realignment map on the X-shaped entries.

    With p± = (α ± δ)/|α ± δ| and q± = (β ± γ)/|β ± γ|, the polar factor of
    the realigned matrix has α' = (p₊ + p₋)/2, β' = (p₊ − p₋)/2,
    δ' = (q₊ + q₋)/2, γ' = (q₊ − q₋)/2. The common factor e^{−iχ/4},
    χ = Arg[(α² − δ²)(β² − γ²)], keeps the result special unitary.

    Raises:
        RankDeficient: any |α ± δ| or |β ± γ| below 1e-12
    """
    a, b, gm, d = g.alpha, g.beta, g.gamma, g.delta
    sums = (a + d, a - d, b + gm, b - gm)
    _check_denominators(sums, 'canonical_step')
    p_plus, p_minus, q_plus, q_minus = (s / abs(s) for s in sums)
    chi = np.angle((a ** 2 - d ** 2) * (b ** 2 - gm ** 2))
    phase = np.exp(-1j * chi / 4)
    return CanonicalGate(
        alpha=phase * (p_plus + p_minus) / 2,
        beta=phase * (p_plus - p_minus) / 2,
        gamma=phase * (q_plus - q_minus) / 2,
        delta=phase * (q_plus + q_minus) / 2,
    )


def cartan_step(c, odd: bool = False) -> CartanPoint:
    """
    One step of the realignment map on chamber coordinates.

    Args:
        c: current chamber point
        odd: parity of the step index; odd steps replace c2 by π/2 − c2 in
            the raw coordinates before folding

    Returns:
        Next point, folded into the chamber with c3 ≥ 0

    Raises:
        RankDeficient: as canonical_step
    """
    g = canonical_gate(tuple(c))
    _check_denominators((g.alpha + g.delta, g.alpha - g.delta, g.beta + g.gamma, g.beta - g.gamma), 'cartan_step')
    theta_p, theta_m, phi_p, phi_m = g.angles()
    c1 = (-theta_p + theta_m - phi_p + phi_m) / 4
    c2 = (theta_p - theta_m - phi_p + phi_m) / 4
    c3 = (-theta_p - theta_m + phi_p + phi_m) / 4
    if odd:
        c2 = np.pi / 2 - c2
    return weyl_fold((c1, c2, c3), mirror=True)


def cartan_trajectory(c0, steps: int) -> list[CartanPoint]:
    """c0 followed by `steps` iterates of cartan_step, parity tracked per step."""
    point = c0 if isinstance(c0, CartanPoint) else CartanPoint(*c0)
    points = [point]
    for n in range(steps):
        point = cartan_step(point, odd=(n % 2 == 1))
        points.append(point)
    return points


def cartan_limit(c0, steps: int = 400) -> CartanPoint:
    """Last point of a long trajectory, the numerical limit on the dual line."""
    return cartan_trajectory(c0, steps)[-1]


# ---------------------------------------------------------------------------
# Reduced algebraic maps

@dataclass(frozen=True)
class ReducedCoordinates:
    """x = 1/tan 2c1, y = 1/tan² 2c2, z = 1/tan² 2c3 and Ω = (1+y)/(1+z)."""
    x: float
    y: float
    z: float
    omega: float


def _inv_tan_sq(angle: float) -> float:
    t = np.tan(2 * angle)
    return float(np.inf) if t == 0 else float(1.0 / t ** 2)


def reduced_coordinates(c) -> ReducedCoordinates:
    c1, c2, c3 = c
    t1 = np.tan(2 * c1)
    y, z = _inv_tan_sq(c2), _inv_tan_sq(c3)
    omega = face_invariant(c2, c3)
    return ReducedCoordinates(
        x=float(np.inf) if t1 == 0 else float(1.0 / t1),
        y=y,
        z=z,
        omega=omega,
    )


def xxx_step(x: float) -> float:
    """Edge c1 = c2 = c3 in the variable x = 1/tan 2c."""
    if x < 0:
        raise ValueError(f"xxx_step needs x ≥ 0, got {x}")
    return 2 * x / (1 + np.sqrt(4 * x * x + 1))


def xxx_cartan_step(c: float) -> float:
    """xxx_step written on the angle: c' = π/4 − arctan(2/tan 2c)/4."""
    return QUARTER_PI - np.arctan(2 / np.tan(2 * c)) / 4


def face_step(y: float, z: float) -> tuple[float, float]:
    """Face c1 = π/4 in y = 1/tan² 2c2, z = 1/tan² 2c3."""
    return y / (1 + z), z / (1 + y)


def face_invariant(c2: float, c3: float) -> float:
    """Ω = sin²(2c3)/sin²(2c2), conserved by face_step."""
    return float(np.sin(2 * c3) ** 2 / np.sin(2 * c2) ** 2)


def face_solution(n: int, y0: float, omega: float) -> float:
    """Closed form of the n-th face iterate of y."""
    if abs(1 - omega) < 1e-15:
        return edge_solution_reciprocal(n, y0)
    power = omega ** n
    return power * y0 / (1 + (1 - power) / (1 - omega) * y0)


def face_cartan_step(c2: float, c3: float) -> tuple[float, float]:
    """face_step mapped back to angles in [0, π/4]."""
    y, z = face_step(_inv_tan_sq(c2), _inv_tan_sq(c3))
    return float(np.arctan2(1.0, np.sqrt(y)) / 2), float(np.arctan2(1.0, np.sqrt(z)) / 2)


def c3_limit(c2: float, c3: float) -> float:
    """
    Limit of c3 for a seed on the face c1 = π/4 with c3 < c2.

    Raises:
        ValueError: c3 = c2 (Ω = 1); that edge converges to SWAP, see edge_step
    """
    s2, s3 = np.sin(2 * c2) ** 2, np.sin(2 * c3) ** 2
    if s2 - s3 <= 0:
        raise ValueError("c3_limit needs |c3| < c2; the c2 = c3 edge goes to SWAP")
    return float(np.arctan(np.sin(2 * abs(c3)) / np.sqrt(s2 - s3)) / 2)


def edge_step(y: float) -> float:
    """Edge c1 = π/4, c2 = c3."""
    return y / (1 + y)


def edge_cartan_step(c: float) -> float:
    """edge_step on the angle: c' = arctan(1/cos 2c)/2."""
    return float(np.arctan(1 / np.cos(2 * c)) / 2)


def edge_solution(n: int, y0: float) -> float:
    """The closed form y0/√(n·y0² + 1) quoted for the edge map."""
    return y0 / np.sqrt(n * y0 * y0 + 1)


def edge_solution_reciprocal(n: int, y0: float) -> float:
    """y0/(1 + n·y0): 1/y grows by exactly one per edge step."""
    return y0 / (1 + n * y0)


@dataclass(frozen=True)
class EdgeClosedFormReport:
    y0: float
    n: int
    direct: float
    sqrt_form: float
    reciprocal_form: float

    @property
    def sqrt_error(self) -> float:
        return abs(self.sqrt_form - self.direct)

    @property
    def reciprocal_error(self) -> float:
        return abs(self.reciprocal_form - self.direct)

    @property
    def matches(self) -> str:
        """'reciprocal', 'sqrt' or 'neither' at relative tolerance 1e-10."""
        scale = max(abs(self.direct), 1e-300)
        if self.reciprocal_error / scale < 1e-10:
            return 'reciprocal'
        if self.sqrt_error / scale < 1e-10:
            return 'sqrt'
        return 'neither'


def edge_closed_form_report(y0: float, n: int) -> EdgeClosedFormReport:
    """Compare both edge closed forms against n direct edge steps."""
    y = y0
    for _ in range(n):
        y = edge_step(y)
    report = EdgeClosedFormReport(
        y0=y0, n=n, direct=y,
        sqrt_form=edge_solution(n, y0),
        reciprocal_form=edge_solution_reciprocal(n, y0),
    )
    logger.info("edge closed form at n=%d, y0=%g: direct matches %s", n, y0, report.matches)
    return report


def xxz_step(c: float, c3: float) -> tuple[float, float]:
    """Face c1 = c2 = c, written on (c, c3)."""
    t2 = np.tan(c) ** 2
    c_next = QUARTER_PI - np.arctan(0.5 * np.sin(2 * c3) * (1 / t2 - t2)) / 4
    c3_next = c3 / 2 + np.arctan(0.5 * np.tan(2 * c3) * (1 / t2 + t2)) / 4
    return float(c_next), float(c3_next)


# ---------------------------------------------------------------------------
# Rates and regimes

@dataclass(frozen=True)
class RateEstimate:
    """
    Per-coordinate convergence fits.

    xi holds exponential rates (None where the trajectory is algebraic or
    too short); exponents holds power-law exponents where that fit won.
    """
    xi: tuple[Optional[float], Optional[float], Optional[float]]
    exponents: tuple[Optional[float], Optional[float], Optional[float]]
    kinds: tuple[str, str, str]


def _fit_decay(n: np.ndarray, delta: np.ndarray) -> tuple[str, Optional[float], Optional[float]]:
    keep = delta > 1e-12
    n, delta = n[keep], delta[keep]
    if n.size < 3:
        return 'undefined', None, None
    start = int(np.floor(0.4 * n.size))
    n, log_delta = n[start:], np.log(delta[start:])
    if n.size < 3:
        return 'undefined', None, None

    exp_coef, exp_res, *_ = np.polyfit(n, log_delta, 1, full=True)
    positive = n > 0
    if np.count_nonzero(positive) < 3:
        return 'exponential', float(-exp_coef[0]), None
    pow_coef, pow_res, *_ = np.polyfit(np.log(n[positive]), log_delta[positive], 1, full=True)
    exp_err = float(exp_res[0]) if exp_res.size else 0.0
    pow_err = float(pow_res[0]) if pow_res.size else 0.0
    if exp_err <= pow_err:
        return 'exponential', float(-exp_coef[0]), None
    return 'algebraic', None, float(-pow_coef[0])


def estimate_rate(traj: Sequence[CartanPoint], limit: Optional[CartanPoint] = None) -> RateEstimate:
    """
    Fit the approach of a trajectory to the dual line.

    Δc1 = π/4 − c1, Δc2 = π/4 − c2 and Δc3 = |c3∞ − c3| are fitted against n
    (exponential) and against ln n (power law) over the last 60% of points
    with Δ > 1e-12; the fit with the smaller residual wins.

    Args:
        traj: chamber points indexed by step
        limit: the limit point; defaults to (π/4, π/4, last c3), which only
            suits trajectories long enough for c3 to have settled
    """
    points = np.array([p.as_array() for p in traj])
    if limit is None:
        limit = CartanPoint(QUARTER_PI, QUARTER_PI, float(points[-1, 2]))
    n = np.arange(len(points), dtype=float)
    deltas = np.abs(limit.as_array()[None, :] - points)

    fits = [_fit_decay(n, deltas[:, k]) for k in range(3)]
    estimate = RateEstimate(
        xi=tuple(f[1] for f in fits),
        exponents=tuple(f[2] for f in fits),
        kinds=tuple(f[0] for f in fits),
    )
    logger.info("estimate_rate: %s", estimate)
    return estimate


class Regime(Enum):
    BASE_XY = 'base_XY'
    XXX_EDGE = 'xxx_edge'
    SWAP_LOCAL_CNOT_FACE = 'swap_local_cnot_face'
    SWAP_LOCAL_DCNOT_FACE = 'swap_local_dcnot_face'
    SWAP_CNOT_DCNOT_FACE = 'swap_cnot_dcnot_face'
    SWAP_CNOT_EDGE = 'swap_cnot_edge'
    DUAL_EDGE = 'dual_edge'
    INTERIOR = 'interior'


class Convergence(Enum):
    INSTANTANEOUS = 'instantaneous'
    ALGEBRAIC = 'algebraic'
    EXPONENTIAL = 'exponential'
    FIXED = 'fixed'


@dataclass(frozen=True)
class RegimeRow:
    seed: CartanPoint
    regime: Regime
    predicted_convergence: Convergence
    approached: str
    rate: Optional[float] = None
    c3_limit: Optional[float] = None
    note: str = ''


def _rate_from_limit(c3_inf: float) -> float:
    s = np.sin(2 * c3_inf)
    return float(np.inf) if s <= 0 else float(abs(np.log(s)))


def regime_classify(c0, tol: Optional[float] = None) -> RegimeRow:
    """
    Convergence regime of a seed from its chamber location.

    Equalities are tested at tol (default 1e-12). Exponential regimes carry
    c3∞ and ξ = |ln sin 2c3∞|; c3∞ comes from the closed form on the face
    c1 = π/4 and from iterating cartan_step elsewhere.
    """
    tol = DEFAULT_SETTINGS.equality_tol if tol is None else tol
    seed = c0 if isinstance(c0, CartanPoint) else CartanPoint(*c0)
    c1, c2, c3 = seed.c1, seed.c2, abs(seed.c3)

    def eq(a, b):
        return abs(a - b) <= tol

    note = ''
    if eq(c2, 0.0) and eq(c3, 0.0):
        note = 'realignment has Schmidt rank < 4; the map is undefined at this seed'

    if eq(c1, QUARTER_PI) and eq(c2, QUARTER_PI):
        return RegimeRow(seed, Regime.DUAL_EDGE, Convergence.FIXED, 'itself', c3_limit=c3,
                         rate=_rate_from_limit(c3))
    if eq(c3, 0.0) and c2 > tol:
        return RegimeRow(seed, Regime.BASE_XY, Convergence.INSTANTANEOUS, 'DCNOT',
                         rate=float(np.inf), c3_limit=0.0)
    if eq(c1, c2) and eq(c2, c3):
        return RegimeRow(seed, Regime.XXX_EDGE, Convergence.ALGEBRAIC, 'SWAP',
                         c3_limit=QUARTER_PI, note=note)
    if eq(c2, c3):
        regime = Regime.SWAP_CNOT_EDGE if eq(c1, QUARTER_PI) else Regime.SWAP_LOCAL_CNOT_FACE
        return RegimeRow(seed, regime, Convergence.ALGEBRAIC, 'SWAP',
                         c3_limit=QUARTER_PI, note=note)

    if eq(c1, c2):
        regime = Regime.SWAP_LOCAL_DCNOT_FACE
        c3_inf = abs(cartan_limit(seed).c3)
    elif eq(c1, QUARTER_PI):
        regime = Regime.SWAP_CNOT_DCNOT_FACE
        c3_inf = c3_limit(c2, c3)
    else:
        regime = Regime.INTERIOR
        c3_inf = abs(cartan_limit(seed).c3)
    return RegimeRow(seed, regime, Convergence.EXPONENTIAL, 'generic',
                     rate=_rate_from_limit(c3_inf), c3_limit=c3_inf)


def regime_report(rows: Iterable[RegimeRow]) -> str:
    """Plain-text table: seed, location, dual gate approached, convergence, rate."""
    header = f"{'seed (c1, c2, c3)':<30} {'regime':<24} {'approaches':<12} {'convergence':<14} {'c3_inf':>9} {'xi':>9}"
    lines = [header, '-' * len(header)]
    for row in rows:
        seed = f"({row.seed.c1:.4f}, {row.seed.c2:.4f}, {row.seed.c3:.4f})"
        c3_inf = '' if row.c3_limit is None else f"{row.c3_limit:.4f}"
        rate = '' if row.rate is None else ('inf' if np.isinf(row.rate) else f"{row.rate:.4f}")
        lines.append(
            f"{seed:<30} {row.regime.value:<24} {row.approached:<12} "
            f"{row.predicted_convergence.value:<14} {c3_inf:>9} {rate:>9}"
        )
        if row.note:
            lines.append(f"{'':<30} note: {row.note}")
    return '\n'.join(lines)


# ---------------------------------------------------------------------------
# Fixed-point sweeps

def chamber_grid(n: int) -> list[CartanPoint]:
    """Points with coordinates on an n-point grid of [0, π/4] and π/4 ≥ c1 ≥ c2 ≥ c3 ≥ 0."""
    axis = np.linspace(0.0, QUARTER_PI, n)
    return [
        CartanPoint(float(axis[i]), float(axis[j]), float(axis[k]))
        for i in range(n)
        for j in range(i + 1)
        for k in range(j + 1)
    ]


@dataclass
class FixedPointSweep:
    grid_points: int
    period_one: list[CartanPoint] = field(default_factory=list)
    period_two: list[CartanPoint] = field(default_factory=list)
    period_one_self_dual: bool = True
    period_two_on_dual_line: bool = True


def _period_of(point: CartanPoint, tol: float) -> Optional[int]:
    return detect_period(canonical_matrix(tuple(point)), MapKind.MR, max_period=2, tol=tol)


def fixed_point_sweep(n: int = 50, tol: float = 1e-7, workers: int = 1) -> FixedPointSweep:
    """
    Period-1 and period-2 points of the realignment map over chamber_grid(n).

    Period-1 points must be self-dual and period-2 points must lie on
    c1 = c2 = π/4; both checks are reported on the result.
    """
    grid = chamber_grid(n)
    if workers <= 1:
        periods = [_period_of(p, tol) for p in grid]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            periods = list(pool.map(lambda p: _period_of(p, tol), grid))

    sweep = FixedPointSweep(grid_points=len(grid))
    for point, period in zip(grid, periods):
        if period == 1:
            sweep.period_one.append(point)
            if not classify_duality(canonical_matrix(tuple(point)), tol=tol).self_dual:
                sweep.period_one_self_dual = False
        elif period == 2:
            sweep.period_two.append(point)
            if abs(point.c1 - QUARTER_PI) > 1e-8 or abs(point.c2 - QUARTER_PI) > 1e-8:
                sweep.period_two_on_dual_line = False

    logger.info("fixed_point_sweep n=%d: %d points, %d period-1, %d period-2",
                n, len(grid), len(sweep.period_one), len(sweep.period_two))
    return sweep
