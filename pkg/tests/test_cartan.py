import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from src import catalog
from src.cartan import (
    QUARTER_PI,
    CanonicalGate,
    CartanPoint,
    Convergence,
    Regime,
    c3_limit,
    canonical_gate,
    canonical_matrix,
    canonical_step,
    cartan_extract,
    cartan_step,
    cartan_trajectory,
    estimate_rate,
    chamber_grid,
    edge_cartan_step,
    edge_closed_form_report,
    edge_solution,
    edge_solution_reciprocal,
    edge_step,
    face_cartan_step,
    face_invariant,
    face_solution,
    face_step,
    fixed_point_sweep,
    reduced_coordinates,
    regime_classify,
    regime_report,
    weyl_fold,
    xxx_cartan_step,
    xxx_step,
    xxz_step,
)
from src.errors import DimensionError, RankDeficient
from src.linalg import phase_distance, sample_cue, unitarity_defect
from src.maps import MapKind, step

INTERIOR = (0.6, 0.3, 0.1)


def test_canonical_matrix_is_special_unitary():
    U = canonical_matrix(INTERIOR)
    assert unitarity_defect(U) < 1e-12
    assert_allclose(np.linalg.det(U), 1.0, atol=1e-12)
    assert all(v < 1e-12 for v in canonical_gate(INTERIOR).constraint_defects().values())


def test_from_matrix_reads_x_shape():
    g = canonical_gate(INTERIOR)
    assert CanonicalGate.from_matrix(g.to_matrix()) == g
    with pytest.raises(DimensionError):
        CanonicalGate.from_matrix(np.ones((4, 4)))


def test_gate_cartan_reads_back_coordinates():
    assert canonical_gate(INTERIOR).cartan().distance(CartanPoint(*INTERIOR)) < 1e-12


def test_weyl_fold_moves():
    assert_allclose(tuple(weyl_fold((-0.3, 0.6, 0.1))), (0.6, 0.3, -0.1), atol=1e-12)
    assert_allclose(tuple(weyl_fold((-0.3, 0.6, 0.1), mirror=True)), (0.6, 0.3, 0.1), atol=1e-12)
    assert_allclose(tuple(weyl_fold((QUARTER_PI + 0.1, 0.0, 0.0))), (QUARTER_PI - 0.1, 0.0, 0.0), atol=1e-12)
    assert_allclose(tuple(weyl_fold((QUARTER_PI, 0.2, -0.1))), (QUARTER_PI, 0.2, 0.1), atol=1e-12)
    assert weyl_fold((0.1, -0.5, 0.7)).in_chamber()


@pytest.mark.parametrize('name, expected', [
    ('CNOT', (QUARTER_PI, 0.0, 0.0)),
    ('DCNOT', (QUARTER_PI, QUARTER_PI, 0.0)),
    ('SWAP', (QUARTER_PI, QUARTER_PI, QUARTER_PI)),
])
def test_extract_named_gates(name, expected):
    assert_allclose(tuple(cartan_extract(catalog.named_gate(name))), expected, atol=1e-9)


def test_extract_recovers_canonical_point_under_locals(rng):
    U = canonical_matrix(INTERIOR)
    for stream in rng.split(5):
        u1, u2, v1, v2 = (sample_cue(2, stream) for _ in range(4))
        dressed = np.kron(u1, u2) @ U @ np.kron(v1, v2)
        assert_allclose(tuple(cartan_extract(dressed)), INTERIOR, atol=1e-9)


def test_extract_rejects_qutrits(p9):
    with pytest.raises(DimensionError):
        cartan_extract(p9)


def test_canonical_step_matches_matrix_map():
    g = canonical_gate(INTERIOR)
    assert phase_distance(canonical_step(g).to_matrix(), step(MapKind.MR, g.to_matrix())) < 1e-10


def test_cartan_step_matches_matrix_map():
    mapped = step(MapKind.MR, canonical_matrix(INTERIOR))
    from_matrix = weyl_fold(cartan_extract(mapped), mirror=True)
    assert from_matrix.distance(cartan_step(INTERIOR)) < 1e-9


def test_cartan_trajectory_tracks_matrix_map_for_twenty_steps():
    traj = cartan_trajectory(INTERIOR, 20)
    U = canonical_matrix(INTERIOR)
    for n in range(1, 21):
        U = step(MapKind.MR, U)
        assert weyl_fold(cartan_extract(U), mirror=True).distance(traj[n]) < 1e-8, n


def test_canonical_step_undefined_on_identity():
    with pytest.raises(RankDeficient):
        canonical_step(canonical_gate((0.0, 0.0, 0.0)))


def test_face_seed_one_step():
    seed = (QUARTER_PI, math.pi / 8, math.pi / 16)
    assert_allclose(face_cartan_step(seed[1], seed[2]), (0.602653, 0.264951), atol=1e-6)
    assert_allclose(tuple(cartan_step(seed)), (QUARTER_PI, 0.602653, 0.264951), atol=1e-6)
    assert_allclose(c3_limit(seed[1], seed[2]), 0.285929, atol=1e-6)


def test_face_trajectory_approaches_its_limit():
    seed = (QUARTER_PI, math.pi / 8, math.pi / 16)
    last = cartan_trajectory(seed, 200)[-1]
    assert_allclose(last.c2, QUARTER_PI, atol=1e-8)
    assert_allclose(last.c3, c3_limit(seed[1], seed[2]), atol=1e-8)


def test_face_invariant_and_closed_form():
    assert_allclose(face_invariant(QUARTER_PI, math.pi / 8), 0.5, atol=1e-12)
    y0, z0 = 0.7, 2.5
    omega = (1 + y0) / (1 + z0)
    y, z = y0, z0
    for n in range(1, 40):
        y, z = face_step(y, z)
        assert_allclose((1 + y) / (1 + z), omega, rtol=1e-12)
        assert_allclose(face_solution(n, y0, omega), y, rtol=1e-10)


def test_reduced_coordinates():
    r = reduced_coordinates((math.pi / 8, math.pi / 8, math.pi / 16))
    assert_allclose((r.x, r.y), (1.0, 1.0), atol=1e-12)
    assert_allclose(r.omega, face_invariant(math.pi / 8, math.pi / 16))


def test_xxx_maps():
    assert_allclose(xxx_step(1.0), 2 / (1 + math.sqrt(5)), atol=1e-12)
    c = math.pi / 8
    assert_allclose(1 / math.tan(2 * xxx_cartan_step(c)), xxx_step(1.0), atol=1e-12)
    with pytest.raises(ValueError):
        xxx_step(-1.0)


def test_edge_maps():
    c = 0.5
    y = 1 / math.tan(2 * c) ** 2
    assert_allclose(1 / math.tan(2 * edge_cartan_step(c)) ** 2, edge_step(y), rtol=1e-12)
    report = edge_closed_form_report(1.0, 50)
    assert report.matches == 'reciprocal'
    assert report.sqrt_error > 1e-3


def test_edge_closed_forms():
    assert edge_solution(0, 0.7) == 0.7
    assert_allclose(edge_solution(3, 1.0), 0.5, atol=1e-15)
    assert_allclose(edge_solution_reciprocal(3, 1.0), 0.25, atol=1e-15)


def test_xxz_step_collapses_base_plane():
    c, c3 = xxz_step(0.3, 0.0)
    assert_allclose(c, QUARTER_PI, atol=1e-15)
    assert c3 == 0.0


def test_xxz_dual_line_is_fixed():
    c, c3 = xxz_step(QUARTER_PI, 0.3)
    assert_allclose((c, c3), (QUARTER_PI, 0.3), atol=1e-12)


def test_xxz_deviation_shrinks_by_sin_2c3():
    eps, c3 = 1e-6, 0.3
    c, _ = xxz_step(QUARTER_PI - eps, c3)
    assert_allclose((QUARTER_PI - c) / eps, math.sin(2 * c3), rtol=1e-4)


@pytest.mark.parametrize('c, c3', [(0.5, 0.2), (0.4, 0.1), (0.7, 0.3)])
def test_xxz_step_matches_cartan_step(c, c3):
    c_next, c3_next = xxz_step(c, c3)
    assert_allclose(tuple(cartan_step((c, c, c3))), (c_next, c_next, c3_next), atol=1e-12)


def test_estimate_rate_on_exponential_approach():
    limit = CartanPoint(QUARTER_PI, QUARTER_PI, 0.2)
    traj = [CartanPoint(QUARTER_PI - 0.5 * math.exp(-0.3 * n),
                        QUARTER_PI - 0.4 * math.exp(-0.3 * n),
                        0.2 + 0.1 * math.exp(-0.3 * n)) for n in range(30)]
    estimate = estimate_rate(traj, limit)
    assert estimate.kinds == ('exponential',) * 3
    assert_allclose(estimate.xi, (0.3, 0.3, 0.3), atol=1e-8)
    assert estimate_rate(traj[:2], limit).kinds == ('undefined',) * 3


def test_c3_limit_rejects_edge():
    with pytest.raises(ValueError):
        c3_limit(0.3, 0.3)


@pytest.mark.parametrize('seed, regime, convergence', [
    ((QUARTER_PI, QUARTER_PI, 0.1), Regime.DUAL_EDGE, Convergence.FIXED),
    ((0.5, 0.3, 0.0), Regime.BASE_XY, Convergence.INSTANTANEOUS),
    ((0.3, 0.3, 0.3), Regime.XXX_EDGE, Convergence.ALGEBRAIC),
    ((QUARTER_PI, 0.3, 0.3), Regime.SWAP_CNOT_EDGE, Convergence.ALGEBRAIC),
    ((0.5, 0.3, 0.3), Regime.SWAP_LOCAL_CNOT_FACE, Convergence.ALGEBRAIC),
    ((0.5, 0.5, 0.2), Regime.SWAP_LOCAL_DCNOT_FACE, Convergence.EXPONENTIAL),
    ((QUARTER_PI, math.pi / 8, math.pi / 16), Regime.SWAP_CNOT_DCNOT_FACE, Convergence.EXPONENTIAL),
    ((math.pi / 6, math.pi / 8, math.pi / 12), Regime.INTERIOR, Convergence.EXPONENTIAL),
])
def test_regime_classify(seed, regime, convergence):
    row = regime_classify(seed)
    assert row.regime is regime
    assert row.predicted_convergence is convergence


def test_exponential_regimes_carry_rate():
    row = regime_classify((QUARTER_PI, math.pi / 8, math.pi / 16))
    assert_allclose(row.c3_limit, 0.285929, atol=1e-6)
    assert_allclose(row.rate, abs(math.log(math.sin(2 * row.c3_limit))), atol=1e-12)
    interior = regime_classify((math.pi / 6, math.pi / 8, math.pi / 12))
    assert 0 < interior.c3_limit < QUARTER_PI


def test_algebraic_regimes_carry_no_rate():
    for seed in ((0.3, 0.3, 0.3), (QUARTER_PI, 0.3, 0.3), (0.5, 0.3, 0.3)):
        row = regime_classify(seed)
        assert row.predicted_convergence is Convergence.ALGEBRAIC
        assert row.rate is None


def test_cnot_seed_is_flagged_undefined():
    row = regime_classify((QUARTER_PI, 0.0, 0.0))
    assert 'undefined' in row.note
    assert 'note:' in regime_report([row])


def test_regime_report_lists_rows():
    rows = [regime_classify((0.5, 0.3, 0.0)), regime_classify((0.3, 0.3, 0.3))]
    text = regime_report(rows)
    assert 'base_XY' in text and 'xxx_edge' in text
    assert len(text.splitlines()) == 4


def test_chamber_grid():
    grid = chamber_grid(3)
    assert len(grid) == 10
    assert all(p.in_chamber() for p in grid)


def test_fixed_point_sweep_small_grid():
    sweep = fixed_point_sweep(6)
    assert sweep.grid_points == len(chamber_grid(6))
    assert sweep.period_one_self_dual
    assert sweep.period_two_on_dual_line
    assert any(p.distance(CartanPoint(QUARTER_PI, QUARTER_PI, QUARTER_PI)) < 1e-12 for p in sweep.period_one)
