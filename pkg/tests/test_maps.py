import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from src import catalog
from src.linalg import RngStream, dense_swap, enphase, local_dressing, phase_distance, sample_cue, unitarity_defect
from src.maps import (
    MapKind,
    StopReason,
    StopRule,
    Target,
    block_structure,
    cue_seeds,
    detect_period,
    iterate,
    run_many,
    sample_block_dual,
    sample_diagonal_dual,
    step,
)
from src.measures import classify_duality


def test_map_kind_parse():
    assert MapKind.parse('MGammaR') is MapKind.MGAMMAR
    assert MapKind.parse('MΓR') is MapKind.MGAMMAR
    assert MapKind.parse('mr_stochastic') is MapKind.MR_STOCHASTIC
    assert MapKind.MR_STOCHASTIC.deterministic is MapKind.MR
    with pytest.raises(ValueError):
        MapKind.parse('MX')


def test_stop_rule_validation():
    with pytest.raises(ValueError):
        StopRule(max_iters=0)
    with pytest.raises(ValueError):
        StopRule(target_defect=0.0)
    with pytest.raises(ValueError):
        StopRule(store_every=0)


def test_step_rng_contract(swap2, rng):
    with pytest.raises(ValueError):
        step(MapKind.MR, swap2, rng)
    with pytest.raises(ValueError):
        step(MapKind.MR_STOCHASTIC, swap2)


def test_step_returns_unitary(rng):
    U = sample_cue(9, rng)
    for kind in (MapKind.MR, MapKind.MGAMMA, MapKind.MGAMMAR):
        assert unitarity_defect(step(kind, U)) < 1e-10
    assert unitarity_defect(step(MapKind.MR_STOCHASTIC, U, rng.child(1))) < 1e-10


def test_self_dual_gate_is_fixed(swap2):
    assert_allclose(step(MapKind.MR, swap2), swap2, atol=1e-12)
    assert detect_period(swap2, MapKind.MR) == 1


def test_two_unitary_periods(p9):
    assert detect_period(p9, MapKind.MR) == 2
    assert detect_period(p9, MapKind.MGAMMAR) == 1
    enphased = enphase(p9, RngStream(3))
    assert detect_period(enphased, MapKind.MGAMMAR) == 3


def test_non_dual_period_two_point():
    und = catalog.u_nd()
    assert not classify_duality(und).dual
    assert phase_distance(step(MapKind.MR, und), catalog.u_nd_prime()) < 1e-12
    assert np.linalg.norm(catalog.u_nd_from_prime() - und) < 1e-12
    assert detect_period(und, MapKind.MR) == 2


def test_local_orbit_covariance(rng):
    U = sample_cue(9, rng)
    dressed, (u1, u2, v1, v2) = local_dressing(U, rng.child(1))
    expected = np.kron(u1, v1.T) @ step(MapKind.MR, U) @ np.kron(u2.T, v2)
    assert_allclose(step(MapKind.MR, dressed), expected, atol=1e-9)


def test_two_qubit_realignment_converges_to_dual(rng):
    traj = iterate(MapKind.MR, sample_cue(4, rng), StopRule(target_defect=1e-8))
    assert traj.converged
    assert traj.last.dual_defect <= 1e-8
    assert classify_duality(traj.final).dual
    assert traj.steps[0].iteration == 0


def test_iterate_on_dual_seed_stops_immediately(swap2):
    traj = iterate(MapKind.MR, swap2)
    assert traj.converged
    assert traj.iterations == 0
    assert len(traj.steps) == 1


def test_iterate_records_rank_deficiency():
    traj = iterate(MapKind.MR, np.eye(4))
    assert traj.stop_reason is StopReason.RANK_DEFICIENT
    assert traj.note.startswith('step[MR]')
    assert_allclose(traj.final, np.eye(4))


def test_iterate_stores_every_nth_step(rng):
    stop = StopRule(max_iters=20, target_defect=1e-300, store_every=5, store_unitaries=True)
    traj = iterate(MapKind.MR, sample_cue(9, rng), stop)
    assert traj.stop_reason is StopReason.MAX_ITERS
    assert [s.iteration for s in traj.steps] == [0, 5, 10, 15, 20]
    assert all(s.unitary is not None for s in traj.steps)


def test_stochastic_iterate_is_reproducible():
    U0 = sample_cue(9, RngStream(2))
    stop = StopRule(max_iters=60, polish_iters=20, target=Target.TWO_UNITARY, target_defect=1e-300)
    a = iterate(MapKind.MGAMMAR_STOCHASTIC, U0, stop, RngStream(8))
    b = iterate(MapKind.MGAMMAR_STOCHASTIC, U0, stop, RngStream(8))
    assert_array_equal(a.final, b.final)
    assert a.iterations == 60


def test_run_many_is_independent_of_worker_count():
    seeds = cue_seeds(2, 4, RngStream(11))
    stop = StopRule(max_iters=50, store_every=10)
    serial = run_many(MapKind.MR, seeds, stop, workers=1)
    threaded = run_many(MapKind.MR, seeds, stop, workers=3)
    for a, b in zip(serial, threaded):
        assert_array_equal(a.final, b.final)
        assert a.iterations == b.iterations


def test_dual_ensembles(rng):
    diagonal = sample_diagonal_dual(3, rng.child(1))
    block = sample_block_dual(3, rng.child(2))
    assert classify_duality(diagonal).dual
    assert classify_duality(block).dual

    assert block_structure(block).sizes == (3, 3, 3)
    assert block_structure(block).multiples_of_d
    assert block_structure(diagonal).sizes == (1,) * 9
    assert not block_structure(diagonal).multiples_of_d


def test_block_structure_of_swap_is_trivial():
    structure = block_structure(dense_swap(3))
    assert structure.sizes == (1,) * 9
    assert structure.labels.shape == (9,)


@pytest.mark.slow
def test_stochastic_realignment_limits_survive_enphasing():
    stop = StopRule(max_iters=5000, target_defect=1e-10)
    kicks = RngStream(22)
    limits = []
    for k, U0 in enumerate(cue_seeds(3, 4, RngStream(21))):
        traj = iterate(MapKind.MR_STOCHASTIC, U0, stop, kicks.child(k))
        if traj.converged:
            limits.append(traj.final)
    assert limits
    for k, U in enumerate(limits):
        assert classify_duality(U).dual
        assert classify_duality(enphase(U, RngStream(100 + k)), tol=1e-6).dual
