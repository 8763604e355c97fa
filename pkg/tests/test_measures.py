import numpy as np
import pytest
from numpy.testing import assert_allclose

from src import catalog
from src.linalg import dense_swap, local_dressing, sample_cue
from src.measures import (
    ame_purities,
    classify_duality,
    entangling_power,
    entangling_power_batch,
    gate_typicality,
    linear_entropy_mean,
    measure_set,
    operator_entanglement,
    schmidt_spectrum,
    swap_entanglement,
    swapped_entanglement,
)


@pytest.mark.parametrize('d', [2, 3, 4, 5])
def test_swap_has_maximal_operator_entanglement(d):
    assert_allclose(operator_entanglement(dense_swap(d)), 1 - 1 / d ** 2, atol=1e-12)
    assert swap_entanglement(d) == 1 - 1 / d ** 2


def test_swap_and_identity_measures():
    swap = measure_set(dense_swap(3))
    assert_allclose((swap.ep, swap.gt), (0.0, 1.0), atol=1e-12)
    ident = measure_set(np.eye(9))
    assert_allclose((ident.e_op, ident.ep, ident.gt), (0.0, 0.0, 0.0), atol=1e-12)


def test_cnot_measures(cnot):
    m = measure_set(cnot)
    assert_allclose(m.e_op, 0.5, atol=1e-12)
    assert_allclose(m.e_op_swapped, 0.75, atol=1e-12)
    assert_allclose(m.ep, 2 / 3, atol=1e-10)
    assert_allclose(gate_typicality(cnot), 1 / 3, atol=1e-12)


def test_u9_entangling_power_and_typicality():
    U9 = catalog.u9()
    assert_allclose(entangling_power(U9), 0.75, atol=1e-10)
    assert_allclose(gate_typicality(U9), 0.625, atol=1e-10)


def test_two_unitary_has_unit_entangling_power(p9):
    m = measure_set(p9)
    assert_allclose((m.ep, m.gt), (1.0, 0.5), atol=1e-12)


def test_schmidt_weights_sum_to_d_squared(rng):
    U = sample_cue(9, rng)
    spectrum = schmidt_spectrum(U)
    assert_allclose(spectrum.values.sum(), 9.0, atol=1e-10)
    assert np.all(np.diff(spectrum.values) <= 1e-12)
    assert schmidt_spectrum(np.eye(4)).rank == 1
    assert schmidt_spectrum(dense_swap(2)).rank == 4


def test_swapped_entanglement_is_operator_entanglement_of_us(rng):
    U = sample_cue(9, rng)
    assert_allclose(swapped_entanglement(U), operator_entanglement(U @ dense_swap(3)), atol=1e-12)


def test_batch_matches_single(rng):
    stack = np.array([sample_cue(9, s) for s in rng.split(4)])
    assert_allclose(entangling_power_batch(stack), [entangling_power(U) for U in stack], atol=1e-12)


def test_classify_duality_labels(swap2, cnot, p9):
    swap = classify_duality(swap2)
    assert swap.dual and swap.self_dual and not swap.t_dual
    assert swap.label() == 'self-dual'

    c = classify_duality(cnot)
    assert c.t_dual and not c.dual
    assert c.label() == 't-dual'

    p = classify_duality(p9)
    assert p.two_unitary
    assert p.label() == '2-unitary'
    assert max(p.dual_defect, p.t_dual_defect) < 1e-12


def test_generic_unitary_is_generic(rng):
    flags = classify_duality(sample_cue(9, rng))
    assert flags.label() == 'generic'
    assert flags.dual_defect > 1e-3


def test_ame_purities():
    assert_allclose(ame_purities(dense_swap(2)), (0.25, 0.25, 1.0), atol=1e-12)
    assert_allclose(ame_purities(catalog.named_gate('P16')), (1 / 16,) * 3, atol=1e-12)


def test_linear_entropy_mean_closed_form(cnot, p9):
    assert_allclose(linear_entropy_mean(cnot), 2 / 9, atol=1e-12)
    assert_allclose(linear_entropy_mean(p9), 0.5, atol=1e-12)


def test_measures_are_local_invariants(rng):
    U = sample_cue(9, rng)
    base = measure_set(U)
    for stream in rng.split(5):
        m = measure_set(local_dressing(U, stream)[0])
        assert_allclose((m.e_op, m.e_op_swapped, m.ep, m.gt),
                        (base.e_op, base.e_op_swapped, base.ep, base.gt), atol=1e-9)
