import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from src import catalog
from src.designs import (
    BlockDecomposition,
    DesignTable,
    LatinMode,
    PermutationGate,
    ame_coefficients,
    block_2unitary_conditions,
    column_entanglements,
    count_distinct,
    extract_quantum_design,
    format_design_grid,
    format_quantum_design,
    latin_check,
    ols_check,
    ols_to_permutation,
    permutation_duality,
    permutation_to_KL,
    universal_entangler_candidate,
)
from src.errors import EntangledColumn, NotAPermutation
from src.linalg import dense_swap, sample_cue


def test_permutation_gate_validation():
    with pytest.raises(NotAPermutation):
        PermutationGate(d=2, pi=(1, 1, 2, 3))
    with pytest.raises(NotAPermutation):
        PermutationGate.from_compact((1, 2, 3, 4, 5))
    with pytest.raises(NotAPermutation):
        PermutationGate.from_dense(np.ones((4, 4)))


def test_dense_and_image_agree():
    P = catalog.permutation('P9')
    assert_array_equal(P.image, [0, 5, 7, 8, 1, 3, 4, 6, 2])
    dense = P.dense()
    for c in range(9):
        assert dense[P.image[c], c] == 1.0
    assert PermutationGate.from_dense(dense) == P
    assert PermutationGate.from_images(3, P.image) == P
    assert str(P) == '{1,5,9,6,7,2,8,3,4}'


def test_p9_tables_are_orthogonal_latin_squares():
    K, L = permutation_to_KL(catalog.permutation('P9'))
    assert_array_equal(K.entries, [[1, 2, 3], [3, 1, 2], [2, 3, 1]])
    assert_array_equal(L.entries, [[1, 3, 2], [3, 2, 1], [2, 1, 3]])
    assert ols_check(K, L)


def test_swap_tables_are_only_half_latin():
    K, L = permutation_to_KL(PermutationGate.from_dense(dense_swap(3)))
    assert latin_check(K, 'row') and not latin_check(K, LatinMode.COL)
    assert latin_check(L, 'col') and not latin_check(L, 'row')
    assert not ols_check(K, L)


def test_ols_round_trip():
    P = catalog.permutation('P16')
    assert ols_to_permutation(*permutation_to_KL(P)) == P


def test_ols_to_permutation_rejects_repeated_pairs():
    T = DesignTable(np.array([[1, 2], [2, 1]]))
    with pytest.raises(NotAPermutation):
        ols_to_permutation(T, T)


def test_permutation_duality_of_two_qubit_gates():
    dcnot = permutation_duality(catalog.permutation('DCNOT'))
    assert dcnot.dual and not dcnot.t_dual

    cnot = permutation_duality(catalog.permutation('CNOT'))
    assert cnot.t_dual and not cnot.dual
    assert cnot.dual_defect == 2.0


@pytest.mark.parametrize('name', ['P9', 'P16', 'P25'])
def test_catalog_permutations_are_two_unitary(name):
    flags = permutation_duality(catalog.permutation(name))
    assert flags.two_unitary
    assert flags.dual_defect == 0 and flags.t_dual_defect == 0


def test_swap_design_is_classical():
    design = extract_quantum_design(dense_swap(3))
    assert design.cardinalities == (3, 3)
    assert design.classical
    assert design.dual
    assert design.k_side.shape == (3, 3, 3)


def test_u9_design_is_genuinely_quantum():
    design = extract_quantum_design(catalog.u9())
    assert design.cardinalities == (5, 5)
    assert not design.classical
    assert 'cardinality 5' in format_quantum_design(design)


def test_entangled_columns_are_reported(rng):
    with pytest.raises(EntangledColumn) as info:
        extract_quantum_design(sample_cue(9, rng))
    assert len(info.value.columns) == 9
    assert info.value.operation == 'extract_quantum_design'


def test_column_entanglements(rng):
    assert_allclose(column_entanglements(dense_swap(2)), 0.0, atol=1e-12)
    assert universal_entangler_candidate(sample_cue(9, rng))
    assert not universal_entangler_candidate(dense_swap(3))


def test_count_distinct_ignores_phase():
    e0, e1 = np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)
    assert count_distinct(np.array([e0, 1j * e0, e1, -e1])) == 2


def test_block_conditions(p9, swap2, cnot):
    assert_allclose(block_2unitary_conditions(p9), (0.0, 0.0, 0.0), atol=1e-12)
    unitary, dual, t_dual = block_2unitary_conditions(swap2)
    assert unitary < 1e-12 and dual < 1e-12 and t_dual > 0.5
    unitary, dual, t_dual = block_2unitary_conditions(cnot)
    assert unitary < 1e-12 and dual > 0.5 and t_dual < 1e-12


def test_block_decomposition_reassembles(rng):
    U = sample_cue(9, rng)
    blocks = BlockDecomposition.of(U)
    assert blocks.blocks.shape == (3, 3, 3, 3)
    assert_allclose(blocks.blocks[1, 2], U[3:6, 6:9])
    assert_allclose(blocks.reassemble(), U)


def test_ame_coefficients_are_normalized(p9):
    T = ame_coefficients(p9)
    assert T.shape == (3, 3, 3, 3)
    assert_allclose(np.sum(np.abs(T) ** 2), 1.0)
    assert np.count_nonzero(T) == 9


def test_format_design_grid():
    K, L = permutation_to_KL(catalog.permutation('P9'))
    grid = format_design_grid(K).splitlines()
    assert len(grid) == 7
    assert grid[1] == '| 1 | 2 | 3 |'
    assert '| 11 | 23 | 32 |' in format_design_grid(K, L)
