import numpy as np
import pytest
from numpy.testing import assert_allclose

from bethe_transport.chain import extended_states
from bethe_transport.lattice import TreeSpec, assemble_hamiltonian, build_index
from bethe_transport.localized import (
    all_localized_states,
    branch_sub_hamiltonian,
    branch_sub_eigenpairs,
    counting_identity,
    family_size,
    localized_family,
    peripheral_family,
)
from bethe_transport.spectral import (
    check_im_nonneg,
    check_spectrum_symmetry,
    eig_dense,
    eigenvalues_of,
    match_eigenvalues,
)


def test_peripheral_two_children_difference_vector():
    spec = TreeSpec((2,), 0.5, 0.5)
    index = build_index(spec)
    states = peripheral_family(spec, index)
    assert len(states) == 1
    v = states[0].vector
    assert v[0] == 0.0
    assert_allclose(np.abs(v[1:]), 1.0 / np.sqrt(2.0))
    assert abs(v[1] + v[2]) < 1e-15  # phases sum to zero


def test_peripheral_eigenvalue_exact():
    spec = TreeSpec((3,), 0.4, 0.7)
    index = build_index(spec)
    states = peripheral_family(spec, index)
    assert len(states) == 2
    for s in states:
        assert s.value == 0.7j  # exact by construction
    h = assemble_hamiltonian(spec, index).toarray()
    for s in states:
        assert np.linalg.norm(h @ s.vector - s.value * s.vector) < 1e-14


def test_peripheral_count_matches_dense_degeneracy():
    spec = TreeSpec((2, 3), 0.3, 0.7)
    index = build_index(spec)
    states = peripheral_family(spec, index)
    assert len(states) == 4  # n_tot_1 * (n_2 - 1)
    h = assemble_hamiltonian(spec, index)
    values = eigenvalues_of(eig_dense(h))
    degeneracy = np.count_nonzero(np.abs(values - 0.7j) < 1e-9)
    assert degeneracy == 4


def test_branch_sub_hamiltonian_sizes_and_entries():
    spec = TreeSpec((2, 3, 4), 0.2, 1.1)
    h_last = branch_sub_hamiltonian(spec, 3)
    assert h_last.shape == (1, 1) and h_last[0, 0] == 1.1j
    h_mid = branch_sub_hamiltonian(spec, 2)
    assert h_mid.shape == (2, 2)
    assert_allclose(h_mid, [[0, -2.0], [-2.0, 1.1j]])
    h_top = branch_sub_hamiltonian(spec, 1)
    assert h_top.shape == (3, 3)
    assert_allclose(h_top[0, 1], -np.sqrt(3.0))
    assert_allclose(h_top[1, 2], -2.0)


def test_sub_block_two_level_closed_form():
    # eigenvalues (i gamma +- sqrt(4 n - gamma^2)) / 2 in the Hermitian limit and beyond
    spec = TreeSpec((2, 4), 0.2, 0.0)
    values = eigenvalues_of(eig_dense(branch_sub_hamiltonian(spec, 1)))
    assert_allclose(np.sort(values.real), [-2.0, 2.0], atol=1e-12)
    spec = TreeSpec((2, 4), 0.2, 1.0)
    values = np.array([p.value for p in branch_sub_eigenpairs(spec, 1)])
    expected = np.array(
        [(1j - np.sqrt(16 - 1)) / 2, (1j + np.sqrt(16 - 1)) / 2]
    )
    _, dist = match_eigenvalues(values, expected)
    assert dist.max() < 1e-12
    assert_allclose(values.imag, 0.5, atol=1e-12)


def test_sub_block_three_level_secular_polynomial():
    # n_{N-1} = n_N = 5, gamma_N = 2: E^3 - 2i E^2 - 10 E + 10i = 0
    spec = TreeSpec((5, 5, 5), 0.2, 2.0)
    values = eigenvalues_of(eig_dense(branch_sub_hamiltonian(spec, 1)))
    roots = np.roots([1.0, -2.0j, -10.0, 10.0j])
    _, dist = match_eigenvalues(values, roots)
    assert dist.max() < 1e-10
    assert np.count_nonzero(np.abs(values.real) < 1e-10) == 1  # one purely imaginary


@pytest.mark.parametrize(
    "branching", [(2, 2), (2, 3), (3, 2, 4), (2, 2, 2, 2), (4, 1, 3)]
)
def test_family_sizes_and_counting_identity(branching):
    spec = TreeSpec(branching, 0.3, 0.8)
    index = build_index(spec)
    total = 0
    for ell in range(1, spec.N + 1):
        states = localized_family(spec, index, ell)
        assert len(states) == family_size(spec, ell)
        total += len(states)
    lhs, rhs = counting_identity(spec)
    assert lhs == rhs == total == spec.n_tot - (spec.N + 1)


def test_counting_identity_n2_example():
    spec = TreeSpec((2, 2), 0.5, 0.5)
    assert family_size(spec, 1) == 2
    assert family_size(spec, 2) == 2
    assert counting_identity(spec) == (4, 4)


def test_localized_residuals_and_null_ancestors():
    spec = TreeSpec((3, 2, 4), 0.2, 0.7)
    index = build_index(spec)
    h = assemble_hamiltonian(spec, index)
    offsets = index.generation_offsets
    for ell in range(1, spec.N + 1):
        for s in localized_family(spec, index, ell):
            assert np.linalg.norm(h @ s.vector - s.value * s.vector) < 1e-10
            assert_allclose(np.linalg.norm(s.vector), 1.0, atol=1e-14)
            # exactly zero on every generation older than the family one
            assert np.all(s.vector[: offsets[ell]] == 0.0)


def test_roots_of_unity_modes_complete_child_space():
    for n in (2, 3, 5, 6):
        modes = np.array(
            [np.exp(2j * np.pi * m * np.arange(1, n + 1) / n) for m in range(n)]
        )
        gram = modes.conj() @ modes.T
        assert np.linalg.matrix_rank(gram) == n
        # every interference mode sums to zero
        assert np.abs(modes[1:].sum(axis=1)).max() < 1e-12


def test_localized_im_nonneg():
    spec = TreeSpec((3, 2, 2), 0.4, 1.3)
    index = build_index(spec)
    values = np.array([s.value for s in all_localized_states(spec, index)])
    assert check_im_nonneg(values, tol=1e-12).passed


def test_branch_spectrum_mirror_symmetry():
    spec = TreeSpec((5, 5, 5), 0.2, 2.0)
    for ell in (1, 2, 3):
        values = eigenvalues_of(eig_dense(branch_sub_hamiltonian(spec, ell)))
        assert check_spectrum_symmetry(values, tol=1e-10).passed


@pytest.mark.parametrize(
    "branching,gamma0,gammaN",
    [((2, 2), 0.3, 0.3), ((3, 2, 4), 0.2, 0.7), ((2, 3), 1.5, 0.4)],
)
def test_analytical_basis_matches_dense_oracle(branching, gamma0, gammaN):
    spec = TreeSpec(branching, gamma0, gammaN)
    index = build_index(spec)
    h = assemble_hamiltonian(spec, index)
    analytic = [s.value for s in all_localized_states(spec, index)]
    analytic += [p.value for p in extended_states(spec, index)]
    assert len(analytic) == spec.n_tot
    oracle = eigenvalues_of(eig_dense(h))
    _, dist = match_eigenvalues(np.array(analytic), oracle)
    assert dist.max() < 1e-8


def test_branching_one_gives_empty_family():
    spec = TreeSpec((4, 1, 3), 0.5, 0.5)
    index = build_index(spec)
    assert localized_family(spec, index, 2) == []
    lhs, rhs = counting_identity(spec)
    assert lhs == rhs
