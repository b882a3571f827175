import numpy as np
import pytest
from numpy.testing import assert_allclose

from bethe_transport.spectral import (
    NearSingularError,
    ProjectionPair,
    check_im_nonneg,
    check_spectrum_symmetry,
    continue_spectrum,
    effective_hamiltonian_projection,
    eig_dense,
    eigenvalues_of,
    match_eigenvalues,
    resolvent_identity_defect,
)


def two_site(gamma):
    return np.array([[-1j * gamma, -1.0], [-1.0, 1j * gamma]])


def test_eig_two_site_closed_form():
    pairs = eig_dense(two_site(0.5))
    values = eigenvalues_of(pairs)
    assert_allclose(np.sort(values.real), [-np.sqrt(0.75), np.sqrt(0.75)], atol=1e-12)
    assert_allclose(values.imag, 0.0, atol=1e-12)
    for p in pairs:
        assert p.residual < 1e-12
        assert_allclose(np.linalg.norm(p.vector), 1.0, atol=1e-14)


def test_eig_identity():
    pairs = eig_dense(np.eye(4))
    assert_allclose(eigenvalues_of(pairs), 1.0)
    assert all(p.residual == 0.0 for p in pairs)


def test_eig_ordering_deterministic():
    rng = np.random.default_rng(11)
    a = rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9))
    values = eigenvalues_of(eig_dense(a))
    again = eigenvalues_of(eig_dense(a.copy()))
    assert_allclose(values, again)
    order = np.lexsort((values.imag, values.real))
    assert_allclose(order, np.arange(9))


def test_eig_residual_bound():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(40, 40)) + 1j * rng.normal(size=(40, 40))
    tol = 1e-9 * np.abs(a).max() * 40
    for p in eig_dense(a):
        assert p.residual <= tol
        assert np.linalg.norm(a @ p.vector - p.value * p.vector) <= tol


def test_eig_rejects_above_cap():
    with pytest.raises(ValueError):
        eig_dense(np.eye(5), dense_cap=4)


def test_spectrum_symmetry_pass_and_fail():
    ok = np.array([1 + 0.1j, -1 + 0.1j, 0.3j])
    report = check_spectrum_symmetry(ok, tol=1e-12)
    assert report.passed and report.max_defect < 1e-15
    bad = np.array([1 + 0.1j, 0.5 + 0.0j])
    report = check_spectrum_symmetry(bad, tol=1e-8)
    assert not report.passed
    assert len(report.unmatched) == 2


def test_im_nonneg_report():
    report = check_im_nonneg(np.array([1.0 + 0j, 0.5j, 2.0 + 1e-15j]))
    assert report.passed
    report = check_im_nonneg(np.array([1.0 - 1e-3j]))
    assert not report.passed and report.offenders == [1.0 - 1e-3j]


def test_continuation_constant_matrix():
    rng = np.random.default_rng(7)
    a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    trace = continue_spectrum(lambda g: a, np.linspace(0.0, 1.0, 6))
    assert trace.reliable.all()
    for g in range(6):
        assert_allclose(trace.values[g], trace.values[0])


def test_continuation_through_exceptional_point():
    grid = np.arange(0.5, 1.5001, 0.01)
    trace = continue_spectrum(lambda g: two_site(g), grid)
    # the two trajectories meet at E = 0 at gamma = 1
    i_ep = int(np.argmin(np.abs(grid - 1.0)))
    assert np.abs(trace.values[i_ep]).max() < 1e-6
    # real below, imaginary above
    assert np.abs(trace.values[0].imag).max() < 1e-12
    assert np.abs(trace.values[-1].real).max() < 1e-12


def test_match_eigenvalues_permutation():
    a = np.array([1.0, 2.0, 3.0], dtype=complex)
    b = np.array([3.0 + 1e-12j, 1.0, 2.0], dtype=complex)
    perm, dist = match_eigenvalues(a, b)
    assert list(perm) == [1, 2, 0]
    assert dist.max() < 1e-11


def test_projection_pair_invariants():
    pp = ProjectionPair(5, (1, 3))
    p, q = pp.P, pp.Q
    assert_allclose(p @ p, p)
    assert_allclose(q @ q, q)
    assert_allclose(p @ q, 0.0)
    assert_allclose(q @ p, 0.0)


def test_effective_hamiltonian_empty_complement():
    h = two_site(0.3)
    pp = ProjectionPair(2, (0, 1))
    assert_allclose(effective_hamiltonian_projection(h, pp, 2.0), h)


def test_effective_hamiltonian_three_site_chain():
    # Oracle: explicit 2x2 inversion of (E - H_QQ) for the open 3-site chain.
    h = np.array([[0, -1, 0], [-1, 0, -1], [0, -1, 0]], dtype=complex)
    e = 2.0
    hqq = h[1:, 1:]
    green = np.linalg.inv(e * np.eye(2) - hqq)
    expected = h[:1, 1:] @ green @ h[1:, :1]
    heff = effective_hamiltonian_projection(h, ProjectionPair(3, (0,)), e)
    assert heff.shape == (1, 1)
    assert_allclose(heff, expected, atol=1e-14)
    assert_allclose(heff[0, 0], 2.0 / 3.0, atol=1e-14)


def test_resolvent_identity_random_hermitian():
    rng = np.random.default_rng(21)
    a = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    h = (a + a.conj().T) / 2
    pp = ProjectionPair(8, (0, 4, 6))
    assert resolvent_identity_defect(h, pp, 0.7 + 0.3j) < 1e-10


def test_near_singular_reported():
    h = np.diag([0.0, 1.0, 2.0]).astype(complex)
    pp = ProjectionPair(3, (0,))
    with pytest.raises(NearSingularError):
        effective_hamiltonian_projection(h, pp, 1.0 + 1e-12)
