"""Current operators and expectation values for the extended states.

The current on a link is positive when probability flows toward the origin
(drain).  With right eigenvectors and the Hermitian-conjugate bra, the
expectation on chain sites ``l`` and ``l+1`` is
``-2 Im[psi(l+1) conj(psi(l))]``; for every unbroken (real-k) eigenstate of
the uniform chain it is the same on all links,

    J(l) = 4 gt sin(k)^2 / (N (1 + gt^2) + 2),

and reaches its maximum ``2/(N+1)`` (odd N) or ``2/sqrt(N(N+2))`` (even N)
for the states that coalesce at the exceptional point.  In the broken phase
the per-link profile is position dependent, so sweeps use the average over
links.
"""

from __future__ import annotations

import numpy as np

from .chain import ExtendedEigenfunction, eigenfunction, solve_secular
from .lattice import TreeIndex, TreeSpec


class PhaseErrorAtEP(ValueError):
    """Biorthogonal expectation requested exactly at the exceptional point."""


def _values(psi) -> np.ndarray:
    if isinstance(psi, ExtendedEigenfunction):
        return psi.values
    return np.asarray(psi, dtype=complex)


def chain_current_operator(ell: int, N: int) -> np.ndarray:
    """Hermitian scaled-current operator between chain sites ell and ell+1.

    The nonzero block in the (ell, ell+1) basis is ``((0, i), (-i, 0))``;
    positive expectation means flow toward site 0.
    """
    if not 0 <= ell <= N - 1:
        raise ValueError(f"link index {ell} outside [0, {N - 1}]")
    op = np.zeros((N + 1, N + 1), dtype=complex)
    op[ell, ell + 1] = 1j
    op[ell + 1, ell] = -1j
    return op


def expectation_current(psi, ell: int) -> float:
    """Current expectation on link ``ell`` with the right-vector convention."""
    v = _values(psi)
    return float(-2.0 * np.imag(v[ell + 1] * np.conj(v[ell])))


def current_profile(psi) -> np.ndarray:
    """Per-link expectations J(0..N-1)."""
    v = _values(psi)
    return -2.0 * np.imag(v[1:] * np.conj(v[:-1]))


def average_current(psi, N: int | None = None) -> float:
    """Mean of the per-link expectations (equals any J(l) for real-k states)."""
    profile = current_profile(psi)
    if N is not None and profile.size != N:
        raise ValueError(f"state has {profile.size} links, expected {N}")
    return float(profile.mean())


def closed_form_current(N: int, gamma_tilde: float, k: float) -> float:
    """Link-independent current of a real-k eigenstate of the uniform chain."""
    return float(
        4.0 * gamma_tilde * np.sin(k) ** 2 / (N * (1.0 + gamma_tilde**2) + 2.0)
    )


def ep_current(N: int) -> float:
    """Average current of the coalescing zero-energy state at the EP."""
    if N % 2:
        return 2.0 / (N + 1)
    return float(2.0 / np.sqrt(N * (N + 2)))


def currents_at(N: int, gamma_tilde: float) -> list:
    """(root, J_average) for every eigenstate of the uniform chain."""
    out = []
    for root in solve_secular(N, gamma_tilde):
        psi = eigenfunction(root, N, gamma_tilde)
        out.append((root, average_current(psi)))
    return out


def eigenvector_average_currents(vectors: np.ndarray) -> np.ndarray:
    """Average currents for unit-norm eigenvector columns of any chain."""
    v = np.asarray(vectors, dtype=complex)
    profiles = -2.0 * np.imag(v[1:, :] * np.conj(v[:-1, :]))
    return profiles.mean(axis=0)


def tree_current_expectation(state, spec: TreeSpec, index: TreeIndex, ell: int) -> float:
    """Scaled current from generation ``ell+1`` into generation ``ell``.

    Sums the link currents over all parent-child pairs between the two
    generations, scaled by ``1/sqrt(n_{ell+1})``; on a generation-uniform
    state this reproduces the chain-level expectation.
    """
    if not 0 <= ell <= spec.N - 1:
        raise ValueError(f"generation link {ell} outside [0, {spec.N - 1}]")
    v = np.asarray(state, dtype=complex)
    children = index.generation_ids(ell + 1)
    parents = index.parent[children]
    links = -2.0 * np.imag(v[children] * np.conj(v[parents]))
    return float(links.sum() / np.sqrt(spec.branching[ell]))


def biorthogonal_current_n1(gamma_tilde: float) -> float:
    """Left/right-eigenvector current of the two-site chain; identically zero.

    With the left eigenvectors (transposes of the right ones, the chain being
    complex symmetric) the normalized current ``<phi|J|psi> / <phi|psi>``
    vanishes in both phases.  Returns the larger deviation from zero over the
    two eigenstates; rejects the exceptional point, where the biorthogonal
    normalization itself vanishes.
    """
    if abs(gamma_tilde - 1.0) < 1e-9:
        raise PhaseErrorAtEP(
            "left/right pair undefined at the exceptional point gamma_tilde=1"
        )
    gt = float(gamma_tilde)
    if gt < 1.0:
        s = np.sqrt(1.0 - gt * gt)
        plus = np.array([1.0, -1j * gt - s]) / np.sqrt(2.0)
        minus = np.array([1j * gt + s, 1.0]) / np.sqrt(2.0)
    else:
        t = np.sqrt(gt * gt - 1.0)
        norm = np.sqrt(2.0 * gt * (gt + t))
        plus = np.array([1.0, -1j * gt - 1j * t]) / norm
        minus = np.array([1j * gt + 1j * t, 1.0]) / norm
    op = chain_current_operator(0, 1)
    worst = 0.0
    for vec in (plus, minus):
        worst = max(worst, abs((vec @ op @ vec) / (vec @ vec)))
    return worst
