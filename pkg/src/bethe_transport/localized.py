"""Analytical localized eigenstates of the tree.

Every eigenstate that fails to reach the origin arises from roots-of-unity
interference: the ``n_ell`` children of some generation-(ell-1) root site
carry phases ``exp(2*pi*i*m*nu/n_ell)`` that cancel at the root, which
isolates the branch dangling below each child.  Within one branch the
amplitudes are uniform on every generation, so the branch reduces to a small
tridiagonal "sub-Hamiltonian" whose eigenpairs, spread back over the branch,
complete the state.  Family ``ell`` (interference at generation ``ell``)
contributes ``(N+1-ell) * (n_tot_ell - n_tot_{ell-1})`` states; together the
families account for every eigenstate except the N+1 extended ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import TreeIndex, TreeSpec
from .spectral import EigenPair, eig_dense


@dataclass
class LocalizedState:
    """One localized eigenstate of the total Hamiltonian.

    ``vector`` is unit normalized over all sites and vanishes identically on
    every generation older than ``family_generation``.
    """

    family_generation: int
    root_id: int
    mode: int
    value: complex
    vector: np.ndarray

    @property
    def support_size(self) -> int:
        return int(np.count_nonzero(self.vector))


def branch_sub_hamiltonian(spec: TreeSpec, ell: int) -> np.ndarray:
    """Tridiagonal Hamiltonian of a branch hanging from generation ``ell``.

    Size ``N - ell + 1``; off-diagonals ``-sqrt(n_{ell+1}) ... -sqrt(n_N)``,
    diagonal zero except ``+i*gammaN`` on the last (peripheral) entry.
    """
    if not 1 <= ell <= spec.N:
        raise ValueError(f"family generation {ell} outside [1, {spec.N}]")
    d = spec.N - ell + 1
    h = np.zeros((d, d), dtype=complex)
    for j in range(d - 1):
        t = -np.sqrt(spec.branching[ell + j])
        h[j, j + 1] = t
        h[j + 1, j] = t
    h[d - 1, d - 1] = 1j * spec.gammaN
    return h


def branch_sub_eigenpairs(spec: TreeSpec, ell: int) -> list:
    """Eigenpairs of the branch sub-Hamiltonian for family ``ell``."""
    if ell == spec.N:
        # Single peripheral layer: the eigenvalue is +i*gammaN exactly.
        return [EigenPair(1j * spec.gammaN, np.ones(1, dtype=complex), 0.0)]
    return eig_dense(branch_sub_hamiltonian(spec, ell))


def family_size(spec: TreeSpec, ell: int) -> int:
    """Number of localized states in family ``ell``."""
    totals = spec.generation_totals
    return (spec.N + 1 - ell) * (totals[ell] - totals[ell - 1])


def counting_identity(spec: TreeSpec) -> tuple:
    """Exact integers (sum of family sizes, n_tot - (N+1)); they must agree."""
    lhs = sum(family_size(spec, ell) for ell in range(1, spec.N + 1))
    return lhs, spec.n_tot - (spec.N + 1)


def localized_family(spec: TreeSpec, index: TreeIndex, ell: int) -> list:
    """All localized states interfering at generation ``ell``.

    For each generation-(ell-1) root, each interference mode
    ``m = 1 .. n_ell - 1`` and each branch sub-eigenpair, the full-lattice
    vector carries the phase ``exp(i*m*nu*theta_ell)`` on child ``nu`` and
    spreads the sub-eigenvector entry for depth ``j`` uniformly over the
    ``b_j`` branch sites at that depth (weight ``1/sqrt(b_j)``).  Returns an
    empty list when ``n_ell == 1`` (no interference modes exist).
    """
    if not 1 <= ell <= spec.N:
        raise ValueError(f"family generation {ell} outside [1, {spec.N}]")
    n_ell = spec.branching[ell - 1]
    if n_ell < 2:
        return []

    depth = spec.N - ell + 1
    # b[j] = sites per child branch at depth j below generation ell.
    b = np.ones(depth, dtype=np.int64)
    for j in range(1, depth):
        b[j] = b[j - 1] * spec.branching[ell + j - 1]

    sub_pairs = branch_sub_eigenpairs(spec, ell)
    offsets = index.generation_offsets
    theta = 2.0 * np.pi / n_ell
    states = []
    for root in index.generation_ids(ell - 1):
        root_pos = root - offsets[ell - 1]
        first_child_pos = root_pos * n_ell
        for m in range(1, n_ell):
            phases = np.exp(1j * m * theta * np.arange(1, n_ell + 1))
            for pair in sub_pairs:
                vec = np.zeros(index.n_tot, dtype=complex)
                for j in range(depth):
                    width = b[j]
                    gen_start = offsets[ell + j]
                    w = pair.vector[j] / np.sqrt(width)
                    for nu in range(n_ell):
                        start = gen_start + (first_child_pos + nu) * width
                        vec[start : start + width] = phases[nu] * w
                vec /= np.linalg.norm(vec)
                states.append(
                    LocalizedState(
                        family_generation=ell,
                        root_id=int(root),
                        mode=m,
                        value=pair.value,
                        vector=vec,
                    )
                )
    return states


def peripheral_family(spec: TreeSpec, index: TreeIndex) -> list:
    """States localized on the rim only, all with eigenvalue ``+i*gammaN``.

    Empty when the last branching number is 1.
    """
    return localized_family(spec, index, spec.N)


def all_localized_states(spec: TreeSpec, index: TreeIndex) -> list:
    """Every localized state, families ``ell = 1 .. N``."""
    states = []
    for ell in range(1, spec.N + 1):
        states.extend(localized_family(spec, index, ell))
    return states


def inventory_rows(states) -> list:
    """Rows (family_generation, root_site_id, mode, re_E, im_E, support_size)."""
    return [
        (
            s.family_generation,
            s.root_id,
            s.mode,
            s.value.real,
            s.value.imag,
            s.support_size,
        )
        for s in states
    ]
