"""Dense non-Hermitian eigensolver oracle and spectral utilities.

All analytical constructions in this package are cross-checked against plain
dense diagonalization, so the solver here favours robustness over speed:
matrices are small (a few thousand sites at most) and eigenpairs are refined
by inverse iteration until the residual bound holds.  The module also
provides the spectral-symmetry and non-negative-imaginary-part checks, the
eigenvalue continuation used for parameter sweeps, and the projection
identity relating a Hamiltonian to its energy-dependent effective form on a
subspace.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.optimize import linear_sum_assignment

DEFAULT_DENSE_CAP = 3000
DEFAULT_RESIDUAL_TOL = 1e-9


class EigNonConvergence(RuntimeError):
    """Residual refinement failed; message carries a hash of the matrix."""


class NearSingularError(ValueError):
    """Resolvent evaluated too close to an eigenvalue of the inner block."""


@dataclass
class EigenPair:
    """One eigenvalue with its unit-norm right eigenvector and residual."""

    value: complex
    vector: np.ndarray
    residual: float


def _as_dense(matrix) -> np.ndarray:
    if sp.issparse(matrix):
        return matrix.toarray().astype(complex)
    return np.asarray(matrix, dtype=complex)


def _matrix_hash(a: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(a).tobytes()).hexdigest()[:16]


def eig_dense(
    matrix,
    residual_tol: float = DEFAULT_RESIDUAL_TOL,
    dense_cap: int = DEFAULT_DENSE_CAP,
    max_refine: int = 5,
) -> list:
    """Diagonalize a general complex matrix, returning sorted eigenpairs.

    Eigenpairs are ordered by real part, then imaginary part.  Each vector is
    unit normalized and refined by inverse iteration until
    ``||H v - E v|| <= residual_tol * max|H| * dim``.

    Raises
    ------
    EigNonConvergence
        If some residual still exceeds the bound after ``max_refine``
        refinement sweeps; the message includes a hash of the matrix.
    """
    a = _as_dense(matrix)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"matrix must be square, got {a.shape}")
    if n > dense_cap:
        raise ValueError(f"dimension {n} above dense cap {dense_cap}")
    values, vectors = sla.eig(a)
    order = np.lexsort((values.imag, values.real))
    values = values[order]
    vectors = vectors[:, order]
    vectors /= np.linalg.norm(vectors, axis=0, keepdims=True)

    scale = max(np.abs(a).max(), 1e-300)
    tol = residual_tol * scale * n
    residuals = np.linalg.norm(a @ vectors - vectors * values, axis=0)
    for i in np.flatnonzero(residuals > tol):
        lam, vec = values[i], vectors[:, i]
        for _ in range(max_refine):
            # Inverse iteration with a slightly shifted pole; the shift keeps
            # the solve well posed when lam is (numerically) an exact eigenvalue.
            shift = lam + 1e-12 * scale * (1 + 1j)
            try:
                vec = np.linalg.solve(a - shift * np.eye(n), vec)
            except np.linalg.LinAlgError:
                break
            vec /= np.linalg.norm(vec)
            lam = vec.conj() @ a @ vec
            res = np.linalg.norm(a @ vec - lam * vec)
            if res <= tol:
                values[i], vectors[:, i], residuals[i] = lam, vec, res
                break
        else:
            raise EigNonConvergence(
                f"residual {residuals[i]:.3e} > {tol:.3e} for eigenvalue {lam} "
                f"(matrix sha256 {_matrix_hash(a)})"
            )
        if residuals[i] > tol:
            residuals[i] = np.linalg.norm(a @ vectors[:, i] - values[i] * vectors[:, i])
            if residuals[i] > tol:
                raise EigNonConvergence(
                    f"residual {residuals[i]:.3e} > {tol:.3e} "
                    f"(matrix sha256 {_matrix_hash(a)})"
                )
    return [EigenPair(complex(values[i]), vectors[:, i].copy(), float(residuals[i])) for i in range(n)]


def eigenvalues_of(pairs: Sequence[EigenPair]) -> np.ndarray:
    return np.array([p.value for p in pairs], dtype=complex)


@dataclass
class SymmetryReport:
    """Outcome of the mirror-symmetry check about the imaginary axis."""

    passed: bool
    max_defect: float
    unmatched: list = field(default_factory=list)


def check_spectrum_symmetry(pairs, tol: float = 1e-8) -> SymmetryReport:
    """Check that for every eigenvalue E the reflection -conj(E) is present.

    Accepts a sequence of :class:`EigenPair` or a plain array of eigenvalues.
    """
    values = pairs if isinstance(pairs, np.ndarray) else eigenvalues_of(pairs)
    if values.size == 0:
        return SymmetryReport(True, 0.0)
    defects = np.abs(values[:, None] + values.conj()[None, :]).min(axis=1)
    unmatched = [complex(values[i]) for i in np.flatnonzero(defects > tol)]
    return SymmetryReport(len(unmatched) == 0, float(defects.max()), unmatched)


@dataclass
class ImPartReport:
    """Outcome of the non-negative-imaginary-part check."""

    passed: bool
    min_im: float
    offenders: list = field(default_factory=list)


def check_im_nonneg(pairs, tol: float = 1e-12) -> ImPartReport:
    """Assert Im E >= -tol for every eigenvalue (gain-only sub-blocks)."""
    values = pairs if isinstance(pairs, np.ndarray) else eigenvalues_of(pairs)
    if values.size == 0:
        return ImPartReport(True, 0.0)
    ims = values.imag
    offenders = [complex(values[i]) for i in np.flatnonzero(ims < -tol)]
    return ImPartReport(len(offenders) == 0, float(ims.min()), offenders)


@dataclass
class SpectrumTrace:
    """Eigenvalue trajectories along a parameter grid.

    ``values[g, b]`` is the eigenvalue of branch ``b`` at ``grid[g]``; the
    branch labelling is propagated between grid points by maximal
    eigenvector overlap.  ``vectors[g][:, b]`` holds the matching
    eigenvectors.  ``reliable[g]`` is False where the weakest matched overlap
    dropped below 0.5 and no degenerate-cluster projection rescued it (the
    usual signature of stepping across an exceptional point).
    """

    grid: np.ndarray
    values: np.ndarray
    vectors: np.ndarray
    reliable: np.ndarray

    @property
    def n_branches(self) -> int:
        return self.values.shape[1]

    def branch(self, b: int) -> np.ndarray:
        return self.values[:, b]


def _greedy_overlap_match(prev_vectors: np.ndarray, new_vectors: np.ndarray):
    """Greedy bijection maximizing eigenvector overlaps, largest first.

    Returns (perm, overlaps): new branch b takes new_vectors[:, perm[b]],
    and overlaps[b] is the matched |<prev_b|new_perm[b]>|.
    """
    overlap = np.abs(prev_vectors.conj().T @ new_vectors)
    d = overlap.shape[0]
    perm = np.full(d, -1, dtype=int)
    matched_overlap = np.zeros(d)
    work = overlap.copy()
    for _ in range(d):
        i, j = np.unravel_index(np.argmax(work), work.shape)
        perm[i] = j
        matched_overlap[i] = overlap[i, j]
        work[i, :] = -1.0
        work[:, j] = -1.0
    return perm, matched_overlap


def continue_spectrum(
    builder: Callable[[float], np.ndarray],
    grid,
    overlap_floor: float = 0.5,
    cluster_tol: float = 1e-8,
) -> SpectrumTrace:
    """Track all eigenvalues of ``builder(g)`` along an ascending grid.

    Matching between consecutive grid points is the greedy assignment on the
    eigenvector overlap matrix (largest overlap first).  A step whose weakest
    matched overlap falls below ``overlap_floor`` is flagged unreliable
    unless the branch lies in a degenerate eigenvalue cluster whose subspaces
    still overlap (individual vectors in a degenerate cluster are
    basis-dependent, the spanned subspace is not).
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size < 1:
        raise ValueError("empty grid")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly ascending")

    first = _as_dense(builder(grid[0]))
    dim = first.shape[0]
    values = np.empty((grid.size, dim), dtype=complex)
    vectors = np.empty((grid.size, dim, dim), dtype=complex)
    reliable = np.ones(grid.size, dtype=bool)

    pairs = eig_dense(first)
    values[0] = eigenvalues_of(pairs)
    vectors[0] = np.column_stack([p.vector for p in pairs])

    for g in range(1, grid.size):
        pairs = eig_dense(_as_dense(builder(grid[g])))
        new_vals = eigenvalues_of(pairs)
        new_vecs = np.column_stack([p.vector for p in pairs])
        perm, overlaps = _greedy_overlap_match(vectors[g - 1], new_vecs)
        values[g] = new_vals[perm]
        vectors[g] = new_vecs[:, perm]
        weak = np.flatnonzero(overlaps < overlap_floor)
        for b in weak:
            scale = max(np.abs(values[g - 1]).max(), 1.0)
            cluster = np.flatnonzero(
                np.abs(values[g - 1] - values[g - 1, b]) < cluster_tol * scale
            )
            if cluster.size > 1:
                # Degenerate cluster: accept if the previous vector lies in
                # the span of the newly matched cluster vectors.
                basis = np.linalg.qr(vectors[g][:, cluster])[0]
                proj = np.linalg.norm(basis.conj().T @ vectors[g - 1][:, b])
                if proj > 0.7:
                    continue
            reliable[g] = False
    return SpectrumTrace(grid, values, vectors, reliable)


def match_eigenvalues(values_a, values_b):
    """Minimal-total-distance bijection between two eigenvalue multisets.

    Returns (perm, distances) with ``values_b[perm[i]]`` matched to
    ``values_a[i]``.
    """
    a = np.asarray(values_a, dtype=complex)
    b = np.asarray(values_b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"multiset sizes differ: {a.size} vs {b.size}")
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty_like(cols)
    perm[rows] = cols
    return perm, cost[rows, cols]


@dataclass(frozen=True)
class ProjectionPair:
    """Complementary diagonal projectors onto a site subset and its rest."""

    dim: int
    sites: tuple

    def __post_init__(self):
        sites = tuple(sorted(set(int(s) for s in self.sites)))
        if sites and not (0 <= sites[0] and sites[-1] < self.dim):
            raise ValueError(f"sites {sites} out of range for dim {self.dim}")
        object.__setattr__(self, "sites", sites)

    @property
    def complement(self) -> tuple:
        keep = set(self.sites)
        return tuple(i for i in range(self.dim) if i not in keep)

    @property
    def P(self) -> np.ndarray:
        p = np.zeros((self.dim, self.dim))
        idx = np.array(self.sites, dtype=int)
        p[idx, idx] = 1.0
        return p

    @property
    def Q(self) -> np.ndarray:
        return np.eye(self.dim) - self.P


def effective_hamiltonian_projection(
    matrix, projection: ProjectionPair, energy: complex, sing_tol: float = 1e-9
) -> np.ndarray:
    """Energy-dependent effective Hamiltonian on the projected subspace.

    Returns ``H_PP + H_PQ (E - H_QQ)^{-1} H_QP`` restricted to the projector
    sites (in ascending site order).  With an empty complement this is just
    the original matrix.

    Raises
    ------
    NearSingularError
        If ``E`` is closer than ``sing_tol`` to an eigenvalue of ``H_QQ``.
    """
    h = _as_dense(matrix)
    p = np.array(projection.sites, dtype=int)
    q = np.array(projection.complement, dtype=int)
    if q.size == 0:
        return h[np.ix_(p, p)]
    hqq = h[np.ix_(q, q)]
    dist = np.abs(np.linalg.eigvals(hqq) - energy).min()
    if dist < sing_tol:
        raise NearSingularError(
            f"E={energy} lies {dist:.3e} from an inner-block eigenvalue"
        )
    hpp = h[np.ix_(p, p)]
    hpq = h[np.ix_(p, q)]
    hqp = h[np.ix_(q, p)]
    green = np.linalg.solve(energy * np.eye(q.size) - hqq, hqp)
    return hpp + hpq @ green


def resolvent_identity_defect(matrix, projection: ProjectionPair, energy: complex) -> float:
    """Max-abs difference of the projected resolvent computed two ways.

    Compares ``P (E - H)^{-1} P`` against ``P (E - H_eff(E))^{-1} P`` on the
    projector sites; the defect should vanish to rounding for any ``E`` away
    from the spectra involved.
    """
    h = _as_dense(matrix)
    p = np.array(projection.sites, dtype=int)
    dim = h.shape[0]
    full = np.linalg.solve(energy * np.eye(dim) - h, np.eye(dim))[np.ix_(p, p)]
    heff = effective_hamiltonian_projection(h, projection, energy)
    small = np.linalg.solve(energy * np.eye(p.size) - heff, np.eye(p.size))
    return float(np.abs(full - small).max())
