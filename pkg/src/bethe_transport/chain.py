"""The (N+1)-site effective chain carrying the extended eigenstates.

Collecting the generation-uniform states of the tree into one basis vector
per generation closes the total Hamiltonian into a tridiagonal block with
hoppings ``-sqrt(n_ell)``, drain ``-i*gamma0`` on the first site and source
``+i*gammaN`` on the last.  For uniform branching ``n`` and equal potentials
``gamma``, dividing by ``sqrt(n)`` leaves a unit-hopping chain that depends
on the single parameter ``gamma_tilde = gamma / sqrt(n)`` and commutes with
the combined parity (site reversal) / time reversal (complex conjugation)
operation.

Extended eigenstates are plane-wave combinations ``A e^{ikl} + B e^{-ikl}``
with energy ``-2 cos k``; the boundary conditions admit a nontrivial (A, B)
exactly when

    -sin((N+2) k) / sin(N k) = gamma_tilde**2,

solved here by bracketed bisection for real ``k`` and, in the broken phase,
by the hyperbolic form of the same equation along ``k = pi/2 + i*kappa``.
Two real solutions coalesce at ``gamma_tilde = 1`` for odd N (a second-order
exceptional point); for even N the permanent ``k = pi/2`` zero mode joins the
collision at ``gamma_tilde = sqrt((N+2)/N)`` (third order).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from .lattice import TreeIndex, TreeSpec
from .spectral import EigenPair, eig_dense

EP_MERGE_WINDOW = 1e-8


class PhaseError(ValueError):
    """Operation requested on the wrong side of the exceptional point."""


class SecularRootCountError(RuntimeError):
    """Root search found an unexpected number of solutions."""


class InconsistentRootError(ValueError):
    """(root, N, gamma_tilde) do not satisfy the eigenproblem."""


@dataclass(frozen=True)
class ChainSpec:
    """Tridiagonal chain with positive hopping magnitudes and end potentials.

    The assembled matrix has ``-hoppings[l]`` between sites ``l`` and
    ``l+1``, ``-i*gamma0`` at (0, 0) and ``+i*gammaN`` at (N, N).
    """

    hoppings: tuple
    gamma0: float
    gammaN: float

    def __post_init__(self):
        hoppings = tuple(float(t) for t in self.hoppings)
        if len(hoppings) < 1 or any(t <= 0 for t in hoppings):
            raise ValueError(f"hoppings must be positive, got {hoppings}")
        object.__setattr__(self, "hoppings", hoppings)

    @property
    def N(self) -> int:
        return len(self.hoppings)

    @property
    def n_sites(self) -> int:
        return self.N + 1

    def with_gamma(self, gamma: float) -> "ChainSpec":
        return replace(self, gamma0=float(gamma), gammaN=float(gamma))

    def matrix(self) -> np.ndarray:
        n = self.n_sites
        h = np.zeros((n, n), dtype=complex)
        for l, t in enumerate(self.hoppings):
            h[l, l + 1] = -t
            h[l + 1, l] = -t
        h[0, 0] = -1j * self.gamma0
        h[n - 1, n - 1] = 1j * self.gammaN
        return h


@dataclass(frozen=True)
class ScaledChain:
    """Uniform chain after scaling out the branching number."""

    N: int
    gamma_tilde: float

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if self.gamma_tilde < 0:
            raise ValueError("gamma_tilde must be >= 0")

    def chain_spec(self) -> ChainSpec:
        return ChainSpec((1.0,) * self.N, self.gamma_tilde, self.gamma_tilde)

    def matrix(self) -> np.ndarray:
        return self.chain_spec().matrix()


def effective_chain(spec: TreeSpec) -> ChainSpec:
    """Chain block of the tree Hamiltonian on the generation-uniform states."""
    return ChainSpec(
        tuple(np.sqrt(n) for n in spec.branching), spec.gamma0, spec.gammaN
    )


def scaled_chain_matrix(N: int, gamma_tilde: float) -> np.ndarray:
    return ScaledChain(N, gamma_tilde).matrix()


def lift_to_tree(spec: TreeSpec, index: TreeIndex, chain_vector) -> np.ndarray:
    """Spread a chain vector uniformly over each tree generation (isometry)."""
    w = np.asarray(chain_vector, dtype=complex)
    if w.size != spec.N + 1:
        raise ValueError(f"chain vector length {w.size} != N+1 = {spec.N + 1}")
    out = np.zeros(index.n_tot, dtype=complex)
    offsets = index.generation_offsets
    for ell, total in enumerate(spec.generation_totals):
        out[offsets[ell] : offsets[ell + 1]] = w[ell] / np.sqrt(total)
    return out


def extended_states(spec: TreeSpec, index: TreeIndex) -> list:
    """The N+1 extended eigenstates of the tree, as full-lattice eigenpairs."""
    pairs = eig_dense(effective_chain(spec).matrix())
    return [
        EigenPair(p.value, lift_to_tree(spec, index, p.vector), p.residual)
        for p in pairs
    ]


class Phase(enum.Enum):
    PT_UNBROKEN = "PT_unbroken"
    PT_BROKEN_PLUS = "PT_broken_plus"
    PT_BROKEN_MINUS = "PT_broken_minus"
    ZERO_MODE = "zero_mode"


@dataclass(frozen=True)
class SecularRoot:
    """One wave-number solution of the chain's secular system.

    ``multiplicity`` exceeds 1 only for the merged root reported exactly at
    an exceptional point (2 for odd N, 3 for even N where it subsumes the
    zero mode).
    """

    k: complex
    kappa: float
    phase: Phase
    energy: complex
    multiplicity: int = 1


def secular_f(k, N: int):
    """Left-hand side ``-sin((N+2)k)/sin(Nk)`` of the secular equation."""
    k = np.asarray(k, dtype=float)
    return -np.sin((N + 2) * k) / np.sin(N * k)


def _secular_g(k, N: int, gamma_tilde: float):
    # Pole-free form: zeros coincide with f(k) = gamma_tilde**2 plus the
    # even-N k = pi/2 point where both sines vanish.
    return -np.sin((N + 2) * k) - gamma_tilde**2 * np.sin(N * k)


def exceptional_point(N: int) -> float:
    """PT-breaking threshold of the uniform chain: 1 (odd N), sqrt((N+2)/N) (even)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return 1.0 if N % 2 else float(np.sqrt((N + 2) / N))


def exceptional_point_numeric(N: int, tol: float = 1e-6, imag_tol: float = 1e-8) -> float:
    """Locate the exceptional point from the spectrum alone.

    Bisects on the emergence of an eigenvalue pair off the real axis, which
    is where the minimum eigenvalue gap of the scaled chain collapses.
    """

    def broken(gt: float) -> bool:
        values = np.linalg.eigvals(scaled_chain_matrix(N, gt))
        return bool(np.count_nonzero(np.abs(values.imag) > imag_tol) >= 2)

    lo, hi = 0.05, 3.0
    if broken(lo) or not broken(hi):
        raise RuntimeError("bracket [0.05, 3] does not straddle the transition")
    while hi - lo > tol * 0.25:
        mid = 0.5 * (lo + hi)
        if broken(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _scan_roots(N: int, gamma_tilde: float, lo: float, hi: float, samples: int) -> list:
    kk = np.linspace(lo, hi, samples)
    gg = _secular_g(kk, N, gamma_tilde)
    sign = np.sign(gg)
    roots = []
    for i in np.flatnonzero(sign[:-1] * sign[1:] < 0):
        roots.append(
            brentq(_secular_g, kk[i], kk[i + 1], args=(N, gamma_tilde), xtol=1e-15, rtol=8.9e-16)
        )
    for i in np.flatnonzero(gg == 0.0):
        roots.append(float(kk[i]))
    return sorted(roots)


def _expected_real_roots(N: int, gamma_tilde: float) -> int:
    # Count excluding the even-N zero mode.
    ep = exceptional_point(N)
    if N % 2:
        return N + 1 if gamma_tilde < ep else N - 1
    return N if gamma_tilde < ep else N - 2


def solve_secular_real(N: int, gamma_tilde: float, samples: int = 0) -> list:
    """All real-k solutions in (0, pi), the even-N zero mode tagged apart.

    Roots are found by sign-change scanning of the pole-free secular form and
    bisection to machine precision; ``k = 0`` and ``k = pi`` are excluded
    (they carry the trivial eigenvector).  Within ``1e-8`` of the exceptional
    point the merging solutions are ill-conditioned for bisection and are
    returned as one ``k = pi/2`` root carrying the full multiplicity.

    Raises
    ------
    SecularRootCountError
        If the number of located roots disagrees with the phase counting;
        this signals a bracketing failure rather than physics.
    """
    if gamma_tilde < 0:
        raise ValueError("gamma_tilde must be >= 0")
    ep = exceptional_point(N)
    half_pi = 0.5 * np.pi
    at_ep = abs(gamma_tilde - ep) < EP_MERGE_WINDOW
    if samples <= 0:
        samples = max(4097, 256 * (N + 2) + 1)

    margin = 1e-9
    raw = _scan_roots(N, gamma_tilde, margin, np.pi - margin, samples)

    expected = _expected_real_roots(N, gamma_tilde) + (0 if N % 2 else 1)
    if at_ep:
        expected = _expected_real_roots(N, ep + 1.0) + (0 if N % 2 else 1)
    if len(raw) != expected:
        # Nearly merged roots close to pi/2 need a finer local scan.
        window = 0.08
        raw = [k for k in raw if abs(k - half_pi) > window]
        raw.extend(
            _scan_roots(N, gamma_tilde, half_pi - window, half_pi + window, 40001)
        )
        raw = sorted(raw)
    if len(raw) != expected and not at_ep:
        raise SecularRootCountError(
            f"found {len(raw)} real roots for N={N}, gamma_tilde={gamma_tilde}, "
            f"expected {expected} (near-EP degeneracy or bracketing failure)"
        )

    roots = []
    snapped_zero_mode = False
    for k in raw:
        if N % 2 == 0 and abs(k - half_pi) < 1e-9 and not snapped_zero_mode:
            snapped_zero_mode = True
            if at_ep:
                continue
            roots.append(SecularRoot(half_pi, 0.0, Phase.ZERO_MODE, 0.0 + 0.0j))
        else:
            if at_ep and abs(k - half_pi) < 1e-4:
                continue
            roots.append(
                SecularRoot(float(k), 0.0, Phase.PT_UNBROKEN, complex(-2.0 * np.cos(k)))
            )
    if at_ep:
        mult = 2 if N % 2 else 3
        phase = Phase.PT_UNBROKEN if N % 2 else Phase.ZERO_MODE
        roots.append(SecularRoot(half_pi, 0.0, phase, 0.0 + 0.0j, multiplicity=mult))
    return sorted(roots, key=lambda r: r.k.real)


def _log_cosh(x: float) -> float:
    return x + np.log1p(np.exp(-2.0 * x)) - np.log(2.0)


def _log_sinh(x: float) -> float:
    return x + np.log1p(-np.exp(-2.0 * x)) - np.log(2.0)


def solve_secular_broken(N: int, gamma_tilde: float) -> list:
    """The complex-conjugate pair ``k = pi/2 +- i*kappa`` above the EP.

    ``kappa`` solves ``cosh((N+2)k)/cosh(Nk) = gamma_tilde**2`` for odd N and
    the sinh analogue for even N; the left-hand side is monotone in
    ``kappa``, so bisection on a log form converges to machine precision.
    Energies are ``-2 cos k`` evaluated in complex arithmetic.
    """
    ep = exceptional_point(N)
    if gamma_tilde <= ep:
        raise PhaseError(
            f"gamma_tilde={gamma_tilde} is not above the exceptional point {ep}"
        )
    log_part = _log_cosh if N % 2 else _log_sinh
    target = 2.0 * np.log(gamma_tilde)

    def h(kappa: float) -> float:
        return log_part((N + 2) * kappa) - log_part(N * kappa) - target

    lo = 1e-12
    hi = max(1.0, np.log(gamma_tilde) + 5.0)
    kappa = float(brentq(h, lo, hi, xtol=1e-15, rtol=8.9e-16))
    half_pi = 0.5 * np.pi
    out = []
    for sign, phase in ((+1, Phase.PT_BROKEN_PLUS), (-1, Phase.PT_BROKEN_MINUS)):
        k = complex(half_pi, sign * kappa)
        out.append(SecularRoot(k, kappa, phase, -2.0 * np.cos(k)))
    return out


def solve_secular(N: int, gamma_tilde: float) -> list:
    """Real roots, the even-N zero mode, and the broken pair when present."""
    roots = solve_secular_real(N, gamma_tilde)
    ep = exceptional_point(N)
    if gamma_tilde > ep + EP_MERGE_WINDOW:
        roots.extend(solve_secular_broken(N, gamma_tilde))
    return roots


@dataclass
class ExtendedEigenfunction:
    """Eigenfunction of the scaled chain for one secular root."""

    values: np.ndarray
    root: SecularRoot
    N: int
    gamma_tilde: float

    @property
    def energy(self) -> complex:
        return self.root.energy


def eigenfunction(root: SecularRoot, N: int, gamma_tilde: float) -> ExtendedEigenfunction:
    """Closed-form chain eigenfunction for a secular root.

    The plane-wave coefficients give
    ``psi(l) = (e^{ik} - i*gt) e^{ikl} - (e^{-ik} - i*gt) e^{-ikl}``,
    which for real k reduces to ``2i sin k(l+1) + 2 gt sin kl`` and is then
    normalized by the closed form ``sqrt(2N(1+gt^2)+4)``; broken-phase
    functions are unit-normalized numerically.  The merged exceptional-point
    root yields the coalesced eigenvector (uniform modulus for odd N).
    """
    k = complex(root.k)
    ll = np.arange(N + 1)
    a = np.exp(1j * k) - 1j * gamma_tilde
    b = np.exp(-1j * k) - 1j * gamma_tilde
    psi = a * np.exp(1j * k * ll) - b * np.exp(-1j * k * ll)
    if root.kappa == 0.0:
        norm = np.sqrt(2.0 * N * (1.0 + gamma_tilde**2) + 4.0)
    else:
        norm = np.linalg.norm(psi)
    psi = psi / norm

    h = scaled_chain_matrix(N, gamma_tilde)
    residual = np.linalg.norm(h @ psi - root.energy * psi)
    if residual > 1e-8:
        raise InconsistentRootError(
            f"root k={root.k} does not solve the chain for N={N}, "
            f"gamma_tilde={gamma_tilde} (residual {residual:.3e})"
        )
    return ExtendedEigenfunction(psi, root, N, gamma_tilde)


def all_eigenfunctions(N: int, gamma_tilde: float) -> list:
    """Eigenfunctions for every secular root at this ``gamma_tilde``."""
    return [eigenfunction(r, N, gamma_tilde) for r in solve_secular(N, gamma_tilde)]


@dataclass
class PTBranch:
    value: complex
    overlap: float
    unbroken: bool


@dataclass
class PTReport:
    """Matrix-level PT invariance plus a per-eigenpair classification."""

    pt_invariant: bool
    max_defect: float
    branches: list


def check_pt_symmetry(matrix, tol: float = 1e-12) -> PTReport:
    """Check invariance under site reversal plus complex conjugation.

    A matrix M is PT symmetric here when ``P conj(M) P == M`` with P the
    anti-diagonal permutation.  Each eigenpair is classified as unbroken when
    the PT-reversed eigenvector is parallel to itself, i.e.
    ``|v^T P v| > 1 - 1e-8`` for a unit vector v.
    """
    m = np.asarray(matrix, dtype=complex)
    flipped = np.conj(m)[::-1, ::-1]
    defect = float(np.abs(flipped - m).max())
    branches = []
    for pair in eig_dense(m):
        overlap = float(abs(pair.vector @ pair.vector[::-1]))
        branches.append(PTBranch(pair.value, overlap, overlap > 1.0 - 1e-8))
    return PTReport(defect <= tol, defect, branches)
