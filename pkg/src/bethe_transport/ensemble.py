"""Random-hopping chains with source and drain: landmarks and ensembles.

Each sample draws the branching numbers as ``n (1 + Delta_l)`` with
``Delta_l`` uniform on ``[-delta, delta]``; after the ``1/sqrt(n)`` scaling
the chain keeps hoppings ``-sqrt(1 + Delta_l)`` and the single sweep
parameter ``gamma_tilde``.  Randomness breaks the reality of the spectrum at
any nonzero ``gamma_tilde`` but preserves its reflection symmetry about the
imaginary axis, so a mirror pair of eigenvalues can only leave the complex
plane by coalescing on that axis.  Per sample we locate

* ``gamma_ep``   - the coalescence (exceptional) point of the marked pair,
* ``gamma_zero`` - for odd N, where the split eigenvalue passes the origin,
* ``gamma_maxJ`` - where the average current over eigenstates peaks.

Sample streams are derived from ``(master_seed, sample_id)`` through
``numpy.random.default_rng``, so results are bit-reproducible regardless of
worker count; the same underlying uniforms are reused across a ``delta``
grid (common random numbers), which smooths ensemble trends.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .chain import ChainSpec
from .spectral import SpectrumTrace, continue_spectrum
from .transport import eigenvector_average_currents

DEFAULT_GRID = (0.5, 2.0, 5e-3)
# Near-defective eigenvalues carry O(eps^(1/2..1/3)) real-part noise, so the
# imaginary axis is recognized with a tolerance well above that floor; the
# genuine real parts of an approaching mirror pair cross this level only
# within ~1e-16 of the coalescence, so no detectable bias results.
AXIS_TOL = 1e-7


class NoCoalescenceError(RuntimeError):
    """No imaginary-axis coalescence found inside the bracket."""


@dataclass(frozen=True)
class RandomChainSpec:
    """Ensemble description: base branching, box half-width, size, seed, grid."""

    n_base: float
    delta: float
    N: int
    master_seed: int
    grid: tuple = DEFAULT_GRID

    def __post_init__(self):
        if not 0.0 <= self.delta < 1.0:
            raise ValueError(f"delta must lie in [0, 1), got {self.delta}")
        if self.n_base <= 0:
            raise ValueError("n_base must be positive")
        if self.N < 1:
            raise ValueError("N must be >= 1")

    def grid_values(self) -> np.ndarray:
        lo, hi, step = self.grid
        return np.arange(lo, hi + 0.5 * step, step)


def sample_chain(spec: RandomChainSpec, sample_id: int) -> ChainSpec:
    """Scaled chain for one sample; bit-deterministic in (master_seed, sample_id)."""
    rng = np.random.default_rng([int(spec.master_seed), int(sample_id)])
    deltas = rng.uniform(-spec.delta, spec.delta, spec.N)
    return ChainSpec(tuple(np.sqrt(1.0 + deltas)), 1.0, 1.0)


def trace_sample(chain: ChainSpec, grid) -> SpectrumTrace:
    """Eigenvalue trajectories of ``chain`` over a gamma_tilde grid."""
    return continue_spectrum(lambda g: chain.with_gamma(g).matrix(), grid)


def _axis_values(values: np.ndarray, axis_tol: float = AXIS_TOL) -> np.ndarray:
    return values[np.abs(values.real) < axis_tol]


def _axis_count(chain: ChainSpec, gamma: float, axis_tol: float = AXIS_TOL) -> int:
    values = np.linalg.eigvals(chain.with_gamma(gamma).matrix())
    return int(np.count_nonzero(np.abs(values.real) < axis_tol))


def _landed_pair(
    chain: ChainSpec,
    gamma: float,
    persistent,
    axis_tol: float = AXIS_TOL,
):
    """The two axis eigenvalues not matched to the persistent axis set.

    ``persistent`` carries the tracked values of the eigenvalues that already
    sat on the imaginary axis before the coalescence (for even N the
    descendant of the zero mode); removing their nearest matches leaves the
    newly landed pair.
    """
    values = np.linalg.eigvals(chain.with_gamma(gamma).matrix())
    axis = list(np.sort_complex(_axis_values(values, axis_tol)))
    if len(axis) < 2:
        return None
    for p in persistent:
        if len(axis) <= 2:
            break
        axis.pop(int(np.argmin(np.abs(np.array(axis) - p))))
    if len(axis) > 2:
        # More than one new arrival: keep the two mutually closest members.
        arr = np.array(axis)
        gaps = np.abs(np.diff(arr.imag))
        i = int(np.argmin(gaps))
        return arr[i], arr[i + 1]
    return axis[0], axis[1]


def _track_persistent(persistent, axis: np.ndarray):
    """Advance the persistent axis values by nearest matching (if visible)."""
    if axis.size < len(persistent):
        return persistent
    return [_nearest(axis, p) for p in persistent]


def find_exceptional_point(
    chain: ChainSpec,
    bracket: tuple | None = None,
    distance_tol: float = 1e-6,
    width_tol: float = 1e-9,
    axis_tol: float = AXIS_TOL,
) -> tuple:
    """Locate the first imaginary-axis coalescence of a mirror pair.

    Bisects on the count of eigenvalues sitting on the imaginary axis, which
    jumps by two when the tracked pair lands; stops once the pair distance
    falls below ``distance_tol`` or the bracket shrinks below ``width_tol``.
    Returns ``(gamma_ep, E_ep)`` with ``E_ep`` purely imaginary up to solver
    noise.  When the coalescence is (near) higher order, i.e. the landing
    point sits on top of the even-N zero-mode descendant as in the uniform
    chain, every axis eigenvalue lies inside the defective-eigenvalue noise
    blob and ``E_ep`` is resolved only to ~1e-4; for generic random samples
    the separations are far larger and the identification is sharp.

    Raises
    ------
    NoCoalescenceError
        If the axis count never rises inside the bracket.
    """
    lo, hi = bracket if bracket is not None else (DEFAULT_GRID[0], DEFAULT_GRID[1])
    baseline = _axis_count(chain, lo, axis_tol)
    if _axis_count(chain, hi, axis_tol) < baseline + 2:
        raise NoCoalescenceError(
            f"no coalescence in bracket ({lo}, {hi}): axis count stays {baseline}"
        )

    def axis_at(gamma: float) -> np.ndarray:
        values = np.linalg.eigvals(chain.with_gamma(gamma).matrix())
        return _axis_values(values, axis_tol)

    # A coarse pass brackets the *first* jump before bisection refines it,
    # tracking the already-on-axis eigenvalues along the way.
    persistent = list(axis_at(lo))
    for g in np.arange(lo, hi, 0.01)[1:]:
        if _axis_count(chain, g, axis_tol) >= baseline + 2:
            hi = float(g)
            break
        lo = float(g)
        persistent = _track_persistent(persistent, axis_at(lo))
    while hi - lo > width_tol:
        mid = 0.5 * (lo + hi)
        if _axis_count(chain, mid, axis_tol) >= baseline + 2:
            hi = mid
            pair = _landed_pair(chain, hi, persistent, axis_tol)
            if pair is not None and abs(pair[0] - pair[1]) < distance_tol:
                break
        else:
            lo = mid
            persistent = _track_persistent(persistent, axis_at(lo))
    pair = _landed_pair(chain, hi, persistent, axis_tol)
    if pair is None:
        raise NoCoalescenceError("coalesced pair lost during refinement")
    e_ep = 0.5 * (pair[0] + pair[1])
    return 0.5 * (lo + hi), complex(e_ep)


def _nearest(values: np.ndarray, target: complex) -> complex:
    return complex(values[np.argmin(np.abs(values - target))])


def find_zero_crossing(
    chain: ChainSpec,
    trace,
    gamma_ep: float | None = None,
    e_ep: complex | None = None,
    axis_tol: float = AXIS_TOL,
    energy_tol: float = 1e-9,
):
    """For odd N, the gamma_tilde where the split eigenvalue passes E = 0.

    Starting from the coalescence point, follows the pair member that moves
    toward the origin along the imaginary axis and bisects on the sign of its
    imaginary part.  ``trace`` may be a :class:`SpectrumTrace` or a bare
    gamma_tilde grid.  Returns None for even N (a zero eigenvalue never
    occurs there) and when no crossing is bracketed by the end of the grid.
    """
    if chain.N % 2 == 0:
        return None
    grid = np.asarray(getattr(trace, "grid", trace), dtype=float)
    if gamma_ep is None or e_ep is None:
        gamma_ep, e_ep = find_exceptional_point(
            chain, (float(grid[0]), float(grid[-1])), axis_tol=axis_tol
        )
    side = 1.0 if e_ep.imag >= 0 else -1.0

    def axis_at(gamma: float) -> np.ndarray:
        values = np.linalg.eigvals(chain.with_gamma(gamma).matrix())
        return _axis_values(values, axis_tol)

    def descending(axis: np.ndarray, track: complex) -> complex:
        # Of the two axis eigenvalues nearest the tracked value (the split
        # pair), the one farthest along the -side direction is the member
        # descending toward the origin.
        order = np.argsort(np.abs(axis - track))[:2]
        members = axis[order]
        return complex(members[np.argmin(side * members.imag)])

    # Walk the grid from just above the coalescence, following the pair
    # member that descends toward the origin, until its sign flips.
    lo = float(gamma_ep)
    track = complex(e_ep)
    hi = None
    for g in grid[grid > gamma_ep]:
        axis = axis_at(float(g))
        if axis.size == 0:
            lo = float(g)
            continue
        cand = descending(axis, track)
        if side * cand.imag < 0.0:
            hi = float(g)
            break
        lo, track = float(g), cand
    if hi is None:
        return None

    # Bisection on the descending member's sign; anchored by continuity to
    # its value at the low end of the shrinking bracket.
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        axis = axis_at(mid)
        if axis.size == 0:
            lo = mid
            continue
        cand = descending(axis, track)
        if side * cand.imag < 0.0:
            hi = mid
        else:
            lo, track = mid, cand
    gamma_zero = 0.5 * (lo + hi)
    axis = axis_at(hi)
    if axis.size == 0:
        return None
    # A transversal crossing resolves |E| down to the bracket width; when the
    # crossing merges with the coalescence itself (uniform chains) the
    # eigenvalue behaves like sqrt(gamma - gamma_zero), which caps the
    # reachable |E| at ~scale * sqrt(width).
    scale = float(
        np.abs(np.linalg.eigvals(chain.with_gamma(gamma_zero).matrix())).max()
    )
    bound = max(energy_tol, 10.0 * scale * np.sqrt(hi - lo))
    if np.abs(axis).min() < bound:
        return float(gamma_zero)
    return None


def _max_current_at(chain: ChainSpec, gamma: float) -> tuple:
    h = chain.with_gamma(gamma).matrix()
    _, vectors = np.linalg.eig(h)
    vectors = vectors / np.linalg.norm(vectors, axis=0, keepdims=True)
    currents = eigenvector_average_currents(vectors)
    j = int(np.argmax(currents))
    return float(currents[j]), j


def find_max_current(chain: ChainSpec, grid=None, xtol: float = 1e-6) -> tuple:
    """Maximize the average current over gamma_tilde and over eigenstates.

    A coarse grid pass brackets the peak, then golden-section refinement
    narrows the argmax to ``xtol``.  Returns
    ``(gamma_maxJ, maxJ, state_id)`` where ``state_id`` indexes the
    eigenvalues at ``gamma_maxJ`` in (Re, Im) sorted order.
    """
    if grid is None:
        grid = np.arange(*DEFAULT_GRID[:2], DEFAULT_GRID[2])
    grid = np.asarray(grid, dtype=float)
    coarse = np.array([_max_current_at(chain, g)[0] for g in grid])
    i = int(np.argmax(coarse))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]

    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = float(lo), float(hi)
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = _max_current_at(chain, c)[0]
    fd = _max_current_at(chain, d)[0]
    while b - a > xtol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = _max_current_at(chain, c)[0]
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = _max_current_at(chain, d)[0]
    gamma_max = 0.5 * (a + b)
    max_j, state = _max_current_at(chain, gamma_max)
    # Report the state id in deterministic (Re, Im) eigenvalue order.
    values = np.linalg.eigvals(chain.with_gamma(gamma_max).matrix())
    order = np.lexsort((values.imag, values.real))
    state_id = int(np.flatnonzero(order == state)[0]) if state in order else state
    return float(gamma_max), float(max_j), state_id


@dataclass
class SampleSummary:
    """Landmark gamma_tilde values of one random sample."""

    sample_id: int
    gamma_ep: float
    e_ep: complex
    ep_side: int
    gamma_zero: float | None
    gamma_maxJ: float
    maxJ: float


def sample_summary(spec: RandomChainSpec, sample_id: int) -> SampleSummary:
    """Full landmark pipeline for one sample of the ensemble."""
    chain = sample_chain(spec, sample_id)
    grid = spec.grid_values()
    gamma_ep, e_ep = find_exceptional_point(chain, (float(grid[0]), float(grid[-1])))
    gamma_zero = find_zero_crossing(chain, grid, gamma_ep, e_ep)
    # The coarse current pass works on half the sweep resolution; the
    # golden-section refinement restores the 1e-6 argmax accuracy.
    gamma_max, max_j, _ = find_max_current(chain, grid[::2])
    side = 1 if e_ep.imag >= 0 else -1
    return SampleSummary(sample_id, gamma_ep, e_ep, side, gamma_zero, gamma_max, max_j)


@dataclass
class EnsembleStats:
    """Per-delta means and spreads of the landmark values.

    The reported standard deviation is the spread of the random distribution,
    not a standard error of the mean.
    """

    deltas: np.ndarray
    mean_gamma_ep: np.ndarray
    std_gamma_ep: np.ndarray
    mean_gamma_zero: np.ndarray
    std_gamma_zero: np.ndarray
    mean_gamma_maxJ: np.ndarray
    std_gamma_maxJ: np.ndarray
    n_ok: np.ndarray
    n_failed: np.ndarray
    summaries: list = field(default_factory=list)


def ensemble_landmarks(
    spec: RandomChainSpec,
    samples: int,
    delta_grid: Sequence[float] | None = None,
    threads: int = 1,
) -> EnsembleStats:
    """Landmark statistics over ``samples`` chains for each delta value.

    Samples that show no coalescence inside the sweep bracket are excluded
    and counted in ``n_failed``.  Deterministic given ``spec.master_seed``.
    """
    if samples < 2:
        raise ValueError("need at least 2 samples")
    deltas = np.asarray(
        delta_grid if delta_grid is not None else [spec.delta], dtype=float
    )
    per_delta = []
    failures = []
    all_summaries = []
    for delta in deltas:
        sub = replace(spec, delta=float(delta))
        results, failed = _run_samples(sub, samples, threads)
        per_delta.append(results)
        failures.append(failed)
        all_summaries.append(results)

    def stat(getter, reducer):
        out = np.full(deltas.size, np.nan)
        for i, results in enumerate(per_delta):
            values = [getter(s) for s in results if getter(s) is not None]
            if values:
                out[i] = reducer(values)
        return out

    return EnsembleStats(
        deltas=deltas,
        mean_gamma_ep=stat(lambda s: s.gamma_ep, np.mean),
        std_gamma_ep=stat(lambda s: s.gamma_ep, np.std),
        mean_gamma_zero=stat(lambda s: s.gamma_zero, np.mean),
        std_gamma_zero=stat(lambda s: s.gamma_zero, np.std),
        mean_gamma_maxJ=stat(lambda s: s.gamma_maxJ, np.mean),
        std_gamma_maxJ=stat(lambda s: s.gamma_maxJ, np.std),
        n_ok=np.array([len(r) for r in per_delta]),
        n_failed=np.array(failures),
        summaries=all_summaries,
    )


def _run_samples(spec: RandomChainSpec, samples: int, threads: int):
    def one(sample_id: int):
        try:
            return sample_summary(spec, sample_id)
        except NoCoalescenceError:
            return None

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            raw = list(pool.map(one, range(samples)))
    else:
        raw = [one(i) for i in range(samples)]
    results = [r for r in raw if r is not None]
    return results, samples - len(results)
