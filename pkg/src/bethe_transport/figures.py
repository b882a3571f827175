"""Reproducible figure data: CSV tables plus minimal SVG renderings.

Every builder writes the underlying numbers as CSV (the authoritative
output), an SVG drawing, and a short legend file recording the colour
conventions (blue for real parts, red for imaginary parts / broken branches,
green for the even-chain zero mode).  Random-ensemble figures depend on the
run seed; the published samples of the source material are seed-specific, so
those figures reproduce the qualitative structure, not the literal values.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from . import chain as chain_mod
from . import ensemble as ens
from .chain import Phase, eigenfunction, exceptional_point, solve_secular
from .localized import branch_sub_hamiltonian
from .lattice import TreeSpec
from .spectral import continue_spectrum
from .svgplot import PALETTE, Series, line_plot
from .tables import write_csv
from .transport import average_current, current_profile, eigenvector_average_currents


def _legend(out_dir: Path, name: str, lines) -> Path:
    path = out_dir / f"{name}_legend.txt"
    path.write_text("\n".join(lines) + "\n")
    return path


def fig4(out_dir: Path, seed: int = 0, samples: int = 0, plot: bool = True) -> list:
    """Eigenvalues of the three-level branch block versus the source strength."""
    written = []
    rows = []
    for n in (2, 5, 8, 11):
        grid = np.linspace(0.0, 3.0 * np.sqrt(n), 301)

        def build(gamma, n=n):
            spec = TreeSpec((n, n, n), 0.1, gamma if gamma > 0 else 0.0)
            return branch_sub_hamiltonian(spec, 1)

        trace = continue_spectrum(build, grid)
        for g, values in zip(trace.grid, trace.values):
            for b, e in enumerate(values):
                rows.append((n, float(g), b, float(e.real), float(e.imag)))
        if plot:
            series = []
            for b in range(3):
                series.append(
                    Series(trace.grid, trace.values[:, b].real, PALETTE[0], f"Re E{b}")
                )
                series.append(
                    Series(
                        trace.grid,
                        trace.values[:, b].imag,
                        PALETTE[1],
                        f"Im E{b}",
                        dashed=True,
                    )
                )
            written.append(
                line_plot(
                    out_dir / f"fig4_n{n}.svg",
                    series,
                    title=f"branch block spectrum, n={n}",
                    xlabel="gamma_N",
                    ylabel="E",
                )
            )
    written.append(write_csv(out_dir / "fig4.csv", "sub_block_eigenvalues", rows))
    written.append(
        _legend(out_dir, "fig4", ["solid blue: Re E per branch", "dashed red: Im E per branch"])
    )
    return written


def fig5(out_dir: Path, seed: int = 0, samples: int = 0, plot: bool = True) -> list:
    """The secular function f(k) = -sin((N+2)k)/sin(Nk) for N = 1..6."""
    written = []
    rows = []
    for N in range(1, 7):
        kk = np.linspace(0.004, np.pi - 0.004, 1600)
        ff = chain_mod.secular_f(kk, N)
        rows.extend((N, float(k), float(f)) for k, f in zip(kk, ff))
        if plot:
            shown = np.where(np.abs(ff) < 8.0, ff, np.nan)
            written.append(
                line_plot(
                    out_dir / f"fig5_N{N}.svg",
                    [Series(kk, shown, PALETTE[0])],
                    title=f"secular function, N={N}",
                    xlabel="k",
                    ylabel="f(k)",
                )
            )
    written.append(write_csv(out_dir / "fig5.csv", "secular_function", rows))
    written.append(
        _legend(out_dir, "fig5", ["f(k) clipped at |f|=8 in the SVG; CSV holds raw values"])
    )
    return written


def _secular_rows(N: int, grid) -> list:
    rows = []
    for gt in grid:
        for root in solve_secular(N, float(gt)):
            for _ in range(root.multiplicity):
                rows.append(
                    (
                        float(gt),
                        float(root.k.real),
                        float(root.k.imag),
                        float(root.energy.real),
                        float(root.energy.imag),
                        root.phase.value,
                    )
                )
    return rows


def fig6(out_dir: Path, seed: int = 0, samples: int = 0, plot: bool = True) -> list:
    """Wave-number solutions versus gamma_tilde for N = 1..6."""
    written = []
    for N in range(1, 7):
        grid = np.arange(0.0, 3.0 + 1e-12, 0.01)
        rows = _secular_rows(N, grid)
        written.append(write_csv(out_dir / f"fig6_N{N}.csv", "secular_roots", rows))
        if plot:
            arr = np.array([(r[0], r[1], r[2]) for r in rows])
            real_mask = arr[:, 2] == 0.0
            series = [
                Series(arr[real_mask, 0], arr[real_mask, 1], PALETTE[0], "Re k", marker=True, line=False),
                Series(
                    arr[~real_mask, 0],
                    np.pi / 2 + arr[~real_mask, 2],
                    PALETTE[1],
                    "pi/2 + Im k",
                    marker=True,
                    line=False,
                ),
            ]
            written.append(
                line_plot(
                    out_dir / f"fig6_N{N}.svg",
                    series,
                    title=f"wave numbers, N={N}",
                    xlabel="gamma_tilde",
                    ylabel="k",
                )
            )
    written.append(
        _legend(
            out_dir,
            "fig6",
            [
                "blue: real solutions k",
                "red: imaginary parts of complex solutions, displayed shifted by +pi/2",
                "CSV stores the raw Im k (kappa), unshifted",
            ],
        )
    )
    return written


def fig7(out_dir: Path, seed: int = 0, samples: int = 0, plot: bool = True) -> list:
    """Scaled chain eigenvalue branches versus gamma_tilde for N = 1..6."""
    written = []
    for N in range(1, 7):
        grid = np.arange(0.01, 3.0, 5e-3)
        trace = continue_spectrum(
            lambda g, N=N: chain_mod.scaled_chain_matrix(N, g), grid
        )
        rows = []
        for gi, g in enumerate(trace.grid):
            for b in range(trace.n_branches):
                e = trace.values[gi, b]
                rows.append((float(g), b, float(e.real), float(e.imag), bool(trace.reliable[gi])))
        written.append(write_csv(out_dir / f"fig7_N{N}.csv", "spectrum_trace", rows))
        if plot:
            series = []
            for b in range(trace.n_branches):
                series.append(Series(trace.grid, trace.values[:, b].real, PALETTE[0]))
                series.append(
                    Series(trace.grid, trace.values[:, b].imag, PALETTE[1], dashed=True)
                )
            written.append(
                line_plot(
                    out_dir / f"fig7_N{N}.svg",
                    series,
                    title=f"scaled eigenvalues, N={N}",
                    xlabel="gamma_tilde",
                    ylabel="E",
                )
            )
    written.append(
        _legend(out_dir, "fig7", ["blue: Re E branches", "dashed red: Im E branches"])
    )
    return written


def _sorted_roots(N: int, gt: float) -> list:
    return sorted(solve_secular(N, gt), key=lambda r: (r.kappa != 0.0, r.k.real, r.k.imag))


def _coalescing_ids(N: int, roots) -> list:
    # The two roots that merge at the exceptional point: the middle real pair
    # below it, the broken pair above, the merged root at it.
    broken = [i for i, r in enumerate(roots) if r.kappa != 0.0]
    if broken:
        return broken
    merged = [i for i, r in enumerate(roots) if r.multiplicity > 1]
    if merged:
        return merged
    real = [i for i, r in enumerate(roots) if r.phase is Phase.PT_UNBROKEN]
    half = np.pi / 2
    real.sort(key=lambda i: abs(roots[i].k.real - half))
    return sorted(real[:2])


def fig8(out_dir: Path, seed: int = 0, samples: int = 0, plot: bool = True) -> list:
    """Eigenfunction moduli for N=9 around the exceptional point."""
    N = 9
    ll = np.arange(N + 1)
    written = []

    def rows_at(gt):
        roots = _sorted_roots(N, gt)
        out = []
        for sid, root in enumerate(roots):
            psi = eigenfunction(root, N, gt).values
            out.extend(
                (gt, sid, int(l), float(p.real), float(p.imag), float(abs(p)))
                for l, p in zip(ll, psi)
            )
        return out, roots

    for panel, gt in (("a", 0.8), ("b", 1.2)):
        rows, roots = rows_at(gt)
        written.append(write_csv(out_dir / f"fig8{panel}.csv", "eigenfunction", rows))
        if plot:
            marked = _coalescing_ids(N, roots)
            series = []
            for sid in range(len(roots)):
                psi = np.array(
                    [r[5] for r in rows if r[1] == sid], dtype=float
                )
                red = sid in marked
                series.append(
                    Series(ll, psi, PALETTE[1] if red else PALETTE[0], dashed=red, marker=True)
                )
            written.append(
                line_plot(
                    out_dir / f"fig8{panel}.svg",
                    series,
                    title=f"|psi(l)|, N=9, gamma_tilde={gt}",
                    xlabel="l",
                    ylabel="|psi|",
                )
            )

    pair_rows = []
    pair_series = []
    for j, gt in enumerate((0.8, 0.9, 1.0, 1.1, 1.2)):
        roots = _sorted_roots(N, gt)
        for sid in _coalescing_ids(N, roots):
            psi = eigenfunction(roots[sid], N, gt).values
            pair_rows.extend(
                (gt, sid, int(l), float(p.real), float(p.imag), float(abs(p)))
                for l, p in zip(ll, psi)
            )
            pair_series.append(
                Series(ll, np.abs(psi), PALETTE[j % len(PALETTE)], f"gt={gt}", marker=True)
            )
    written.append(write_csv(out_dir / "fig8c.csv", "eigenfunction", pair_rows))
    if plot:
        written.append(
            line_plot(
                out_dir / "fig8c.svg",
                pair_series,
                title="coalescing pair across the EP",
                xlabel="l",
                ylabel="|psi|",
            )
        )

    gt = 1.2
    roots = _sorted_roots(N, gt)
    log_rows = []
    log_series = []
    for sid in _coalescing_ids(N, roots):
        psi = eigenfunction(roots[sid], N, gt).values
        log_rows.extend(
            (gt, sid, int(l), float(p.real), float(p.imag), float(abs(p)))
            for l, p in zip(ll, psi)
        )
        log_series.append(
            Series(ll, np.log10(np.abs(psi)), PALETTE[1], marker=True)
        )
    written.append(write_csv(out_dir / "fig8d.csv", "eigenfunction", log_rows))
    if plot:
        written.append(
            line_plot(
                out_dir / "fig8d.svg",
                log_series,
                title="broken pair, semi-log, gamma_tilde=1.2",
                xlabel="l",
                ylabel="log10 |psi|",
            )
        )
    written.append(
        _legend(
            out_dir,
            "fig8",
            [
                "red dashed: the two eigenfunctions that coalesce at gamma_tilde=1",
                "blue: all other eigenfunctions",
                "fig8d plots log10 of the broken-pair moduli",
            ],
        )
    )
    return written


def fig9(out_dir: Path, seed: int = 0, samples: int = 0, plot: bool = True) -> list:
    """Average current of every eigenstate versus gamma_tilde, N = 1..6."""
    written = []
    for N in range(1, 7):
        grid = np.arange(0.01, 3.0, 5e-3)
        rows = []
        curves = {}
        for gt in grid:
            roots = _sorted_roots(N, float(gt))
            marked = set(_coalescing_ids(N, roots))
            for sid, root in enumerate(roots):
                j = average_current(eigenfunction(root, N, float(gt)))
                rows.append((float(gt), sid, root.phase.value, float(j)))
                kind = (
                    "pair"
                    if sid in marked
                    else ("zero" if root.phase is Phase.ZERO_MODE else "other")
                )
                curves.setdefault((kind, sid), []).append((float(gt), j))
        written.append(write_csv(out_dir / f"fig9_N{N}.csv", "currents", rows))
        if plot:
            series = []
            color = {"pair": PALETTE[1], "zero": PALETTE[2], "other": PALETTE[0]}
            for (kind, _), pts in sorted(curves.items()):
                arr = np.array(pts)
                series.append(
                    Series(arr[:, 0], arr[:, 1], color[kind], dashed=(kind == "pair"))
                )
            written.append(
                line_plot(
                    out_dir / f"fig9_N{N}.svg",
                    series,
                    title=f"average currents, N={N}",
                    xlabel="gamma_tilde",
                    ylabel="J_av",
                )
            )
    written.append(
        _legend(
            out_dir,
            "fig9",
            [
                "red dashed: states coalescing at the exceptional point",
                "green: even-N zero mode",
                "blue: other eigenstates",
            ],
        )
    )
    return written


def fig10(out_dir: Path, seed: int = 0, samples: int = 0, plot: bool = True) -> list:
    """Per-link current profiles for N=9."""
    N = 9
    links = np.arange(N)
    written = []

    def profile_rows(gt, sids=None):
        roots = _sorted_roots(N, gt)
        take = range(len(roots)) if sids is None else sids
        out = []
        for sid in take:
            prof = current_profile(eigenfunction(roots[sid], N, gt))
            out.extend((gt, sid, int(l), float(j)) for l, j in zip(links, prof))
        return out, roots

    for panel, gt in (("a", 0.8), ("b", 1.2)):
        rows, roots = profile_rows(gt)
        written.append(write_csv(out_dir / f"fig10{panel}.csv", "current_profile", rows))
        if plot:
            marked = _coalescing_ids(N, roots)
            series = []
            for sid in range(len(roots)):
                prof = np.array([r[3] for r in rows if r[1] == sid])
                red = sid in marked
                series.append(
                    Series(links, prof, PALETTE[1] if red else PALETTE[0], dashed=red, marker=True)
                )
            written.append(
                line_plot(
                    out_dir / f"fig10{panel}.svg",
                    series,
                    title=f"current profiles, N=9, gamma_tilde={gt}",
                    xlabel="l",
                    ylabel="J(l)",
                )
            )

    rows_c = []
    series_c = []
    for j, gt in enumerate((0.8, 0.9, 1.0, 1.1, 1.2)):
        roots = _sorted_roots(N, gt)
        for sid in _coalescing_ids(N, roots):
            prof = current_profile(eigenfunction(roots[sid], N, gt))
            rows_c.extend((gt, sid, int(l), float(v)) for l, v in zip(links, prof))
            series_c.append(Series(links, prof, PALETTE[j % len(PALETTE)], f"gt={gt}", marker=True))
    written.append(write_csv(out_dir / "fig10c.csv", "current_profile", rows_c))
    if plot:
        written.append(
            line_plot(
                out_dir / "fig10c.svg",
                series_c,
                title="coalescing-pair profiles across the EP",
                xlabel="l",
                ylabel="J(l)",
            )
        )

    gt = 1.2
    roots = _sorted_roots(N, gt)
    rows_d = []
    series_d = []
    for sid in _coalescing_ids(N, roots):
        prof = current_profile(eigenfunction(roots[sid], N, gt))
        rows_d.extend((gt, sid, int(l), float(v)) for l, v in zip(links, prof))
        series_d.append(Series(links, np.log10(np.abs(prof)), PALETTE[1], marker=True))
    written.append(write_csv(out_dir / "fig10d.csv", "current_profile", rows_d))
    if plot:
        written.append(
            line_plot(
                out_dir / "fig10d.svg",
                series_d,
                title="broken-pair profiles, semi-log, gamma_tilde=1.2",
                xlabel="l",
                ylabel="log10 |J(l)|",
            )
        )
    written.append(
        _legend(out_dir, "fig10", ["colouring as in fig8; fig10d plots log10 |J|"])
    )
    return written


def _random_snapshots(out_dir: Path, name: str, N: int, seed: int, plot: bool) -> list:
    spec = ens.RandomChainSpec(n_base=10.0, delta=0.1, N=N, master_seed=seed)
    chain = ens.sample_chain(spec, 0)
    grid = spec.grid_values()
    gamma_ep, e_ep = ens.find_exceptional_point(chain)
    gamma_zero = ens.find_zero_crossing(chain, grid, gamma_ep, e_ep)
    if N % 2:
        snaps = [0.5, 1.0, gamma_ep, gamma_ep + 3e-3, gamma_zero, gamma_zero + 0.05]
    else:
        snaps = [0.75, 1.0, gamma_ep, gamma_ep + 0.013, gamma_ep + 0.063, 2.0]
    written = []
    rows = []
    for label, gt in zip("abcdef", snaps):
        values = np.linalg.eigvals(chain.with_gamma(float(gt)).matrix())
        marked_idx = np.argsort(np.abs(values - e_ep))[:2]
        marked = np.zeros(values.size, dtype=bool)
        marked[marked_idx] = True
        rows.extend(
            (float(gt), float(v.real), float(v.imag), bool(m))
            for v, m in zip(values, marked)
        )
        if plot:
            written.append(
                line_plot(
                    out_dir / f"{name}_{label}.svg",
                    [
                        Series(values.real[~marked], values.imag[~marked], PALETTE[0], marker=True, line=False),
                        Series(values.real[marked], values.imag[marked], PALETTE[1], marker=True, line=False),
                    ],
                    title=f"spectrum, N={N}, gamma_tilde={gt:.4f}",
                    xlabel="Re E",
                    ylabel="Im E",
                )
            )
    written.append(write_csv(out_dir / f"{name}.csv", "complex_spectrum", rows))
    written.append(
        _legend(
            out_dir,
            name,
            [
                f"random sample, delta=0.1, N={N}, master_seed={seed}, sample_id=0",
                "red: the pair that coalesces on the imaginary axis",
                f"gamma_ep={gamma_ep!r}, E_ep={e_ep!r}, gamma_zero={gamma_zero!r}",
            ],
        )
    )
    return written


def fig11(out_dir: Path, seed: int = 0, samples: int = 0, plot: bool = True) -> list:
    """Spectrum snapshots of one random odd chain (N=9, delta=0.1)."""
    return _random_snapshots(out_dir, "fig11", 9, seed, plot)


def fig14(out_dir: Path, seed: int = 0, samples: int = 0, plot: bool = True) -> list:
    """Spectrum snapshots of one random even chain (N=8, delta=0.1)."""
    return _random_snapshots(out_dir, "fig14", 8, seed, plot)


def _random_currents(out_dir: Path, name: str, N: int, seed: int, plot: bool) -> list:
    spec = ens.RandomChainSpec(n_base=10.0, delta=0.1, N=N, master_seed=seed)
    chain = ens.sample_chain(spec, 0)
    grid = spec.grid_values()
    trace = ens.trace_sample(chain, grid)
    currents = np.empty((grid.size, trace.n_branches))
    for gi in range(grid.size):
        currents[gi] = eigenvector_average_currents(trace.vectors[gi])
    rows = [
        (float(grid[gi]), b, "", float(currents[gi, b]))
        for gi in range(grid.size)
        for b in range(trace.n_branches)
    ]
    written = [write_csv(out_dir / f"{name}.csv", "currents", rows)]
    gamma_ep, e_ep = ens.find_exceptional_point(chain)
    gamma_zero = ens.find_zero_crossing(chain, grid, gamma_ep, e_ep)
    gamma_max, max_j, _ = ens.find_max_current(chain, grid[::2])
    if plot:
        series = [
            Series(grid, currents[:, b], PALETTE[b % len(PALETTE)])
            for b in range(trace.n_branches)
        ]
        written.append(
            line_plot(
                out_dir / f"{name}.svg",
                series,
                title=f"average currents, random sample, N={N}",
                xlabel="gamma_tilde",
                ylabel="J_av",
            )
        )
    written.append(
        _legend(
            out_dir,
            name,
            [
                f"random sample, delta=0.1, N={N}, master_seed={seed}, sample_id=0",
                f"gamma_ep={gamma_ep!r}, gamma_zero={gamma_zero!r}",
                f"gamma_maxJ={gamma_max!r}, maxJ={max_j!r}",
            ],
        )
    )
    return written


def fig12(out_dir: Path, seed: int = 0, samples: int = 0, plot: bool = True) -> list:
    """Average currents of one random odd chain versus gamma_tilde."""
    return _random_currents(out_dir, "fig12", 9, seed, plot)


def fig15(out_dir: Path, seed: int = 0, samples: int = 0, plot: bool = True) -> list:
    """Average currents of one random even chain versus gamma_tilde."""
    return _random_currents(out_dir, "fig15", 8, seed, plot)


def _ensemble_figure(out_dir: Path, name: str, N: int, seed: int, samples: int, plot: bool) -> list:
    spec = ens.RandomChainSpec(n_base=10.0, delta=0.1, N=N, master_seed=seed)
    deltas = np.round(np.arange(0.02, 0.2001, 0.02), 6)
    stats = ens.ensemble_landmarks(spec, samples=samples or 100, delta_grid=deltas)
    rows = []
    for i, d in enumerate(stats.deltas):
        rows.append(
            (
                float(d),
                float(stats.mean_gamma_ep[i]),
                float(stats.std_gamma_ep[i]),
                None if np.isnan(stats.mean_gamma_zero[i]) else float(stats.mean_gamma_zero[i]),
                None if np.isnan(stats.std_gamma_zero[i]) else float(stats.std_gamma_zero[i]),
                float(stats.mean_gamma_maxJ[i]),
                float(stats.std_gamma_maxJ[i]),
                int(stats.n_ok[i]),
                int(stats.n_failed[i]),
            )
        )
    written = [write_csv(out_dir / f"{name}.csv", "ensemble_aggregate", rows)]
    if plot:
        series = [
            Series(stats.deltas, stats.mean_gamma_ep, PALETTE[0], "gamma_ep", marker=True, bars=stats.std_gamma_ep),
            Series(stats.deltas, stats.mean_gamma_maxJ, PALETTE[2], "gamma_maxJ", marker=True, bars=stats.std_gamma_maxJ),
        ]
        if N % 2:
            series.insert(
                1,
                Series(stats.deltas, stats.mean_gamma_zero, PALETTE[4], "gamma_zero", marker=True, bars=stats.std_gamma_zero),
            )
        written.append(
            line_plot(
                out_dir / f"{name}.svg",
                series,
                title=f"ensemble landmarks, N={N}",
                xlabel="delta",
                ylabel="gamma_tilde",
            )
        )
    written.append(
        _legend(
            out_dir,
            name,
            [
                f"means over {samples or 100} samples per delta, master_seed={seed}",
                "vertical bars: standard deviation of the random distribution, not error bars",
            ],
        )
    )
    return written


def fig13(out_dir: Path, seed: int = 0, samples: int = 0, plot: bool = True) -> list:
    """Landmark means versus disorder for the odd chain N=9."""
    return _ensemble_figure(out_dir, "fig13", 9, seed, samples, plot)


def fig16(out_dir: Path, seed: int = 0, samples: int = 0, plot: bool = True) -> list:
    """Landmark means versus disorder for the even chain N=8."""
    return _ensemble_figure(out_dir, "fig16", 8, seed, samples, plot)


FIGURES = {
    "fig4": fig4,
    "fig5": fig5,
    "fig6": fig6,
    "fig7": fig7,
    "fig8": fig8,
    "fig9": fig9,
    "fig10": fig10,
    "fig11": fig11,
    "fig12": fig12,
    "fig13": fig13,
    "fig14": fig14,
    "fig15": fig15,
    "fig16": fig16,
}


def emit_figure(name: str, out_dir, seed: int = 0, samples: int = 0, plot: bool = True) -> list:
    """Write one figure's CSV/SVG/legend files into ``out_dir``."""
    if name not in FIGURES:
        raise KeyError(f"unknown figure {name!r}; known: {', '.join(sorted(FIGURES))}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return FIGURES[name](out_dir, seed=seed, samples=samples, plot=plot)
