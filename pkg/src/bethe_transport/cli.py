"""Command-line front end.

Subcommands::

    verify           cross-check the analytical eigenbasis against dense
                     diagonalization for a configured tree
    spectrum         sweep the scaled chain spectrum over gamma_tilde
    chain            tabulate secular roots over gamma_tilde
    current          tabulate per-state average currents and profiles
    random-ensemble  run random-hopping samples and aggregate landmarks
    scatter          transmission through the gain/loss dot
    figure NAME      reproduce one of the fig4..fig16 data sets

Every run writes a ``manifest.json`` (config echo, seed, package version,
wall time) next to its outputs.  Exit codes: 0 all checks passed, 1 a check
failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import ensemble as ens
from .chain import effective_chain, extended_states, scaled_chain_matrix
from .figures import FIGURES, emit_figure
from .lattice import (
    ConfigError,
    TreeSizeError,
    assemble_hamiltonian,
    build_index,
    load_tree_config,
    tree_spec_from_dict,
)
from .localized import all_localized_states, counting_identity, inventory_rows
from .spectral import (
    check_im_nonneg,
    check_spectrum_symmetry,
    continue_spectrum,
    eig_dense,
    eigenvalues_of,
    match_eigenvalues,
)
from .svgplot import PALETTE, Series, line_plot
from .tables import write_csv
from .transport import eigenvector_average_currents
from .scattering import ScatterConfig, transmission, transmission_closed_form

DENSE_CAP = 3000


def _load_config_dict(path) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file {p} does not exist")
    text = p.read_text()
    if p.suffix.lower() == ".json":
        return json.loads(text)
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib
    try:
        return tomllib.loads(text)
    except Exception as exc:
        raise ConfigError(f"cannot parse {p}: {exc}") from exc


def _write_manifest(out_dir: Path, command: str, config: dict, seed, t0: float) -> None:
    manifest = {
        "command": command,
        "config": config,
        "seed": seed,
        "version": __version__,
        "wall_time_s": round(time.time() - t0, 3),
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, default=str) + "\n")


def _grid_from(config: dict, lo=0.01, hi=3.0, step=5e-3) -> np.ndarray:
    lo = float(config.get("gamma_min", lo))
    hi = float(config.get("gamma_max", hi))
    step = float(config.get("gamma_step", step))
    if not (0 <= lo < hi and step > 0):
        raise ConfigError(f"bad gamma grid ({lo}, {hi}, {step})")
    return np.arange(lo, hi + 0.5 * step, step)


def cmd_verify(args) -> int:
    config = _load_config_dict(args.config)
    spec = tree_spec_from_dict(config) if config else load_tree_config(args.config)
    if spec.n_tot > DENSE_CAP:
        raise ConfigError(
            f"verify needs n_tot <= {DENSE_CAP} for the dense oracle, got {spec.n_tot}"
        )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    tol_residual = args.tol_residual

    index = build_index(spec)
    h = assemble_hamiltonian(spec, index)
    localized = all_localized_states(spec, index)
    extended = extended_states(spec, index)

    checks = {}
    lhs, rhs = counting_identity(spec)
    checks["counting_identity"] = {
        "passed": lhs == rhs == len(localized),
        "families_total": lhs,
        "expected": rhs,
    }

    worst = 0.0
    for state in localized:
        worst = max(worst, float(np.linalg.norm(h @ state.vector - state.value * state.vector)))
    for pair in extended:
        worst = max(worst, float(np.linalg.norm(h @ pair.vector - pair.value * pair.vector)))
    checks["residuals"] = {"passed": worst <= tol_residual, "max_residual": worst}

    analytic = np.array([s.value for s in localized] + [p.value for p in extended])
    oracle = eigenvalues_of(eig_dense(h, dense_cap=DENSE_CAP))
    _, dist = match_eigenvalues(analytic, oracle)
    checks["oracle_completeness"] = {
        "passed": bool(dist.max() <= 1e-8),
        "max_matched_distance": float(dist.max()),
    }

    sym = check_spectrum_symmetry(oracle, tol=1e-8)
    checks["spectrum_symmetry"] = {"passed": sym.passed, "max_defect": sym.max_defect}

    loc_values = np.array([s.value for s in localized])
    im = check_im_nonneg(loc_values, tol=1e-12)
    checks["localized_im_nonneg"] = {"passed": im.passed, "min_im": im.min_im}

    write_csv(out_dir / "localized_inventory.csv", "localized_inventory", inventory_rows(localized))
    report = {
        "spec": {
            "branching": list(spec.branching),
            "gamma0": spec.gamma0,
            "gammaN": spec.gammaN,
            "n_tot": spec.n_tot,
        },
        "checks": checks,
    }
    (out_dir / "verify_report.json").write_text(json.dumps(report, indent=2) + "\n")

    failed = [name for name, c in checks.items() if not c["passed"]]
    for name, c in checks.items():
        print(("PASS" if c["passed"] else "FAIL") + f" {name}: " + json.dumps(c))
    return 1 if failed else 0


def cmd_spectrum(args) -> int:
    config = _load_config_dict(args.config)
    n_gen = int(config.get("N", args.N or 9))
    grid = _grid_from(config)
    if "hoppings" in config:
        from .chain import ChainSpec

        chain = ChainSpec(tuple(config["hoppings"]), 1.0, 1.0)
        trace = continue_spectrum(lambda g: chain.with_gamma(g).matrix(), grid)
    else:
        trace = continue_spectrum(lambda g: scaled_chain_matrix(n_gen, g), grid)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for gi, g in enumerate(trace.grid):
        for b in range(trace.n_branches):
            e = trace.values[gi, b]
            rows.append((float(g), b, float(e.real), float(e.imag), bool(trace.reliable[gi])))
    write_csv(out_dir / "spectrum.csv", "spectrum_trace", rows)
    if args.plot:
        series = []
        for b in range(trace.n_branches):
            series.append(Series(trace.grid, trace.values[:, b].real, PALETTE[0]))
            series.append(Series(trace.grid, trace.values[:, b].imag, PALETTE[1], dashed=True))
        line_plot(out_dir / "spectrum.svg", series, title=f"spectrum, N={n_gen}",
                  xlabel="gamma_tilde", ylabel="E")
    print(f"wrote {out_dir / 'spectrum.csv'} ({len(rows)} rows)")
    return 0


def cmd_chain(args) -> int:
    from .chain import solve_secular

    config = _load_config_dict(args.config)
    n_gen = int(config.get("N", args.N or 4))
    grid = _grid_from(config, lo=0.0)
    rows = []
    for gt in grid:
        for root in solve_secular(n_gen, float(gt)):
            for _ in range(root.multiplicity):
                rows.append(
                    (float(gt), float(root.k.real), float(root.k.imag),
                     float(root.energy.real), float(root.energy.imag), root.phase.value)
                )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_csv(out_dir / "chain_roots.csv", "secular_roots", rows)
    print(f"wrote {out_dir / 'chain_roots.csv'} ({len(rows)} rows)")
    return 0


def cmd_current(args) -> int:
    from .chain import eigenfunction, solve_secular
    from .transport import average_current, current_profile

    config = _load_config_dict(args.config)
    n_gen = int(config.get("N", args.N or 9))
    grid = _grid_from(config)
    rows = []
    for gt in grid:
        roots = solve_secular(n_gen, float(gt))
        for sid, root in enumerate(roots):
            j = average_current(eigenfunction(root, n_gen, float(gt)))
            rows.append((float(gt), sid, root.phase.value, float(j)))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_csv(out_dir / "currents.csv", "currents", rows)

    profile_rows = []
    for gt in config.get("profile_gammas", [0.8, 1.2]):
        roots = solve_secular(n_gen, float(gt))
        for sid, root in enumerate(roots):
            prof = current_profile(eigenfunction(root, n_gen, float(gt)))
            profile_rows.extend(
                (float(gt), sid, int(l), float(v)) for l, v in enumerate(prof)
            )
    write_csv(out_dir / "current_profile.csv", "current_profile", profile_rows)
    print(f"wrote {out_dir / 'currents.csv'} and current_profile.csv")
    return 0


def cmd_random_ensemble(args) -> int:
    deltas = [float(d) for d in str(args.delta).split(",")]
    spec = ens.RandomChainSpec(
        n_base=args.n_base, delta=deltas[0], N=args.N, master_seed=args.seed
    )
    stats = ens.ensemble_landmarks(
        spec, samples=args.samples, delta_grid=deltas, threads=args.threads
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for i, delta in enumerate(stats.deltas):
        rows = [
            (
                s.sample_id,
                float(s.gamma_ep),
                float(s.e_ep.imag),
                s.ep_side,
                None if s.gamma_zero is None else float(s.gamma_zero),
                float(s.gamma_maxJ),
                float(s.maxJ),
            )
            for s in stats.summaries[i]
        ]
        write_csv(out_dir / f"samples_delta{delta:g}.csv", "ensemble_samples", rows)
    agg = []
    for i, d in enumerate(stats.deltas):
        agg.append(
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
    write_csv(out_dir / "aggregate.csv", "ensemble_aggregate", agg)
    print(f"wrote per-sample tables and {out_dir / 'aggregate.csv'}")
    return 0


def cmd_scatter(args) -> int:
    energies = np.linspace(args.e_min, args.e_max, args.points)
    rows = []
    for e in energies:
        t = transmission(ScatterConfig(args.gamma, float(e)))
        rows.append((float(e), args.gamma, t, transmission_closed_form(float(e), args.gamma)))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_csv(out_dir / "scatter.csv", "scatter", rows)
    if args.plot:
        arr = np.array([(r[0], r[2]) for r in rows])
        line_plot(
            out_dir / "scatter.svg",
            [Series(arr[:, 0], arr[:, 1], PALETTE[0], "T")],
            title=f"transmission, gamma={args.gamma}",
            xlabel="E",
            ylabel="T",
        )
    print(f"wrote {out_dir / 'scatter.csv'} ({len(rows)} rows)")
    return 0


def cmd_figure(args) -> int:
    out_dir = Path(args.out)
    written = emit_figure(args.name, out_dir, seed=args.seed, samples=args.samples, plot=args.plot)
    for path in written:
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bethe-transport",
        description="Quantum transport on finite Cayley trees with sources and a drain.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=False):
        p.add_argument("--config", type=str, default=None, required=needs_config,
                       help="JSON or TOML config file")
        p.add_argument("--out", type=str, default="out", help="output directory")
        p.add_argument("--seed", type=int, default=0, help="master seed")
        p.add_argument("--threads", type=int, default=1, help="worker threads")
        p.add_argument("--tol-residual", type=float, default=1e-9,
                       help="residual tolerance for verification")
        p.add_argument("--plot", action=argparse.BooleanOptionalAction, default=True,
                       help="also render SVG plots")

    p = sub.add_parser("verify", help="cross-check the analytical eigenbasis")
    common(p, needs_config=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("spectrum", help="sweep the scaled chain spectrum")
    common(p)
    p.add_argument("--N", type=int, default=None, help="chain length parameter")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("chain", help="tabulate secular roots")
    common(p)
    p.add_argument("--N", type=int, default=None)
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("current", help="tabulate average currents")
    common(p)
    p.add_argument("--N", type=int, default=None)
    p.set_defaults(func=cmd_current)

    p = sub.add_parser("random-ensemble", help="random-hopping landmark ensemble")
    common(p)
    p.add_argument("--n-base", type=float, default=10.0)
    p.add_argument("--delta", type=str, default="0.1",
                   help="box half-width, or comma list for a delta grid")
    p.add_argument("--N", type=int, default=9)
    p.add_argument("--samples", type=int, default=100)
    p.set_defaults(func=cmd_random_ensemble)

    p = sub.add_parser("scatter", help="transmission through the gain/loss dot")
    common(p)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--e-min", type=float, default=-1.95)
    p.add_argument("--e-max", type=float, default=1.95)
    p.add_argument("--points", type=int, default=200)
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("figure", help="reproduce a figure data set")
    common(p)
    p.add_argument("name", choices=sorted(FIGURES))
    p.add_argument("--samples", type=int, default=0,
                   help="ensemble size for fig13/fig16 (0 = default)")
    p.set_defaults(func=cmd_figure)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.time()
    try:
        code = args.func(args)
    except (ConfigError, TreeSizeError, FileNotFoundError, json.JSONDecodeError, KeyError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    out_dir = Path(args.out)
    if out_dir.exists():
        config = {}
        try:
            config = _load_config_dict(args.config)
        except Exception:
            pass
        echo = dict(config)
        echo.update(
            {
                k: v
                for k, v in vars(args).items()
                if k not in ("func", "command", "config") and not callable(v)
            }
        )
        _write_manifest(out_dir, args.command, echo, args.seed, t0)
    return code


if __name__ == "__main__":
    sys.exit(main())
