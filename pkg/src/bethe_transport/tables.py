"""CSV schemas and a deterministic writer.

Every CSV emitted by the package is written through :func:`write_csv`, which
validates the header against the schema registry below (documented in
``docs/formats.md``).  Floats are rendered with ``repr`` for shortest
round-trip text, so identical inputs produce byte-identical files.
"""

from __future__ import annotations

from pathlib import Path

SCHEMAS = {
    "spectrum_trace": ("gamma_tilde", "branch_id", "re_E", "im_E", "tracking_reliable"),
    "secular_roots": ("gamma_tilde", "k_re", "k_im", "E_re", "E_im", "phase"),
    "currents": ("gamma_tilde", "state_id", "phase", "J_av"),
    "current_profile": ("gamma_tilde", "state_id", "ell", "J"),
    "eigenfunction": ("gamma_tilde", "state_id", "ell", "re_psi", "im_psi", "abs_psi"),
    "localized_inventory": (
        "family_generation",
        "root_site_id",
        "mode",
        "re_E",
        "im_E",
        "support_size",
    ),
    "sub_block_eigenvalues": ("n", "gamma_N", "branch", "re_E", "im_E"),
    "secular_function": ("N", "k", "f"),
    "complex_spectrum": ("gamma_tilde", "re_E", "im_E", "marked"),
    "ensemble_samples": (
        "sample_id",
        "gamma_ep",
        "im_E_ep",
        "ep_side",
        "gamma_zero",
        "gamma_maxJ",
        "maxJ",
    ),
    "ensemble_aggregate": (
        "delta",
        "mean_gamma_ep",
        "std_gamma_ep",
        "mean_gamma_zero",
        "std_gamma_zero",
        "mean_gamma_maxJ",
        "std_gamma_maxJ",
        "n_ok",
        "n_failed",
    ),
    "scatter": ("E", "gamma", "T", "T_closed_form"),
}


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (int, str)):
        return str(value)
    # numpy scalars and the rest
    try:
        return repr(float(value))
    except (TypeError, ValueError):
        return str(value)


def write_csv(path, schema: str, rows) -> Path:
    """Write rows under a registered schema; returns the path."""
    header = SCHEMAS[schema]
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise ValueError(
                f"row width {len(row)} does not match schema '{schema}' "
                f"({len(header)} columns)"
            )
        lines.append(",".join(_cell(v) for v in row))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")
    return path
