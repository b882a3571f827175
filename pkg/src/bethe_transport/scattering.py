"""Transfer-matrix scattering through the balanced gain/loss dot.

Two adjacent sites carrying potentials ``-i*gamma`` and ``+i*gamma`` are
embedded in ideal one-dimensional leads.  Propagating states at energy
``E = -2 cos k`` (|E| < 2) accumulate one unimodular transfer matrix per
site; conjugating the total product with the plane-wave basis matrix turns
lead sections into pure phases, so the transmission probability

    T = 1 / |M_22|^2

does not depend on how many lead sites are included.  In closed form

    T = [ (1 - gamma^2/2)^2 + (gamma^2 / (2 tan k))^2 ]^{-1},

which at the band centre reduces to ``(1 - gamma^2/2)^{-2}``: T grows with
|gamma| up to a divergence at ``|gamma| = sqrt(2)`` and decreases beyond,
with no singularity at the chain's exceptional point ``gamma = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ENERGY_MARGIN = 1e-6


class GrazingEnergyError(ValueError):
    """|E| too close to the band edge; the plane-wave basis degenerates."""


@dataclass(frozen=True)
class ScatterConfig:
    """Gain/loss strength, propagation energy, and lead padding per side."""

    gamma: float
    energy: float
    lead_length: int = 1

    def __post_init__(self):
        if abs(self.energy) >= 2.0 - ENERGY_MARGIN:
            raise GrazingEnergyError(
                f"|E|={abs(self.energy)} too close to the band edge 2"
            )
        if self.lead_length < 0:
            raise ValueError("lead_length must be >= 0")


def site_transfer(potential: complex, energy: float) -> np.ndarray:
    """Transfer matrix ((V - E, -1), (1, 0)) across one site; det = 1."""
    return np.array([[potential - energy, -1.0], [1.0, 0.0]], dtype=complex)


def wave_number(energy: float) -> float:
    """The k in (0, pi) with E = -2 cos k."""
    return float(np.arccos(-0.5 * energy))


def transmission(config: ScatterConfig) -> float:
    """Transmission probability from the full transfer-matrix product.

    May exceed 1 (gain-assisted transmission); no clamping is applied.
    """
    e = config.energy
    k = wave_number(e)
    mats = (
        [site_transfer(0.0, e)] * config.lead_length
        + [site_transfer(-1j * config.gamma, e), site_transfer(1j * config.gamma, e)]
        + [site_transfer(0.0, e)] * config.lead_length
    )
    total = np.eye(2, dtype=complex)
    for m in mats:  # ascending site order; each new site acts from the left
        total = m @ total
    q = np.array([[1.0, 1.0], [np.exp(-1j * k), np.exp(1j * k)]], dtype=complex)
    full = np.linalg.solve(q, total @ q)
    return float(1.0 / abs(full[1, 1]) ** 2)


def transmission_closed_form(energy: float, gamma: float) -> float:
    """Closed form of the transmission probability for |E| < 2."""
    if abs(energy) >= 2.0:
        raise GrazingEnergyError(f"|E|={abs(energy)} outside the band")
    # cot k = cos k / sin k with cos k = -E/2, evaluated without the pi/2 pole.
    cot_k = (-0.5 * energy) / np.sqrt(1.0 - 0.25 * energy * energy)
    g2 = gamma * gamma
    return float(1.0 / ((1.0 - 0.5 * g2) ** 2 + (0.5 * g2 * cot_k) ** 2))
