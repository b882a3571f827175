"""Finite Cayley tree with an imaginary drain at the origin and sources on the rim.

Sites are addressed by paths ``[mu_1, mu_2, ...]`` of 1-based child indices;
the empty path is the origin.  Generation ``ell`` holds
``n_tot_ell = n_1 * n_2 * ... * n_ell`` sites, where ``n_ell`` is the common
branching number of that generation.  The total Hamiltonian has hopping ``-1``
on every parent-child link, ``-i*gamma0`` on the origin diagonal and
``+i*gammaN`` on every peripheral diagonal, which makes it complex symmetric
(equal to its transpose) but non-Hermitian.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.sparse as sp

DEFAULT_SITE_CAP = 10**6

SitePath = tuple

class TreeSizeError(ValueError):
    """Requested tree exceeds the configured site cap."""

class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


@dataclass(frozen=True)
class TreeSpec:
    """Shape and potentials of the tree.

    Parameters
    ----------
    branching : tuple of int
        ``(n_1, ..., n_N)``, the number of children per site in each
        generation.  Every entry must be >= 1.
    gamma0 : float
        Drain strength at the origin (>= 0; the model proper assumes > 0,
        zero is accepted for the Hermitian limit).
    gammaN : float
        Source strength on each peripheral site (>= 0).
    """

    branching: tuple
    gamma0: float
    gammaN: float

    def __post_init__(self):
        branching = tuple(int(n) for n in self.branching)
        if len(branching) < 1:
            raise ConfigError("need at least one generation (N >= 1)")
        if any(n < 1 for n in branching):
            raise ConfigError(f"branching numbers must be >= 1, got {branching}")
        if tuple(self.branching) != branching:
            object.__setattr__(self, "branching", branching)
        for name in ("gamma0", "gammaN"):
            g = float(getattr(self, name))
            if not math.isfinite(g) or g < 0.0:
                raise ConfigError(f"{name} must be a finite non-negative real, got {g}")
            object.__setattr__(self, name, g)

    @property
    def N(self) -> int:
        """Number of generations."""
        return len(self.branching)

    @property
    def generation_totals(self) -> tuple:
        """``(n_tot_0, ..., n_tot_N)`` with ``n_tot_0 = 1``."""
        totals = [1]
        for n in self.branching:
            totals.append(totals[-1] * n)
        return tuple(totals)

    @property
    def n_tot(self) -> int:
        """Total number of sites, the sum of all generation totals."""
        return sum(self.generation_totals)


def tree_spec_from_dict(data: dict) -> TreeSpec:
    """Build a :class:`TreeSpec` from config keys ``N, branching, gamma0, gammaN``."""
    try:
        branching = tuple(int(n) for n in data["branching"])
        gamma0 = float(data["gamma0"])
        gammaN = float(data["gammaN"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad tree config: {exc}") from exc
    if "N" in data and int(data["N"]) != len(branching):
        raise ConfigError(
            f"config key N={data['N']} does not match branching length {len(branching)}"
        )
    return TreeSpec(branching=branching, gamma0=gamma0, gammaN=gammaN)


def load_tree_config(path) -> TreeSpec:
    """Read a tree config from a JSON or TOML file."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        data = json.loads(text)
    else:
        try:
            import tomllib
        except ModuleNotFoundError:
            import tomli as tomllib
        try:
            data = tomllib.loads(text)
        except Exception as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path} does not contain a table of keys")
    return tree_spec_from_dict(data)


class TreeIndex:
    """Dense integer ids for all tree sites, breadth first by generation.

    Ids within a generation are contiguous; id 0 is the origin.  Within
    generation ``ell`` the children of consecutive parents appear in blocks of
    ``n_ell``, in child order, so the descendants of any site occupy one
    contiguous id range per generation.
    """

    def __init__(self, spec: TreeSpec, site_cap: int = DEFAULT_SITE_CAP):
        if spec.n_tot > site_cap:
            raise TreeSizeError(
                f"tree has {spec.n_tot} sites, above the cap {site_cap}"
            )
        self.spec = spec
        totals = spec.generation_totals
        # generation_offsets[ell] = first id of generation ell; length N+2.
        offsets = np.zeros(spec.N + 2, dtype=np.int64)
        np.cumsum(totals, out=offsets[1:])
        self.generation_offsets = offsets
        self.n_tot = spec.n_tot

        parent = np.full(self.n_tot, -1, dtype=np.int64)
        generation = np.zeros(self.n_tot, dtype=np.int64)
        for ell in range(1, spec.N + 1):
            ids = np.arange(offsets[ell], offsets[ell + 1])
            pos = ids - offsets[ell]
            parent[ids] = offsets[ell - 1] + pos // spec.branching[ell - 1]
            generation[ids] = ell
        self.parent = parent
        self.generation = generation

    def generation_of(self, site_id: int) -> int:
        return int(self.generation[site_id])

    def generation_ids(self, ell: int) -> np.ndarray:
        """All ids of generation ``ell`` as a contiguous array."""
        off = self.generation_offsets
        return np.arange(off[ell], off[ell + 1])

    def id_of(self, path: Sequence[int]) -> int:
        """Dense id of the site addressed by ``path``."""
        path = tuple(path)
        ell = len(path)
        if ell > self.spec.N:
            raise ValueError(f"path {path} deeper than N={self.spec.N}")
        pos = 0
        for m, mu in enumerate(path):
            n_m = self.spec.branching[m]
            if not 1 <= mu <= n_m:
                raise ValueError(f"path entry {mu} outside [1, {n_m}] at depth {m + 1}")
            pos = pos * n_m + (mu - 1)
        return int(self.generation_offsets[ell] + pos)

    def path_of(self, site_id: int) -> tuple:
        """Inverse of :meth:`id_of`."""
        if not 0 <= site_id < self.n_tot:
            raise ValueError(f"site id {site_id} out of range")
        ell = int(self.generation[site_id])
        pos = site_id - int(self.generation_offsets[ell])
        rev = []
        for m in range(ell - 1, -1, -1):
            n_m = self.spec.branching[m]
            rev.append(pos % n_m + 1)
            pos //= n_m
        return tuple(reversed(rev))

    def children_ids(self, site_id: int) -> np.ndarray:
        """Ids of the direct children of ``site_id`` (empty for the rim)."""
        ell = int(self.generation[site_id])
        if ell == self.spec.N:
            return np.arange(0)
        n_child = self.spec.branching[ell]
        pos = site_id - int(self.generation_offsets[ell])
        first = int(self.generation_offsets[ell + 1]) + pos * n_child
        return np.arange(first, first + n_child)


def build_index(spec: TreeSpec, site_cap: int = DEFAULT_SITE_CAP) -> TreeIndex:
    """Index all sites of ``spec``; raises :class:`TreeSizeError` above ``site_cap``."""
    return TreeIndex(spec, site_cap=site_cap)


def assemble_hamiltonian(spec: TreeSpec, index: TreeIndex) -> sp.csr_matrix:
    """Total Hamiltonian as a sparse complex matrix.

    Hopping ``-1`` on both directions of every parent-child link,
    ``-i*gamma0`` at the origin and ``+i*gammaN`` on the whole rim.  The
    result equals its transpose entrywise.
    """
    if index.spec is not spec and index.spec != spec:
        raise ValueError("index was built from a different spec")
    n = index.n_tot
    child = np.arange(1, n)
    par = index.parent[child]
    rows = [child, par]
    cols = [par, child]
    data = [np.full(n - 1, -1.0 + 0.0j), np.full(n - 1, -1.0 + 0.0j)]
    if spec.gamma0 != 0.0:
        rows.append(np.array([0]))
        cols.append(np.array([0]))
        data.append(np.array([-1j * spec.gamma0]))
    if spec.gammaN != 0.0:
        rim = index.generation_ids(spec.N)
        rows.append(rim)
        cols.append(rim)
        data.append(np.full(rim.size, 1j * spec.gammaN))
    h = sp.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n),
    ).tocsr()
    h.eliminate_zeros()
    return h


def link_current_operator(parent, child, index: TreeIndex) -> sp.csr_matrix:
    """Hermitian current operator on one parent-child link.

    Sign convention: the expectation ``<psi|J|psi>`` equals
    ``-2 Im[psi(child) * conj(psi(parent))]`` and is positive when the
    current runs toward the origin.  In the (parent, child) basis the
    nonzero block is ``((0, i), (-i, 0))``.
    """
    pid = index.id_of(parent)
    cid = index.id_of(child)
    if tuple(child)[:-1] != tuple(parent) or len(child) != len(parent) + 1:
        raise ValueError(f"{child} is not a direct child of {parent}")
    n = index.n_tot
    return sp.coo_matrix(
        ([1j, -1j], ([pid, cid], [cid, pid])), shape=(n, n)
    ).tocsr()


def export_coo_text(matrix, path) -> None:
    """Write a matrix as coordinate-format text lines ``row col re im``."""
    coo = sp.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    lines = [
        f"{coo.row[i]} {coo.col[i]} {float(coo.data[i].real)!r} {float(coo.data[i].imag)!r}"
        for i in order
    ]
    Path(path).write_text("\n".join(lines) + "\n")
