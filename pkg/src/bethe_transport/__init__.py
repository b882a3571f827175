"""Quantum transport on finite Cayley trees with imaginary sources and a drain.

A finite Bethe lattice (Cayley tree) of ``N`` generations carries a
tight-binding Hamiltonian with hopping ``-1``, a drain potential ``-i*gamma0``
on the central site and source potentials ``+i*gammaN`` on every peripheral
site.  The package constructs the complete eigenbasis analytically (localized
interference states plus the extended states of an (N+1)-site effective
chain), locates the PT-symmetry-breaking exceptional points of the uniform
chain, evaluates current expectation values, runs random-hopping ensembles,
and solves the associated two-site scattering problem with transfer matrices.

Subpackages / modules
---------------------
lattice
    Tree indexing, Hamiltonian and link-current assembly.
spectral
    Dense non-Hermitian eigensolver oracle, symmetry checks, parameter
    continuation, projection identities.
localized
    Analytical localized eigenstates from roots-of-unity interference.
chain
    Effective (N+1)-site chain, secular equation, exceptional points,
    closed-form eigenfunctions.
transport
    Current operators and expectation values.
ensemble
    Random-hopping chains: per-sample landmarks and ensemble statistics.
scattering
    Transfer-matrix transmission through the gain/loss dot.
cli
    Command-line front end (``bethe-transport``).
"""

__version__ = "0.1.0"

from .lattice import TreeSpec, TreeIndex, build_index, assemble_hamiltonian
from .chain import ChainSpec, ScaledChain, effective_chain, exceptional_point
from .spectral import EigenPair, eig_dense

__all__ = [
    "TreeSpec",
    "TreeIndex",
    "build_index",
    "assemble_hamiltonian",
    "ChainSpec",
    "ScaledChain",
    "effective_chain",
    "exceptional_point",
    "EigenPair",
    "eig_dense",
    "__version__",
]
