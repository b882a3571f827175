import itertools

import numpy as np
import pytest
from numpy.testing import assert_allclose

from bethe_transport.lattice import (
    ConfigError,
    TreeSizeError,
    TreeSpec,
    assemble_hamiltonian,
    build_index,
    export_coo_text,
    link_current_operator,
    load_tree_config,
    tree_spec_from_dict,
)


def enumerate_paths(branching):
    """Brute-force oracle: all site paths of the tree, generation by generation."""
    paths = [()]
    frontier = [()]
    for n in branching:
        frontier = [p + (mu,) for p in frontier for mu in range(1, n + 1)]
        paths.extend(frontier)
    return paths


@pytest.mark.parametrize(
    "branching,expected",
    [((2,), 3), ((2, 3), 9), ((2, 2, 2), 15)],
)
def test_site_counts(branching, expected):
    spec = TreeSpec(branching, 0.5, 0.5)
    assert spec.n_tot == expected
    assert spec.n_tot == len(enumerate_paths(branching))


@pytest.mark.parametrize("branching", [(2,), (3, 2), (2, 3, 2), (4, 1, 3)])
def test_index_bijection_roundtrip(branching):
    spec = TreeSpec(branching, 0.3, 0.7)
    index = build_index(spec)
    paths = enumerate_paths(branching)
    assert index.n_tot == len(paths)
    seen = set()
    for path in paths:
        site = index.id_of(path)
        assert 0 <= site < index.n_tot
        assert index.path_of(site) == path
        seen.add(site)
    assert seen == set(range(index.n_tot))
    # parent ids agree with path truncation
    for path in paths:
        if path:
            assert index.parent[index.id_of(path)] == index.id_of(path[:-1])
    assert index.parent[0] == -1


def test_generation_blocks_contiguous():
    spec = TreeSpec((3, 2, 2), 0.1, 0.1)
    index = build_index(spec)
    for ell, total in enumerate(spec.generation_totals):
        ids = index.generation_ids(ell)
        assert ids.size == total
        assert set(index.generation[ids]) == {ell}


def test_site_cap():
    spec = TreeSpec((10, 10, 10), 1.0, 1.0)
    with pytest.raises(TreeSizeError):
        build_index(spec, site_cap=500)


def test_spec_validation():
    with pytest.raises(ConfigError):
        TreeSpec((2, 0), 1.0, 1.0)
    with pytest.raises(ConfigError):
        TreeSpec((), 1.0, 1.0)
    with pytest.raises(ConfigError):
        TreeSpec((2,), -0.5, 1.0)
    with pytest.raises(ConfigError):
        tree_spec_from_dict({"N": 3, "branching": [2, 2], "gamma0": 1, "gammaN": 1})


def test_hamiltonian_n1_explicit():
    gamma = 0.8
    spec = TreeSpec((2,), gamma, gamma)
    h = assemble_hamiltonian(spec, build_index(spec)).toarray()
    expected = np.array(
        [
            [-1j * gamma, -1, -1],
            [-1, 1j * gamma, 0],
            [-1, 0, 1j * gamma],
        ],
        dtype=complex,
    )
    assert_allclose(h, expected)


def test_hamiltonian_hermitian_limit():
    spec = TreeSpec((2, 3), 0.0, 0.0)
    h = assemble_hamiltonian(spec, build_index(spec)).toarray()
    assert_allclose(h, h.conj().T)
    values = np.linalg.eigvals(h)
    assert np.abs(values.imag).max() < 1e-12


@pytest.mark.parametrize("branching", [(2, 2), (3, 2, 2), (2, 3, 4)])
def test_hamiltonian_structure(branching):
    spec = TreeSpec(branching, 0.4, 0.9)
    index = build_index(spec)
    h = assemble_hamiltonian(spec, index)
    dense = h.toarray()
    # complex symmetric, not Hermitian
    assert_allclose(dense, dense.T)
    # off-diagonal count = 2 (n_tot - 1)
    off = dense.copy()
    np.fill_diagonal(off, 0.0)
    assert np.count_nonzero(off) == 2 * (spec.n_tot - 1)
    assert_allclose(off[off != 0], -1.0)
    # anti-Hermitian part is diagonal with entries in {-gamma0, 0, gammaN}
    anti = (dense - dense.conj().T) / 2j
    assert_allclose(anti, np.diag(np.diag(anti)))
    diag = np.real(np.diag(anti))
    assert set(np.round(diag, 12)) <= {-spec.gamma0, 0.0, spec.gammaN}


def test_hamiltonian_n2_offdiag_count():
    spec = TreeSpec((2, 2), 1.0, 1.0)
    h = assemble_hamiltonian(spec, build_index(spec)).toarray()
    np.fill_diagonal(h, 0)
    assert np.count_nonzero(h) == 12


def test_link_current_block():
    spec = TreeSpec((2,), 0.5, 0.5)
    index = build_index(spec)
    op = link_current_operator((), (1,), index).toarray()
    block = op[np.ix_([0, 1], [0, 1])]
    assert_allclose(block, np.array([[0, 1j], [-1j, 0]]))
    assert_allclose(op, op.conj().T)
    assert abs(np.trace(op)) == 0.0
    values = np.sort(np.linalg.eigvalsh(op))
    assert_allclose(values[[0, -1]], [-1.0, 1.0], atol=1e-12)
    assert_allclose(values[1:-1], 0.0, atol=1e-12)


def test_link_current_rejects_non_adjacent():
    spec = TreeSpec((2, 2), 0.5, 0.5)
    index = build_index(spec)
    with pytest.raises(ValueError):
        link_current_operator((), (1, 1), index)
    with pytest.raises(ValueError):
        link_current_operator((1,), (2, 1), index)


def test_link_current_real_state_zero():
    spec = TreeSpec((3, 2), 0.5, 0.5)
    index = build_index(spec)
    op = link_current_operator((2,), (2, 1), index)
    rng = np.random.default_rng(4)
    v = rng.normal(size=index.n_tot)  # real amplitudes
    v /= np.linalg.norm(v)
    assert abs(v @ (op @ v)) < 1e-14
    w = np.zeros(index.n_tot, dtype=complex)
    w[0] = 1.0  # zero amplitude on both endpoints
    assert abs(w.conj() @ (op @ w)) == 0.0


def test_config_files(tmp_path):
    json_file = tmp_path / "tree.json"
    json_file.write_text(
        '{"N": 2, "branching": [2, 3], "gamma0": 0.25, "gammaN": 1.5}'
    )
    spec = load_tree_config(json_file)
    assert spec == TreeSpec((2, 3), 0.25, 1.5)

    toml_file = tmp_path / "tree.toml"
    toml_file.write_text("N = 2\nbranching = [2, 3]\ngamma0 = 0.25\ngammaN = 1.5\n")
    assert load_tree_config(toml_file) == spec

    bad = tmp_path / "bad.toml"
    bad.write_text("branching = [2, 0]\ngamma0 = 1.0\ngammaN = 1.0\n")
    with pytest.raises(ConfigError):
        load_tree_config(bad)


def test_export_coo_text(tmp_path):
    spec = TreeSpec((2,), 0.5, 0.25)
    index = build_index(spec)
    h = assemble_hamiltonian(spec, index)
    out = tmp_path / "h.txt"
    export_coo_text(h, out)
    lines = out.read_text().strip().splitlines()
    assert len(lines) == h.nnz
    row, col, re, im = lines[0].split()
    assert (int(row), int(col)) == (0, 0)
    assert float(re) == 0.0 and float(im) == -0.5
