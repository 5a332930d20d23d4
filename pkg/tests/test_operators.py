import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from rydberg_w.exceptions import ShapeError, SizingError
from rydberg_w.operators import (
    Superoperator,
    as_operator,
    dagger,
    dyad,
    embed,
    identity,
    is_hermitian,
    kron,
    liouvillian,
    unvec,
    vec,
)

from conftest import random_density, random_hermitian

seeds = st.integers(0, 2**32 - 1)


def dense_kron(a, b):
    # Brute-force tensor product: block (i, j) of the result is a[i, j] * b.
    a, b = np.asarray(a), np.asarray(b)
    out = np.zeros((a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]), dtype=complex)
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            out[i * b.shape[0]:(i + 1) * b.shape[0], j * b.shape[1]:(j + 1) * b.shape[1]] = a[i, j] * b
    return out


def master_rhs(h, cs, rho):
    out = -1j * (h @ rho - rho @ h)
    for c in cs:
        cd = c.conj().T
        out += c @ rho @ cd - 0.5 * (cd @ c @ rho + rho @ cd @ c)
    return out


def random_sparse(rng, n, density=0.5):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    m[rng.random((n, n)) > density] = 0
    return sp.csr_matrix(m)


class TestKron:
    def test_identity(self):
        assert abs(kron(identity(2), identity(3)) - identity(6)).max() == 0

    def test_block_placement(self):
        m = kron(dyad(0, 1, 2), identity(2)).toarray()
        expected = np.zeros((4, 4))
        expected[0, 2] = expected[1, 3] = 1
        assert np.array_equal(m, expected)

    @given(seeds)
    @settings(max_examples=25, deadline=None)
    def test_associative(self, seed):
        rng = np.random.default_rng(seed)
        a, b, c = (random_sparse(rng, 2) for _ in range(3))
        left = kron(kron(a, b), c).toarray()
        right = kron(a, kron(b, c)).toarray()
        assert np.allclose(left, right, atol=1e-14)
        assert np.allclose(left, dense_kron(dense_kron(a.toarray(), b.toarray()), c.toarray()))

    def test_sizing_error(self):
        with pytest.raises(SizingError):
            kron(identity(100), identity(100), max_dim=1000)

    def test_drops_tiny_entries(self):
        m = as_operator(np.array([[1.0, 1e-16], [0, 2.0]]))
        assert m.nnz == 2


class TestEmbed:
    def test_identity(self):
        assert abs(embed(identity(5), 2, 2) - identity(250)).max() == 0

    def test_excites_first_atom(self):
        # |111,0> -> |e11,0>; atomic index of 111 is 31, of e11 is 56.
        op = embed(dyad(2, 1, 5), 1, 2)
        v = np.zeros(250)
        v[31 * 2] = 1
        out = op @ v
        assert out[56 * 2] == 1 and np.count_nonzero(out) == 1

    @given(seeds)
    @settings(max_examples=10, deadline=None)
    def test_disjoint_sites_commute(self, seed):
        rng = np.random.default_rng(seed)
        x, y = random_sparse(rng, 5), random_sparse(rng, 5)
        a, b = embed(x, 1, 2), embed(y, 2, 2)
        assert abs(a @ b - b @ a).max() < 1e-12

    def test_accepts_params(self, default_params):
        assert embed(identity(2), 4, default_params).shape == (250, 250)

    def test_shape_errors(self):
        with pytest.raises(ShapeError):
            embed(identity(3), 1, 2)
        with pytest.raises(ShapeError):
            embed(identity(2), 5, 2)
        with pytest.raises(ShapeError):
            embed(identity(5), 4, 2)


class TestDagger:
    def test_trivial(self):
        assert abs(dagger(identity(3)) - identity(3)).max() == 0
        assert abs(dagger(dyad(0, 1, 2)) - dyad(1, 0, 2)).max() == 0

    @given(seeds)
    @settings(max_examples=25, deadline=None)
    def test_real_imag(self, seed):
        rng = np.random.default_rng(seed)
        a, b = rng.normal(size=(4, 4)), rng.normal(size=(4, 4))
        got = dagger(sp.csr_matrix(a + 1j * b)).toarray()
        assert np.allclose(got, a.T - 1j * b.T, atol=1e-14)

    @given(seeds)
    @settings(max_examples=25, deadline=None)
    def test_involution_antihomomorphism(self, seed):
        rng = np.random.default_rng(seed)
        a, b = random_sparse(rng, 4), random_sparse(rng, 4)
        assert abs(dagger(dagger(a)) - a).max() == 0
        assert abs(dagger(a @ b) - dagger(b) @ dagger(a)).max() < 1e-12


class TestLiouvillian:
    def test_single_decay(self):
        gamma = 0.3
        sup = liouvillian(sp.csr_matrix((2, 2)), [np.sqrt(gamma) * dyad(0, 1, 2)])
        out = sup.apply(np.diag([0, 1.0]))
        assert np.allclose(out, gamma * np.diag([1.0, -1.0]))

    def test_commuting_state_is_stationary(self, rng):
        h = random_hermitian(rng, 4)
        w, v = np.linalg.eigh(h)
        rho = v @ np.diag([0.1, 0.2, 0.3, 0.4]) @ v.conj().T
        assert np.abs(liouvillian(sp.csr_matrix(h)).apply(rho)).max() < 1e-12

    @given(seeds)
    @settings(max_examples=25, deadline=None)
    def test_matches_dense_master_equation(self, seed):
        rng = np.random.default_rng(seed)
        h = random_hermitian(rng, 4)
        cs = [random_sparse(rng, 4).toarray() for _ in range(3)]
        rho = random_density(rng, 4)
        sup = liouvillian(sp.csr_matrix(h), [sp.csr_matrix(c) for c in cs])
        assert np.abs(sup.apply(rho) - master_rhs(h, cs, rho)).max() < 1e-12

    @given(seeds)
    @settings(max_examples=25, deadline=None)
    def test_trace_and_hermiticity_preserved(self, seed):
        rng = np.random.default_rng(seed)
        h = random_hermitian(rng, 5)
        cs = [random_sparse(rng, 5) for _ in range(2)]
        sup = liouvillian(sp.csr_matrix(h), cs)
        rho = random_hermitian(rng, 5)
        out = sup.apply(rho)
        assert abs(np.trace(out)) < 1e-10
        assert np.abs(out - out.conj().T).max() < 1e-10

    def test_full_model_trace_annihilation(self, full_model, rng):
        sup = full_model.liouvillian()
        rho = random_hermitian(rng, full_model.dim)
        out = sup.apply(rho)
        assert abs(np.trace(out)) < 1e-10
        assert np.abs(out - out.conj().T).max() < 1e-10

    def test_shape_errors(self):
        with pytest.raises(ShapeError):
            liouvillian(identity(2), [identity(3)])
        with pytest.raises(ShapeError):
            liouvillian(sp.csr_matrix(np.ones((2, 3))))

    def test_vec_roundtrip_column_major(self, rng):
        rho = random_density(rng, 3)
        assert np.array_equal(unvec(vec(rho)), rho)
        assert vec(rho)[1] == rho[1, 0]
        with pytest.raises(ShapeError):
            unvec(np.zeros(5))

    def test_superoperator_matmul(self, rng):
        sup = liouvillian(sp.csr_matrix(random_hermitian(rng, 3)))
        assert isinstance(sup, Superoperator)
        rho = random_density(rng, 3)
        assert np.allclose(sup @ vec(rho), vec(sup.apply(rho)))

    def test_is_hermitian(self, rng):
        assert is_hermitian(sp.csr_matrix(random_hermitian(rng, 4)))
        assert not is_hermitian(dyad(0, 1, 2))
