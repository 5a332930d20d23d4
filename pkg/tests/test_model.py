import itertools

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from rydberg_w.model import (
    LEVELS,
    BasisLabel,
    LindbladModel,
    SystemParams,
    annihilation,
    atomic_h_r,
    basis_index,
    build_basis,
    build_collapse_ops,
    build_full_model,
    build_h_r,
    build_h_z,
    build_h_z_parts,
    excitation_charge,
)
from rydberg_w.operators import is_hermitian
from rydberg_w.solvers import evolve


def ket(p, text):
    v = np.zeros(p.dim)
    label = BasisLabel.parse(text)
    v[basis_index(label, p.n_c)] = 1
    return v


def elem(op, p, bra, k):
    return ket(p, bra) @ (op @ ket(p, k))


def dense_h_z(p):
    """Independent dense construction from explicit numpy Kronecker products."""
    i5, ic = np.eye(5), np.eye(p.n_c)
    a = np.diag(np.sqrt(np.arange(1, p.n_c)), 1)

    def unit(r, c):
        m = np.zeros((5, 5))
        m[r, c] = 1
        return m

    def on(op, site):
        f = [i5, i5, i5]
        f[site] = op
        return np.kron(np.kron(np.kron(f[0], f[1]), f[2]), ic)

    cav = np.kron(np.eye(125), a)
    h = np.zeros((p.dim, p.dim))
    for s in range(3):
        t = p.omega * on(unit(2, 1), s) + p.g * on(unit(2, 0), s) @ cav
        h += t + t.T
    return h


class TestParams:
    def test_defaults(self):
        p = SystemParams()
        assert p.urr == 90.0 and p.dim == 250

    def test_explicit_urr(self):
        assert SystemParams(u_rr=3.0).urr == 3.0

    @pytest.mark.parametrize("bad", [dict(gamma=-1), dict(n_c=1), dict(delta=np.nan),
                                     dict(n_c=2.5), dict(u_rr=-2)])
    def test_invalid(self, bad):
        with pytest.raises(ValueError):
            SystemParams(**bad)

    def test_from_mhz(self):
        p = SystemParams.from_mhz(10.0, omega=0.1, omega_r=20.0, delta=1000.0, kappa=1.0,
                                  gamma=0.02, gamma_e=3.0)
        assert p.g == 1 and p.omega_r == 2.0 and p.delta == 100.0 and p.kappa == 0.1
        assert p.gamma_e == pytest.approx(0.3)


class TestBasis:
    def test_size_and_first(self):
        p = SystemParams()
        basis = build_basis(p)
        assert len(basis) == 250
        assert basis[0] == BasisLabel(("0", "0", "0"), 0)

    def test_index_oracle(self):
        p = SystemParams()
        basis = build_basis(p)
        # Positional arithmetic: atom1 digit 1, others 0, photon 0 -> 1 * 25 * n_c.
        assert basis.index(BasisLabel(("1", "0", "0"), 0)) == 50
        for k, label in enumerate(basis):
            assert basis_index(label, p.n_c) == k

    def test_lexicographic(self):
        basis = build_basis(SystemParams(n_c=3))
        keys = [(tuple(LEVELS.index(a) for a in b.atoms), b.photon) for b in basis]
        assert keys == sorted(keys)
        assert all(b.photon < 3 for b in basis)

    def test_label_parse_and_str(self):
        lab = BasisLabel.parse("e00,1")
        assert lab == BasisLabel(("e", "0", "0"), 1) and str(lab) == "e00,1"
        assert BasisLabel.parse("rrr").photon == 0
        with pytest.raises(KeyError):
            BasisLabel.parse("xy0")


class TestHz:
    def test_elements(self):
        p = SystemParams(omega=0.07, g=1.3)
        h = build_h_z(p)
        assert elem(h, p, "e00,0", "100,0") == pytest.approx(0.07)
        assert elem(h, p, "e00,0", "000,1") == pytest.approx(1.3)

    def test_dense_oracle(self):
        p = SystemParams(omega=0.07, g=1.3)
        assert np.abs(build_h_z(p).toarray() - dense_h_z(p)).max() < 1e-14

    def test_excitation_number_structure(self):
        p = SystemParams()
        h1, h2 = build_h_z_parts(p)
        basis = build_basis(p)
        # The cavity coupling conserves the number of |e> plus photons ...
        n = np.diag([b.atoms.count("e") + b.photon for b in basis])
        assert np.abs(h2.toarray() @ n - n @ h2.toarray()).max() < 1e-14
        # ... which the classical drive changes; the full H_Z conserves the
        # number of atoms in {1, e} plus photons.
        h = build_h_z(p).toarray()
        assert np.abs(h @ n - n @ h).max() > 0
        n1 = np.diag([b.atoms.count("e") + b.atoms.count("1") + b.photon for b in basis])
        assert np.abs(h @ n1 - n1 @ h).max() < 1e-14
        assert np.allclose(build_h_z(p).toarray(), (p.omega * h1 + p.g * h2).toarray())


class TestHr:
    def test_resonance_diagonals(self):
        p = SystemParams(delta=37.0)
        h = build_h_r(p)
        assert elem(h, p, "rrr", "rrr") == pytest.approx(-6 * 37 + 3 * p.urr, abs=1e-12)
        for state in ("rrr", "pp0", "p0p", "0pp", "pp1", "p1p", "1pp"):
            assert elem(h, p, state, state) == 0

    def test_cross_term(self):
        p = SystemParams(delta=40.0, u_rp=13.0)
        assert elem(build_h_r(p), p, "rp0", "rp0") == pytest.approx(-3 * 40 + 13)

    def test_drives(self):
        p = SystemParams(omega_r=0.8)
        h = build_h_r(p)
        assert elem(h, p, "r00", "000") == pytest.approx(0.8)
        assert elem(h, p, "1p1", "111") == pytest.approx(0.8)

    def test_pair_symmetric(self):
        p = SystemParams(u_rp=5.0)
        h = atomic_h_r(p).toarray()
        for perm in itertools.permutations(range(3)):
            idx = []
            for a, b, c in itertools.product(range(5), repeat=3):
                t = (a, b, c)
                s = [t[k] for k in perm]
                idx.append(s[0] * 25 + s[1] * 5 + s[2])
            idx = np.array(idx)
            assert np.abs(h[np.ix_(idx, idx)] - h).max() == 0


class TestCollapse:
    def test_count_and_order(self):
        p = SystemParams(kappa=0.3)
        ops = build_collapse_ops(p)
        assert len(ops) == 19
        # First operator: atom 1, r -> 0.
        assert elem(ops[0], p, "000", "r00") == pytest.approx(np.sqrt(p.gamma / 2))
        # Sixth operator: atom 1, e -> 1.
        assert elem(ops[5], p, "100", "e00") == pytest.approx(np.sqrt(p.gamma_e / 2))
        # Seventh: atom 2, r -> 0.
        assert elem(ops[6], p, "000", "0r0") == pytest.approx(np.sqrt(p.gamma / 2))

    def test_rate_conservation(self):
        p = SystemParams(gamma=0.004, gamma_e=0.2)
        ops = build_collapse_ops(p)[:6]
        total = sum((op.conj().T @ op) for op in ops)
        assert elem(total, p, "r00", "r00") == pytest.approx(p.gamma)
        assert elem(total, p, "p00", "p00") == pytest.approx(p.gamma)
        assert elem(total, p, "e00", "e00") == pytest.approx(p.gamma_e)

    def test_cavity(self):
        p = SystemParams(kappa=0.3)
        lc = build_collapse_ops(p)[-1]
        assert elem(lc, p, "000,0", "000,1") == pytest.approx(np.sqrt(0.3))

    def test_annihilation(self):
        a = annihilation(3).toarray()
        assert np.allclose(a, np.diag([1, np.sqrt(2)], 1))


class TestFullModel:
    def test_undriven_ground_is_stationary(self):
        p = SystemParams(omega=0.0, omega_r=0.0)
        m = build_full_model(p)
        psi = np.zeros(m.dim)
        psi[m.index("000,0")] = 1
        r = evolve(m, psi, 50.0, 3, observables={"p": lambda rho: rho[0, 0].real})
        assert np.allclose(r.observables["p"], 1.0, atol=1e-12)

    @given(st.floats(20, 60), st.floats(0.005, 0.1))
    @settings(max_examples=8, deadline=None)
    def test_hermitian_over_sweep(self, delta, omega):
        p = SystemParams(delta=delta, omega=omega, omega_r=1, gamma=0.002, gamma_e=0.1)
        assert is_hermitian(build_full_model(p).h, 1e-12)

    def test_symmetry_declarations(self, full_model):
        h = full_model.h.toarray()
        ops = full_model.collapse
        for perm in full_model.permutations:
            assert np.abs(h[np.ix_(perm, perm)] - h).max() == 0
            # The collapse set maps onto itself under atom permutations.
            permuted = {op[perm][:, perm].tocoo().data.tobytes() + op[perm][:, perm].indices.tobytes()
                        for op in ops}
            assert len(permuted) == len({op.tocoo().data.tobytes() + op.indices.tobytes() for op in ops})
        q = full_model.charge
        hq = sp.coo_matrix(full_model.h)
        assert np.all(q[hq.row] == q[hq.col])
        for op in ops:
            c = sp.coo_matrix(op)
            if c.nnz:
                assert len(set(q[c.row] - q[c.col])) == 1

    def test_index_lookup(self, full_model):
        assert full_model.index("100") == full_model.index("100,0") == 50
        with pytest.raises(KeyError):
            full_model.index("zzz")

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            LindbladModel(basis=("a", "b"), h=sp.csr_matrix(np.array([[0, 1], [0, 0]])), collapse=())

    def test_charge_values(self):
        basis = build_basis(SystemParams())
        q = excitation_charge(basis)
        assert q[basis.index(BasisLabel(("1", "p", "e"), 1))] == 4
