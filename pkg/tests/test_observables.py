import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rydberg_w.effective import build_effective_model
from rydberg_w.exceptions import PositivityError, ShapeError
from rydberg_w.model import SystemParams
from rydberg_w.observables import (
    TargetState,
    basis_state,
    fidelity,
    population,
    purity,
    target_state,
    w_prime_state,
    w_state,
)

from conftest import random_density


@pytest.fixture(scope="module")
def eff_model():
    return build_effective_model(SystemParams())


def test_w_components(full_model):
    w = w_state(full_model).vector
    for lab in ("100,0", "010,0", "001,0"):
        assert w[full_model.index(lab)] == pytest.approx(1 / np.sqrt(3))
    assert np.linalg.norm(w) == pytest.approx(1, abs=1e-12)
    assert w[full_model.index("100,1")] == 0


def test_w_prime(full_model):
    v = w_prime_state(full_model).vector
    assert v[full_model.index("011")] == pytest.approx(1 / np.sqrt(3))


def test_effective_basis_targets(eff_model):
    assert np.count_nonzero(w_state(eff_model).vector) == 3
    assert target_state(eff_model, "D2").vector[eff_model.index("D2")] == 1


def test_target_norm():
    with pytest.raises(ValueError):
        TargetState("bad", np.array([1.0, 1.0]))


def test_fidelity_examples(full_model):
    w = w_state(full_model)
    assert fidelity(np.outer(w.vector, w.vector.conj()), w) == pytest.approx(1)
    e000 = basis_state(full_model, "000")
    assert fidelity(np.outer(e000, e000), w) == 0
    ground = [full_model.index(a + b + c) for a in "01" for b in "01" for c in "01"]
    mixed = np.zeros((full_model.dim, full_model.dim))
    mixed[ground, ground] = 1 / 8
    # The W overlap of the ground mixture is 3 * (1/3) * (1/8).
    assert fidelity(mixed, w) == pytest.approx(np.sqrt(1 / 8))


def test_fidelity_errors():
    t = TargetState("x", np.array([1.0, 0.0]))
    with pytest.raises(PositivityError):
        fidelity(np.diag([-0.1, 1.1]), t)
    assert fidelity(np.diag([-1e-12, 1.0]), t) == 0
    with pytest.raises(ShapeError):
        fidelity(np.eye(3) / 3, t)


def test_purity_examples():
    assert purity(np.diag([1.0, 0, 0])) == pytest.approx(1)
    assert purity(np.eye(8) / 8) == pytest.approx(0.125)


def test_population(full_model, rng):
    e000 = basis_state(full_model, "000,0")
    rho = np.outer(e000, e000)
    assert population(rho, "000,0", full_model) == 1
    assert population(rho, "111,0", full_model) == 0
    with pytest.raises(KeyError):
        population(rho, "abc", full_model)
    with pytest.raises(KeyError):
        population(rho, "000")
    small = random_density(rng, 6)
    assert sum(population(small, k) for k in range(6)) == pytest.approx(1, abs=1e-10)


@given(st.integers(0, 2**32 - 1), st.floats(0, 1))
@settings(max_examples=40, deadline=None)
def test_fidelity_monotone_under_mixing(seed, eps):
    rng = np.random.default_rng(seed)
    n = 5
    psi = rng.normal(size=n) + 1j * rng.normal(size=n)
    t = TargetState("psi", psi / np.linalg.norm(psi))
    rho = random_density(rng, n)
    mixed = (1 - eps) * rho + eps * np.outer(t.vector, t.vector.conj())
    assert np.vdot(t.vector, rho @ t.vector).real <= 1 + 1e-12
    assert fidelity(mixed, t) >= fidelity(rho, t) - 1e-12


@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
@settings(max_examples=40, deadline=None)
def test_purity_bounds(seed, rank):
    rng = np.random.default_rng(seed)
    rho = random_density(rng, 6, rank)
    assert 1 / 6 - 1e-12 <= purity(rho) <= 1 + 1e-10
