"""Fidelity, purity and populations.

Fidelity follows the square-root convention ``F = sqrt(<psi|rho|psi>)``, so that
values compare directly with percentages quoted for this scheme. Square it to
get the overlap probability.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import PositivityError, ShapeError

__all__ = [
    "TargetState",
    "target_state",
    "w_state",
    "w_prime_state",
    "basis_state",
    "fidelity",
    "purity",
    "population",
]

_NAMED = {
    "W": ("100", "010", "001"),
    "Wprime": ("110", "101", "011"),
}


@dataclass(frozen=True)
class TargetState:
    """A named pure state on a model basis."""

    name: str
    vector: np.ndarray

    def __post_init__(self):
        norm = np.linalg.norm(self.vector)
        if abs(norm - 1) > 1e-12:
            raise ValueError(f"target state {self.name!r} has norm {norm}")


def basis_state(model, label) -> np.ndarray:
    """Unit vector of one basis label; ``"100"`` means the cavity vacuum where relevant."""
    v = np.zeros(model.dim, dtype=complex)
    v[model.index(label)] = 1.0
    return v


def target_state(model, name: str) -> TargetState:
    """``"W"``, ``"Wprime"`` or any basis label of ``model``."""
    if name in _NAMED:
        v = sum(basis_state(model, lab) for lab in _NAMED[name]) / np.sqrt(3)
        return TargetState(name, v)
    return TargetState(str(name), basis_state(model, name))


def w_state(model) -> TargetState:
    """``(|100> + |010> + |001>)/sqrt(3)``, with the cavity in vacuum."""
    return target_state(model, "W")


def w_prime_state(model) -> TargetState:
    """``(|110> + |101> + |011>)/sqrt(3)``, with the cavity in vacuum."""
    return target_state(model, "Wprime")


def _vector(target):
    return target.vector if isinstance(target, TargetState) else np.asarray(target)


def fidelity(rho, target, atol: float = 1e-10) -> float:
    """``sqrt(<psi|rho|psi>)``; small negative overlaps within ``atol`` clamp to 0.

    Raises
    ------
    PositivityError
        If the overlap is below ``-atol``.
    """
    psi = _vector(target)
    rho = np.asarray(rho)
    if rho.shape != (psi.size, psi.size):
        raise ShapeError(f"state of shape {rho.shape} does not match target of length {psi.size}")
    overlap = np.vdot(psi, rho @ psi).real
    if overlap < -atol:
        raise PositivityError(f"negative overlap {overlap:.3g}")
    return float(np.sqrt(min(max(overlap, 0.0), 1.0 + atol)))


def purity(rho) -> float:
    """``Tr(rho^2)``."""
    rho = np.asarray(rho)
    return float(np.vdot(rho.conj().T, rho).real)


def population(rho, label, model=None) -> float:
    """``<label|rho|label>``; ``label`` is an index, or a label resolved on ``model``."""
    rho = np.asarray(rho)
    if isinstance(label, (int, np.integer)):
        idx = int(label)
    elif model is None:
        raise KeyError(f"cannot resolve label {label!r} without a model")
    else:
        idx = model.index(label)
    return float(rho[idx, idx].real)
