"""The full atom-cavity model: three five-level atoms in a single-mode cavity.

Atomic levels are indexed ``0, 1, e, r, p -> 0..4``. All frequencies and rates
are in units of the cavity coupling ``g``; the frame is the one in which the
Rydberg drives are time independent, with detunings ``-2*delta`` on ``|r>`` and
``-delta`` on ``|p>``.
"""

from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from .exceptions import ShapeError
from .operators import (
    ATOM_DIM, as_operator, dagger, dyad, embed, identity, is_hermitian, kron, liouvillian,
)

__all__ = [
    "LEVELS",
    "BasisLabel",
    "SystemParams",
    "LindbladModel",
    "build_basis",
    "basis_index",
    "annihilation",
    "atomic_embed",
    "atomic_index",
    "atomic_h_r",
    "build_h_z",
    "build_h_z_parts",
    "build_h_r",
    "build_collapse_ops",
    "build_full_model",
    "excitation_charge",
    "atom_permutations",
]

LEVELS = ("0", "1", "e", "r", "p")
G0, G1, E, R, P = range(5)
PAIRS = ((1, 2), (1, 3), (2, 3))

# Decay channels per atom, in collapse-operator order: (lower, upper, rate field).
CHANNELS = (
    (G0, R, "gamma"),
    (G1, R, "gamma"),
    (G0, P, "gamma"),
    (G1, P, "gamma"),
    (G0, E, "gamma_e"),
    (G1, E, "gamma_e"),
)


class BasisLabel(NamedTuple):
    """Product state ``|a1 a2 a3>|photon>``; ``atoms`` holds level names."""

    atoms: tuple[str, str, str]
    photon: int = 0

    def __str__(self):
        return f"{''.join(self.atoms)},{self.photon}"

    @classmethod
    def parse(cls, text: str) -> "BasisLabel":
        """Parse ``"e00,0"`` or ``"e00"`` (vacuum)."""
        atoms, _, photon = text.partition(",")
        if len(atoms) != 3 or any(a not in LEVELS for a in atoms):
            raise KeyError(f"not a basis label: {text!r}")
        return cls(tuple(atoms), int(photon) if photon else 0)


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of one run, in units of ``g``.

    ``u_rr`` defaults to the antiblockade resonance ``2 * delta``; leave it as
    ``None`` so that sweeps over ``delta`` keep the resonance.
    The defaults are the parameters of the time-evolution benchmark
    (``omega=0.05, omega_r=1, delta=45, gamma=0.002, gamma_e=0.1, kappa=0``).
    """

    g: float = 1.0
    omega: float = 0.05
    omega_r: float = 1.0
    delta: float = 45.0
    u_rr: float | None = None
    u_rp: float = 0.0
    gamma: float = 0.002
    gamma_e: float = 0.1
    kappa: float = 0.0
    n_c: int = 2

    def __post_init__(self):
        for name in ("g", "omega", "omega_r", "delta", "u_rp", "gamma", "gamma_e", "kappa"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value}")
        if self.u_rr is not None and (not np.isfinite(self.u_rr) or self.u_rr < 0):
            raise ValueError(f"u_rr must be finite and >= 0, got {self.u_rr}")
        if int(self.n_c) != self.n_c or self.n_c < 2:
            raise ValueError(f"n_c must be an integer >= 2, got {self.n_c}")

    @property
    def urr(self) -> float:
        """Resolved same-state Rydberg interaction."""
        return 2.0 * self.delta if self.u_rr is None else float(self.u_rr)

    @property
    def dim(self) -> int:
        return ATOM_DIM**3 * self.n_c

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_mhz(cls, g, *, omega=None, omega_r=None, delta=None, u_rr=None, u_rp=0.0,
                 gamma=0.0, gamma_e=0.0, kappa=0.0, n_c=2) -> "SystemParams":
        """Build parameters from values in MHz, rescaled by ``g``.

        All inputs must carry the same convention (all angular, or all
        ordinary frequencies); only ratios to ``g`` enter the model.
        """
        scale = lambda x: None if x is None else x / g  # noqa: E731
        kw = dict(omega=scale(omega), omega_r=scale(omega_r), delta=scale(delta))
        kw = {k: v for k, v in kw.items() if v is not None}
        return cls(g=1.0, u_rr=scale(u_rr), u_rp=u_rp / g, gamma=gamma / g,
                   gamma_e=gamma_e / g, kappa=kappa / g, n_c=n_c, **kw)


@dataclass(frozen=True)
class LindbladModel:
    """A Hamiltonian and collapse operators over a shared, labelled basis.

    Attributes
    ----------
    basis : tuple
        Labels in matrix-index order.
    h : scipy.sparse.csr_matrix
    collapse : tuple of scipy.sparse.csr_matrix
    permutations : tuple of ndarray, optional
        Basis permutations that leave ``h`` and the set of collapse operators
        invariant. Used for symmetry-adapted solves.
    charge : ndarray, optional
        Integer charge conserved by ``h`` and shifted by a fixed amount by each
        collapse operator.
    """

    basis: tuple
    h: sp.csr_matrix
    collapse: tuple
    permutations: tuple | None = None
    charge: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        n = len(self.basis)
        for op in (self.h, *self.collapse):
            if op.shape != (n, n):
                raise ShapeError(f"operator shape {op.shape} does not match basis size {n}")
        if not is_hermitian(self.h, 1e-12):
            raise ValueError("Hamiltonian is not Hermitian")

    @property
    def dim(self) -> int:
        return len(self.basis)

    def index(self, label) -> int:
        """Position of ``label`` (a label object or its string form) in the basis."""
        lookup = self.__dict__.get("_index")
        if lookup is None:
            lookup = {}
            for i, b in enumerate(self.basis):
                lookup[b] = i
                lookup[str(b)] = i
            object.__setattr__(self, "_index", lookup)
        try:
            return lookup[label]
        except KeyError:
            if isinstance(label, str) and "," not in label:
                return self.index(f"{label},0")
            raise KeyError(f"unknown basis label {label!r}") from None

    def liouvillian(self):
        return liouvillian(self.h, self.collapse)


def build_basis(params: SystemParams) -> list[BasisLabel]:
    """All product states, ordered lexicographically by (atom1, atom2, atom3, photon)."""
    return [
        BasisLabel((LEVELS[a], LEVELS[b], LEVELS[c]), k)
        for a, b, c in itertools.product(range(ATOM_DIM), repeat=3)
        for k in range(params.n_c)
    ]


def basis_index(label: BasisLabel, n_c: int) -> int:
    return atomic_index(label.atoms) * n_c + label.photon


def annihilation(n_c: int) -> sp.csr_matrix:
    """Cavity lowering operator truncated to ``n_c`` levels."""
    return as_operator(sp.diags(np.sqrt(np.arange(1, n_c)), 1, shape=(n_c, n_c)))


def _atom_op(level_hi, level_lo):
    return dyad(level_hi, level_lo, ATOM_DIM)


def build_h_z_parts(params: SystemParams) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """Return the bare Zeno generators ``(H1, H2)`` with ``H_Z = omega*H1 + g*H2``.

    ``H1 = sum_i |e><1|_i + h.c.`` and ``H2 = sum_i |e><0|_i a + h.c.``.
    """
    n_c = params.n_c
    a = embed(annihilation(n_c), 4, n_c)
    h1 = sp.csr_matrix((params.dim, params.dim), dtype=complex)
    h2 = sp.csr_matrix((params.dim, params.dim), dtype=complex)
    for i in (1, 2, 3):
        up1 = embed(_atom_op(E, G1), i, n_c)
        up0 = embed(_atom_op(E, G0), i, n_c) @ a
        h1 = h1 + up1 + dagger(up1)
        h2 = h2 + up0 + dagger(up0)
    return as_operator(h1), as_operator(h2)


def build_h_z(params: SystemParams) -> sp.csr_matrix:
    """Zeno-pumping Hamiltonian ``sum_i omega |e><1|_i + g |e><0|_i a + h.c.``."""
    h1, h2 = build_h_z_parts(params)
    return as_operator(params.omega * h1 + params.g * h2)


def atomic_embed(op, site: int) -> sp.csr_matrix:
    """Place a 5x5 operator on atom ``site`` (1..3) of the 125-dimensional atomic space."""
    if site not in (1, 2, 3):
        raise ShapeError(f"atomic site must be in 1..3, got {site}")
    eye = identity(ATOM_DIM)
    factors = [eye, eye, eye]
    factors[site - 1] = as_operator(op)
    return kron(kron(factors[0], factors[1]), factors[2])


def atomic_index(atoms) -> int:
    """Position of a level triple such as ``"pp0"`` in the atomic space."""
    a, b, c = (LEVELS.index(x) for x in atoms)
    return (a * ATOM_DIM + b) * ATOM_DIM + c


def atomic_h_r(params: SystemParams) -> sp.csr_matrix:
    """Rydberg-pumping Hamiltonian on the 125-dimensional atomic space."""
    site = atomic_embed
    nr, np_ = _atom_op(R, R), _atom_op(P, P)
    h = sp.csr_matrix((ATOM_DIM**3,) * 2, dtype=complex)
    for i in (1, 2, 3):
        drive = params.omega_r * (site(_atom_op(R, G0), i) + site(_atom_op(P, G1), i))
        h = h + drive + dagger(drive)
        h = h - 2.0 * params.delta * site(nr, i) - params.delta * site(np_, i)
    for i, j in PAIRS:
        h = h + params.urr * (site(nr, i) @ site(nr, j) + site(np_, i) @ site(np_, j))
        if params.u_rp:
            h = h + params.u_rp * (site(np_, i) @ site(nr, j) + site(nr, i) @ site(np_, j))
    return as_operator(h)


def build_h_r(params: SystemParams) -> sp.csr_matrix:
    """Rydberg-pumping Hamiltonian on the full space (identity on the cavity)."""
    return kron(atomic_h_r(params), identity(params.n_c))


def build_collapse_ops(params: SystemParams) -> list[sp.csr_matrix]:
    """Atomic decays (6 per atom, atom-major) followed by cavity loss.

    Per atom the channels are r->0, r->1, p->0, p->1, e->0, e->1, each with
    half the total decay rate of its upper level.
    """
    ops = []
    for i in (1, 2, 3):
        for lower, upper, rate in CHANNELS:
            amp = np.sqrt(getattr(params, rate) / 2.0)
            ops.append(amp * embed(_atom_op(lower, upper), i, params.n_c))
    ops.append(np.sqrt(params.kappa) * embed(annihilation(params.n_c), 4, params.n_c))
    return [as_operator(op) for op in ops]


def excitation_charge(basis) -> np.ndarray:
    """Charge ``sum_i (|1><1| + |e><e| + |p><p|)_i + a^+ a`` of each basis state.

    Every Hamiltonian term conserves it and every collapse operator shifts it
    by a fixed amount, so coherences between different charges decouple.
    """
    q = {"0": 0, "1": 1, "e": 1, "r": 0, "p": 1}
    return np.array([sum(q[a] for a in b.atoms) + b.photon for b in basis], dtype=int)


def atom_permutations(basis) -> tuple[np.ndarray, ...]:
    """Index maps of the six permutations of the three atoms."""
    index = {b: i for i, b in enumerate(basis)}
    maps = []
    for perm in itertools.permutations(range(3)):
        maps.append(np.array(
            [index[BasisLabel(tuple(b.atoms[k] for k in perm), b.photon)] for b in basis]
        ))
    return tuple(maps)


def build_full_model(params: SystemParams) -> LindbladModel:
    """Assemble ``H_Z + H_R`` with all 19 collapse operators."""
    basis = tuple(build_basis(params))
    h = as_operator(build_h_z(params) + build_h_r(params))
    return LindbladModel(
        basis=basis,
        h=h,
        collapse=tuple(build_collapse_ops(params)),
        permutations=atom_permutations(basis),
        charge=excitation_charge(basis),
    )
