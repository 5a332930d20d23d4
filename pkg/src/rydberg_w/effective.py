"""Effective models: Zeno projection and second-order Rydberg antiblockade.

Two reductions of the full model are built here, each along two independent
routes so that one checks the other.

* Zeno pumping. For ``g >> omega`` the cavity coupling ``H2`` confines the
  dynamics to its zero-energy eigenspace, spanned by the eight ground triples
  and five dark states ``D1..D5`` with the cavity in vacuum. The effective
  Hamiltonian ``omega * P0 H1 P0`` is computed numerically from an exact
  eigendecomposition and compared with closed forms.
* Rydberg pumping. For ``delta >> omega_r`` and ``u_rr = 2*delta`` the
  antiblockade couplings and Stark shifts follow from perturbation theory;
  :func:`antiblockade_oracle` extracts the same couplings from exact
  dynamics of the atomic Hamiltonian.

The effective basis holds 18 named states plus the 30 product states through
which the Rydberg manifolds cascade to the ground triples (see
:func:`effective_basis`).
"""

from __future__ import annotations

import csv
import itertools
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import curve_fit

from .exceptions import (
    DecompositionError,
    DerivationError,
    OracleInconclusiveError,
    UnsupportedRegimeError,
)
from .model import (
    CHANNELS,
    P,
    R,
    LindbladModel,
    SystemParams,
    atomic_embed,
    atomic_h_r,
    atomic_index,
    build_basis,
    build_collapse_ops,
    build_h_z_parts,
)
from .operators import ATOM_DIM, as_operator, dyad

__all__ = [
    "NAMED_STATES",
    "ZenoDecomposition",
    "dark_state_vectors",
    "effective_basis",
    "effective_state_matrix",
    "zeno_decompose",
    "zeno_effective_hamiltonian",
    "zeno_effective_lindblads",
    "zeno_projection_rates",
    "rydberg_effective_hamiltonian",
    "antiblockade_oracle",
    "build_effective_model",
    "write_matrix_csv",
]

GROUND = ("000", "001", "010", "100", "011", "101", "110", "111")
DARK = ("D1", "D2", "D3", "D4", "D5")
RYDBERG = ("rrr", "T1p", "pp0", "p0p", "0pp")
NAMED_STATES = GROUND + DARK + RYDBERG

_S2, _S3, _S6 = np.sqrt(2.0), np.sqrt(3.0), np.sqrt(6.0)

# Dark states of the cavity coupling, as (coefficient, atomic triple) sums.
_DARK_DEF = {
    "D1": ((1 / _S2, "00e"), (-1 / _S2, "e00")),
    "D2": ((2 / _S6, "0e0"), (-1 / _S6, "e00"), (-1 / _S6, "00e")),
    "D3": ((1 / _S2, "10e"), (-1 / _S2, "1e0")),
    "D4": ((1 / _S2, "01e"), (-1 / _S2, "e10")),
    "D5": ((1 / _S2, "e01"), (-1 / _S2, "0e1")),
}
_T1P_DEF = ((1 / _S3, "1pp"), (1 / _S3, "p1p"), (1 / _S3, "pp1"))


def _cascade_states() -> tuple[str, ...]:
    """Rydberg-bearing product states reached when rrr, T1p or pp0-type states decay."""
    out = []
    for pos in range(3):
        for x in "01":
            out.append("".join(x if k == pos else "r" for k in range(3)))
    for pos in range(3):
        for x, y in itertools.product("01", repeat=2):
            rest = iter((x, y))
            out.append("".join("r" if k == pos else next(rest) for k in range(3)))
    for pos in range(3):
        for x, y in itertools.product("01", repeat=2):
            rest = iter((x, y))
            out.append("".join("p" if k == pos else next(rest) for k in range(3)))
    return tuple(out)


def effective_basis() -> tuple[str, ...]:
    """The 18 named states followed by 30 cascade intermediates (48 labels).

    The intermediates are the states with two ``r`` and one ground atom, one
    ``r`` and two ground atoms, or one ``p`` and two ground atoms. Together
    with the named states they form the smallest space that contains the
    named states and is closed under the Rydberg decay operators.
    """
    return NAMED_STATES + _cascade_states()


def _atomic_vector(label: str) -> np.ndarray:
    v = np.zeros(ATOM_DIM**3)
    if label in _DARK_DEF or label == "T1p":
        for c, atoms in _DARK_DEF.get(label, _T1P_DEF):
            v[atomic_index(atoms)] += c
    else:
        v[atomic_index(label)] = 1.0
    return v


def effective_state_matrix(labels=None) -> np.ndarray:
    """Columns are the atomic (125-dimensional) vectors of the effective basis states."""
    labels = effective_basis() if labels is None else labels
    return np.stack([_atomic_vector(lab) for lab in labels], axis=1)


def dark_state_vectors(params: SystemParams) -> dict[str, np.ndarray]:
    """``D1..D5`` with the cavity in vacuum, as vectors on the full basis."""
    n_c = params.n_c
    out = {}
    for name, terms in _DARK_DEF.items():
        v = np.zeros(params.dim, dtype=complex)
        for c, atoms in terms:
            v[atomic_index(atoms) * n_c] += c
        out[name] = v
    return out


# ---------------------------------------------------------------- Zeno pumping


@dataclass(frozen=True)
class ZenoDecomposition:
    """Spectral decomposition of ``H2`` on the vacuum-reachable sector.

    Attributes
    ----------
    labels : tuple of BasisLabel
        Full-basis states spanning the sector: the ground triples in vacuum
        and every state with at most one excitation (``|e>`` or photon) that
        ``H_Z`` connects them to.
    indices : ndarray
        Positions of ``labels`` in the full basis.
    eigenvalues : ndarray
        Distinct eigenvalues ``E_n`` in units of ``g``, ascending.
    projectors : list of ndarray
        Spectral projectors ``P_n`` in sector coordinates.
    zero_subspace : ndarray
        Orthonormal columns spanning the ``E = 0`` eigenspace.
    """

    labels: tuple
    indices: np.ndarray
    eigenvalues: np.ndarray
    projectors: list
    zero_subspace: np.ndarray

    def to_sector(self, full_vector) -> np.ndarray:
        """Restrict a full-basis vector to sector coordinates."""
        return np.asarray(full_vector)[self.indices]

    @property
    def p0(self) -> np.ndarray:
        return self.zero_subspace @ self.zero_subspace.conj().T


def _reachable(h: sp.csr_matrix, seeds) -> np.ndarray:
    seen, frontier = set(seeds), list(seeds)
    while frontier:
        row = frontier.pop()
        for col in h.indices[h.indptr[row]:h.indptr[row + 1]]:
            if col not in seen:
                seen.add(col)
                frontier.append(col)
    return np.array(sorted(seen))


def zeno_decompose(params: SystemParams, tol: float = 1e-9) -> ZenoDecomposition:
    """Exact eigendecomposition of ``H2 = sum_i |e><0|_i a + h.c.``.

    Raises
    ------
    DecompositionError
        If two eigenvalue clusters are separated by less than ``1000 * tol``
        (the clusters cannot be told apart reliably), or no zero eigenvalue
        exists.
    """
    h1, h2 = build_h_z_parts(params)
    h2 = (params.g * h2).tocsr()
    basis = build_basis(params)
    # Sector: no Rydberg levels, at most one excitation (#e + photons), and
    # connected to the ground triples in vacuum by H1 + H2.
    allowed = np.array([
        set(b.atoms) <= {"0", "1", "e"} and b.atoms.count("e") + b.photon <= 1 for b in basis
    ])
    mask = sp.diags(allowed.astype(float))
    seeds = [i for i, b in enumerate(basis) if b.photon == 0 and set(b.atoms) <= {"0", "1"}]
    idx = _reachable((mask @ (h1 + h2) @ mask).tocsr(), seeds)
    block = h2[idx][:, idx].toarray()
    w, v = np.linalg.eigh(block)
    breaks = np.flatnonzero(np.diff(w) > tol)
    gaps = np.diff(w)[breaks]
    if gaps.size and gaps.min() < 1e3 * tol:
        raise DecompositionError(f"eigenvalue clusters separated by only {gaps.min():.3g}")
    groups = np.split(np.arange(w.size), breaks + 1)
    eigenvalues = np.array([w[g].mean() for g in groups])
    projectors = [v[:, g] @ v[:, g].conj().T for g in groups]
    zero = [k for k, e in enumerate(eigenvalues) if abs(e) <= tol * max(params.g, 1.0)]
    if not zero:
        raise DecompositionError("no zero eigenvalue in the vacuum-reachable sector")
    return ZenoDecomposition(
        labels=tuple(basis[i] for i in idx),
        indices=idx,
        eigenvalues=eigenvalues,
        projectors=projectors,
        zero_subspace=v[:, groups[zero[0]]],
    )


def _named_index():
    return {name: k for k, name in enumerate(NAMED_STATES)}


def _zeno_closed_form(omega: float) -> np.ndarray:
    ix = _named_index()
    h = np.zeros((18, 18))

    def add(a, b, x):
        h[ix[a], ix[b]] += x
        h[ix[b], ix[a]] += x

    add("001", "D1", omega / _S2)
    add("001", "D2", -omega / _S6)
    add("100", "D1", -omega / _S2)
    add("100", "D2", -omega / _S6)
    add("010", "D2", 2 * omega / _S6)
    add("101", "D3", omega / _S2)
    add("101", "D5", omega / _S2)
    add("011", "D4", omega / _S2)
    add("011", "D5", -omega / _S2)
    add("110", "D3", -omega / _S2)
    add("110", "D4", -omega / _S2)
    return h


def _zeno_numerical(params: SystemParams, dec: ZenoDecomposition) -> np.ndarray:
    h1, _ = build_h_z_parts(params)
    h1 = h1[dec.indices][:, dec.indices].toarray()
    heff = params.omega * dec.p0 @ h1 @ dec.p0
    # Coordinates of the 13 named zero-energy states inside the sector.
    n_c = params.n_c
    darks = dark_state_vectors(params)
    cols = []
    for name in NAMED_STATES[:13]:
        if name in darks:
            cols.append(dec.to_sector(darks[name]))
        else:
            full = np.zeros(params.dim)
            full[atomic_index(name) * n_c] = 1.0
            cols.append(dec.to_sector(full))
    c = np.stack(cols, axis=1)
    if np.abs(c @ c.conj().T - dec.p0).max() > 1e-10:
        raise DerivationError("named ground and dark states do not span the zero eigenspace")
    out = np.zeros((18, 18), dtype=complex)
    out[:13, :13] = c.conj().T @ heff @ c
    return out


def zeno_effective_hamiltonian(params: SystemParams, atol: float = 1e-10) -> sp.csr_matrix:
    """``omega * P0 H1 P0`` on the 18 named states (Rydberg rows are zero).

    The closed form is returned after it has been checked element-wise
    against the numerical projection.

    Raises
    ------
    DerivationError
        If the two constructions differ by more than ``atol``.
    """
    closed = _zeno_closed_form(params.omega)
    numeric = _zeno_numerical(params, zeno_decompose(params))
    err = np.abs(numeric - closed).max()
    if err > atol:
        raise DerivationError(f"projected and closed-form Zeno Hamiltonians differ by {err:.3g}")
    return as_operator(closed)


# (rate / gamma_e, ground target, dark source) in the published order.
_ZENO_JUMPS = (
    (1 / 12, "100", "D1"),
    (1 / 12, "001", "D1"),
    (1 / 3, "010", "D1"),
    (1 / 2, "000", "D1"),
    (1 / 2, "000", "D2"),
    (1 / 4, "100", "D2"),
    (1 / 4, "001", "D2"),
    (1 / 4, "110", "D3"),
    (1 / 4, "101", "D3"),
    (1 / 2, "100", "D3"),
    (1 / 2, "010", "D4"),
    (1 / 4, "110", "D4"),
    (1 / 4, "011", "D4"),
    (1 / 4, "101", "D5"),
    (1 / 4, "011", "D5"),
    (1 / 2, "001", "D5"),
)


def zeno_effective_lindblads(params: SystemParams) -> list[sp.csr_matrix]:
    """The 16 effective Zeno-pumping jump operators on the 18 named states."""
    ix = _named_index()
    return [
        as_operator(np.sqrt(params.gamma_e * rate) * dyad(ix[g], ix[d], 18))
        for rate, g, d in _ZENO_JUMPS
    ]


def zeno_projection_rates(params: SystemParams) -> dict[tuple[str, str], float]:
    """Decay rates ``sum_k |<g,0|L_k|D,0>|^2`` from the full collapse operators.

    Keys are ``(ground, dark)`` pairs with nonzero rate. This is the
    independent oracle for the effective Zeno jump operators.
    """
    ops = build_collapse_ops(params)
    n_c = params.n_c
    darks = dark_state_vectors(params)
    rates = {}
    for d, vec in darks.items():
        images = [op @ vec for op in ops]
        for g in GROUND:
            k = atomic_index(g) * n_c
            r = sum(abs(img[k]) ** 2 for img in images)
            if r > 1e-14:
                rates[(g, d)] = float(r)
    return rates


# ---------------------------------------------------------------- Rydberg pumping


def _check_resonance(params: SystemParams):
    if abs(params.urr - 2 * params.delta) > 1e-12 * max(1.0, params.delta):
        raise UnsupportedRegimeError(
            f"closed form assumes u_rr = 2*delta; got u_rr={params.urr}, delta={params.delta}"
        )


def rydberg_effective_hamiltonian(params: SystemParams) -> sp.csr_matrix:
    """Stark shifts and antiblockade couplings on the 18 named states.

    Raises
    ------
    UnsupportedRegimeError
        Unless ``u_rr == 2 * delta``.
    """
    _check_resonance(params)
    if params.omega_r and params.delta / params.omega_r < 10:
        warnings.warn("delta/omega_r < 10: second-order expressions are unreliable", stacklevel=2)
    if params.delta == 0:
        raise UnsupportedRegimeError("delta must be positive")
    ix = _named_index()
    x = params.omega_r**2 / params.delta
    h = np.zeros((18, 18))
    for names, shift in (
        (("111", "T1p"), 3 * x),
        (("000", "rrr"), 1.5 * x),
        (("110", "101", "011", "pp0", "p0p", "0pp"), 2.5 * x),
        (("100", "010", "001"), 2 * x),
    ):
        for n in names:
            h[ix[n], ix[n]] += shift
    for a, b, c in (
        ("110", "pp0", 2 * x),
        ("101", "p0p", 2 * x),
        ("011", "0pp", 2 * x),
        ("111", "T1p", 2 * _S3 * x),
        ("000", "rrr", 1.5 * params.omega_r**3 / params.delta**2),
    ):
        h[ix[a], ix[b]] += c
        h[ix[b], ix[a]] += c
    return as_operator(h)


_ORACLE_PREDICTIONS = {
    ("111", "T1p"): lambda r, d: 2 * _S3 * r**2 / d,
    ("110", "pp0"): lambda r, d: 2 * r**2 / d,
    ("101", "p0p"): lambda r, d: 2 * r**2 / d,
    ("011", "0pp"): lambda r, d: 2 * r**2 / d,
    ("000", "rrr"): lambda r, d: 1.5 * r**3 / d**2,
    ("100", "prr"): lambda r, d: 2.5 * r**3 / d**2,
    ("010", "rpr"): lambda r, d: 2.5 * r**3 / d**2,
    ("001", "rrp"): lambda r, d: 2.5 * r**3 / d**2,
}
DEFAULT_ORACLE_PAIRS = (("111", "T1p"), ("110", "pp0"), ("101", "p0p"), ("011", "0pp"), ("000", "rrr"))


def _fit_coupling(energies, vecs, psi0, target, j_guess, periods=4, samples=4001):
    ci = vecs.conj().T @ psi0
    ct = vecs.conj().T @ target
    # Weights of both states inside the slow manifold that carries the
    # oscillation: eigenvectors within a few couplings of the dominant one.
    dominant = np.argmax(np.abs(ci) ** 2)
    window = np.abs(energies - energies[dominant]) <= 10 * j_guess
    zi = float((np.abs(ci[window]) ** 2).sum())
    zt = float((np.abs(ct[window]) ** 2).sum())

    t = np.linspace(0.0, periods * np.pi / j_guess, samples)
    amp = ct.conj() * ci
    signal = np.abs(np.exp(-1j * np.outer(t, energies)) @ amp) ** 2
    freqs = 2 * np.pi * np.fft.rfftfreq(t.size, t[1] - t[0])
    spectrum = np.abs(np.fft.rfft(signal - signal.mean()))
    w0 = freqs[1 + np.argmax(spectrum[1:])]

    def model(t, a, w, c):
        return a * np.sin(w * t / 2) ** 2 + c

    try:
        (a, w, c), _ = curve_fit(model, t, signal, p0=[np.ptp(signal), w0, signal.min()])
    except RuntimeError as exc:
        raise OracleInconclusiveError(f"oscillation fit failed: {exc}") from exc
    resid = signal - model(t, a, w, c)
    r2 = 1 - resid.var() / max(signal.var(), 1e-300)
    if r2 < 0.9 or a <= 0:
        raise OracleInconclusiveError(f"no clean oscillation (R^2 = {r2:.3f}, amplitude {a:.3g})")
    return abs(w) / 2 * np.sqrt(min(1.0, a / (zi * zt)))


def antiblockade_oracle(params: SystemParams, pairs=None) -> dict[tuple[str, str], float]:
    """Effective couplings extracted from exact dynamics of the atomic Hamiltonian.

    For each pair the target population is propagated exactly (by
    diagonalizing the 125-dimensional Rydberg Hamiltonian) over four periods
    of the expected oscillation, the dominant frequency is fitted, and the
    fitted amplitude corrects for residual detuning and for dressing of the
    bare states. The coupling is ``|J|`` in ``J (|a><b| + h.c.)``; the phase is
    not observable from populations.

    Parameters
    ----------
    pairs : sequence of (str, str), optional
        Defaults to the five antiblockade channels, plus the three
        ``|100> <-> |prr>``-type channels when ``u_rp`` sits at ``1.5 * delta``.

    Raises
    ------
    UnsupportedRegimeError
        If ``delta / omega_r < 10``.
    OracleInconclusiveError
        If an oscillation cannot be fitted.
    """
    if params.omega_r <= 0 or params.delta / params.omega_r < 10:
        raise UnsupportedRegimeError("oracle needs delta/omega_r >= 10")
    if pairs is None:
        pairs = list(DEFAULT_ORACLE_PAIRS)
        if abs(params.u_rp - 1.5 * params.delta) < 1e-9 * params.delta:
            pairs += [("100", "prr"), ("010", "rpr"), ("001", "rrp")]
    energies, vecs = np.linalg.eigh(atomic_h_r(params).toarray())
    out = {}
    for a, b in pairs:
        guess = _ORACLE_PREDICTIONS.get((a, b))
        if guess is None:
            raise KeyError(f"no expected scale for pair {(a, b)}")
        out[(a, b)] = _fit_coupling(energies, vecs, _atomic_vector(a), _atomic_vector(b),
                                    guess(params.omega_r, params.delta))
    return out


# ---------------------------------------------------------------- assembled model


def _rydberg_decay_restrictions(params: SystemParams, b: np.ndarray) -> list[sp.csr_matrix]:
    ops = []
    for i in (1, 2, 3):
        for lower, upper, rate in CHANNELS:
            if upper not in (R, P):
                continue
            amp = np.sqrt(getattr(params, rate) / 2.0)
            full = atomic_embed(amp * dyad(lower, upper, ATOM_DIM), i)
            ops.append(as_operator(b.T @ (full @ b)))
    return ops


def build_effective_model(params: SystemParams) -> LindbladModel:
    """Effective Lindblad model on :func:`effective_basis` (48 states).

    ``h = H_eff^Z + H_eff^R`` acts on the 18 named states. The collapse set is
    the 16 effective Zeno operators followed by the restrictions of the
    Rydberg decays ``r, p -> 0, 1`` (atom-major, four per atom). The cavity
    is in vacuum throughout and its loss is suppressed, so it is omitted.
    """
    labels = effective_basis()
    n = len(labels)
    b = effective_state_matrix(labels)
    if np.abs(b.T @ b - np.eye(n)).max() > 1e-12:
        raise DerivationError("effective basis is not orthonormal")

    def pad(op):
        op = sp.coo_matrix(op)
        return sp.csr_matrix((op.data, (op.row, op.col)), shape=(n, n))

    h = pad(zeno_effective_hamiltonian(params) + rydberg_effective_hamiltonian(params))
    collapse = [pad(op) for op in zeno_effective_lindblads(params)]
    collapse += _rydberg_decay_restrictions(params, b)
    return LindbladModel(basis=labels, h=as_operator(h), collapse=tuple(as_operator(c) for c in collapse))


def write_matrix_csv(op, path, labels=None) -> None:
    """Dump the nonzero entries of ``op`` as ``row,col,re,im`` (labels if given)."""
    coo = sp.coo_matrix(op)
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["row", "col", "re", "im"])
        for k in order:
            r, c = int(coo.row[k]), int(coo.col[k])
            w.writerow([labels[r] if labels else r, labels[c] if labels else c,
                        repr(float(coo.data[k].real)), repr(float(coo.data[k].imag))])

