"""Steady states and time evolution of Lindblad models.

Whenever a model carries a permutation symmetry and a conserved charge, solves
run inside the invariant block that contains permutation-symmetric,
charge-diagonal operators (see :mod:`rydberg_w.symmetry`). For the default
three-atom model this shrinks the 62 500-dimensional operator space to 3 190
dimensions without any approximation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp

from .exceptions import NonUniqueSteadyStateError, PositivityError, ShapeError, StiffnessError
from .model import LindbladModel
from .operators import unvec, vec
from .symmetry import Sector, all_sectors, sector

__all__ = [
    "MAX_LIOUVILLIAN_DIM",
    "SteadyStateResult",
    "TrajectoryResult",
    "NullSpaceProbe",
    "check_density_matrix",
    "maximally_mixed",
    "trace_distance",
    "steady_state",
    "evolve",
    "null_space_probe",
]

log = logging.getLogger(__name__)

MAX_LIOUVILLIAN_DIM = 250**2
LONGTIME_TOL = 1e-10
_DENSE_SVD_MAX = 3500


@dataclass(frozen=True)
class SteadyStateResult:
    """Stationary state of a model.

    Attributes
    ----------
    rho_ss : ndarray
        Hermitian, unit-trace density matrix on the full model basis.
    residual : float
        ``||L vec(rho_ss)||_2``.
    method : str
        ``"nullspace"`` or ``"longtime"``.
    """

    rho_ss: np.ndarray
    residual: float
    method: str


@dataclass(frozen=True)
class TrajectoryResult:
    """Recorded snapshots of one time evolution.

    Attributes
    ----------
    times : ndarray
        Strictly increasing record times (units of ``1/g``).
    observables : dict of str -> ndarray
        One array per requested observable, aligned with ``times``.
    states : list of ndarray or None
        Full density matrices, only when requested.
    trace_drift : ndarray
        ``|Tr rho - 1|`` of each raw snapshot before renormalization.
    hermiticity_error : ndarray
        Largest entry of ``|rho - rho^+|`` of each raw snapshot.
    min_eigenvalue : ndarray
        Smallest eigenvalue of each corrected snapshot.
    """

    times: np.ndarray
    observables: dict
    states: list | None = None
    trace_drift: np.ndarray = field(default_factory=lambda: np.zeros(0))
    hermiticity_error: np.ndarray = field(default_factory=lambda: np.zeros(0))
    min_eigenvalue: np.ndarray = field(default_factory=lambda: np.zeros(0))


@dataclass(frozen=True)
class NullSpaceProbe:
    """Smallest singular values of the Liouvillian, gathered over all sectors.

    Attributes
    ----------
    singular_values : ndarray
        Ascending; the two smallest over the whole operator space come first.
    null_dim : int
        Number of singular values below ``rtol`` times the largest probed scale.
    """

    singular_values: np.ndarray
    null_dim: int

    @property
    def gap_ratio(self) -> float:
        """``sigma_2 / sigma_1``; large values mean a one-dimensional null space."""
        s = self.singular_values
        return np.inf if s[0] == 0 else float(s[1] / s[0])


def check_density_matrix(rho, dim: int | None = None, *, herm_tol=1e-10, trace_tol=1e-8,
                         eig_tol=1e-8) -> np.ndarray:
    """Validate and return ``rho`` as a dense complex array.

    Raises
    ------
    ShapeError
        Wrong shape.
    ValueError
        Not Hermitian or not unit trace.
    PositivityError
        Smallest eigenvalue below ``-eig_tol``.
    """
    rho = rho.toarray() if sp.issparse(rho) else np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or (dim is not None and rho.shape[0] != dim):
        raise ShapeError(f"density matrix has shape {rho.shape}, expected ({dim}, {dim})")
    if np.abs(rho - rho.conj().T).max() > herm_tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > trace_tol:
        raise ValueError(f"density matrix trace {np.trace(rho).real:.12g} != 1")
    lo = la.eigvalsh(rho)[0]
    if lo < -eig_tol:
        raise PositivityError(f"density matrix has eigenvalue {lo:.3g}")
    return rho


def _as_state(rho0, dim):
    rho0 = rho0.toarray() if sp.issparse(rho0) else np.asarray(rho0, dtype=complex)
    if rho0.ndim == 1:
        if rho0.size != dim:
            raise ShapeError(f"state vector has length {rho0.size}, expected {dim}")
        rho0 = np.outer(rho0, rho0.conj()) / np.vdot(rho0, rho0).real
    return check_density_matrix(rho0, dim)


def maximally_mixed(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex) / dim


def trace_distance(a, b) -> float:
    """``||a - b||_1 / 2`` for Hermitian ``a``, ``b``."""
    return 0.5 * float(np.abs(la.eigvalsh(np.asarray(a) - np.asarray(b))).sum())


def _finish(rho):
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def _symmetric_sector(model: LindbladModel, reduce: bool) -> Sector:
    if reduce and (model.permutations is not None or model.charge is not None):
        return sector(model.dim, model.permutations, model.charge, 0, "trivial")
    return sector(model.dim)


def _trace_row(sec: Sector, n: int) -> np.ndarray:
    diag = np.arange(n) * (n + 1)
    return np.asarray(sec.v[diag].sum(axis=0)).ravel().real


def _nullspace_solve(lr: sp.csr_matrix, tr: np.ndarray) -> np.ndarray:
    # Replace one population row: among rows touching the trace functional,
    # the one with the largest diagonal magnitude (lowest index on ties).
    candidates = np.flatnonzero(tr)
    diag = np.abs(lr.diagonal())
    row = candidates[np.argmax(diag[candidates])]
    a = lr.tolil()
    a[row, :] = tr
    rhs = np.zeros(lr.shape[0], dtype=complex)
    rhs[row] = 1.0
    try:
        lu = spla.splu(a.tocsc())
    except RuntimeError as exc:
        raise NonUniqueSteadyStateError(
            f"row-replaced Liouvillian is singular ({exc}); the steady state is not unique"
        ) from exc
    return lu.solve(rhs)


def _longtime_solve(lr, tr, x0, tol, max_steps=200):
    # Backward-Euler pseudo-transient continuation. Each step is an L-stable
    # implicit time step of length h, so trace is conserved exactly and the
    # iterate relaxes toward the stationary state; h grows geometrically
    # until the generator residual drops below tol.
    m = lr.shape[0]
    eye = sp.identity(m, dtype=complex, format="csc")
    lr = lr.tocsc()
    x, h = x0.astype(complex), 1.0
    res = np.linalg.norm(lr @ x)
    for _ in range(max_steps):
        if res < tol:
            return x, res
        x = spla.splu(eye - h * lr).solve(x)
        x /= tr @ x
        res = np.linalg.norm(lr @ x)
        h = min(h * 10.0, 1e14)
    raise StiffnessError(f"longtime relaxation stalled at residual {res:.3g}")


def steady_state(model: LindbladModel, method: str = "nullspace", *, rho0=None,
                 reduce: bool = True, tol: float = LONGTIME_TOL,
                 max_dim: int = MAX_LIOUVILLIAN_DIM) -> SteadyStateResult:
    """Stationary state of ``model``.

    Parameters
    ----------
    method : {"nullspace", "longtime"}
        ``nullspace`` solves ``L vec(rho) = 0`` with one population equation
        replaced by ``Tr rho = 1`` (sparse LU). ``longtime`` relaxes ``rho0``
        (default: maximally mixed) with growing implicit time steps until
        ``||L vec(rho)|| < tol``.
    reduce : bool
        Solve inside the symmetric sector when the model declares symmetries.
        The sector contains the stationary state whenever it is unique.
    max_dim : int
        Cap on the dimension of the linear system factorized by ``nullspace``
        (the symmetric sector when reducing, ``dim**2`` otherwise).

    Raises
    ------
    NonUniqueSteadyStateError
        If the constrained system is singular.
    """
    n = model.dim
    if method not in ("nullspace", "longtime"):
        raise ValueError(f"unknown steady-state method {method!r}")
    sec = _symmetric_sector(model, reduce)
    if method == "nullspace" and sec.size > max_dim:
        raise ValueError(f"Liouvillian dimension {sec.size} exceeds cap {max_dim}")
    gen = model.liouvillian().matrix
    lr = sec.reduce(gen)
    tr = _trace_row(sec, n)
    if method == "nullspace":
        try:
            x = _nullspace_solve(lr, tr)
        except NonUniqueSteadyStateError as exc:
            null_dim = None
            if lr.shape[0] <= _DENSE_SVD_MAX:
                s = la.svdvals(lr.toarray())
                null_dim = int(np.count_nonzero(s <= 1e-9 * max(s.max(), 1.0)))
            raise NonUniqueSteadyStateError(f"{exc} (null-space dimension {null_dim})",
                                            null_dim) from exc
    else:
        start = maximally_mixed(n) if rho0 is None else _as_state(rho0, n)
        x0 = sec.project(vec(start))
        if np.linalg.norm(sec.lift(x0) - vec(start)) > 1e-10:
            raise ValueError("initial state lies outside the symmetric sector; use reduce=False")
        x, _ = _longtime_solve(lr, tr, x0, tol)
    rho = _finish(unvec(sec.lift(x), n))
    residual = float(np.linalg.norm(gen @ vec(rho)))
    return SteadyStateResult(rho, residual, method)


def _sigma_min_sparse(a: sp.spmatrix) -> float:
    m = a.shape[0]
    try:
        lu = spla.splu(a.tocsc())
    except RuntimeError:
        return 0.0
    op = spla.LinearOperator((m, m), dtype=complex,
                             matvec=lambda x: lu.solve(lu.solve(x, trans="H")))
    lam = spla.eigsh(op, k=1, which="LM", return_eigenvectors=False, tol=1e-8)
    return float(1.0 / np.sqrt(abs(lam[0])))


def null_space_probe(model: LindbladModel, *, rtol: float = 1e-9) -> NullSpaceProbe:
    """Estimate the null-space dimension of the full Liouvillian.

    The operator space is split into symmetry sectors. Each sector's smallest
    singular value comes from inverse iteration on a sparse LU factorization;
    a nearly singular sector is redone with a dense SVD so that its second
    singular value is resolved too. Sectors with charge difference ``-q``
    are skipped: Hermitian conjugation commutes with the generator and maps
    them onto ``+q`` with identical singular values.
    """
    gen = model.liouvillian().matrix
    threshold = rtol * spla.norm(gen, 1)
    values = []
    for sec in all_sectors(model.dim, model.permutations, model.charge):
        if sec.charge_diff < 0:
            continue
        a = sec.reduce(gen)
        small = sec.size <= _DENSE_SVD_MAX
        sigma = la.svdvals(a.toarray())[-2:] if sec.size <= 300 else [_sigma_min_sparse(a)]
        if min(sigma) < threshold and small and sec.size > 300:
            sigma = la.svdvals(a.toarray())[-2:]
        weight = 1 if sec.charge_diff == 0 else 2
        values.extend(list(sigma) * weight)
    s = np.sort(np.asarray(values))
    return NullSpaceProbe(s, int(np.count_nonzero(s < threshold)))


def evolve(model: LindbladModel, rho0, t_end: float, n_record: int = 101, tol: float = 1e-8,
           observables: Mapping[str, Callable[[np.ndarray], float]] | None = None,
           store_states: bool = False, reduce: bool = True,
           method: str = "DOP853") -> TrajectoryResult:
    """Integrate the master equation with an adaptive embedded Runge-Kutta scheme.

    Parameters
    ----------
    rho0 : ndarray
        Initial density matrix or state vector on the model basis.
    t_end : float
        Horizon in units of ``1/g``.
    n_record : int
        Number of equally spaced snapshots, including ``t = 0``.
    tol : float
        Relative per-step error tolerance in ``[1e-12, 1e-4]``; the absolute
        tolerance is ``tol / 100``.
    observables : mapping of name -> callable, optional
        Evaluated on each corrected snapshot. Defaults to purity only.
    store_states : bool
        Keep every snapshot density matrix.

    Raises
    ------
    StiffnessError
        If the integrator's step size underflows.
    """
    from .observables import purity

    if not 1e-12 <= tol <= 1e-4:
        raise ValueError(f"tol must lie in [1e-12, 1e-4], got {tol}")
    if n_record < 2 or t_end <= 0:
        raise ValueError("need t_end > 0 and n_record >= 2")
    n = model.dim
    rho0 = _as_state(rho0, n)
    if observables is None:
        observables = {"purity": purity}
    gen = model.liouvillian().matrix
    sec = _symmetric_sector(model, reduce)
    x0 = sec.project(vec(rho0))
    if np.linalg.norm(sec.lift(x0) - vec(rho0)) > 1e-12:
        sec = sector(n)
        x0 = vec(rho0)
    lr = sec.reduce(gen)
    times = np.linspace(0.0, t_end, n_record)

    sol = solve_ivp(lambda t, y: lr @ y, (0.0, t_end), x0.astype(complex), method=method,
                    t_eval=times, rtol=tol, atol=tol * 1e-2)
    if sol.status != 0:
        raise StiffnessError(
            f"explicit integration failed at t={sol.t[-1] if sol.t.size else 0:.4g}: "
            f"{sol.message}; use steady_state(method='longtime') or 'nullspace' instead"
        )

    obs = {name: np.empty(n_record) for name in observables}
    drift = np.empty(n_record)
    herm = np.empty(n_record)
    min_eig = np.empty(n_record)
    states = [] if store_states else None
    for k in range(n_record):
        raw = unvec(sec.lift(sol.y[:, k]), n)
        drift[k] = abs(np.trace(raw) - 1)
        herm[k] = np.abs(raw - raw.conj().T).max()
        level = logging.WARNING if max(drift[k], herm[k]) > 100 * tol else logging.DEBUG
        log.log(level, "t=%.6g: trace drift %.3g, anti-Hermitian part %.3g",
                times[k], drift[k], herm[k])
        rho = _finish(raw)
        min_eig[k] = la.eigvalsh(rho)[0]
        for name, f in observables.items():
            obs[name][k] = f(rho)
        if store_states:
            states.append(rho)
    return TrajectoryResult(times, obs, states, drift, herm, min_eig)
