"""Sparse operator algebra: tensor products, site embedding, Liouvillians.

Operators are plain ``scipy.sparse.csr_matrix`` objects with complex dtype.
Density matrices are vectorized column-major (Fortran order), so that

    vec(A @ X @ B) == kron(B.T, A) @ vec(X).

The tensor-factor order of the full system is atom1 x atom2 x atom3 x cavity.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.sparse as sp

from .exceptions import ShapeError, SizingError

__all__ = [
    "DROP_TOL",
    "MAX_DIM",
    "ATOM_DIM",
    "Superoperator",
    "as_operator",
    "dyad",
    "identity",
    "kron",
    "embed",
    "dagger",
    "is_hermitian",
    "vec",
    "unvec",
    "liouvillian",
]

DROP_TOL = 1e-15
MAX_DIM = 1_000_000
ATOM_DIM = 5


def as_operator(a) -> sp.csr_matrix:
    """Return ``a`` as a complex CSR matrix with near-zero entries removed."""
    m = sp.csr_matrix(a, dtype=complex, copy=True)
    if m.nnz:
        m.data[np.abs(m.data) < DROP_TOL] = 0
        m.eliminate_zeros()
    return m


def dyad(row: int, col: int, dim: int) -> sp.csr_matrix:
    """The matrix unit ``|row><col|`` on a ``dim``-dimensional space."""
    return sp.csr_matrix(([1.0 + 0j], ([row], [col])), shape=(dim, dim))


def identity(dim: int) -> sp.csr_matrix:
    return sp.identity(dim, dtype=complex, format="csr")


def _check_square(op, name="operator"):
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {op.shape}")


def kron(a, b, max_dim: int = MAX_DIM) -> sp.csr_matrix:
    """Tensor product with the row index ``r_a * b.dim + r_b``.

    Raises
    ------
    SizingError
        If the product dimension exceeds ``max_dim``.
    """
    dim = a.shape[0] * b.shape[0]
    if dim > max_dim:
        raise SizingError(f"tensor product dimension {dim} exceeds maximum {max_dim}")
    return as_operator(sp.kron(a, b, format="csr"))


def local_dims(n_c: int) -> tuple[int, int, int, int]:
    return (ATOM_DIM, ATOM_DIM, ATOM_DIM, n_c)


def embed(op, site: int, n_c) -> sp.csr_matrix:
    """Place ``op`` on one site of atom1 x atom2 x atom3 x cavity.

    Parameters
    ----------
    op : sparse or dense square matrix
        Local operator; 5x5 for an atom, ``n_c`` x ``n_c`` for the cavity.
    site : int
        1, 2, 3 for the atoms, 4 for the cavity.
    n_c : int or SystemParams
        Number of retained photon levels, or parameters carrying ``n_c``.
    """
    n_c = int(getattr(n_c, "n_c", n_c))
    dims = local_dims(n_c)
    if site not in (1, 2, 3, 4):
        raise ShapeError(f"site must be in 1..4, got {site}")
    _check_square(op)
    if op.shape[0] != dims[site - 1]:
        raise ShapeError(
            f"site {site} has local dimension {dims[site - 1]}, operator has {op.shape[0]}"
        )
    factors = [identity(d) for d in dims]
    factors[site - 1] = as_operator(op)
    return reduce(kron, factors)


def dagger(op) -> sp.csr_matrix:
    """Conjugate transpose."""
    return sp.csr_matrix(op.conj().T)


def is_hermitian(op, atol: float = 1e-12) -> bool:
    diff = op - op.conj().T
    if sp.issparse(diff):
        return diff.nnz == 0 or np.abs(diff.data).max() <= atol
    return np.abs(diff).max() <= atol


def vec(rho) -> np.ndarray:
    """Column-major vectorization of a square matrix."""
    rho = rho.toarray() if sp.issparse(rho) else np.asarray(rho)
    return rho.ravel(order="F")


def unvec(v, dim: int | None = None) -> np.ndarray:
    v = np.asarray(v)
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    if dim * dim != v.size:
        raise ShapeError(f"vector of length {v.size} is not a vectorized {dim}x{dim} matrix")
    return v.reshape((dim, dim), order="F")


@dataclass(frozen=True)
class Superoperator:
    """A linear map on vectorized (column-major) density matrices.

    Attributes
    ----------
    matrix : scipy.sparse.csr_matrix
        ``dim**2`` x ``dim**2`` generator.
    dim : int
        Dimension of the underlying Hilbert space.
    """

    matrix: sp.csr_matrix
    dim: int

    def apply(self, rho) -> np.ndarray:
        """Return ``unvec(L @ vec(rho))``."""
        return unvec(self.matrix @ vec(rho), self.dim)

    def __matmul__(self, v):
        return self.matrix @ v


def liouvillian(h, collapse=()) -> Superoperator:
    """Generator of ``-i[H, rho] + sum_k (L rho L^+ - {L^+ L, rho} / 2)``."""
    _check_square(h, "Hamiltonian")
    n = h.shape[0]
    for c in collapse:
        _check_square(c, "collapse operator")
        if c.shape[0] != n:
            raise ShapeError(f"collapse operator dimension {c.shape[0]} != {n}")
    h = as_operator(h)
    eye = identity(n)
    gen = -1j * (sp.kron(eye, h) - sp.kron(h.T, eye))
    for c in collapse:
        c = as_operator(c)
        if c.nnz == 0:
            continue
        cdc = (c.conj().T @ c).tocsr()
        gen = gen + sp.kron(c.conj(), c) - 0.5 * sp.kron(eye, cdc) - 0.5 * sp.kron(cdc.T, eye)
    return Superoperator(as_operator(gen), n)
