"""Symmetry-adapted sectors of operator space.

A model whose Hamiltonian and collapse set are invariant under a group of basis
permutations, and which carries a conserved charge shifted by fixed amounts by
each jump, has a Liouvillian that is block diagonal in

* the charge difference ``q = Q_left - Q_right`` of an operator unit
  ``|i><j|``, and
* the isotypic components of the induced permutation action
  ``|i><j| -> |pi(i)><pi(j)|``.

Each block is exposed as an isometry ``V`` (columns orthonormal in the
column-major vectorized space) with ``L @ V == V @ (V^H L V)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

__all__ = ["Sector", "sector", "all_sectors", "s3_characters"]

# S3 characters indexed by element order (1: identity, 2: transposition, 3: 3-cycle).
_S3_TABLE = {
    "trivial": {1: 1, 2: 1, 3: 1},
    "sign": {1: 1, 2: -1, 3: 1},
    "standard": {1: 2, 2: 0, 3: -1},
}
IRREP_DIMS = {"trivial": 1, "sign": 1, "standard": 2}


@dataclass(frozen=True)
class Sector:
    """One invariant block of operator space.

    Attributes
    ----------
    v : scipy.sparse.csr_matrix
        ``n**2`` x ``m`` isometry.
    charge_diff : int
    irrep : str
    """

    v: sp.csr_matrix
    charge_diff: int
    irrep: str

    @property
    def size(self) -> int:
        return self.v.shape[1]

    def reduce(self, generator) -> sp.csr_matrix:
        """Restriction ``V^H L V`` of a superoperator matrix."""
        vh = self.v.conj().T.tocsr()
        return (vh @ generator @ self.v).tocsr()

    def lift(self, x) -> np.ndarray:
        return self.v @ x

    def project(self, vec) -> np.ndarray:
        return self.v.conj().T @ vec


def _element_order(perm: np.ndarray) -> int:
    ident = np.arange(perm.size)
    p, k = perm.copy(), 1
    while not np.array_equal(p, ident):
        p = perm[p]
        k += 1
        if k > 6:
            raise ValueError("permutation order exceeds that of an S3 element")
    return k


def s3_characters(permutations, irrep: str) -> np.ndarray:
    """Character of each element of an S3 action given as index maps."""
    table = _S3_TABLE[irrep]
    return np.array([table[_element_order(np.asarray(p))] for p in permutations], dtype=float)


def _pairs(n, charge, charge_diff):
    if charge is None:
        j, i = np.divmod(np.arange(n * n), n)
        return i, j
    charge = np.asarray(charge)
    i, j = np.nonzero(charge[:, None] - charge[None, :] == charge_diff)
    return i, j


def sector(n: int, permutations=None, charge=None, charge_diff: int = 0,
           irrep: str = "trivial") -> Sector:
    """Build the isometry onto one (charge difference, irrep) block.

    Parameters
    ----------
    n : int
        Hilbert-space dimension.
    permutations : sequence of ndarray, optional
        Index maps of an S3 action on the basis; ``None`` means no
        permutation symmetry (only ``irrep="trivial"`` is then allowed).
    charge : ndarray, optional
        Conserved charge per basis state; ``None`` disables charge blocking.
    """
    i, j = _pairs(n, charge, charge_diff)
    if permutations is None:
        if irrep != "trivial":
            raise ValueError("irrep sectors need a permutation group")
        rows = i + n * j
        v = sp.csr_matrix((np.ones(rows.size), (rows, np.arange(rows.size))),
                          shape=(n * n, rows.size))
        return Sector(v, charge_diff, irrep)

    perms = [np.asarray(p) for p in permutations]
    images = np.stack([p[i] + n * p[j] for p in perms])  # (|G|, npairs)
    keys = images.min(axis=0)
    _, orbit = np.unique(keys, return_inverse=True)
    rows = i + n * j

    if irrep == "trivial":
        counts = np.bincount(orbit)
        v = sp.csr_matrix((1.0 / np.sqrt(counts[orbit]), (rows, orbit)),
                          shape=(n * n, counts.size))
        return Sector(v, charge_diff, irrep)

    chars = s3_characters(perms, irrep)
    d, order = IRREP_DIMS[irrep], len(perms)
    order_by_orbit = np.argsort(orbit, kind="stable")
    bounds = np.flatnonzero(np.diff(orbit[order_by_orbit])) + 1
    data, out_rows, out_cols, col = [], [], [], 0
    for members in np.split(order_by_orbit, bounds):
        local = {int(rows[m]): a for a, m in enumerate(members)}
        size = len(members)
        proj = np.zeros((size, size))
        for a, m in enumerate(members):
            for g in range(order):
                proj[local[int(images[g, m])], a] += d / order * chars[g]
        w, vecs = np.linalg.eigh(proj)
        keep = vecs[:, w > 0.5]
        for c in range(keep.shape[1]):
            nz = np.abs(keep[:, c]) > 1e-14
            data.extend(keep[nz, c])
            out_rows.extend(rows[members[nz]])
            out_cols.extend([col] * int(nz.sum()))
            col += 1
    v = sp.csr_matrix((data, (out_rows, out_cols)), shape=(n * n, col))
    return Sector(v, charge_diff, irrep)


def all_sectors(n: int, permutations=None, charge=None):
    """Yield every non-empty block; together they span the whole operator space."""
    if charge is None:
        diffs = [0]
    else:
        charge = np.asarray(charge)
        span = int(charge.max() - charge.min())
        diffs = range(-span, span + 1)
    irreps = ("trivial",) if permutations is None else ("trivial", "sign", "standard")
    for q in diffs:
        for irrep in irreps:
            s = sector(n, permutations, charge, q, irrep)
            if s.size:
                yield s
