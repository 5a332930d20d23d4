import numpy as np
import pytest
import scipy.sparse as sp

from rydberg_w.model import SystemParams, build_full_model
from rydberg_w.symmetry import all_sectors, s3_characters, sector


@pytest.fixture(scope="module")
def small():
    m = build_full_model(SystemParams(delta=20.0, u_rp=3.0, kappa=0.05))
    return m, m.liouvillian().matrix


def test_sectors_partition_operator_space(small):
    m, _ = small
    total = 0
    stacked = []
    for s in all_sectors(m.dim, m.permutations, m.charge):
        total += s.size
        stacked.append(s.v)
    assert total == m.dim**2
    v = sp.hstack(stacked).tocsr()
    gram = (v.conj().T @ v - sp.identity(total)).tocoo()
    assert gram.nnz == 0 or np.abs(gram.data).max() < 1e-12


@pytest.mark.parametrize("q,irrep", [(0, "trivial"), (1, "sign"), (-2, "standard"), (0, "standard")])
def test_sector_invariant(small, q, irrep):
    m, gen = small
    s = sector(m.dim, m.permutations, m.charge, q, irrep)
    lr = s.reduce(gen)
    assert abs(gen @ s.v - s.v @ lr).max() < 1e-10


def test_characters():
    m = build_full_model(SystemParams())
    chars = s3_characters(m.permutations, "standard")
    assert sorted(chars) == [-1, -1, 0, 0, 0, 2]
    assert s3_characters(m.permutations, "sign").sum() == 0


def test_unsymmetric_sector_is_identity():
    s = sector(3)
    assert s.size == 9 and abs(s.v - sp.identity(9)).max() == 0
    with pytest.raises(ValueError):
        sector(3, irrep="sign")
