import numpy as np
import pytest
from hypothesis import given, strategies as st

from chaosgraph import spectra
from chaosgraph.errors import SizeLimitExceeded


def test_cluster_groups_close_values():
    groups = spectra.cluster_eigenvalues(np.array([0.0, 1.0, 1.0 + 1e-12, 2.0]))
    assert [m for _, m in groups] == [1, 2, 1]


def test_report_rows_cover_every_eigenvalue():
    rep = spectra.report(np.array([0.0, 4 / 3, 4 / 3, 4 / 3]), "normalized_laplacian")
    rows = rep.rows()
    assert [r[0] for r in rows] == [0, 1, 2, 3]
    assert sorted({(round(r[2], 12), r[3]) for r in rows}) == [(0.0, 1), (round(4 / 3, 12), 3)]
    assert rep.multiplicity(4 / 3) == 3


def test_dense_cap():
    with pytest.raises(SizeLimitExceeded):
        spectra.check_dense_size(spectra.MAX_DENSE_VERTICES + 1)


@given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=30))
def test_groups_partition_the_values(values):
    groups = spectra.cluster_eigenvalues(np.array(values))
    assert sum(m for _, m in groups) == len(values)
    centres = [v for v, _ in groups]
    assert centres == sorted(centres)
