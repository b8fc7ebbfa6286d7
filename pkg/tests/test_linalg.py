import numpy as np
from numpy.testing import assert_allclose
from pytest import raises as assert_raises

from algebra.algebra_exception import SizeMismatch
from algebra.linalg import ILL_CONDITIONED, det_with_cond


class TestDeterminant:
    def test_empty_matrix(self):
        det = det_with_cond(np.zeros((0, 0)))
        assert det.value == 1
        assert det.cond == 1.0

    def test_matches_numpy(self, rng):
        for n in (1, 2, 5):
            a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            assert_allclose(det_with_cond(a).value, np.linalg.det(a), rtol=1e-12)

    def test_permutation_sign(self):
        swap = np.array([[0, 1], [1, 0]], dtype=complex)
        assert_allclose(det_with_cond(swap).value, -1)

    def test_ill_conditioned_is_flagged_not_rejected(self):
        a = np.diag([1.0, 1e-14])
        det = det_with_cond(a)
        assert det.ill_conditioned
        assert det.cond > ILL_CONDITIONED
        assert_allclose(det.value, 1e-14)

    def test_singular(self):
        det = det_with_cond(np.ones((2, 2)))
        assert det.value == 0
        assert det.cond == float("inf")

    def test_not_square(self):
        with assert_raises(SizeMismatch):
            det_with_cond(np.ones((2, 3)))

    def test_non_finite_entries(self):
        det = det_with_cond(np.array([[np.inf, 0], [0, 1]]))
        assert np.isnan(det.value.real)
        assert det.cond == float("inf")
