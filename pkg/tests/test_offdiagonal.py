import numpy as np
from numpy.testing import assert_allclose
from pytest import raises as assert_raises

from formfactor.eigenvalue import tau_of
from formfactor.formfactor_exception import AllZero, StateMismatch
from formfactor.offdiagonal import (
    ff_offdiagonal,
    merged_arguments,
    n_hat_u,
    n_hat_v,
    n_matrix_offdiag,
    null_residual,
    offdiagonal_factor,
    omega,
    row_p,
    standard_rows,
    standard_rows_with_scale,
    y_vector,
)
from formfactor.result import FormFactorKind
from conftest import distinct_pairs

Z = 0.37 + 0.21j


def all_pairs(states_10, states_11):
    return [(c.absorbed(), b.absorbed()) for c, b in distinct_pairs(states_10) + distinct_pairs(states_11)]


class TestOmega:
    def test_identical_states(self, states_10):
        with assert_raises(AllZero):
            omega(states_10[0], states_10[0])
        with assert_raises(AllZero):
            ff_offdiagonal(1, Z, states_10[0], states_10[0])

    def test_left_null_vector(self, states_10, states_11):
        for stateC, stateB in all_pairs(states_10, states_11):
            vector, p = omega(stateC, stateB)
            assert abs(vector[p]) == np.max(np.abs(vector))
            assert null_residual(stateC, stateB) < 1e-10

    def test_left_null_vector_when_n_vanishes(self, states_10):
        # for a + b = 1 the single entry of N is zero on shell, only its terms set the scale
        stateC, stateB = states_10[0].absorbed(), states_10[1].absorbed()
        matrix, scales = standard_rows_with_scale(stateC, stateB, stateB.model)
        assert abs(matrix[0, 0]) < 1e-10 * scales[0, 0]
        assert scales[0, 0] > 0.1
        assert null_residual(stateC, stateB) < 1e-10


class TestReplacedRow:
    def test_y_for_the_middle_entry(self, states_10, states_11):
        for stateC, stateB in all_pairs(states_10, states_11):
            c = stateC.model.coupling.c
            assert_allclose(y_vector(2, stateC, stateB), np.full(stateC.a + stateC.b, -c))

    def test_y_sums_to_zero(self, states_10, states_11):
        for stateC, stateB in all_pairs(states_10, states_11):
            total = sum(y_vector(s, stateC, stateB) for s in (1, 2, 3))
            assert_allclose(total, 0, atol=1e-12)

    def test_row_p_weights(self, states_10):
        stateC, stateB = states_10
        assert row_p(1, stateC, stateB).shape == merged_arguments(stateC, stateB).shape

    def test_matrix_row_replaced(self, states_11):
        stateC, stateB = states_11[0].absorbed(), states_11[1].absorbed()
        _, p = omega(stateC, stateB)
        matrix = n_matrix_offdiag(3, stateC, stateB, p)
        assert_allclose(matrix[p], row_p(3, stateC, stateB))
        others = [k for k in range(matrix.shape[0]) if k != p]
        assert_allclose(matrix[others], standard_rows(stateC, stateB, stateC.model)[others])


class TestOffDiagonalFormFactor:
    def test_sum_over_s_vanishes(self, states_10, states_11):
        for stateC, stateB in all_pairs(states_10, states_11):
            values = [ff_offdiagonal(s, Z, stateC, stateB).value for s in (1, 2, 3)]
            assert abs(sum(values)) < 1e-10 * max(abs(v) for v in values)

    def test_independent_of_p(self, states_10, states_11):
        for stateC, stateB in all_pairs(states_10, states_11):
            vector, best = omega(stateC, stateB)
            usable = [p for p in range(len(vector)) if abs(vector[p]) > 1e-6 * abs(vector[best])]
            for s in (1, 2, 3):
                reference = ff_offdiagonal(s, Z, stateC, stateB).value
                for p in usable:
                    assert_allclose(ff_offdiagonal(s, Z, stateC, stateB, p).value, reference, rtol=1e-10)

    def test_factorization(self, states_10):
        stateC, stateB = states_10
        result = ff_offdiagonal(1, Z, stateC, stateB)
        factor = offdiagonal_factor(1, stateC, stateB)
        assert_allclose(result.value, (tau_of(stateC, Z) - tau_of(stateB, Z)) * factor.value)
        assert result.kind is FormFactorKind.OFFDIAGONAL
        assert result.p == factor.p
        assert result.states == ("s0", "s1")

    def test_sector_mismatch(self, states_10, states_11):
        with assert_raises(StateMismatch):
            ff_offdiagonal(1, Z, states_10[0], states_11[0])


def central_average(fn, x: complex, h: float = 1e-5) -> complex:
    return (fn(x + h) + fn(x - h)) / 2


class TestSharedRoot:
    def test_u_entry_limit(self, two_site_state):
        model = two_site_state.model
        u, v, c = two_site_state.u, two_site_state.v, model.coupling
        root = u[0]
        r1, r1_prime = model.eval_r(1, root), model.eval_dr(1, root)
        limit = n_hat_u(0, root, u, v, r1, 1, c, r1_prime)
        nearby = central_average(lambda w: n_hat_u(0, w, u, v, model.eval_r(1, w), 1, c), root)
        assert_allclose(limit, nearby, rtol=1e-7)
        assert abs(limit) > 1e-3

    def test_v_entry_limit(self, states_11):
        state = states_11[0].absorbed()
        model = state.model
        u, v, c = state.u, state.v, model.coupling
        root = v[0]
        r3, r3_prime = model.eval_r(3, root), model.eval_dr(3, root)
        limit = n_hat_v(0, root, u, v, 1, r3, c, r3_prime)
        nearby = central_average(lambda w: n_hat_v(0, w, u, v, 1, model.eval_r(3, w), c), root)
        assert_allclose(limit, nearby, rtol=1e-7)

    def test_states_sharing_a_root(self, states_21):
        pairs = [(c.absorbed(), b.absorbed()) for c, b in distinct_pairs(states_21)]
        shared = [
            (stateC, stateB) for stateC, stateB in pairs if np.min(np.abs(np.subtract.outer(stateC.u.array, stateB.u.array)), initial=np.inf) < 1e-8
        ]
        assert shared
        for stateC, stateB in pairs:
            assert null_residual(stateC, stateB) < 1e-10
            values = [ff_offdiagonal(s, Z, stateC, stateB).value for s in (1, 2, 3)]
            assert np.all(np.isfinite(values))
            assert abs(sum(values)) < 1e-10 * max(abs(v) for v in values)

    def test_shared_root_independent_of_p(self, states_21):
        for stateC, stateB in distinct_pairs(states_21):
            vector, best = omega(stateC.absorbed(), stateB.absorbed())
            usable = [p for p in range(len(vector)) if abs(vector[p]) > 1e-6 * abs(vector[best])]
            for s in (1, 2, 3):
                reference = ff_offdiagonal(s, Z, stateC, stateB).value
                for p in usable:
                    assert_allclose(ff_offdiagonal(s, Z, stateC, stateB, p).value, reference, rtol=1e-8)
