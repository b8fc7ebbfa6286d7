from numpy.testing import assert_allclose
from pytest import raises as assert_raises

from bethe.state import BetheState
from formfactor.diagonal import norm_squared
from formfactor.formfactor_exception import FormFactorException, SiteOutOfRange
from formfactor.local import ff_local
from formfactor.result import FormFactorKind
from oracle.spectrum import match_state, ratio_local_diag, ratio_local_offdiag


class TestLocalFormFactor:
    def test_completeness_on_the_diagonal(self, states_10):
        for state in states_10:
            norm = norm_squared(state)
            for m in (1, 2, 3):
                assert_allclose(sum(ff_local(s, m, state, state).value for s in (1, 2, 3)), norm, rtol=1e-10)

    def test_completeness_between_states(self, states_10):
        stateC, stateB = states_10
        for m in (1, 2, 3):
            values = [ff_local(s, m, stateC, stateB).value for s in (1, 2, 3)]
            assert abs(sum(values)) < 1e-10 * max(abs(v) for v in values)

    def test_matches_lattice(self, states_10):
        matched = [match_state(state, rng_seed=3) for state in states_10]
        norms = [norm_squared(state) for state in states_10]
        for i, state in enumerate(states_10):
            for m in (1, 2, 3):
                for s in (1, 2, 3):
                    assert_allclose(ff_local(s, m, state, state).value / norms[i], ratio_local_diag(s, m, matched[i]), rtol=1e-7, atol=1e-12)
        for m, m2 in ((1, 2), (3, 3)):
            computed = ff_local(1, m, states_10[0], states_10[1]).value * ff_local(2, m2, states_10[1], states_10[0]).value / (norms[0] * norms[1])
            assert_allclose(computed, ratio_local_offdiag(1, 2, m, m2, matched[0], matched[1]), rtol=1e-7, atol=1e-10)

    def test_diagonal_kind(self, states_10):
        result = ff_local(2, 1, states_10[0], states_10[0])
        assert result.kind is FormFactorKind.LOCAL
        assert result.m == 1
        assert result.z == states_10[0].model.xi[0]

    def test_selection_rule(self, chain3, states_10):
        other = BetheState(chain3, (0.1, 0.2), (0.3,))
        result = ff_local(1, 2, other, states_10[0])
        assert result.kind is FormFactorKind.SELECTION_RULE
        assert result.value == 0

    def test_site_range(self, states_10):
        for m in (0, 4):
            with assert_raises(SiteOutOfRange) as info:
                ff_local(1, m, states_10[0], states_10[0])
            assert info.value.L == 3

    def test_needs_untwisted_chain(self, states_11):
        with assert_raises(FormFactorException):
            ff_local(1, 1, states_11[0], states_11[0])
