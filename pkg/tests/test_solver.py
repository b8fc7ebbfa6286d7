import numpy as np
from numpy.testing import assert_allclose
from pytest import raises as assert_raises

from bethe.bethe_exception import NoConvergence, SingularJacobian
from bethe.model import Twist
from bethe.solver import admissibility, canonical, continue_in_twist, magnon_seeds, newton, root_derivatives_dkappa, same_roots, solve
from bethe.state import BetheState
from cli.verify import reference_chain, reference_generic
from conftest import unit_twist


class TestSolve:
    def test_two_site_root(self, chain2):
        report = solve(chain2, 1, 0)
        assert report.found
        assert len(report.states) == 1
        assert_allclose(report.states[0].u[0], -0.35, atol=1e-12)

    def test_vacuum(self, chain3):
        report = solve(chain3, 0, 0)
        assert len(report.states) == 1
        state = report.states[0]
        assert state.on_shell
        assert state.sector == (0, 0)

    def test_three_site_one_magnon(self, states_10):
        assert len(states_10) == 2
        assert [state.label for state in states_10] == ["s0", "s1"]
        assert not same_roots(states_10[0], states_10[1])
        for state in states_10:
            assert state.on_shell
            assert state.residual_norm < 1e-12
            assert state.modes is not None

    def test_twisted_sector(self, states_11):
        assert len(states_11) >= 1
        for state in states_11:
            assert state.sector == (1, 1)
            assert state.residual_norm < 1e-12
            assert admissibility(state) is None

    def test_bad_seeds_are_reported(self, chain2):
        seeds = [(np.array([0.1, 0.2]), np.array([])), (np.array([0.0]), np.array([]))]
        report = solve(chain2, 1, 0, seeds=seeds)
        assert not report.found
        assert [failure.seed_index for failure in report.failures] == [0, 1]
        assert "sizes" in report.failures[0].reason

    def test_undetermined_sector_has_no_states(self):
        # r3 is 1 on the chain, so with a = 0 every v solves the equations and none is isolated
        report = solve(reference_chain(4), 0, 1, rng_seed=0)
        assert not report.found
        assert not report.rejected
        assert report.failures
        assert all("undetermined" in failure.reason for failure in report.failures if "sizes" not in failure.reason)

    def test_zero_modes_when_given(self, chain2):
        given = solve(chain2, 1, 0, modes=((0,), ()))
        inferred = solve(chain2, 1, 0)
        assert given.states[0].modes == ((0,), ())
        assert inferred.states[0].modes == ((0,), ())
        assert_allclose(given.states[0].u[0], inferred.states[0].u[0], atol=1e-12)

    def test_magnon_seeds(self, chain3):
        seeds = magnon_seeds(chain3, 1, 0)
        assert len(seeds) == 2
        for u, v in seeds:
            assert_allclose(chain3.eval_r(1, u[0]), 1, rtol=1e-10)
            assert v.size == 0


class TestNewton:
    def test_singular_start(self, chain2):
        with assert_raises(NoConvergence) as info:
            newton(BetheState(chain2, (0.0,), ()), seed_index=7)
        assert info.value.seed_index == 7

    def test_converged_start_with_singular_jacobian(self, chain3):
        with assert_raises(SingularJacobian) as info:
            newton(BetheState(chain3, (), (0.4 + 0.1j,)))
        assert "undetermined" in str(info.value)

    def test_generic_single_v_root_is_isolated(self):
        report = solve(reference_generic(), 0, 1, rng_seed=0)
        assert len(report.states) == 2
        for state in report.states:
            assert_allclose(state.model.eval_r(3, state.v[0]), 1, rtol=1e-10)

    def test_explicit_modes_are_kept(self, chain2):
        state = newton(BetheState(chain2, (-0.3,), (), l_modes=(0,), m_modes=()))
        assert state.modes == ((0,), ())
        assert_allclose(state.u[0], -0.35, atol=1e-12)


class TestBookkeeping:
    def test_canonical_order_carries_modes(self, chain3):
        state = canonical(BetheState(chain3, (0.5, 0.1), (), l_modes=(1, 2), m_modes=()))
        assert state.u.elems == (0.1, 0.5)
        assert state.l_modes == (2, 1)

    def test_admissibility(self, chain3):
        assert "coincident u roots" in admissibility(BetheState(chain3, (0.1, 0.1), ()))
        assert "minus c" in admissibility(BetheState(chain3, (0.2,), (1.2,)))
        assert "pole of r1" in admissibility(BetheState(chain3, (chain3.xi[1],), ()))
        assert admissibility(BetheState(chain3, (0.2 + 0.3j,), ())) is None

    def test_same_roots_ignores_order(self, chain3):
        first = BetheState(chain3, (0.1, 0.5), (0.2,))
        second = BetheState(chain3, (0.5, 0.1 + 1e-10), (0.2,))
        assert same_roots(first, second)
        assert not same_roots(first, BetheState(chain3, (0.1, 0.6), (0.2,)))


class TestContinuation:
    def test_same_twist(self, two_site_state):
        assert continue_in_twist(two_site_state, Twist.identity()) is two_site_state

    def test_reversible(self, states_10):
        for state in states_10:
            there = continue_in_twist(state, Twist(1 + 1e-5, 1, 1))
            back = continue_in_twist(there, Twist.identity())
            assert_allclose(back.roots, state.roots, atol=1e-10)

    def test_root_derivatives(self, states_10):
        h = 1e-5
        for state in states_10:
            derivatives = root_derivatives_dkappa(state)
            for s in (1, 2, 3):
                up = continue_in_twist(state, unit_twist(s, h))
                down = continue_in_twist(state, unit_twist(s, -h))
                assert_allclose((up.roots - down.roots) / (2 * h), derivatives[s - 1], rtol=1e-5, atol=1e-8)

    def test_off_shell_start(self, chain3):
        with assert_raises(NoConvergence):
            continue_in_twist(BetheState(chain3, (0.2,), ()), Twist(1.1, 1, 1))
