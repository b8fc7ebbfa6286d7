import numpy as np
from numpy.testing import assert_allclose
from pytest import raises as assert_raises

from algebra.algebra_exception import PoleError
from algebra.kernel import Coupling, Kernel, VarSet, eval_kernel
from bethe.bethe_exception import BetheException, ConstructionError
from bethe.model import GenericRational, RationalFunction, Twist, TwistedModel, XXXChain, eval_lambda, eval_r


class TestRationalFunction:
    def test_evaluation(self):
        fn = RationalFunction((1.0, 2.0), (0.5,), 3.0)
        w = 0.2 + 0.7j
        assert_allclose(fn(w), 3 * (w - 1) * (w - 2) / (w - 0.5))

    def test_constant(self):
        assert RationalFunction.constant(2.5)(7.0) == 2.5
        assert RationalFunction.constant().is_constant

    def test_reduced_cancels_common_roots(self):
        fn = RationalFunction.reduced((1.0, 2.0), (2.0, 3.0))
        assert fn.zeros == (1.0,)
        assert fn.poles == (3.0,)

    def test_common_root_rejected(self):
        with assert_raises(ConstructionError):
            RationalFunction((1.0,), (1.0,))

    def test_zero_scale_rejected(self):
        with assert_raises(ConstructionError):
            RationalFunction.constant(0)

    def test_pole_guard(self):
        with assert_raises(PoleError):
            RationalFunction((), (1.0,))(1.0, eps=1e-12)

    def test_logderiv(self):
        fn = RationalFunction((0.3, -1.0 + 0.2j), (0.9,), 2.0)
        w, h = 0.1 + 0.4j, 1e-6
        numeric = (fn(w + h) - fn(w - h)) / (2 * h) / fn(w)
        assert_allclose(fn.logderiv(w), numeric, rtol=1e-8)

    def test_derivative(self):
        fn = RationalFunction((0.3, -1.0 + 0.2j), (0.9,), 2.0)
        w, h = 0.1 + 0.4j, 1e-6
        assert_allclose(fn.derivative(w), (fn(w + h) - fn(w - h)) / (2 * h), rtol=1e-8)
        assert_allclose(fn.derivative(w), fn(w) * fn.logderiv(w), rtol=1e-12)

    def test_derivative_at_a_zero(self):
        fn = RationalFunction((0.3, -1.0), (0.9,), 2.0)
        assert_allclose(fn.derivative(0.3), 2.0 * (0.3 + 1.0) / (0.3 - 0.9), rtol=1e-12)
        assert RationalFunction.constant(4.0).derivative(1.5) == 0

    def test_derivative_pole_guard(self):
        with assert_raises(PoleError):
            RationalFunction((), (1.0,)).derivative(1.0, eps=1e-12)

    def test_product(self):
        fn = RationalFunction((1.0,), (2.0,)) * RationalFunction((2.0,), (3.0,), 4.0)
        assert fn.zeros == (1.0,)
        assert fn.poles == (3.0,)
        assert fn.scale == 4.0


class TestTwist:
    def test_identity(self):
        assert Twist.identity().is_identity
        assert not Twist(1, 1.3, 0.8).is_identity

    def test_zero_rejected(self):
        with assert_raises(ConstructionError):
            Twist(1, 0, 1)

    def test_compose(self):
        assert Twist(2, 3, 4).compose(Twist(0.5, 1, 0.25)).kappas == (1, 3, 1)

    def test_index(self):
        assert Twist(2, 3, 4).kappa(3) == 4
        with assert_raises(BetheException):
            Twist().kappa(0)


class TestChain:
    def test_coincident_inhomogeneities_rejected(self):
        with assert_raises(ConstructionError):
            XXXChain(VarSet((0.0, 0.0)), Coupling(1.0))

    def test_empty_chain_rejected(self):
        with assert_raises(ConstructionError):
            XXXChain(VarSet(()), Coupling(1.0))

    def test_vacuum_functions(self, chain3):
        w = 0.45 - 0.3j
        xi = chain3.xi.array
        assert_allclose(eval_lambda(chain3, 1, w), np.prod(w - xi + 1))
        assert_allclose(eval_lambda(chain3, 2, w), np.prod(w - xi))
        assert_allclose(eval_lambda(chain3, 3, w), np.prod(w - xi))
        assert_allclose(eval_r(chain3, 1, w), np.prod((w - xi + 1) / (w - xi)))
        assert eval_r(chain3, 3, w) == 1

    def test_vacuum_eigenvalue_is_finite_at_inhomogeneities(self, chain3):
        assert eval_lambda(chain3, 2, chain3.xi[1]) == 0
        assert_allclose(eval_lambda(chain3, 1, chain3.xi[1]), np.prod(chain3.xi[1] - chain3.xi.array + 1))

    def test_ratio_index(self, chain3):
        with assert_raises(BetheException):
            chain3.ratio(2)

    def test_homogeneous_limit(self):
        chain = XXXChain.homogeneous(3, 1.0, split=1e-8)
        w = 0.7 + 0.3j
        assert_allclose(chain.r1(w), eval_kernel(Kernel.F, w, 0, 1.0) ** 3, rtol=1e-6)

    def test_generic_defaults(self):
        model = GenericRational(Coupling(1.0))
        assert model.eval_lambda2(3.0) == 1
        assert model.eval_r(1, 3.0) == 1


class TestTwistedModel:
    def test_identity_twist_is_a_no_op(self, chain3):
        assert chain3.with_twist(Twist.identity()) is chain3

    def test_absorbed_functions(self, chain3):
        twist = Twist(1.2, 0.9, 0.7)
        model = chain3.with_twist(twist)
        assert isinstance(model, TwistedModel)
        w = 0.2 + 0.5j
        assert_allclose(model.eval_r(1, w), 1.2 / 0.9 * chain3.eval_r(1, w))
        assert_allclose(model.eval_r(3, w), 0.7 / 0.9)
        assert_allclose(model.eval_lambda2(w), 0.9 * chain3.eval_lambda2(w))
        assert model.coupling == chain3.coupling

    def test_nested_twists_compose(self, chain3):
        model = chain3.with_twist(Twist(2, 1, 1)).with_twist(Twist(1, 1, 3))
        base, twist = model.split_twist()
        assert base == chain3
        assert twist == Twist(2, 1, 3)

    def test_split_of_untwisted(self, chain3):
        assert chain3.split_twist() == (chain3, Twist.identity())
