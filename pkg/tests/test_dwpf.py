from fractions import Fraction
from itertools import permutations

import numpy as np
from numpy.testing import assert_allclose
from pytest import raises as assert_raises

from algebra.algebra_exception import SizeMismatch
from algebra.dwpf import dwpf, dwpf_with_cond
from algebra.kernel import Coupling, Kernel, prod_kernel
from cli.verify import richardson


def exact_two_site(xs, ys, c):
    """Delta'(x) Delta(y) h(x, y) det t(x, y) in rational arithmetic."""
    xs, ys, c = [Fraction(x) for x in xs], [Fraction(y) for y in ys], Fraction(c)

    def t(x, y):
        return c * c / ((x - y) * (x - y + c))

    h = Fraction(1)
    for x in xs:
        for y in ys:
            h *= (x - y + c) / c
    det = t(xs[0], ys[0]) * t(xs[1], ys[1]) - t(xs[0], ys[1]) * t(xs[1], ys[0])
    return c / (xs[1] - xs[0]) * c / (ys[0] - ys[1]) * h * det


class TestDomainWall:
    def test_empty(self):
        assert dwpf([], [], 1.0) == 1

    def test_single(self):
        assert_allclose(dwpf([3], [1], 2), 1)

    def test_two_by_two(self):
        expected = exact_two_site((2, 3), (0, 1), 1)
        assert expected == 1
        assert_allclose(dwpf([2, 3], [0, 1], 1), float(expected), rtol=1e-14)

    def test_two_by_two_generic(self):
        xs, ys = (Fraction(1, 3), Fraction(7, 5)), (Fraction(-1, 2), Fraction(2, 7))
        assert_allclose(dwpf([float(x) for x in xs], [float(y) for y in ys], 1.5), float(exact_two_site(xs, ys, Fraction(3, 2))), rtol=1e-13)

    def test_symmetric_in_each_set(self, rng):
        xs = rng.normal(size=3) + 1j * rng.normal(size=3)
        ys = rng.normal(size=3) + 1j * rng.normal(size=3)
        reference = dwpf(xs, ys, 0.7)
        for order in permutations(range(3)):
            assert_allclose(dwpf(xs[list(order)], ys, 0.7), reference, rtol=1e-10)
            assert_allclose(dwpf(xs, ys[list(order)], 0.7), reference, rtol=1e-10)

    def test_residue(self, rng):
        c = Coupling(1.0)
        xs, ys = rng.normal(size=4) + 1j * rng.normal(size=4), rng.normal(size=4) + 1j * rng.normal(size=4)

        def scaled(delta):
            return delta * dwpf(np.append(xs[:-1], ys[-1] + delta), ys, c)

        expected = c.c * prod_kernel(Kernel.F, [ys[-1]], ys[:-1], c) * prod_kernel(Kernel.F, xs[:-1], [ys[-1]], c) * dwpf(xs[:-1], ys[:-1], c)
        assert_allclose(richardson(scaled), expected, rtol=1e-6)

    def test_sizes_must_match(self):
        with assert_raises(SizeMismatch):
            dwpf([1, 2], [0], 1)

    def test_condition_reported(self, rng):
        xs, ys = rng.normal(size=3), rng.normal(size=3) + 3
        assert dwpf_with_cond(xs, ys, 1).cond >= 1
