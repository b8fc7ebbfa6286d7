from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from algebra.algebra_exception import AlgebraException, DistinctnessError, PoleError

# Relative guards, scaled by max(1, |c|)
EPS_POLE_REL = 1e-12
EPS_DIST_REL = 1e-10


class Kernel(Enum):
    G = "g"
    F = "f"
    H = "h"
    T = "t"


class DeltaKind(Enum):
    PLAIN = "plain"
    PRIMED = "primed"


@dataclass(frozen=True)
class Coupling:
    """The constant c of the rational R-matrix I + c/(x-y) P."""

    c: complex

    def __post_init__(self):
        object.__setattr__(self, "c", complex(self.c))
        if self.c == 0:
            raise AlgebraException("coupling constant c must be nonzero")

    @property
    def eps_pole(self) -> float:
        return EPS_POLE_REL * max(1.0, abs(self.c))

    @property
    def eps_dist(self) -> float:
        return EPS_DIST_REL * max(1.0, abs(self.c))


CouplingLike = Union[Coupling, complex, float, int]


def as_coupling(c: CouplingLike) -> Coupling:
    return c if isinstance(c, Coupling) else Coupling(c)


@dataclass(frozen=True)
class VarSet:
    """An ordered set of complex rapidities."""

    elems: tuple[complex, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "elems", tuple(complex(x) for x in self.elems))

    @classmethod
    def of(cls, values: Iterable[complex], c: CouplingLike | None = None) -> "VarSet":
        """
        Build a set and, when a coupling is given, enforce pairwise distinctness

        Parameters
        ----------
        values : Iterable[complex]
            The rapidities
        c : Coupling, optional
            Coupling whose eps_dist sets the distinctness tolerance

        Returns
        -------
        VarSet
            The validated set
        """
        var_set = cls(tuple(values))
        if c is not None:
            var_set.require_distinct(as_coupling(c).eps_dist)
        return var_set

    def __len__(self) -> int:
        return len(self.elems)

    def __iter__(self) -> Iterator[complex]:
        return iter(self.elems)

    def __getitem__(self, index: int) -> complex:
        return self.elems[index]

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.elems, dtype=complex)

    def shifted(self, delta: complex) -> "VarSet":
        return VarSet(tuple(x + delta for x in self.elems))

    def without(self, index: int) -> "VarSet":
        return VarSet(self.elems[:index] + self.elems[index + 1 :])

    def select(self, indices: Iterable[int]) -> "VarSet":
        return VarSet(tuple(self.elems[i] for i in indices))

    def replaced(self, index: int, value: complex) -> "VarSet":
        return VarSet(self.elems[:index] + (complex(value),) + self.elems[index + 1 :])

    def closest_pair(self) -> tuple[float, int, int]:
        """Smallest pairwise distance and the indices realizing it (inf for fewer than two elements)."""
        best: tuple[float, int, int] = (float("inf"), -1, -1)
        for j in range(len(self.elems)):
            for k in range(j + 1, len(self.elems)):
                dist = abs(self.elems[j] - self.elems[k])
                if dist < best[0]:
                    best = (dist, j, k)
        return best

    def require_distinct(self, eps: float) -> None:
        dist, j, k = self.closest_pair()
        if dist < eps:
            raise DistinctnessError(f"elements {j} and {k} coincide within {eps:.1e}: {self.elems[j]}, {self.elems[k]}")


SetLike = Union[VarSet, Sequence[complex], np.ndarray]


def _as_array(values: SetLike) -> np.ndarray:
    if isinstance(values, VarSet):
        return values.array
    return np.asarray(values, dtype=complex).reshape(-1)


def _check_poles(diff: np.ndarray, shift: complex, eps: float, fn: Kernel, xs: np.ndarray, ys: np.ndarray) -> None:
    bad = np.argwhere(np.abs(diff + shift) < eps)
    if len(bad) > 0:
        j, k = bad[0]
        raise PoleError(fn.value, complex(xs[j]), complex(ys[k]))


def kernel_matrix(fn: Kernel | str, xs: SetLike, ys: SetLike, c: CouplingLike) -> np.ndarray:
    """
    Tabulate fn(x_j, y_k) on the grid of two sets

    Parameters
    ----------
    fn : Kernel
        One of g, f, h, t
    xs : SetLike
        First arguments
    ys : SetLike
        Second arguments
    c : Coupling
        The coupling constant

    Returns
    -------
    np.ndarray
        Matrix of shape (len(xs), len(ys))
    """
    fn = Kernel(fn)
    coupling = as_coupling(c)
    cc = coupling.c
    x = _as_array(xs)
    y = _as_array(ys)
    diff = np.subtract.outer(x, y)

    if fn is Kernel.H:
        return (diff + cc) / cc

    _check_poles(diff, 0, coupling.eps_pole, fn, x, y)
    if fn is Kernel.G:
        return cc / diff
    if fn is Kernel.F:
        return (diff + cc) / diff

    _check_poles(diff, cc, coupling.eps_pole, fn, x, y)
    return cc * cc / (diff * (diff + cc))


def eval_kernel(fn: Kernel | str, x: complex, y: complex, c: CouplingLike) -> complex:
    return complex(kernel_matrix(fn, [x], [y], c)[0, 0])


def prod_kernel(fn: Kernel | str, xs: SetLike, ys: SetLike, c: CouplingLike) -> complex:
    """Double product over both sets; an empty set on either side gives 1."""
    values = kernel_matrix(fn, xs, ys, c)
    if values.size == 0:
        return 1 + 0j
    return complex(np.prod(values))


def prod_inverse_g(xs: SetLike, ys: SetLike, c: CouplingLike) -> complex:
    """Product of g^-1(x, y) = (x - y)/c, finite everywhere."""
    diff = np.subtract.outer(_as_array(xs), _as_array(ys))
    if diff.size == 0:
        return 1 + 0j
    return complex(np.prod(diff / as_coupling(c).c))


def prod_offdiagonal(fn: Kernel | str, xs: SetLike, c: CouplingLike) -> complex:
    """Product of fn(x_j, x_k) over ordered pairs j != k of one set."""
    x = _as_array(xs)
    result = 1 + 0j
    for j in range(len(x)):
        result *= prod_kernel(fn, x[j : j + 1], np.delete(x, j), c)
    return result


def delta_prod(kind: DeltaKind | str, xs: SetLike, c: CouplingLike) -> complex:
    """
    Vandermonde-type products of g over a set

    primed: product of g(x_j, x_k) over j > k, plain: over j < k.
    """
    kind = DeltaKind(kind)
    x = _as_array(xs)
    result = 1 + 0j
    for j in range(len(x)):
        for k in range(j + 1, len(x)):
            if kind is DeltaKind.PRIMED:
                result *= eval_kernel(Kernel.G, x[k], x[j], c)
            else:
                result *= eval_kernel(Kernel.G, x[j], x[k], c)
    return result
