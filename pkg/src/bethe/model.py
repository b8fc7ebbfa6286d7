import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np

from algebra.algebra_exception import DistinctnessError, PoleError
from algebra.kernel import Coupling, CouplingLike, VarSet, as_coupling
from bethe.bethe_exception import BetheException, ConstructionError

logger = logging.getLogger(name=__name__)

# Spacing of the inhomogeneities used to represent a homogeneous chain
HOMOGENEOUS_SPLIT = 1e-3
# Roots closer than this (relative) are treated as the same root when cancelling
ROOT_MATCH_REL = 1e-14


def _same_root(x: complex, y: complex) -> bool:
    return abs(x - y) <= ROOT_MATCH_REL * max(1.0, abs(x), abs(y))


@dataclass(frozen=True)
class RationalFunction:
    """scale * prod(w - zeros) / prod(w - poles)"""

    zeros: tuple[complex, ...] = ()
    poles: tuple[complex, ...] = ()
    scale: complex = 1

    def __post_init__(self):
        object.__setattr__(self, "zeros", tuple(complex(z) for z in self.zeros))
        object.__setattr__(self, "poles", tuple(complex(p) for p in self.poles))
        object.__setattr__(self, "scale", complex(self.scale))
        if self.scale == 0:
            raise ConstructionError("rational function with zero scale")
        for z in self.zeros:
            for p in self.poles:
                if _same_root(z, p):
                    raise ConstructionError(f"common root {z} in numerator and denominator")

    @classmethod
    def constant(cls, value: complex = 1) -> "RationalFunction":
        return cls((), (), value)

    @classmethod
    def reduced(cls, zeros: tuple[complex, ...], poles: tuple[complex, ...], scale: complex = 1) -> "RationalFunction":
        """Build the function after cancelling roots shared by numerator and denominator."""
        remaining_zeros = [complex(z) for z in zeros]
        remaining_poles = []
        for p in poles:
            match = next((i for i, z in enumerate(remaining_zeros) if _same_root(z, p)), None)
            if match is None:
                remaining_poles.append(complex(p))
            else:
                remaining_zeros.pop(match)
        return cls(tuple(remaining_zeros), tuple(remaining_poles), scale)

    def __call__(self, w: complex, eps: float = 0.0) -> complex:
        w = complex(w)
        for p in self.poles:
            if abs(w - p) <= eps:
                raise PoleError("rational function", w, p)
        value = self.scale
        for z in self.zeros:
            value *= w - z
        for p in self.poles:
            value /= w - p
        return value

    def logderiv(self, w: complex, eps: float = 0.0) -> complex:
        w = complex(w)
        for root in self.zeros + self.poles:
            if abs(w - root) <= eps:
                raise PoleError("log-derivative", w, root)
        return complex(sum(1 / (w - z) for z in self.zeros) - sum(1 / (w - p) for p in self.poles))

    def derivative(self, w: complex, eps: float = 0.0) -> complex:
        """dr/dw by the quotient rule on the polynomials, finite at the zeros."""
        w = complex(w)
        for p in self.poles:
            if abs(w - p) <= eps:
                raise PoleError("rational function", w, p)
        num, den = self.numerator(), self.denominator()
        d = np.polyval(den, w)
        return complex((np.polyval(np.polyder(num), w) * d - np.polyval(num, w) * np.polyval(np.polyder(den), w)) / d**2)

    def scaled(self, factor: complex) -> "RationalFunction":
        return RationalFunction(self.zeros, self.poles, self.scale * factor)

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction.reduced(self.zeros + other.zeros, self.poles + other.poles, self.scale * other.scale)

    @property
    def is_constant(self) -> bool:
        return not self.zeros and not self.poles

    def numerator(self) -> np.ndarray:
        return self.scale * np.atleast_1d(np.poly(np.asarray(self.zeros, dtype=complex)))

    def denominator(self) -> np.ndarray:
        return np.atleast_1d(np.poly(np.asarray(self.poles, dtype=complex))).astype(complex)


@dataclass(frozen=True)
class Twist:
    """Diagonal twist matrix diag(kappa1, kappa2, kappa3)."""

    kappa1: complex = 1
    kappa2: complex = 1
    kappa3: complex = 1

    def __post_init__(self):
        for name in ("kappa1", "kappa2", "kappa3"):
            value = complex(getattr(self, name))
            if value == 0:
                raise ConstructionError(f"twist parameter {name} must be nonzero")
            object.__setattr__(self, name, value)

    @classmethod
    def identity(cls) -> "Twist":
        return cls(1, 1, 1)

    @classmethod
    def of(cls, kappas: tuple[complex, complex, complex] | list[complex]) -> "Twist":
        return cls(*kappas)

    @property
    def kappas(self) -> tuple[complex, complex, complex]:
        return (self.kappa1, self.kappa2, self.kappa3)

    def kappa(self, s: int) -> complex:
        if s not in (1, 2, 3):
            raise BetheException(f"twist index must be 1, 2 or 3, got {s}")
        return self.kappas[s - 1]

    @property
    def is_identity(self) -> bool:
        return self.kappas == (1, 1, 1)

    def compose(self, other: "Twist") -> "Twist":
        return Twist(*(k * q for k, q in zip(self.kappas, other.kappas)))


class ModelSpec(ABC):
    """
    Functional data of a generalized model: the ratios r1 = lambda1/lambda2, r3 = lambda3/lambda2 and lambda2.

    Determinant formulas only see r1 and r3; lambda2 restores un-normalized eigenvalues.
    """

    coupling: Coupling

    @property
    @abstractmethod
    def r1(self) -> RationalFunction:
        pass

    @property
    @abstractmethod
    def r3(self) -> RationalFunction:
        pass

    @property
    @abstractmethod
    def lambda2(self) -> RationalFunction:
        pass

    @property
    def eps_pole(self) -> float:
        return self.coupling.eps_pole

    def ratio(self, which: int) -> RationalFunction:
        if which == 1:
            return self.r1
        if which == 3:
            return self.r3
        raise BetheException(f"ratio index must be 1 or 3, got {which}")

    def eval_r(self, which: int, w: complex) -> complex:
        return self.ratio(which)(w, self.eps_pole)

    def eval_logderiv_r(self, which: int, w: complex) -> complex:
        return self.ratio(which).logderiv(w, self.eps_pole)

    def eval_dr(self, which: int, w: complex) -> complex:
        return self.ratio(which).derivative(w, self.eps_pole)

    def eval_lambda2(self, w: complex) -> complex:
        return self.lambda2(w, self.eps_pole)

    def vacuum_eigenvalue(self, j: int) -> RationalFunction:
        if j == 2:
            return self.lambda2
        return self.ratio(j) * self.lambda2

    def eval_lambda(self, j: int, w: complex) -> complex:
        """Un-normalized vacuum eigenvalue lambda_j(w); for the chain a polynomial, finite at the inhomogeneities."""
        return self.vacuum_eigenvalue(j)(w, self.eps_pole)

    def with_twist(self, twist: Twist) -> "ModelSpec":
        if twist.is_identity:
            return self
        return TwistedModel(self, twist)

    def split_twist(self) -> tuple["ModelSpec", Twist]:
        return self, Twist.identity()

    @property
    def center(self) -> complex:
        roots = self.r1.zeros + self.r1.poles + self.r3.zeros + self.r3.poles
        return complex(np.mean(roots)) if roots else 0j


@dataclass(frozen=True)
class XXXChain(ModelSpec):
    """Inhomogeneous SU(3)-invariant XXX chain with the polynomial Lax operator (w - xi_n) I + c P."""

    xi: VarSet
    coupling: Coupling
    allow_coincident: bool = field(default=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "xi", self.xi if isinstance(self.xi, VarSet) else VarSet(tuple(self.xi)))
        object.__setattr__(self, "coupling", as_coupling(self.coupling))
        if len(self.xi) == 0:
            raise ConstructionError("chain needs at least one site")
        if not self.allow_coincident:
            try:
                self.xi.require_distinct(self.coupling.eps_dist)
            except DistinctnessError as e:
                raise ConstructionError(f"inhomogeneities must be pairwise distinct: {e}") from e

    @classmethod
    def homogeneous(cls, L: int, c: CouplingLike, split: float = HOMOGENEOUS_SPLIT) -> "XXXChain":
        return cls(VarSet(tuple(n * split for n in range(1, L + 1))), as_coupling(c))

    @property
    def L(self) -> int:
        return len(self.xi)

    @property
    def r1(self) -> RationalFunction:
        return RationalFunction.reduced(tuple(x - self.coupling.c for x in self.xi), tuple(self.xi))

    @property
    def r3(self) -> RationalFunction:
        return RationalFunction.constant(1)

    @property
    def lambda2(self) -> RationalFunction:
        return RationalFunction(tuple(self.xi), ())


@dataclass(frozen=True)
class GenericRational(ModelSpec):
    coupling: Coupling
    r1: RationalFunction = RationalFunction.constant(1)
    r3: RationalFunction = RationalFunction.constant(1)
    lambda2: RationalFunction = RationalFunction.constant(1)

    def __post_init__(self):
        object.__setattr__(self, "coupling", as_coupling(self.coupling))


@dataclass(frozen=True)
class TwistedModel(ModelSpec):
    """A model with a diagonal twist absorbed into its data: r1 -> k1 r1/k2, r3 -> k3 r3/k2, lambda2 -> k2 lambda2."""

    base: ModelSpec
    twist: Twist

    @property
    def coupling(self) -> Coupling:
        return self.base.coupling

    @property
    def r1(self) -> RationalFunction:
        return self.base.r1.scaled(self.twist.kappa1 / self.twist.kappa2)

    @property
    def r3(self) -> RationalFunction:
        return self.base.r3.scaled(self.twist.kappa3 / self.twist.kappa2)

    @property
    def lambda2(self) -> RationalFunction:
        return self.base.lambda2.scaled(self.twist.kappa2)

    def with_twist(self, twist: Twist) -> ModelSpec:
        return self.base.with_twist(self.twist.compose(twist))

    def split_twist(self) -> tuple[ModelSpec, Twist]:
        return self.base, self.twist


def eval_r(model: ModelSpec, which: int, w: complex) -> complex:
    return model.eval_r(which, w)


def eval_logderiv_r(model: ModelSpec, which: int, w: complex) -> complex:
    return model.eval_logderiv_r(which, w)


def eval_lambda2(model: ModelSpec, w: complex) -> complex:
    return model.eval_lambda2(w)


def eval_lambda(model: ModelSpec, j: int, w: complex) -> complex:
    return model.eval_lambda(j, w)
