"""Partition sums of products of two domain-wall partition functions."""

import cmath
import logging
import math
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from enum import Enum
from itertools import combinations

import numpy as np

from algebra.algebra_exception import AlgebraException, SizeLimit, SizeMismatch
from algebra.dwpf import dwpf
from algebra.kernel import CouplingLike, Kernel, SetLike, VarSet, as_coupling, prod_kernel

logger = logging.getLogger(name=__name__)

MAX_PARTITION_SIZE = 8
# Outside this distance from 1 the principal branch of zeta**w is reported
BRANCH_SAFE_RADIUS = 0.1


class GtildeMode(Enum):
    BRUTE = "brute"
    CLOSED = "closed"


@dataclass(frozen=True)
class PartitionPair:
    """Selection masks for the first subsets of xi and eta; the rest form the second subsets."""

    xi_mask: tuple[bool, ...]
    eta_mask: tuple[bool, ...]

    def __post_init__(self):
        if len(self.xi_mask) != len(self.eta_mask):
            raise SizeMismatch(f"masks of different lengths {len(self.xi_mask)} and {len(self.eta_mask)}")
        if sum(self.xi_mask) != sum(self.eta_mask):
            raise SizeMismatch(f"first subsets differ in size: {sum(self.xi_mask)} and {sum(self.eta_mask)}")

    @property
    def n_first(self) -> int:
        return sum(self.xi_mask)

    @property
    def n_second(self) -> int:
        return len(self.xi_mask) - self.n_first

    @staticmethod
    def split(values: VarSet, mask: tuple[bool, ...]) -> tuple[VarSet, VarSet]:
        first = VarSet(tuple(x for x, keep in zip(values, mask) if keep))
        second = VarSet(tuple(x for x, keep in zip(values, mask) if not keep))
        return first, second


@dataclass(frozen=True)
class ScaledSum:
    """A sum together with the sum of the magnitudes of its terms, the scale its rounding error is measured on."""

    value: complex
    scale: float


@dataclass(frozen=True)
class BranchNote:
    zeta: complex
    exponent: complex
    message: str


def _mask(n: int, chosen: Iterable[int]) -> tuple[bool, ...]:
    selected = set(chosen)
    return tuple(i in selected for i in range(n))


def subset_masks(n: int) -> Iterator[tuple[bool, ...]]:
    for k in range(n + 1):
        for chosen in combinations(range(n), k):
            yield _mask(n, chosen)


def partition_pairs(n: int) -> Iterator[PartitionPair]:
    for k in range(n + 1):
        for xi_chosen in combinations(range(n), k):
            for eta_chosen in combinations(range(n), k):
                yield PartitionPair(_mask(n, xi_chosen), _mask(n, eta_chosen))


def complex_fsum(terms: Iterable[complex]) -> complex:
    """Compensated summation, applied to real and imaginary parts separately."""
    values = [complex(term) for term in terms]
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


def scaled_sum(terms: Iterable[complex]) -> ScaledSum:
    values = [complex(term) for term in terms]
    return ScaledSum(complex_fsum(values), math.fsum(abs(v) for v in values))


def _prepare(xis: SetLike, etas: SetLike, max_n: float) -> tuple[VarSet, VarSet]:
    xi = VarSet(tuple(np.asarray(list(xis), dtype=complex)))
    eta = VarSet(tuple(np.asarray(list(etas), dtype=complex)))
    if len(xi) != len(eta):
        raise SizeMismatch(f"xi and eta differ in size: {len(xi)} and {len(eta)}")
    if len(xi) > max_n:
        raise SizeLimit(f"partition sum over n = {len(xi)} exceeds the cap {max_n}")
    return xi, eta


def _pair_summand(pair: PartitionPair, xi: VarSet, eta: VarSet, c: CouplingLike) -> complex:
    xi_first, xi_second = PartitionPair.split(xi, pair.xi_mask)
    eta_first, eta_second = PartitionPair.split(eta, pair.eta_mask)
    return (
        prod_kernel(Kernel.F, xi_first, xi_second, c)
        * prod_kernel(Kernel.F, eta_second, eta_first, c)
        * dwpf(eta_first, xi_first, c)
        * dwpf(xi_second.shifted(as_coupling(c).c), eta_second, c)
    )


def gsum_brute(xis: SetLike, etas: SetLike, zeta: complex, c: CouplingLike, max_n: int = MAX_PARTITION_SIZE) -> complex:
    """
    Sum over all partition pairs of zeta^n_II f(xi_I, xi_II) f(eta_II, eta_I) K(eta_I|xi_I) K(xi_II + c|eta_II)

    Parameters
    ----------
    xis : SetLike
        The set xi of n rapidities
    etas : SetLike
        The set eta of n rapidities
    zeta : complex
        Weight per element of the second subsets
    c : Coupling
        The coupling constant
    max_n : int
        Cap on n

    Returns
    -------
    complex
        The partition sum
    """
    return gsum_brute_scaled(xis, etas, zeta, c, max_n).value


def gsum_brute_scaled(xis: SetLike, etas: SetLike, zeta: complex, c: CouplingLike, max_n: int = MAX_PARTITION_SIZE) -> ScaledSum:
    coupling = as_coupling(c)
    xi, eta = _prepare(xis, etas, max_n)
    n = len(xi)
    terms = [zeta**pair.n_second * _pair_summand(pair, xi, eta, coupling) for pair in partition_pairs(n)]
    logger.debug("gsum_brute over n = %d summed %d partition pairs", n, len(terms))
    return scaled_sum(terms)


def gsum_single(xis: SetLike, etas: SetLike, zeta: complex, c: CouplingLike, max_n: int = MAX_PARTITION_SIZE) -> complex:
    """Same sum reduced to partitions of xi only, with a single K_n({xi_I - c, xi_II + c}|eta)."""
    return gsum_single_scaled(xis, etas, zeta, c, max_n).value


def gsum_single_scaled(xis: SetLike, etas: SetLike, zeta: complex, c: CouplingLike, max_n: int = MAX_PARTITION_SIZE) -> ScaledSum:
    coupling = as_coupling(c)
    xi, eta = _prepare(xis, etas, max_n)
    terms = []
    for mask in subset_masks(len(xi)):
        xi_first, xi_second = PartitionPair.split(xi, mask)
        merged = VarSet(xi_first.shifted(-coupling.c).elems + xi_second.shifted(coupling.c).elems)
        terms.append(
            zeta ** len(xi_second)
            * (-1) ** len(xi_first)
            * prod_kernel(Kernel.F, xi_first, xi_second, coupling)
            * prod_kernel(Kernel.F, eta, xi_first, coupling)
            * dwpf(merged, eta, coupling)
        )
    return scaled_sum(terms)


def zeta_power(zeta: complex, exponent: complex) -> tuple[complex, BranchNote | None]:
    """Principal branch of zeta**exponent, with a note when zeta is far enough from 1 for the branch to matter."""
    zeta = complex(zeta)
    if zeta == 0:
        raise AlgebraException("zeta must be nonzero")
    value = cmath.exp(complex(exponent) * cmath.log(zeta))
    note = None
    if abs(zeta - 1) > BRANCH_SAFE_RADIUS:
        note = BranchNote(zeta, complex(exponent), f"principal branch used for zeta = {zeta} outside |zeta - 1| <= {BRANCH_SAFE_RADIUS}")
        logger.warning(note.message)
    return value, note


def _closed_core(xi: VarSet, eta: VarSet, c: CouplingLike) -> complex:
    return (-1) ** len(xi) * prod_kernel(Kernel.T, xi, eta, c) * prod_kernel(Kernel.H, eta, eta, c) * prod_kernel(Kernel.H, xi, xi, c)


def gsum_first_order_with_note(xis: SetLike, etas: SetLike, zeta: complex, c: CouplingLike) -> tuple[complex, BranchNote | None]:
    coupling = as_coupling(c)
    xi, eta = _prepare(xis, etas, math.inf)
    exponent = (sum(eta.elems) - sum(xi.elems)) / coupling.c
    power, note = zeta_power(zeta, exponent)
    return power * _closed_core(xi, eta, coupling), note


def gsum_first_order(xis: SetLike, etas: SetLike, zeta: complex, c: CouplingLike) -> complex:
    """
    (-1)^n zeta^((sum eta - sum xi)/c) t(xi, eta) h(eta, eta) h(xi, xi)

    Exact at zeta = 1 and correct to first order in zeta - 1.
    """
    return gsum_first_order_with_note(xis, etas, zeta, c)[0]


def gtilde(xis: SetLike, etas: SetLike, gamma: complex, c: CouplingLike, mode: GtildeMode | str = GtildeMode.CLOSED, max_n: int = MAX_PARTITION_SIZE) -> complex:
    """
    Partition sum weighted by gamma + n_II instead of zeta^n_II

    Parameters
    ----------
    xis : SetLike
        The set xi
    etas : SetLike
        The set eta
    gamma : complex
        Shift of the weight
    c : Coupling
        The coupling constant
    mode : GtildeMode
        brute sums all partition pairs, closed uses the factorized form

    Returns
    -------
    complex
        The weighted partition sum
    """
    mode = GtildeMode(mode)
    coupling = as_coupling(c)
    xi, eta = _prepare(xis, etas, max_n)

    if mode is GtildeMode.BRUTE:
        return gtilde_brute_scaled(xi, eta, gamma, coupling, max_n).value

    # sum of g^-1(eta_i, xi_i): only the sums of eta and xi enter, so pairing order is irrelevant
    inverse_g_sum = complex_fsum((e - x) / coupling.c for e, x in zip(eta, xi))
    return _closed_core(xi, eta, coupling) * (gamma + inverse_g_sum)


def gtilde_brute_scaled(xis: SetLike, etas: SetLike, gamma: complex, c: CouplingLike, max_n: int = MAX_PARTITION_SIZE) -> ScaledSum:
    """The weighted partition sum over all partition pairs, with the sum of the magnitudes of its terms."""
    coupling = as_coupling(c)
    xi, eta = _prepare(xis, etas, max_n)
    return scaled_sum((gamma + pair.n_second) * _pair_summand(pair, xi, eta, coupling) for pair in partition_pairs(len(xi)))
