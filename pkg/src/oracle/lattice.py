"""Dense monodromy matrix of the inhomogeneous SU(3) chain on small lattices."""

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from algebra.algebra_exception import SizeLimit, SizeMismatch
from algebra.kernel import Coupling, CouplingLike, VarSet, as_coupling
from bethe.bethe_exception import ConstructionError
from bethe.model import XXXChain
from formfactor.formfactor_exception import SiteOutOfRange

logger = logging.getLogger(name=__name__)

# Largest chain the dense construction accepts: 3^7 columns for the auxiliary times quantum space
L_MAX = 6


@dataclass(frozen=True)
class SectorBasis:
    """
    Occupancy strings over {1, 2, 3} with counts (L - a, a - b, b)

    Symbols are stored 0-based; site 1 is the most significant digit of the full-space index.
    """

    L: int
    a: int
    b: int
    states: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    indices: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 0 <= self.b <= self.a <= self.L:
            raise ConstructionError(f"invalid weight sector ({self.a}, {self.b}) for L = {self.L}")
        counts = self.occupation
        states = tuple(s for s in itertools.product(range(3), repeat=self.L) if tuple(s.count(k) for k in range(3)) == counts)
        object.__setattr__(self, "states", states)
        indices = np.array([np.ravel_multi_index(s, (3,) * self.L) for s in states], dtype=int) if self.L else np.zeros(1, dtype=int)
        object.__setattr__(self, "indices", indices)

    @property
    def occupation(self) -> tuple[int, int, int]:
        return (self.L - self.a, self.a - self.b, self.b)

    @property
    def dim(self) -> int:
        return len(self.states)

    @property
    def expected_dim(self) -> int:
        n1, n2, n3 = self.occupation
        return math.factorial(self.L) // (math.factorial(n1) * math.factorial(n2) * math.factorial(n3))

    def restrict(self, operator: np.ndarray) -> np.ndarray:
        return operator[np.ix_(self.indices, self.indices)]

    def leakage(self, operator: np.ndarray) -> float:
        """Largest entry mapping the sector outside itself."""
        outside = np.setdiff1d(np.arange(operator.shape[0]), self.indices)
        if outside.size == 0:
            return 0.0
        return float(np.max(np.abs(operator[np.ix_(outside, self.indices)])))


def sector_of(L: int, a: int, b: int) -> SectorBasis:
    return SectorBasis(L, a, b)


@dataclass(frozen=True)
class Monodromy:
    """
    T'(w) = L_L(w) ... L_1(w) with L_n(w) = (w - xi_n) I + c P on auxiliary space times site n

    Evaluation returns an array of shape (3, 3, 3^L, 3^L) whose [i, j] block is the operator T'_ij(w).
    """

    xi: VarSet
    coupling: Coupling

    @property
    def L(self) -> int:
        return len(self.xi)

    @property
    def dim(self) -> int:
        return 3**self.L

    def at(self, w: complex) -> np.ndarray:
        n_axes = self.L + 1
        total = 3 * self.dim
        psi = np.eye(total, dtype=complex).reshape((3,) * n_axes + (total,))
        # L_1 acts first
        for n, xi_n in enumerate(self.xi, start=1):
            psi = (w - xi_n) * psi + self.coupling.c * np.swapaxes(psi, 0, n)
        return psi.reshape(total, total).reshape(3, self.dim, 3, self.dim).transpose(0, 2, 1, 3)

    def entry(self, i: int, j: int, w: complex) -> np.ndarray:
        """T'_ij(w) with 1-based auxiliary indices."""
        return self.at(w)[i - 1, j - 1]

    def lambda2(self, w: complex) -> complex:
        return complex(np.prod([w - x for x in self.xi]))

    def vacuum_eigenvalue(self, j: int, w: complex) -> complex:
        shift = self.coupling.c if j == 1 else 0
        return complex(np.prod([w - x + shift for x in self.xi]))


def build_monodromy(L: int, xi: VarSet | list[complex], c: CouplingLike, L_max: int = L_MAX) -> Monodromy:
    """
    The monodromy matrix of an L-site chain

    Parameters
    ----------
    L : int
        Number of sites
    xi : VarSet
        Inhomogeneities, pairwise distinct
    c : Coupling
        The coupling constant
    L_max : int
        Size limit of the dense construction

    Returns
    -------
    Monodromy
        Evaluable at any complex spectral parameter
    """
    if L > L_max:
        raise SizeLimit(f"dense monodromy limited to L <= {L_max}, got {L}")
    xi = xi if isinstance(xi, VarSet) else VarSet(tuple(xi))
    if len(xi) != L:
        raise SizeMismatch(f"{len(xi)} inhomogeneities for L = {L}")
    chain = XXXChain(xi, as_coupling(c))
    logger.debug("monodromy for L=%d, c=%s", L, chain.coupling.c)
    return Monodromy(chain.xi, chain.coupling)


def monodromy_of(chain: XXXChain, L_max: int = L_MAX) -> Monodromy:
    return build_monodromy(chain.L, chain.xi, chain.coupling, L_max)


def r_matrix(x: complex, y: complex, c: complex) -> np.ndarray:
    """R'(x, y) = (x - y) I + c P on two auxiliary spaces."""
    perm = np.zeros((3, 3, 3, 3), dtype=complex)
    for i, j in itertools.product(range(3), repeat=2):
        perm[i, j, j, i] = 1
    return (x - y) * np.eye(9, dtype=complex) + c * perm.reshape(9, 9)


def rtt_defect(monodromy: Monodromy, w1: complex, w2: complex) -> float:
    """max |R12 T1 T2 - T2 T1 R12| relative to the largest entry of either product."""
    d = monodromy.dim
    eye3 = np.eye(3, dtype=complex)
    # [i1, i2, alpha, j1, j2, beta]
    t1 = np.einsum("ijab,kl->ikajlb", monodromy.at(w1), eye3).reshape(9 * d, 9 * d)
    t2 = np.einsum("klab,ij->ikajlb", monodromy.at(w2), eye3).reshape(9 * d, 9 * d)
    r12 = np.kron(r_matrix(w1, w2, monodromy.coupling.c), np.eye(d, dtype=complex))
    left = r12 @ t1 @ t2
    right = t2 @ t1 @ r12
    scale = max(float(np.max(np.abs(left))), float(np.max(np.abs(right))), 1.0)
    return float(np.max(np.abs(left - right))) / scale


def local_op(s: int, m: int, basis: SectorBasis) -> np.ndarray:
    """E^ss at site m restricted to the sector: diagonal, one on strings carrying symbol s at site m."""
    if not 1 <= m <= basis.L:
        raise SiteOutOfRange(m, basis.L)
    return np.diag([1.0 + 0j if state[m - 1] == s - 1 else 0j for state in basis.states])
