"""Sector transfer matrices, eigenvector matching of Bethe states and normalization-free matrix-element ratios."""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from algebra.algebra_exception import PoleError
from bethe.model import Twist, XXXChain
from bethe.state import BetheState
from formfactor.eigenvalue import tau
from oracle.lattice import L_MAX, Monodromy, SectorBasis, local_op, monodromy_of
from oracle.oracle_exception import Degenerate, NoMatch, OracleException

logger = logging.getLogger(name=__name__)

MIN_SAMPLES = 3
MAX_SAMPLES = 8
TOL_MATCH_REL = 1e-8
# Sample points keep at least this distance (times max(1, |c|)) from inhomogeneities and roots
SAMPLE_CLEARANCE = 0.2


@dataclass(frozen=True)
class MatchedState:
    """A Bethe state paired with the bilinear left and right eigenvectors of its sector transfer matrix."""

    state: BetheState
    chain: XXXChain
    twist: Twist
    basis: SectorBasis
    monodromy: Monodromy
    left: np.ndarray
    right: np.ndarray
    samples: tuple[complex, ...]

    @property
    def overlap(self) -> complex:
        return complex(self.left @ self.right)


def unwrap(state: BetheState) -> tuple[XXXChain, Twist]:
    """The chain underneath a (possibly twisted) state and the total twist of its transfer matrix."""
    base, model_twist = state.model.split_twist()
    if not isinstance(base, XXXChain):
        raise OracleException(f"the lattice oracle needs an XXXChain, got {type(base).__name__}")
    return base, model_twist.compose(state.twist)


def sector_transfer(monodromy: Monodromy, w: complex, twist: Twist, basis: SectorBasis, normalized: bool = True) -> np.ndarray:
    """
    sum_s kappa_s T'_ss(w), divided by lambda2(w) when normalized, restricted to a weight sector

    Parameters
    ----------
    monodromy : Monodromy
        The chain's monodromy matrix
    w : complex
        Spectral parameter
    twist : Twist
        Diagonal twist kappa
    basis : SectorBasis
        The weight sector
    normalized : bool
        Divide by lambda2(w), which vanishes at the inhomogeneities

    Returns
    -------
    np.ndarray
        Square matrix of the sector dimension
    """
    blocks = monodromy.at(w)
    transfer = sum(k * blocks[s, s] for s, k in enumerate(twist.kappas))
    matrix = basis.restrict(transfer)
    if not normalized:
        return matrix
    for x in monodromy.xi:
        if abs(w - x) < monodromy.coupling.eps_pole:
            raise PoleError("lambda2", w, x)
    return matrix / monodromy.lambda2(w)


def hat_operator(s: int, z: complex, matched: MatchedState) -> np.ndarray:
    """kappa_s T'_ss(z) / (kappa_2 lambda2(z)) in the sector: T_ss of the model with the twist absorbed."""
    kappa = matched.twist
    block = matched.monodromy.at(z)[s - 1, s - 1]
    return kappa.kappa(s) * matched.basis.restrict(block) / (kappa.kappa2 * matched.monodromy.lambda2(z))


def choose_samples(chain: XXXChain, state: BetheState, count: int = MAX_SAMPLES, rng_seed: int = 0) -> tuple[complex, ...]:
    """Random points around the chain, kept away from the inhomogeneities and the roots."""
    rng = np.random.default_rng(rng_seed)
    c = chain.coupling
    avoid = np.concatenate([chain.xi.array, state.roots])
    radius = 1.0 + float(np.max(np.abs(avoid - chain.center))) if avoid.size else 1.0
    clearance = SAMPLE_CLEARANCE * max(1.0, abs(c.c))
    samples: list[complex] = []
    while len(samples) < count:
        w = chain.center + radius * complex(rng.normal(), rng.normal())
        if np.all(np.abs(avoid - w) > clearance):
            samples.append(w)
    logger.debug("samples for %s: %s", state.label or "?", samples)
    return tuple(samples)


def _matches(value: complex, expected: complex) -> bool:
    return abs(value - expected) < TOL_MATCH_REL * (1 + abs(expected))


def match_state(state: BetheState, samples: tuple[complex, ...] | None = None, rng_seed: int = 0, L_max: int = L_MAX) -> MatchedState:
    """
    Find the eigenvector pair of the sector transfer matrix whose eigenvalue follows tau(w|u, v) at every sample point

    At least MIN_SAMPLES samples are used; more are consumed while several candidates survive.
    """
    chain, twist = unwrap(state)
    basis = SectorBasis(chain.L, state.a, state.b)
    monodromy = monodromy_of(chain, L_max)
    samples = samples or choose_samples(chain, state, MAX_SAMPLES, rng_seed)

    def expected(w: complex) -> complex:
        return tau(w, state.u, state.v, chain, twist)

    first = sector_transfer(monodromy, samples[0], twist, basis)
    eigenvalues, vl, vr = scipy.linalg.eig(first, left=True, right=True)
    # bilinear pairing: eig returns vl with vl^H A = lambda vl^H
    lefts, rights = vl.conj(), vr
    candidates = [i for i, value in enumerate(eigenvalues) if _matches(value, expected(samples[0]))]

    used = 1
    for w in samples[1:]:
        if used >= MIN_SAMPLES and len(candidates) <= 1:
            break
        transfer = sector_transfer(monodromy, w, twist, basis)
        target = expected(w)
        candidates = [i for i in candidates if _matches((lefts[:, i] @ transfer @ rights[:, i]) / (lefts[:, i] @ rights[:, i]), target)]
        used += 1

    if not candidates:
        raise NoMatch(state.label, used)
    if len(candidates) > 1:
        raise Degenerate(state.label, len(candidates))

    index = candidates[0]
    logger.info("state %s matched eigenvalue %d of sector (%d, %d) after %d sample points", state.label or "?", index, state.a, state.b, used)
    return MatchedState(state, chain, twist, basis, monodromy, lefts[:, index], rights[:, index], tuple(samples[:used]))


def biorthogonality_defect(matrix: np.ndarray) -> float:
    """Largest off-diagonal |<L_i|R_j>| relative to the diagonal ones."""
    _, vl, vr = scipy.linalg.eig(matrix, left=True, right=True)
    overlaps = np.abs(vl.conj().T @ vr)
    diagonal = np.diag(overlaps).copy()
    np.fill_diagonal(overlaps, 0)
    return float(np.max(overlaps / np.sqrt(np.outer(diagonal, diagonal)))) if matrix.shape[0] > 1 else 0.0


def _as_matched(value: BetheState | MatchedState) -> MatchedState:
    return value if isinstance(value, MatchedState) else match_state(value)


def _check_pair(mC: MatchedState, mB: MatchedState) -> None:
    if mC.chain != mB.chain or mC.twist != mB.twist:
        raise OracleException("matrix elements need both states on the same chain and twist")


def ratio_diag(s: int, z: complex, state: BetheState | MatchedState) -> complex:
    """<L|T_ss(z)|R> / <L|R>"""
    matched = _as_matched(state)
    return complex(matched.left @ hat_operator(s, z, matched) @ matched.right / matched.overlap)


def ratio_offdiag(s: int, s2: int, z: complex, z2: complex, stateC: BetheState | MatchedState, stateB: BetheState | MatchedState) -> complex:
    """
    <L_C|T_ss(z)|R_B> <L_B|T_s2s2(z2)|R_C> / (<L_C|R_C> <L_B|R_B>)

    Eigenvector scalings cancel; states in different sectors give zero.
    """
    if _sector(stateC) != _sector(stateB):
        return 0j
    mC, mB = _as_matched(stateC), _as_matched(stateB)
    _check_pair(mC, mB)
    forward = mC.left @ hat_operator(s, z, mC) @ mB.right
    backward = mB.left @ hat_operator(s2, z2, mB) @ mC.right
    return complex(forward * backward / (mC.overlap * mB.overlap))


def ratio_local_diag(s: int, m: int, state: BetheState | MatchedState) -> complex:
    """<L|E^ss_m|R> / <L|R>"""
    matched = _as_matched(state)
    return complex(matched.left @ local_op(s, m, matched.basis) @ matched.right / matched.overlap)


def ratio_local_offdiag(s: int, s2: int, m: int, m2: int, stateC: BetheState | MatchedState, stateB: BetheState | MatchedState) -> complex:
    if _sector(stateC) != _sector(stateB):
        return 0j
    mC, mB = _as_matched(stateC), _as_matched(stateB)
    _check_pair(mC, mB)
    forward = mC.left @ local_op(s, m, mC.basis) @ mB.right
    backward = mB.left @ local_op(s2, m2, mB.basis) @ mC.right
    return complex(forward * backward / (mC.overlap * mB.overlap))


def _sector(value: BetheState | MatchedState) -> tuple[int, int]:
    return value.state.sector if isinstance(value, MatchedState) else value.sector
