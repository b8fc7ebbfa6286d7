"""Form factors of T_ss(z) between two different on-shell states."""

import logging
from dataclasses import dataclass

import numpy as np

from algebra.kernel import Coupling, DeltaKind, Kernel, VarSet, delta_prod, prod_inverse_g, prod_kernel
from algebra.linalg import det_with_cond
from bethe.model import ModelSpec
from bethe.state import BetheState
from formfactor.diagonal import check_operator_index, standard_state
from formfactor.eigenvalue import tau_of
from formfactor.formfactor_exception import AllZero, StateMismatch
from formfactor.result import FormFactorKind, FormFactorResult

logger = logging.getLogger(name=__name__)

# Roots of the two states closer than this, relative to max(1, |c|), are the same root
SHARED_ROOT_REL = 1e-9
TINY = 1e-300


@dataclass(frozen=True)
class OffDiagonalFactor:
    """The z-independent part of the off-diagonal form factor: form factor = (eigenvalue_C - eigenvalue_B) * value."""

    value: complex
    cond: float
    p: int
    scale: float


def matched_pair(stateC: BetheState, stateB: BetheState) -> tuple[BetheState, BetheState]:
    stateC, stateB = standard_state(stateC), standard_state(stateB)
    if stateC.model != stateB.model:
        raise StateMismatch("states belong to different models")
    if stateC.sector != stateB.sector:
        raise StateMismatch(f"states in different sectors {stateC.sector} and {stateB.sector}")
    return stateC, stateB


def omega(stateC: BetheState, stateB: BetheState) -> tuple[np.ndarray, int]:
    """
    The left null vector of the scalar-product matrix at the identity twist

    Returns
    -------
    tuple[np.ndarray, int]
        Omega of length a + b and the 0-based index p maximizing |Omega_p|
    """
    uC, uB, vC, vB = stateC.u.array, stateB.u.array, stateC.v.array, stateB.v.array
    values = []
    for k in range(len(uC)):
        values.append(np.prod(uC[k] - uB) / np.prod(np.delete(uC[k] - uC, k)))
    for k in range(len(vB)):
        values.append(np.prod(vB[k] - vC) / np.prod(np.delete(vB[k] - vB, k)))
    vector = np.array(values, dtype=complex)

    eps = stateC.model.coupling.eps_dist
    max_abs = float(np.max(np.abs(vector))) if vector.size else 0.0
    if max_abs < eps:
        raise AllZero(max_abs)
    return vector, int(np.argmax(np.abs(vector)))


def _product_derivative(factors: list[tuple[complex, complex]]) -> tuple[complex, float]:
    """w-derivative of a product of factors given as (value, derivative) pairs, with the sum of the term magnitudes."""
    total, magnitude = 0j, 0.0
    for i, (_, slope) in enumerate(factors):
        term = complex(slope)
        for k, (value, _) in enumerate(factors):
            if k != i:
                term *= value
        total += term
        magnitude += abs(term)
    return total, magnitude


def _shared(w: complex, root: complex, c: Coupling) -> bool:
    return abs(w - root) < SHARED_ROOT_REL * max(1.0, abs(c.c))


def n_hat_u_terms(j: int, w: complex, u: VarSet, v: VarSet, c1: complex, c2: complex, c: Coupling, c1_prime: complex = 0j) -> tuple[complex, float]:
    """
    c g^-1(w, u) g^-1(v, w) times the u_j derivative of the eigenvalue at w, with the size of its terms

    Written with the pole at w = u_j cancelled: c/(w - u_j) B(w), B(w) = (-1)^a c1 h(u_j', w) g^-1(v, w) + c2 h(w, u_j') h(v, w).
    B vanishes at w = u_j on shell, so a root shared with the other state gives the limit c B'(u_j); c1_prime is dc1/dw.
    """
    cc = c.c
    others = u.without(j)
    sign = (-1) ** len(u)
    if _shared(w, u[j], c):
        first = [(c1, c1_prime)] + [((x - w + cc) / cc, -1 / cc) for x in others] + [((y - w) / cc, -1 / cc) for y in v]
        second = [((w - x + cc) / cc, 1 / cc) for x in others] + [((y - w + cc) / cc, -1 / cc) for y in v]
        d_first, m_first = _product_derivative(first)
        d_second, m_second = _product_derivative(second)
        return cc * (sign * d_first + c2 * d_second), abs(cc) * (m_first + abs(c2) * m_second)
    first = sign * c1 * prod_kernel(Kernel.H, others, [w], c) * prod_inverse_g(v, [w], c)
    second = c2 * prod_kernel(Kernel.H, [w], others, c) * prod_kernel(Kernel.H, v, [w], c)
    pole = cc / (w - u[j])
    return pole * (first + second), abs(pole) * (abs(first) + abs(second))


def n_hat_u(j: int, w: complex, u: VarSet, v: VarSet, c1: complex, c2: complex, c: Coupling, c1_prime: complex = 0j) -> complex:
    return n_hat_u_terms(j, w, u, v, c1, c2, c, c1_prime)[0]


def n_hat_v_terms(j: int, w: complex, u: VarSet, v: VarSet, c2: complex, c3: complex, c: Coupling, c3_prime: complex = 0j) -> tuple[complex, float]:
    """
    -c g^-1(v, w) g^-1(w, u) times the v_j derivative of the eigenvalue at w, pole at w = v_j cancelled

    -c/(w - v_j) C(w), C(w) = c2 h(w, u) h(v_j', w) + (-1)^b c3 h(w, v_j') g^-1(w, u); a shared v root gives -c C'(v_j).
    """
    cc = c.c
    others = v.without(j)
    sign = (-1) ** len(v)
    if _shared(w, v[j], c):
        first = [((w - x + cc) / cc, 1 / cc) for x in u] + [((x - w + cc) / cc, -1 / cc) for x in others]
        second = [(c3, c3_prime)] + [((w - x + cc) / cc, 1 / cc) for x in others] + [((w - y) / cc, 1 / cc) for y in u]
        d_first, m_first = _product_derivative(first)
        d_second, m_second = _product_derivative(second)
        return -cc * (c2 * d_first + sign * d_second), abs(cc) * (abs(c2) * m_first + m_second)
    first = c2 * prod_kernel(Kernel.H, [w], u, c) * prod_kernel(Kernel.H, others, [w], c)
    second = sign * c3 * prod_kernel(Kernel.H, [w], others, c) * prod_inverse_g([w], u, c)
    pole = cc / (w - v[j])
    return -pole * (first + second), abs(pole) * (abs(first) + abs(second))


def n_hat_v(j: int, w: complex, u: VarSet, v: VarSet, c2: complex, c3: complex, c: Coupling, c3_prime: complex = 0j) -> complex:
    return n_hat_v_terms(j, w, u, v, c2, c3, c, c3_prime)[0]


def merged_arguments(stateC: BetheState, stateB: BetheState) -> np.ndarray:
    """w_k = u^B_k for k <= a, then v^C_k."""
    return np.concatenate([stateB.u.array, stateC.v.array])


def y_vector(s: int, stateC: BetheState, stateB: BetheState) -> np.ndarray:
    check_operator_index(s)
    c = stateC.model.coupling
    d1, d2, d3 = (1 if s == k else 0 for k in (1, 2, 3))
    values = []
    for uk in stateB.u:
        ratio = prod_kernel(Kernel.F, stateB.v, [uk], c) / prod_kernel(Kernel.F, stateC.v, [uk], c)
        values.append(c.c * (d1 - d2) + (d1 - d3) * uk * (1 - ratio))
    for vk in stateC.v:
        ratio = prod_kernel(Kernel.F, [vk], stateC.u, c) / prod_kernel(Kernel.F, [vk], stateB.u, c)
        values.append(c.c * (d3 - d2) + (d1 - d3) * (vk + c.c) * (1 - ratio))
    return np.array(values, dtype=complex)


def row_p(s: int, stateC: BetheState, stateB: BetheState) -> np.ndarray:
    """h(v^C, w_k) h(w_k, u^B) Y^(s)_k"""
    c = stateC.model.coupling
    weights = [prod_kernel(Kernel.H, stateC.v, [w], c) * prod_kernel(Kernel.H, [w], stateB.u, c) for w in merged_arguments(stateC, stateB)]
    return np.array(weights, dtype=complex) * y_vector(s, stateC, stateB)


def standard_rows_with_scale(stateC: BetheState, stateB: BetheState, model: ModelSpec) -> tuple[np.ndarray, np.ndarray]:
    """All a + b rows of N at the identity twist, before the p-th row is replaced, and the size of each entry's terms."""
    c = model.coupling
    a, b = stateC.a, stateC.b
    w = merged_arguments(stateC, stateB)
    matrix = np.zeros((a + b, a + b), dtype=complex)
    scales = np.zeros((a + b, a + b))
    for k, wk in enumerate(w):
        r1, r3 = model.eval_r(1, wk), model.eval_r(3, wk)
        r1_prime, r3_prime = model.eval_dr(1, wk), model.eval_dr(3, wk)
        for j in range(a):
            matrix[j, k], scales[j, k] = n_hat_u_terms(j, wk, stateC.u, stateC.v, r1, 1, c, r1_prime)
        for j in range(b):
            matrix[a + j, k], scales[a + j, k] = n_hat_v_terms(j, wk, stateB.u, stateB.v, 1, r3, c, r3_prime)
    return matrix, scales


def standard_rows(stateC: BetheState, stateB: BetheState, model: ModelSpec) -> np.ndarray:
    return standard_rows_with_scale(stateC, stateB, model)[0]


def null_residual(stateC: BetheState, stateB: BetheState) -> float:
    """
    Largest |(Omega N)_k| relative to sum_j |Omega_j| times the size of the terms of N_jk

    Entries of N vanish on shell for a + b = 1, so the norm of N is no scale for the residual.
    """
    matrix, scales = standard_rows_with_scale(stateC, stateB, stateB.model)
    vector, _ = omega(stateC, stateB)
    residual = np.abs(vector @ matrix)
    reference = np.abs(vector) @ scales
    return float(np.max(residual / np.maximum(reference, TINY), initial=0.0))


def n_matrix_offdiag(s: int, stateC: BetheState, stateB: BetheState, p: int) -> np.ndarray:
    """
    The matrix N^(s) of the off-diagonal form factor

    Parameters
    ----------
    s : int
        Operator index
    stateC, stateB : BetheState
        Dual and right on-shell states of one sector
    p : int
        0-based index of the replaced row; Omega_p must be nonzero

    Returns
    -------
    np.ndarray
        Square matrix of size a + b
    """
    check_operator_index(s)
    stateC, stateB = matched_pair(stateC, stateB)
    matrix = standard_rows(stateC, stateB, stateC.model)
    matrix[p] = row_p(s, stateC, stateB)
    return matrix


def sets_prefactor(stateC: BetheState, stateB: BetheState) -> complex:
    """t(v^C, u^B) Delta'(u^C) Delta(u^B) Delta'(v^C) Delta(v^B)"""
    c = stateC.model.coupling
    return (
        prod_kernel(Kernel.T, stateC.v, stateB.u, c)
        * delta_prod(DeltaKind.PRIMED, stateC.u, c)
        * delta_prod(DeltaKind.PLAIN, stateB.u, c)
        * delta_prod(DeltaKind.PRIMED, stateC.v, c)
        * delta_prod(DeltaKind.PLAIN, stateB.v, c)
    )


def offdiagonal_factor(s: int, stateC: BetheState, stateB: BetheState, p: int | None = None) -> OffDiagonalFactor:
    """Omega_p^-1 times the sets prefactor times det N^(s); p defaults to argmax |Omega|."""
    stateC, stateB = matched_pair(stateC, stateB)
    vector, best = omega(stateC, stateB)
    p = best if p is None else p
    if abs(vector[p]) < stateC.model.coupling.eps_dist:
        raise AllZero(float(abs(vector[p])))

    matrix = n_matrix_offdiag(s, stateC, stateB, p)
    det = det_with_cond(matrix, label=f"N^({s})")
    prefactor = sets_prefactor(stateC, stateB) / vector[p]
    logger.debug("off-diagonal factor s=%d p=%d cond %.3e", s, p, det.cond)
    return OffDiagonalFactor(prefactor * det.value, det.cond, p, float(abs(prefactor) * np.max(np.abs(matrix), initial=1.0) ** matrix.shape[0]))


def ff_offdiagonal(s: int, z: complex, stateC: BetheState, stateB: BetheState, p: int | None = None) -> FormFactorResult:
    """(tau_C(z) - tau_B(z)) Omega_p^-1 t(v^C, u^B) Delta'(u^C) Delta(u^B) Delta'(v^C) Delta(v^B) det N^(s)"""
    stateC, stateB = matched_pair(stateC, stateB)
    factor = offdiagonal_factor(s, stateC, stateB, p)
    difference = tau_of(stateC, z) - tau_of(stateB, z)
    return FormFactorResult(
        value=difference * factor.value,
        s=s,
        z=complex(z),
        a=stateC.a,
        b=stateC.b,
        cond=factor.cond,
        kind=FormFactorKind.OFFDIAGONAL,
        p=factor.p,
        states=(stateC.label, stateB.label),
        scale=abs(difference) * factor.scale,
    )
