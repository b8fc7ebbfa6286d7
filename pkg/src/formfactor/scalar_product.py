"""
Scalar product of a twisted on-shell state with a standard on-shell state

The determinant representation holds up to terms of order (kappa3/kappa1 - 1)^2; it is exact at the identity
twist, where it vanishes for two different states, and its first kappa derivatives there give the off-diagonal
form factors.
"""

import logging
from dataclasses import dataclass

import numpy as np

from algebra.kernel import Kernel, prod_kernel
from algebra.linalg import det_with_cond
from algebra.psum import BranchNote, zeta_power
from bethe.model import Twist
from bethe.state import BetheState
from formfactor.diagonal import standard_state
from formfactor.formfactor_exception import StateMismatch
from formfactor.offdiagonal import merged_arguments, n_hat_u, n_hat_v, omega, sets_prefactor

logger = logging.getLogger(name=__name__)


@dataclass(frozen=True)
class TwistedScalarProduct:
    value: complex
    cond: float
    twist: Twist
    notes: tuple[BranchNote, ...] = ()


def twisted_pair(stateC: BetheState, stateB: BetheState, twist: Twist | None = None) -> tuple[BetheState, BetheState, Twist]:
    """
    Normalize the inputs: stateB gets its twist absorbed, stateC keeps its twist relative to stateB's model.

    An explicit twist overrides the one recorded on stateC.
    """
    stateB = standard_state(stateB)
    if not stateC.on_shell:
        logger.warning("twisted state %s is not flagged on shell (residual %.3e)", stateC.label or "?", stateC.residual_norm)
    if stateC.model != stateB.model:
        raise StateMismatch("twisted and standard states must share the untwisted model")
    if stateC.sector != stateB.sector:
        raise StateMismatch(f"states in different sectors {stateC.sector} and {stateB.sector}")
    return stateC, stateB, twist or stateC.twist


def twist_power(twist: Twist, w: complex, c: complex, inverse: bool = False) -> tuple[complex, BranchNote | None]:
    """(kappa3/kappa1)^(w/c), or (kappa1/kappa3)^(w/c) when inverse, on the principal branch."""
    ratio = twist.kappa3 / twist.kappa1
    return zeta_power(1 / ratio if inverse else ratio, w / c)


def scalar_product_matrix(stateC: BetheState, stateB: BetheState, twist: Twist | None = None) -> tuple[np.ndarray, tuple[BranchNote, ...]]:
    """
    The matrix N of the twisted scalar product

    Parameters
    ----------
    stateC : BetheState
        On-shell state of the model twisted by kappa (the twist kept on the state, not absorbed)
    stateB : BetheState
        On-shell state at the identity twist
    twist : Twist, optional
        kappa; defaults to stateC.twist

    Returns
    -------
    tuple[np.ndarray, tuple[BranchNote, ...]]
        The (a+b) x (a+b) matrix and any branch notes raised by the twist powers
    """
    stateC, stateB, twist = twisted_pair(stateC, stateB, twist)
    model = stateB.model
    c = model.coupling
    a, b = stateB.a, stateB.b
    w = merged_arguments(stateC, stateB)
    matrix = np.zeros((a + b, a + b), dtype=complex)
    notes: list[BranchNote] = []

    for k, wk in enumerate(w):
        c1 = twist.kappa1 * model.eval_r(1, wk)
        r3 = model.eval_r(3, wk)
        c1_prime, r3_prime = twist.kappa1 * model.eval_dr(1, wk), model.eval_dr(3, wk)
        for j in range(a):
            matrix[j, k] = n_hat_u(j, wk, stateC.u, stateC.v, c1, twist.kappa2, c, c1_prime)
        for j in range(b):
            matrix[a + j, k] = n_hat_v(j, wk, stateB.u, stateB.v, 1, r3, c, r3_prime)

    # off-diagonal blocks pick up twist powers
    for k in range(b):
        power, note = twist_power(twist, stateC.v[k], c.c)
        matrix[:a, a + k] *= power
        if note is not None:
            notes.append(note)
    for k in range(a):
        power, note = twist_power(twist, -stateB.u[k], c.c)
        matrix[a:, k] *= power
        if note is not None:
            notes.append(note)

    return matrix, tuple(notes)


def scalar_product_with_cond(stateC: BetheState, stateB: BetheState, twist: Twist | None = None) -> TwistedScalarProduct:
    stateC, stateB, twist = twisted_pair(stateC, stateB, twist)
    matrix, notes = scalar_product_matrix(stateC, stateB, twist)
    det = det_with_cond(matrix, label="scalar product N")
    value = sets_prefactor(stateC, stateB) * det.value
    logger.debug("twisted scalar product %s|%s at %s: %s", stateC.label, stateB.label, twist.kappas, value)
    return TwistedScalarProduct(value, det.cond, twist, notes)


def scalar_product_twisted(stateC: BetheState, stateB: BetheState, twist: Twist | None = None) -> complex:
    """t(v^C, u^B) Delta'(u^C) Delta'(v^B) Delta(u^B) Delta(v^C) det N, correct to first order in kappa3/kappa1 - 1."""
    return scalar_product_with_cond(stateC, stateB, twist).value


def modified_row_p(stateC: BetheState, stateB: BetheState, twist: Twist | None = None, p: int | None = None) -> np.ndarray:
    """
    Row p of N after adding the other rows weighted by Omega_j / Omega_p

    The row vanishes identically at the identity twist; its derivative in kappa_s there is Omega_p^-1 times
    the replaced row of the off-diagonal form-factor matrix N^(s).
    """
    stateC, stateB, twist = twisted_pair(stateC, stateB, twist)
    c = stateB.model.coupling
    vector, best = omega(stateC, stateB)
    p = best if p is None else p
    k1, k2, k3 = twist.kappas
    scale = c.c / vector[p]

    row = []
    for uk in stateB.u:
        weight = prod_kernel(Kernel.H, stateC.v, [uk], c) * prod_kernel(Kernel.H, [uk], stateB.u, c)
        ratio = prod_kernel(Kernel.F, stateB.v, [uk], c) / prod_kernel(Kernel.F, stateC.v, [uk], c)
        rho, _ = twist_power(twist, uk, c.c, inverse=True)
        row.append(scale * weight * (ratio * (1 - rho) + rho - k2 / k1))
    for vk in stateC.v:
        weight = prod_kernel(Kernel.H, stateC.v, [vk], c) * prod_kernel(Kernel.H, [vk], stateB.u, c)
        ratio = prod_kernel(Kernel.F, [vk], stateC.u, c) / prod_kernel(Kernel.F, [vk], stateB.u, c)
        sigma, _ = twist_power(twist, vk, c.c)
        row.append(scale * weight * (ratio * (k2 / k1 * sigma - k2 / k3) + 1 - k2 / k1 * sigma))
    return np.array(row, dtype=complex)
