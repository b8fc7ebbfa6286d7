"""Logarithmic form of the (twisted) nested Bethe equations and their Jacobian."""

import cmath
import logging
import math

import numpy as np

from algebra.kernel import Kernel, eval_kernel, prod_kernel
from bethe.bethe_exception import ZeroArgument
from bethe.model import ModelSpec, Twist
from bethe.state import BetheState

logger = logging.getLogger(name=__name__)

TWO_PI_I = 2j * math.pi
# Arguments of a logarithm below this magnitude are treated as zero
LOG_ZERO = 1e-300


def _log(value: complex, term: str, index: int) -> complex:
    if abs(value) < LOG_ZERO:
        raise ZeroArgument(term, index)
    return cmath.log(value)


def logf_derivative(x: complex, y: complex, model: ModelSpec) -> complex:
    """K(x, y) = d/dx log f(x, y) = -t(x, y)/c"""
    return -eval_kernel(Kernel.T, x, y, model.coupling) / model.coupling.c


def phi(state: BetheState) -> np.ndarray:
    """
    Left-hand sides of the logarithmic Bethe equations

    Parameters
    ----------
    state : BetheState
        Roots u (a of them) and v (b of them) with their model

    Returns
    -------
    np.ndarray
        a + b values; the principal logarithm is taken of each of the three factors per equation
    """
    model = state.model
    c = model.coupling
    u, v = state.u, state.v
    values = np.zeros(state.a + state.b, dtype=complex)

    for j in range(state.a):
        others = u.without(j)
        scattering = prod_kernel(Kernel.F, [u[j]], others, c) / prod_kernel(Kernel.F, others, [u[j]], c)
        values[j] = (
            _log(model.eval_r(1, u[j]), "r1", j)
            - _log(scattering, "u scattering", j)
            - _log(prod_kernel(Kernel.F, v, [u[j]], c), "f(v, u)", j)
        )

    for j in range(state.b):
        others = v.without(j)
        scattering = prod_kernel(Kernel.F, others, [v[j]], c) / prod_kernel(Kernel.F, [v[j]], others, c)
        values[state.a + j] = (
            _log(model.eval_r(3, v[j]), "r3", state.a + j)
            - _log(scattering, "v scattering", state.a + j)
            - _log(prod_kernel(Kernel.F, [v[j]], u, c), "f(v, u)", state.a + j)
        )

    return values


def twist_targets(a: int, b: int, twist: Twist) -> np.ndarray:
    """log k2 - log k1 on the u equations, log k2 - log k3 on the v equations (modes excluded)."""
    k1, k2, k3 = (cmath.log(k) for k in twist.kappas)
    return np.concatenate([np.full(a, k2 - k1, dtype=complex), np.full(b, k2 - k3, dtype=complex)])


def _raw_residual(state: BetheState) -> np.ndarray:
    return phi(state) - twist_targets(state.a, state.b, state.twist)


def infer_modes(state: BetheState) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Integers that make the residual vanish up to its non-branch part."""
    modes = np.rint(_raw_residual(state).imag / (2 * math.pi)).astype(int)
    return tuple(int(x) for x in modes[: state.a]), tuple(int(x) for x in modes[state.a :])


def residual(state: BetheState) -> np.ndarray:
    """
    Phi minus its twisted target including the 2 pi i mode terms

    Without recorded modes the residual is reduced modulo 2 pi i.
    """
    raw = _raw_residual(state)
    if state.modes is None:
        return raw - TWO_PI_I * np.rint(raw.imag / (2 * math.pi))
    modes = np.asarray(state.l_modes + state.m_modes, dtype=float)
    return raw - TWO_PI_I * modes


def residual_norm(state: BetheState) -> float:
    values = residual(state)
    return float(np.max(np.abs(values))) if values.size else 0.0


def jacobian_theta(state: BetheState) -> np.ndarray:
    """Analytic derivatives of Phi with respect to u_1..u_a then v_1..v_b."""
    model = state.model
    u, v = state.u, state.v
    a, b = state.a, state.b
    theta = np.zeros((a + b, a + b), dtype=complex)

    kuu = np.zeros((a, a), dtype=complex)
    for j in range(a):
        for k in range(a):
            if j != k:
                kuu[j, k] = logf_derivative(u[j], u[k], model)
    kvv = np.zeros((b, b), dtype=complex)
    for j in range(b):
        for k in range(b):
            if j != k:
                kvv[j, k] = logf_derivative(v[j], v[k], model)
    # kvu[m, l] = K(v_m, u_l)
    kvu = np.array([[logf_derivative(v[m], u[l], model) for l in range(a)] for m in range(b)], dtype=complex).reshape(b, a)

    suu = kuu + kuu.T
    svv = kvv + kvv.T

    for j in range(a):
        theta[j, :a] = suu[j]
        theta[j, j] = model.eval_logderiv_r(1, u[j]) - suu[j].sum() + kvu[:, j].sum()
        theta[j, a:] = -kvu[:, j]

    for j in range(b):
        theta[a + j, a:] = -svv[j]
        theta[a + j, a + j] = model.eval_logderiv_r(3, v[j]) + svv[j].sum() - kvu[j].sum()
        theta[a + j, :a] = kvu[j]

    return theta
