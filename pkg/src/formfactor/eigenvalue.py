"""Transfer-matrix eigenvalues on Bethe states and their derivatives."""

from dataclasses import dataclass

import numpy as np

from algebra.kernel import Coupling, Kernel, SetLike, VarSet, eval_kernel, prod_kernel
from bethe.model import ModelSpec, Twist
from bethe.state import BetheState


@dataclass(frozen=True)
class Coefficients:
    """Weights of the three terms c1 f(u, z) + c2 f(z, u) f(v, z) + c3 f(z, v)."""

    c1: complex
    c2: complex
    c3: complex

    def term(self, s: int) -> complex:
        return (self.c1, self.c2, self.c3)[s - 1]


def tau_coefficients(model: ModelSpec, z: complex, twist: Twist | None = None) -> Coefficients:
    k1, k2, k3 = (twist or Twist.identity()).kappas
    return Coefficients(k1 * model.eval_r(1, z), k2, k3 * model.eval_r(3, z))


def lambda_coefficients(model: ModelSpec, z: complex, twist: Twist | None = None) -> Coefficients:
    k1, k2, k3 = (twist or Twist.identity()).kappas
    return Coefficients(k1 * model.eval_lambda(1, z), k2 * model.eval_lambda(2, z), k3 * model.eval_lambda(3, z))


def _as_set(values: SetLike) -> VarSet:
    return values if isinstance(values, VarSet) else VarSet(tuple(np.asarray(values, dtype=complex).reshape(-1)))


def eigenvalue_terms(coeffs: Coefficients, z: complex, u: SetLike, v: SetLike, c: Coupling) -> np.ndarray:
    """The three terms of the eigenvalue separately; their sum is the eigenvalue."""
    u, v = _as_set(u), _as_set(v)
    return np.array(
        [
            coeffs.c1 * prod_kernel(Kernel.F, u, [z], c),
            coeffs.c2 * prod_kernel(Kernel.F, [z], u, c) * prod_kernel(Kernel.F, v, [z], c),
            coeffs.c3 * prod_kernel(Kernel.F, [z], v, c),
        ],
        dtype=complex,
    )


def eigenvalue(coeffs: Coefficients, z: complex, u: SetLike, v: SetLike, c: Coupling) -> complex:
    return complex(eigenvalue_terms(coeffs, z, u, v, c).sum())


def eigenvalue_gradient(coeffs: Coefficients, z: complex, u: SetLike, v: SetLike, c: Coupling) -> np.ndarray:
    """
    Analytic derivatives of the eigenvalue with respect to u_1..u_a then v_1..v_b

    Parameters
    ----------
    coeffs : Coefficients
        Term weights, held fixed
    z : complex
        Evaluation point
    u, v : SetLike
        Root sets
    c : Coupling
        The coupling constant

    Returns
    -------
    np.ndarray
        Gradient of length a + b
    """
    u, v = _as_set(u), _as_set(v)
    first, second, third = eigenvalue_terms(coeffs, z, u, v, c)

    def logf_derivative(x: complex, y: complex) -> complex:
        return -eval_kernel(Kernel.T, x, y, c) / c.c

    grad_u = [first * logf_derivative(uk, z) - second * logf_derivative(z, uk) for uk in u]
    grad_v = [second * logf_derivative(vk, z) - third * logf_derivative(z, vk) for vk in v]
    return np.array(grad_u + grad_v, dtype=complex)


def tau(z: complex, u: SetLike, v: SetLike, model: ModelSpec, twist: Twist | None = None) -> complex:
    """
    Eigenvalue of the normalized (twisted) transfer matrix

    k1 r1(z) f(u, z) + k2 f(z, u) f(v, z) + k3 r3(z) f(z, v); the identity twist gives the standard eigenvalue.
    """
    return eigenvalue(tau_coefficients(model, z, twist), z, u, v, model.coupling)


def dtau_dkappa(s: int, z: complex, u: SetLike, v: SetLike, model: ModelSpec) -> complex:
    """Partial derivative of the twisted eigenvalue in kappa_s with the roots held fixed."""
    return complex(eigenvalue_terms(tau_coefficients(model, z), z, u, v, model.coupling)[s - 1])


def tau_of(state: BetheState, z: complex) -> complex:
    return tau(z, state.u, state.v, state.model, state.twist)


def big_lambda(z: complex, u: SetLike, v: SetLike, model: ModelSpec, twist: Twist | None = None) -> complex:
    """Un-normalized eigenvalue k1 lambda1 f(u, z) + k2 lambda2 f(z, u) f(v, z) + k3 lambda3 f(z, v)."""
    return eigenvalue(lambda_coefficients(model, z, twist), z, u, v, model.coupling)


def lambda_of(state: BetheState, z: complex) -> complex:
    return big_lambda(z, state.u, state.v, state.model, state.twist)
