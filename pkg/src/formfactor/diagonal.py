"""Norm and form factors of T_ss(z) between a Bethe state and its own dual."""

import logging

import numpy as np

from algebra.kernel import Coupling, Kernel, SetLike, prod_kernel, prod_offdiagonal
from algebra.linalg import Determinant, det_with_cond
from bethe.equations import jacobian_theta
from bethe.solver import root_derivatives_dkappa
from bethe.state import BetheState
from formfactor.eigenvalue import Coefficients, dtau_dkappa, eigenvalue_gradient, eigenvalue_terms, tau_coefficients
from formfactor.formfactor_exception import FormFactorException
from formfactor.result import FormFactorKind, FormFactorResult

logger = logging.getLogger(name=__name__)


def check_operator_index(s: int) -> None:
    if s not in (1, 2, 3):
        raise FormFactorException(f"operator index s must be 1, 2 or 3, got {s}")


def standard_state(state: BetheState) -> BetheState:
    """The state with any twist absorbed into its model."""
    if not state.on_shell:
        logger.warning("state %s is not flagged on shell (residual %.3e)", state.label or "?", state.residual_norm)
    return state.absorbed()


def hab(u: SetLike, v: SetLike, c: Coupling) -> complex:
    """(-1)^a c^(a+b) f(v, u) prod_{j!=k} f(u_j, u_k) prod_{j!=k} f(v_j, v_k)"""
    a, b = len(u), len(v)
    return (-1) ** a * c.c ** (a + b) * prod_kernel(Kernel.F, v, u, c) * prod_offdiagonal(Kernel.F, u, c) * prod_offdiagonal(Kernel.F, v, c)


def last_column(s: int, a: int, b: int) -> np.ndarray:
    delta = [1 if s == k else 0 for k in (1, 2, 3)]
    return np.concatenate([np.full(a, delta[0] - delta[1]), np.full(b, delta[2] - delta[1])]).astype(complex)


def _extended(s: int, z: complex, state: BetheState, coeffs: Coefficients) -> np.ndarray:
    c = state.model.coupling
    n = state.a + state.b
    matrix = np.zeros((n + 1, n + 1), dtype=complex)
    matrix[:n, :n] = jacobian_theta(state)
    matrix[n, :n] = eigenvalue_gradient(coeffs, z, state.u, state.v, c)
    matrix[:n, n] = last_column(s, state.a, state.b)
    matrix[n, n] = eigenvalue_terms(coeffs, z, state.u, state.v, c)[s - 1]
    return matrix


def theta_ext(s: int, z: complex, state: BetheState) -> np.ndarray:
    """
    The Jacobian bordered by the eigenvalue derivatives

    Parameters
    ----------
    s : int
        Operator index in {1, 2, 3}; only the last column and corner depend on it
    z : complex
        Evaluation point
    state : BetheState
        On-shell state at identity twist

    Returns
    -------
    np.ndarray
        Matrix of size a + b + 1
    """
    check_operator_index(s)
    state = standard_state(state)
    return _extended(s, z, state, tau_coefficients(state.model, z))


def extended_with(s: int, z: complex, state: BetheState, coeffs: Coefficients) -> np.ndarray:
    """Bordered matrix with the last row and corner built from arbitrary term weights (e.g. un-normalized eigenvalues)."""
    check_operator_index(s)
    return _extended(s, z, standard_state(state), coeffs)


def norm_with_cond(state: BetheState) -> Determinant:
    state = standard_state(state)
    det = det_with_cond(jacobian_theta(state), label="theta")
    return Determinant(hab(state.u, state.v, state.model.coupling) * det.value, det.cond)


def norm_squared(state: BetheState) -> complex:
    """H_ab det theta"""
    return norm_with_cond(state).value


def ff_diagonal(s: int, z: complex, state: BetheState) -> FormFactorResult:
    state = standard_state(state)
    matrix = theta_ext(s, z, state)
    det = det_with_cond(matrix, label=f"Theta^({s})")
    h = hab(state.u, state.v, state.model.coupling)
    value = h * det.value
    return FormFactorResult(
        value=value,
        s=s,
        z=complex(z),
        a=state.a,
        b=state.b,
        cond=det.cond,
        kind=FormFactorKind.DIAGONAL,
        states=(state.label, state.label),
        scale=float(abs(h) * np.max(np.abs(matrix), initial=1.0) ** matrix.shape[0]),
    )


def cofactor_expansion(s: int, z: complex, state: BetheState) -> complex:
    """H_ab det Theta^(s) expanded over the last row and column: corner * det theta - sum col_j row_k cofactor_jk."""
    state = standard_state(state)
    matrix = theta_ext(s, z, state)
    n = state.a + state.b
    theta = matrix[:n, :n]
    total = matrix[n, n] * det_with_cond(theta).value
    for j in range(n):
        for k in range(n):
            minor = np.delete(np.delete(theta, j, axis=0), k, axis=1)
            cofactor = (-1) ** (j + k) * det_with_cond(minor).value
            total -= matrix[j, n] * matrix[n, k] * cofactor
    return hab(state.u, state.v, state.model.coupling) * total


def tau_kappa_total_derivative(s: int, z: complex, state: BetheState) -> complex:
    """
    Total kappa_s derivative of the twisted eigenvalue at the identity twist

    The explicit kappa_s dependence plus the motion of the roots through the twisted Bethe equations.
    """
    check_operator_index(s)
    state = standard_state(state)
    c = state.model.coupling
    coeffs = tau_coefficients(state.model, z)
    explicit = dtau_dkappa(s, z, state.u, state.v, state.model)
    if state.a + state.b == 0:
        return complex(explicit)
    motion = eigenvalue_gradient(coeffs, z, state.u, state.v, c) @ root_derivatives_dkappa(state)[s - 1]
    return complex(explicit + motion)
