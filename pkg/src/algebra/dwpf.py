"""Domain-wall partition function of the rational six-vertex model."""

import logging

from algebra.algebra_exception import SizeMismatch
from algebra.kernel import CouplingLike, DeltaKind, Kernel, SetLike, as_coupling, delta_prod, kernel_matrix, prod_kernel
from algebra.linalg import Determinant, det_with_cond

logger = logging.getLogger(name=__name__)


def dwpf_with_cond(xs: SetLike, ys: SetLike, c: CouplingLike) -> Determinant:
    coupling = as_coupling(c)
    t_matrix = kernel_matrix(Kernel.T, xs, ys, coupling)
    if t_matrix.shape[0] != t_matrix.shape[1]:
        raise SizeMismatch(f"domain-wall partition function needs equal sizes, got {t_matrix.shape[0]} and {t_matrix.shape[1]}")

    det = det_with_cond(t_matrix, label="dwpf")
    prefactor = delta_prod(DeltaKind.PRIMED, xs, coupling) * delta_prod(DeltaKind.PLAIN, ys, coupling) * prod_kernel(Kernel.H, xs, ys, coupling)
    return Determinant(prefactor * det.value, det.cond)


def dwpf(xs: SetLike, ys: SetLike, c: CouplingLike) -> complex:
    """
    K_n(x|y) = Delta'(x) Delta(y) h(x, y) det t(x_j, y_k)

    Parameters
    ----------
    xs : SetLike
        First set of n rapidities
    ys : SetLike
        Second set of n rapidities
    c : Coupling
        The coupling constant

    Returns
    -------
    complex
        The partition function, 1 for n = 0
    """
    return dwpf_with_cond(xs, ys, c).value
