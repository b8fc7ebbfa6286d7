import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from algebra.algebra_exception import SizeMismatch

logger = logging.getLogger(name=__name__)

# Pivot ratio above which a determinant is flagged, not rejected
ILL_CONDITIONED = 1e12


@dataclass(frozen=True)
class Determinant:
    value: complex
    cond: float

    @property
    def ill_conditioned(self) -> bool:
        return self.cond > ILL_CONDITIONED


def det_with_cond(matrix: np.ndarray, label: str = "matrix") -> Determinant:
    """
    Determinant of a complex square matrix by LU with partial pivoting

    Parameters
    ----------
    matrix : np.ndarray
        Square complex matrix; the 0x0 matrix has determinant 1
    label : str
        Name used in the ill-conditioning warning

    Returns
    -------
    Determinant
        The value and the ratio of largest to smallest pivot magnitude
    """
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise SizeMismatch(f"{label} is not square: shape {a.shape}")
    n = a.shape[0]
    if n == 0:
        return Determinant(1 + 0j, 1.0)
    if not np.all(np.isfinite(a)):
        logger.warning("%s has non-finite entries", label)
        return Determinant(complex("nan"), float("inf"))

    lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    pivots = np.diag(lu)
    swaps = int(np.count_nonzero(piv != np.arange(n)))
    value = complex(np.prod(pivots)) * (-1) ** swaps

    magnitudes = np.abs(pivots)
    smallest = float(magnitudes.min())
    cond = float("inf") if smallest == 0 else float(magnitudes.max()) / smallest
    if cond > ILL_CONDITIONED:
        logger.warning("%s of size %d is ill-conditioned: pivot ratio %.3e", label, n, cond)

    return Determinant(value, cond)
