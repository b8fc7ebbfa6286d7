from dataclasses import dataclass
from enum import Enum

from algebra.linalg import ILL_CONDITIONED


class FormFactorKind(Enum):
    DIAGONAL = "diagonal"
    OFFDIAGONAL = "offdiagonal"
    LOCAL = "local"
    SELECTION_RULE = "selection-rule"


@dataclass(frozen=True)
class FormFactorResult:
    """
    A form factor value with its diagnostics

    cond is the pivot ratio of the determinant that produced the value; scale is the largest
    magnitude among the factors multiplied together, the reference for "zero" comparisons.
    """

    value: complex
    s: int
    z: complex | None
    a: int
    b: int
    cond: float
    kind: FormFactorKind
    p: int | None = None
    m: int | None = None
    states: tuple[str, ...] = ()
    scale: float = 1.0
    notes: tuple[str, ...] = ()

    @property
    def ill_conditioned(self) -> bool:
        return self.cond > ILL_CONDITIONED


# Agreement with the lattice oracle that each kind of value is checked to
ORACLE_TOLERANCE: dict[FormFactorKind, float] = {
    FormFactorKind.DIAGONAL: 1e-8,
    FormFactorKind.OFFDIAGONAL: 1e-8,
    FormFactorKind.LOCAL: 1e-7,
    FormFactorKind.SELECTION_RULE: 1e-10,
}
