from dataclasses import dataclass, field, replace

import numpy as np

from algebra.kernel import VarSet
from bethe.model import ModelSpec, Twist

# A state is on shell when the max-norm of its log residual is below this
TOL_ONSHELL = 1e-12


@dataclass(frozen=True)
class BetheState:
    """
    Root sets (u, v) of the nested Bethe equations together with their bookkeeping

    modes holds the integers (l_1..l_a) and (m_1..m_b) fixing the logarithm branches.
    """

    model: ModelSpec
    u: VarSet
    v: VarSet
    twist: Twist = field(default_factory=Twist.identity)
    l_modes: tuple[int, ...] | None = None
    m_modes: tuple[int, ...] | None = None
    residual_norm: float = float("inf")
    on_shell: bool = False
    label: str = ""

    def __post_init__(self):
        if not isinstance(self.u, VarSet):
            object.__setattr__(self, "u", VarSet(tuple(self.u)))
        if not isinstance(self.v, VarSet):
            object.__setattr__(self, "v", VarSet(tuple(self.v)))
        if self.l_modes is not None:
            object.__setattr__(self, "l_modes", tuple(int(x) for x in self.l_modes))
        if self.m_modes is not None:
            object.__setattr__(self, "m_modes", tuple(int(x) for x in self.m_modes))
        if self.on_shell and not self.residual_norm < TOL_ONSHELL:
            object.__setattr__(self, "on_shell", False)

    @classmethod
    def vacuum(cls, model: ModelSpec, twist: Twist | None = None) -> "BetheState":
        return cls(model, VarSet(), VarSet(), twist or Twist.identity(), (), (), 0.0, True, "vacuum")

    @property
    def a(self) -> int:
        return len(self.u)

    @property
    def b(self) -> int:
        return len(self.v)

    @property
    def sector(self) -> tuple[int, int]:
        return (self.a, self.b)

    @property
    def roots(self) -> np.ndarray:
        return np.concatenate([self.u.array, self.v.array])

    @property
    def modes(self) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
        if self.l_modes is None or self.m_modes is None:
            return None
        return (self.l_modes, self.m_modes)

    def with_roots(self, roots: np.ndarray) -> "BetheState":
        """Same bookkeeping with the root vector (u then v) replaced; the result is no longer flagged on shell."""
        roots = np.asarray(roots, dtype=complex)
        return replace(self, u=VarSet(tuple(roots[: self.a])), v=VarSet(tuple(roots[self.a :])), residual_norm=float("inf"), on_shell=False)

    def absorbed(self) -> "BetheState":
        """The same roots on the model with the twist absorbed, so that identity-twist formulas apply."""
        if self.twist.is_identity:
            return self
        # principal logs may change branch when the twist moves into r1, r3: modes are re-inferred on use
        return replace(self, model=self.model.with_twist(self.twist), twist=Twist.identity(), l_modes=None, m_modes=None)
