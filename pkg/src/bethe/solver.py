import cmath
import logging
from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from algebra.algebra_exception import AlgebraException
from algebra.linalg import ILL_CONDITIONED, det_with_cond
from bethe.bethe_exception import BetheException, NoConvergence, SingularJacobian
from bethe.equations import infer_modes, jacobian_theta, residual, twist_targets
from bethe.model import ModelSpec, RationalFunction, Twist
from bethe.state import TOL_ONSHELL, BetheState

logger = logging.getLogger(name=__name__)

MAX_ITER = 50
MAX_HALVINGS = 8
TOL_NEWTON = 1e-13
DEDUP_TOL = 1e-8
ROOT_BOUND = 1e6
N_RANDOM_SEEDS = 24
MAX_MAGNON_SEEDS = 32
CONTINUATION_STEPS = 4

Seed = tuple[np.ndarray, np.ndarray]


@dataclass(frozen=True)
class SeedFailure:
    seed_index: int
    reason: str


@dataclass(frozen=True)
class RejectedState:
    state: BetheState
    reason: str


@dataclass
class SolveReport:
    states: list[BetheState] = field(default_factory=list)
    rejected: list[RejectedState] = field(default_factory=list)
    failures: list[SeedFailure] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return len(self.states) > 0


def _norm(state: BetheState) -> float:
    try:
        values = residual(state)
    except (AlgebraException, BetheException):
        return float("inf")
    if values.size == 0:
        return 0.0
    norm = float(np.max(np.abs(values)))
    return norm if np.isfinite(norm) else float("inf")


def _linear_solve(theta: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    try:
        solution = scipy.linalg.solve(theta, rhs)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise SingularJacobian(f"Jacobian of size {theta.shape[0]} is singular: {e}") from e
    if not np.all(np.isfinite(solution)):
        raise SingularJacobian(f"Jacobian of size {theta.shape[0]} produced a non-finite step")
    return solution


def _require_isolated(state: BetheState, seed_index: int | None) -> None:
    """A converged point whose Jacobian is singular leaves some root undetermined, e.g. every v when r3 is constant and a = 0."""
    if state.roots.size == 0:
        return
    try:
        det = det_with_cond(jacobian_theta(state), label="theta")
    except AlgebraException as e:
        raise NoConvergence(f"Jacobian not evaluable at the solution: {e}", seed_index) from e
    if det.value == 0 or not det.cond <= ILL_CONDITIONED:
        raise SingularJacobian(f"undetermined roots: Jacobian of size {state.roots.size} has pivot ratio {det.cond:.3e} at the solution")


def newton(state: BetheState, tol: float = TOL_NEWTON, max_iter: int = MAX_ITER, seed_index: int | None = None) -> BetheState:
    """
    Damped Newton iteration on the logarithmic Bethe equations

    Parameters
    ----------
    state : BetheState
        Initial roots; recorded modes are kept, otherwise the residual is taken modulo 2 pi i
    tol : float
        Target max-norm of the residual
    max_iter : int
        Iteration cap
    seed_index : int, optional
        Seed identifier carried by NoConvergence

    Returns
    -------
    BetheState
        The converged state with modes recorded and flagged on shell

    Raises
    ------
    NoConvergence
        When the residual does not fall below the on-shell tolerance
    SingularJacobian
        When a step cannot be solved for, or the Jacobian at the converged point is singular
    """
    current = state
    norm = _norm(current)
    if norm == float("inf"):
        raise NoConvergence("initial roots sit on a singular point of the equations", seed_index)

    iteration = 0
    for iteration in range(max_iter):
        if norm <= tol:
            break
        try:
            step = _linear_solve(jacobian_theta(current), -residual(current))
        except AlgebraException as e:
            raise NoConvergence(f"Jacobian not evaluable: {e}", seed_index) from e

        damping = 1.0
        trial, trial_norm = current, norm
        for _ in range(MAX_HALVINGS + 1):
            trial = current.with_roots(current.roots + damping * step)
            trial_norm = _norm(trial)
            if trial_norm < norm:
                break
            damping /= 2
        if not trial_norm < norm:
            logger.debug("Newton stalled at iteration %d with residual %.3e", iteration, norm)
            break

        current, norm = trial, trial_norm
        logger.debug("Newton iteration %d residual %.3e damping %.3g", iteration, norm, damping)
        if current.roots.size and np.max(np.abs(current.roots)) > ROOT_BOUND:
            raise NoConvergence(f"roots diverged beyond {ROOT_BOUND:.0e}", seed_index)

    if not norm < TOL_ONSHELL:
        raise NoConvergence(f"residual {norm:.3e} after {iteration + 1} iterations", seed_index)
    _require_isolated(current, seed_index)

    l_modes, m_modes = state.modes or infer_modes(current)
    return replace(current, l_modes=l_modes, m_modes=m_modes, residual_norm=norm, on_shell=True)


def canonical(state: BetheState) -> BetheState:
    """Sort each root set by real then imaginary part, carrying the mode numbers along."""

    def order(values: np.ndarray) -> list[int]:
        return sorted(range(len(values)), key=lambda i: (round(values[i].real, 12), round(values[i].imag, 12)))

    u_order, v_order = order(state.u.array), order(state.v.array)
    return replace(
        state,
        u=state.u.select(u_order),
        v=state.v.select(v_order),
        l_modes=None if state.l_modes is None else tuple(state.l_modes[i] for i in u_order),
        m_modes=None if state.m_modes is None else tuple(state.m_modes[i] for i in v_order),
    )


def admissibility(state: BetheState) -> str | None:
    """Reason the roots break the downstream determinant formulas, or None."""
    coupling = state.model.coupling
    eps = coupling.eps_dist
    for name, roots in (("u", state.u), ("v", state.v)):
        dist, j, k = roots.closest_pair()
        if dist < eps:
            return f"coincident {name} roots {j} and {k}"
    if state.roots.size and np.max(np.abs(state.roots)) > ROOT_BOUND:
        return "root at infinity"
    for j, u in enumerate(state.u):
        for k, v in enumerate(state.v):
            if abs(u - v) < eps:
                return f"u root {j} coincides with v root {k}"
            if abs(u - (v - coupling.c)) < eps:
                return f"u root {j} equals v root {k} minus c"
        for p in state.model.r1.poles:
            if abs(u - p) < eps:
                return f"u root {j} sits on a pole of r1"
    for k, v in enumerate(state.v):
        for p in state.model.r3.poles:
            if abs(v - p) < eps:
                return f"v root {k} sits on a pole of r3"
    return None


def _same_multiset(x: np.ndarray, y: np.ndarray, tol: float) -> bool:
    if len(x) != len(y):
        return False
    if len(x) == 0:
        return True
    cost = np.abs(np.subtract.outer(x, y))
    rows, cols = linear_sum_assignment(cost)
    return bool(cost[rows, cols].max() < tol)


def same_roots(first: BetheState, second: BetheState, tol: float = DEDUP_TOL) -> bool:
    return _same_multiset(first.u.array, second.u.array, tol) and _same_multiset(first.v.array, second.v.array, tol)


def _one_particle_roots(ratio: RationalFunction, kappa_self: complex, kappa_two: complex) -> np.ndarray:
    # kappa_self * ratio(w) = kappa_two after clearing the denominator
    if ratio.is_constant:
        return np.zeros(0, dtype=complex)
    poly = np.polysub(kappa_self * ratio.numerator(), kappa_two * ratio.denominator())
    scale = np.max(np.abs(poly))
    while len(poly) and abs(poly[0]) <= 1e-14 * scale:
        poly = poly[1:]
    if len(poly) < 2:
        return np.zeros(0, dtype=complex)
    return np.roots(poly).astype(complex)


def _v_candidates(model: ModelSpec, u: np.ndarray, b: int, twist: Twist, v_roots: np.ndarray) -> list[np.ndarray]:
    if b == 0:
        return [np.zeros(0, dtype=complex)]
    c = model.coupling.c
    candidates = []
    if len(u) >= b + 1:
        # exact for (a, b) = (2, 1) on the chain
        candidates.append(np.array([(u[k] + u[k + 1] - c) / 2 for k in range(b)], dtype=complex))
    if model.r3.is_constant and len(u) >= b:
        q = model.r3.scale * twist.kappa3 / twist.kappa2
        if abs(q - 1) > 1e-12:
            candidates.append(np.array([u[k] + c / (q - 1) for k in range(b)], dtype=complex))
    if len(u) == 0 and len(v_roots) >= b:
        candidates.extend(np.array(combo, dtype=complex) for combo in combinations(v_roots, b))
    return candidates


def magnon_seeds(model: ModelSpec, a: int, b: int, twist: Twist | None = None, max_seeds: int = MAX_MAGNON_SEEDS) -> list[Seed]:
    """
    Seeds built from the exactly solvable one-particle equations

    u candidates solve k1 r1(u) = k2, v candidates are placed where the b-equations would hold for two u's.
    """
    twist = twist or Twist.identity()
    u_roots = _one_particle_roots(model.r1, twist.kappa1, twist.kappa2)
    v_roots = _one_particle_roots(model.r3, twist.kappa3, twist.kappa2)
    if b > 0 and model.r3.is_constant:
        # k1 r1(u) = k3 r3 holds exactly for (a, b) = (1, 1)
        u_roots = np.concatenate([_one_particle_roots(model.r1, twist.kappa1, twist.kappa3 * model.r3.scale), u_roots])

    if a == 0:
        u_sets = [np.zeros(0, dtype=complex)]
    else:
        u_sets = [np.array(combo, dtype=complex) for combo in combinations(u_roots, a)]

    seeds: list[Seed] = []
    for u in u_sets:
        for v in _v_candidates(model, u, b, twist, v_roots):
            seeds.append((u, v))
            if len(seeds) >= max_seeds:
                return seeds
    logger.debug("built %d magnon seeds for sector (%d, %d)", len(seeds), a, b)
    return seeds


def random_seeds(model: ModelSpec, a: int, b: int, count: int, rng: np.random.Generator) -> list[Seed]:
    spread = abs(model.coupling.c) * max(1.0, (a + b) / 2)
    center = model.center

    def draw(n: int) -> np.ndarray:
        return center + spread * (rng.normal(size=n) + 1j * rng.normal(size=n)) / np.sqrt(2)

    return [(draw(a), draw(b)) for _ in range(count)]


def solve(
    model: ModelSpec,
    a: int,
    b: int,
    twist: Twist | None = None,
    modes: tuple[tuple[int, ...], tuple[int, ...]] | None = None,
    seeds: list[Seed] | None = None,
    tol: float = TOL_NEWTON,
    n_random: int = N_RANDOM_SEEDS,
    rng_seed: int = 0,
    max_iter: int = MAX_ITER,
) -> SolveReport:
    """
    Solve the (twisted) nested Bethe equations from a list of seeds

    Parameters
    ----------
    model : ModelSpec
        The model data
    a, b : int
        Numbers of u and v roots
    twist : Twist, optional
        Twist of the equations, identity by default
    modes : tuple, optional
        Mode numbers (l, m); without them the branch is inferred per seed and recorded
    seeds : list, optional
        Initial (u, v) guesses; by default magnon seeds plus n_random Gaussian seeds
    tol : float
        Newton target residual
    n_random : int
        Number of random seeds when seeds are not given
    rng_seed : int
        Seed of the random generator
    max_iter : int
        Newton iteration cap per seed

    Returns
    -------
    SolveReport
        Converged admissible distinct states, rejected states with reasons and failed seeds
    """
    twist = twist or Twist.identity()
    report = SolveReport()
    if a == 0 and b == 0:
        report.states.append(BetheState.vacuum(model, twist))
        return report

    if seeds is None:
        seeds = magnon_seeds(model, a, b, twist) + random_seeds(model, a, b, n_random, np.random.default_rng(rng_seed))
    l_modes, m_modes = modes if modes is not None else (None, None)

    for index, (u0, v0) in enumerate(seeds):
        u0, v0 = np.asarray(u0, dtype=complex).reshape(-1), np.asarray(v0, dtype=complex).reshape(-1)
        if len(u0) != a or len(v0) != b:
            report.failures.append(SeedFailure(index, f"seed has sizes ({len(u0)}, {len(v0)}), expected ({a}, {b})"))
            continue
        try:
            state = newton(BetheState(model, tuple(u0), tuple(v0), twist, l_modes, m_modes), tol, max_iter, index)
        except (AlgebraException, BetheException) as e:
            logger.debug("seed %d failed: %s", index, e)
            report.failures.append(SeedFailure(index, str(e)))
            continue

        state = canonical(state)
        reason = admissibility(state)
        if reason is not None:
            logger.warning("rejected state from seed %d: %s", index, reason)
            report.rejected.append(RejectedState(state, reason))
            continue
        if any(same_roots(state, known) for known in report.states):
            continue
        report.states.append(replace(state, label=f"s{len(report.states)}"))

    logger.info("sector (%d, %d): %d states, %d rejected, %d failed seeds", a, b, len(report.states), len(report.rejected), len(report.failures))
    return report


def _log_twist(twist: Twist) -> np.ndarray:
    return np.array([cmath.log(k) for k in twist.kappas])


def continue_in_twist(state: BetheState, target: Twist, steps: int = CONTINUATION_STEPS, tol: float = TOL_NEWTON) -> BetheState:
    """
    Follow the roots of an on-shell state along a log-linear twist path

    Each step predicts with the Jacobian and corrects by Newton with the mode numbers held fixed.
    """
    if target == state.twist:
        return state
    if not state.on_shell:
        raise NoConvergence("continuation needs an on-shell starting state", step_index=0)

    start_log, target_log = _log_twist(state.twist), _log_twist(target)
    l_modes, m_modes = state.modes or infer_modes(state)
    current = replace(state, l_modes=l_modes, m_modes=m_modes)

    for step in range(1, steps + 1):
        t = step / steps
        twist = target if step == steps else Twist(*np.exp((1 - t) * start_log + t * target_log))
        shift = twist_targets(current.a, current.b, twist) - twist_targets(current.a, current.b, current.twist)
        try:
            predicted = _linear_solve(jacobian_theta(current), shift)
            moved = replace(current.with_roots(current.roots + predicted), twist=twist)
            current = newton(moved, tol)
        except (AlgebraException, BetheException) as e:
            raise NoConvergence(f"continuation failed at step {step} of {steps}: {e}", step_index=step) from e
        logger.debug("continuation step %d/%d residual %.3e", step, steps, current.residual_norm)

    return current


def root_derivatives_dkappa(state: BetheState) -> np.ndarray:
    """
    Derivatives of the roots with respect to the twist parameters

    Returns
    -------
    np.ndarray
        Shape (3, a + b): row s - 1 holds du_1..du_a, dv_1..dv_b with respect to kappa_s
    """
    theta = jacobian_theta(state)
    k1, k2, k3 = state.twist.kappas
    derivatives = np.zeros((3, state.a + state.b), dtype=complex)
    for s in (1, 2, 3):
        d_log = [1 / k if s == index else 0 for index, k in ((1, k1), (2, k2), (3, k3))]
        rhs = np.concatenate([np.full(state.a, d_log[1] - d_log[0]), np.full(state.b, d_log[1] - d_log[2])]).astype(complex)
        derivatives[s - 1] = _linear_solve(theta, rhs) if rhs.size else rhs
    return derivatives
