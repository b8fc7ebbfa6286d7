"""Form factors of the one-site projectors E^ss_m of the inhomogeneous chain, reconstructed from the monodromy."""

import logging

import numpy as np

from algebra.linalg import det_with_cond
from bethe.model import XXXChain
from bethe.solver import same_roots
from bethe.state import BetheState
from formfactor.diagonal import check_operator_index, extended_with, hab, standard_state
from formfactor.eigenvalue import lambda_coefficients, lambda_of
from formfactor.formfactor_exception import FormFactorException, SiteOutOfRange
from formfactor.offdiagonal import matched_pair, offdiagonal_factor
from formfactor.result import FormFactorKind, FormFactorResult

logger = logging.getLogger(name=__name__)


def _chain_of(state: BetheState) -> XXXChain:
    model = state.model
    if not isinstance(model, XXXChain):
        raise FormFactorException(f"local form factors need an untwisted XXXChain, got {type(model).__name__}")
    return model


def ff_local(s: int, m: int, stateC: BetheState, stateB: BetheState) -> FormFactorResult:
    """
    <C| E^ss_m |B> with E^ss_m = prod_{k<m} t(xi_k) T'_ss(xi_m) prod_{k<=m} t(xi_k)^-1

    Parameters
    ----------
    s : int
        Operator index
    m : int
        Site, 1-based
    stateC, stateB : BetheState
        On-shell states of one chain; equal roots give the diagonal element

    Returns
    -------
    FormFactorResult
        Zero with kind SELECTION_RULE when the sectors differ
    """
    check_operator_index(s)
    stateC, stateB = standard_state(stateC), standard_state(stateB)
    chain = _chain_of(stateB)
    if stateC.model != chain:
        raise FormFactorException("states belong to different chains")
    if not 1 <= m <= chain.L:
        raise SiteOutOfRange(m, chain.L)
    xi_m = chain.xi[m - 1]

    if stateC.sector != stateB.sector:
        return FormFactorResult(0j, s, xi_m, stateB.a, stateB.b, 1.0, FormFactorKind.SELECTION_RULE, m=m, states=(stateC.label, stateB.label))

    lambda_b = lambda_of(stateB, xi_m)
    if same_roots(stateC, stateB):
        matrix = extended_with(s, xi_m, stateB, lambda_coefficients(chain, xi_m))
        det = det_with_cond(matrix, label=f"Theta_Lambda^({s})")
        h = hab(stateB.u, stateB.v, chain.coupling)
        return FormFactorResult(
            value=h * det.value / lambda_b,
            s=s,
            z=xi_m,
            a=stateB.a,
            b=stateB.b,
            cond=det.cond,
            kind=FormFactorKind.LOCAL,
            m=m,
            states=(stateC.label, stateB.label),
            scale=float(abs(h / lambda_b) * np.max(np.abs(matrix), initial=1.0) ** matrix.shape[0]),
        )

    stateC, stateB = matched_pair(stateC, stateB)
    factor = offdiagonal_factor(s, stateC, stateB)
    string = complex(np.prod([lambda_of(stateC, x) / lambda_of(stateB, x) for x in chain.xi.elems[: m - 1]]))
    difference = lambda_of(stateC, xi_m) - lambda_b
    logger.debug("local form factor s=%d m=%d: transfer string %s", s, m, string)
    return FormFactorResult(
        value=string * difference * factor.value / lambda_b,
        s=s,
        z=xi_m,
        a=stateB.a,
        b=stateB.b,
        cond=factor.cond,
        kind=FormFactorKind.LOCAL,
        p=factor.p,
        m=m,
        states=(stateC.label, stateB.label),
        scale=abs(string * difference / lambda_b) * factor.scale,
    )
