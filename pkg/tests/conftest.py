import numpy as np
import pytest

from algebra.kernel import Coupling, VarSet
from bethe.model import Twist, XXXChain
from bethe.solver import solve
from cli.verify import REFERENCE_TWIST, reference_chain, reference_states


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def chain2():
    return reference_chain(2)


@pytest.fixture
def chain3():
    return reference_chain(3)


@pytest.fixture
def two_site_state(chain2):
    return solve(chain2, 1, 0).states[0]


@pytest.fixture
def states_10(chain3):
    """The two on-shell states of the three-site chain with one u root."""
    return reference_states(chain3, 1, 0)


@pytest.fixture
def twisted_model(chain3):
    return chain3.with_twist(REFERENCE_TWIST)


@pytest.fixture
def states_11(twisted_model):
    """(1, 1) states of the twisted three-site chain: the untwisted chain has no finite ones."""
    return reference_states(twisted_model, 1, 1)


@pytest.fixture
def coincident_chain():
    return XXXChain(VarSet((0.0, 0.0)), Coupling(1.0), allow_coincident=True)


def distinct_pairs(states):
    return [(states[j], states[k]) for j in range(len(states)) for k in range(len(states)) if j != k]


def unit_twist(s: int, epsilon: float) -> Twist:
    kappas = [1.0, 1.0, 1.0]
    kappas[s - 1] += epsilon
    return Twist.of(kappas)


@pytest.fixture
def states_21():
    """(2, 1) states of the four-site chain; several of them share a complex pair of u roots."""
    return reference_states(reference_chain(4), 2, 1)
