import numpy as np
import pytest
from ppm_shared.schemas.protocol import AgentState, CanonicalParams, MacroParams

from ppm_engine.models import Trajectory
from ppm_engine.parameters import canonical_to_macro, fluct_constants


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow Monte-Carlo tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def reference_macro() -> MacroParams:
    """(gamma_A, gamma_B, alpha_AA, alpha_AB, beta_AB) = (0.7, 0.06, 1.0, 2.5, 0.3)."""
    return MacroParams(gamma_A=0.7, gamma_B=0.06, alpha_AA=1.0, alpha_AB=2.5, beta_AB=0.3)


@pytest.fixture
def reference_canonical() -> CanonicalParams:
    return CanonicalParams.reference()


@pytest.fixture
def market_macro() -> MacroParams:
    return canonical_to_macro(CanonicalParams.market())


@pytest.fixture
def decaying_macro() -> MacroParams:
    return canonical_to_macro(CanonicalParams(chi=0.2, epsilon=0.625, eta=0.4, xi=0.05, tau0=10.0))


@pytest.fixture
def reference_fc(reference_macro):
    return fluct_constants(reference_macro)


@pytest.fixture
def decaying_fc(decaying_macro):
    return fluct_constants(decaying_macro)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


def make_trajectory(init, events, horizon, record_every=1) -> Trajectory:
    """Hand-built trajectory from (n, m, N) and a list of (time, n, m) rows."""
    n0, m0, N = init
    times = np.array([e[0] for e in events], dtype=np.float64)
    return Trajectory(
        init=AgentState(n=n0, m=m0, N=N),
        times=times,
        channels=np.zeros(len(events), dtype=np.int8),
        n=np.array([e[1] for e in events], dtype=np.int32),
        m=np.array([e[2] for e in events], dtype=np.int32),
        horizon=float(horizon),
        record_every=record_every,
    )
