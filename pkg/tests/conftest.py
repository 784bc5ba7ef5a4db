import numpy as np
import pytest
from hypothesis import strategies as st

from maxconf.ensemble import Ensemble, random_ensemble
from maxconf.oracle import theta_pair


def ensemble_a() -> Ensemble:
    return Ensemble(np.array([0.5, 0.5]), (np.diag([1.0, 0.0]), np.eye(2) / 2))


def orthogonal_pair() -> Ensemble:
    return Ensemble(np.array([0.5, 0.5]), (np.diag([1.0, 0.0]), np.diag([0.0, 1.0])))


def single_state() -> Ensemble:
    return Ensemble(np.array([1.0]), (np.diag([0.7, 0.3]),))


@pytest.fixture
def ens_a():
    return ensemble_a()


@pytest.fixture
def ens_orth():
    return orthogonal_pair()


@pytest.fixture
def ens_single():
    return single_state()


@pytest.fixture
def ens_theta():
    return theta_pair(np.pi / 3)


def random_hermitian(rng, dim):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (a + a.conj().T) / 2


def random_psd(rng, dim, rank=None):
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    return g @ g.conj().T


seeds = st.integers(min_value=0, max_value=2**31 - 1)


@st.composite
def small_ensembles(draw, max_dim=4, max_n=4):
    dim = draw(st.integers(1, max_dim))
    n = draw(st.integers(1, max_n))
    rank = draw(st.integers(1, dim))
    return random_ensemble(dim, n, rank, seed=draw(seeds))


# acceptance criteria report a one-line verdict each; collected here and
# printed in the terminal summary so they show without -s
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
