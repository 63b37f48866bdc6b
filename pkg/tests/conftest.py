import numpy as np
import pytest

from obsframes import build_frame, generate_geometric_network, random_strategy, rotation_network
from obsframes import SamplingStrategy

ACCEPTANCE = []


def record(name, passed, detail=""):
    """Log an acceptance outcome for the end-of-run summary, then assert it."""
    ACCEPTANCE.append((name, bool(passed), detail))
    assert passed, f"{name}: {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")


def taylor_expm(A, terms=60):
    """Scaled Taylor series for exp(A), squared back up."""
    A = np.asarray(A, dtype=float)
    s = max(0, int(np.ceil(np.log2(max(np.linalg.norm(A, 1), 1e-300) / 0.5))))
    B = A / 2.0**s
    E, P = np.eye(len(A)), np.eye(len(A))
    for k in range(1, terms):
        P = P @ B / k
        E = E + P
    for _ in range(s):
        E = E @ E
    return E


@pytest.fixture
def rot():
    return rotation_network()


@pytest.fixture(scope="session")
def corpus():
    """A mixed bag of frames from random networks and strategies."""
    frames = []
    for k in range(40):
        n = 2 + k % 9
        net = generate_geometric_network(n, d=0.6, seed=k)
        st = random_strategy(net, None, 1 + k % 4, 0.5, seed=500 + k)
        f = build_frame(net, st)
        frames.append(f)
    rng = np.random.default_rng(3)
    from obsframes import ObservabilityFrame
    for k in range(20):
        n = int(rng.integers(1, 8))
        frames.append(ObservabilityFrame.from_vectors(rng.standard_normal((n + int(rng.integers(0, 10)), n))))
    return frames
