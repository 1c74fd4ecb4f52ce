import numpy as np
import pytest

from anevo.env.centering import Command, LocationClass, correct_command
from anevo.neuro import Genome, Topology

ACCEPTANCE_RESULTS: list[tuple[int, str, bool, str]] = []


def exact_mapping_genome(hidden_activation="tanh") -> Genome:
    """10-10-3 net hand-wired so each class votes for its correct command.

    Hidden unit j reads only input j (weight 10, bias -5), so it is high
    exactly when class j is reported. Output k sums, with weight 10, the
    hidden units whose class maps to command k. The active unit then tips
    the vote regardless of the inactive units' resting level.
    """
    t = Topology(10, (10,), 3, hidden_activation, "softmax")
    w1 = np.zeros((10, 11))
    for j in range(10):
        w1[j, j] = 10.0
        w1[j, 10] = -5.0
    w2 = np.zeros((3, 11))
    for j, cls in enumerate(LocationClass):
        w2[int(correct_command(cls)), j] = 10.0
    return Genome(np.concatenate([w1.ravel(), w2.ravel()]), t)


def constant_command_genome(cmd: Command) -> Genome:
    """Ignores the input and always picks ``cmd``."""
    t = Topology(10, (10,), 3, "tanh", "softmax")
    w = np.zeros(143)
    bias_index = 110 + int(cmd) * 11 + 10
    w[bias_index] = 5.0
    return Genome(w, t)


@pytest.fixture
def report():
    """Record one acceptance criterion's verdict for the terminal summary."""

    def _report(number: int, name: str, passed: bool, detail: str = "") -> bool:
        ACCEPTANCE_RESULTS.append((number, name, bool(passed), detail))
        return passed

    return _report


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed, detail in sorted(ACCEPTANCE_RESULTS):
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{verdict}] criterion {number}: {name}" + (f" ({detail})" if detail else ""))
