import numpy as np
import pytest

from occuscan import ComplexFrame


def make_frame(samples, rate=1e6, freq=100e6, t=0.0) -> ComplexFrame:
    return ComplexFrame(
        samples=np.asarray(samples, dtype=np.complex128),
        sample_rate_hz=rate,
        center_freq_hz=freq,
        capture_time=t,
    )


@pytest.fixture
def frame_factory():
    return make_frame


def pytest_configure(config):
    config.criterion_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance verdict lines after the run, outside capture."""
    lines = getattr(config, "criterion_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
