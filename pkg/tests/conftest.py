import pytest

from pillaicert.field import build_constants

# Lines recorded by the acceptance suite, echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def consts():
    return build_constants(192)


@pytest.fixture(scope="session")
def consts384():
    return build_constants(384)


@pytest.fixture(scope="session")
def full_run():
    """The full default pipeline, computed once per session."""
    from pillaicert.pipeline import PipelineConfig, execute

    return execute(PipelineConfig())


@pytest.fixture(scope="session")
def certificate(full_run):
    return full_run[0]


@pytest.fixture(scope="session")
def replay_reductions(full_run):
    return full_run[1].replay_red
