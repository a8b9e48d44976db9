import pytest

from netcournot.network import GameParams, MarketNetwork

ACCEPTANCE_LINES = []


@pytest.fixture
def instance_a():
    return MarketNetwork.from_edges(1, 1, [(0, 0)], firm_ids=["f1"], market_ids=["m1"])


@pytest.fixture
def instance_b():
    return MarketNetwork.from_edges(
        2, 2, [(0, 0), (0, 1), (1, 0)], firm_ids=["f1", "f2"], market_ids=["m1", "m2"]
    )


@pytest.fixture
def instance_c():
    return MarketNetwork.from_edges(2, 1, [(0, 0), (1, 0)], firm_ids=["f1", "f2"], market_ids=["m1"])


@pytest.fixture
def unit_params():
    """alpha=10, beta=1, c=1 for a given market count."""
    return lambda m: GameParams.uniform(m, alpha=10.0, beta=1.0, c=1.0)


@pytest.fixture
def note(request):
    """Attach a free-text line to the acceptance summary of the running test."""
    return lambda text: request.node.user_properties.append(("note", text))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    notes = [v for k, v in item.user_properties if k == "note"]
    status = "PASS" if report.passed else "FAIL"
    ACCEPTANCE_LINES.append(f"[{status}] {marker.args[0]}" + (f"  ({'; '.join(notes)})" if notes else ""))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
