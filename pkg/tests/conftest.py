import pytest

from packtravel.model import Instance


def make_tiny1(**overrides) -> Instance:
    """Two legs of length 1; city 1 holds (10, 3) and (1, 4), city 2 holds (4, 2)."""
    city_items = overrides.pop("city_items", [[(10, 3), (1, 4)], [(4, 2)]])
    args = dict(distances=[1, 1], capacity=10, v_min=0.1, v_max=1, rent=1, name="tiny1")
    args.update(overrides)
    return Instance.build(city_items=city_items, **args)


@pytest.fixture
def tiny1() -> Instance:
    return make_tiny1()


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL/SKIP line per acceptance criterion."""
    label = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}
    lines = []
    for outcome, tag in label.items():
        for rep in terminalreporter.stats.get(outcome, []):
            props = dict(getattr(rep, "user_properties", ()))
            if "criterion" in props and rep.when == "call":
                lines.append((props["criterion"], tag))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, tag in sorted(lines):
            terminalreporter.write_line(f"{tag}  {name}")
