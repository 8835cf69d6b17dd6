import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(__file__).parent / "data"


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        report.user_properties.append(("criterion", mark.args))


def pytest_terminal_summary(terminalreporter):
    results: dict[int, dict] = {}
    for reports in terminalreporter.stats.values():
        for rep in reports:
            props = dict(getattr(rep, "user_properties", ()))
            if "criterion" not in props:
                continue
            if rep.when != "call" and not (rep.skipped or rep.failed):
                continue
            number, title = props["criterion"]
            entry = results.setdefault(number, {"title": title, "outcomes": []})
            entry["outcomes"].append(rep.outcome)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        outs = results[number]["outcomes"]
        if "failed" in outs:
            status = "FAIL"
        elif all(o == "skipped" for o in outs):
            status = "SKIP"
        else:
            status = "PASS"
        terminalreporter.write_line(f"{status}  criterion {number:>2}: {results[number]['title']}")


@pytest.fixture(scope="session")
def annotated_docs():
    from agendaframe.corpus import load_corpus

    return load_corpus(DATA / "annotated_50.jsonl")
