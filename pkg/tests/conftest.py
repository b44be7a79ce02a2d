from collections import defaultdict

import pytest

from _support import CASES

TITLES = {
    1: "downgrade of (2,3,-6) reproduces the blow-up divisor",
    2: "scaling by 6 and isotropy of 2D, 3D",
    3: "weights (-1,1,1) normal-form to [-1,0]*E",
    4: "closed formula agrees with downgrade on every triple up to 12",
    5: "sections, generation degree and centre ideal",
    6: "property suites",
    7: "exotic threefold example data",
    8: "properness of the (2,3,-6) divisor",
}

_outcomes = defaultdict(list)  # criterion -> [(nodeid, passed, seconds)]


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): test belongs to acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _outcomes[marker.args[0]].append((item.nodeid, rep.passed, rep.duration))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(TITLES):
        runs = _outcomes.get(n)
        if not runs:
            tr.write_line(f"[{n}] SKIP  {TITLES[n]} (not collected)")
            continue
        ok = all(p for _, p, _ in runs)
        secs = sum(d for _, _, d in runs)
        extra = f", {sum(CASES.values())} random cases" if n == 6 else ""
        tr.write_line(f"[{n}] {'PASS' if ok else 'FAIL'}  {TITLES[n]} "
                      f"({len(runs)} test(s), {secs:.2f}s{extra})")
