from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import numpy as np
import pytest

from utrp.density import PiecewiseDensity
from utrp.model import (
    Certain,
    Determinate,
    Indeterminate,
    Point,
    StrongInterval,
    StrongSet,
    UncertainEvent,
    UncertainTrace,
    WeakDensity,
    WeakDist,
    normalize_trace,
)

DATA = Path(__file__).resolve().parent.parent / "data"
LABELS = "abcdefg"


def random_trace(seed: int, max_events: int = 6, case: str = "r", *, strong: bool = False) -> UncertainTrace:
    """Random uncertain trace on the time axis [0, 10].

    Mixes point timestamps (on a coarse grid, so ties happen), uniform
    intervals and, occasionally, a two-piece linear density.  With ``strong``
    the trace keeps strong attributes (sets, intervals, bare "?" flags).
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, max_events + 1))
    events = []
    for i in range(n):
        k = int(rng.integers(1, 4))
        labels = [str(x) for x in rng.choice(list(LABELS), size=k, replace=False)]
        if k == 1 and rng.random() < 0.6:
            activity = Certain(labels[0])
        elif strong and rng.random() < 0.5:
            activity = StrongSet(frozenset(labels))
        else:
            w = rng.random(k) + 0.05
            activity = WeakDist(dict(zip(labels, (w / w.sum()).tolist())))

        kind = rng.random()
        if kind < 0.4:
            ts = Point(float(rng.integers(0, 11)))
        else:
            lo = float(np.round(rng.uniform(0, 8), 2))
            hi = float(np.round(lo + rng.uniform(0.5, 4), 2))
            if strong and kind < 0.7:
                ts = StrongInterval(lo, hi)
            elif kind < 0.9:
                ts = WeakDensity(PiecewiseDensity.uniform(lo, hi))
            else:
                mid = (lo + hi) / 2
                # Triangle-ish density: rising then falling linear pieces.
                ts = WeakDensity(
                    PiecewiseDensity.from_pieces([(lo, mid, [0.0, 1.0]), (mid, hi, [1.0, -1.0])])
                )

        r = rng.random()
        if r < 0.55:
            ind = Determinate()
        elif strong and r < 0.7:
            ind = Indeterminate()
        else:
            ind = Indeterminate(float(np.round(rng.uniform(0.05, 0.95), 2)))
        events.append(UncertainEvent(f"e{i + 1}", case, activity, ts, ind))
    return UncertainTrace(case, tuple(events))


def random_weak_trace(seed: int, max_events: int = 6) -> UncertainTrace:
    return normalize_trace(random_trace(seed, max_events))


@pytest.fixture
def data_dir() -> Path:
    return DATA


# -- acceptance summary ----------------------------------------------------------

def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion covered by the test")
    config._criteria = defaultdict(list)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        for mark in item.iter_markers("criterion"):
            item.config._criteria[mark.args[0]].append((item.name, rep.passed))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    crit = getattr(config, "_criteria", None)
    if not crit:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(crit):
        results = crit[n]
        failed = [name for name, ok in results if not ok]
        status = "PASS" if not failed else "FAIL"
        detail = f" (failing: {', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"criterion {n}: {status} [{len(results)} checks]{detail}")
