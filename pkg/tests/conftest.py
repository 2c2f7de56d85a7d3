import functools

import hypothesis
import numpy as np

import ridgecov
import ridgecov.gicf

hypothesis.settings.register_profile("default", max_examples=40, deadline=None)
hypothesis.settings.load_profile("default")

ASCENT_SLACK = 1e-9


class AscentLedger:
    """Every solver call made by the suite, checked for a monotone trace."""

    fits = 0
    worst_drop = 0.0
    violations = 0


def _checked_fit(original):
    @functools.wraps(original)
    def wrapper(*args, **kwargs):
        result = original(*args, **kwargs)
        AscentLedger.fits += 1
        drops = -np.diff(result.objective_trace)
        if drops.size:
            AscentLedger.worst_drop = max(AscentLedger.worst_drop, float(drops.max()))
            AscentLedger.violations += int(drops.max() > ASCENT_SLACK)
            assert drops.max() <= ASCENT_SLACK, (
                f"objective decreased by {drops.max():.3g} during a fit")
        return result

    wrapper.__wrapped_original__ = original
    return wrapper


# installed at import time so that modules importing ``fit`` by name also see it
ridgecov.gicf.fit = _checked_fit(ridgecov.gicf.fit)
ridgecov.fit = ridgecov.gicf.fit


# one line per acceptance criterion, printed after the run
ACCEPTANCE = {}


def record_criterion(number, status, detail):
    ACCEPTANCE[number] = f"criterion {number:2d}: {status:4s} {detail}"


def pytest_collection_modifyitems(items):
    # the ascent criterion summarizes every fit, so it runs last
    last = [item for item in items if item.name == "test_criterion_06_ascent"]
    items[:] = [item for item in items if item not in last] + last


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
