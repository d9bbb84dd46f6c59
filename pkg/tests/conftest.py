import sys
import itertools

import pytest

from thetalift.localfield import FieldParams

KINDS = ("split", "inert", "ramified")


@pytest.fixture(params=list(itertools.product(KINDS, (3, 5))), ids=lambda x: f"{x[0]}-{x[1]}")
def field(request):
    kind, p = request.param
    return FieldParams.make(p, kind)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not any(mod.RESULTS.values()):
        return
    terminalreporter.section("acceptance criteria")
    for k, title in mod.TITLES.items():
        parts = mod.RESULTS[k]
        if not parts:
            terminalreporter.write_line(f"criterion {k:2d} ({title}): NOT RUN")
            continue
        verdict = "PASS" if all(ok for _, ok, _ in parts) else "FAIL"
        detail = "; ".join(f"{name}: {'ok' if ok else 'fails'}" + (f" ({note})" if note else "")
                           for name, ok, note in parts)
        terminalreporter.write_line(f"criterion {k:2d} ({title}): {verdict} - {detail}")
