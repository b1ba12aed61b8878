import sys

import numpy as np
import pytest
from hypothesis import settings

from fstruct.registry import registered_instances

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

SPACES = registered_instances()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def space_id(S):
    return S.label


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid in sorted(results):
        parts = results[cid]
        ok = all(p[1] for p in parts)
        failed = [f"{name}: {detail}" if detail else name for name, good, detail in parts if not good]
        tr.write_line(f"criterion {cid}: {'PASS' if ok else 'FAIL'}"
                      + (f"  [{'; '.join(failed)}]" if failed else f"  ({len(parts)} check(s))"))
