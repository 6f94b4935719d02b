import numpy as np
import pytest

import r3net
from r3net import analysis, block, experiments

CRITERIA = pytest.StashKey[dict]()
SPARSITY = pytest.StashKey[dict]()


def _watch_splitter(config):
    """Route every splitter call through an l0 <= n check for the whole session."""
    seen = config.stash[SPARSITY]
    original = block.sign_split_forward

    def watched(z):
        y = original(z)
        n = y.shape[-1] // 2
        counts = np.atleast_1d(np.count_nonzero(y, axis=-1))
        seen["outputs"] += counts.size
        seen["violations"] += int(np.sum(counts > n))
        return y

    for mod in (block, analysis, experiments, r3net):
        mod.sign_split_forward = watched


def pytest_configure(config):
    config.stash[CRITERIA] = {}
    config.stash[SPARSITY] = {"outputs": 0, "violations": 0}
    _watch_splitter(config)


def pytest_collection_modifyitems(config, items):
    # the sparsity criterion audits everything that ran before it
    last = [it for it in items if it.get_closest_marker("audit_last")]
    items[:] = [it for it in items if it not in last] + last


@pytest.fixture
def criterion(request):
    table = request.config.stash[CRITERIA]

    def record(key, passed, detail=""):
        table[key] = (bool(passed), detail)
        return passed

    return record


@pytest.fixture
def sparsity_registry(request):
    return request.config.stash[SPARSITY]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    table = config.stash[CRITERIA]
    if not table:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(table, key=lambda k: (int("".join(c for c in k if c.isdigit()) or 0), k)):
        passed, detail = table[key]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  criterion {key}: {detail}")
