import itertools
import math

import pytest

from avgtverberg.groups import GroupSpec

ACCEPTANCE_LINES: list[str] = []


def _factorizations(limit=24, smallest=2):
    out = []

    def rec(prefix, prod):
        if prefix:
            out.append(tuple(prefix))
        start = prefix[-1] if prefix else smallest
        for q in range(start, limit // prod + 1):
            rec(prefix + [q], prod * q)

    rec([], 1)
    return out


# every abelian group of order <= 24 up to factor ordering, plus a few with
# trivial or unsorted factors
SMALL_GROUPS = sorted(set(_factorizations()) | {(1,), (1, 4), (3, 2), (3, 3, 2), (2, 1, 3), (6, 4, 1)},
                      key=lambda t: (math.prod(t), t))


@pytest.fixture(params=SMALL_GROUPS, ids=lambda t: "x".join(map(str, t)))
def small_group(request):
    return GroupSpec(request.param)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
