import random

import pytest

from linkoid.moves import braid_linkoid, random_braid_word

_CRITERIA: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record the verdict of an acceptance criterion for the end-of-run summary."""

    def record(number: int, passed: bool, detail: str = ""):
        _CRITERIA[number] = (bool(passed), detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        passed, detail = _CRITERIA[number]
        terminalreporter.write_line(
            f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")


def random_mixed_diagram(rng: random.Random, max_strands: int = 4, max_length: int = 8):
    """Braid-based diagram; some permutation cycles are closed into loops."""
    n = rng.randint(1, max_strands)
    word = random_braid_word(rng, n, rng.randint(0, max_length)) if n > 1 else []
    perm = list(range(n))
    for g in word:
        i = abs(g) - 1
        perm[i], perm[i + 1] = perm[i + 1], perm[i]
    seen, closed = set(), []
    for k in range(n):
        if k in seen:
            continue
        cycle = [k]
        seen.add(k)
        j = perm[k]
        while j != k:
            cycle.append(j)
            seen.add(j)
            j = perm[j]
        if rng.random() < 0.35:
            closed += cycle
    return braid_linkoid(word, n, closed)
