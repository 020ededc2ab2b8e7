from __future__ import annotations

import pytest

from strata.corpus import CORPUS_NAMES, load, load_algebra
from strata.exactlin import Field

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record_criterion(number: int, ok: bool, detail: str = "") -> None:
    ACCEPTANCE[number] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        line = f"criterion {k}: {'PASS' if ok else 'FAIL'}"
        terminalreporter.write_line(f"{line} ({detail})" if detail else line)


@pytest.fixture(scope="session")
def corpus():
    return {name: load_algebra(name) for name in CORPUS_NAMES}


@pytest.fixture(scope="session")
def corpus_f2():
    F = Field(2)
    return {name: load_algebra(name, F) for name in CORPUS_NAMES}


@pytest.fixture(scope="session")
def kron_module():
    from strata.module import from_literal

    A, lits = load("kron")
    return A, from_literal(A, lits["M"])
