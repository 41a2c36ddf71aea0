import os
from fractions import Fraction

import numpy as np
import pytest

from splitsecant.config import RunConfig

FULL = os.environ.get("SPLITSECANT_FULL") == "1"

_criteria: dict[str, tuple[bool, str]] = {}


def record_criterion(key: str, ok: bool, detail: str) -> None:
    """Record one check; several checks under the same key are ANDed."""
    if key in _criteria:
        prev_ok, prev_detail = _criteria[key]
        _criteria[key] = (prev_ok and ok, f"{prev_detail}; {detail}")
    else:
        _criteria[key] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria, key=lambda k: [int(x) if x.isdigit() else x for x in k.split(".")]):
        ok, detail = _criteria[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def cfg(tmp_path):
    return RunConfig(workers=1)


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("SPLITSECANT_CACHE", str(tmp_path / "certificates.jsonl"))
    monkeypatch.delenv("SPLITSECANT_PRIME", raising=False)
    monkeypatch.delenv("SPLITSECANT_SEED", raising=False)


def fraction_rank(rows) -> int:
    """Rank over the rationals by exact Gaussian elimination."""
    m = [[Fraction(int(x)) for x in row] for row in rows]
    rank = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        piv = next((r for r in range(rank, len(m)) if m[r][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][c] != 0:
                f = m[r][c] / m[rank][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def modp_rank_naive(rows, p: int) -> int:
    """Row reduction mod p with Python ints, independent of the numpy kernel."""
    m = [[int(x) % p for x in row] for row in rows]
    rank = 0
    cols = len(m[0]) if m else 0
    for c in range(cols):
        piv = next((r for r in range(rank, len(m)) if m[r][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][c], -1, p)
        m[rank] = [x * inv % p for x in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][c]:
                f = m[r][c]
                m[r] = [(a - f * b) % p for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
