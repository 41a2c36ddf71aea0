"""Append-only JSONL store of statement certificates."""

from __future__ import annotations

import json
import os
import threading
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .config import RunConfig
from .statements import StatementOutcome, evaluate_statement, parse_descriptor

CACHE_ENV = "SPLITSECANT_CACHE"


def default_cache_path() -> Path:
    if os.environ.get(CACHE_ENV):
        return Path(os.environ[CACHE_ENV])
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "splitsecant" / "certificates.jsonl"


@dataclass(frozen=True)
class CertificateRecord:
    descriptor: str
    verdict: str
    achieved_rank: int
    target: int
    seed: int
    prime: int
    attempts: int
    timestamp: str
    version: str
    outcome: dict

    @classmethod
    def from_outcome(cls, out: StatementOutcome) -> "CertificateRecord":
        stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
        return cls(out.descriptor, out.verdict.value, out.achieved_rank, out.target, out.seed,
                   out.prime, out.attempts, stamp, __version__, out.to_dict())

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "CertificateRecord":
        return cls(**json.loads(line))


def replay(record: CertificateRecord) -> StatementOutcome:
    """Re-run a recorded statement with its own seed, prime and attempt count."""
    cfg = RunConfig(prime=record.prime, seed=record.seed, max_attempts=record.attempts,
                    matrix_cell_budget=None)
    return evaluate_statement(parse_descriptor(record.descriptor), cfg)


class CertificateCache:
    """Outcomes keyed by (descriptor, prime, seed); later records win."""

    def __init__(self, path: str | os.PathLike) -> None:
        self.path = Path(path)
        self._lock = threading.Lock()
        self._index: dict[tuple[str, int, int], CertificateRecord] = {}
        if self.path.exists():
            with self.path.open() as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        rec = CertificateRecord.from_json(line)
                    except (ValueError, TypeError):
                        continue
                    self._index[(rec.descriptor, rec.prime, rec.seed)] = rec

    def __len__(self) -> int:
        return len(self._index)

    def records(self) -> list[CertificateRecord]:
        return list(self._index.values())

    def lookup(self, descriptor: str, prime: int, seed: int) -> StatementOutcome | None:
        rec = self._index.get((descriptor, prime, seed))
        return StatementOutcome.from_dict(rec.outcome) if rec else None

    def record(self, outcome: StatementOutcome) -> CertificateRecord:
        rec = CertificateRecord.from_outcome(outcome)
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a") as fh:
                fh.write(rec.to_json() + "\n")
            self._index[(rec.descriptor, rec.prime, rec.seed)] = rec
        return rec
