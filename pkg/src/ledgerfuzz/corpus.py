"""On-disk corpus, priority-weighted scheduling, and crash bookkeeping.

Layout under a run directory::

    corpus/<sha256hex>            input bytes, named by content hash
    crashers/<sha256hex>          crashing input bytes
    crashers/<sha256hex>.quoted   printable escaped rendering
    crashers/<sha256hex>.output   failure message plus oracle detail
    suppressions/<sha256hex>      one normalized failure line per file
    quarantine/<name>             corpus files whose hash did not match

Crash deduplication keys on (kind, normalized message), not on input
bytes, so the same bug found through different inputs collapses into one
suppression. Priorities are run-local scheduling state and are not
persisted; reloaded entries restart at priority 1.0.
"""

from __future__ import annotations

import enum
import hashlib
import re
import threading
from dataclasses import dataclass
from pathlib import Path
from random import Random

PRIORITY_MIN = 0.0625
PRIORITY_MAX = 16.0
PRIORITY_SEED = 1.0
PRIORITY_NEW_COVERAGE = 2.0
PRIORITY_ORACLE_SUSPECT = 4.0
REWARD_FACTOR = 2.0
DECAY_FACTOR = 0.95


class AddCause(enum.Enum):
    SEED = "seed"
    NEW_COVERAGE = "new-coverage"
    ORACLE_SUSPECT = "oracle-suspect"


class Outcome(enum.Enum):
    NEW_COVERAGE = "new-coverage"
    SUSPECT = "suspect"
    NOTHING = "nothing"


class CrashKind(enum.Enum):
    ABORT = "Abort"
    ORACLE_MISMATCH = "OracleMismatch"
    TIMEOUT = "Timeout"


_INITIAL_PRIORITY = {
    AddCause.SEED: PRIORITY_SEED,
    AddCause.NEW_COVERAGE: PRIORITY_NEW_COVERAGE,
    AddCause.ORACLE_SUSPECT: PRIORITY_ORACLE_SUSPECT,
}

_HEX_NUM_RE = re.compile(r"0x[0-9a-fA-F]+")
_DEC_NUM_RE = re.compile(r"\d+")

_QUOTE_ESCAPES = {
    0x07: "\\a", 0x08: "\\b", 0x0C: "\\f", 0x0A: "\\n",
    0x0D: "\\r", 0x09: "\\t", 0x0B: "\\v", 0x22: "\\\"", 0x5C: "\\\\",
}


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def quote(data: bytes) -> str:
    """Printable double-quoted rendering of arbitrary bytes."""
    parts = ['"']
    for b in data:
        esc = _QUOTE_ESCAPES.get(b)
        if esc is not None:
            parts.append(esc)
        elif 0x20 <= b < 0x7F:
            parts.append(chr(b))
        else:
            parts.append(f"\\x{b:02x}")
    parts.append('"')
    return "".join(parts)


def normalize_message(message: str) -> str:
    """Strip hex numbers and decimal offsets so message families dedup."""
    return _DEC_NUM_RE.sub("#", _HEX_NUM_RE.sub("#", message))


def crash_signature(kind: CrashKind, message: str) -> str:
    """Dedup hash: a pure function of (kind, normalized message)."""
    normalized = normalize_message(message)
    return hashlib.sha256(f"{kind.value}\x00{normalized}".encode("utf-8")).hexdigest()


@dataclass
class CorpusEntry:
    """One fuzz input with its scheduling score and lineage."""

    data: bytes
    priority: float
    depth: int
    source_op: int | None = None
    exec_count: int = 0
    sha: str = ""

    def __post_init__(self) -> None:
        if not self.sha:
            self.sha = sha256_hex(self.data)


@dataclass(frozen=True)
class CrashReport:
    """A captured failure: input, rendering, message, and dedup signature."""

    data: bytes
    rendered: str
    message: str
    kind: CrashKind
    signature: str
    found_at: float = 0.0
    detail: str = ""


def make_crash_report(
    data: bytes,
    kind: CrashKind,
    message: str,
    found_at: float = 0.0,
    detail: str = "",
) -> CrashReport:
    return CrashReport(
        data=bytes(data),
        rendered=quote(data),
        message=message,
        kind=kind,
        signature=crash_signature(kind, message),
        found_at=found_at,
        detail=detail,
    )


class CorpusStore:
    """The corpus directory plus crashers/suppressions records.

    All mutating operations are serialized through one lock; pick, reward,
    add_entry and record_crash are each atomic. Corpus writes happen
    eagerly, so there is nothing to flush on shutdown.
    """

    def __init__(self, root: Path | str, max_input_len: int = 4096) -> None:
        self.root = Path(root)
        self.corpus_dir = self.root / "corpus"
        self.crashers_dir = self.root / "crashers"
        self.suppressions_dir = self.root / "suppressions"
        self.max_input_len = max_input_len
        self._entries: list[CorpusEntry] = []
        self._hashes: set[str] = set()
        self._suppression_files: set[str] = set()
        self._lock = threading.Lock()
        for d in (self.corpus_dir, self.crashers_dir, self.suppressions_dir):
            d.mkdir(parents=True, exist_ok=True)
        self._load()

    def _load(self) -> None:
        for path in sorted(self.corpus_dir.iterdir()):
            if not path.is_file():
                continue
            data = path.read_bytes()
            if sha256_hex(data) != path.name:
                quarantine = self.root / "quarantine"
                quarantine.mkdir(exist_ok=True)
                path.rename(quarantine / path.name)
                continue
            self._entries.append(
                CorpusEntry(data=data, priority=PRIORITY_SEED, depth=0, sha=path.name)
            )
            self._hashes.add(path.name)
        for path in self.suppressions_dir.iterdir():
            if path.is_file():
                self._suppression_files.add(path.name)

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def entries(self) -> list[CorpusEntry]:
        return list(self._entries)

    def add_entry(
        self,
        data: bytes,
        cause: AddCause,
        parent: CorpusEntry | None = None,
        source_op: int | None = None,
    ) -> CorpusEntry | None:
        """Persist a new input; silently rejects exact duplicates.

        Returns the new entry, or ``None`` when the content hash is already
        present.
        """
        data = bytes(data)
        if len(data) > self.max_input_len:
            raise ValueError(f"input length {len(data)} exceeds max {self.max_input_len}")
        with self._lock:
            sha = sha256_hex(data)
            if sha in self._hashes:
                return None
            (self.corpus_dir / sha).write_bytes(data)
            entry = CorpusEntry(
                data=data,
                priority=_INITIAL_PRIORITY[cause],
                depth=parent.depth + 1 if parent is not None else 0,
                source_op=source_op,
                sha=sha,
            )
            self._entries.append(entry)
            self._hashes.add(sha)
            return entry

    def pick(self, rng: Random) -> CorpusEntry:
        """Priority-weighted draw; bumps the entry's exec_count."""
        with self._lock:
            if not self._entries:
                raise IndexError("pick from an empty corpus")
            weights = [e.priority for e in self._entries]
            entry = rng.choices(self._entries, weights=weights, k=1)[0]
            entry.exec_count += 1
            return entry

    def pick_donor(self, rng: Random, exclude_sha: str) -> bytes | None:
        """Uniform draw of another entry's bytes, or None without a second entry."""
        with self._lock:
            candidates = [e for e in self._entries if e.sha != exclude_sha]
            if not candidates:
                return None
            return candidates[rng.randrange(len(candidates))].data

    def reward(self, entry: CorpusEntry, outcome: Outcome) -> None:
        """Multiplicative priority update, clamped to [1/16, 16]."""
        with self._lock:
            if outcome is Outcome.NOTHING:
                entry.priority *= DECAY_FACTOR
            else:
                entry.priority *= REWARD_FACTOR
            entry.priority = min(PRIORITY_MAX, max(PRIORITY_MIN, entry.priority))

    def record_crash(self, report: CrashReport) -> bool:
        """Write crasher + suppression files; False when the signature is known.

        Fuzzing continues after recording either way; this only persists.
        """
        with self._lock:
            supp_name = sha256_hex(report.signature.encode("ascii"))
            if supp_name in self._suppression_files:
                return False
            data_hash = sha256_hex(report.data)
            (self.crashers_dir / data_hash).write_bytes(report.data)
            (self.crashers_dir / f"{data_hash}.quoted").write_text(
                report.rendered + "\n", encoding="utf-8"
            )
            output = report.message
            if report.detail:
                output += "\n" + report.detail
            (self.crashers_dir / f"{data_hash}.output").write_text(
                output + "\n", encoding="utf-8"
            )
            line = f"{report.kind.value}: {normalize_message(report.message)}\n"
            (self.suppressions_dir / supp_name).write_text(line, encoding="utf-8")
            self._suppression_files.add(supp_name)
            return True

    def suppression_count(self) -> int:
        return len(self._suppression_files)

    def crasher_file_count(self) -> int:
        return sum(1 for p in self.crashers_dir.iterdir() if p.is_file())
