from __future__ import annotations

import random

import pytest

from ledgerfuzz import (
    AddCause,
    CorpusStore,
    CrashKind,
    Outcome,
    crash_signature,
    make_crash_report,
    normalize_message,
    quote,
)
from ledgerfuzz.corpus import sha256_hex


def test_seed_entry_priority_and_depth(tmp_path):
    store = CorpusStore(tmp_path)
    entry = store.add_entry(b"F1", AddCause.SEED)
    assert entry.priority == 1.0
    assert entry.depth == 0
    assert (tmp_path / "corpus" / entry.sha).read_bytes() == b"F1"


def test_duplicate_data_rejected_silently(tmp_path):
    store = CorpusStore(tmp_path)
    assert store.add_entry(b"same", AddCause.SEED) is not None
    assert store.add_entry(b"same", AddCause.NEW_COVERAGE) is None
    assert len(store) == 1


def test_child_entry_inherits_depth(tmp_path):
    store = CorpusStore(tmp_path)
    parent = store.add_entry(b"p", AddCause.SEED)
    for _ in range(3):
        parent = store.add_entry(parent.data + b"x", AddCause.NEW_COVERAGE, parent=parent)
    child = store.add_entry(b"deep", AddCause.NEW_COVERAGE, parent=parent)
    assert child.depth == 4
    assert child.priority == 2.0
    suspect = store.add_entry(b"sus", AddCause.ORACLE_SUSPECT)
    assert suspect.priority == 4.0


def test_oversized_entry_rejected(tmp_path):
    store = CorpusStore(tmp_path, max_input_len=4)
    with pytest.raises(ValueError, match="exceeds max"):
        store.add_entry(b"12345", AddCause.SEED)


def test_pick_single_entry_always_returned(tmp_path):
    store = CorpusStore(tmp_path)
    entry = store.add_entry(b"only", AddCause.SEED)
    rng = random.Random(0)
    for _ in range(10):
        assert store.pick(rng) is entry
    assert entry.exec_count == 10


def test_pick_frequency_follows_priority(tmp_path):
    store = CorpusStore(tmp_path)
    light = store.add_entry(b"light", AddCause.SEED)
    heavy = store.add_entry(b"heavy", AddCause.SEED)
    heavy.priority = 3.0
    rng = random.Random(42)
    draws = 20_000
    heavy_hits = sum(1 for _ in range(draws) if store.pick(rng) is heavy)
    assert abs(heavy_hits / draws - 0.75) < 0.02


def test_reward_doubles_and_clamps(tmp_path):
    store = CorpusStore(tmp_path)
    entry = store.add_entry(b"e", AddCause.SEED)
    store.reward(entry, Outcome.NEW_COVERAGE)
    assert entry.priority == 2.0
    entry.priority = 16.0
    store.reward(entry, Outcome.SUSPECT)
    assert entry.priority == 16.0
    entry.priority = 0.0625
    store.reward(entry, Outcome.NOTHING)
    assert entry.priority == 0.0625


def test_reward_decay_matches_arithmetic_oracle(tmp_path):
    store = CorpusStore(tmp_path)
    entry = store.add_entry(b"e", AddCause.SEED)
    for _ in range(14):
        store.reward(entry, Outcome.NOTHING)
    assert entry.priority == pytest.approx(0.95**14, rel=1e-9)
    assert entry.priority == pytest.approx(0.4877, abs=1e-4)


def test_record_crash_writes_three_files_and_suppression(tmp_path):
    store = CorpusStore(tmp_path)
    report = make_crash_report(b"\x01bad", CrashKind.ABORT, "overflow at 12", detail="ctx")
    assert store.record_crash(report) is True
    data_hash = sha256_hex(b"\x01bad")
    crashers = tmp_path / "crashers"
    assert (crashers / data_hash).read_bytes() == b"\x01bad"
    assert (crashers / f"{data_hash}.quoted").read_text() == '"\\x01bad"\n'
    output = (crashers / f"{data_hash}.output").read_text()
    assert "overflow at 12" in output and "ctx" in output
    assert store.suppression_count() == 1
    assert store.crasher_file_count() == 3


def test_same_signature_different_input_dedups(tmp_path):
    store = CorpusStore(tmp_path)
    first = make_crash_report(b"input-a", CrashKind.ABORT, "overflow at balance 2147483001")
    second = make_crash_report(b"input-b", CrashKind.ABORT, "overflow at balance 2147483646")
    assert first.signature == second.signature
    assert store.record_crash(first) is True
    assert store.record_crash(second) is False
    assert store.crasher_file_count() == 3
    assert store.suppression_count() == 1


def test_distinct_kinds_same_message_are_distinct_signatures(tmp_path):
    store = CorpusStore(tmp_path)
    abort = make_crash_report(b"x", CrashKind.ABORT, "same text")
    mismatch = make_crash_report(b"y", CrashKind.ORACLE_MISMATCH, "same text")
    assert abort.signature != mismatch.signature
    assert store.record_crash(abort) is True
    assert store.record_crash(mismatch) is True
    assert store.suppression_count() == 2


def test_suppression_files_hold_one_normalized_line(tmp_path):
    store = CorpusStore(tmp_path)
    report = make_crash_report(b"x", CrashKind.ABORT, "wrap at 0xDEAD offset 17")
    store.record_crash(report)
    files = list((tmp_path / "suppressions").iterdir())
    assert len(files) == 1
    assert files[0].read_text() == "Abort: wrap at # offset #\n"


def test_normalize_message_examples():
    assert normalize_message("overflow at balance 2147483001") == "overflow at balance #"
    assert normalize_message("ptr 0xdeadBEEF byte 42") == "ptr # byte #"
    assert crash_signature(CrashKind.ABORT, "a 1 b") == crash_signature(CrashKind.ABORT, "a 999 b")


def test_quote_renders_printable_escapes():
    assert quote(b"ab") == '"ab"'
    assert quote(b'"\\\n\x00\x7f') == '"\\"\\\\\\n\\x00\\x7f"'


def test_persistence_roundtrip_resets_priorities(tmp_path):
    store = CorpusStore(tmp_path)
    a = store.add_entry(b"alpha", AddCause.SEED)
    b = store.add_entry(b"beta", AddCause.ORACLE_SUSPECT)
    store.reward(a, Outcome.NEW_COVERAGE)
    assert {e.sha for e in store.entries} == {a.sha, b.sha}

    reloaded = CorpusStore(tmp_path)
    assert {e.sha: e.data for e in reloaded.entries} == {a.sha: b"alpha", b.sha: b"beta"}
    assert all(e.priority == 1.0 for e in reloaded.entries)
    assert reloaded.add_entry(b"alpha", AddCause.SEED) is None


def test_reload_quarantines_corrupt_corpus_files(tmp_path):
    store = CorpusStore(tmp_path)
    entry = store.add_entry(b"good", AddCause.SEED)
    (tmp_path / "corpus" / entry.sha).write_bytes(b"tampered")
    reloaded = CorpusStore(tmp_path)
    assert len(reloaded) == 0
    assert (tmp_path / "quarantine" / entry.sha).read_bytes() == b"tampered"


def test_suppressions_survive_reload(tmp_path):
    store = CorpusStore(tmp_path)
    report = make_crash_report(b"x", CrashKind.TIMEOUT, "too slow")
    assert store.record_crash(report) is True
    reloaded = CorpusStore(tmp_path)
    assert reloaded.record_crash(report) is False
    assert reloaded.suppression_count() == 1
