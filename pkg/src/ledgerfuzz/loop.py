"""The genetic fuzzing loop: schedule, mutate, execute, learn, record.

One execution = fresh ledger from the target fixture, decode the input,
run its publish/query group under abort capture and a deadline. Contract
aborts, timeouts, and 0-verdicts all materialize as crash reports; nothing
escapes the execution wrapper, and finding a crash never stops the loop.

With ``workers=1`` and a fixed seed a run is bit-reproducible: corpus file
set, crash signatures, and final cover are identical across runs. More
workers relax reproducibility (thread interleaving orders corpus growth).
"""

from __future__ import annotations

import dataclasses
import shutil
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from random import Random
from typing import Callable, Optional

from .contract import ContractAbort
from .corpus import (
    AddCause,
    CorpusStore,
    CrashKind,
    CrashReport,
    Outcome,
    make_crash_report,
    quote,
)
from .coverage import CoverageMap, is_new_coverage
from .harness import (
    ConfigError,
    HarnessVerdict,
    decode,
    gen_seed_corpus,
    run_group,
    tx_ids,
)
from .ledger import SUCCESS, ExecTimeout, MockLedger
from .mutation import Dictionary, MutatorConfig, N_OPERATORS, mutate_with_ops
from .targets import TargetSpec, get_target


@dataclass(frozen=True)
class FuzzerConfig:
    target: str
    seed: int = 0
    mutators: MutatorConfig = MutatorConfig()
    budget_execs: int | None = None
    budget_secs: float | None = None
    exec_timeout: float = 10.0
    stats_interval: float = 3.0
    workers: int = 1
    dir: Path | None = None
    n_random_seeds: int = 16

    def __post_init__(self) -> None:
        if self.budget_execs is not None and self.budget_execs < 0:
            raise ConfigError("budget_execs must be >= 0")
        if self.budget_secs is not None and self.budget_secs <= 0:
            raise ConfigError("budget_secs must be positive")
        if self.exec_timeout <= 0:
            raise ConfigError("exec_timeout must be positive")
        if self.stats_interval <= 0:
            raise ConfigError("stats_interval must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.n_random_seeds < 0:
            raise ConfigError("n_random_seeds must be >= 0")


@dataclass(frozen=True)
class StatsSnapshot:
    elapsed: float
    corpus: int
    execs: int
    execs_per_sec: int
    cover: int
    crashers: int


def format_stats(snap: StatsSnapshot) -> str:
    return (
        f"{int(round(snap.elapsed))}s: corpus: {snap.corpus}, "
        f"execs: {snap.execs} ({snap.execs_per_sec}/sec), "
        f"cover: {snap.cover}, crashers: {snap.crashers}"
    )


@dataclass(frozen=True)
class ExecResult:
    """Outcome of one execution: a verdict or a crash, plus its coverage."""

    verdict: HarnessVerdict | None
    crash: CrashReport | None
    run_coverage: CoverageMap

    def __post_init__(self) -> None:
        if (self.verdict is None) == (self.crash is None):
            raise ValueError("exactly one of verdict/crash must be present")


@dataclass
class RunSummary:
    """Final stats plus every distinct crash signature seen this run."""

    final: StatsSnapshot
    signatures: list[str]
    time_to_find: dict[str, float]
    new_signature_count: int


def _crash_detail(group, params) -> str:
    if group is None:
        return ""
    lines = [f"group: {group.name}"]
    for name, value in zip(group.param_names, params):
        lines.append(f"  {name} = {quote(value)}")
    return "\n".join(lines)


def _execute_one(
    data: bytes,
    target: TargetSpec,
    config: FuzzerConfig,
    run_cov: CoverageMap | None = None,
    found_at: float = 0.0,
) -> tuple[ExecResult, MockLedger]:
    cov = run_cov if run_cov is not None else CoverageMap()
    cov.reset()
    ledger = MockLedger()
    deadline = time.monotonic() + config.exec_timeout
    txs = tx_ids()
    group = None
    params: list[bytes] = []
    try:
        ledger.mock_init(next(txs), list(target.fixture), target.contract,
                         coverage=cov, deadline=deadline)
        decoded = decode(data, target.groups)
        if decoded is None:
            # Only the empty input decodes to nothing; treat as clean.
            return ExecResult(HarnessVerdict(1), None, cov), ledger
        group, params = decoded
        verdict = run_group(ledger, target.contract, group, params, txs,
                            coverage=cov, deadline=deadline)
    except ExecTimeout:
        cov.reset()  # timed-out executions contribute no coverage
        report = make_crash_report(
            data, CrashKind.TIMEOUT, "execution exceeded the per-exec timeout",
            found_at=found_at, detail=_crash_detail(group, params),
        )
        return ExecResult(None, report, cov), ledger
    except Exception as exc:
        message = str(exc) if isinstance(exc, ContractAbort) else f"{type(exc).__name__}: {exc}"
        report = make_crash_report(
            data, CrashKind.ABORT, message,
            found_at=found_at, detail=_crash_detail(group, params),
        )
        return ExecResult(None, report, cov), ledger
    if verdict.code == 0:
        report = make_crash_report(
            data, CrashKind.ORACLE_MISMATCH, verdict.reason,
            found_at=found_at, detail=_crash_detail(group, params),
        )
        return ExecResult(None, report, cov), ledger
    return ExecResult(verdict, None, cov), ledger


def execute_one(data: bytes, target: TargetSpec, config: FuzzerConfig) -> ExecResult:
    """Run one input against a fresh fixture ledger; no failure escapes."""
    result, _ = _execute_one(data, target, config)
    return result


class _RunState:
    def __init__(self) -> None:
        self.lock = threading.Lock()
        self.cov_lock = threading.Lock()
        self.scheduled = 0
        self.execs = 0
        self.stop = threading.Event()
        self.first_find: dict[str, float] = {}
        self.new_signatures = 0


def _worker(
    index: int,
    config: FuzzerConfig,
    target: TargetSpec,
    store: CorpusStore,
    global_cov: CoverageMap,
    dictionary: Dictionary,
    state: _RunState,
    t0: float,
) -> None:
    rng = Random(f"{config.seed}:{index}")
    run_cov = CoverageMap()
    budget_execs = config.budget_execs
    budget_secs = config.budget_secs
    while not state.stop.is_set():
        if budget_secs is not None and time.monotonic() - t0 >= budget_secs:
            break
        with state.lock:
            if budget_execs is not None and state.scheduled >= budget_execs:
                break
            state.scheduled += 1
        entry = store.pick(rng)
        data, ops = mutate_with_ops(
            entry.data,
            rng,
            corpus_pick=lambda: store.pick_donor(rng, entry.sha),
            dictionary=dictionary,
            config=config.mutators,
        )
        found_at = time.monotonic() - t0
        result, _ = _execute_one(data, target, config, run_cov, found_at=found_at)
        with state.lock:
            state.execs += 1
        crash = result.crash
        timed_out = crash is not None and crash.kind is CrashKind.TIMEOUT
        new_cov = False
        if not timed_out:
            with state.cov_lock:
                new_cov = is_new_coverage(global_cov, result.run_coverage)
        if crash is not None:
            with state.lock:
                if crash.signature not in state.first_find:
                    state.first_find[crash.signature] = found_at
            newly_recorded = store.record_crash(crash)
            if newly_recorded:
                with state.lock:
                    state.new_signatures += 1
            # Breed from a crasher only while its signature is news; once a
            # bug family is suppressed, re-finding it must not flood the
            # corpus with priority-4 entries and starve exploration.
            if newly_recorded:
                if not timed_out:
                    store.add_entry(data, AddCause.ORACLE_SUSPECT, parent=entry,
                                    source_op=ops[-1] if ops else None)
                store.reward(entry, Outcome.SUSPECT)
            elif new_cov:
                store.add_entry(data, AddCause.NEW_COVERAGE, parent=entry,
                                source_op=ops[-1] if ops else None)
                store.reward(entry, Outcome.NEW_COVERAGE)
            else:
                store.reward(entry, Outcome.NOTHING)
        elif new_cov:
            store.add_entry(data, AddCause.NEW_COVERAGE, parent=entry,
                            source_op=ops[-1] if ops else None)
            store.reward(entry, Outcome.NEW_COVERAGE)
        else:
            store.reward(entry, Outcome.NOTHING)


def fuzz(
    config: FuzzerConfig,
    on_stats: Optional[Callable[[StatsSnapshot], None]] = None,
) -> RunSummary:
    """Run the loop until the budget is exhausted or the user interrupts.

    Emits a stats snapshot every ``stats_interval`` seconds plus one final
    snapshot; snapshots go to ``on_stats`` when given, otherwise they print.
    """
    target = get_target(config.target)
    if config.dir is None:
        raise ConfigError("fuzz requires a run directory")
    try:
        store = CorpusStore(config.dir, max_input_len=config.mutators.max_input_len)
    except OSError as exc:
        raise ConfigError(f"cannot set up run directory {config.dir}: {exc}") from exc

    probe = MockLedger()
    response = probe.mock_init("fixture-probe", list(target.fixture), target.contract)
    if response.status != SUCCESS:
        raise ConfigError(f"target fixture init failed: {response.message}")

    rng_master = Random(config.seed)
    dictionary = Dictionary.from_literals(target.literals)
    for frame in gen_seed_corpus(target.groups, target.seeds, rng_master, config.n_random_seeds):
        store.add_entry(frame, AddCause.SEED)

    global_cov = CoverageMap()
    state = _RunState()
    emit = on_stats if on_stats is not None else (lambda s: print(format_stats(s), flush=True))
    t0 = time.monotonic()
    last_execs = 0
    last_time = t0

    def snapshot(now: float) -> StatsSnapshot:
        nonlocal last_execs, last_time
        with state.lock:
            execs = state.execs
        dt = max(now - last_time, 1e-9)
        rate = int(round((execs - last_execs) / dt))
        snap = StatsSnapshot(
            elapsed=now - t0,
            corpus=len(store),
            execs=execs,
            execs_per_sec=rate,
            cover=global_cov.cover_count(),
            crashers=store.suppression_count(),
        )
        last_execs = execs
        last_time = now
        return snap

    workers = [
        threading.Thread(
            target=_worker,
            args=(i, config, target, store, global_cov, dictionary, state, t0),
            daemon=True,
        )
        for i in range(config.workers)
    ]
    for worker in workers:
        worker.start()
    next_emit = t0 + config.stats_interval
    try:
        while any(w.is_alive() for w in workers):
            for w in workers:
                if w.is_alive():
                    w.join(timeout=min(0.05, config.stats_interval))
                    break
            now = time.monotonic()
            if now >= next_emit:
                emit(snapshot(now))
                next_emit = now + config.stats_interval
            if config.budget_secs is not None and now - t0 >= config.budget_secs:
                state.stop.set()
    except KeyboardInterrupt:
        # Corpus and crashers are written eagerly; stopping the workers is
        # the whole shutdown. The summary still reports what was found.
        state.stop.set()
    for worker in workers:
        worker.join()

    final = snapshot(time.monotonic())
    emit(final)
    return RunSummary(
        final=final,
        signatures=list(state.first_find),
        time_to_find=dict(state.first_find),
        new_signature_count=state.new_signatures,
    )


NOT_FOUND = "—"  # em dash cell for "never found" in the bench table


def format_duration(seconds: float) -> str:
    """Human timing cell: 340ms, 6s, 1m6s, 3h45m."""
    if seconds < 1.0:
        return f"{int(round(seconds * 1000))}ms"
    total = int(seconds)
    hours, rem = divmod(total, 3600)
    minutes, secs = divmod(rem, 60)
    if hours:
        return f"{hours}h{minutes}m"
    if minutes:
        return f"{minutes}m{secs}s"
    return f"{secs}s"


@dataclass(frozen=True)
class BenchRow:
    op_id: int
    corpus: int
    execs: int
    cover: int
    time1: float | None
    time2: float | None


@dataclass(frozen=True)
class BenchReport:
    """Per-operator screening report: one fuzzing run per operator id."""

    rows: tuple[BenchRow, ...]

    def text_table(self) -> str:
        header = ("ID", "corpus", "execs", "cover", "time-1", "time-2")
        cells = [
            (
                str(r.op_id),
                str(r.corpus),
                str(r.execs),
                str(r.cover),
                NOT_FOUND if r.time1 is None else format_duration(r.time1),
                NOT_FOUND if r.time2 is None else format_duration(r.time2),
            )
            for r in self.rows
        ]
        widths = [
            max(len(header[col]), *(len(row[col]) for row in cells))
            for col in range(len(header))
        ]
        lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
        for row in cells:
            lines.append("  ".join(c.rjust(w) for c, w in zip(row, widths)))
        return "\n".join(lines)

    def csv_text(self) -> str:
        lines = ["id,corpus,execs,cover,time1_ms,time2_ms"]
        for r in self.rows:
            t1 = "" if r.time1 is None else str(int(round(r.time1 * 1000)))
            t2 = "" if r.time2 is None else str(int(round(r.time2 * 1000)))
            lines.append(f"{r.op_id},{r.corpus},{r.execs},{r.cover},{t1},{t2}")
        return "\n".join(lines) + "\n"


def bench_mutators(
    config: FuzzerConfig,
    per_op_execs: int | None = None,
    per_op_secs: float | None = None,
    on_progress: Optional[Callable[[BenchRow], None]] = None,
) -> BenchReport:
    """Fuzz once per operator id with that operator alone enabled.

    Each operator gets fresh corpus/crashers/suppressions directories under
    ``<dir>/bench/opNN`` and the same seed, so rows are comparable. time-1
    and time-2 are the elapsed times of the first and second distinct crash
    signatures, when found within the budget.
    """
    if per_op_execs is None and per_op_secs is None:
        raise ConfigError("bench needs a per-operator budget (execs or seconds)")
    if per_op_execs is not None and per_op_execs <= 0:
        raise ConfigError("per_op_execs must be positive")
    if per_op_secs is not None and per_op_secs <= 0:
        raise ConfigError("per_op_secs must be positive")
    if config.dir is None:
        raise ConfigError("bench requires a run directory")
    rows = []
    for op_id in range(N_OPERATORS):
        op_dir = Path(config.dir) / "bench" / f"op{op_id:02d}"
        if op_dir.exists():
            shutil.rmtree(op_dir)
        sub = dataclasses.replace(
            config,
            mutators=dataclasses.replace(config.mutators, enabled=frozenset({op_id})),
            budget_execs=per_op_execs,
            budget_secs=per_op_secs,
            dir=op_dir,
        )
        summary = fuzz(sub, on_stats=lambda s: None)
        times = sorted(summary.time_to_find.values())
        row = BenchRow(
            op_id=op_id,
            corpus=summary.final.corpus,
            execs=summary.final.execs,
            cover=summary.final.cover,
            time1=times[0] if len(times) > 0 else None,
            time2=times[1] if len(times) > 1 else None,
        )
        rows.append(row)
        if on_progress is not None:
            on_progress(row)
    return BenchReport(tuple(rows))
