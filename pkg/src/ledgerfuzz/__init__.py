"""Coverage-guided mutation fuzzer for mock-ledger smart contracts.

The pieces: an in-memory ledger standing in for the blockchain state
database, a contract interface with string dispatch, 20 byte-level
mutation operators with screening support, a priority-scheduled corpus, a
publish/query differential oracle, and the genetic loop tying them
together. Five built-in targets ship with the package; four carry planted
vulnerability classes the fuzzer is expected to rediscover.
"""

from .contract import Contract, ContractAbort, DispatchError, dispatch, route_invoke
from .corpus import (
    AddCause,
    CorpusEntry,
    CorpusStore,
    CrashKind,
    CrashReport,
    Outcome,
    crash_signature,
    make_crash_report,
    normalize_message,
    quote,
)
from .coverage import BUCKET_TABLE, MAP_SIZE, CoverageMap, is_new_coverage
from .harness import (
    ConfigError,
    HarnessVerdict,
    TestGroup,
    UnitCase,
    decode,
    encode,
    gen_seed_corpus,
    run_group,
    tx_ids,
)
from .ledger import (
    FAILURE,
    SUCCESS,
    ContractResponse,
    ExecTimeout,
    LedgerError,
    MockLedger,
    StubHandle,
    TxContext,
    err,
    ok,
)
from .loop import (
    BenchReport,
    BenchRow,
    ExecResult,
    FuzzerConfig,
    RunSummary,
    StatsSnapshot,
    bench_mutators,
    execute_one,
    format_duration,
    format_stats,
    fuzz,
)
from .mutation import (
    ARITH_MAX,
    DEFAULT_ENABLED,
    DEFAULT_MAX_INPUT_LEN,
    DEFAULT_STACK_MAX,
    INTERESTING_BYTE,
    INTERESTING_UINT16,
    INTERESTING_UINT32,
    N_OPERATORS,
    OPERATOR_NAMES,
    Dictionary,
    MutatorConfig,
    apply_operator,
    mutate,
    select_operator,
)
from .targets import TargetSpec, Witness, get_target, register, target_names

__version__ = "0.1.0"
