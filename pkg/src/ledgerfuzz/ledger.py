"""In-memory stand-in for the chaincode state database.

Contracts never touch a real network: ``mock_init``/``mock_invoke`` open a
transaction on a :class:`MockLedger`, hand the contract a :class:`StubHandle`
scoped to that call, and tear everything down afterwards. State is a plain
string-to-bytes map with no rollback; writes made before a contract failure
stay visible, which is exactly what lets empty-key style bugs surface.
"""

from __future__ import annotations

import time
import zlib
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from .contract import Contract
    from .coverage import CoverageMap

SUCCESS = 200
FAILURE = 500


class LedgerError(Exception):
    """Misuse of the ledger API; a framework error, not a contract failure."""


class ExecTimeout(Exception):
    """Raised from stub operations once the execution deadline has passed."""


@dataclass(frozen=True)
class ContractResponse:
    """Status/payload/message triple returned by contract entry points."""

    status: int
    payload: bytes = b""
    message: str = ""

    def __post_init__(self) -> None:
        if self.status not in (SUCCESS, FAILURE):
            raise ValueError(f"status must be {SUCCESS} or {FAILURE}, got {self.status}")
        if self.status == FAILURE and not self.message:
            raise ValueError("failure responses require a message")


def ok(payload: bytes = b"") -> ContractResponse:
    return ContractResponse(SUCCESS, payload)


def err(message: str) -> ContractResponse:
    return ContractResponse(FAILURE, message=message)


@dataclass
class TxContext:
    """One simulated transaction: an id plus the raw argument list."""

    uuid: str
    args: list[bytes]


def _auto_site(label: str) -> int:
    # Stable across runs and processes, unlike hash().
    return zlib.crc32(label.encode("utf-8")) & 0xFFFF


class StubHandle:
    """Capability handed to a contract for the duration of one call.

    Exposes the key-value state plus the coverage hook. The handle dies with
    its transaction; using a stashed handle afterwards raises
    :class:`LedgerError`.
    """

    def __init__(
        self,
        ledger: "MockLedger",
        coverage: Optional["CoverageMap"] = None,
        deadline: float | None = None,
        function: str = "",
    ) -> None:
        self._ledger = ledger
        self._coverage = coverage
        self._deadline = deadline
        self._active = True
        self._function = function
        self._op_index = 0

    def _check(self) -> None:
        if not self._active:
            raise LedgerError("stub handle used outside its transaction")
        if self._deadline is not None and time.monotonic() > self._deadline:
            raise ExecTimeout("execution deadline exceeded")

    def _record_op(self, op: str) -> None:
        if self._coverage is not None:
            self._coverage.record(_auto_site(f"{self._function}|{op}|{self._op_index}"))
        self._op_index += 1

    def enter_function(self, name: str) -> None:
        """Mark dispatch into a named contract function.

        Records one coverage site per dispatched function and restarts the
        per-call state-op numbering used for derived sites.
        """
        self._check()
        self._function = name
        self._op_index = 0
        if self._coverage is not None:
            self._coverage.record(_auto_site(f"fn|{name}"))

    def cover(self, site: int) -> None:
        """Explicit instrumentation hook for branch points inside targets."""
        self._check()
        if self._coverage is not None:
            self._coverage.record(site)

    def put_state(self, key: str, value: bytes) -> None:
        self._check()
        self._record_op("put")
        self._ledger.put_state(key, value)

    def get_state(self, key: str) -> bytes | None:
        self._check()
        self._record_op("get")
        return self._ledger.get_state(key)

    def del_state(self, key: str) -> None:
        self._check()
        self._record_op("del")
        self._ledger.del_state(key)


class MockLedger:
    """String-to-bytes state database plus per-call transaction bookkeeping.

    One instance is single-threaded: exactly one transaction may be open at
    a time. Empty keys and empty values are legal; deleting a key removes
    the entry entirely, so absence is always distinguishable from an empty
    value.
    """

    def __init__(self) -> None:
        self.state: dict[str, bytes] = {}
        self.current_tx: TxContext | None = None
        self.invocation_count = 0

    def _require_tx(self) -> None:
        if self.current_tx is None:
            raise LedgerError("no open transaction")

    def put_state(self, key: str, value: bytes) -> None:
        self._require_tx()
        self.state[key] = bytes(value)

    def get_state(self, key: str) -> bytes | None:
        self._require_tx()
        return self.state.get(key)

    def del_state(self, key: str) -> None:
        self._require_tx()
        self.state.pop(key, None)

    def _call(
        self,
        uuid: str,
        args: list[bytes],
        entry,
        coverage: Optional["CoverageMap"],
        deadline: float | None,
        function: str,
    ) -> ContractResponse:
        if not uuid:
            raise LedgerError("empty tx id")
        if self.current_tx is not None:
            raise LedgerError("transaction already open")
        self.current_tx = TxContext(uuid=uuid, args=list(args))
        stub = StubHandle(self, coverage=coverage, deadline=deadline, function=function)
        try:
            return entry(stub, list(args))
        finally:
            stub._active = False
            self.current_tx = None
            self.invocation_count += 1

    def mock_init(
        self,
        uuid: str,
        args: list[bytes],
        contract: "Contract",
        coverage: Optional["CoverageMap"] = None,
        deadline: float | None = None,
    ) -> ContractResponse:
        """Run the contract's Init entry point inside a fresh transaction."""
        return self._call(uuid, args, contract.init, coverage, deadline, "init")

    def mock_invoke(
        self,
        uuid: str,
        args: list[bytes],
        contract: "Contract",
        coverage: Optional["CoverageMap"] = None,
        deadline: float | None = None,
    ) -> ContractResponse:
        """Run the contract's Invoke entry point inside a fresh transaction."""
        return self._call(uuid, args, contract.invoke, coverage, deadline, "invoke")

    def dump_state(self) -> str:
        """Canonical state dump: one ``hex(key)=hex(value)`` line, sorted by key bytes."""
        items = sorted(self.state.items(), key=lambda kv: kv[0].encode("utf-8"))
        return "\n".join(f"{k.encode('utf-8').hex()}={v.hex()}" for k, v in items)
