"""Fuzz-target interface: the contract shape and the invoke dispatch rule."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .ledger import ContractResponse, StubHandle, err

Handler = Callable[[StubHandle, list[bytes]], ContractResponse]


class ContractAbort(Exception):
    """Deliberate in-contract abort, e.g. a violated arithmetic assertion."""


class DispatchError(Exception):
    """Invoke args cannot name a function (empty argument list)."""


@dataclass(frozen=True)
class Contract:
    """A fuzz target: a name plus Init and Invoke entry points.

    Entry points must be total over arbitrary argument lists: they may
    return status 500 or abort (the harness captures aborts), but must not
    run past the per-execution timeout. They must keep all persistent state
    in the stub's ledger, never in globals, so one-contract-per-worker
    parallelism stays safe.
    """

    name: str
    init: Handler
    invoke: Handler


def dispatch(args: list[bytes]) -> tuple[str, list[bytes]]:
    """Split an invoke argument list into (function name, params).

    The selector is decoded as UTF-8 with replacement characters so that
    arbitrary fuzz bytes select *some* name instead of aborting; unknown
    names are the contract router's problem.
    """
    if not args:
        raise DispatchError("missing function name")
    return args[0].decode("utf-8", errors="replace"), list(args[1:])


def route_invoke(handlers: dict[str, Handler]) -> Handler:
    """Build an Invoke entry point from a name-to-handler table.

    Empty argument lists and unknown function names become status-500
    responses rather than aborts, so the fuzzing budget stays on reachable
    contract logic.
    """

    def invoke(stub: StubHandle, args: list[bytes]) -> ContractResponse:
        try:
            name, params = dispatch(args)
        except DispatchError as exc:
            return err(str(exc))
        handler = handlers.get(name)
        if handler is None:
            return err(f"unknown function: {name!r}")
        stub.enter_function(name)
        return handler(stub, params)

    return invoke
