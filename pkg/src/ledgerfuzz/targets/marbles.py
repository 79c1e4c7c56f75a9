"""Marble registry that normalizes sizes through an integer round-trip.

The planted bug: addMarble validates the size as a digit string, parses it
to an integer, and stores the re-rendered decimal. "00" passes validation
but comes back as "0"; any leading zero is silently lost, so readback no
longer matches what was published.
"""

from __future__ import annotations

from ..contract import Contract, route_invoke
from ..corpus import CrashKind
from ..harness import TestGroup, UnitCase, encode
from ..ledger import StubHandle, err, ok
from . import TargetSpec, Witness


def init(stub: StubHandle, args: list[bytes]):
    return ok()


def add_marble(stub: StubHandle, params: list[bytes]):
    if len(params) != 2:
        return err("addMarble expects 2 args: name, size")
    size = params[1]
    if not size or not size.isdigit():
        stub.cover(0x0401)
        return err("size must be a decimal digit string")
    stub.cover(0x0402)
    normalized = str(int(size)).encode()  # the planted bug: re-rendered int
    stub.put_state(params[0].decode("utf-8", errors="replace"), normalized)
    return ok()


def query_marble(stub: StubHandle, params: list[bytes]):
    if len(params) != 1:
        return err("queryMarble expects 1 arg: name")
    value = stub.get_state(params[0].decode("utf-8", errors="replace"))
    if value is None:
        return err("marble not found")
    return ok(value)


def _compare(params: list[bytes], payload: bytes) -> bool:
    return payload == params[1]


def _explain(params: list[bytes], payload: bytes) -> str:
    return "field size differs after readback"


def target_marbles() -> TargetSpec:
    contract = Contract(
        name="marbles",
        init=init,
        invoke=route_invoke({"addMarble": add_marble, "queryMarble": query_marble}),
    )
    group = TestGroup(
        name="marble",
        publish_fn="addMarble",
        query_fn="queryMarble",
        arity=2,
        key_index=0,
        param_names=("name", "size"),
        compare=_compare,
        explain=_explain,
    )
    return TargetSpec(
        contract=contract,
        fixture=(),
        groups=(group,),
        seeds=(UnitCase(0, (b"m1", b"35")),),
        expected_bugs=frozenset({"logic-loophole"}),
        literals=(b"addMarble", b"queryMarble", b"m1"),
        witnesses=(
            Witness(
                name="leading-zero",
                data=encode(0, [b"m1", b"00"]),
                kind=CrashKind.ORACLE_MISMATCH,
                message_part="addMarble Failed",
            ),
        ),
    )
