"""Rights-registry contract with an empty-key blind spot.

The planted bug: addRight happily stores a record whose id is the empty
string, but queryRight treats an empty id as "cannot exist" and reports
not-found without looking. Published data then silently disappears from
the query path, which the publish/query oracle flags as a mismatch.
"""

from __future__ import annotations

from ..contract import Contract, route_invoke
from ..corpus import CrashKind
from ..harness import TestGroup, UnitCase, encode
from ..ledger import StubHandle, err, ok
from . import TargetSpec, Witness


def init(stub: StubHandle, args: list[bytes]):
    return ok()


def add_right(stub: StubHandle, params: list[bytes]):
    if len(params) != 2:
        return err("addRight expects 2 args: id, owner")
    rid = params[0].decode("utf-8", errors="replace")
    stub.cover(0x0201 if rid else 0x0202)
    stub.put_state(rid, params[1])
    return ok()


def query_right(stub: StubHandle, params: list[bytes]):
    if len(params) != 1:
        return err("queryRight expects 1 arg: id")
    rid = params[0].decode("utf-8", errors="replace")
    if not rid:
        # Empty ids "cannot exist", so nobody checks the state database.
        stub.cover(0x0203)
        return err("right not found")
    value = stub.get_state(rid)
    if value is None:
        return err("right not found")
    return ok(value)


def _compare(params: list[bytes], payload: bytes) -> bool:
    return payload == params[1]


def target_drm() -> TargetSpec:
    contract = Contract(
        name="drm",
        init=init,
        invoke=route_invoke({"addRight": add_right, "queryRight": query_right}),
    )
    group = TestGroup(
        name="right",
        publish_fn="addRight",
        query_fn="queryRight",
        arity=2,
        key_index=0,
        param_names=("id", "owner"),
        compare=_compare,
    )
    return TargetSpec(
        contract=contract,
        fixture=(),
        groups=(group,),
        seeds=(UnitCase(0, (b"r1", b"alice")),),
        expected_bugs=frozenset({"logic-loophole"}),
        literals=(b"addRight", b"queryRight", b"r1", b"alice"),
        witnesses=(
            Witness(
                name="empty-id",
                data=encode(0, [b"", b"alice"]),
                kind=CrashKind.ORACLE_MISMATCH,
                message_part="addRight Failed",
            ),
        ),
    )
