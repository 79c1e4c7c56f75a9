"""Two-account transfer contract with explicit bounds checks.

The clean control target: every reachable path either succeeds or rejects
with status 500, the conservation invariant always holds, and nothing
aborts. Fuzzing it should produce zero crashers.
"""

from __future__ import annotations

from ..contract import Contract, route_invoke
from ..harness import TestGroup, UnitCase
from ..ledger import StubHandle, err, ok
from . import TargetSpec

ACCOUNT_A = "A"
ACCOUNT_B = "B"
BALANCE_A = 100
BALANCE_B = 200

FIXTURE = (
    ACCOUNT_A.encode(), str(BALANCE_A).encode(),
    ACCOUNT_B.encode(), str(BALANCE_B).encode(),
)


def _parse_amount(raw: bytes) -> int | None:
    """Strict non-negative decimal ASCII; None on anything else."""
    if not raw or not raw.isdigit():
        return None
    return int(raw)


def init(stub: StubHandle, args: list[bytes]):
    if len(args) != 4:
        return err(f"init expects 4 args (nameA, balanceA, nameB, balanceB), got {len(args)}")
    balance_a = _parse_amount(args[1])
    balance_b = _parse_amount(args[3])
    if balance_a is None or balance_b is None:
        return err("init balances must be non-negative decimal integers")
    stub.put_state(args[0].decode("utf-8", errors="replace"), args[1])
    stub.put_state(args[2].decode("utf-8", errors="replace"), args[3])
    return ok()


def transfer(stub: StubHandle, params: list[bytes]):
    if len(params) != 1:
        return err("transfer expects 1 arg: amount")
    amount = _parse_amount(params[0])
    if amount is None:
        stub.cover(0x0101)
        return err("transfer amount must be a non-negative decimal integer")
    raw_a = stub.get_state(ACCOUNT_A)
    raw_b = stub.get_state(ACCOUNT_B)
    if raw_a is None or raw_b is None:
        return err("accounts not initialized")
    balance_a = int(raw_a)
    balance_b = int(raw_b)
    if amount > balance_a:
        stub.cover(0x0102)
        return err("insufficient funds")
    stub.cover(0x0103)
    stub.put_state(ACCOUNT_A, str(balance_a - amount).encode())
    stub.put_state(ACCOUNT_B, str(balance_b + amount).encode())
    return ok()


def balances(stub: StubHandle, params: list[bytes]):
    raw_a = stub.get_state(ACCOUNT_A)
    raw_b = stub.get_state(ACCOUNT_B)
    if raw_a is None or raw_b is None:
        return err("accounts not initialized")
    return ok(raw_a + b"," + raw_b)


def _compare(params: list[bytes], payload: bytes) -> bool:
    amount = _parse_amount(params[0])
    if amount is None:
        return False
    parts = payload.split(b",")
    if len(parts) != 2:
        return False
    try:
        balance_a, balance_b = int(parts[0]), int(parts[1])
    except ValueError:
        return False
    return (
        balance_a >= 0
        and balance_b >= 0
        and balance_a == BALANCE_A - amount
        and balance_b == BALANCE_B + amount
    )


def target_example01() -> TargetSpec:
    contract = Contract(
        name="example01",
        init=init,
        invoke=route_invoke({"transfer": transfer, "balances": balances}),
    )
    group = TestGroup(
        name="transfer",
        publish_fn="transfer",
        query_fn="balances",
        arity=1,
        key_index=0,
        param_names=("amount",),
        compare=_compare,
    )
    return TargetSpec(
        contract=contract,
        fixture=FIXTURE,
        groups=(group,),
        seeds=(UnitCase(0, (b"10",)), UnitCase(0, (b"25",))),
        expected_bugs=frozenset(),
        literals=(b"transfer", b"balances", b"A", b"B"),
    )
