"""Bank accounts over 32-bit signed balances with wrapping deposits.

The planted bug: deposit adds with 32-bit wraparound, so two positive
numbers can sum to a negative balance. A post-write assertion notices and
aborts with an "overflow" message, modelling the arithmetic trap.
Amounts are accepted only if they fit int32 themselves; oversized or
negative amounts are clean rejections, keeping the abort the single
failure mode.
"""

from __future__ import annotations

from ..contract import Contract, ContractAbort, route_invoke
from ..corpus import CrashKind
from ..harness import TestGroup, UnitCase, encode
from ..ledger import StubHandle, err, ok
from . import TargetSpec, Witness

INT32_MAX = 2**31 - 1

FIXTURE_BALANCES = {
    "acct1": 1000,
    "acct2": 2_000_000_000,
    "rich": INT32_MAX,
}

FIXTURE = tuple(
    part
    for name, balance in FIXTURE_BALANCES.items()
    for part in (name.encode(), str(balance).encode())
)


def _wrap32(value: int) -> int:
    return ((value + 2**31) % 2**32) - 2**31


def _parse_int(raw: bytes) -> int | None:
    """Decimal ASCII with explicit sign handling; None on anything else."""
    body = raw[1:] if raw[:1] == b"-" else raw
    if not body or not body.isdigit():
        return None
    return -int(body) if raw[:1] == b"-" else int(body)


def init(stub: StubHandle, args: list[bytes]):
    if len(args) < 2 or len(args) % 2 != 0:
        return err("init expects (account, balance) pairs")
    for i in range(0, len(args), 2):
        balance = _parse_int(args[i + 1])
        if balance is None or not 0 <= balance <= INT32_MAX:
            return err("init balances must be decimal integers in [0, 2^31-1]")
        stub.put_state(args[i].decode("utf-8", errors="replace"), args[i + 1])
    return ok()


def deposit(stub: StubHandle, params: list[bytes]):
    if len(params) != 2:
        return err("deposit expects 2 args: account, amount")
    amount = _parse_int(params[1])
    if amount is None:
        stub.cover(0x0301)
        return err("deposit amount must be a decimal integer")
    if amount < 0:
        stub.cover(0x0302)
        return err("negative amount")
    if amount > INT32_MAX:
        stub.cover(0x0303)
        return err("amount out of range")
    account = params[0].decode("utf-8", errors="replace")
    raw = stub.get_state(account)
    if raw is None:
        stub.cover(0x0304)
        return err(f"no such account: {account!r}")
    old = int(raw)
    new = _wrap32(old + amount)  # the planted bug: wrapping addition
    stub.cover(0x0305)
    stub.put_state(account, str(new).encode())
    if amount > 0 and old >= 0 and new < old:
        raise ContractAbort(f"integer overflow: balance {old} + {amount} wrapped to {new}")
    return ok()


def get_balance(stub: StubHandle, params: list[bytes]):
    if len(params) != 1:
        return err("getBalance expects 1 arg: account")
    raw = stub.get_state(params[0].decode("utf-8", errors="replace"))
    if raw is None:
        return err("no such account")
    return ok(raw)


def _compare(params: list[bytes], payload: bytes) -> bool:
    amount = _parse_int(params[1])
    account = params[0].decode("utf-8", errors="replace")
    if amount is None or account not in FIXTURE_BALANCES:
        return False
    try:
        balance = int(payload)
    except ValueError:
        return False
    return balance == FIXTURE_BALANCES[account] + amount


def target_smallbank() -> TargetSpec:
    contract = Contract(
        name="smallbank",
        init=init,
        invoke=route_invoke({"deposit": deposit, "getBalance": get_balance}),
    )
    group = TestGroup(
        name="deposit",
        publish_fn="deposit",
        query_fn="getBalance",
        arity=2,
        key_index=0,
        param_names=("account", "amount"),
        compare=_compare,
    )
    return TargetSpec(
        contract=contract,
        fixture=FIXTURE,
        groups=(group,),
        seeds=(UnitCase(0, (b"acct1", b"100")), UnitCase(0, (b"acct2", b"50"))),
        expected_bugs=frozenset({"integer-overflow"}),
        literals=(b"deposit", b"getBalance", b"acct1", b"acct2", b"rich"),
        witnesses=(
            Witness(
                name="wraparound",
                data=encode(0, [b"rich", b"1"]),
                kind=CrashKind.ABORT,
                message_part="overflow",
            ),
        ),
    )
