from __future__ import annotations

import random

import pytest

from ledgerfuzz import (
    Contract,
    LedgerError,
    MockLedger,
    err,
    ok,
)
from ledgerfuzz.targets import get_target


def make_contract(init=None, invoke=None):
    return Contract(
        name="probe",
        init=init or (lambda stub, args: ok()),
        invoke=invoke or (lambda stub, args: ok()),
    )


def open_tx(ledger):
    """Run a callback inside a transaction and return its result."""

    def runner(fn):
        out = {}

        def init(stub, args):
            out["value"] = fn(stub)
            return ok()

        ledger.mock_init("tx", [], make_contract(init=init))
        return out["value"]

    return runner


def test_put_get_roundtrip():
    ledger = MockLedger()
    run = open_tx(ledger)
    assert run(lambda s: (s.put_state("a", b"\x01"), s.get_state("a"))[1]) == b"\x01"


def test_last_write_wins():
    ledger = MockLedger()
    run = open_tx(ledger)

    def body(stub):
        stub.put_state("a", b"\x01")
        stub.put_state("a", b"\x02")
        return stub.get_state("a")

    assert run(body) == b"\x02"


def test_empty_key_is_accepted():
    ledger = MockLedger()
    run = open_tx(ledger)

    def body(stub):
        stub.put_state("", b"drm-record")
        return stub.get_state("")

    assert run(body) == b"drm-record"


def test_get_missing_key_is_absent():
    ledger = MockLedger()
    run = open_tx(ledger)
    assert run(lambda s: s.get_state("missing")) is None


def test_empty_value_differs_from_absent():
    ledger = MockLedger()
    run = open_tx(ledger)

    def body(stub):
        stub.put_state("k", b"")
        return stub.get_state("k")

    assert run(body) == b""


def test_delete_removes_entry():
    ledger = MockLedger()
    run = open_tx(ledger)

    def body(stub):
        stub.put_state("k", b"v")
        stub.del_state("k")
        return stub.get_state("k")

    assert run(body) is None
    assert "k" not in ledger.state


def test_delete_missing_key_is_noop():
    ledger = MockLedger()
    run = open_tx(ledger)

    def body(stub):
        stub.put_state("a", b"x")
        stub.del_state("never-written")
        return stub.get_state("a")

    assert run(body) == b"x"
    assert ledger.state == {"a": b"x"}


def test_delete_leaves_unrelated_keys():
    ledger = MockLedger()
    run = open_tx(ledger)

    def body(stub):
        stub.put_state("a", b"x")
        stub.put_state("b", b"y")
        stub.del_state("a")
        return stub.get_state("b")

    assert run(body) == b"y"


def test_state_ops_require_open_transaction():
    ledger = MockLedger()
    with pytest.raises(LedgerError, match="no open transaction"):
        ledger.put_state("k", b"v")
    with pytest.raises(LedgerError, match="no open transaction"):
        ledger.get_state("k")
    with pytest.raises(LedgerError, match="no open transaction"):
        ledger.del_state("k")


def test_empty_tx_id_rejected():
    ledger = MockLedger()
    with pytest.raises(LedgerError, match="empty tx id"):
        ledger.mock_init("", [], make_contract())


def test_reentrant_call_rejected():
    ledger = MockLedger()

    def init(stub, args):
        ledger.mock_invoke("inner", [], make_contract())
        return ok()

    with pytest.raises(LedgerError, match="transaction already open"):
        ledger.mock_init("outer", [], make_contract(init=init))


def test_stub_dies_with_its_transaction():
    ledger = MockLedger()
    stash = {}

    def init(stub, args):
        stash["stub"] = stub
        return ok()

    ledger.mock_init("tx", [], make_contract(init=init))
    with pytest.raises(LedgerError):
        stash["stub"].put_state("k", b"v")


def test_invocation_count_and_tx_lifecycle():
    ledger = MockLedger()
    contract = make_contract()
    for i in range(5):
        ledger.mock_init(f"i{i}", [], contract)
        ledger.mock_invoke(f"v{i}", [b"fn"], contract)
    assert ledger.invocation_count == 10
    assert ledger.current_tx is None


def test_transaction_context_visible_during_call():
    ledger = MockLedger()
    seen = {}

    def init(stub, args):
        seen["uuid"] = ledger.current_tx.uuid
        seen["args"] = ledger.current_tx.args
        return ok()

    ledger.mock_init("tx9", [b"a", b"b"], make_contract(init=init))
    assert seen == {"uuid": "tx9", "args": [b"a", b"b"]}
    assert ledger.current_tx is None


def test_no_rollback_on_contract_failure():
    ledger = MockLedger()

    def init(stub, args):
        stub.put_state("kept", b"1")
        return err("boom")

    response = ledger.mock_init("tx", [], make_contract(init=init))
    assert response.status == 500
    assert ledger.state == {"kept": b"1"}


def test_mock_init_example01_builds_fixture_state():
    spec = get_target("example01")
    ledger = MockLedger()
    response = ledger.mock_init("tx1", [b"A", b"100", b"B", b"200"], spec.contract)
    assert response.status == 200
    assert ledger.state == {"A": b"100", "B": b"200"}


def test_mock_init_example01_wrong_arity():
    spec = get_target("example01")
    ledger = MockLedger()
    assert ledger.mock_init("tx1", [], spec.contract).status == 500


def test_mock_invoke_dispatch_paths():
    spec = get_target("foodtrace")
    ledger = MockLedger()
    ledger.mock_init("tx1", [], spec.contract)
    good = ledger.mock_invoke("tx2", [b"addIngInfo", b"001", b"M1", b"NuoMi"], spec.contract)
    assert good.status == 200
    missing = ledger.mock_invoke("tx3", [b"noSuchFunction"], spec.contract)
    assert missing.status == 500
    assert "noSuchFunction" in missing.message
    empty = ledger.mock_invoke("tx4", [], spec.contract)
    assert empty.status == 500
    assert "missing function name" in empty.message


def test_random_sequences_match_reference_map():
    rng = random.Random(1234)
    ledger = MockLedger()
    reference: dict[str, bytes] = {}
    keys = [f"k{i}" for i in range(40)] + ["", "k0"]

    def body(stub):
        for _ in range(50):
            key = rng.choice(keys)
            op = rng.randrange(3)
            if op == 0:
                value = bytes(rng.randrange(256) for _ in range(rng.randrange(8)))
                stub.put_state(key, value)
                reference[key] = value
            elif op == 1:
                assert stub.get_state(key) == reference.get(key)
            else:
                stub.del_state(key)
                reference.pop(key, None)
        return None

    for i in range(20):
        ledger.mock_init(f"tx{i}", [], make_contract(init=lambda s, a: (body(s), ok())[1]))
    assert ledger.state == reference


def test_identical_sequences_give_identical_state():
    def run():
        ledger = MockLedger()
        rng = random.Random(9)

        def init(stub, args):
            for _ in range(100):
                stub.put_state(f"k{rng.randrange(20)}", bytes([rng.randrange(256)]))
                if rng.randrange(4) == 0:
                    stub.del_state(f"k{rng.randrange(20)}")
            return ok()

        ledger.mock_init("tx", [], make_contract(init=init))
        return ledger.dump_state()

    assert run() == run()


def test_dump_state_format_sorted_hex():
    ledger = MockLedger()
    run = open_tx(ledger)

    def body(stub):
        stub.put_state("b", b"\x02")
        stub.put_state("a", b"\x01")
        stub.put_state("", b"")
        return None

    run(body)
    assert ledger.dump_state() == "=\n61=01\n62=02"
