"""Food-traceability contract: product, ingredient, and logistics records.

The planted bug: the store path serializes records through a text encoder
that HTML-escapes '<', '>' and '&' into \\u003c, \\u003e and \\u0026, while
the query path hands the stored bytes back without unescaping. Any record
field containing one of those characters reads back different from what
was published, and the ingredient group's mismatch renders the classic
"addIngInfo Failed" message.
"""

from __future__ import annotations

from ..contract import Contract, route_invoke
from ..corpus import CrashKind
from ..harness import TestGroup, UnitCase, encode
from ..ledger import StubHandle, err, ok
from . import TargetSpec, Witness

PRODUCT_FIELDS = (
    "ProID", "ProName", "ProBatch", "ProDate", "ExpDate",
    "MachineID", "FactoryNum", "Brand", "Price", "Origin",
)
INGREDIENT_FIELDS = ("IngID", "IngBatch", "IngName")
LOGISTICS_FIELDS = (
    "LogID", "SendDate", "ArriveDate", "Type", "Origin", "Destination",
    "Goods", "Duration", "Mode", "Company", "Cost",
)

_ESCAPES = {0x3C: b"\\u003c", 0x3E: b"\\u003e", 0x26: b"\\u0026"}

SEED_PRODUCT = (
    b"001", b"MiGao", b"1", b"2020-01-01", b"2020-07-01",
    b"MP01", b"FX1234", b"MiGao", b"$10", b"Shanxi",
)
SEED_INGREDIENT = (b"001", b"M1", b"NuoMi")
SEED_LOGISTICS = (
    b"001", b"2020-01-02", b"2020-01-02", b"transport", b"Shanxi", b"Shaanxi",
    b"MiGao", b"10 days", b"Road transport", b"China Logistics Company Beijing",
    b"$190",
)


def _escape(value: bytes) -> bytes:
    if not (b"<" in value or b">" in value or b"&" in value):
        return value
    out = bytearray()
    for b in value:
        esc = _ESCAPES.get(b)
        if esc is not None:
            out += esc
        else:
            out.append(b)
    return bytes(out)


def _render(fields: tuple[str, ...], values: list[bytes], escape: bool) -> bytes:
    parts = [b"{"]
    for i, (name, value) in enumerate(zip(fields, values)):
        if i:
            parts.append(b",")
        parts.append(b'"' + name.encode("ascii") + b'":"')
        parts.append(_escape(value) if escape else value)
        parts.append(b'"')
    parts.append(b"}")
    return b"".join(parts)


def init(stub: StubHandle, args: list[bytes]):
    return ok()


def _make_publish(prefix: str, fields: tuple[str, ...], fn_name: str, site: int):
    def publish(stub: StubHandle, params: list[bytes]):
        if len(params) != len(fields):
            return err(f"{fn_name} expects {len(fields)} args")
        stub.cover(site)
        key = prefix + params[0].decode("utf-8", errors="replace")
        stub.put_state(key, _render(fields, params, escape=True))
        return ok()

    return publish


def _make_query(prefix: str, what: str, site: int):
    def query(stub: StubHandle, params: list[bytes]):
        if len(params) != 1:
            return err(f"query expects 1 arg: {what} id")
        key = prefix + params[0].decode("utf-8", errors="replace")
        value = stub.get_state(key)
        if value is None:
            return err(f"{what} not found")
        stub.cover(site)
        return ok(value)

    return query


def _make_compare(fields: tuple[str, ...]):
    def compare(params: list[bytes], payload: bytes) -> bool:
        return payload == _render(fields, params, escape=False)

    return compare


def _make_explain(fields: tuple[str, ...]):
    def explain(params: list[bytes], payload: bytes) -> str:
        for name, value in zip(fields, params):
            if _escape(value) != value:
                return f"field {name} differs after readback"
        return "record differs after readback"

    return explain


def _group(name: str, publish_fn: str, query_fn: str, fields: tuple[str, ...]) -> TestGroup:
    return TestGroup(
        name=name,
        publish_fn=publish_fn,
        query_fn=query_fn,
        arity=len(fields),
        key_index=0,
        param_names=fields,
        compare=_make_compare(fields),
        explain=_make_explain(fields),
    )


def target_foodtrace() -> TargetSpec:
    handlers = {
        "addProInfo": _make_publish("PRO_", PRODUCT_FIELDS, "addProInfo", 0x0501),
        "queryProInfo": _make_query("PRO_", "product", 0x0502),
        "addIngInfo": _make_publish("ING_", INGREDIENT_FIELDS, "addIngInfo", 0x0503),
        "queryIngInfo": _make_query("ING_", "ingredient", 0x0504),
        "addLogInfo": _make_publish("LOG_", LOGISTICS_FIELDS, "addLogInfo", 0x0505),
        "queryLogInfo": _make_query("LOG_", "logistics", 0x0506),
    }
    contract = Contract(name="foodtrace", init=init, invoke=route_invoke(handlers))
    groups = (
        _group("product", "addProInfo", "queryProInfo", PRODUCT_FIELDS),
        _group("ingredient", "addIngInfo", "queryIngInfo", INGREDIENT_FIELDS),
        _group("logistics", "addLogInfo", "queryLogInfo", LOGISTICS_FIELDS),
    )
    return TargetSpec(
        contract=contract,
        fixture=(),
        groups=groups,
        seeds=(
            UnitCase(0, SEED_PRODUCT),
            UnitCase(1, SEED_INGREDIENT),
            UnitCase(2, SEED_LOGISTICS),
        ),
        expected_bugs=frozenset({"type-conversion"}),
        literals=(
            b"addProInfo", b"queryProInfo", b"addIngInfo", b"queryIngInfo",
            b"addLogInfo", b"queryLogInfo", b"001", b"MiGao", b"NuoMi",
        ),
        witnesses=(
            Witness(
                name="escaped-ingredient-id",
                data=encode(1, [b">", b"M1", b"NuoMi"]),
                kind=CrashKind.ORACLE_MISMATCH,
                message_part="addIngInfo Failed",
            ),
        ),
    )
