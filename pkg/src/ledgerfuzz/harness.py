"""Input framing, publish/query differential groups, and seed generation.

Raw fuzz bytes are framed as ``[group byte][2-byte BE length + bytes]*``.
Decoding is total: any non-empty input yields a group (index taken modulo
the group count) and a parameter list padded or truncated to the group's
arity; only the empty input is rejected. The length-plus-bytes framing
survives byte-level mutation far better than a textual format would.

A test group pairs a publish function with its query function. The verdict
convention is the contract's: 0 flags a possible logic vulnerability, 1 is
clean. Publish rejections are clean; the oracle targets consistency of
accepted data, not input validation strictness.
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random
from typing import Callable, Iterator, Optional, Sequence

from .contract import Contract
from .ledger import SUCCESS, MockLedger


class ConfigError(Exception):
    """Bad target or fuzzer configuration, reported before any execution."""


@dataclass(frozen=True)
class TestGroup:
    """One publish/query pair plus the readback comparison for its records."""

    __test__ = False  # keep pytest from collecting the class

    name: str
    publish_fn: str
    query_fn: str
    arity: int
    key_index: int
    param_names: tuple[str, ...]
    compare: Callable[[list[bytes], bytes], bool]
    explain: Optional[Callable[[list[bytes], bytes], str]] = None

    def __post_init__(self) -> None:
        if self.arity < 1:
            raise ValueError("arity must be >= 1")
        if not 0 <= self.key_index < self.arity:
            raise ValueError("key_index out of range")
        if len(self.param_names) != self.arity:
            raise ValueError("param_names must match arity")


@dataclass(frozen=True)
class HarnessVerdict:
    """0 = suspected logic vulnerability, 1 = clean."""

    code: int
    reason: str = ""

    def __post_init__(self) -> None:
        if self.code not in (0, 1):
            raise ValueError("verdict code must be 0 or 1")


@dataclass(frozen=True)
class UnitCase:
    """A known-good call fixture: group index plus exact parameters."""

    group: int
    params: tuple[bytes, ...]


def encode(group_index: int, params: Sequence[bytes]) -> bytes:
    """Frame a call as bytes; params are limited to 65535 bytes each."""
    if not 0 <= group_index <= 0xFF:
        raise ValueError("group index must fit in one byte")
    out = bytearray([group_index])
    for param in params:
        if len(param) > 0xFFFF:
            raise ValueError("param longer than 65535 bytes")
        out += len(param).to_bytes(2, "big")
        out += param
    return bytes(out)


def decode(raw: bytes, groups: Sequence[TestGroup]) -> tuple[TestGroup, list[bytes]] | None:
    """Total decoder; returns None only for empty input.

    Short length fields at the tail are dropped, a length that overruns the
    buffer takes whatever remains, missing params become empty strings, and
    bytes past the group's arity are ignored.
    """
    if not raw:
        return None
    group = groups[raw[0] % len(groups)]
    params: list[bytes] = []
    offset = 1
    end = len(raw)
    while len(params) < group.arity and offset + 2 <= end:
        plen = (raw[offset] << 8) | raw[offset + 1]
        offset += 2
        params.append(bytes(raw[offset:offset + plen]))
        offset += plen
    while len(params) < group.arity:
        params.append(b"")
    return group, params


def tx_ids(prefix: str = "tx") -> Iterator[str]:
    """Deterministic transaction id stream: tx1, tx2, ..."""
    n = 0
    while True:
        n += 1
        yield f"{prefix}{n}"


def run_group(
    ledger: MockLedger,
    contract: Contract,
    group: TestGroup,
    params: list[bytes],
    uuid_source: Iterator[str],
    coverage=None,
    deadline: float | None = None,
) -> HarnessVerdict:
    """Publish, read back through the query function, and compare.

    Contract aborts and timeouts are not verdicts; they propagate to the
    execution wrapper, which reports them as crashes.
    """
    publish = ledger.mock_invoke(
        next(uuid_source),
        [group.publish_fn.encode("ascii")] + list(params),
        contract,
        coverage=coverage,
        deadline=deadline,
    )
    if publish.status != SUCCESS:
        return HarnessVerdict(1)
    query = ledger.mock_invoke(
        next(uuid_source),
        [group.query_fn.encode("ascii"), params[group.key_index]],
        contract,
        coverage=coverage,
        deadline=deadline,
    )
    if query.status != SUCCESS:
        return HarnessVerdict(
            0,
            f"{group.publish_fn} Failed: group {group.name}: query rejected: {query.message}",
        )
    if not group.compare(params, query.payload):
        if group.explain is not None:
            detail = group.explain(params, query.payload)
        else:
            detail = "readback differs from published data"
        return HarnessVerdict(0, f"{group.publish_fn} Failed: group {group.name}: {detail}")
    return HarnessVerdict(1)


def _random_param(rng: Random, is_key: bool) -> bytes:
    """Typed random value: ASCII id, decimal string, short word, or date."""
    kind = 0 if is_key else rng.randrange(4)
    if kind == 0:
        return f"{rng.randrange(1000):03d}".encode("ascii")
    if kind == 1:
        return str(rng.randrange(1_000_000)).encode("ascii")
    if kind == 2:
        return bytes(rng.randrange(0x61, 0x7B) for _ in range(rng.randint(3, 8)))
    return (
        f"{rng.randrange(2019, 2022)}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}"
    ).encode("ascii")


def gen_seed_corpus(
    groups: Sequence[TestGroup],
    unit_cases: Sequence[UnitCase],
    rng: Random,
    n_random: int = 0,
) -> list[bytes]:
    """Encode the unit-case fixtures plus n_random typed-random frames.

    Every returned frame decodes without rejection; exact duplicates are
    dropped. A unit case whose parameter count does not match its group's
    arity is a configuration error.
    """
    if n_random < 0:
        raise ConfigError("n_random must be >= 0")
    seeds: list[bytes] = []
    seen: set[bytes] = set()
    for case in unit_cases:
        if not 0 <= case.group < len(groups):
            raise ConfigError(f"unit case group index {case.group} out of range")
        group = groups[case.group]
        if len(case.params) != group.arity:
            raise ConfigError(
                f"unit case for group {group.name!r} has {len(case.params)} params, "
                f"expected {group.arity}"
            )
        frame = encode(case.group, list(case.params))
        if frame not in seen:
            seen.add(frame)
            seeds.append(frame)
    for _ in range(n_random):
        gi = rng.randrange(len(groups))
        group = groups[gi]
        params = [_random_param(rng, i == group.key_index) for i in range(group.arity)]
        frame = encode(gi, params)
        if frame not in seen:
            seen.add(frame)
            seeds.append(frame)
    return seeds
