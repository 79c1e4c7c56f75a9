"""The 20 byte-level mutation operators and the stacked mutation step.

Every operator is a pure function of (input, rng, donor, dictionary), so a
whole run is replayable from its seed. Operators that cannot act on a given
input degrade along a fixed chain instead of returning the input unchanged:

* missing resources -- no donor for ids 16/17, empty dictionary for ids
  18/19, no ASCII digit for id 14, no multi-digit run for id 15 -- fall
  back to id 5 (set a byte to a random value);
* inputs shorter than an operator's minimum length fall back to inserting
  1-4 random bytes at a random position.

Outputs never exceed the configured maximum input length; growth past the
limit is truncated.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from random import Random

N_OPERATORS = 20

OPERATOR_NAMES = {
    0: "remove_range",
    1: "insert_random",
    2: "duplicate_range",
    3: "copy_range",
    4: "bit_flip",
    5: "set_byte",
    6: "swap_bytes",
    7: "add_sub_byte",
    8: "add_sub_uint16",
    9: "add_sub_uint32",
    10: "add_sub_uint64",
    11: "interesting_byte",
    12: "interesting_uint16",
    13: "interesting_uint32",
    14: "replace_digit",
    15: "replace_number",
    16: "splice",
    17: "insert_part",
    18: "insert_literal",
    19: "replace_literal",
}

# Ids 1 and 19 are dropped by default: operator screening found insertion of
# random bytes poor at reaching anything and literal replacement slow to pay
# off with a thin corpus.
DEFAULT_DISABLED = frozenset({1, 19})
DEFAULT_ENABLED = frozenset(range(N_OPERATORS)) - DEFAULT_DISABLED

DEFAULT_MAX_INPUT_LEN = 4096
DEFAULT_STACK_MAX = 4

# Boundary and two's-complement edge values, AFL tradition.
INTERESTING_BYTE = (0, 1, 16, 32, 64, 100, 127, 128, 255)
INTERESTING_UINT16 = INTERESTING_BYTE + (256, 512, 1000, 1024, 4096, 32767, 32768, 65535)
INTERESTING_UINT32 = INTERESTING_UINT16 + (65536, 100663045, 2147483647, 2147483648, 4294967295)

# Magnitude bound for the add/subtract operators (ids 7-10); small deltas
# explore arithmetic neighborhoods without destroying structure.
ARITH_MAX = 35

_DIGIT_RUN_RE = re.compile(rb"[0-9]{2,}")

# Minimum input length per effective operator; shorter inputs take the
# insertion fallback.
MIN_INPUT_LEN = {
    0: 1, 1: 0, 2: 1, 3: 2, 4: 1, 5: 1, 6: 2, 7: 1, 8: 2, 9: 4, 10: 8,
    11: 1, 12: 2, 13: 4, 14: 1, 15: 2, 16: 0, 17: 0, 18: 0, 19: 1,
}


@dataclass(frozen=True)
class Dictionary:
    """Byte literals harvested from a target: function names, fixed keys.

    Literals are deduplicated and bounded to 1-64 bytes each.
    """

    literals: tuple[bytes, ...] = ()

    def __post_init__(self) -> None:
        if len(set(self.literals)) != len(self.literals):
            raise ValueError("dictionary literals must be unique")
        for lit in self.literals:
            if not 1 <= len(lit) <= 64:
                raise ValueError(f"literal length must be in [1, 64], got {len(lit)}")

    @classmethod
    def from_literals(cls, raw: object) -> "Dictionary":
        """Build from an iterable of bytes/str, dropping dupes and bad lengths."""
        seen: list[bytes] = []
        for item in raw:  # type: ignore[attr-defined]
            lit = item.encode("utf-8") if isinstance(item, str) else bytes(item)
            if 1 <= len(lit) <= 64 and lit not in seen:
                seen.append(lit)
        return cls(tuple(seen))


@dataclass(frozen=True)
class MutatorConfig:
    enabled: frozenset[int] = DEFAULT_ENABLED
    max_input_len: int = DEFAULT_MAX_INPUT_LEN
    stack_max: int = DEFAULT_STACK_MAX

    def __post_init__(self) -> None:
        if not self.enabled:
            raise ValueError("enabled operator set must not be empty")
        bad = [i for i in self.enabled if not 0 <= i < N_OPERATORS]
        if bad:
            raise ValueError(f"invalid mutator ids: {sorted(bad)}")
        if self.max_input_len < 1:
            raise ValueError("max_input_len must be >= 1")
        if self.stack_max < 1:
            raise ValueError("stack_max must be >= 1")


def _insert_random(data: bytes, rng: Random, max_run: int) -> bytes:
    run = rng.randint(1, max_run)
    pos = rng.randint(0, len(data))
    chunk = bytes(rng.randrange(256) for _ in range(run))
    return data[:pos] + chunk + data[pos:]


def _pick_range(data: bytes, rng: Random) -> tuple[int, int]:
    start = rng.randrange(len(data))
    length = rng.randint(1, len(data) - start)
    return start, length


def _op_remove_range(data, rng, donor, dictionary):
    start, length = _pick_range(data, rng)
    return data[:start] + data[start + length:]


def _op_insert_random(data, rng, donor, dictionary):
    return _insert_random(data, rng, 16)


def _op_duplicate_range(data, rng, donor, dictionary):
    start, length = _pick_range(data, rng)
    end = start + length
    return data[:end] + data[start:end] + data[end:]


def _op_copy_range(data, rng, donor, dictionary):
    n = len(data)
    src = rng.randrange(n)
    dst = rng.randrange(n)
    while dst == src:
        dst = rng.randrange(n)
    length = rng.randint(1, n - max(src, dst))
    out = bytearray(data)
    out[dst:dst + length] = data[src:src + length]
    return bytes(out)


def _op_bit_flip(data, rng, donor, dictionary):
    pos = rng.randrange(len(data))
    out = bytearray(data)
    out[pos] ^= 1 << rng.randrange(8)
    return bytes(out)


def _op_set_byte(data, rng, donor, dictionary):
    # Draw from the 255 values that differ, so the output always changes.
    pos = rng.randrange(len(data))
    out = bytearray(data)
    out[pos] = (out[pos] + 1 + rng.randrange(255)) % 256
    return bytes(out)


def _op_swap_bytes(data, rng, donor, dictionary):
    n = len(data)
    i = rng.randrange(n)
    j = rng.randrange(n)
    while j == i:
        j = rng.randrange(n)
    out = bytearray(data)
    out[i], out[j] = out[j], out[i]
    return bytes(out)


def _add_sub(data: bytes, rng: Random, width: int) -> bytes:
    offset = rng.randrange(len(data) - width + 1)
    order = "little" if width == 1 or rng.randrange(2) == 0 else "big"
    delta = rng.randint(1, ARITH_MAX)
    if rng.randrange(2):
        delta = -delta
    lane = int.from_bytes(data[offset:offset + width], order)
    lane = (lane + delta) % (1 << (8 * width))
    out = bytearray(data)
    out[offset:offset + width] = lane.to_bytes(width, order)
    return bytes(out)


def _op_add_sub_byte(data, rng, donor, dictionary):
    return _add_sub(data, rng, 1)


def _op_add_sub_uint16(data, rng, donor, dictionary):
    return _add_sub(data, rng, 2)


def _op_add_sub_uint32(data, rng, donor, dictionary):
    return _add_sub(data, rng, 4)


def _op_add_sub_uint64(data, rng, donor, dictionary):
    return _add_sub(data, rng, 8)


def _replace_interesting(data: bytes, rng: Random, width: int, table) -> bytes:
    offset = rng.randrange(len(data) - width + 1)
    order = "little" if width == 1 or rng.randrange(2) == 0 else "big"
    value = table[rng.randrange(len(table))]
    out = bytearray(data)
    out[offset:offset + width] = value.to_bytes(width, order)
    return bytes(out)


def _op_interesting_byte(data, rng, donor, dictionary):
    return _replace_interesting(data, rng, 1, INTERESTING_BYTE)


def _op_interesting_uint16(data, rng, donor, dictionary):
    return _replace_interesting(data, rng, 2, INTERESTING_UINT16)


def _op_interesting_uint32(data, rng, donor, dictionary):
    return _replace_interesting(data, rng, 4, INTERESTING_UINT32)


def _op_replace_digit(data, rng, donor, dictionary):
    positions = [i for i, b in enumerate(data) if 0x30 <= b <= 0x39]
    pos = positions[rng.randrange(len(positions))]
    out = bytearray(data)
    out[pos] = 0x30 + (out[pos] - 0x30 + 1 + rng.randrange(9)) % 10
    return bytes(out)


def _op_replace_number(data, rng, donor, dictionary):
    runs = [m.span() for m in _DIGIT_RUN_RE.finditer(data)]
    start, end = runs[rng.randrange(len(runs))]
    value = rng.randrange(1 << 32)
    return data[:start] + str(value).encode("ascii") + data[end:]


def _op_splice(data, rng, donor, dictionary):
    cut = rng.randint(0, len(data))
    donor_cut = rng.randint(0, len(donor))
    return data[:cut] + donor[donor_cut:]


def _op_insert_part(data, rng, donor, dictionary):
    start = rng.randrange(len(donor))
    length = rng.randint(1, len(donor) - start)
    pos = rng.randint(0, len(data))
    return data[:pos] + donor[start:start + length] + data[pos:]


def _op_insert_literal(data, rng, donor, dictionary):
    literal = dictionary.literals[rng.randrange(len(dictionary.literals))]
    pos = rng.randint(0, len(data))
    return data[:pos] + literal + data[pos:]


def _op_replace_literal(data, rng, donor, dictionary):
    start, length = _pick_range(data, rng)
    literal = dictionary.literals[rng.randrange(len(dictionary.literals))]
    return data[:start] + literal + data[start + length:]


_OPERATORS = {
    0: _op_remove_range,
    1: _op_insert_random,
    2: _op_duplicate_range,
    3: _op_copy_range,
    4: _op_bit_flip,
    5: _op_set_byte,
    6: _op_swap_bytes,
    7: _op_add_sub_byte,
    8: _op_add_sub_uint16,
    9: _op_add_sub_uint32,
    10: _op_add_sub_uint64,
    11: _op_interesting_byte,
    12: _op_interesting_uint16,
    13: _op_interesting_uint32,
    14: _op_replace_digit,
    15: _op_replace_number,
    16: _op_splice,
    17: _op_insert_part,
    18: _op_insert_literal,
    19: _op_replace_literal,
}


def effective_operator(
    op_id: int,
    data: bytes,
    donor: bytes | None,
    dictionary: Dictionary | None,
) -> int | None:
    """Resolve the fallback chain; ``None`` means the insertion fallback."""
    if not 0 <= op_id < N_OPERATORS:
        raise ValueError(f"invalid mutator id: {op_id}")
    effective = op_id
    if effective in (16, 17) and not donor:
        effective = 5
    if effective in (18, 19) and (dictionary is None or not dictionary.literals):
        effective = 5
    if effective == 14 and not any(0x30 <= b <= 0x39 for b in data):
        effective = 5
    if effective == 15 and _DIGIT_RUN_RE.search(data) is None:
        effective = 5
    if len(data) < MIN_INPUT_LEN[effective]:
        return None
    return effective


def apply_operator(
    op_id: int,
    data: bytes,
    rng: Random,
    donor: bytes | None = None,
    dictionary: Dictionary | None = None,
    max_len: int = DEFAULT_MAX_INPUT_LEN,
) -> bytes:
    """Apply one mutation operator, honoring the fallback chain and max_len."""
    data = bytes(data)
    effective = effective_operator(op_id, data, donor, dictionary)
    if effective is None:
        out = _insert_random(data, rng, 4)
    else:
        out = _OPERATORS[effective](data, rng, donor, dictionary)
    if len(out) > max_len:
        out = out[:max_len]
    return out


def select_operator(rng: Random, config: MutatorConfig) -> int:
    """Uniform draw from the enabled set; deterministic for singletons."""
    choices = sorted(config.enabled)
    if len(choices) == 1:
        return choices[0]
    return choices[rng.randrange(len(choices))]


def mutate_with_ops(
    data: bytes,
    rng: Random,
    corpus_pick=None,
    dictionary: Dictionary | None = None,
    config: MutatorConfig | None = None,
) -> tuple[bytes, list[int]]:
    """Stacked mutation returning the output plus the operator ids applied."""
    cfg = config if config is not None else MutatorConfig()
    rounds = rng.randint(1, cfg.stack_max)
    out = bytes(data)
    applied: list[int] = []
    for _ in range(rounds):
        op_id = select_operator(rng, cfg)
        donor = None
        if op_id in (16, 17) and corpus_pick is not None:
            donor = corpus_pick()
        out = apply_operator(
            op_id, out, rng, donor=donor, dictionary=dictionary, max_len=cfg.max_input_len
        )
        applied.append(op_id)
    if not out:
        # A trailing removal can empty the buffer; every mutation round must
        # hand the executor something to run.
        out = _insert_random(out, rng, 4)
    return out, applied


def mutate(
    data: bytes,
    rng: Random,
    corpus_pick=None,
    dictionary: Dictionary | None = None,
    config: MutatorConfig | None = None,
) -> bytes:
    """Apply 1..stack_max operators in sequence; never returns empty output."""
    out, _ = mutate_with_ops(data, rng, corpus_pick, dictionary, config)
    return out
