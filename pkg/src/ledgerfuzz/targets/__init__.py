"""Built-in fuzz targets: contracts, fixtures, oracle groups, and seeds."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from ..contract import Contract
from ..corpus import CrashKind
from ..harness import ConfigError, TestGroup, UnitCase


@dataclass(frozen=True)
class Witness:
    """A known bug-triggering frame and the failure it must reproduce."""

    name: str
    data: bytes
    kind: CrashKind
    message_part: str


@dataclass(frozen=True)
class TargetSpec:
    """Everything the fuzz loop needs to exercise one contract."""

    contract: Contract
    fixture: tuple[bytes, ...]
    groups: tuple[TestGroup, ...]
    seeds: tuple[UnitCase, ...]
    expected_bugs: frozenset[str]
    literals: tuple[bytes, ...] = ()
    witnesses: tuple[Witness, ...] = ()

    @property
    def name(self) -> str:
        return self.contract.name


_REGISTRY: dict[str, Callable[[], TargetSpec]] = {}


def register(name: str, builder: Callable[[], TargetSpec]) -> None:
    if name in _REGISTRY:
        raise ValueError(f"target {name!r} already registered")
    _REGISTRY[name] = builder


def target_names() -> list[str]:
    return sorted(_REGISTRY)


def get_target(name: str) -> TargetSpec:
    try:
        builder = _REGISTRY[name]
    except KeyError:
        raise ConfigError(
            f"unknown target {name!r}; valid targets: {', '.join(target_names())}"
        ) from None
    return builder()


from . import drm, example01, foodtrace, marbles, smallbank  # noqa: E402

register("example01", example01.target_example01)
register("drm", drm.target_drm)
register("smallbank", smallbank.target_smallbank)
register("marbles", marbles.target_marbles)
register("foodtrace", foodtrace.target_foodtrace)
