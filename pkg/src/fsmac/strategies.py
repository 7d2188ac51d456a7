"""Shannon strategies: deterministic maps from an encoder's CSI alphabet to its
input alphabet.

A strategy is identified by an integer whose little-endian base-``n_x`` digits
list its outputs: the value at CSI symbol ``k`` is digit ``k`` (symbol 0 is the
least significant digit). Team policies are probability vectors aligned with
the ascending order of these indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .channel import DEFAULT_ENUMERATION_LIMIT
from .channel import strategy_space_size as _checked_size
from .errors import IndexOutOfRange


def strategy_count(n_x: int, n_csi: int, limit: int = DEFAULT_ENUMERATION_LIMIT) -> int:
    """Number of maps from ``n_csi`` CSI symbols to ``n_x`` inputs, i.e. ``n_x ** n_csi``."""
    return _checked_size(n_x, n_csi, limit)


@dataclass(frozen=True)
class ShannonStrategy:
    index: int
    n_csi: int
    n_x: int

    def __post_init__(self):
        if not 0 <= self.index < self.n_x ** self.n_csi:
            raise IndexOutOfRange(
                f"strategy index {self.index} outside [0, {self.n_x ** self.n_csi})")

    def __call__(self, csi_symbol: int) -> int:
        return apply(self, csi_symbol)

    @property
    def table(self) -> tuple[int, ...]:
        return tuple(apply(self, k) for k in range(self.n_csi))

    @classmethod
    def from_table(cls, table, n_x: int) -> "ShannonStrategy":
        index = 0
        for k, x in enumerate(table):
            if not 0 <= x < n_x:
                raise IndexOutOfRange(f"input symbol {x} outside [0, {n_x})")
            index += int(x) * n_x ** k
        return cls(index, len(table), n_x)


def apply(strategy: ShannonStrategy, csi_symbol: int) -> int:
    """Input symbol chosen by ``strategy`` when its encoder observes ``csi_symbol``."""
    if not 0 <= csi_symbol < strategy.n_csi:
        raise IndexOutOfRange(f"CSI symbol {csi_symbol} outside [0, {strategy.n_csi})")
    return (strategy.index // strategy.n_x ** csi_symbol) % strategy.n_x


@dataclass(frozen=True)
class StrategySpace:
    n_csi: int
    n_x: int
    limit: int = DEFAULT_ENUMERATION_LIMIT

    def __post_init__(self):
        strategy_count(self.n_x, self.n_csi, self.limit)

    @property
    def count(self) -> int:
        return self.n_x ** self.n_csi

    def __len__(self) -> int:
        return self.count

    def __iter__(self) -> Iterator[ShannonStrategy]:
        return enumerate_strategies(self)

    def table(self) -> np.ndarray:
        """``(count, n_csi)`` array whose row ``t`` lists strategy ``t``'s outputs."""
        return strategy_table(self.n_x, self.n_csi)

    def index_of(self, table) -> int:
        return ShannonStrategy.from_table(table, self.n_x).index


def enumerate_strategies(space: StrategySpace) -> Iterator[ShannonStrategy]:
    for index in range(space.count):
        yield ShannonStrategy(index, space.n_csi, space.n_x)


@lru_cache(maxsize=64)
def _table(n_x: int, n_csi: int) -> np.ndarray:
    idx = np.arange(n_x ** n_csi)[:, None]
    powers = n_x ** np.arange(n_csi)[None, :]
    t = (idx // powers) % n_x
    t.setflags(write=False)
    return t


def strategy_table(n_x: int, n_csi: int, limit: int = DEFAULT_ENUMERATION_LIMIT) -> np.ndarray:
    strategy_count(n_x, n_csi, limit)
    return _table(n_x, n_csi)
