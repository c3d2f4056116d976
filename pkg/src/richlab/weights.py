"""Deterministic exponential edge weights, keyed by (seed, replication, edge, clock).

The generator is counter-based (stateless): every lookup rehashes its key, so
two runs that share edges see bit-identical weights regardless of visit order.
That is what makes pathwise couplings between different domains, source sets
and rates exactly checkable.

The mixing function is fixed and documented here so results reproduce across
machines:

    state = master_seed                                  (uint64)
    for w in (replication_index, clock_index, axis, low_1, ..., low_d):
        state = mix64((state + 0x9E3779B97F4A7C15) ^ uint64(w))
    u = ((state >> 12) + 0.5) * 2**-52

where ``mix64`` is the SplitMix64 finalizer

    z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
    z ^= z >> 27;  z *= 0x94D049BB133111EB
    z ^= z >> 31

``(low_1, ..., low_d)`` are the coordinates of the canonical (lexicographically
smaller) endpoint of the edge and ``axis`` is the direction it points along;
signed words enter as two's complement.  Keeping the top 52 bits makes every
value of ``u`` exactly representable and confined to the open interval (0, 1),
so ``-log(u)`` is always finite and positive.  A weight for type/rate lambda
is ``-log(u) / lambda``; for lambda a power of two the division is exact, which
gives bit-exact pathwise rate scaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigurationError, ContractViolation
from .lattice import Edge

GOLDEN64 = 0x9E3779B97F4A7C15
MIX_A = 0xBF58476D1CE4E5B9
MIX_B = 0x94D049BB133111EB
_MASK64 = (1 << 64) - 1

SINGLE_CLOCK = "single"
TWO_CLOCK = "two"


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a 64-bit word (pure-python reference)."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * MIX_A) & _MASK64
    z = ((z ^ (z >> 27)) * MIX_B) & _MASK64
    return z ^ (z >> 31)


def _chain(master_seed: int, words) -> int:
    h = master_seed & _MASK64
    for w in words:
        h = mix64(((h + GOLDEN64) & _MASK64) ^ (int(w) & _MASK64))
    return h


def _u_from_hash(h: int) -> float:
    return ((h >> 12) + 0.5) * 2.0**-52


def uniform01(master_seed: int, replication_index: int, edge: Edge, clock_index: int) -> float:
    """The uniform draw attached to (master_seed, replication, edge, clock), in (0, 1)."""
    if not isinstance(edge, Edge):
        raise ContractViolation("uniform01 requires a canonical Edge")
    if clock_index not in (1, 2):
        raise ContractViolation(f"clock_index must be 1 or 2, got {clock_index}")
    words = (replication_index, clock_index, edge.axis, *edge.low)
    return _u_from_hash(_chain(master_seed, words))


def uniform01_batch(
    master_seed: int,
    replication_index,
    low_coords: np.ndarray,
    axes: np.ndarray,
    clock_index: int,
) -> np.ndarray:
    """Vectorized uniform01 over (k, d) low-endpoint coords and (k,) axes.

    ``replication_index`` may be a scalar or a (k,) array. Used by the
    statistical self-tests; agrees bit-exactly with the scalar form.
    """
    low = np.asarray(low_coords, dtype=np.int64)
    axes = np.asarray(axes, dtype=np.int64)
    k, d = low.shape
    gold = np.uint64(GOLDEN64)
    a = np.uint64(MIX_A)
    b = np.uint64(MIX_B)

    def vmix(z):
        z = (z ^ (z >> np.uint64(30))) * a
        z = (z ^ (z >> np.uint64(27))) * b
        return z ^ (z >> np.uint64(31))

    h = np.full(k, master_seed & _MASK64, dtype=np.uint64)
    rep = np.asarray(replication_index, dtype=np.int64)
    for w in (rep, np.int64(clock_index), axes):
        h = vmix((h + gold) ^ np.asarray(w, dtype=np.int64).view(np.uint64))
    for i in range(d):
        h = vmix((h + gold) ^ low[:, i].view(np.uint64))
    return ((h >> np.uint64(12)).astype(np.float64) + 0.5) * 2.0**-52


@dataclass(frozen=True)
class WeightField:
    """A full realization of the passage-time variables for one replication.

    ``clock_mode`` selects between two independent exponentials per edge (one
    per type) and a single shared exponential served to both types; the single
    clock is only meaningful for equal rates and construction enforces that.
    """

    master_seed: int
    replication_index: int = 0
    clock_mode: str = TWO_CLOCK
    lambda1: float = 1.0
    lambda2: float = 1.0

    def __post_init__(self):
        if self.clock_mode not in (SINGLE_CLOCK, TWO_CLOCK):
            raise ConfigurationError(f"clock_mode must be 'single' or 'two', got {self.clock_mode!r}")
        if not (self.lambda1 > 0 and math.isfinite(self.lambda1)):
            raise ConfigurationError(f"lambda1 must be positive and finite, got {self.lambda1}")
        if not (self.lambda2 > 0 and math.isfinite(self.lambda2)):
            raise ConfigurationError(f"lambda2 must be positive and finite, got {self.lambda2}")
        if self.clock_mode == SINGLE_CLOCK and self.lambda1 != self.lambda2:
            raise ConfigurationError("single-clock mode requires lambda1 == lambda2")

    def with_replication(self, replication_index: int) -> "WeightField":
        return replace(self, replication_index=replication_index)

    def clock_and_rate(self, type_index: int):
        """(clock_index, rate) actually used for a given type."""
        if type_index not in (1, 2):
            raise ContractViolation(f"type_index must be 1 or 2, got {type_index}")
        if self.clock_mode == SINGLE_CLOCK:
            return 1, self.lambda1
        return type_index, (self.lambda1 if type_index == 1 else self.lambda2)

    def uniform(self, edge: Edge, clock_index: int) -> float:
        return uniform01(self.master_seed, self.replication_index, edge, clock_index)

    def edge_weight(self, edge: Edge, type_index: int) -> float:
        """Exp(rate)-distributed passage time of this edge for the given type."""
        clock, rate = self.clock_and_rate(type_index)
        return -math.log(self.uniform(edge, clock)) / rate
