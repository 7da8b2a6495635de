"""Truncated directed k-ary trees, labeled configurations and the firing rule.

Vertices carry 1-based labels: the root is ``1`` and the ``j``-th leftmost child
of vertex ``i`` is ``k*(i-1) + j + 1``.  Chips are labeled ``1..k**ell`` and start
on the root.  No chip ever passes layer ``ell + 1``, so the tree is materialized
only down to that layer.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Optional, Protocol, Sequence

from .errors import (
    ChipFireError,
    IllegalFiringError,
    InvalidConfigurationError,
    UnboundedFiringError,
)

Selector = Callable[[int, tuple], Sequence[int]]


class Strategy(Protocol):
    """Anything with a ``name`` that can hand out a per-run selector.

    A selector is called as ``select(vertex, chips)`` with the vertex label
    (local to the tree the strategy was bound to) and the vertex's chips in
    ascending order; it returns the k chips to fire next.
    """

    name: str

    def selector(self, params: "TreeParams") -> Selector: ...


@dataclass(frozen=True)
class TreeParams:
    k: int
    ell: int

    def __post_init__(self):
        if not isinstance(self.k, int) or not isinstance(self.ell, int):
            raise ChipFireError("k and ell must be integers")
        if self.k == 1:
            raise UnboundedFiringError("k = 1 never stabilizes: every firing refills the only child")
        if self.k < 1:
            raise ChipFireError(f"branching factor must be >= 2, got {self.k}")
        if self.ell < 0:
            raise ChipFireError(f"ell must be >= 0, got {self.ell}")

    @property
    def num_chips(self) -> int:
        return self.k**self.ell

    @property
    def num_layers(self) -> int:
        return self.ell + 1

    @property
    def num_vertices(self) -> int:
        return (self.k ** (self.ell + 1) - 1) // (self.k - 1)

    def layer_range(self, t: int) -> range:
        """Vertex labels on layer ``t`` (1-based)."""
        if not 1 <= t <= self.num_layers:
            raise ChipFireError(f"layer {t} outside 1..{self.num_layers}")
        return range(layer_start(t, self.k), layer_start(t + 1, self.k))


def layer_start(t: int, k: int) -> int:
    return (k ** (t - 1) - 1) // (k - 1) + 1


def _layer(v: int, k: int) -> int:
    t, first, width = 1, 1, 1
    while v >= first + width:
        first += width
        width *= k
        t += 1
    return t


def _check_vertex(v: int, p: TreeParams) -> None:
    if not 1 <= v <= p.num_vertices:
        raise ChipFireError(f"vertex v{v} outside 1..{p.num_vertices} for k={p.k}, ell={p.ell}")


def layer_of(v: int, p: TreeParams) -> int:
    _check_vertex(v, p)
    return _layer(v, p.k)


def child(v: int, j: int, p: TreeParams) -> int:
    _check_vertex(v, p)
    if not 1 <= j <= p.k:
        raise ChipFireError(f"child index {j} outside 1..{p.k}")
    if _layer(v, p.k) == p.num_layers:
        raise ChipFireError(f"v{v} lies on the last modeled layer {p.num_layers}")
    return p.k * (v - 1) + j + 1


def parent(v: int, p: TreeParams) -> Optional[int]:
    _check_vertex(v, p)
    if v == 1:
        return None
    return (v - 2) // p.k + 1


def position_in_layer(v: int, k: int) -> tuple[int, int]:
    """``(layer, offset)`` with offset 0 for the leftmost vertex of the layer."""
    t = _layer(v, k)
    return t, v - layer_start(t, k)


@dataclass(frozen=True)
class FiringEvent:
    vertex: int
    tuple: tuple

    def __str__(self):
        return f"v{self.vertex}: ({', '.join(map(str, self.tuple))})"


class StablePermutation(tuple):
    """Layer-(ell+1) chips read left to right."""

    def __new__(cls, seq: Iterable[int]):
        self = super().__new__(cls, seq)
        n = len(self)
        if sorted(self) != list(range(1, n + 1)):
            raise InvalidConfigurationError(f"not a permutation of 1..{n}: {tuple(self)}")
        if n and (self[0] != 1 or self[-1] != n):
            raise InvalidConfigurationError("stable permutations start with 1 and end with the largest chip")
        return self

    def __str__(self):
        return " ".join(map(str, self))


@dataclass(frozen=True, eq=True)
class Configuration:
    params: TreeParams
    chips_at: Mapping[int, tuple] = field(default_factory=dict)

    def __post_init__(self):
        p = self.params
        clean = {}
        seen: set[int] = set()
        for v, chips in self.chips_at.items():
            if not 1 <= v <= p.num_vertices:
                raise InvalidConfigurationError(
                    f"chips at v{v} lie outside the truncated tree (1..{p.num_vertices})"
                )
            chips = tuple(sorted(chips))
            if seen.intersection(chips) or len(set(chips)) != len(chips):
                raise InvalidConfigurationError("a chip appears more than once")
            seen.update(chips)
            if chips:
                clean[v] = chips
        if seen != set(range(1, p.num_chips + 1)):
            raise InvalidConfigurationError(f"chips must be exactly 1..{p.num_chips}")
        object.__setattr__(self, "chips_at", clean)

    def __getitem__(self, v: int) -> tuple:
        return self.chips_at.get(v, ())

    def dump(self) -> str:
        return dump_configuration(self)


def initial_configuration(p: TreeParams) -> Configuration:
    return Configuration(p, {1: tuple(range(1, p.num_chips + 1))})


def _validate_event(chips_at: Mapping[int, Sequence[int]], e: FiringEvent, p: TreeParams) -> None:
    tup = tuple(e.tuple)
    if len(tup) != p.k:
        raise IllegalFiringError(f"must fire exactly {p.k} chips, got {tup}")
    if any(a >= b for a, b in zip(tup, tup[1:])):
        raise IllegalFiringError(f"fired tuple must be strictly increasing: {tup}")
    if not 1 <= e.vertex <= p.num_vertices or _layer(e.vertex, p.k) >= p.num_layers:
        raise IllegalFiringError(f"v{e.vertex} cannot fire (outside the firing layers 1..{p.ell})")
    here = chips_at.get(e.vertex, ())
    missing = [c for c in tup if c not in here]
    if missing:
        raise IllegalFiringError(f"chips {missing} are not at v{e.vertex}")


def fire(c: Configuration, e: FiringEvent) -> Configuration:
    """Return the configuration after firing ``e``; ``c`` is left untouched."""
    p = c.params
    _validate_event(c.chips_at, e, p)
    out = {v: list(chips) for v, chips in c.chips_at.items()}
    fired = set(e.tuple)
    out[e.vertex] = [x for x in out[e.vertex] if x not in fired]
    base = p.k * (e.vertex - 1) + 1
    for j, chip in enumerate(sorted(e.tuple), start=1):
        out.setdefault(base + j, []).append(chip)
    return Configuration(p, out)


def is_stable(c: Configuration) -> bool:
    p = c.params
    last = layer_start(p.num_layers, p.k)
    return all(len(chips) < p.k for v, chips in c.chips_at.items() if v < last)


@dataclass
class FiringPlan:
    """Ordered record of a stabilization run; replaying it reproduces ``result``."""

    params: TreeParams
    strategy: str
    events: list = field(default_factory=list)
    result: Optional[StablePermutation] = None

    def replay(self) -> StablePermutation:
        c = initial_configuration(self.params)
        for e in self.events:
            c = fire(c, e)
        return read_stable(c)

    def firing_counts(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for e in self.events:
            counts[e.vertex] = counts.get(e.vertex, 0) + 1
        return counts


def read_stable(c: Configuration) -> StablePermutation:
    p = c.params
    if not is_stable(c):
        raise InvalidConfigurationError("configuration is not stable")
    return StablePermutation(c[v][0] for v in p.layer_range(p.num_layers))


def stabilize(
    c: Configuration,
    strategy: Strategy,
    *,
    schedule: Optional[random.Random] = None,
    on_fire: Optional[Callable[[FiringEvent, Configuration], None]] = None,
) -> StablePermutation:
    return stabilize_with_plan(c, strategy, schedule=schedule, on_fire=on_fire).result


def stabilize_with_plan(
    c: Configuration,
    strategy: Strategy,
    *,
    schedule: Optional[random.Random] = None,
    on_fire: Optional[Callable[[FiringEvent, Configuration], None]] = None,
) -> FiringPlan:
    """Fire until stable and return the full plan.

    By default firing is layer-synchronous: layer by layer, vertices in
    ascending label order, each exhausted before moving on.  Passing a
    ``random.Random`` as ``schedule`` instead picks uniformly among all
    currently fireable vertices at every step.  Rank-pattern strategies expect
    a vertex to hold its full chip set at its first firing, so an interleaved
    schedule is only meaningful with selectors that do not (e.g. random ones).
    """
    p = c.params
    if c != initial_configuration(p):
        raise InvalidConfigurationError("stabilize expects the initial configuration")
    k = p.k
    select = strategy.selector(p)
    chips: dict[int, list[int]] = {v: list(xs) for v, xs in c.chips_at.items()}
    plan = FiringPlan(p, strategy.name)
    last = layer_start(p.num_layers, k)

    def step(v: int) -> None:
        here = chips[v]
        tup = tuple(select(v, tuple(here)))
        e = FiringEvent(v, tup)
        _validate_event(chips, e, p)
        fired = set(tup)
        chips[v] = [x for x in here if x not in fired]
        base = k * (v - 1) + 1
        for j, chip in enumerate(tup, start=1):
            dest = chips.setdefault(base + j, [])
            dest.append(chip)
            dest.sort()
        plan.events.append(e)
        if on_fire is not None:
            on_fire(e, Configuration(p, chips))

    if schedule is None:
        for v in range(1, last):
            while len(chips.get(v, ())) >= k:
                step(v)
    else:
        while True:
            ready = sorted(v for v, xs in chips.items() if v < last and len(xs) >= k)
            if not ready:
                break
            step(schedule.choice(ready))

    final = Configuration(p, chips)
    plan.result = read_stable(final)
    return plan


def dump_configuration(c: Configuration) -> str:
    """One ``v<index>: c1 c2 ...`` line per nonempty vertex, ascending."""
    return "\n".join(
        f"v{v}: {' '.join(map(str, xs))}" for v, xs in sorted(c.chips_at.items()) if xs
    )


def parse_configuration(text: str, p: TreeParams) -> Configuration:
    chips: dict[int, tuple] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        head, _, rest = line.partition(":")
        if not head.startswith("v") or not head[1:].isdigit():
            raise InvalidConfigurationError(f"malformed dump line: {line!r}")
        chips[int(head[1:])] = tuple(int(x) for x in rest.split())
    return Configuration(p, chips)


def block_extrema_ok(perm: Sequence[int], k: int) -> bool:
    """Every aligned block of length k**j has its min first and its max last."""
    n = len(perm)
    size = 1
    while size <= n:
        for lo in range(0, n, size):
            block = perm[lo : lo + size]
            if block[0] != min(block) or block[-1] != max(block):
                return False
        size *= k
    return True

