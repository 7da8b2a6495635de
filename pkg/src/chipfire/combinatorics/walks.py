"""Ballot walks and the dispersions of chips among k children they encode.

A walk of length k*m uses each direction 1..k exactly m times and every prefix
has at least as many 1s as 2s, at least as many 2s as 3s, and so on.  Chip i is
sent to child ``steps[i-1]``; this is a bijection onto the ways a vertex holding
chips 1..k*m can disperse them.
"""
from __future__ import annotations

from typing import Iterator, NamedTuple, Sequence

from ..errors import ChipFireError


class BallotWalk(NamedTuple):
    k: int
    m: int
    steps: tuple

    def __str__(self):
        if self.k <= 9:
            return "".join(map(str, self.steps))
        return ",".join(map(str, self.steps))

    @classmethod
    def parse(cls, text: str, k: int) -> "BallotWalk":
        text = text.strip()
        steps = tuple(int(x) for x in (text.split(",") if "," in text or k > 9 else text))
        if len(steps) % k:
            raise ChipFireError(f"walk length {len(steps)} is not a multiple of k={k}")
        return validate_walk(cls(k, len(steps) // k, steps))


class Dispersion(NamedTuple):
    """``parts[j]`` is the ascending tuple of chips sent to child j+1."""

    parts: tuple

    @property
    def k(self) -> int:
        return len(self.parts)


def _ballot_ok(steps: Sequence[int], k: int) -> bool:
    counts = [0] * (k + 2)
    counts[0] = len(steps) + 1
    for s in steps:
        if not 1 <= s <= k:
            return False
        counts[s] += 1
        if counts[s] > counts[s - 1]:
            return False
    return True


def validate_walk(w: BallotWalk) -> BallotWalk:
    if len(w.steps) != w.k * w.m:
        raise ChipFireError(f"walk must have {w.k * w.m} steps, has {len(w.steps)}")
    if not _ballot_ok(w.steps, w.k):
        raise ChipFireError(f"walk {w} violates the ballot property")
    if any(w.steps.count(j) != w.m for j in range(1, w.k + 1)):
        raise ChipFireError(f"walk {w} does not end at (m, ..., m)")
    return w


def enumerate_ballot_walks(k: int, m: int) -> Iterator[BallotWalk]:
    """Yield every walk of A_{k,m} once, in lexicographic order of the steps."""
    if k < 1 or m < 0:
        raise ChipFireError(f"need k >= 1 and m >= 0, got k={k}, m={m}")
    n = k * m
    if n == 0:
        yield BallotWalk(k, m, ())
        return
    counts = [m] + [0] * k  # sentinel: direction 1 is capped at m
    steps = [0] * n
    choice = [0] * n  # last direction tried at each depth
    depth = 0
    while depth >= 0:
        # undo the previous choice at this depth, then try the next direction
        prev = choice[depth]
        if prev:
            counts[prev] -= 1
        nxt = prev + 1
        while nxt <= k and counts[nxt] >= counts[nxt - 1]:
            nxt += 1
        if nxt > k:
            choice[depth] = 0
            depth -= 1
            continue
        choice[depth] = nxt
        counts[nxt] += 1
        steps[depth] = nxt
        if depth == n - 1:
            yield BallotWalk(k, m, tuple(steps))
        else:
            depth += 1
    return


def walk_to_dispersion(w: BallotWalk) -> Dispersion:
    validate_walk(w)
    parts = [[] for _ in range(w.k)]
    for chip, j in enumerate(w.steps, start=1):
        parts[j - 1].append(chip)
    return Dispersion(tuple(map(tuple, parts)))


def dispersion_to_walk(d: Dispersion) -> BallotWalk:
    k = d.k
    sizes = {len(p) for p in d.parts}
    if len(sizes) != 1:
        raise ChipFireError("every child must receive the same number of chips")
    m = sizes.pop()
    steps = [0] * (k * m)
    for j, part in enumerate(d.parts, start=1):
        for chip in part:
            if not 1 <= chip <= k * m or steps[chip - 1]:
                raise ChipFireError(f"parts must partition 1..{k * m}")
            steps[chip - 1] = j
    return validate_walk(BallotWalk(k, m, tuple(steps)))


def dispersion_of_sets(parts: Sequence[Sequence[int]]) -> Dispersion:
    """Dispersion of arbitrary distinct labels, relabeled by rank to 1..k*m."""
    rank = {c: i for i, c in enumerate(sorted(c for p in parts for c in p), start=1)}
    return Dispersion(tuple(tuple(sorted(rank[c] for c in p)) for p in parts))
