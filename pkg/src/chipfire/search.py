"""Exhaustive enumeration of stable configurations and extremal searches.

Enumeration recurses over dispersions: the root's ballot walk fixes which
chips reach each child, and each child's subtree is an independent copy of the
(ell-1)-problem relabeled onto its chips.  Distinct walks give distinct
permutations, so nothing needs deduplication.

Work splits into one task per root walk.  Tasks share no state, and results are
merged in walk order, so output (including node counts) does not depend on the
number of workers.
"""
from __future__ import annotations

import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import chain, islice, product
from typing import Iterable, Iterator, Optional

import numpy as np

from .combinatorics import (
    BallotWalk,
    digit_reversal,
    enumerate_ballot_walks,
    inversions,
    kappa,
    lds,
    max_inversions_closed_form,
    walk_to_dispersion,
    z_lds_closed_form,
)
from .errors import ChipFireError, SizeGuardError
from .strategies import random_strategy, run_strategy, target_strategy
from .tree import FiringPlan, TreeParams, block_extrema_ok, position_in_layer

DEFAULT_MAX_CONFIGS = 10**7
MAX_K, MAX_ELL = 3, 4
MODES = ("stream", "count", "max_inversions", "max_lds")

CONSISTENT, VIOLATED = "CONSISTENT", "VIOLATED"


def max_configs() -> int:
    raw = os.environ.get("CHIPFIRE_MAX_CONFIGS")
    if raw is None:
        return DEFAULT_MAX_CONFIGS
    try:
        return int(raw)
    except ValueError:
        raise ChipFireError(f"CHIPFIRE_MAX_CONFIGS must be an integer, got {raw!r}") from None


def check_size(params: TreeParams, force: bool = False) -> int:
    """Return kappa for ``params``; raise if it is beyond the guard and not forced."""
    total = kappa(params.k, params.ell)
    if force:
        return total
    cap = max_configs()
    if params.k > MAX_K or params.ell > MAX_ELL or total > cap:
        raise SizeGuardError(
            f"k={params.k}, ell={params.ell} has {total} stable configurations "
            f"(guard: k <= {MAX_K}, ell <= {MAX_ELL}, at most {cap}); pass force to override"
        )
    return total


@dataclass(frozen=True)
class EnumerationSpec:
    params: TreeParams
    mode: str = "stream"
    worker_count: int = 1
    result_limit: Optional[int] = None
    force: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ChipFireError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.worker_count < 1:
            raise ChipFireError("worker_count must be >= 1")
        if self.result_limit is not None and self.result_limit < 0:
            raise ChipFireError("result_limit must be >= 0")


@dataclass
class ExtremalReport:
    statistic: str
    params: TreeParams
    value: int
    witness: tuple
    closed_form: Optional[int]
    nodes_explored: int
    pruned_count: int = 0

    def __post_init__(self):
        recomputed = _STATISTICS[self.statistic](self.witness)
        if recomputed != self.value:
            raise AssertionError(f"witness has {self.statistic} {recomputed}, report says {self.value}")

    @property
    def matches_closed_form(self) -> bool:
        return self.closed_form is not None and self.value == self.closed_form


_STATISTICS = {"inversions": inversions, "lds": lds}


# ---------------------------------------------------------------- enumeration


_CACHE_LIMIT = 200_000


@lru_cache(maxsize=16)
def _stable_list(k: int, ell: int) -> tuple:
    return tuple(_stream(k, ell))


def _root_walks(k: int, ell: int) -> Iterator[tuple]:
    for w in enumerate_ballot_walks(k, k ** (ell - 1)):
        yield w.steps


def _child_parts(k: int, steps: tuple) -> tuple:
    return walk_to_dispersion(BallotWalk(k, len(steps) // k, steps)).parts


def _task_stream(k: int, ell: int, steps: tuple) -> Iterator[tuple]:
    parts = _child_parts(k, steps)
    if kappa(k, ell - 1) <= _CACHE_LIMIT:
        sub = _stable_list(k, ell - 1)
        lists = [[tuple(part[x - 1] for x in pat) for pat in sub] for part in parts]
        if k == 2:
            left, right = lists
            for a in left:
                for b in right:
                    yield a + b
        else:
            for combo in product(*lists):
                yield tuple(chain.from_iterable(combo))
        return

    # Large subtrees: regenerate each child's stream instead of holding it.
    def rec(i: int, prefix: tuple) -> Iterator[tuple]:
        if i == k:
            yield prefix
            return
        part = parts[i]
        for pat in _stream(k, ell - 1):
            yield from rec(i + 1, prefix + tuple(part[x - 1] for x in pat))

    yield from rec(0, ())


def _stream(k: int, ell: int) -> Iterator[tuple]:
    if ell == 0:
        yield (1,)
        return
    for steps in _root_walks(k, ell):
        yield from _task_stream(k, ell, steps)


def _run_tasks(fn, tasks: Iterable, jobs: int) -> Iterator:
    if jobs <= 1:
        yield from map(fn, tasks)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        yield from pool.map(fn, tasks, chunksize=8)


def _list_task(args) -> list:
    return list(_task_stream(*args))


def _count_task(args) -> int:
    return sum(1 for _ in _task_stream(*args))


def enumerate_stable(
    params: TreeParams, *, jobs: int = 1, limit: Optional[int] = None, force: bool = False
) -> Iterator[tuple]:
    """Stream every stable permutation exactly once, in canonical order.

    Canonical order is depth-first: root walks in lexicographic order, then the
    leftmost child's configurations varying slowest.
    """
    check_size(params, force)
    k, ell = params.k, params.ell
    if ell == 0:
        stream: Iterator[tuple] = iter([(1,)])
    elif jobs <= 1:
        stream = _stream(k, ell)
    else:
        tasks = ((k, ell, s) for s in _root_walks(k, ell))
        stream = chain.from_iterable(_run_tasks(_list_task, tasks, jobs))
    return islice(stream, limit) if limit is not None else stream


def count_stable(params: TreeParams, *, jobs: int = 1, force: bool = False) -> int:
    """Count stable permutations by streaming them (never by formula)."""
    check_size(params, force)
    k, ell = params.k, params.ell
    if ell == 0:
        return 1
    tasks = ((k, ell, s) for s in _root_walks(k, ell))
    return sum(_run_tasks(_count_task, tasks, jobs))


# ---------------------------------------------------------------- vectorized scans


def _task_array(k: int, ell: int, steps: tuple) -> np.ndarray:
    parts = [np.asarray(p, dtype=np.int32) for p in _child_parts(k, steps)]
    sub = np.asarray(_stable_list(k, ell - 1), dtype=np.int64) - 1
    blocks = [p[sub] for p in parts]
    idx = np.indices((len(sub),) * k).reshape(k, -1)
    return np.concatenate([b[i] for b, i in zip(blocks, idx)], axis=1)


def batch_inversions(arr: np.ndarray) -> np.ndarray:
    out = np.zeros(arr.shape[0], dtype=np.int64)
    for j in range(1, arr.shape[1]):
        out += (arr[:, :j] > arr[:, j : j + 1]).sum(axis=1)
    return out


def batch_lds(arr: np.ndarray) -> np.ndarray:
    """Row-wise longest strictly decreasing subsequence, O(n^2) dynamic program."""
    rows, n = arr.shape
    dp = np.ones((rows, n), dtype=np.int64)
    for j in range(1, n):
        earlier = np.where(arr[:, :j] > arr[:, j : j + 1], dp[:, :j], 0)
        dp[:, j] = earlier.max(axis=1) + 1
    return dp.max(axis=1) if n else np.zeros(rows, dtype=np.int64)


def _scan_task(args) -> tuple:
    statistic, k, ell, steps, floor = args
    arr = _task_array(k, ell, steps)
    values = batch_inversions(arr) if statistic == "inversions" else batch_lds(arr)
    i = int(values.argmax())
    best = int(values[i])
    witness = tuple(int(x) for x in arr[i]) if best > floor else None
    return best, witness, arr.shape[0], 0


def _merge(results: Iterable[tuple], floor: int, floor_witness: tuple) -> tuple:
    """Combine per-task (best, witness, explored, pruned) in task order.

    The earliest task holding the overall maximum supplies the witness; when
    nothing beats ``floor`` the floor's own witness is kept.
    """
    value, witness, explored, pruned = floor, floor_witness, 0, 0
    for best, w, n_explored, n_pruned in results:
        explored += n_explored
        pruned += n_pruned
        if best > value and w is not None:
            value, witness = best, w
    return value, witness, explored, pruned


def max_inversions_search(params: TreeParams, *, jobs: int = 1, force: bool = False) -> ExtremalReport:
    """Maximum inversion count over every stable permutation (full scan)."""
    check_size(params, force)
    k, ell = params.k, params.ell
    closed = max_inversions_closed_form(k, ell)
    z = digit_reversal(k, ell)
    if ell == 0:
        return ExtremalReport("inversions", params, 0, z, closed, 1)
    # floor -1: every task reports its own best with a witness
    tasks = (("inversions", k, ell, s, -1) for s in _root_walks(k, ell))
    value, witness, explored, _ = _merge(_run_tasks(_scan_task, tasks, jobs), -1, ())
    return ExtremalReport("inversions", params, value, witness, closed, explored)


def _lds_bnb_task(args) -> tuple:
    k, ell, steps, floor = args
    parts = _child_parts(k, steps)
    sub = _stable_list(k, ell - 1)
    sub_bound = max(lds(p) for p in sub)
    lists = [[tuple(part[x - 1] for x in pat) for pat in sub] for part in parts]
    state = {"best": floor, "witness": None, "explored": 0, "pruned": 0}

    def dfs(c: int, prefix: tuple) -> None:
        state["explored"] += 1
        achieved = lds(prefix)
        remaining = k - c
        if remaining == 0:
            if achieved > state["best"]:
                state["best"], state["witness"] = achieved, prefix
            return
        # each remaining subtree adds at most sub_bound to any decreasing run
        if achieved + sub_bound * remaining <= state["best"]:
            state["pruned"] += 1
            return
        for block in lists[c]:
            dfs(c + 1, prefix + block)

    dfs(0, ())
    return state["best"], state["witness"], state["explored"], state["pruned"]


def max_lds_search(
    params: TreeParams, *, jobs: int = 1, prune: bool = True, force: bool = False
) -> ExtremalReport:
    """D_k(ell): the longest decreasing subsequence over all stable permutations.

    The incumbent starts at lds(Z_k(ell)), which is always reachable.  With
    ``prune`` a partial assembly of the root's subtrees is abandoned once its
    LDS plus D_k(ell-1) per unassigned subtree cannot exceed the incumbent;
    without it every permutation is scanned.  Each task starts from the same
    incumbent so node counts do not depend on scheduling.
    """
    check_size(params, force)
    k, ell = params.k, params.ell
    z = digit_reversal(k, ell)
    floor = lds(z)
    closed = z_lds_closed_form(k, ell) if ell >= 1 else floor
    if ell == 0:
        return ExtremalReport("lds", params, floor, z, closed, 1)
    if prune:
        tasks = ((k, ell, s, floor) for s in _root_walks(k, ell))
        results = _run_tasks(_lds_bnb_task, tasks, jobs)
    else:
        tasks = (("lds", k, ell, s, floor) for s in _root_walks(k, ell))
        results = _run_tasks(_scan_task, tasks, jobs)
    value, witness, explored, pruned = _merge(results, floor, z)
    return ExtremalReport("lds", params, value, witness, closed, explored, pruned)


# ---------------------------------------------------------------- conjecture & fuzzing


@dataclass
class ConjectureReport:
    params: TreeParams
    d_value: int
    z_lds: int
    closed_form: int
    search: ExtremalReport
    witness_plan: Optional[FiringPlan] = None

    @property
    def verdict(self) -> str:
        return CONSISTENT if self.d_value <= self.closed_form else VIOLATED


def verify_conjecture(params: TreeParams, *, jobs: int = 1, force: bool = False) -> ConjectureReport:
    """Compare D_k(ell) with the LDS of Z_k(ell); a violation carries a replayable plan."""
    rep = max_lds_search(params, jobs=jobs, force=force)
    z_lds = lds(digit_reversal(params.k, params.ell))
    report = ConjectureReport(params, rep.value, z_lds, rep.closed_form, rep)
    if report.verdict == VIOLATED:
        report.witness_plan = run_strategy(params, target_strategy(rep.witness))
    return report


@dataclass
class Escape:
    trial: int
    seed: int
    interleaved: bool
    result: tuple
    plan: FiringPlan


@dataclass
class FuzzReport:
    params: TreeParams
    trials: int
    seed: int
    universe: int
    distinct_seen: int
    escapes: list = field(default_factory=list)
    shape_failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.escapes and not self.shape_failures


def reachability_fuzz(params: TreeParams, trials: int, seed: int, *, force: bool = False) -> FuzzReport:
    """Random strategies, half of them with random vertex interleaving, must land
    inside the enumerated set.  Every run is also checked for the per-vertex
    firing counts and the block min/max shape."""
    check_size(params, force)
    universe = set(enumerate_stable(params, force=force))
    rng = random.Random(seed)
    seen = set()
    report = FuzzReport(params, trials, seed, len(universe), 0)
    k, ell = params.k, params.ell
    for trial in range(trials):
        tseed = rng.getrandbits(32)
        interleaved = trial % 2 == 1
        schedule = random.Random(tseed ^ 0x9E3779B9) if interleaved else None
        plan = run_strategy(params, random_strategy(tseed), schedule=schedule)
        result = tuple(plan.result)
        seen.add(result)
        if result not in universe:
            report.escapes.append(Escape(trial, tseed, interleaved, result, plan))
        if not block_extrema_ok(result, k) or not firing_counts_ok(plan):
            report.shape_failures.append((trial, tseed, interleaved))
    report.distinct_seen = len(seen)
    return report


def firing_counts_ok(plan: FiringPlan) -> bool:
    """Each layer-t vertex fired k**(ell-t) times; ell * k**(ell-1) firings total."""
    p = plan.params
    k, ell = p.k, p.ell
    counts = plan.firing_counts()
    if ell == 0:
        return not plan.events
    if len(plan.events) != ell * k ** (ell - 1):
        return False
    expected = {v: k ** (ell - t) for t in range(1, ell + 1) for v in p.layer_range(t)}
    return counts == expected and all(position_in_layer(v, k)[0] <= ell for v in counts)


def run_enumeration(spec: EnumerationSpec):
    """Dispatch an EnumerationSpec: an iterator, a count, or an ExtremalReport."""
    p, jobs = spec.params, spec.worker_count
    if spec.mode == "stream":
        return enumerate_stable(p, jobs=jobs, limit=spec.result_limit, force=spec.force)
    if spec.mode == "count":
        return count_stable(p, jobs=jobs, force=spec.force)
    if spec.mode == "max_inversions":
        return max_inversions_search(p, jobs=jobs, force=spec.force)
    return max_lds_search(p, jobs=jobs, force=spec.force)
