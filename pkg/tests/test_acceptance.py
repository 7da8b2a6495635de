"""End-to-end acceptance criteria, each at its stated tolerance.

Every test carries a ``criterion`` marker; the terminal summary prints one
PASS/FAIL line per criterion.
"""
import random
import time
from itertools import permutations

import numpy as np
import pytest

from chipfire import TreeParams, initial_configuration, stabilize
from chipfire.combinatorics import (
    contains_pattern,
    digit_reversal,
    dispersion_to_walk,
    enumerate_ballot_walks,
    inflate,
    inversions,
    is_palindromic,
    kappa,
    kd_catalan,
    lds,
    max_inversions_closed_form,
    pattern_of,
    tensor,
    walk_to_dispersion,
)
from chipfire.search import (
    count_stable,
    enumerate_stable,
    firing_counts_ok,
    max_inversions_search,
    max_lds_search,
    reachability_fuzz,
    verify_conjecture,
)
from chipfire.combinatorics import palindromic_extend
from chipfire.strategies import pattern_embedding_strategy, random_strategy, run_strategy, unbundle_strategy
from chipfire.tree import block_extrema_ok
from oracles import inversions_naive, lds_brute


def criterion(n, title):
    return pytest.mark.criterion(f"AC-{n}", title=title)


def timed(fn, *args, **kw):
    t0 = time.perf_counter()
    value = fn(*args, **kw)
    return value, time.perf_counter() - t0


@criterion(1, "stable counts equal kappa")
def test_ac1_small_counts_materialized():
    for (k, ell), expected in {(2, 2): 2, (3, 2): 42, (2, 3): 56}.items():
        got, secs = timed(lambda: list(enumerate_stable(TreeParams(k, ell))))
        assert len(got) == len(set(got)) == expected == kappa(k, ell)
        assert secs < 1.0


@criterion(1, "stable counts equal kappa")
def test_ac1_sixteen_chips_single_worker():
    value, secs = timed(count_stable, TreeParams(2, 4), jobs=1)
    assert value == 4_484_480 == kappa(2, 4)
    assert secs < 300


@criterion(1, "stable counts equal kappa")
def test_ac1_sixteen_chips_four_workers():
    value, secs = timed(count_stable, TreeParams(2, 4), jobs=4)
    assert value == 4_484_480
    assert secs < 120


@criterion(2, "Catalan formula vs brute-force walk count")
def test_ac2_catalan_vs_walks():
    t0 = time.perf_counter()
    for k in range(1, 5):
        for m in range(0, 6):
            assert kd_catalan(k, m) == sum(1 for _ in enumerate_ballot_walks(k, m)), (k, m)
    assert time.perf_counter() - t0 < 30


@criterion(3, "unbundling yields digit reversal")
def test_ac3_z_equals_r():
    t0 = time.perf_counter()
    for k in (2, 3):
        for ell in range(0, 5):
            got = stabilize(initial_configuration(TreeParams(k, ell)), unbundle_strategy())
            assert tuple(got) == digit_reversal(k, ell), (k, ell)
    assert digit_reversal(2, 3) == (1, 5, 3, 7, 2, 6, 4, 8)
    assert time.perf_counter() - t0 < 1.0


@criterion(4, "maximum inversions closed form")
def test_ac4_max_inversions():
    for (k, ell), expected in {(2, 2): 1, (2, 3): 8, (3, 2): 9, (2, 4): 44}.items():
        rep, secs = timed(max_inversions_search, TreeParams(k, ell))
        assert rep.value == expected == max_inversions_closed_form(k, ell)
        assert inversions(digit_reversal(k, ell)) == expected
        assert secs < 600


@criterion(5, "LDS of digit reversal")
def test_ac5_lds_of_z():
    t0 = time.perf_counter()
    assert [lds(digit_reversal(2, ell)) for ell in range(1, 7)] == [1, 2, 3, 5, 7, 11]
    assert [lds(digit_reversal(3, ell)) for ell in range(1, 6)] == [1, 3, 5, 11, 17]
    assert time.perf_counter() - t0 < 1.0


@criterion(6, "D values with pruned = unpruned")
def test_ac6_d_values():
    expected = {(2, 3): 3, (2, 4): 5, (2, 2): 2, (3, 2): 3}
    found = {}
    for (k, ell) in expected:
        p = TreeParams(k, ell)
        pruned, secs = timed(max_lds_search, p)
        unpruned = max_lds_search(p, prune=False)
        assert pruned.value == unpruned.value
        assert secs < 600
        found[(k, ell)] = pruned.value
    assert found == expected


@criterion(7, "conjecture verdicts CONSISTENT")
def test_ac7_conjecture():
    verdicts = {(k, ell): verify_conjecture(TreeParams(k, ell)).verdict for k, ell in [(2, 2), (2, 3), (2, 4), (3, 2)]}
    assert verdicts == {key: "CONSISTENT" for key in verdicts}


@criterion(8, "walk/dispersion bijection round trip")
def test_ac8_bijection():
    t0 = time.perf_counter()
    for k, m in [(2, 2), (2, 4), (3, 3)]:
        seen = set()
        for w in enumerate_ballot_walks(k, m):
            d = walk_to_dispersion(w)
            assert dispersion_to_walk(d) == w
            seen.add(d)
        assert len(seen) == kd_catalan(k, m)
    assert time.perf_counter() - t0 < 1.0


@criterion(9, "property suite")
def test_ac9_random_stabilizations():
    shapes = [(k, ell) for k in (2, 3) for ell in range(1, 5)]
    failures = 0
    for i in range(10_000):
        k, ell = shapes[i % len(shapes)]
        plan = run_strategy(TreeParams(k, ell), random_strategy(i))
        if not block_extrema_ok(plan.result, k) or not firing_counts_ok(plan):
            failures += 1
    assert failures == 0


@criterion(9, "property suite")
def test_ac9_lds_exhaustive():
    failures = 0
    for n in range(0, 9):
        for p in permutations(range(1, n + 1)):
            if lds(p) != lds_brute(p):
                failures += 1
    assert failures == 0


@criterion(9, "property suite")
def test_ac9_inversions_fast_vs_quadratic():
    rng = np.random.default_rng(2024)
    failures = 0
    for _ in range(1000):
        n = int(rng.integers(1, 513))
        p = tuple(int(x) + 1 for x in rng.permutation(n))
        if inversions(p) != inversions_naive(p):
            failures += 1
    assert failures == 0


@criterion(10, "pattern embedding and inflation examples")
def test_ac10_embedding_all_length_four():
    count = 0
    for P in permutations(range(1, 5)):
        emb = pattern_embedding_strategy(P, 2)
        assert emb.params == TreeParams(2, 4)
        w = run_strategy(emb.params, emb.strategy).result
        picked = [w[i - 1] for i in emb.witness_positions]
        assert list(emb.witness_positions) == sorted(emb.witness_positions)
        assert tuple(picked) == emb.witness_chips
        assert pattern_of(picked) == P
        assert contains_pattern(w, P) is not None
        count += 1
    assert count == 24


@criterion(10, "pattern embedding and inflation examples")
def test_ac10_inflation_examples():
    assert inflate((2, 3, 1), [(2, 1), (1, 2), (2, 1)]) == (4, 3, 5, 6, 2, 1)
    assert tensor((3, 2, 1), (3, 2, 1)) == (9, 8, 7, 6, 5, 4, 3, 2, 1)


def _is_subsequence(sub, seq):
    it = iter(seq)
    return all(x in it for x in sub)


@criterion(11, "palindromic construction")
def test_ac11_palindromic_construction():
    assert palindromic_extend(2, 2, (2, 1)) == (12, 10, 6, 5, 3)
    for k, ell, start in [(2, 2, (2, 1)), (2, 1, (1,)), (3, 1, (1,)), (3, 2, (4,))]:
        values, depth = start, ell
        while depth < ell + 6:
            values = palindromic_extend(k, depth, values)
            depth += 2
            z_prime = tuple(x - 1 for x in digit_reversal(k, depth))
            assert all(a > b for a, b in zip(values, values[1:]))
            assert is_palindromic(k, depth, values)
            assert _is_subsequence(values, z_prime)


@criterion(12, "reachability fuzz")
def test_ac12_fuzz():
    rep = reachability_fuzz(TreeParams(2, 3), trials=10_000, seed=12)
    assert rep.universe == 56
    assert not rep.escapes
    assert rep.ok
