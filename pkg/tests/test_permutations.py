import random
from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chipfire.combinatorics import (
    check_permutation,
    contains_pattern,
    digit_reversal,
    inflate,
    inversions,
    lds,
    longest_decreasing_subsequence,
    max_inversions_closed_form,
    pattern_of,
    reverse_digits,
    tensor,
    to_digits,
    z_lds_closed_form,
)
from chipfire.errors import ChipFireError
from oracles import all_permutations, inversions_naive, lds_brute, lds_subsets

perms = st.integers(1, 60).flatmap(lambda n: st.permutations(list(range(1, n + 1))))


def test_digit_reversal_examples():
    assert digit_reversal(2, 3) == (1, 5, 3, 7, 2, 6, 4, 8)
    assert digit_reversal(2, 2) == (1, 3, 2, 4)
    assert digit_reversal(3, 2) == (1, 4, 7, 2, 5, 8, 3, 6, 9)
    assert digit_reversal(2, 4) == (1, 9, 5, 13, 3, 11, 7, 15, 2, 10, 6, 14, 4, 12, 8, 16)
    assert digit_reversal(5, 0) == (1,)
    assert digit_reversal(4, 1) == (1, 2, 3, 4)


def test_digits():
    assert to_digits(6, 2, 4) == (0, 1, 1, 0)
    assert reverse_digits(1, 2, 3) == 4
    with pytest.raises(ChipFireError):
        to_digits(8, 2, 3)


@pytest.mark.parametrize("k, ell", [(2, 5), (3, 4), (5, 3), (7, 2)])
def test_digit_reversal_is_an_involution(k, ell):
    r = digit_reversal(k, ell)
    assert tuple(r[x - 1] for x in r) == tuple(range(1, k**ell + 1))


def test_inversion_examples():
    assert inversions((1, 5, 3, 7, 2, 6, 4, 8)) == 8
    assert inversions((1, 5, 3, 7, 2, 6, 4, 8)) == max_inversions_closed_form(2, 3)
    assert inversions(tuple(range(1, 11))) == 0
    assert inversions((2, 1)) == 1
    assert inversions(()) == 0


def test_max_inversion_closed_form_values():
    assert [max_inversions_closed_form(2, ell) for ell in (2, 3, 4)] == [1, 8, 44]
    assert max_inversions_closed_form(3, 2) == 9
    for k in range(2, 6):
        for ell in range(0, 6):
            assert inversions(digit_reversal(k, ell)) == max_inversions_closed_form(k, ell)


@settings(max_examples=200, deadline=None)
@given(perms)
def test_inversions_match_quadratic_count(p):
    assert inversions(p) == inversions_naive(p)


def test_lds_examples():
    assert lds((1, 5, 3, 7, 2, 6, 4, 8)) == 3
    assert lds(tuple(range(10, 0, -1))) == 10
    assert lds(()) == 0
    sub = longest_decreasing_subsequence((1, 5, 3, 7, 2, 6, 4, 8))
    assert len(sub) == 3 and sub[0] > sub[1] > sub[2]


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 11).flatmap(lambda n: st.permutations(list(range(1, n + 1)))))
def test_lds_matches_subset_oracle(p):
    assert lds(p) == lds_subsets(p)
    sub = longest_decreasing_subsequence(p)
    assert len(sub) == lds(p)
    assert all(a > b for a, b in zip(sub, sub[1:]))
    it = iter(p)
    assert all(x in it for x in sub)  # is a subsequence


def test_lds_of_digit_reversal():
    assert [lds(digit_reversal(2, ell)) for ell in range(1, 7)] == [1, 2, 3, 5, 7, 11]
    assert [lds(digit_reversal(3, ell)) for ell in range(1, 6)] == [1, 3, 5, 11, 17]
    for k in range(2, 6):
        for ell in range(1, 7 if k < 4 else 5):
            assert lds(digit_reversal(k, ell)) == z_lds_closed_form(k, ell)


def test_pattern_of():
    assert pattern_of((40, 10, 30)) == (3, 1, 2)
    with pytest.raises(ChipFireError):
        pattern_of((1, 1))


def test_inflation_examples():
    assert inflate((2, 3, 1), [(2, 1), (1, 2), (2, 1)]) == (4, 3, 5, 6, 2, 1)
    assert tensor((3, 2, 1), (3, 2, 1)) == (9, 8, 7, 6, 5, 4, 3, 2, 1)
    assert tensor((1, 2), (2, 1)) == (2, 1, 4, 3)
    with pytest.raises(ChipFireError):
        inflate((1, 2), [(1,)])


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_inflation_blocks(data):
    n = data.draw(st.integers(1, 5))
    tau = data.draw(st.permutations(list(range(1, n + 1))))
    gammas = [data.draw(st.integers(1, 4).flatmap(lambda m: st.permutations(list(range(1, m + 1))))) for _ in range(n)]
    w = inflate(tau, gammas)
    check_permutation(w)
    pos = 0
    blocks = []
    for g in gammas:
        block = w[pos : pos + len(g)]
        assert pattern_of(block) == tuple(g)
        blocks.append(block)
        pos += len(g)
    assert pattern_of([b[0] for b in blocks]) == tuple(tau)
    # values of a block are contiguous
    for b in blocks:
        assert max(b) - min(b) == len(b) - 1


def test_contains_pattern_examples():
    w = (4, 3, 5, 6, 2, 1)
    pos = contains_pattern(w, (2, 3, 1))
    assert pos is not None and pattern_of([w[i - 1] for i in pos]) == (2, 3, 1)
    assert contains_pattern((1, 2, 3, 4), (2, 1)) is None
    assert contains_pattern((3, 1, 2), ()) == ()
    assert contains_pattern((1, 2), (1, 2, 3)) is None
    with pytest.raises(ChipFireError):
        contains_pattern(tuple(range(1, 20)), tuple(range(1, 10)))


def _contains_brute(w, sigma):
    from itertools import combinations

    return any(pattern_of([w[i] for i in c]) == tuple(sigma) for c in combinations(range(len(w)), len(sigma)))


def test_contains_pattern_against_brute_force():
    rng = random.Random(5)
    for _ in range(300):
        n = rng.randint(1, 9)
        w = tuple(rng.sample(range(1, n + 1), n))
        m = rng.randint(1, min(n, 4))
        sigma = tuple(rng.sample(range(1, m + 1), m))
        found = contains_pattern(w, sigma)
        assert (found is not None) == _contains_brute(w, sigma)
        if found is not None:
            assert pattern_of([w[i - 1] for i in found]) == sigma


def test_lds_exhaustive_small():
    for n in range(0, 8):
        for p in all_permutations(n):
            assert lds(p) == lds_brute(p)


def test_z_lds_closed_form_domain():
    with pytest.raises(ChipFireError):
        z_lds_closed_form(2, 0)
    with pytest.raises(ChipFireError):
        check_permutation((1, 3))
