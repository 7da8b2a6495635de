"""Permutation analytics: digit reversal, inversions, LDS, patterns, inflation."""
from __future__ import annotations

from bisect import bisect_left
from typing import Optional, Sequence

from ..errors import ChipFireError

MAX_PATTERN_LENGTH = 8


def check_permutation(p: Sequence[int]) -> tuple:
    p = tuple(p)
    if sorted(p) != list(range(1, len(p) + 1)):
        raise ChipFireError(f"not a permutation of 1..{len(p)}: {p}")
    return p


def to_digits(value: int, k: int, ell: int) -> tuple:
    """Base-k digits of ``value``, most significant first, zero-padded to ``ell``."""
    if not 0 <= value < k**ell:
        raise ChipFireError(f"{value} does not fit in {ell} base-{k} digits")
    out = []
    for _ in range(ell):
        value, d = divmod(value, k)
        out.append(d)
    return tuple(reversed(out))


def from_digits(digits: Sequence[int], k: int) -> int:
    value = 0
    for d in digits:
        value = value * k + d
    return value


def reverse_digits(value: int, k: int, ell: int) -> int:
    out = 0
    for _ in range(ell):
        value, d = divmod(value, k)
        out = out * k + d
    return out


def digit_reversal(k: int, ell: int) -> tuple:
    """R_k(ell): position p holds 1 + (ell-digit base-k reversal of p-1)."""
    if k < 2 or ell < 0:
        raise ChipFireError(f"digit_reversal needs k >= 2 and ell >= 0, got k={k}, ell={ell}")
    return tuple(reverse_digits(i, k, ell) + 1 for i in range(k**ell))


def inversions(p: Sequence[int]) -> int:
    """Pairs i < j with p[i] > p[j], via a Fenwick tree in O(n log n)."""
    p = check_permutation(p)
    n = len(p)
    tree = [0] * (n + 1)
    total = 0
    for seen, x in enumerate(p):
        # count earlier values <= x
        s, i = 0, x
        while i:
            s += tree[i]
            i -= i & -i
        total += seen - s
        i = x
        while i <= n:
            tree[i] += 1
            i += i & -i
    return total


def max_inversions_closed_form(k: int, ell: int) -> int:
    if k < 2 or ell < 0:
        raise ChipFireError(f"need k >= 2 and ell >= 0, got k={k}, ell={ell}")
    num = k ** (2 * ell) - ell * k ** (ell + 1) + (ell - 1) * k**ell
    value, rem = divmod(num, 4)
    if rem:
        raise ArithmeticError(f"max inversions for k={k}, ell={ell}: {num} not divisible by 4")
    return value


def lds(p: Sequence[int]) -> int:
    """Length of the longest strictly decreasing subsequence (patience sorting)."""
    tops: list[int] = []
    for x in p:
        # strictly decreasing in p == strictly increasing in -p
        i = bisect_left(tops, -x)
        if i == len(tops):
            tops.append(-x)
        else:
            tops[i] = -x
    return len(tops)


def longest_decreasing_subsequence(p: Sequence[int]) -> tuple:
    """One longest strictly decreasing subsequence (values), leftmost-ending."""
    p = tuple(p)
    tops: list[int] = []
    top_idx: list[int] = []
    back = [-1] * len(p)
    for j, x in enumerate(p):
        i = bisect_left(tops, -x)
        back[j] = top_idx[i - 1] if i else -1
        if i == len(tops):
            tops.append(-x)
            top_idx.append(j)
        else:
            tops[i] = -x
            top_idx[i] = j
    out = []
    j = top_idx[-1] if top_idx else -1
    while j >= 0:
        out.append(p[j])
        j = back[j]
    return tuple(reversed(out))


def z_lds_closed_form(k: int, ell: int) -> int:
    """LDS length of Z_k(ell): (k+1) k**(ell/2 - 1) - 1 for even ell, 2 k**((ell-1)/2) - 1 for odd."""
    if k < 2:
        raise ChipFireError(f"need k >= 2, got {k}")
    if ell < 1:
        raise ChipFireError(f"closed form holds for ell >= 1, got {ell}")
    if ell % 2 == 0:
        return (k + 1) * k ** (ell // 2 - 1) - 1
    return 2 * k ** ((ell - 1) // 2) - 1


def pattern_of(subseq: Sequence[int]) -> tuple:
    """Standardize: replace each entry by its rank (1 = smallest)."""
    subseq = tuple(subseq)
    if len(set(subseq)) != len(subseq):
        raise ChipFireError(f"pattern_of needs distinct entries: {subseq}")
    rank = {x: i for i, x in enumerate(sorted(subseq), start=1)}
    return tuple(rank[x] for x in subseq)


def inflate(tau: Sequence[int], gammas: Sequence[Sequence[int]]) -> tuple:
    tau = check_permutation(tau)
    gammas = [check_permutation(g) for g in gammas]
    if len(gammas) != len(tau):
        raise ChipFireError(f"inflation of a length-{len(tau)} permutation needs {len(tau)} blocks, got {len(gammas)}")
    # offset of block i = total size of blocks whose tau value is smaller
    sizes_by_value = {t: len(g) for t, g in zip(tau, gammas)}
    offset, acc = {}, 0
    for v in range(1, len(tau) + 1):
        offset[v] = acc
        acc += sizes_by_value[v]
    return tuple(offset[t] + x for t, g in zip(tau, gammas) for x in g)


def tensor(tau: Sequence[int], gamma: Sequence[int]) -> tuple:
    return inflate(tau, [gamma] * len(tau))


def contains_pattern(w: Sequence[int], sigma: Sequence[int]) -> Optional[tuple]:
    """1-based positions of an occurrence of ``sigma`` in ``w``, or None.

    Depth-first over positions, extending a partial occurrence only while it
    stays order-isomorphic to the matching prefix of ``sigma``.  Patterns longer
    than MAX_PATTERN_LENGTH are refused.
    """
    w = tuple(w)
    sigma = check_permutation(sigma)
    m, n = len(sigma), len(w)
    if m > MAX_PATTERN_LENGTH:
        raise ChipFireError(f"pattern length {m} exceeds the supported limit {MAX_PATTERN_LENGTH}")
    if len(set(w)) != n:
        raise ChipFireError("text must have distinct entries")
    if m == 0:
        return ()
    if m > n:
        return None
    # For prefix position j, the already-placed entries that must be just
    # below / just above the new one.
    below, above = [], []
    for j in range(m):
        lo = [i for i in range(j) if sigma[i] < sigma[j]]
        hi = [i for i in range(j) if sigma[i] > sigma[j]]
        below.append(max(lo, key=lambda i: sigma[i]) if lo else None)
        above.append(min(hi, key=lambda i: sigma[i]) if hi else None)

    chosen: list[int] = []

    def extend(j: int, start: int) -> bool:
        if j == m:
            return True
        lo_i, hi_i = below[j], above[j]
        lo = w[chosen[lo_i]] if lo_i is not None else None
        hi = w[chosen[hi_i]] if hi_i is not None else None
        for pos in range(start, n - (m - j) + 1):
            x = w[pos]
            if (lo is None or x > lo) and (hi is None or x < hi):
                chosen.append(pos)
                if extend(j + 1, pos + 1):
                    return True
                chosen.pop()
        return False

    if extend(0, 0):
        return tuple(i + 1 for i in chosen)
    return None
