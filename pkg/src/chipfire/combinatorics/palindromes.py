"""Palindromic sequences of base-k strings and decreasing subsequences of Z'.

Z'_k(ell) is the digit-reversal permutation on 0..k**ell - 1.  A sequence is
palindromic when the i-th term's ell-digit string, reversed, is the i-th term
from the end.
"""
from __future__ import annotations

from typing import Sequence

from ..errors import ChipFireError
from .permutations import reverse_digits

SEPARATORS = ("auto", "high", "zero")


def is_palindromic(k: int, ell: int, values: Sequence[int]) -> bool:
    values = tuple(values)
    for x in values:
        if not 0 <= x < k**ell:
            raise ChipFireError(f"{x} is not an {ell}-digit base-{k} value")
    return all(reverse_digits(x, k, ell) == y for x, y in zip(values, reversed(values)))


def palindromic_extend(k: int, ell: int, values: Sequence[int], separator: str = "auto") -> tuple:
    """Grow a decreasing zero-free palindromic sequence of length d (ell digits)
    into one of length k*d + k - 1 with ell + 2 digits.

    The output is k groups: group a (a = 1..k) holds ``(k-a) b_i (a-1)`` for
    every input term b_i, and groups a < k are each followed by one separator:

    * ``"zero"``: ``(k-a) 0...0 a``;
    * ``"high"``: ``(k-a-1) (k-1)...(k-1) (a-1)``, which needs b_1 < k**ell - 1;
    * ``"auto"``: ``"high"`` when allowed, else ``"zero"``.

    For k=2, ell=2 and input (2, 1) the high form gives 12, 10, 6, 5, 3.
    """
    values = tuple(values)
    if separator not in SEPARATORS:
        raise ChipFireError(f"separator must be one of {SEPARATORS}")
    if not is_palindromic(k, ell, values):
        raise ChipFireError(f"{values} is not palindromic for k={k}, ell={ell}")
    if any(a <= b for a, b in zip(values, values[1:])):
        raise ChipFireError(f"{values} is not strictly decreasing")
    if 0 in values:
        raise ChipFireError("input must not contain zero")
    top = k**ell - 1
    high_ok = bool(values) and values[0] < top and ell >= 1
    if separator == "high" and not high_ok:
        raise ChipFireError("the high separator needs a nonempty input below k**ell - 1 and ell >= 1")
    use_high = separator == "high" or (separator == "auto" and high_ok)

    shift = k ** (ell + 1)
    out = []
    for a in range(1, k + 1):
        out.extend((k - a) * shift + b * k + (a - 1) for b in values)
        if a < k:
            if use_high:
                out.append((k - a - 1) * shift + top * k + (a - 1))
            else:
                out.append((k - a) * shift + a)
    return tuple(out)
