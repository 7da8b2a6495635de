"""Exact k-dimensional Catalan numbers and stable-configuration counts."""
from __future__ import annotations

from functools import lru_cache
from math import comb, prod

from ..errors import ChipFireError


@lru_cache(maxsize=None)
def kd_catalan(k: int, m: int) -> int:
    """Number of ballot walks with m steps in each of k directions.

    multinomial(km; m, ..., m) divided by binom(m+1, m) binom(m+2, m) ...
    binom(m+k-1, m), all in exact integer arithmetic.
    """
    if k < 1 or m < 0:
        raise ChipFireError(f"kd_catalan needs k >= 1 and m >= 0, got k={k}, m={m}")
    multinomial = prod(comb(i * m, m) for i in range(1, k + 1))
    denominator = prod(comb(m + i, m) for i in range(1, k))
    value, rem = divmod(multinomial, denominator)
    if rem:
        raise ArithmeticError(f"C_{k},{m}: closed form left remainder {rem}")
    return value


def kappa(k: int, ell: int) -> int:
    """Number of distinct stable configurations from k**ell chips at the root."""
    if k < 2 or ell < 0:
        raise ChipFireError(f"kappa needs k >= 2 and ell >= 0, got k={k}, ell={ell}")
    return prod(kd_catalan(k, k ** (ell - t)) ** (k ** (t - 1)) for t in range(1, ell + 1))
