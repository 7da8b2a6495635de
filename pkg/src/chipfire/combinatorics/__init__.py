"""Exact counting, ballot walks, digit reversal and permutation analytics."""
from .counting import kappa, kd_catalan
from .palindromes import is_palindromic, palindromic_extend
from .permutations import (
    MAX_PATTERN_LENGTH,
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
from .walks import (
    BallotWalk,
    Dispersion,
    dispersion_of_sets,
    dispersion_to_walk,
    enumerate_ballot_walks,
    validate_walk,
    walk_to_dispersion,
)
