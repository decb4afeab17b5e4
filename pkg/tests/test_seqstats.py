import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from nidgames.seqstats import (
    ValueSeries, as_fraction, min_oscillations, min_oscillations_bruteforce, ratio_tv,
    ratio_tv_within_bound, total_variation,
)
from nidgames.lemmas import interleaved_doubling


def test_constant_has_no_oscillations():
    s = ValueSeries()
    for _ in range(3):
        s.append(F(1, 2))
    assert s.count == 0
    assert min_oscillations([5, 5, 5]) == 0


def test_descent_then_ascent():
    s = ValueSeries([F(1), F(1, 2)])
    s.append(F(3, 4))
    assert s.count == 2 and s.tv == F(3, 4)


def test_monotone_is_one_piece():
    assert min_oscillations([1, 2, 2, 7]) == 1
    assert min_oscillations([3]) == 0
    assert min_oscillations([0, 1, 0]) == 2


def test_pieces_are_disjoint():
    # pieces of a concatenation do not share endpoints: [0, 1] + [0, 1]
    assert min_oscillations([0, 1, 0, 1]) == 2
    assert min_oscillations_bruteforce([0, 1, 0, 1]) == 2
    assert ValueSeries([0, 1, 1, 0, 1]).count == 2


def test_bruteforce_refuses_long_input():
    with pytest.raises(ValueError):
        min_oscillations_bruteforce(list(range(20)), max_len=12)


def test_total_variation():
    assert total_variation([1, F(1, 2), F(3, 4)]) == F(3, 4)
    assert total_variation([F(2, 3)] * 4) == 0


def test_ratio_tv_examples():
    m = 100
    assert ratio_tv(list(range(1, m + 1)), list(range(1, m + 1)), 0, m) == 0
    assert ratio_tv([1] * m, list(range(1, m + 1)), 0, m) == F(99, 100)
    a, b = interleaved_doubling(1024)
    assert ratio_tv(a, b, 0, 1024) == 10
    assert ratio_tv_within_bound(a, b, 1024)


def test_ratio_tv_preconditions():
    with pytest.raises(ValueError):
        ratio_tv([2, 1], [2, 2], 0, 4)  # a decreasing
    with pytest.raises(ValueError):
        ratio_tv([3], [1], 0, 4)  # a > b + c
    assert ratio_tv([3], [1], 2, 4) == 0


def test_floats_are_refused():
    with pytest.raises(TypeError):
        as_fraction(0.5)


def test_value_at_tracks_rounds():
    s = ValueSeries([F(1), F(1, 2)], [1, 3])
    assert s.value_at(1) == 1 and s.value_at(2) == 1 and s.value_at(3) == F(1, 2) and s.value_at(9) == F(1, 2)


rationals = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@settings(max_examples=300, deadline=None)
@given(st.lists(rationals, max_size=10))
def test_incremental_series_matches_batch(seq):
    s = ValueSeries(seq)
    assert s.count == min_oscillations(seq) == min_oscillations_bruteforce(seq)
    assert s.tv == total_variation(seq)


@settings(max_examples=200, deadline=None)
@given(st.lists(rationals, max_size=10), st.data())
def test_subsequence_never_oscillates_more(seq, data):
    keep = data.draw(st.lists(st.booleans(), min_size=len(seq), max_size=len(seq)))
    sub = [x for x, k in zip(seq, keep) if k]
    assert min_oscillations(sub) <= min_oscillations(seq)
    assert total_variation(sub) <= total_variation(seq)


def test_all_short_ternary_sequences():
    for length in range(7):
        for seq in itertools.product(range(3), repeat=length):
            assert min_oscillations(seq) == min_oscillations_bruteforce(seq)
