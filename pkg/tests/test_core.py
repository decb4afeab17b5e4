import pytest
from hypothesis import given, settings, strategies as st

from nidgames.core import (
    ACCEPTED, NOOP, BitStr, BudgetViolation, Grid, GridState, Player, TokenPlacement, UPair,
    canonical_pair, column_value, ledgers_consistent, place_token,
)

A, B = Player.ALICE, Player.BOB


def test_canonical_pair_orders_endpoints():
    assert canonical_pair(5, 3) == UPair(3, 5)
    assert canonical_pair(2, 2) == UPair(2, 2)
    assert canonical_pair(BitStr.parse("101"), BitStr.parse("011")) == UPair(3, 5)


def test_pair_index_matches_enumeration():
    order = [UPair(lo, hi) for hi in range(8) for lo in range(hi + 1)]
    assert order.index(UPair(3, 5)) == UPair(3, 5).index == 18
    assert all(UPair.from_index(i) == p for i, p in enumerate(order))


def test_pair_length_mismatch():
    with pytest.raises(ValueError):
        canonical_pair(BitStr(3, 1), BitStr(4, 1))


def test_bitstr_validation():
    assert str(BitStr.parse("0011")) == "0011"
    with pytest.raises(ValueError):
        BitStr(3, 8)


def test_figure_board_column_values():
    g = GridState(3)
    for u, row, who in ((0b000, 2, A), (0b001, 0, B), (0b011, 2, B), (0b001, 1, A)):
        assert place_token(g, TokenPlacement(Grid.X, u, row, who)) is ACCEPTED
    assert [g.x(u) for u in (0b000, 0b001, 0b010, 0b011)] == [2, 0, 3, 2]


def test_empty_column_and_minimum():
    g = GridState(7)
    assert column_value(g, 5) == 7
    for r in (4, 1, 6):
        place_token(g, TokenPlacement(Grid.X, 5, r, A))
    assert column_value(g, BitStr(7, 5)) == 1


def test_row_zero_budget_is_one():
    g = GridState(3)
    assert place_token(g, TokenPlacement(Grid.X, 0, 0, A)) is ACCEPTED
    res = place_token(g, TokenPlacement(Grid.X, 1, 0, A))
    assert isinstance(res, BudgetViolation) and res.row == 0
    assert g.x(1) == 3  # violation leaves the board untouched
    # the other player has his own budget
    assert place_token(g, TokenPlacement(Grid.X, 1, 0, B)) is ACCEPTED


def test_noop_rows_and_repeats():
    g = GridState(3)
    assert place_token(g, TokenPlacement(Grid.Z, (1, 2), 3, A)) is NOOP
    assert place_token(g, TokenPlacement(Grid.Z, (1, 2), 1, A)) is ACCEPTED
    assert place_token(g, TokenPlacement(Grid.Z, (2, 1), 1, A)) is NOOP


def test_z_pair_charges_both_slices():
    g = GridState(3)
    assert place_token(g, TokenPlacement(Grid.Z, (1, 2), 0, A)) is ACCEPTED
    assert g.remaining_z(A, 1, 0) == 0 and g.remaining_z(A, 2, 0) == 0
    res = place_token(g, TokenPlacement(Grid.Z, (2, 5), 0, A))
    assert isinstance(res, BudgetViolation) and res.slice == 2
    # a singleton charges its slice once
    assert place_token(g, TokenPlacement(Grid.Z, (4, 4), 1, A)) is ACCEPTED
    assert g.remaining_z(A, 4, 1) == 1


moves = st.lists(st.tuples(st.booleans(), st.integers(0, 15), st.integers(0, 15), st.integers(0, 4),
                           st.sampled_from([A, B])), max_size=80)


@settings(max_examples=150, deadline=None)
@given(moves)
def test_ledgers_and_budgets_hold_for_any_history(history):
    g = GridState(4)
    prev = {}
    for is_x, u, v, row, who in history:
        p = TokenPlacement(Grid.X, u, row, who) if is_x else TokenPlacement(Grid.Z, canonical_pair(u, v), row, who)
        place_token(g, p)
        # column values never increase
        for col, val in list(prev.items()):
            assert column_value(g, col) <= val
        col = p.column
        prev[col] = column_value(g, col)
    assert ledgers_consistent(g)
    for who in Player:
        assert all(c <= 1 << r for r, c in enumerate(g.x_row_counts[who]))
        for counts in g.z_slice_row_counts[who].values():
            assert all(c <= 1 << r for r, c in enumerate(counts))
