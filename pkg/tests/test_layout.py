import pytest
from hypothesis import given
from hypothesis import strategies as st

from browselab.layout import (
    CellAddress,
    LayoutKind,
    LayoutSpec,
    cell_to_rank,
    layout_from_dict,
    rank_to_cell,
)


def test_first_rank_is_top_left():
    for layout in (LayoutSpec.linear(4), LayoutSpec.grid(2, 3), LayoutSpec(LayoutKind.MULTI_LIST, (2, 4, 3))):
        assert rank_to_cell(1, layout) == CellAddress(1, 1)
        assert cell_to_rank(CellAddress(1, 1), layout) == 1


def test_row_major_mapping():
    assert rank_to_cell(4, LayoutSpec.grid(2, 3)) == CellAddress(2, 1)
    assert rank_to_cell(3, LayoutSpec(LayoutKind.LINEAR_HORIZONTAL, (5,))) == CellAddress(1, 3)
    assert cell_to_rank(CellAddress(2, 2), LayoutSpec.grid(2, 3)) == 5


def test_ragged_multi_list():
    layout = LayoutSpec(LayoutKind.MULTI_LIST, (2, 4, 3))
    assert cell_to_rank(CellAddress(3, 3), layout) == 9
    assert rank_to_cell(3, layout) == CellAddress(2, 1)
    assert rank_to_cell(7, layout) == CellAddress(3, 1)


def test_rank_out_of_range_names_rank_and_n():
    with pytest.raises(ValueError, match=r"rank 7 outside \[1, 6\]"):
        rank_to_cell(7, LayoutSpec.grid(2, 3))
    with pytest.raises(ValueError):
        rank_to_cell(0, LayoutSpec.grid(2, 3))


@pytest.mark.parametrize("cell", [CellAddress(3, 1), CellAddress(1, 4), CellAddress(0, 1), CellAddress(2, 0)])
def test_invalid_cell(cell):
    with pytest.raises(ValueError):
        cell_to_rank(cell, LayoutSpec.grid(2, 3))


@pytest.mark.parametrize(
    "kind, lengths",
    [
        (LayoutKind.LINEAR_VERTICAL, (1, 2)),
        (LayoutKind.LINEAR_HORIZONTAL, (3, 3)),
        (LayoutKind.WRAPPED_GRID, (3, 2, 3)),
        (LayoutKind.WRAPPED_GRID, (3, 4)),
        (LayoutKind.MULTI_LIST, ()),
        (LayoutKind.MULTI_LIST, (2, 0)),
    ],
)
def test_kind_invariants(kind, lengths):
    with pytest.raises(ValueError):
        LayoutSpec(kind, lengths)


def test_wrapped_grid_allows_short_last_row():
    layout = LayoutSpec.grid(3, 4, total=10)
    assert layout.row_lengths == (4, 4, 2)
    assert layout.n_items == 10


def test_from_dict_forms():
    assert layout_from_dict({"kind": "wrapped_grid", "rows": 2, "cols": 3}).row_lengths == (3, 3)
    assert layout_from_dict({"kind": "wrapped_grid", "rows": 2, "cols": 3, "total": 5}).row_lengths == (3, 2)
    assert layout_from_dict({"kind": "multi_list", "row_lengths": [2, 4, 3]}).n_items == 9
    with pytest.raises(ValueError):
        layout_from_dict({"kind": "spiral", "rows": 1, "cols": 1})
    with pytest.raises(ValueError):
        layout_from_dict({"kind": "wrapped_grid"})


layouts = st.one_of(
    st.integers(1, 12).map(LayoutSpec.linear),
    st.integers(1, 9).map(lambda c: LayoutSpec(LayoutKind.LINEAR_HORIZONTAL, (c,))),
    st.tuples(st.integers(1, 5), st.integers(1, 5)).map(lambda rc: LayoutSpec.grid(*rc)),
    st.lists(st.integers(1, 5), min_size=1, max_size=5).map(lambda ls: LayoutSpec(LayoutKind.MULTI_LIST, tuple(ls))),
)


@given(layouts)
def test_bijection(layout):
    cells = [rank_to_cell(i, layout) for i in range(1, layout.n_items + 1)]
    assert [cell_to_rank(c, layout) for c in cells] == list(range(1, layout.n_items + 1))
    every_cell = [CellAddress(r, c) for r, w in enumerate(layout.row_lengths, 1) for c in range(1, w + 1)]
    assert sorted(cells, key=lambda a: (a.row, a.col)) == every_cell


@given(st.integers(1, 15))
def test_linear_vertical_maps_to_rows(n):
    layout = LayoutSpec.linear(n)
    single_col_grid = LayoutSpec(LayoutKind.WRAPPED_GRID, (1,) * n)
    for i in range(1, n + 1):
        assert rank_to_cell(i, layout) == CellAddress(i, 1)
        assert rank_to_cell(i, single_col_grid) == rank_to_cell(i, layout)
