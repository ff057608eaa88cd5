"""Result-page geometry and the rank <-> (row, column) mapping.

Ranks and cells are 1-based. Reading order is row-major: left to right
within a row, rows top to bottom.
"""

from __future__ import annotations

import bisect
import enum
from dataclasses import dataclass, field
from itertools import accumulate
from typing import Any, Mapping, Sequence


class LayoutKind(enum.Enum):
    LINEAR_VERTICAL = "linear_vertical"
    LINEAR_HORIZONTAL = "linear_horizontal"
    WRAPPED_GRID = "wrapped_grid"
    MULTI_LIST = "multi_list"


@dataclass(frozen=True)
class CellAddress:
    row: int
    col: int


@dataclass(frozen=True)
class LayoutSpec:
    kind: LayoutKind
    row_lengths: tuple[int, ...]
    _offsets: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        lengths = tuple(int(n) for n in self.row_lengths)
        object.__setattr__(self, "row_lengths", lengths)
        if not lengths:
            raise ValueError("layout needs at least one row")
        if any(n < 1 for n in lengths):
            raise ValueError(f"row lengths must be positive, got {list(lengths)}")
        if self.kind is LayoutKind.LINEAR_VERTICAL and any(n != 1 for n in lengths):
            raise ValueError("linear_vertical layouts have exactly one cell per row")
        if self.kind is LayoutKind.LINEAR_HORIZONTAL and len(lengths) != 1:
            raise ValueError("linear_horizontal layouts have exactly one row")
        if self.kind is LayoutKind.WRAPPED_GRID:
            width = lengths[0]
            if any(n != width for n in lengths[:-1]) or lengths[-1] > width:
                raise ValueError(
                    "wrapped_grid rows must share one width (only the last row may be shorter), "
                    f"got {list(lengths)}"
                )
        # offsets[k] = number of cells before row k+1
        object.__setattr__(self, "_offsets", (0, *accumulate(lengths)))

    @classmethod
    def linear(cls, n: int) -> LayoutSpec:
        return cls(LayoutKind.LINEAR_VERTICAL, (1,) * n)

    @classmethod
    def grid(cls, rows: int, cols: int, total: int | None = None) -> LayoutSpec:
        return cls(LayoutKind.WRAPPED_GRID, expand_rows(rows, cols, total))

    @property
    def n_items(self) -> int:
        return self._offsets[-1]

    @property
    def n_rows(self) -> int:
        return len(self.row_lengths)

    def row_ranks(self, row: int) -> range:
        """Ranks of the cells in ``row`` (1-based), left to right."""
        if not 1 <= row <= self.n_rows:
            raise ValueError(f"row {row} outside [1, {self.n_rows}]")
        return range(self._offsets[row - 1] + 1, self._offsets[row] + 1)

    def cells(self) -> list[CellAddress]:
        return [rank_to_cell(i, self) for i in range(1, self.n_items + 1)]


def expand_rows(rows: int, cols: int, total: int | None = None) -> tuple[int, ...]:
    if rows < 1 or cols < 1:
        raise ValueError(f"rows and cols must be positive, got rows={rows}, cols={cols}")
    lengths = [cols] * rows
    if total is not None:
        if not (rows - 1) * cols < total <= rows * cols:
            raise ValueError(f"total={total} does not fit {rows} rows of {cols}")
        lengths[-1] = total - (rows - 1) * cols
    return tuple(lengths)


def rank_to_cell(i: int, layout: LayoutSpec) -> CellAddress:
    n = layout.n_items
    if not 1 <= i <= n:
        raise ValueError(f"rank {i} outside [1, {n}]")
    row = bisect.bisect_left(layout._offsets, i)
    return CellAddress(row, i - layout._offsets[row - 1])


def cell_to_rank(cell: CellAddress, layout: LayoutSpec) -> int:
    if not 1 <= cell.row <= layout.n_rows:
        raise ValueError(f"row {cell.row} outside [1, {layout.n_rows}]")
    width = layout.row_lengths[cell.row - 1]
    if not 1 <= cell.col <= width:
        raise ValueError(f"column {cell.col} outside [1, {width}] for row {cell.row}")
    return layout._offsets[cell.row - 1] + cell.col


def layout_from_dict(data: Mapping[str, Any]) -> LayoutSpec:
    try:
        kind = LayoutKind(data["kind"])
    except (KeyError, ValueError):
        kinds = ", ".join(k.value for k in LayoutKind)
        raise ValueError(f"layout.kind must be one of {kinds}") from None
    if "row_lengths" in data:
        lengths: Sequence[int] = data["row_lengths"]
    elif "rows" in data and "cols" in data:
        lengths = expand_rows(int(data["rows"]), int(data["cols"]), data.get("total"))
    else:
        raise ValueError("layout needs either row_lengths or rows and cols")
    return LayoutSpec(kind, tuple(lengths))


def layout_to_dict(layout: LayoutSpec) -> dict[str, Any]:
    return {"kind": layout.kind.value, "row_lengths": list(layout.row_lengths)}
