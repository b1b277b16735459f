"""Free-polyomino enumeration and the cube classification table.

Shapes are grown one square at a time from the monomino, deduplicating
through the canonical form, so each free polyomino appears exactly once.
Classification of a dual tree against the unit cube runs in three widening
steps: plain +-90 grid folds, then +-180, then diagonal splits; the verdict
names the first step that folds it. Rows therefore partition the dual-tree
count, which is asserted in tests against the published table.

Work is farmed per shape across a process pool; results are re-sorted by
the canonical shape code before aggregation, so the table and the verdict
log are byte-identical no matter how many workers ran.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass
from typing import Iterator, Optional, TextIO

from .foldcore import F2, F6
from .lattice import (
    Cell,
    Polyomino,
    canonical_cells,
    canonical_dual_trees,
    shape_code,
    tree_code,
)
from .polycube import UNIT_CUBE
from .search import ResourceLimitExceeded, SearchLimits, solve

DEFAULT_SIZE_CAP = 14

VERDICT_90 = "fold90"
VERDICT_180 = "add180"
VERDICT_DIAG = "add_diag"
VERDICT_NONE = "not_foldable"
VERDICT_UNKNOWN = "unknown"  # budget ran out before step 3 finished

_VERDICTS = (VERDICT_90, VERDICT_180, VERDICT_DIAG, VERDICT_NONE)


class SizeCapExceeded(ValueError):
    pass


_levels: list[list[tuple[Cell, ...]]] = [[], [((0, 0),)]]


def _free_level(n: int) -> list[tuple[Cell, ...]]:
    """Canonical cell tuples of all free n-ominoes, sorted; levels cached."""
    while len(_levels) <= n:
        grown: set[tuple[Cell, ...]] = set()
        for cells in _levels[-1]:
            occupied = set(cells)
            for x, y in cells:
                for c in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                    if c not in occupied:
                        grown.add(canonical_cells(occupied | {c}))
        _levels.append(sorted(grown))
    return _levels[n]


def enumerate_free(n: int, size_cap: int = DEFAULT_SIZE_CAP) -> Iterator[Polyomino]:
    """All free polyominoes of n squares, canonical, each exactly once."""
    if not 1 <= n <= size_cap:
        raise SizeCapExceeded(f"n={n} outside 1..{size_cap}")
    for cells in _free_level(n):
        yield Polyomino(cells)


def free_count(n: int, size_cap: int = DEFAULT_SIZE_CAP) -> int:
    if not 1 <= n <= size_cap:
        raise SizeCapExceeded(f"n={n} outside 1..{size_cap}")
    return len(_free_level(n))


def classify_tree(t, limits: Optional[SearchLimits] = None) -> str:
    """First fold model step that folds t onto the cube, or not_foldable."""
    if solve(t, UNIT_CUBE, F2, limits) is not None:
        return VERDICT_90
    if solve(t, UNIT_CUBE, F6, limits) is not None:
        return VERDICT_180
    if solve(t, UNIT_CUBE, F6.with_diagonal(), limits) is not None:
        return VERDICT_DIAG
    return VERDICT_NONE


@dataclass
class ShapeVerdicts:
    cells: tuple[Cell, ...]
    verdicts: tuple[tuple[str, str], ...]  # (tree code, verdict), tree order

    @property
    def code(self) -> str:
        return shape_code(Polyomino(self.cells))


def _classify_shape(args) -> ShapeVerdicts:
    cells, max_nodes, max_seconds = args
    limits = SearchLimits(max_nodes=max_nodes, max_seconds=max_seconds)
    p = Polyomino(cells)
    out = []
    for t in canonical_dual_trees(p):
        try:
            v = classify_tree(t, limits)
        except ResourceLimitExceeded:
            v = VERDICT_UNKNOWN
        out.append((tree_code(t), v))
    return ShapeVerdicts(cells, tuple(out))


@dataclass
class TableRow:
    n: int
    free: int
    dual_trees: int
    fold90: Optional[int]
    add180: Optional[int]
    add_diag: Optional[int]
    not_foldable: Optional[int]
    complete: bool = True

    def csv_cells(self) -> list[str]:
        def s(v: Optional[int]) -> str:
            return "" if v is None else str(v)

        return [str(self.n), str(self.free), str(self.dual_trees),
                s(self.fold90), s(self.add180), s(self.add_diag),
                s(self.not_foldable)]


CSV_HEADER = "n,free,dual_trees,fold90,add180,add_diag,not_foldable"


def rows_to_csv(rows: list[TableRow]) -> str:
    """Byte-stable table: header, one row per n ascending, LF endings.

    A row cut short by the search budget is marked by a comment line right
    after it; the numbers themselves only count finished classifications.
    """
    lines = [CSV_HEADER]
    for r in sorted(rows, key=lambda r: r.n):
        lines.append(",".join(r.csv_cells()))
        if not r.complete:
            lines.append(f"# n={r.n}: partial, search budget exhausted")
    return "\n".join(lines) + "\n"


def _shape_stream(n: int) -> Iterator[tuple]:
    for cells in _free_level(n):
        yield cells


def classify_cube(n: int, jobs: int = 1,
                  max_nodes: Optional[int] = None,
                  max_seconds: Optional[float] = None,
                  log: Optional[TextIO] = None,
                  size_cap: int = DEFAULT_SIZE_CAP) -> TableRow:
    """Classify every canonical dual tree of every free n-omino.

    Returns the table row; when a budget is given and some tree could not
    be finished, the row is marked incomplete and the unfinished trees are
    excluded from the counts rather than guessed.
    """
    if n < 2:
        raise ValueError("classification needs n >= 2")
    if n > size_cap:
        raise SizeCapExceeded(f"n={n} outside 2..{size_cap}")
    tasks = [(cells, max_nodes, max_seconds) for cells in _shape_stream(n)]
    if jobs > 1 and len(tasks) > 1:
        with multiprocessing.Pool(jobs) as pool:
            results = list(pool.imap_unordered(
                _classify_shape, tasks,
                chunksize=max(1, len(tasks) // (jobs * 8))))
    else:
        results = [_classify_shape(t) for t in tasks]
    results.sort(key=lambda sv: sv.cells)

    counts = {v: 0 for v in _VERDICTS}
    unknown = 0
    trees = 0
    for sv in results:
        for code, v in sv.verdicts:
            trees += 1
            if v == VERDICT_UNKNOWN:
                unknown += 1
            else:
                counts[v] += 1
        if log is not None:
            for code, v in sv.verdicts:
                log.write(f"n={n} shape={sv.code} tree={code} verdict={v}\n")
    return TableRow(
        n=n, free=len(results), dual_trees=trees,
        fold90=counts[VERDICT_90], add180=counts[VERDICT_180],
        add_diag=counts[VERDICT_DIAG], not_foldable=counts[VERDICT_NONE],
        complete=unknown == 0)


@dataclass
class NonFoldableReport:
    n: int
    shapes: list[Polyomino]
    shape_count: int
    tree_count: int


def nonfoldable_report(n: int, jobs: int = 1,
                       max_nodes: Optional[int] = None,
                       max_seconds: Optional[float] = None) -> NonFoldableReport:
    """Shapes that witness non-foldability at size n.

    At n=6 the interesting shapes are those none of whose dual trees fold,
    and the tree count is everything they own; from n=7 up the shapes are
    those with at least one unfoldable dual tree and the count covers just
    the unfoldable trees.
    """
    if n < 6:
        raise ValueError("report is defined for n >= 6")
    tasks = [(cells, max_nodes, max_seconds) for cells in _shape_stream(n)]
    if jobs > 1 and len(tasks) > 1:
        with multiprocessing.Pool(jobs) as pool:
            results = list(pool.imap_unordered(
                _classify_shape, tasks,
                chunksize=max(1, len(tasks) // (jobs * 8))))
    else:
        results = [_classify_shape(t) for t in tasks]
    results.sort(key=lambda sv: sv.cells)

    shapes: list[Polyomino] = []
    tree_count = 0
    for sv in results:
        bad = sum(1 for _c, v in sv.verdicts if v == VERDICT_NONE)
        if n == 6:
            if bad == len(sv.verdicts):
                shapes.append(Polyomino(sv.cells))
                tree_count += len(sv.verdicts)
        elif bad >= 1:
            shapes.append(Polyomino(sv.cells))
            tree_count += bad
    return NonFoldableReport(n=n, shapes=shapes, shape_count=len(shapes),
                             tree_count=tree_count)
