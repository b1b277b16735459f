"""Strip-shape foldability predicates and the curated fixture suites.

Two kinds of results live here. The closed-form predicates decide cube
foldability for tree shapes confined to two or three rows without running
the solver; their correctness argument is the exhaustive equivalence with
the search engine over every such shape up to the box sizes the test suite
sweeps. The fixture suites run the solver over checked-in witness shapes:
the strictness matrix over the nine fold-model tiers, the mixed-sign
witness, the whole-coverage target families, and the puzzle shapes.

Fixture files are JSON documents holding the squares of the flat shape,
the cubes of the target, and optionally a list of marked squares. They
live in the package's fixtures directory unless the FOLD_FIXTURES
environment variable points somewhere else.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional

from .foldcore import F6, FoldModel, Folding, parse_model, verify
from .lattice import (
    Cell,
    DualTree,
    Polyomino,
    canonical_cells,
    is_tree_shape,
)
from .polycube import Polycube, UNIT_CUBE, surface_keys
from .search import SearchLimits, SearchStats, solve, solve_polyomino

__all__ = [
    "Fixture", "FixtureError", "NotATree", "NotWithinStrip",
    "load_fixture", "list_fixtures", "fixtures_dir",
    "strip2_foldable", "strip3_foldable", "tree_shapes_in_box",
    "blocked_two_row_instances", "blocked_three_row_instances",
    "RelationResult", "hierarchy_suite",
    "SignMixReport", "mountain_valley_witness",
    "CoverageReport", "whole_coverage_suite",
    "PuzzleResult", "puzzle_suite",
]


# --- fixtures ---------------------------------------------------------------

class FixtureError(ValueError):
    pass


@dataclass(frozen=True)
class Fixture:
    name: str
    shape: Polyomino
    target: Polycube
    marked: tuple[Cell, ...]
    note: str


def fixtures_dir() -> Path:
    override = os.environ.get("FOLD_FIXTURES")
    if override:
        return Path(override)
    return Path(__file__).resolve().parent / "fixtures"


def list_fixtures() -> list[str]:
    return sorted(p.stem for p in fixtures_dir().glob("*.json"))


def load_fixture(name: str) -> Fixture:
    path = fixtures_dir() / f"{name}.json"
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise FixtureError(f"no fixture {name!r} under {fixtures_dir()}")
    except json.JSONDecodeError as exc:
        raise FixtureError(f"{path}: {exc}")
    try:
        squares = tuple(sorted((int(x), int(y)) for x, y in doc["squares"]))
        cubes = tuple(sorted((int(x), int(y), int(z))
                             for x, y, z in doc["target_cubes"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise FixtureError(f"{path}: malformed fixture: {exc}")
    marked = tuple(sorted((int(x), int(y)) for x, y in doc.get("marked", [])))
    bad = [c for c in marked if c not in squares]
    if bad:
        raise FixtureError(f"{path}: marked squares {bad} not in the shape")
    return Fixture(name=name, shape=Polyomino(squares),
                   target=Polycube.from_cubes(cubes), marked=marked,
                   note=str(doc.get("note", "")))


# --- strip predicates -------------------------------------------------------

class NotATree(ValueError):
    pass


class NotWithinStrip(ValueError):
    pass


def _orientations(cells: tuple[Cell, ...]) -> list[tuple[Cell, ...]]:
    """The distinct axis-aligned placements of the shape, origin-normalized."""
    seen = set()
    out = []
    for sx in (1, -1):
        for sy in (1, -1):
            for swap in (False, True):
                pts = [(sx * x, sy * y) for x, y in cells]
                if swap:
                    pts = [(y, x) for x, y in pts]
                mnx = min(p[0] for p in pts)
                mny = min(p[1] for p in pts)
                o = tuple(sorted((x - mnx, y - mny) for x, y in pts))
                if o not in seen:
                    seen.add(o)
                    out.append(o)
    return out


def _height(cells: tuple[Cell, ...]) -> int:
    return max(y for _, y in cells) + 1


def _arm_system(low_left: int, high_right: int,
                high_left: int, low_right: int) -> bool:
    """Disjunction over the four arm reaches around one vertical dual edge.

    The arms are the horizontal extents of the two components obtained by
    ignoring that edge: low_* measure the component holding the lower
    square, high_* the one holding the upper square. Any satisfied clause
    leaves enough material on both sides to wrap the cube.
    """
    a, b, g, d = low_left, high_right, high_left, low_right
    return (((a >= 2 or d >= 3) and (b >= 2 or g >= 3))
            or ((a >= 3 or d >= 2) and (b >= 3 or g >= 2))
            or (a >= 2 and g >= 3) or (a >= 3 and g >= 2)
            or (b >= 2 and d >= 3) or (b >= 3 and d >= 2)
            or (a >= 1 and g >= 1 and b >= 2 and d >= 2)
            or (a >= 2 and g >= 2 and b >= 1 and d >= 1))


def _two_row_folds(cells: tuple[Cell, ...]) -> bool:
    """Foldability of a height-2 tree shape: some vertical edge must pass
    the arm system."""
    s = set(cells)
    for x, y in cells:
        if y != 0 or (x, 1) not in s:
            continue
        lower, upper = (x, 0), (x, 1)

        def reach(start: Cell) -> set[Cell]:
            seen = {start}
            stack = [start]
            while stack:
                cx, cy = stack.pop()
                for nb in ((cx + 1, cy), (cx - 1, cy),
                           (cx, cy + 1), (cx, cy - 1)):
                    if (nb in s and nb not in seen
                            and {(cx, cy), nb} != {lower, upper}):
                        seen.add(nb)
                        stack.append(nb)
            return seen

        low = reach(lower)
        high = reach(upper)
        if _arm_system(
                max((x - cx for cx, _ in low), default=0),
                max((cx - x for cx, _ in high), default=0),
                max((x - cx for cx, _ in high), default=0),
                max((cx - x for cx, _ in low), default=0)):
            return True
    return False


def _single_attachment(o: tuple[Cell, ...]) -> bool:
    """Height-3 orientation made of a full bottom run plus one narrow
    attachment of height two: the blocked three-row family."""
    rows: list[list[int]] = [[], [], []]
    for x, y in o:
        rows[y].append(x)
    rows = [sorted(r) for r in rows]
    if not rows[0]:
        return False
    if rows[0] != list(range(rows[0][0], rows[0][0] + len(rows[0]))):
        return False
    rest = {c for c in o if c[1] > 0}
    if not rest:
        return False
    for x0 in rows[0]:
        if (x0, 1) not in rest:
            continue
        window = {(x0, 1), (x0 - 1, 1), (x0 + 1, 1),
                  (x0, 2), (x0 - 1, 2), (x0 + 1, 2)}
        if not rest <= window:
            continue
        seen = {(x0, 1)}
        stack = [(x0, 1)]
        while stack:
            cx, cy = stack.pop()
            for nb in ((cx + 1, cy), (cx - 1, cy),
                       (cx, cy + 1), (cx, cy - 1)):
                if nb in rest and nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        if len(seen) == len(rest):
            return True
    return False


def _parse_rows(rows: tuple[str, ...]) -> tuple[Cell, ...]:
    return tuple((x, y) for y, line in enumerate(rows)
                 for x, ch in enumerate(line) if ch == "#")


# Two seven-square shapes outside the narrow-attachment family that the
# exhaustive sweep shows cannot fold either: a three-row frame open at the
# top, and the same with one foot shortened.
_SPORADIC_BLOCKED = {
    min(_orientations(_parse_rows(rows)))
    for rows in ((("###", "#.#", "#.#")), (("###", "#.#", "##.")))
}


def _tree_cells(t: DualTree, max_rows: int, what: str) -> tuple[Cell, ...]:
    cells = t.shape.cells
    if not is_tree_shape(t.shape.cell_set()):
        raise NotATree(
            f"{what} decides tree shapes; this shape has a dual cycle")
    h = min(_height(o) for o in _orientations(cells))
    if h > max_rows:
        raise NotWithinStrip(
            f"shape needs {h} rows in its flattest orientation, "
            f"{what} covers at most {max_rows}")
    return cells


def strip2_foldable(t: DualTree) -> bool:
    """Cube foldability for a tree shape inside a two-row strip.

    True iff some vertical dual edge passes the arm-reach system; the
    blocked shapes are exactly the single rows with same-side unit tabs.
    """
    cells = _tree_cells(t, 2, "strip2_foldable")
    if len(cells) < 6:
        return False
    for o in _orientations(cells):
        if _height(o) == 2:
            return _two_row_folds(o)
    return False  # a single row never folds


def strip3_foldable(t: DualTree) -> bool:
    """Cube foldability for a tree shape inside a three-row strip.

    Beyond the two-row rule, the blocked shapes are the full bottom runs
    carrying one narrow height-two attachment, plus two sporadic
    seven-square frames.
    """
    cells = _tree_cells(t, 3, "strip3_foldable")
    if len(cells) < 6:
        return False
    orients = _orientations(cells)
    if min(_height(o) for o in orients) <= 2:
        for o in orients:
            if _height(o) == 2:
                return _two_row_folds(o)
        return False
    if min(orients) in _SPORADIC_BLOCKED:
        return False
    return not any(_height(o) == 3 and _single_attachment(o)
                   for o in orients)


def tree_shapes_in_box(rows: int, cols: int) -> list[Polyomino]:
    """Every free tree shape fitting a rows-by-cols box, each once.

    Enumerates occupancy masks of the box directly; shapes are returned in
    canonical form, deduplicated across symmetries, sorted.
    """
    if rows < 1 or cols < 1 or rows * cols > 22:
        raise ValueError("box enumeration is meant for small strips")
    boxes = [(x, y) for y in range(rows) for x in range(cols)]
    n_bits = len(boxes)
    out: set[tuple[Cell, ...]] = set()
    for mask in range(1, 1 << n_bits):
        cells = [boxes[i] for i in range(n_bits) if mask >> i & 1]
        cset = frozenset(cells)
        if not is_tree_shape(cset):  # also rejects disconnected picks
            continue
        out.add(canonical_cells(cset))
    return [Polyomino(c) for c in sorted(out)]


def blocked_two_row_instances(max_squares: int) -> Iterator[Polyomino]:
    """The two-row blocked family: a single row with same-side unit tabs.

    Tabs sit two apart or more so the shape stays a tree. Every instance
    with at least one tab and at most max_squares squares is yielded once,
    up to symmetry.
    """
    seen: set[tuple[Cell, ...]] = set()
    for length in range(2, max_squares):
        spine = [(x, 0) for x in range(length)]
        free = length

        def rec(col: int, tabs: list[int]) -> Iterator[list[int]]:
            if col >= length:
                if tabs:
                    yield tabs
                return
            yield from rec(col + 1, tabs)
            if not tabs or col - tabs[-1] >= 2:
                if len(spine) + len(tabs) + 1 <= max_squares:
                    yield from rec(col + 2, tabs + [col])

        for tabs in rec(0, []):
            cells = canonical_cells(spine + [(c, 1) for c in tabs])
            if cells not in seen:
                seen.add(cells)
                yield Polyomino(cells)


def blocked_three_row_instances(max_squares: int) -> Iterator[Polyomino]:
    """The three-row blocked family: a full bottom run with one narrow
    height-two attachment (plus the two sporadic frames), as tree shapes."""
    seen: set[tuple[Cell, ...]] = set()
    arms = (
        ((0, 1), (0, 2)),
        ((0, 1), (0, 2), (1, 2)),
        ((0, 1), (0, 2), (-1, 2)),
        ((0, 1), (0, 2), (-1, 2), (1, 2)),
    )
    for length in range(1, max_squares):
        spine = [(x, 0) for x in range(length)]
        for x0 in range(length):
            for arm in arms:
                cells = spine + [(x0 + dx, y) for dx, y in arm]
                if len(cells) > max_squares or len(set(cells)) != len(cells):
                    continue
                if not is_tree_shape(frozenset(cells)):
                    continue
                canon = canonical_cells(cells)
                if canon not in seen:
                    seen.add(canon)
                    yield Polyomino(canon)
    for canon in sorted(_SPORADIC_BLOCKED):
        if len(canon) <= max_squares and canon not in seen:
            seen.add(canon)
            yield Polyomino(canon)


# --- the strictness suite over the model tiers ------------------------------

# Each relation separates two model tiers with one witness fixture: the
# shape folds onto its target in the stronger tier and provably not in the
# weaker one. The last row's stronger side permits arbitrary fold angles,
# which no exhaustive search can decide; the suite reports it as such and
# checks the refutation side only.
_RELATIONS: tuple[tuple[int, str, str, str], ...] = (
    (1, "strict_sign_wrap", "F2", "F1"),
    (2, "strict_pair_ring", "F4", "F1"),
    (3, "strict_interior", "F3", "F1"),
    (4, "strict_pair_ring", "F4", "F2"),
    (5, "strict_sign_wrap", "F2", "F4"),
    (6, "strict_interior", "F3", "F4"),
    (7, "strict_pair_ring", "F4", "F3"),
    (8, "strict_sign_wrap", "F2", "F3"),
    (9, "strict_interior", "F3", "F2"),
    (10, "strict_interior", "F5", "F2"),
    (11, "strict_sign_wrap", "F5", "F3"),
    (12, "strict_pair_ring", "F7", "F3"),
    (13, "strict_interior", "F7", "F4"),
    (14, "strict_sign_wrap", "F6", "F4"),
    (15, "strict_pair_ring", "F6", "F1"),
    (16, "strict_interior", "F7", "F6"),
    (17, "strict_sign_wrap", "F6", "F7"),
    (18, "strict_sign_wrap", "F5", "F7"),
    (19, "strict_pair_ring", "F7", "F5"),
    (20, "strict_pair_ring", "F6", "F5"),
    (21, "strict_interior", "F5", "F6"),
    (22, "strict_interior", "F8", "F6"),
    (23, "strict_pair_ring", "F8", "F5"),
    (24, "strict_sign_wrap", "F8", "F7"),
    (25, "strict_caterpillar", "F9", "F8"),
)

_EXPECTED_SIZES = {
    "strict_pair_ring": (9, 6),
    "strict_interior": (11, 10),
    "strict_sign_wrap": (46, 46),
    "strict_caterpillar": (24, 22),
}


@dataclass
class RelationResult:
    number: int
    fixture: str
    stronger: str
    weaker: str
    folds_in_stronger: Optional[bool]  # None: model not executable
    folds_in_weaker: bool
    stronger_nodes: int = 0
    weaker_nodes: int = 0
    note: str = ""

    @property
    def ok(self) -> bool:
        if self.folds_in_stronger is None:
            return not self.folds_in_weaker
        return self.folds_in_stronger and not self.folds_in_weaker


def hierarchy_suite(
        limits: Optional[SearchLimits] = None) -> list[RelationResult]:
    """Run every strictness relation; each fixture/model pair solves once.

    Shape and surface sizes of the checked-in fixtures are asserted before
    any search runs, as transcription checksums.
    """
    fixtures = {name: load_fixture(name) for name in _EXPECTED_SIZES}
    for name, (squares, faces) in _EXPECTED_SIZES.items():
        fx = fixtures[name]
        got = (len(fx.shape), len(surface_keys(fx.target)))
        if got != (squares, faces):
            raise FixtureError(
                f"{name}: expected {squares} squares on {faces} faces, "
                f"file has {got[0]} on {got[1]}")

    verdicts: dict[tuple[str, str], tuple[bool, int]] = {}

    def folds(fixture: str, model_name: str) -> tuple[bool, int]:
        key = (fixture, model_name)
        if key not in verdicts:
            fx = fixtures[fixture]
            stats = SearchStats()
            found = solve_polyomino(fx.shape, fx.target,
                                    parse_model(model_name),
                                    limits=limits, stats_out=stats)
            verdicts[key] = (found is not None, stats.nodes)
        return verdicts[key]

    results = []
    for number, fixture, stronger, weaker in _RELATIONS:
        weak_folds, weak_nodes = folds(fixture, weaker)
        if not parse_model(stronger).executable():
            results.append(RelationResult(
                number=number, fixture=fixture, stronger=stronger,
                weaker=weaker, folds_in_stronger=None,
                folds_in_weaker=weak_folds, weaker_nodes=weak_nodes,
                note=f"{stronger} permits arbitrary angles; no exhaustive "
                     "search can decide it, so only the refutation side "
                     "runs"))
            continue
        strong_folds, strong_nodes = folds(fixture, stronger)
        results.append(RelationResult(
            number=number, fixture=fixture, stronger=stronger,
            weaker=weaker, folds_in_stronger=strong_folds,
            folds_in_weaker=weak_folds, stronger_nodes=strong_nodes,
            weaker_nodes=weak_nodes))
    return results


# --- the mixed-sign witness -------------------------------------------------

@dataclass
class SignMixReport:
    shape: Polyomino
    single_sign: Optional[Folding]
    mixed: Optional[Folding]
    verified: bool

    @property
    def ok(self) -> bool:
        return (self.single_sign is None and self.mixed is not None
                and self.mixed.count_180() == 1 and self.verified)


def mountain_valley_witness() -> SignMixReport:
    """One shape that needs both fold signs.

    Under folds of a single sign (here +90 with +180) the column's two
    flaps chase the same face and the shape cannot close; allowing both
    signs, one 180 fold-back rescues it. The returned mixed witness uses
    exactly one 180.
    """
    fx = load_fixture("sign_mix_column")
    single_sign = parse_model("+90,+180")
    single = solve_polyomino(fx.shape, fx.target, single_sign)
    t = DualTree.of_tree_shape(fx.shape)
    mixed = solve(t, fx.target, F6, max_180=1)
    verified = mixed is not None and verify(mixed, F6, sealed=True)
    return SignMixReport(shape=fx.shape, single_sign=single, mixed=mixed,
                         verified=verified)


# --- whole-coverage target families ----------------------------------------

@dataclass
class CoverageReport:
    """Verdicts for the families where every cube face must take a whole
    square, plus the nine-square sheet that cannot manage it."""

    side_square_folds: dict[tuple[int, int], bool] = field(
        default_factory=dict)
    staircase_folds: bool = False
    pair_triple_folds: dict[int, bool] = field(default_factory=dict)
    sheet_grid_folds: bool = True      # expected False
    sheet_diagonal_folds: bool = True  # expected False
    note: str = ("finer-than-grid creases are outside the executable model "
                 "set; with them the nine-square sheet closes once faces "
                 "may be covered by square halves, which is exactly the "
                 "coverage rule this suite turns off")

    @property
    def ok(self) -> bool:
        return (all(self.side_square_folds.values())
                and len(self.side_square_folds) == 16
                and self.staircase_folds
                and all(self.pair_triple_folds.values())
                and len(self.pair_triple_folds) == 3
                and not self.sheet_grid_folds
                and not self.sheet_diagonal_folds)


def _po(cells: list[Cell]) -> Polyomino:
    return Polyomino(tuple(sorted(cells)))


def whole_coverage_suite(
        limits: Optional[SearchLimits] = None) -> CoverageReport:
    """Grid-fold the three target families; refute the nine-square sheet.

    The families: a column of four with one square hung on each side at
    any height; three vertical dominoes in a staircase; a vertical domino
    against a triple with one more square at any height. Every member
    folds with grid creases alone. The 3x3 sheet, by contrast, cannot
    cover the cube with whole squares even when diagonal creases are
    allowed.
    """
    report = CoverageReport()
    for h1 in range(4):
        for h2 in range(4):
            shape = _po([(0, y) for y in range(4)] + [(-1, h1), (1, h2)])
            f = solve_polyomino(shape, UNIT_CUBE, F6, limits=limits)
            report.side_square_folds[(h1, h2)] = (
                f is not None and f.count_diagonal() == 0)

    stair = _po([(0, 0), (0, 1), (1, 1), (1, 2), (2, 2), (2, 3)])
    f = solve_polyomino(stair, UNIT_CUBE, F6, limits=limits)
    report.staircase_folds = f is not None and f.count_diagonal() == 0

    for h in range(3):
        shape = _po([(0, 2), (0, 3)] + [(1, y) for y in range(3)] + [(2, h)])
        f = solve_polyomino(shape, UNIT_CUBE, F6, limits=limits)
        report.pair_triple_folds[h] = (
            f is not None and f.count_diagonal() == 0)

    sheet = _po([(x, y) for x in range(3) for y in range(3)])
    whole = SearchLimits(require_whole_coverage=True)
    if limits is not None:
        whole = SearchLimits(max_nodes=limits.max_nodes,
                             max_seconds=limits.max_seconds,
                             require_whole_coverage=True)
    report.sheet_grid_folds = (
        solve_polyomino(sheet, UNIT_CUBE, F6, limits=whole) is not None)
    report.sheet_diagonal_folds = (
        solve_polyomino(sheet, UNIT_CUBE, F6.with_diagonal(), limits=whole)
        is not None)
    return report


# --- puzzle shapes ----------------------------------------------------------

_PUZZLES = ("puzzle_ring_10", "puzzle_ring_12", "puzzle_ring_square",
            "puzzle_ring_tab")


@dataclass
class PuzzleResult:
    name: str
    squares: int
    folding: Optional[Folding]
    verified: bool
    fold_180_count: int = 0

    @property
    def ok(self) -> bool:
        return self.folding is not None and self.verified


def puzzle_suite(
        limits: Optional[SearchLimits] = None) -> list[PuzzleResult]:
    """Fold each puzzle shape onto the unit cube and re-verify the answer.

    All four shapes enclose holes, so their dual graphs have cycles. The
    solver folds them as one uncut sheet: creases are searched on a
    spanning tree and every remaining seam must come out carrying a legal
    angle, which the sealed re-verification checks independently.
    """
    out = []
    for name in _PUZZLES:
        fx = load_fixture(name)
        f = solve_polyomino(fx.shape, fx.target, F6, limits=limits)
        verified = f is not None and verify(f, F6, sealed=True)
        out.append(PuzzleResult(
            name=name, squares=len(fx.shape), folding=f, verified=verified,
            fold_180_count=0 if f is None else f.count_180()))
    return out
