"""Command line front end.

Verbs:
  check      fold one shape onto a target and write the witness file
  table      verdict census over all free shapes, CSV plus a chart
  render     draw a stored witness as a crease-pattern SVG
  enum       count free shapes and their canonical dual trees
  strips     closed-form verdicts for shapes in two- or three-row strips
  iamond     triangle-lattice shapes against the regular tetrahedron
  hierarchy  fixture suite separating the fold-operation models
  dp         dynamic-programming path for tree shapes and small targets

Exit status: 0 when the shape folds (or a suite passes), 1 when it is
proven not to fold (or a suite fails), 2 when the search budget ran out
before an answer, 64 for bad command lines, 65 for files that do not
parse. A JSON config file (--config) may hold defaults for model, jobs,
nodes and time_limit; explicit flags win over the file. The FOLD_FIXTURES
environment variable points "fixture:NAME" lookups at another directory.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from . import __version__
from .characterize import (FixtureError, NotWithinStrip, hierarchy_suite,
                           list_fixtures, load_fixture,
                           mountain_valley_witness, puzzle_suite,
                           strip2_foldable, strip3_foldable,
                           tree_shapes_in_box, whole_coverage_suite)
from .enumeration import (SizeCapExceeded, classify_cube, enumerate_free,
                          free_count, rows_to_csv)
from .foldcore import (F6, UnsupportedModel, folding_from_json,
                       folding_to_json, parse_model, verify)
from .iamond import (Polyiamond, brute_fold_tetra, enumerate_free_iamonds,
                     exceptional_tree_iamonds, folds_to_tetrahedron,
                     iamond_to_text, iamond_tree, parse_iamond_cells)
from .lattice import (DualTree, Polyomino, canonical_dual_trees,
                      is_tree_shape, load_shape_file)
from .polycube import UNIT_CUBE, Polycube
from .render import RenderError, render_svg
from .search import (ResourceLimitExceeded, SearchLimits, SearchStats,
                     solve, solve_polyomino)
from .treedp import DpStats, FourSquaresAtEdge, TargetTooLarge, dp_foldable

EXIT_FOLDS = 0
EXIT_UNFOLDABLE = 1
EXIT_BUDGET = 2
EXIT_USAGE = 64
EXIT_DATA = 65

_CONFIG_KEYS = ("model", "jobs", "nodes", "time_limit")


class DataError(Exception):
    """A file or argument that does not parse; reported on exit code 65."""


class _Parser(argparse.ArgumentParser):
    # Usage mistakes must not collide with the budget-exhausted code 2.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_json_file(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise DataError(f"{path}: {e.strerror or e}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DataError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}")


def _connected(cells: frozenset) -> bool:
    start = next(iter(cells))
    seen = {start}
    queue = [start]
    while queue:
        x, y = queue.pop()
        for nb in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if nb in cells and nb not in seen:
                seen.add(nb)
                queue.append(nb)
    return len(seen) == len(cells)


def _read_shape(spec: str) -> tuple[Polyomino, Optional[Polycube], str]:
    """Shape from a path or "fixture:NAME"; fixtures also carry a target."""
    if spec.startswith("fixture:"):
        name = spec[len("fixture:"):]
        try:
            fx = load_fixture(name)
        except FixtureError as e:
            raise DataError(f"{spec}: {e}; available: "
                            + ", ".join(list_fixtures()))
        return fx.shape, fx.target, name
    try:
        cells = load_shape_file(spec)
    except OSError as e:
        raise DataError(f"{spec}: {e.strerror or e}")
    except json.JSONDecodeError as e:
        raise DataError(f"{spec}: line {e.lineno} column {e.colno}: {e.msg}")
    except ValueError as e:
        raise DataError(f"{spec}: {e}")
    if not cells:
        raise DataError(f"{spec}: no squares")
    if not _connected(cells):
        raise DataError(f"{spec}: squares are not edge-connected")
    return Polyomino(tuple(sorted(cells))), None, Path(spec).stem


def _read_target(spec: Optional[str],
                 fallback: Optional[Polycube]) -> Polycube:
    if spec is None:
        return fallback if fallback is not None else UNIT_CUBE
    if spec == "cube":
        return UNIT_CUBE
    obj = _load_json_file(spec)
    if isinstance(obj, dict):
        raw = obj.get("cubes", obj.get("target_cubes"))
        if raw is None:
            raise DataError(f"{spec}: expected a 'cubes' list")
    else:
        raw = obj
    try:
        cubes = frozenset((int(x), int(y), int(z)) for x, y, z in raw)
        return Polycube(cubes)
    except (TypeError, ValueError) as e:
        raise DataError(f"{spec}: {e}")


def _parse_model_arg(spec: str):
    try:
        return parse_model(spec)
    except ValueError as e:
        raise DataError(str(e))


def _write_text(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise DataError(f"{path}: {e.strerror or e}")


def _write_witness(path: str, folding) -> None:
    _write_text(path, json.dumps(folding_to_json(folding),
                                 indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------- check

def cmd_check(args) -> int:
    model = _parse_model_arg(args.model)
    sealed = not args.cuts

    if args.verify_only:
        obj = _load_json_file(args.shape)
        try:
            f = folding_from_json(obj)
        except (KeyError, TypeError, ValueError) as e:
            raise DataError(f"{args.shape}: not a witness file ({e})")
        report: list[str] = []
        if verify(f, model, report, sealed=sealed):
            print(f"{args.shape}: verifies under {args.model}")
            return EXIT_FOLDS
        print(f"{args.shape}: does not verify under {args.model}",
              file=sys.stderr)
        for line in report:
            print(f"  {line}", file=sys.stderr)
        return EXIT_UNFOLDABLE

    shape, fixture_target, name = _read_shape(args.shape)
    target = _read_target(args.target, fixture_target)
    limits = SearchLimits(max_nodes=args.nodes, max_seconds=args.time_limit,
                          require_whole_coverage=args.whole_coverage)
    stats = SearchStats()
    try:
        f = solve_polyomino(shape, target, model, limits, stats,
                            allow_cuts=args.cuts)
    except ResourceLimitExceeded as e:
        print(f"{name}: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except UnsupportedModel as e:
        raise DataError(str(e))

    if f is None:
        print(f"{name}: does not fold onto the target under {args.model}"
              f" ({stats.nodes} placements tried)")
        return EXIT_UNFOLDABLE

    report = []
    if not verify(f, model, report, sealed=sealed):
        print("internal error: witness failed verification: "
              + "; ".join(report), file=sys.stderr)
        return 70

    out = args.out or f"{name}.fold.json"
    _write_witness(out, f)
    print(f"{name}: folds; {len(shape.cells)} squares onto"
          f" {len(f.target.cubes)} cube(s),"
          f" {f.count_180()} half-turn fold(s),"
          f" {f.count_diagonal()} diagonal fold(s)")
    print(f"witness written to {out}")
    return EXIT_FOLDS


# ---------------------------------------------------------------- table

def _table_figure(rows, path: str) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    full = [r for r in rows if r.fold90 is not None]
    if full:
        ns = [r.n for r in full]
        stack = [
            ("quarter turns suffice", [r.fold90 for r in full]),
            ("need a half turn", [r.add180 for r in full]),
            ("need diagonal creases", [r.add_diag for r in full]),
            ("never fold", [r.not_foldable for r in full]),
        ]
        bottom = [0] * len(full)
        for label, values in stack:
            ax.bar(ns, values, bottom=bottom, label=label)
            bottom = [b + v for b, v in zip(bottom, values)]
        ax.set_xticks(ns)
        ax.legend(loc="upper left")
    else:
        ns = [r.n for r in rows]
        ax.bar(ns, [r.dual_trees for r in rows])
        ax.set_xticks(ns)
    ax.set_xlabel("squares in the shape")
    ax.set_ylabel("canonical dual trees")
    ax.set_title("cube foldability census")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def cmd_table(args) -> int:
    max_n = args.max_n
    if args.long_run:
        max_n = max(max_n, 10)
    if max_n < 2:
        raise DataError("the census starts at two squares")
    rows = []
    try:
        for n in range(2, max_n + 1):
            rows.append(classify_cube(
                n, jobs=args.jobs, max_nodes=args.nodes,
                max_seconds=args.time_limit,
                log=sys.stderr if args.progress else None))
    except SizeCapExceeded as e:
        raise DataError(str(e))
    csv = rows_to_csv(rows)
    if args.out == "-":
        sys.stdout.write(csv)
    else:
        out = args.out or "fold_table.csv"
        _write_text(out, csv)
        figure = str(Path(out).with_suffix(".png"))
        _table_figure(rows, figure)
        print(f"table written to {out}")
        print(f"figure written to {figure}")
    if any(not r.complete for r in rows):
        print("some rows are partial: search budget ran out",
              file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_FOLDS


# ---------------------------------------------------------------- render

def cmd_render(args) -> int:
    obj = _load_json_file(args.witness)
    try:
        f = folding_from_json(obj)
    except (KeyError, TypeError, ValueError) as e:
        raise DataError(f"{args.witness}: not a witness file ({e})")
    try:
        svg = render_svg(f)
    except RenderError as e:
        raise DataError(f"{args.witness}: {e}")
    out = args.out or str(Path(args.witness).with_suffix(".svg"))
    _write_text(out, svg)
    print(f"crease pattern written to {out}")
    return EXIT_FOLDS


# ---------------------------------------------------------------- enum

def cmd_enum(args) -> int:
    lines = ["n,free,dual_trees" if args.trees else "n,free"]
    try:
        for n in range(1, args.max_n + 1):
            row = [str(n), str(free_count(n))]
            if args.trees:
                total = sum(len(canonical_dual_trees(p))
                            for p in enumerate_free(n))
                row.append(str(total))
            lines.append(",".join(row))
    except SizeCapExceeded as e:
        raise DataError(str(e))
    text = "\n".join(lines) + "\n"
    if args.out and args.out != "-":
        _write_text(args.out, text)
        print(f"counts written to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_FOLDS


# ---------------------------------------------------------------- strips

def cmd_strips(args) -> int:
    if args.shape:
        shape, _target, name = _read_shape(args.shape)
        if not is_tree_shape(frozenset(shape.cells)):
            raise DataError(f"{name}: strip verdicts cover tree shapes only"
                            " (this one has a dual cycle)")
        t = DualTree.of_tree_shape(shape)
        try:
            ok = strip3_foldable(t)
        except NotWithinStrip:
            raise DataError(f"{name}: does not fit a strip of three rows")
        print(f"{name}: {'folds onto the cube' if ok else 'does not fold'}"
              " (closed-form strip verdict)")
        return EXIT_FOLDS if ok else EXIT_UNFOLDABLE

    if args.rows < 1 or args.rows > 3:
        raise DataError("closed-form verdicts exist for one to three rows")
    predicate = strip2_foldable if args.rows <= 2 else strip3_foldable
    try:
        shapes = tree_shapes_in_box(args.rows, args.cols)
    except ValueError as e:
        raise DataError(str(e))
    folds = 0
    mismatches = 0
    for p in shapes:
        t = DualTree.of_tree_shape(p)
        ok = predicate(t)
        folds += ok
        if args.compare and ok != (solve(t, UNIT_CUBE, F6) is not None):
            mismatches += 1
            print(f"MISMATCH: {p.cells}", file=sys.stderr)
    print(f"{args.rows}x{args.cols} box: {len(shapes)} tree shapes,"
          f" {folds} fold, {len(shapes) - folds} do not")
    if args.compare:
        print(f"search agreement: {mismatches} mismatches")
        if mismatches:
            return EXIT_UNFOLDABLE
    return EXIT_FOLDS


# ---------------------------------------------------------------- iamond

def cmd_iamond(args) -> int:
    if args.shape:
        try:
            text = Path(args.shape).read_text(encoding="utf-8")
        except OSError as e:
            raise DataError(f"{args.shape}: {e.strerror or e}")
        try:
            p = Polyiamond.from_cells(parse_iamond_cells(text))
        except ValueError as e:
            raise DataError(f"{args.shape}: {e}")
        if not iamond_tree(p):
            raise DataError(f"{args.shape}: the tetrahedron verdict covers"
                            " tree shapes only (this one has a dual cycle)")
        ok = folds_to_tetrahedron(p)
        print(f"{args.shape}: {'folds onto the tetrahedron' if ok else 'does not fold'}")
        return EXIT_FOLDS if ok else EXIT_UNFOLDABLE

    for n in range(1, args.max_size + 1):
        print(f"size {n}: {sum(1 for _ in enumerate_free_iamonds(n))}"
              " free shapes")
    exceptional = exceptional_tree_iamonds(args.max_size)
    print(f"tree shapes up to size {args.max_size} that do not fold:"
          f" {len(exceptional)}")
    for p in exceptional:
        print("  " + iamond_to_text(p).replace("\n", " / "))
    if args.compare:
        mismatches = 0
        for n in range(1, args.max_size + 1):
            for p in enumerate_free_iamonds(n):
                if not iamond_tree(p):
                    continue
                if folds_to_tetrahedron(p) != (brute_fold_tetra(p)
                                               is not None):
                    mismatches += 1
                    print(f"MISMATCH: {p.cells}", file=sys.stderr)
        print(f"brute-force agreement: {mismatches} mismatches")
        if mismatches:
            return EXIT_UNFOLDABLE
    return EXIT_FOLDS


# ---------------------------------------------------------------- hierarchy

def cmd_hierarchy(args) -> int:
    limits = None
    if args.nodes is not None or args.time_limit is not None:
        limits = SearchLimits(max_nodes=args.nodes,
                              max_seconds=args.time_limit)
    lines: list[str] = []

    def emit(line: str) -> None:
        lines.append(line)
        print(line)

    try:
        relations = hierarchy_suite(limits)
        for r in relations:
            word = "ok" if r.ok else "FAIL"
            extra = f" ({r.note})" if r.note else ""
            emit(f"relation {r.number:2d}: {r.fixture}:"
                 f" {r.stronger} folds, {r.weaker} does not: {word}{extra}")
        mv = mountain_valley_witness()
        emit(f"mixed fold signs required: {'ok' if mv.ok else 'FAIL'}"
             f" (one-sign search empty: {mv.single_sign is None},"
             f" two-sign witness verified: {mv.verified})")
        cov = whole_coverage_suite(limits)
        emit(f"whole-square coverage families: {'ok' if cov.ok else 'FAIL'}"
             f" (side squares {sum(cov.side_square_folds.values())}/16,"
             f" staircase {cov.staircase_folds},"
             f" pair+triple {sum(cov.pair_triple_folds.values())}/3,"
             f" nine-square sheet grid-folds {cov.sheet_grid_folds},"
             f" with diagonals {cov.sheet_diagonal_folds})")
        puzzles = puzzle_suite()
        for p in puzzles:
            emit(f"puzzle {p.name}: {p.squares} squares,"
                 f" {'folds' if p.ok else 'FAIL'}"
                 f" ({p.fold_180_count} half-turn folds)")
    except ResourceLimitExceeded as e:
        print(f"budget ran out: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except FixtureError as e:
        raise DataError(str(e))

    all_ok = (all(r.ok for r in relations) and mv.ok and cov.ok
              and all(p.ok for p in puzzles))
    emit(f"suite: {'all checks passed' if all_ok else 'FAILURES present'}")
    if args.out:
        _write_text(args.out, "\n".join(lines) + "\n")
        print(f"report written to {args.out}")
    return EXIT_FOLDS if all_ok else EXIT_UNFOLDABLE


# ---------------------------------------------------------------- dp

def cmd_dp(args) -> int:
    shape, fixture_target, name = _read_shape(args.shape)
    target = _read_target(args.target, fixture_target)
    if not is_tree_shape(frozenset(shape.cells)):
        raise DataError(f"{name}: the dynamic program needs a tree shape")
    t = DualTree.of_tree_shape(shape)
    stats = DpStats()
    try:
        ok = dp_foldable(t, target, stats=stats)
    except (FourSquaresAtEdge, TargetTooLarge) as e:
        raise DataError(f"{name}: {e}")
    print(f"{name}: {'folds' if ok else 'does not fold'} under forced"
          f" rolling ({stats.states} states, {stats.transitions}"
          " transitions)")
    return EXIT_FOLDS if ok else EXIT_UNFOLDABLE


# ---------------------------------------------------------------- wiring

def _add_shared(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--model", default="F6",
                    help="fold-operation model: a name like F2/F6/F6D or a"
                         " token list like '+90,-90,+180,-180,interior'"
                         " (default F6)")
    sp.add_argument("--jobs", type=int, default=1,
                    help="worker processes for sweeps (default 1)")
    sp.add_argument("--nodes", type=int, default=None,
                    help="search node budget; exhaustion exits 2")
    sp.add_argument("--time-limit", type=float, default=None,
                    dest="time_limit", metavar="SECONDS",
                    help="search time budget; exhaustion exits 2")
    sp.add_argument("--out", default=None,
                    help="output path ('-' for stdout where supported)")
    sp.add_argument("--config", default=None, metavar="FILE",
                    help="JSON file with defaults for model, jobs, nodes,"
                         " time_limit")


def build_parser() -> tuple[_Parser, dict]:
    parser = _Parser(
        prog="gridfold",
        description="Fold grid polyominoes onto polycubes.",
        epilog=__doc__.split("Verbs:")[1],
        formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="verb", required=True,
                                 metavar="VERB")
    table: dict[str, argparse.ArgumentParser] = {}

    sp = subs.add_parser("check", help="fold one shape onto a target")
    sp.add_argument("shape",
                    help="shape file (JSON or '#'/'.' text), 'fixture:NAME',"
                         " or with --verify-only a witness JSON file")
    sp.add_argument("--target", default=None,
                    help="'cube' (default), a JSON cube list, or the"
                         " fixture's own target")
    sp.add_argument("--cuts", action="store_true",
                    help="let non-tree seams separate instead of demanding"
                         " a legal fold angle")
    sp.add_argument("--whole-coverage", action="store_true",
                    help="only accept faces covered by whole squares")
    sp.add_argument("--verify-only", action="store_true",
                    help="re-check a stored witness instead of searching")
    sp.set_defaults(func=cmd_check)
    table["check"] = sp

    sp = subs.add_parser("table", help="verdict census as CSV plus chart")
    sp.add_argument("--max-n", type=int, default=9, dest="max_n",
                    help="largest shape size (default 9)")
    sp.add_argument("--long-run", action="store_true",
                    help="extend the census to ten squares")
    sp.add_argument("--progress", action="store_true",
                    help="log per-size progress to stderr")
    sp.set_defaults(func=cmd_table)
    table["table"] = sp

    sp = subs.add_parser("render", help="draw a witness as SVG")
    sp.add_argument("witness", help="witness JSON written by check")
    sp.set_defaults(func=cmd_render)
    table["render"] = sp

    sp = subs.add_parser("enum", help="count free shapes")
    sp.add_argument("--max-n", type=int, default=8, dest="max_n",
                    help="largest size to count (default 8)")
    sp.add_argument("--trees", action="store_true",
                    help="also count canonical dual trees per size")
    sp.set_defaults(func=cmd_enum)
    table["enum"] = sp

    sp = subs.add_parser("strips",
                         help="closed-form strip verdicts")
    sp.add_argument("--shape", default=None,
                    help="single shape file or fixture:NAME")
    sp.add_argument("--rows", type=int, default=3,
                    help="strip height for the sweep (default 3)")
    sp.add_argument("--cols", type=int, default=6,
                    help="strip width for the sweep (default 6)")
    sp.add_argument("--compare", action="store_true",
                    help="replay every verdict against the search engine")
    sp.set_defaults(func=cmd_strips)
    table["strips"] = sp

    sp = subs.add_parser("iamond",
                         help="triangle shapes against the tetrahedron")
    sp.add_argument("--shape", default=None,
                    help="text file of 'u'/'d' triangle rows")
    sp.add_argument("--max-size", type=int, default=8, dest="max_size",
                    help="census cutoff (default 8)")
    sp.add_argument("--compare", action="store_true",
                    help="replay every verdict against the brute folder")
    sp.set_defaults(func=cmd_iamond)
    table["iamond"] = sp

    sp = subs.add_parser("hierarchy",
                         help="fixture suite separating the models")
    sp.set_defaults(func=cmd_hierarchy)
    table["hierarchy"] = sp

    sp = subs.add_parser("dp", help="forced-rolling dynamic program")
    sp.add_argument("shape", help="tree shape file or fixture:NAME")
    sp.add_argument("--target", default=None,
                    help="'cube' (default), a JSON cube list, or the"
                         " fixture's own target")
    sp.set_defaults(func=cmd_dp)
    table["dp"] = sp

    for sp in table.values():
        _add_shared(sp)
    return parser, table


def _config_defaults(argv: list[str]) -> dict:
    pre = _Parser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _rest = pre.parse_known_args(argv)
    if not known.config:
        return {}
    obj = _load_json_file(known.config)
    if not isinstance(obj, dict):
        raise DataError(f"{known.config}: expected a JSON object")
    out = {}
    for key, value in obj.items():
        dest = key.replace("-", "_")
        if dest not in _CONFIG_KEYS:
            raise DataError(f"{known.config}: unknown key '{key}'"
                            f" (allowed: {', '.join(_CONFIG_KEYS)})")
        out[dest] = value
    return out


def main(argv: Optional[list[str]] = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    try:
        defaults = _config_defaults(argv)
        parser, table = build_parser()
        for sp in table.values():
            sp.set_defaults(**defaults)
        args = parser.parse_args(argv)
        return args.func(args)
    except DataError as e:
        print(f"gridfold: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
