"""Fold flat grid shapes onto the surfaces of small cube stacks.

The library models a polyomino as a sheet creased along grid lines (and
optionally square diagonals), folded so that every square lands on the
surface of a target polycube and every boundary face is covered. The
solver certifies both directions: it emits a checkable witness when a
folding exists and has exhausted a finite, complete branch space when it
reports none.

Entry points:

- `solve` / `solve_polyomino` fold one shape, as a chosen dual tree or as
  one uncut sheet;
- `verify` re-executes a witness independently of the search;
- `classify_cube` builds the by-size classification table;
- `strip2_foldable` / `strip3_foldable` decide narrow shapes in closed form;
- `hierarchy_suite`, `mountain_valley_witness`, `whole_coverage_suite`,
  and `puzzle_suite` run the curated fixture suites;
- `dp_foldable` is the linear-time tree dynamic program for rigid models;
- `Polyiamond` and friends cover the triangle-lattice analog;
- `render_svg` draws a crease pattern for any verified solution.
"""

from .foldcore import (
    F1, F2, F3, F4, F5, F6, F7, F8, F9,
    NAMED_MODELS,
    AngleNotInModel,
    DiagonalNotAllowed,
    FoldError,
    FoldModel,
    Folding,
    InteriorNotAllowed,
    PlacementOffSurface,
    UnsupportedModel,
    execute,
    folding_from_json,
    folding_to_json,
    parse_model,
    seam_angle,
    verify,
)
from .lattice import (
    DualTree,
    Polyomino,
    adjacency_edges,
    canonical_cells,
    canonical_dual_trees,
    canonical_form,
    is_tree_shape,
    load_shape_file,
    parse_polyomino,
    shape_code,
    spanning_trees,
    tree_code,
)
from .polycube import (
    UNIT_CUBE,
    Polycube,
    Pose,
    all_poses,
    has_four_square_edge,
    interior_keys,
    propagate,
    rotation_group,
    surface,
    surface_keys,
)
from .search import (
    ResourceLimitExceeded,
    SearchLimits,
    SearchStats,
    foldable_polyomino,
    min_fold_count,
    solve,
    solve_polyomino,
)
from .treedp import (
    DpStats,
    FourSquaresAtEdge,
    TargetTooLarge,
    dp_foldable,
    dp_folding,
)
from .enumeration import (
    TableRow,
    classify_cube,
    classify_tree,
    enumerate_free,
    free_count,
    nonfoldable_report,
    rows_to_csv,
)
from .characterize import (
    CoverageReport,
    Fixture,
    FixtureError,
    NotATree,
    NotWithinStrip,
    PuzzleResult,
    RelationResult,
    SignMixReport,
    blocked_three_row_instances,
    blocked_two_row_instances,
    fixtures_dir,
    hierarchy_suite,
    list_fixtures,
    load_fixture,
    mountain_valley_witness,
    puzzle_suite,
    strip2_foldable,
    strip3_foldable,
    tree_shapes_in_box,
    whole_coverage_suite,
)
from .iamond import (
    Polyiamond,
    brute_fold_tetra,
    enumerate_free_iamonds,
    exceptional_tree_iamonds,
    folds_to_tetrahedron,
    iamond_tree,
)
from .render import RenderError, render_svg

__version__ = "0.1.0"
