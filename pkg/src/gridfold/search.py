"""Exhaustive fold search: per-tree decision, minimizers, shape-level search.

One engine drives both entry points. It grows the set of placed squares
one frontier edge at a time; a frontier edge is either included (the child
square is placed at each model-legal angle, optionally split along a
diagonal) or excluded from the tree. Including and excluding partition the
remaining solution space, so every (tree, angle assignment) pair is tried
exactly once. For a fixed dual tree the edge universe is the tree itself
and exclusion is never possible, leaving pure angle backtracking in BFS
edge order.

Pruning is a coverage deficit bound in half-square units: a face needs 2
halves when untouched, 1 when only triangle halves overlap it, 0 when
covered. Unplaced squares supply 2 halves each. The bound is admissible,
and when |cells| equals |surface| it forces exactly-once coverage, which
is what makes the 46-square fixtures tractable.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .foldcore import (
    DIAGONALS,
    FoldModel,
    Folding,
    NE_SW,
    NW_SE,
    UnsupportedModel,
    _DIAG_DIR,
    _HALF_BISECTOR,
    _HALVES,
    _canon_dir,
    _material_to_world,
    _split_out_frame,
    seam_angle,
)
from .lattice import Cell, DualTree, Edge, Polyomino, adjacency_edges, sorted_edge
from .polycube import (
    FaceKey,
    Polycube,
    Pose,
    UNIT_CUBE,
    interior_keys,
    outward_normal,
    propagate,
    root_pose_orbits,
    surface_keys,
    vadd,
    vneg,
)


class ResourceLimitExceeded(Exception):
    def __init__(self, nodes: int, seconds: float):
        self.nodes = nodes
        self.seconds = seconds
        super().__init__(
            f"search budget exhausted after {nodes} nodes, {seconds:.1f}s")


@dataclass
class SearchLimits:
    max_nodes: Optional[int] = None
    max_seconds: Optional[float] = None
    # Count a face as covered only by whole squares. Off by default: the
    # origami model accepts two complementary triangle halves.
    require_whole_coverage: bool = False


@dataclass
class SearchStats:
    nodes: int = 0
    solutions: int = 0


_SPLIT_OPTIONS = (None, (NE_SW, 180), (NW_SE, 180))


class _Engine:
    """Shared state for one search run over a fixed shape and target."""

    def __init__(self, cells: frozenset[Cell], universe: list[Edge],
                 q: Polycube, m: FoldModel, limits: SearchLimits,
                 max_180: Optional[int] = None,
                 max_diagonal: Optional[int] = None,
                 seam_adj: Optional[dict[Cell, list[Cell]]] = None):
        self.cells = cells
        self.universe = universe
        self.q = q
        self.m = m
        self.limits = limits
        self.max_180 = max_180
        self.max_diagonal = max_diagonal
        self.seam_adj = seam_adj or {}

        self.surf = surface_keys(q)
        self.inter = interior_keys(q) if m.allow_interior else frozenset()
        self.angles = m.angles()
        self.allowed_angles = frozenset(self.angles)
        self.splittable = m.allow_diagonal
        self.stats = SearchStats()
        self._t0 = time.monotonic()

        # cell -> (incoming pose, second-triangle pose, split option, sides
        # of the square owned by the first triangle). An edge leaves from
        # whichever triangle of a split square owns that side; unsplit
        # squares have both poses equal.
        self.placed: dict[
            Cell, tuple[Pose, Pose, Optional[tuple[str, int]], frozenset]] = {}
        self.parent_edges: list[tuple[Edge, Cell, int]] = []  # (edge, child, angle)
        self.excluded: set[Edge] = set()
        self.used_180 = 0
        self.used_diag = 0

        # Deficit bookkeeping, in half-square units.
        self.whole: dict[FaceKey, int] = {}
        self.tri: dict[tuple[FaceKey, tuple, tuple], int] = {}
        self.need: dict[FaceKey, int] = {k: 2 for k in self.surf}
        self.need_total = 2 * len(self.surf)
        self.remaining_halves = 2 * len(cells)

        self.adjacency: dict[Cell, list[Edge]] = {c: [] for c in cells}
        for e in universe:
            self.adjacency[e[0]].append(e)
            self.adjacency[e[1]].append(e)

    # -- budget ------------------------------------------------------------

    def tick(self) -> None:
        self.stats.nodes += 1
        lim = self.limits
        if lim.max_nodes is not None and self.stats.nodes > lim.max_nodes:
            raise ResourceLimitExceeded(
                self.stats.nodes, time.monotonic() - self._t0)
        if lim.max_seconds is not None and (self.stats.nodes & 0x3FF) == 0:
            el = time.monotonic() - self._t0
            if el > lim.max_seconds:
                raise ResourceLimitExceeded(self.stats.nodes, el)

    # -- coverage ----------------------------------------------------------

    def _face_need(self, key: FaceKey) -> int:
        if self.whole.get(key, 0) >= 1:
            return 0
        if self.limits.require_whole_coverage:
            return 2
        best = 2
        for (k, w, b), cnt in self.tri.items():
            if k == key and cnt >= 1:
                if self.tri.get((k, w, vneg(b)), 0) >= 1:
                    return 0
                best = 1
        return best

    def _bump_need(self, key: FaceKey) -> int:
        old = self.need[key]
        new = self._face_need(key)
        if new != old:
            self.need[key] = new
            self.need_total += new - old
        return old

    # -- placement ---------------------------------------------------------

    def try_place(self, cell: Cell, pose: Pose,
                  entry_side: Optional[tuple[int, int]],
                  split: Optional[tuple[str, int]]):
        """Place a square; returns an undo record or None when illegal."""
        self.tick()
        key = pose.center
        on_boundary = key in self.surf
        if not on_boundary and key not in self.inter:
            return None
        if split is not None and not on_boundary:
            # A split square on an interior face covers nothing; the plain
            # interior placement already represents that branch.
            return None

        undo_cov = None
        first_sides: frozenset = frozenset()
        if split is not None:
            diag, _ang = split
            side = entry_side if entry_side is not None else (0, -1)
            half_idx = 0 if side in _HALVES[diag][0] else 1
            first_sides = _HALVES[diag][half_idx]
        if on_boundary:
            if split is None:
                self.whole[key] = self.whole.get(key, 0) + 1
                undo_cov = ("whole", key, self._bump_need(key))
            else:
                w = _canon_dir(_material_to_world(pose, _DIAG_DIR[diag]))
                b = _material_to_world(pose, _HALF_BISECTOR[(diag, half_idx)])
                tk = (key, w, b)
                self.tri[tk] = self.tri.get(tk, 0) + 2
                undo_cov = ("tri", tk, self._bump_need(key))
        self.remaining_halves -= 2
        if self.remaining_halves < self.need_total:
            self._undo_cov(undo_cov)
            self.remaining_halves += 2
            return None
        out = pose if split is None else _split_out_frame(pose, split[0])
        self.placed[cell] = (pose, out, split, first_sides)
        if split is not None:
            self.used_diag += 1
        return (cell, undo_cov)

    def _undo_cov(self, undo_cov) -> None:
        if undo_cov is None:
            return
        kind, k, old_need = undo_cov
        if kind == "whole":
            self.whole[k] -= 1
            fk = k
        else:
            self.tri[k] -= 2
            fk = k[0]
        new = self.need[fk]
        if new != old_need:
            self.need_total += old_need - new
            self.need[fk] = old_need

    def unplace(self, record) -> None:
        cell, undo_cov = record
        _pose, _out, split, _sides = self.placed.pop(cell)
        if split is not None:
            self.used_diag -= 1
        self.remaining_halves += 2
        self._undo_cov(undo_cov)

    # -- branch generation ---------------------------------------------------

    def child_options(self) -> Iterator[tuple[int, Optional[tuple[str, int]]]]:
        for a in self.angles:
            yield a, None
        if self.splittable:
            for a in self.angles:
                for diag in DIAGONALS:
                    yield a, (diag, 180)

    def angle_ok(self, angle: int, split) -> bool:
        if angle in (180, -180) and self.max_180 is not None:
            if self.used_180 + 1 > self.max_180:
                return False
        if split is not None and self.max_diagonal is not None:
            if self.used_diag + 1 > self.max_diagonal:
                return False
        return True

    # -- seams (uncut-sheet consistency) -------------------------------------

    def seam_ok(self, u: Cell, v: Cell) -> bool:
        """The implied angle across the u-v seam exists and is legal."""
        delta = (v[0] - u[0], v[1] - u[1])
        first_u, second_u, _sp_u, sides_u = self.placed[u]
        src = first_u if delta in sides_u else second_u
        first_v, second_v, _sp_v, sides_v = self.placed[v]
        back = (-delta[0], -delta[1])
        dst = first_v if back in sides_v else second_v
        ang = seam_angle(src, delta, dst)
        return ang is not None and ang in self.allowed_angles

    # -- connectivity (for exclusion soundness) ------------------------------

    def still_spannable(self) -> bool:
        start = next(iter(self.placed))
        seen = {start}
        stack = [start]
        while stack:
            c = stack.pop()
            for e in self.adjacency[c]:
                if e in self.excluded:
                    continue
                nb = e[1] if e[0] == c else e[0]
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        return len(seen) == len(self.cells)


def _grow(eng: _Engine, on_solution) -> bool:
    """Include/exclude recursion; returns True when the search should stop."""
    if len(eng.placed) == len(eng.cells):
        if eng.need_total == 0:
            eng.stats.solutions += 1
            return on_solution(eng)
        return False
    frontier = None
    for e in eng.universe:
        if e in eng.excluded:
            continue
        a_in = e[0] in eng.placed
        b_in = e[1] in eng.placed
        if a_in != b_in:
            frontier = e
            break
    if frontier is None:
        return False
    e = frontier
    parent, child = (e[0], e[1]) if e[0] in eng.placed else (e[1], e[0])
    delta = (child[0] - parent[0], child[1] - parent[1])
    pose_in, pose_second, _sp, first_sides = eng.placed[parent]
    src_out = pose_in if delta in first_sides else pose_second
    world_dir = _material_to_world(src_out, delta)

    for angle, split in eng.child_options():
        if not eng.angle_ok(angle, split):
            continue
        pose = propagate(src_out, world_dir, angle)
        rec = eng.try_place(child, pose, (-delta[0], -delta[1]), split)
        if rec is None:
            continue
        if eng.seam_adj:
            torn = False
            for w in eng.seam_adj.get(child, ()):
                if w in eng.placed and not eng.seam_ok(child, w):
                    torn = True
                    break
            if torn:
                eng.unplace(rec)
                continue
        if angle in (180, -180):
            eng.used_180 += 1
        eng.parent_edges.append((e, child, angle))
        stop = _grow(eng, on_solution)
        eng.parent_edges.pop()
        if angle in (180, -180):
            eng.used_180 -= 1
        eng.unplace(rec)
        if stop:
            return True

    # Exclude the edge, unless that strands a cell. A spanning-tree
    # universe has no slack: excluding any edge strands one.
    if len(eng.universe) <= len(eng.cells) - 1:
        return False
    eng.tick()
    eng.excluded.add(e)
    if eng.still_spannable():
        if _grow(eng, on_solution):
            eng.excluded.remove(e)
            return True
    eng.excluded.remove(e)
    return False


def _root_candidates(q: Polycube, m: FoldModel) -> list[Pose]:
    return root_pose_orbits(q, outward_only=m.sign_symmetric())


def _check_model(q: Polycube, m: FoldModel) -> None:
    if not m.executable():
        raise UnsupportedModel(
            f"model {m.describe()} cannot be searched exhaustively: "
            "its folds leave the grid planes")
    if m.allow_diagonal and q.cubes != UNIT_CUBE.cubes:
        raise UnsupportedModel(
            "diagonal folds are supported only for the unit-cube target")


def _build_folding(eng: _Engine, tree_edges: tuple[Edge, ...],
                   shape: Polyomino, q: Polycube,
                   root_cell: Cell, root_pose: Pose) -> Folding:
    angles = {e: a for e, _c, a in eng.parent_edges}
    for e in tree_edges:
        angles.setdefault(e, 0)
    splits = {}
    for cell, (_p, _o, sp, _sides) in eng.placed.items():
        if sp is not None:
            splits[cell] = sp
    tree = DualTree(shape, tuple(sorted(tree_edges)))
    return Folding(tree=tree, target=q, root_cell=root_cell,
                   root_pose=root_pose, edge_angles=angles, splits=splits)


def _surface_pair_classes(q: Polycube) -> list[tuple[FaceKey, FaceKey, int]]:
    """Edges of the face-key graph, tagged with the fold angle the step
    between the two faces forces on a sheet lying outward-side up:
    coplanar pairs 0, convex pairs 90, reflex pairs -90."""
    surf = surface_keys(q)
    out = []
    for u in sorted(surf):
        n = outward_normal(q, u)
        axes = [a for a in ((1, 0, 0), (0, 1, 0), (0, 0, 1))
                if a != n and vneg(a) != n]
        for base in axes:
            for t in (base, vneg(base)):
                for v, cls in ((vadd(u, vadd(t, t)), 0),
                               (vadd(u, vadd(t, vneg(n))), 90),
                               (vadd(u, vadd(t, n)), -90)):
                    if v in surf and u < v:
                        out.append((u, v, cls))
    return out


def _component_feasible(n_cells: int, q: Polycube, m: FoldModel) -> bool:
    """Quick refutation: a folding is one connected sheet, and every step
    crosses a face pair whose geometry forces the angle class.  While the
    sheet keeps one side toward the surface, classes the model lacks cut
    the face-key graph, so full coverage needs all surface keys in one
    component.  Flips of the lying side (180 folds, diagonal splits) and
    interior routing void the cut, except when cell count equals face
    count: there any stacked or interior square already overruns the
    coverage budget.
    """
    has_p, has_m = m.allow_plus90, m.allow_minus90
    if has_p and has_m:
        return True
    surf = surface_keys(q)
    if n_cells != len(surf):
        if (m.allow_plus180 or m.allow_minus180 or m.allow_interior
                or m.allow_diagonal):
            return True
    pairs = _surface_pair_classes(q)
    for use_p, use_m in ((has_p, has_m), (has_m, has_p)):
        parent: dict[FaceKey, FaceKey] = {k: k for k in surf}

        def find(x: FaceKey) -> FaceKey:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v, cls in pairs:
            if cls == 90 and not use_p:
                continue
            if cls == -90 and not use_m:
                continue
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
        roots = {find(k) for k in surf}
        if len(roots) <= 1:
            return True
    return False


def _run(shape: Polyomino, universe: list[Edge], q: Polycube, m: FoldModel,
         limits: SearchLimits, root_cell: Cell,
         max_180: Optional[int] = None, max_diagonal: Optional[int] = None,
         stats_out: Optional[SearchStats] = None,
         seam_adj: Optional[dict[Cell, list[Cell]]] = None) -> Optional[Folding]:
    """Run the engine over every root pose; first solution wins."""
    cells = frozenset(shape.cells)
    if not _component_feasible(len(cells), q, m):
        if stats_out is not None:
            stats_out.nodes = 0
        return None
    result: list[Folding] = []

    root_splits: tuple = (None,)
    if m.allow_diagonal:
        root_splits = _SPLIT_OPTIONS

    total_nodes = 0
    for root_pose in _root_candidates(q, m):
        for root_split in root_splits:
            if root_split is not None and max_diagonal == 0:
                continue
            eng = _Engine(cells, universe, q, m, limits,
                          max_180=max_180, max_diagonal=max_diagonal,
                          seam_adj=seam_adj)
            eng.stats.nodes = total_nodes  # budget spans all roots
            rec = eng.try_place(root_cell, root_pose, None, root_split)
            if rec is None:
                total_nodes = eng.stats.nodes
                continue

            def capture(e: _Engine) -> bool:
                chosen = tuple(edge for edge, _c, _a in e.parent_edges)
                result.append(_build_folding(
                    e, chosen, shape, q, root_cell, root_pose))
                return True

            if _grow(eng, capture):
                if stats_out is not None:
                    stats_out.nodes = eng.stats.nodes
                    stats_out.solutions += 1
                return result[0]
            total_nodes = eng.stats.nodes
    if stats_out is not None:
        stats_out.nodes = total_nodes
    return None


def solve(t: DualTree, q: Polycube, m: FoldModel,
          limits: Optional[SearchLimits] = None,
          max_180: Optional[int] = None,
          max_diagonal: Optional[int] = None,
          stats_out: Optional[SearchStats] = None) -> Optional[Folding]:
    """Find a folding of this dual tree onto q, or prove there is none.

    Deterministic: root placements are orbit representatives under the
    rotation group of q, edges are processed in a fixed order, and angles
    are tried as 0, +90, -90, +180, -180, then diagonal splits.
    """
    _check_model(q, m)
    limits = limits or SearchLimits()
    root_cell = t.shape.cells[0]
    ordered = _bfs_edge_order(t, root_cell)
    return _run(t.shape, ordered, q, m, limits, root_cell,
                max_180=max_180, max_diagonal=max_diagonal,
                stats_out=stats_out)


def _bfs_edge_order(t: DualTree, root: Cell) -> list[Edge]:
    adj: dict[Cell, list[tuple[Cell, Edge]]] = {}
    for e in t.edges:
        adj.setdefault(e[0], []).append((e[1], e))
        adj.setdefault(e[1], []).append((e[0], e))
    for lst in adj.values():
        lst.sort()
    order = []
    seen = {root}
    queue = [root]
    while queue:
        u = queue.pop(0)
        for v, e in adj.get(u, ()):
            if v not in seen:
                seen.add(v)
                order.append(e)
                queue.append(v)
    return order


def _spanning_seams(cells: frozenset[Cell], edges: list[Edge],
                    root: Cell) -> tuple[list[Edge], dict[Cell, list[Cell]]]:
    """Split the adjacency edges into a BFS spanning tree and the seams.

    The tree carries the searched angles; every remaining edge is a seam
    whose angle is implied by the poses and must stay legal.
    """
    adj: dict[Cell, list[Cell]] = {c: [] for c in cells}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    for lst in adj.values():
        lst.sort()
    tree: list[Edge] = []
    seen = {root}
    queue = [root]
    while queue:
        u = queue.pop(0)
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                tree.append(sorted_edge(u, v))
                queue.append(v)
    tree_set = set(tree)
    seam_adj: dict[Cell, list[Cell]] = {}
    for a, b in edges:
        if sorted_edge(a, b) not in tree_set:
            seam_adj.setdefault(a, []).append(b)
            seam_adj.setdefault(b, []).append(a)
    return tree, seam_adj


def solve_polyomino(p: Polyomino, q: Polycube, m: FoldModel,
                    limits: Optional[SearchLimits] = None,
                    stats_out: Optional[SearchStats] = None,
                    allow_cuts: bool = False) -> Optional[Folding]:
    """Fold the whole sheet onto q; the placement tree is part of the answer.

    By default the sheet stays intact: squares adjacent in p must meet at
    a legal fold angle even when the placement tree does not join them.
    With allow_cuts=True the search ranges over all dual trees instead,
    letting non-tree joints separate freely.
    """
    _check_model(q, m)
    limits = limits or SearchLimits()
    cells = p.cell_set()
    universe = adjacency_edges(cells)
    root_cell = p.cells[0]
    if allow_cuts:
        return _run(p, universe, q, m, limits, root_cell, stats_out=stats_out)
    tree, seams = _spanning_seams(cells, universe, root_cell)
    return _run(p, tree, q, m, limits, root_cell, stats_out=stats_out,
                seam_adj=seams)


def foldable_polyomino(p: Polyomino, q: Polycube, m: FoldModel,
                       limits: Optional[SearchLimits] = None,
                       allow_cuts: bool = False) -> bool:
    """True when p folds onto q under m (see solve_polyomino for cut rules)."""
    return solve_polyomino(p, q, m, limits, allow_cuts=allow_cuts) is not None


def min_fold_count(t: DualTree, q: Polycube, m: FoldModel, kind: str,
                   limits: Optional[SearchLimits] = None) -> Optional[int]:
    """Least number of 180 folds or of diagonal splits over all foldings.

    Iterative deepening on the counted kind; None when t does not fold at
    all under m.
    """
    if kind not in ("180", "diagonal"):
        raise ValueError(f"kind must be '180' or 'diagonal', got {kind!r}")
    base = solve(t, q, m, limits)
    if base is None:
        return None
    ub = base.count_180() if kind == "180" else base.count_diagonal()
    for budget in range(ub):
        kw = {"max_180": budget} if kind == "180" else {"max_diagonal": budget}
        if solve(t, q, m, limits, **kw) is not None:
            return budget
    return ub
