"""Fold models, fold execution, coverage accounting, and verification.

A Folding fixes a dual tree, a target polycube, the root square's pose,
one signed angle per tree edge, and an optional diagonal split per cell.
execute() walks the tree and places every square; covered() then decides
whether the whole boundary is overlapped, counting a face as covered by
two complementary triangle halves of one diagonal as well as by a whole
square.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .lattice import Cell, DualTree, Edge, Polyomino, sorted_edge
from .polycube import (
    FaceKey,
    GridFace,
    Polycube,
    Pose,
    UNIT_CUBE,
    interior_keys,
    key_axis,
    propagate,
    surface_keys,
    vadd,
    vneg,
    vsub,
)


class FoldError(Exception):
    pass


class PlacementOffSurface(FoldError):
    def __init__(self, cell: Cell, key: FaceKey):
        self.cell = cell
        super().__init__(f"cell {cell} lands off the target surface at {key}")


class AngleNotInModel(FoldError):
    pass


class DiagonalNotAllowed(FoldError):
    pass


class InteriorNotAllowed(FoldError):
    def __init__(self, cell: Cell):
        self.cell = cell
        super().__init__(f"cell {cell} placed on an interior face, model forbids it")


class UnsupportedModel(FoldError):
    pass


GRID_ANGLES = (0, 90, -90, 180, -180)

NE_SW = "NE-SW"
NW_SE = "NW-SE"
DIAGONALS = (NE_SW, NW_SE)


@dataclass(frozen=True)
class FoldModel:
    allow_plus90: bool = False
    allow_minus90: bool = False
    allow_plus180: bool = False
    allow_minus180: bool = False
    allow_interior: bool = False
    allow_diagonal: bool = False
    # Documentation-only features; executors reject models that set them.
    any_angle: bool = False
    half_grid: bool = False

    def executable(self) -> bool:
        return not self.any_angle and not self.half_grid

    def angles(self) -> tuple[int, ...]:
        """Permitted edge angles in canonical order. 0 is always permitted."""
        out = [0]
        if self.allow_plus90 or self.any_angle:
            out.append(90)
        if self.allow_minus90 or self.any_angle:
            out.append(-90)
        if self.allow_plus180 or self.any_angle:
            out.append(180)
        if self.allow_minus180 or self.any_angle:
            out.append(-180)
        return tuple(out)

    def allows_angle(self, angle: int) -> bool:
        return angle in self.angles()

    def sign_symmetric(self) -> bool:
        return (self.allow_plus90 == self.allow_minus90
                and self.allow_plus180 == self.allow_minus180)

    def with_diagonal(self) -> "FoldModel":
        return FoldModel(self.allow_plus90, self.allow_minus90,
                         self.allow_plus180, self.allow_minus180,
                         self.allow_interior, True,
                         self.any_angle, self.half_grid)

    def describe(self) -> str:
        parts = []
        if self.any_angle:
            parts.append("any")
        else:
            for flag, name in ((self.allow_plus90, "+90"),
                               (self.allow_minus90, "-90"),
                               (self.allow_plus180, "+180"),
                               (self.allow_minus180, "-180")):
                if flag:
                    parts.append(name)
        if self.allow_interior:
            parts.append("interior")
        if self.allow_diagonal:
            parts.append("diagonal")
        if self.half_grid:
            parts.append("half-grid")
        return ",".join(parts) if parts else "none"


# The hierarchy's named models. 180 without a sign means both signs.
F1 = FoldModel(allow_plus90=True)
F2 = FoldModel(allow_plus90=True, allow_minus90=True)
F3 = FoldModel(allow_plus90=True, allow_interior=True)
F4 = FoldModel(allow_plus90=True, allow_plus180=True, allow_minus180=True)
F5 = FoldModel(allow_plus90=True, allow_minus90=True, allow_interior=True)
F6 = FoldModel(allow_plus90=True, allow_minus90=True,
               allow_plus180=True, allow_minus180=True)
F7 = FoldModel(allow_plus90=True, allow_plus180=True, allow_minus180=True,
               allow_interior=True)
F8 = FoldModel(allow_plus90=True, allow_minus90=True,
               allow_plus180=True, allow_minus180=True, allow_interior=True)
F9 = FoldModel(any_angle=True, allow_interior=True)

NAMED_MODELS = {
    "F1": F1, "F2": F2, "F3": F3, "F4": F4, "F5": F5,
    "F6": F6, "F7": F7, "F8": F8, "F9": F9,
}

_TOKEN_FIELDS = {
    "+90": "allow_plus90",
    "-90": "allow_minus90",
    "+180": "allow_plus180",
    "-180": "allow_minus180",
    "90": None,   # expanded below
    "180": None,
    "interior": "allow_interior",
    "diagonal": "allow_diagonal",
    "any": "any_angle",
    "half-grid": "half_grid",
}


def parse_model(spec: str) -> FoldModel:
    """Model from a name like F6 or a token list like +90,-90,+180,-180."""
    name = spec.strip().upper()
    if name in NAMED_MODELS:
        return NAMED_MODELS[name]
    if name.endswith("D") and name[:-1] in NAMED_MODELS:
        return NAMED_MODELS[name[:-1]].with_diagonal()
    kwargs = dict.fromkeys(
        ("allow_plus90", "allow_minus90", "allow_plus180", "allow_minus180",
         "allow_interior", "allow_diagonal", "any_angle", "half_grid"),
        False,
    )
    for raw in spec.split(","):
        tok = raw.strip().lower()
        if not tok:
            continue
        if tok == "90":
            kwargs["allow_plus90"] = kwargs["allow_minus90"] = True
        elif tok == "180":
            kwargs["allow_plus180"] = kwargs["allow_minus180"] = True
        elif tok in _TOKEN_FIELDS and _TOKEN_FIELDS[tok]:
            kwargs[_TOKEN_FIELDS[tok]] = True
        else:
            raise ValueError(f"unknown fold-model token {raw!r}")
    return FoldModel(**kwargs)


# --- material-square geometry for diagonal splits --------------------------

# Edge sides of the material square, as unit steps to the neighbor cell.
_HALVES = {
    # diagonal: (half containing W and N edges is listed first)
    NE_SW: (frozenset({(-1, 0), (0, 1)}), frozenset({(1, 0), (0, -1)})),
    NW_SE: (frozenset({(1, 0), (0, 1)}), frozenset({(-1, 0), (0, -1)})),
}

# Material direction of each diagonal, and the outward bisector of each half.
_DIAG_DIR = {NE_SW: (1, 1), NW_SE: (1, -1)}
_HALF_BISECTOR = {
    (NE_SW, 0): (-1, 1),
    (NE_SW, 1): (1, -1),
    (NW_SE, 0): (1, 1),
    (NW_SE, 1): (-1, -1),
}

# Frame of the second triangle after the 180 rotation about the diagonal.
def _split_out_frame(pose: Pose, diagonal: str) -> Pose:
    if diagonal == NE_SW:
        return Pose(pose.center, pose.ey, pose.ex)
    return Pose(pose.center, vneg(pose.ey), vneg(pose.ex))


def _material_to_world(pose: Pose, v: tuple[int, int]):
    return vadd(
        (v[0] * pose.ex[0], v[0] * pose.ex[1], v[0] * pose.ex[2]),
        (v[1] * pose.ey[0], v[1] * pose.ey[1], v[1] * pose.ey[2]),
    )


def _canon_dir(v):
    for comp in v:
        if comp > 0:
            return v
        if comp < 0:
            return vneg(v)
    raise ValueError("zero direction")


def seam_angle(src: Pose, delta: tuple[int, int], dst: Pose) -> Optional[int]:
    """Grid angle that carries src across the shared side onto dst, if any.

    delta is the material-frame step from the src square to the dst square.
    Returns None when no grid fold relates the two frames: the sheet would
    have to tear along that seam.
    """
    world_dir = _material_to_world(src, delta)
    for angle in GRID_ANGLES:
        if propagate(src, world_dir, angle) == dst:
            return angle
    return None


@dataclass
class CoverageMap:
    """Layer counts per boundary face, whole squares and triangle halves.

    tri_layers is keyed by (face, world diagonal direction, half bisector);
    the diagonal direction is sign-canonicalized, the bisector is not, so
    the two halves of one diagonal get opposite bisector keys.
    """

    whole_layers: dict[GridFace, int] = field(default_factory=dict)
    tri_layers: dict[tuple[GridFace, tuple, tuple], int] = field(default_factory=dict)

    def add_whole(self, face: GridFace) -> None:
        self.whole_layers[face] = self.whole_layers.get(face, 0) + 1

    def add_half(self, face: GridFace, diag_dir, bisector, layers: int = 1) -> None:
        k = (face, diag_dir, bisector)
        self.tri_layers[k] = self.tri_layers.get(k, 0) + layers

    def face_covered(self, face: GridFace) -> bool:
        if self.whole_layers.get(face, 0) >= 1:
            return True
        for (f, d, b), cnt in self.tri_layers.items():
            if f == face and cnt >= 1:
                if self.tri_layers.get((f, d, vneg(b)), 0) >= 1:
                    return True
        return False


def covered(c: CoverageMap, q: Polycube) -> bool:
    """Every boundary face overlapped: a whole layer, or both halves of
    one diagonal."""
    from .polycube import surface
    return all(c.face_covered(f) for f in surface(q))


@dataclass
class Folding:
    tree: DualTree
    target: Polycube
    root_cell: Cell
    root_pose: Pose
    edge_angles: dict[Edge, int]
    splits: dict[Cell, tuple[str, int]] = field(default_factory=dict)

    def count_180(self) -> int:
        return sum(1 for a in self.edge_angles.values() if a in (180, -180))

    def count_diagonal(self) -> int:
        return len(self.splits)


def _check_model_conformance(f: Folding, m: FoldModel) -> None:
    if not m.executable():
        raise UnsupportedModel(
            f"model {m.describe()} includes folds this executor cannot place "
            "on grid planes"
        )
    allowed = set(m.angles())
    for e, a in f.edge_angles.items():
        if a not in GRID_ANGLES:
            raise AngleNotInModel(f"edge {e} has non-grid angle {a}")
        if a not in allowed:
            raise AngleNotInModel(f"edge {e} angle {a} not in model {m.describe()}")
    if f.splits:
        if not m.allow_diagonal:
            raise DiagonalNotAllowed(
                f"model {m.describe()} has no diagonal folds")
        if f.target.cubes != UNIT_CUBE.cubes:
            raise DiagonalNotAllowed(
                "diagonal folds are executed only for the unit-cube target")
        for cell, (diag, ang) in f.splits.items():
            if diag not in DIAGONALS:
                raise DiagonalNotAllowed(f"cell {cell}: unknown diagonal {diag!r}")
            if ang not in (180, -180):
                raise DiagonalNotAllowed(
                    f"cell {cell}: split angle {ang} is not a 180 fold")


def execute(f: Folding, m: FoldModel, *,
            sealed: bool = False) -> tuple[dict[Cell, Pose], CoverageMap]:
    """Place every square by walking the tree from the root.

    Returns the per-cell poses (for a split cell, the first triangle's
    pose) and the boundary coverage tally. Raises a FoldError when an
    angle, split, or placement violates the model or leaves the surface.

    With sealed=True the shape is treated as one uncut sheet: every pair
    of adjacent squares must meet at a legal fold angle of the model,
    including pairs the tree does not join. Without it, non-tree joints
    may separate (each tree is folded on its own).
    """
    _check_model_conformance(f, m)

    q = f.target
    skeys = surface_keys(q)
    ikeys = interior_keys(q)
    face_of: dict[FaceKey, GridFace] = {}
    from .polycube import key_to_face
    for k in skeys:
        face_of[k] = key_to_face(k, "boundary")

    adj: dict[Cell, list[Cell]] = {}
    for a, b in f.tree.edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    for lst in adj.values():
        lst.sort()

    cells = set(f.tree.shape.cells)
    if f.root_cell not in cells:
        raise FoldError(f"root cell {f.root_cell} not in the shape")

    poses: dict[Cell, Pose] = {}
    # For a split square the two triangles sit in different frames; an edge
    # leaves from whichever triangle owns that side of the square.
    out_pose: dict[Cell, tuple[Pose, Pose, frozenset]] = {}
    coverage = CoverageMap()

    def place(cell: Cell, pose: Pose, entry_side: Optional[tuple[int, int]]) -> None:
        key = pose.center
        on_boundary = key in skeys
        if not on_boundary:
            if key in ikeys:
                if not m.allow_interior:
                    raise InteriorNotAllowed(cell)
            else:
                raise PlacementOffSurface(cell, key)
        poses[cell] = pose
        split = f.splits.get(cell)
        if split is None:
            if on_boundary:
                coverage.add_whole(face_of[key])
            out_pose[cell] = (pose, pose, frozenset())
            return
        diag, _ang = split
        side = entry_side if entry_side is not None else (0, -1)
        half_idx = 0 if side in _HALVES[diag][0] else 1
        if on_boundary:
            w = _canon_dir(_material_to_world(pose, _DIAG_DIR[diag]))
            b = _material_to_world(pose, _HALF_BISECTOR[(diag, half_idx)])
            # First triangle plus the second one folded back onto it.
            coverage.add_half(face_of[key], w, b, layers=2)
        out_pose[cell] = (pose, _split_out_frame(pose, diag), _HALVES[diag][half_idx])

    place(f.root_cell, f.root_pose, None)
    queue = [f.root_cell]
    visited = {f.root_cell}
    while queue:
        u = queue.pop(0)
        for v in adj.get(u, ()):
            if v in visited:
                continue
            visited.add(v)
            e = sorted_edge(u, v)
            if e not in f.edge_angles:
                raise FoldError(f"edge {e} has no angle assigned")
            delta = (v[0] - u[0], v[1] - u[1])
            first, second, first_sides = out_pose[u]
            src = first if delta in first_sides else second
            world_dir = _material_to_world(src, delta)
            child_pose = propagate(src, world_dir, f.edge_angles[e])
            place(v, child_pose, (-delta[0], -delta[1]))
            queue.append(v)
    if len(visited) != len(cells):
        raise FoldError("tree does not reach every cell")

    if sealed:
        from .lattice import adjacency_edges
        tree_set = set(f.tree.edges)
        allowed = set(m.angles())
        for e in adjacency_edges(frozenset(cells)):
            if e in tree_set:
                continue
            u, v = e
            delta = (v[0] - u[0], v[1] - u[1])
            first_u, second_u, sides_u = out_pose[u]
            src = first_u if delta in sides_u else second_u
            first_v, second_v, sides_v = out_pose[v]
            back = (-delta[0], -delta[1])
            dst = first_v if back in sides_v else second_v
            ang = seam_angle(src, delta, dst)
            if ang is None:
                raise FoldError(
                    f"adjacent squares {u} and {v} tear apart: "
                    "no grid fold relates their frames")
            if ang not in allowed:
                raise AngleNotInModel(
                    f"seam between {u} and {v} bends {ang}, "
                    f"not in model {m.describe()}")
    return poses, coverage


def verify(f: Folding, m: FoldModel, report: Optional[list[str]] = None, *,
           sealed: bool = False) -> bool:
    """Independent check: the folding executes cleanly and covers the target."""
    try:
        _poses, cov = execute(f, m, sealed=sealed)
    except FoldError as exc:
        if report is not None:
            report.append(f"execution failed: {exc}")
        return False
    if not covered(cov, f.target):
        if report is not None:
            from .polycube import surface
            missing = [fc for fc in surface(f.target) if not cov.face_covered(fc)]
            report.append(f"uncovered boundary faces: {sorted(missing)}")
        return False
    return True


# --- solution files ---------------------------------------------------------

def folding_to_json(f: Folding) -> dict:
    rp = f.root_pose
    axis = key_axis(rp.center)
    anchor = [(rp.center[i] - 1) // 2 for i in range(3)]
    anchor[axis] = rp.center[axis] // 2
    return {
        "cells": [[x, y] for x, y in f.tree.shape.cells],
        "tree_edges": [[[a[0], a[1]], [b[0], b[1]]] for a, b in f.tree.edges],
        "cubes": [[x, y, z] for x, y, z in sorted(f.target.cubes)],
        "root_cell": [f.root_cell[0], f.root_cell[1]],
        "root_pose": {
            "anchor": anchor,
            "normal_axis": axis,
            "ex": list(rp.ex),
            "ey": list(rp.ey),
        },
        "edge_angles": [
            [[a[0], a[1]], [b[0], b[1]], f.edge_angles[(a, b)]]
            for a, b in sorted(f.edge_angles)
        ],
        "splits": [
            [[c[0], c[1]], diag, ang]
            for c, (diag, ang) in sorted(f.splits.items())
        ],
    }


def folding_from_json(obj: dict) -> Folding:
    from .polycube import face_key
    cells = [(int(x), int(y)) for x, y in obj["cells"]]
    shape = Polyomino(tuple(sorted(cells)))
    edges = tuple(sorted(
        sorted_edge((int(a[0]), int(a[1])), (int(b[0]), int(b[1])))
        for a, b, *_ in (pair[:2] for pair in obj["tree_edges"])
    )) if obj.get("tree_edges") else tuple()
    tree = DualTree(shape, edges) if edges else DualTree.of_tree_shape(shape)
    target = Polycube.from_cubes(tuple(c) for c in obj["cubes"])
    rp = obj["root_pose"]
    pose = Pose(
        face_key(tuple(int(v) for v in rp["anchor"]), int(rp["normal_axis"])),
        tuple(int(v) for v in rp["ex"]),
        tuple(int(v) for v in rp["ey"]),
    )
    angles = {}
    for a, b, ang in obj["edge_angles"]:
        angles[sorted_edge((int(a[0]), int(a[1])), (int(b[0]), int(b[1])))] = int(ang)
    splits = {}
    for c, diag, ang in obj.get("splits", []):
        splits[(int(c[0]), int(c[1]))] = (str(diag), int(ang))
    return Folding(
        tree=tree,
        target=target,
        root_cell=(int(obj["root_cell"][0]), int(obj["root_cell"][1])),
        root_pose=pose,
        edge_angles=angles,
        splits=splits,
    )
