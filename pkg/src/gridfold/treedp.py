"""Linear-time foldability test for tree shapes under {0, +90, -90} grid folds.

The square-adjacency surface of a polycube without four-square edges is a
manifold: every surface edge borders exactly two boundary faces. Crossing a
tree edge therefore admits exactly one of the three angles 0, +90, -90 when
interior placements are forbidden -- the other two leave the surface. Once
the root square is placed, the whole folding is forced, so foldability is a
bottom-up sweep over the O(1) placements per cell: for each cell and each
placement, the set of boundary faces its subtree covers is a single bitset,
and the children merge by union (faces may be covered many times over).

Runtime is O(|tree| * placements(q)) with the placement count depending only
on the target, which is the linear bound the instrumented counters assert.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

from .foldcore import Folding
from .lattice import Cell, DualTree, sorted_edge
from .polycube import (
    Polycube,
    Pose,
    all_poses,
    has_four_square_edge,
    propagate,
    surface_keys,
)


class FourSquaresAtEdge(Exception):
    """The target has an edge shared by four boundary squares.

    Such an edge breaks the two-faces-per-edge property the forced-rolling
    argument rests on, so the dynamic program would be unsound there.
    """


class TargetTooLarge(Exception):
    """The target exceeds the constant-size cube cap the DP assumes."""

    def __init__(self, cubes: int, cap: int):
        self.cubes = cubes
        self.cap = cap
        super().__init__(
            f"target has {cubes} cubes, DP cap is {cap} "
            "(raise max_cubes explicitly if you mean it)")


class DpState(NamedTuple):
    """One dynamic-programming state: a cell placed at a concrete pose.

    pose_id indexes the target's placement table (boundary face times four
    outward frames); covered is a bitset over boundary faces and always
    contains the bit of the state's own face.
    """

    cell: Cell
    pose_id: int
    covered: int


@dataclass
class DpStats:
    """Instrumented counters: states is the number of (cell, pose) rows
    evaluated, the quantity the linearity property is asserted on."""

    states: int = 0
    transitions: int = 0


DEFAULT_CUBE_CAP = 8

_ANGLE_CHOICES = (0, 90, -90)


def _placements(q: Polycube) -> list[Pose]:
    # Outward frames only: rolling keeps the painted side out, and the
    # {0,+90,-90}-searchable models are mirror-symmetric, so inward root
    # frames add nothing (same argument the backtracking solver uses).
    return sorted(all_poses(q, outward_only=True))


class _Dp:
    def __init__(self, t: DualTree, q: Polycube, stats: DpStats):
        self.t = t
        self.q = q
        self.stats = stats
        self.surf = sorted(surface_keys(q))
        self.face_bit = {k: 1 << i for i, k in enumerate(self.surf)}
        self.full_mask = (1 << len(self.surf)) - 1
        self.poses = _placements(q)
        self.pose_id = {p: i for i, p in enumerate(self.poses)}
        self._succ_cache: dict[tuple[Pose, tuple[int, int]],
                               Optional[tuple[Pose, int]]] = {}

        adj: dict[Cell, list[Cell]] = {c: [] for c in t.shape.cells}
        for a, b in t.edges:
            adj[a].append(b)
            adj[b].append(a)
        for lst in adj.values():
            lst.sort()
        self.root = t.shape.cells[0]
        order = [self.root]
        parent: dict[Cell, Optional[Cell]] = {self.root: None}
        i = 0
        while i < len(order):
            u = order[i]
            i += 1
            for v in adj[u]:
                if v not in parent:
                    parent[v] = u
                    order.append(v)
        self.order = order
        self.children = {u: [v for v in adj[u] if parent[v] == u]
                         for u in order}

    def successor(self, pose: Pose,
                  delta: tuple[int, int]) -> Optional[tuple[Pose, int]]:
        """The unique on-surface placement across a material edge, if any."""
        key = (pose, delta)
        hit = self._succ_cache.get(key, _MISS)
        if hit is not _MISS:
            return hit
        ex, ey = pose.ex, pose.ey
        world_dir = tuple(delta[0] * ex[i] + delta[1] * ey[i]
                          for i in range(3))
        found = None
        for angle in _ANGLE_CHOICES:
            nxt = propagate(pose, world_dir, angle)
            if nxt.center in self.face_bit:
                # The manifold property guarantees at most one hit.
                found = (nxt, angle)
                break
        self._succ_cache[key] = found
        return found

    def run(self) -> tuple[bool, Optional[Pose]]:
        """Fill the table bottom-up; return (foldable, winning root pose)."""
        table: dict[Cell, list[Optional[int]]] = {}
        n_poses = len(self.poses)
        for u in reversed(self.order):
            rows: list[Optional[int]] = [None] * n_poses
            kids = self.children[u]
            for pid in range(n_poses):
                self.stats.states += 1
                pose = self.poses[pid]
                covered = self.face_bit[pose.center]
                ok = True
                for v in kids:
                    self.stats.transitions += 1
                    step = self.successor(
                        pose, (v[0] - u[0], v[1] - u[1]))
                    if step is None:
                        ok = False
                        break
                    sub = table[v][self.pose_id[step[0]]]
                    if sub is None:
                        ok = False
                        break
                    covered |= sub
                rows[pid] = covered if ok else None
            table[u] = rows
            for v in kids:
                del table[v]  #  parents never look two levels down
        root_rows = table[self.root]
        for pid in range(n_poses):
            if root_rows[pid] == self.full_mask:
                return True, self.poses[pid]
        return False, None

    def replay(self, root_pose: Pose) -> Folding:
        """Walk the forced placement down from a winning root pose."""
        angles: dict = {}
        pose_of = {self.root: root_pose}
        for u in self.order:
            for v in self.children[u]:
                step = self.successor(
                    pose_of[u], (v[0] - u[0], v[1] - u[1]))
                assert step is not None
                pose_of[v] = step[0]
                angles[sorted_edge(u, v)] = step[1]
        return Folding(tree=self.t, target=self.q, root_cell=self.root,
                       root_pose=root_pose, edge_angles=angles, splits={})


class _Miss:
    pass


_MISS = _Miss()


def _check_target(q: Polycube, max_cubes: int) -> None:
    if len(q.cubes) > max_cubes:
        raise TargetTooLarge(len(q.cubes), max_cubes)
    if has_four_square_edge(q):
        raise FourSquaresAtEdge(
            "target has a four-square edge; the tree DP needs a manifold "
            "surface")


def dp_foldable(t: DualTree, q: Polycube, max_cubes: int = DEFAULT_CUBE_CAP,
                stats: Optional[DpStats] = None) -> bool:
    """True iff the tree shape folds onto q under {0, +90, -90} grid folds,
    covering every boundary face, with no interior placements."""
    _check_target(q, max_cubes)
    ok, _pose = _Dp(t, q, stats if stats is not None else DpStats()).run()
    return ok


def dp_folding(t: DualTree, q: Polycube,
               max_cubes: int = DEFAULT_CUBE_CAP) -> Optional[Folding]:
    """Like dp_foldable but reconstructs a witness folding on success."""
    _check_target(q, max_cubes)
    dp = _Dp(t, q, DpStats())
    ok, pose = dp.run()
    if not ok:
        return None
    assert pose is not None
    return dp.replay(pose)
