"""Triangular-lattice shapes and folding them onto the regular tetrahedron.

A polyiamond cell is (x, y) on the two-orientation triangle tiling: cell
parity decides whether the triangle points up ((x+y) even) or down. Row
neighbors are (x-1, y) and (x+1, y); the third neighbor is across the
horizontal edge, down(x, y) ~ up(x, y+1).

Corner coordinates live in the lattice basis (so 60-degree symmetries are
integer-linear): an up cell (x, y) with a = (x-y)//2 has corners (a, y),
(a+1, y), (a, y+1); a down cell with a = (x-y-1)//2 has corners (a+1, y),
(a, y+1), (a+1, y+1). Shapes canonicalize through the 12 lattice symmetries
acting on corner-sum keys.

The tetrahedron folder is combinatorial: a placed triangle is a map from
its 3 corners to 3 of the 4 tetrahedron vertices, and crossing a dual-tree
edge either rolls onto the face across that edge or folds back flat onto
the parent's face. Those are the only two choices that keep triangles on
the surface, so backtracking over them is an exact oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional

ICell = tuple[int, int]
IEdge = tuple[ICell, ICell]
Vertex = tuple[int, int]


class NotATree(Exception):
    pass


def is_up(cell: ICell) -> bool:
    return (cell[0] + cell[1]) % 2 == 0


def corners(cell: ICell) -> tuple[Vertex, Vertex, Vertex]:
    x, y = cell
    if is_up(cell):
        a = (x - y) // 2
        return ((a, y), (a + 1, y), (a, y + 1))
    a = (x - y - 1) // 2
    return ((a + 1, y), (a, y + 1), (a + 1, y + 1))


def cell_neighbors(cell: ICell) -> tuple[ICell, ...]:
    x, y = cell
    third = (x, y - 1) if is_up(cell) else (x, y + 1)
    return ((x - 1, y), (x + 1, y), third)


def _corner_key(cell: ICell) -> Vertex:
    (p1, q1), (p2, q2), (p3, q3) = corners(cell)
    return (p1 + p2 + p3, q1 + q2 + q3)


def _cell_of_key(key: Vertex) -> ICell:
    s, t = key
    if s % 3 == 1:  # up: key = (3a+1, 3y+1)
        a, y = (s - 1) // 3, (t - 1) // 3
        return (2 * a + y, y)
    a, y = (s - 2) // 3, (t - 2) // 3
    return (2 * a + 1 + y, y)


def _rot60(v: Vertex) -> Vertex:
    return (-v[1], v[0] + v[1])


def _reflect(v: Vertex) -> Vertex:
    return (v[1], v[0])


def _symmetries() -> list[Callable[[Vertex], Vertex]]:
    maps = []
    for flip in (False, True):
        f = _reflect if flip else (lambda v: v)
        for k in range(6):
            def make(f=f, k=k):
                def apply(v: Vertex) -> Vertex:
                    w = f(v)
                    for _ in range(k):
                        w = _rot60(w)
                    return w
                return apply
            maps.append(make())
    return maps


_SYMMETRIES = _symmetries()


def _normalize_keys(keys: Iterable[Vertex]) -> tuple[Vertex, ...]:
    ks = list(keys)
    # Lattice translations move keys by multiples of 3 in each coordinate.
    dp = 3 * ((min(p for p, _ in ks)) // 3)
    dq = 3 * ((min(q for _, q in ks)) // 3)
    return tuple(sorted((p - dp, q - dq) for p, q in ks))


def canonical_iamond_cells(cells: Iterable[ICell]) -> tuple[ICell, ...]:
    """Least symmetry image, as cells; input parity must already be valid."""
    keys = [_corner_key(c) for c in cells]
    best: Optional[tuple[Vertex, ...]] = None
    for sym in _SYMMETRIES:
        cand = _normalize_keys(sym(k) for k in keys)
        if best is None or cand < best:
            best = cand
    assert best is not None
    return tuple(sorted(_cell_of_key(k) for k in best))


def _connected(cells: frozenset[ICell]) -> bool:
    start = next(iter(cells))
    seen = {start}
    stack = [start]
    while stack:
        c = stack.pop()
        for nb in cell_neighbors(c):
            if nb in cells and nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == len(cells)


@dataclass(frozen=True)
class Polyiamond:
    """Edge-connected set of lattice triangles, stored as sorted cells."""

    cells: tuple[ICell, ...]

    def __post_init__(self) -> None:
        if not self.cells:
            raise ValueError("empty polyiamond")

    @classmethod
    def from_cells(cls, cells: Iterable[ICell]) -> "Polyiamond":
        cset = frozenset(cells)
        if not cset:
            raise ValueError("empty polyiamond")
        if not _connected(cset):
            raise ValueError("triangles are not edge-connected")
        return cls(tuple(sorted(cset)))

    @classmethod
    def from_text(cls, text: str) -> "Polyiamond":
        return cls.from_cells(parse_iamond_cells(text))

    @property
    def triangles(self) -> tuple[tuple[int, int, str], ...]:
        return tuple((x, y, "u" if is_up((x, y)) else "d")
                     for x, y in self.cells)

    def cell_set(self) -> frozenset[ICell]:
        return frozenset(self.cells)

    def canonical(self) -> "Polyiamond":
        return Polyiamond(canonical_iamond_cells(self.cells))


def parse_iamond_cells(text: str) -> list[ICell]:
    """Read a 'u'/'d'/'.' grid; row 0 is the first line, x grows rightward.

    The letters fix each cell's orientation. If the drawing sits on the
    opposite parity, the whole shape is shifted one column right, which is
    the same shape; mixed parities are an error.
    """
    marks: list[tuple[int, int, str]] = []
    for y, line in enumerate(text.splitlines()):
        for x, ch in enumerate(line):
            if ch in "ud":
                marks.append((x, y, ch))
            elif ch != "." and ch.strip():
                raise ValueError(
                    f"unexpected character {ch!r} at line {y + 1}, "
                    f"column {x + 1}")
    if not marks:
        raise ValueError("empty shape: no 'u'/'d' cells found")
    for shift in (0, 1):
        ok = all((ch == "u") == is_up((x + shift, y)) for x, y, ch in marks)
        if ok:
            return [(x + shift, y) for x, y, ch in marks]
    x0, y0, ch0 = marks[0]
    ref = (ch0 == "u") == is_up((x0, y0))
    x, y, ch = next((x, y, ch) for x, y, ch in marks
                    if ((ch == "u") == is_up((x, y))) != ref)
    raise ValueError(
        f"inconsistent triangle orientations: {ch!r} at line {y + 1}, "
        f"column {x + 1} does not alternate with the cell at line "
        f"{y0 + 1}, column {x0 + 1}")


def iamond_to_text(p: Polyiamond) -> str:
    xs = [x for x, _ in p.cells]
    ys = [y for _, y in p.cells]
    x0, y0 = min(xs), min(ys)
    if (x0 + y0) % 2 == 1:
        x0 -= 1  # keep parity: translate by full lattice steps only
    grid = [["."] * (max(xs) - x0 + 1) for _ in range(max(ys) - y0 + 1)]
    for x, y in p.cells:
        grid[y - y0][x - x0] = "u" if is_up((x, y)) else "d"
    return "\n".join("".join(row).rstrip(".") or "." for row in grid)


def iamond_edges(cells: frozenset[ICell]) -> list[IEdge]:
    out = []
    for c in cells:
        for nb in cell_neighbors(c):
            if nb in cells and c < nb:
                out.append((c, nb))
    out.sort()
    return out


def iamond_tree(p: Polyiamond) -> bool:
    """True iff the dual adjacency graph is a tree (it is connected)."""
    return len(iamond_edges(p.cell_set())) == len(p.cells) - 1


_levels: list[list[tuple[ICell, ...]]] = [[], [((0, 0),)]]


def enumerate_free_iamonds(n: int) -> Iterator[Polyiamond]:
    """All free polyiamonds of n triangles, canonical, each exactly once."""
    if n < 1:
        raise ValueError("n must be positive")
    while len(_levels) <= n:
        grown: set[tuple[ICell, ...]] = set()
        for cells in _levels[-1]:
            occupied = set(cells)
            for c in cells:
                for nb in cell_neighbors(c):
                    if nb not in occupied:
                        grown.add(canonical_iamond_cells(occupied | {nb}))
        _levels.append(sorted(grown))
    for cells in _levels[n]:
        yield Polyiamond(cells)


# --- the tetrahedron target ------------------------------------------------

TETRA_VERTICES = (0, 1, 2, 3)


class TetraSurface:
    """The 4 faces of the regular tetrahedron with their rolling map."""

    faces: tuple[frozenset[int], ...] = tuple(
        frozenset(TETRA_VERTICES) - {v} for v in TETRA_VERTICES)

    @staticmethod
    def roll(face: frozenset[int], edge: frozenset[int]) -> frozenset[int]:
        """The other face sharing this edge."""
        if not edge <= face or len(edge) != 2:
            raise ValueError(f"{sorted(edge)} is not an edge of {sorted(face)}")
        return frozenset(edge) | {6 - sum(face)}  # vertices sum to 6


# Every triangle of a straight strip of four rolls onto a new face, and the
# fan of three around a central triangle is the other unfolding.
TETRA_NET_STRIP = ((0, 0), (1, 0), (2, 0), (3, 0))
TETRA_NET_FAN = ((0, 0), (1, 0), (2, 0), (1, 1))


def _contains_congruent(cells: frozenset[ICell],
                        template: tuple[ICell, ...]) -> bool:
    keys = {_corner_key(c) for c in cells}
    tkeys = [_corner_key(c) for c in template]
    for sym in _SYMMETRIES:
        img = [sym(k) for k in tkeys]
        base = img[0]
        for k in keys:
            dp, dq = k[0] - base[0], k[1] - base[1]
            if dp % 3 or dq % 3:
                continue
            if all((p + dp, q + dq) in keys for p, q in img):
                return True
    return False


def folds_to_tetrahedron(p: Polyiamond) -> bool:
    """Closed-form test: the shape folds onto the tetrahedron iff it holds
    one of the two tetrahedron unfoldings, and a dual vertex of degree 3
    already implies the triangle-around-a-center one."""
    if not iamond_tree(p):
        raise NotATree("predicate is defined for tree shapes")
    cells = p.cell_set()
    for c in cells:
        if sum(1 for nb in cell_neighbors(c) if nb in cells) == 3:
            return True
    return (_contains_congruent(cells, TETRA_NET_STRIP)
            or _contains_congruent(cells, TETRA_NET_FAN))


def brute_fold_tetra(p: Polyiamond) -> Optional[dict]:
    """Independent oracle: backtrack over roll / fold-back per tree edge.

    Returns a trace {cell: face vertex-triple, edge: choice} on success.
    """
    if not iamond_tree(p):
        raise NotATree("folder is defined for tree shapes")
    cells = p.cell_set()
    adj: dict[ICell, list[ICell]] = {c: [] for c in cells}
    for a, b in iamond_edges(cells):
        adj[a].append(b)
        adj[b].append(a)
    root = p.cells[0]
    order: list[tuple[ICell, ICell]] = []  # (parent, child), BFS
    parent: dict[ICell, Optional[ICell]] = {root: None}
    queue = [root]
    while queue:
        u = queue.pop(0)
        for v in sorted(adj[u]):
            if v not in parent:
                parent[v] = u
                order.append((u, v))
                queue.append(v)

    vmap: dict[ICell, dict[Vertex, int]] = {
        root: {c: i for i, c in enumerate(corners(root))}}
    choices: dict[IEdge, str] = {}

    def face_of(cell: ICell) -> frozenset[int]:
        return frozenset(vmap[cell].values())

    def rec(i: int) -> bool:
        if i == len(order):
            covered = {face_of(c) for c in cells}
            return len(covered) == 4
        u, v = order[i]
        shared = set(corners(u)) & set(corners(v))
        (third,) = set(corners(v)) - shared
        (u_third,) = set(corners(u)) - shared
        opposite = 6 - sum(face_of(u))
        for name, target in (("roll", opposite), ("back", vmap[u][u_third])):
            vmap[v] = {s: vmap[u][s] for s in shared}
            vmap[v][third] = target
            choices[(u, v) if u < v else (v, u)] = name
            if rec(i + 1):
                return True
            del vmap[v]
        return False

    if not rec(0):
        return None
    trace = {"faces": {c: tuple(sorted(face_of(c))) for c in cells},
             "choices": dict(choices)}
    return trace


def exceptional_tree_iamonds(max_size: int = 8) -> list[Polyiamond]:
    """All tree polyiamonds up to max_size that do not fold."""
    out = []
    for n in range(1, max_size + 1):
        for p in enumerate_free_iamonds(n):
            if iamond_tree(p) and not folds_to_tetrahedron(p):
                out.append(p)
    return out
