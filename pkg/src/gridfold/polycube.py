"""Cubic-lattice targets: polycubes, their face structure, and edge rolling.

Grid faces are addressed by doubled centers: the center of a unit face,
scaled by 2, is an integer triple with exactly one even coordinate, and
that coordinate's axis is the face normal. Cube centers doubled are all
odd. This keeps every quantity in integer arithmetic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple

Vec = tuple[int, int, int]
Cube = tuple[int, int, int]

UNIT: tuple[Vec, Vec, Vec] = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def vadd(a: Vec, b: Vec) -> Vec:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def vsub(a: Vec, b: Vec) -> Vec:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def vneg(a: Vec) -> Vec:
    return (-a[0], -a[1], -a[2])


def vscale(k: int, a: Vec) -> Vec:
    return (k * a[0], k * a[1], k * a[2])


def cross(a: Vec, b: Vec) -> Vec:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def dot(a: Vec, b: Vec) -> int:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


class GridFace(NamedTuple):
    """Unit grid face: minimal corner, normal axis, boundary or interior."""

    anchor: Vec
    normal_axis: int
    kind: str


FaceKey = Vec  # doubled center of a grid face


def face_key(anchor: Vec, normal_axis: int) -> FaceKey:
    c = [2 * anchor[0] + 1, 2 * anchor[1] + 1, 2 * anchor[2] + 1]
    c[normal_axis] -= 1
    return (c[0], c[1], c[2])


def key_axis(key: FaceKey) -> int:
    for i in range(3):
        if key[i] % 2 == 0:
            return i
    raise ValueError(f"not a face key: {key}")


def key_to_face(key: FaceKey, kind: str) -> GridFace:
    axis = key_axis(key)
    anchor = [(key[i] - 1) // 2 for i in range(3)]
    anchor[axis] = key[axis] // 2
    return GridFace((anchor[0], anchor[1], anchor[2]), axis, kind)


def _cube_center(c: Cube) -> Vec:
    return (2 * c[0] + 1, 2 * c[1] + 1, 2 * c[2] + 1)


class Pose(NamedTuple):
    """Placement of a unit square on a grid face.

    center is the face's doubled center. ex and ey are the world images of
    the square's material +x and +y edge directions; ex cross ey is the
    material top-side normal, so the pair also records which way the
    square faces.
    """

    center: Vec
    ex: Vec
    ey: Vec

    @property
    def normal(self) -> Vec:
        return cross(self.ex, self.ey)


def propagate(p: Pose, exit_direction: Vec, angle: int) -> Pose:
    """Pose of the neighboring square across the edge in exit_direction.

    The neighbor is rotated about the shared edge by the signed angle,
    measured from the coplanar continuation; positive angles are mountain
    folds, bending away from the square's top side.
    """
    d = exit_direction
    if d != p.ex and d != vneg(p.ex) and d != p.ey and d != vneg(p.ey):
        raise ValueError(f"exit direction {d} not in the pose frame")
    n = p.normal

    if angle == 0:
        return Pose(vadd(p.center, vscale(2, d)), p.ex, p.ey)
    if angle == 90:
        new_center = vsub(vadd(p.center, d), n)
        mapping = {d: vneg(n), vneg(d): n}
    elif angle == -90:
        new_center = vadd(vadd(p.center, d), n)
        mapping = {d: n, vneg(d): vneg(n)}
    elif angle in (180, -180):
        new_center = p.center
        mapping = {d: vneg(d), vneg(d): d}
    else:
        raise ValueError(f"angle {angle} is not a grid fold")

    new_ex = mapping.get(p.ex, p.ex)
    new_ey = mapping.get(p.ey, p.ey)
    return Pose(new_center, new_ex, new_ey)


@dataclass(frozen=True)
class Polycube:
    cubes: frozenset[Cube]

    def __post_init__(self) -> None:
        if not self.cubes:
            raise ValueError("empty polycube")
        # Face-connectivity.
        start = min(self.cubes)
        seen = {start}
        queue = [start]
        while queue:
            c = queue.pop()
            for axis in range(3):
                for s in (1, -1):
                    nb = list(c)
                    nb[axis] += s
                    nbt = (nb[0], nb[1], nb[2])
                    if nbt in self.cubes and nbt not in seen:
                        seen.add(nbt)
                        queue.append(nbt)
        if len(seen) != len(self.cubes):
            raise ValueError("polycube is not face-connected")

    @classmethod
    def from_cubes(cls, cubes: Iterable[Cube]) -> "Polycube":
        return cls(frozenset((int(x), int(y), int(z)) for x, y, z in cubes))

    def __len__(self) -> int:
        return len(self.cubes)


UNIT_CUBE = Polycube(frozenset({(0, 0, 0)}))


def surface(q: Polycube) -> set[GridFace]:
    """Boundary faces: unit faces with exactly one incident cube in q."""
    faces = set()
    for c in q.cubes:
        cc = _cube_center(c)
        for axis in range(3):
            for s in (1, -1):
                nb = list(c)
                nb[axis] += s
                if (nb[0], nb[1], nb[2]) not in q.cubes:
                    k = list(cc)
                    k[axis] += s
                    faces.add(key_to_face((k[0], k[1], k[2]), "boundary"))
    return faces


def interior_faces(q: Polycube) -> set[GridFace]:
    """Unit grid faces strictly inside q: both incident voxels are cubes."""
    faces = set()
    for c in q.cubes:
        cc = _cube_center(c)
        for axis in range(3):
            nb = list(c)
            nb[axis] += 1
            if (nb[0], nb[1], nb[2]) in q.cubes:
                k = list(cc)
                k[axis] += 1
                faces.add(key_to_face((k[0], k[1], k[2]), "interior"))
    return faces


@lru_cache(maxsize=256)
def surface_keys(q: Polycube) -> frozenset[FaceKey]:
    return frozenset(face_key(f.anchor, f.normal_axis) for f in surface(q))


@lru_cache(maxsize=256)
def interior_keys(q: Polycube) -> frozenset[FaceKey]:
    return frozenset(face_key(f.anchor, f.normal_axis) for f in interior_faces(q))


def face_edge_midpoints(key: FaceKey) -> list[Vec]:
    """Doubled midpoints of the 4 lattice edges bounding the face."""
    axis = key_axis(key)
    out = []
    for i in range(3):
        if i == axis:
            continue
        for s in (1, -1):
            k = list(key)
            k[i] += s
            out.append((k[0], k[1], k[2]))
    return out


def has_four_square_edge(q: Polycube) -> bool:
    """True when some lattice edge carries 4 boundary faces.

    Happens exactly when two cubes of q touch along an edge only; rolling
    across such an edge is ambiguous, which the tree DP cannot handle.
    """
    counts: dict[Vec, int] = {}
    for k in surface_keys(q):
        for mid in face_edge_midpoints(k):
            counts[mid] = counts.get(mid, 0) + 1
    return any(v >= 4 for v in counts.values())


ROTATIONS: tuple[tuple[Vec, Vec, Vec], ...] = tuple(
    (r0, r1, r2)
    for r0 in ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1))
    for r1 in ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1))
    if dot(r0, r1) == 0
    for r2 in (cross(r0, r1),)
)


def rot_apply(rot: tuple[Vec, Vec, Vec], v: Vec) -> Vec:
    # Rows of rot are the images of the basis vectors: v maps to sum v_i * row_i.
    return vadd(vadd(vscale(v[0], rot[0]), vscale(v[1], rot[1])), vscale(v[2], rot[2]))


def _fixing_shift(q: Polycube, rot: tuple[Vec, Vec, Vec]) -> Vec | None:
    """Doubled-coordinate translation making rot carry q onto itself.

    Rotations act on doubled cube centers, which transform as true points;
    cube min-corner coordinates do not.
    """
    base = [_cube_center(c) for c in q.cubes]
    img = [rot_apply(rot, c) for c in base]
    shift = tuple(
        min(c[i] for c in base) - min(c[i] for c in img) for i in range(3)
    )
    if frozenset(vadd(c, shift) for c in img) == frozenset(base):
        return shift
    return None


@lru_cache(maxsize=256)
def rotation_group(q: Polycube) -> tuple[tuple[Vec, Vec, Vec], ...]:
    """The axis rotations carrying q onto itself up to translation."""
    return tuple(rot for rot in ROTATIONS if _fixing_shift(q, rot) is not None)


def all_poses(q: Polycube, outward_only: bool = False) -> list[Pose]:
    """Every pose on a boundary face: 4 frames x 2 sides, or outward only.

    A pose is outward when its material normal points away from the cube
    behind the face.
    """
    poses = []
    skeys = surface_keys(q)
    for key in sorted(skeys):
        axis = key_axis(key)
        u, v = [UNIT[i] for i in range(3) if i != axis]
        # The face's outward direction: away from the single incident cube.
        behind_plus = tuple((key[i] + UNIT[axis][i]) for i in range(3))
        cube_plus = tuple((behind_plus[i] - 1) // 2 for i in range(3))
        outward = vneg(UNIT[axis]) if cube_plus in q.cubes else UNIT[axis]
        for ex in (u, vneg(u), v, vneg(v)):
            for ey in (u, vneg(u), v, vneg(v)):
                if dot(ex, ey) != 0:
                    continue
                p = Pose(key, ex, ey)
                if outward_only and p.normal != outward:
                    continue
                poses.append(p)
    return poses


def outward_normal(q: Polycube, key: FaceKey) -> Vec:
    axis = key_axis(key)
    behind_plus = tuple((key[i] + UNIT[axis][i]) for i in range(3))
    cube_plus = tuple((behind_plus[i] - 1) // 2 for i in range(3))
    return vneg(UNIT[axis]) if cube_plus in q.cubes else UNIT[axis]


@lru_cache(maxsize=256)
def root_pose_orbits(q: Polycube, outward_only: bool) -> tuple[Pose, ...]:
    """One representative pose per orbit of the rotation group of q.

    Rotations act on poses componentwise, with recentering so the rotated
    cube set matches q's own coordinates.
    """
    rots = rotation_group(q)
    shifts = [_fixing_shift(q, rot) for rot in rots]
    seen: set[Pose] = set()
    reps: list[Pose] = []
    for p in all_poses(q, outward_only=outward_only):
        if p in seen:
            continue
        orbit = set()
        for rot, sh in zip(rots, shifts):
            orbit.add(Pose(
                vadd(rot_apply(rot, p.center), sh),
                rot_apply(rot, p.ex),
                rot_apply(rot, p.ey),
            ))
        seen |= orbit
        reps.append(min(orbit))
    reps.sort()
    return tuple(reps)


# --- JSON -----------------------------------------------------------------

def cubes_to_json(q: Polycube) -> dict:
    return {"cubes": [[x, y, z] for x, y, z in sorted(q.cubes)]}


def cubes_from_json(obj: dict) -> Polycube:
    if "cubes" not in obj:
        raise ValueError("polycube JSON lacks a 'cubes' field")
    return Polycube.from_cubes(tuple(c) for c in obj["cubes"])


def load_polycube_file(path: str) -> Polycube:
    if path == "cube":
        return UNIT_CUBE
    with open(path, "r", encoding="utf-8") as fh:
        return cubes_from_json(json.load(fh))
