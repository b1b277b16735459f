"""Crease-pattern rendering: a folding drawn as a flat SVG diagram.

The drawing is the polyomino on its unit grid, one square = 40 SVG units
with one grid unit of margin. Fold creases sit on the shared edges of the
dual tree: positive angles (mountains) are solid red, negative (valleys)
are dashed blue, flat tree edges are thin gray. Adjacent squares whose
shared edge is not in the tree are cut apart: bold black. A split square
gets its diagonal drawn corner to corner in the color of its fold sign.

Output is byte-stable: all coordinates are integers, elements are emitted
in sorted order, and nothing time- or environment-dependent is written.
"""

from __future__ import annotations

from .foldcore import F8, Folding, NE_SW, verify
from .lattice import sorted_edge

SCALE = 40
MARGIN = SCALE  # one grid unit

_MOUNTAIN = 'stroke="red" stroke-width="2"'
_VALLEY = 'stroke="blue" stroke-width="2" stroke-dasharray="6 4"'
_FLAT = 'stroke="#bbbbbb" stroke-width="1"'
_CUT = 'stroke="black" stroke-width="4"'
_OUTLINE = 'stroke="black" stroke-width="2"'


class RenderError(ValueError):
    pass


def _crease_style(angle: int) -> str:
    if angle > 0:
        return _MOUNTAIN
    if angle < 0:
        return _VALLEY
    return _FLAT


def render_svg(f: Folding) -> str:
    """Render a verified folding; rejects anything verify() rejects."""
    model = F8.with_diagonal() if f.splits else F8
    report: list[str] = []
    if not verify(f, model, report):
        raise RenderError("solution does not verify: " + "; ".join(report))

    cells = f.tree.shape.cells
    xs = [x for x, _ in cells]
    ys = [y for _, y in cells]
    x0, y0 = min(xs), min(ys)
    w = (max(xs) - x0 + 1) * SCALE + 2 * MARGIN
    h = (max(ys) - y0 + 1) * SCALE + 2 * MARGIN

    def px(x: int, y: int) -> tuple[int, int]:
        return (MARGIN + (x - x0) * SCALE, MARGIN + (y - y0) * SCALE)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
    ]

    cset = set(cells)
    for x, y in cells:  # cells is sorted
        cx, cy = px(x, y)
        out.append(f'<rect x="{cx}" y="{cy}" width="{SCALE}" '
                   f'height="{SCALE}" fill="#fdfbf5"/>')

    tree_angle = {sorted_edge(a, b): f.edge_angles[sorted_edge(a, b)]
                  for a, b in f.tree.edges}
    lines: list[str] = []

    # Interior grid edges: crease if in the tree, cut otherwise.
    for x, y in cells:
        for nb in ((x + 1, y), (x, y + 1)):
            if nb not in cset:
                continue
            e = sorted_edge((x, y), nb)
            ax, ay = px(*nb)
            if nb[0] == x + 1:
                seg = (ax, ay, ax, ay + SCALE)
            else:
                seg = (ax, ay, ax + SCALE, ay)
            style = _crease_style(tree_angle[e]) if e in tree_angle else _CUT
            lines.append(
                f'<line x1="{seg[0]}" y1="{seg[1]}" x2="{seg[2]}" '
                f'y2="{seg[3]}" {style}/>')

    # Diagonal creases of split squares, corner to corner.
    for cell in sorted(f.splits):
        diag, angle = f.splits[cell]
        cx, cy = px(*cell)
        if diag == NE_SW:  # material direction (1, 1)
            seg = (cx, cy, cx + SCALE, cy + SCALE)
        else:
            seg = (cx, cy + SCALE, cx + SCALE, cy)
        lines.append(
            f'<line x1="{seg[0]}" y1="{seg[1]}" x2="{seg[2]}" y2="{seg[3]}" '
            f'{_crease_style(angle)}/>')

    # Shape outline: cell edges with no neighbor.
    for x, y in cells:
        cx, cy = px(x, y)
        edges = (
            ((x, y - 1), (cx, cy, cx + SCALE, cy)),
            ((x, y + 1), (cx, cy + SCALE, cx + SCALE, cy + SCALE)),
            ((x - 1, y), (cx, cy, cx, cy + SCALE)),
            ((x + 1, y), (cx + SCALE, cy, cx + SCALE, cy + SCALE)),
        )
        for nb, seg in edges:
            if nb not in cset:
                lines.append(
                    f'<line x1="{seg[0]}" y1="{seg[1]}" x2="{seg[2]}" '
                    f'y2="{seg[3]}" {_OUTLINE}/>')

    out.extend(lines)
    out.append("</svg>")
    return "\n".join(out) + "\n"
