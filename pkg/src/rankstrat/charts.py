"""Static SVG emitters for heatmaps, box plots, band spreads and trees.

Everything here is a pure function of its input: no timestamps, no random
ids, fixed float formatting. Identical input yields identical bytes, which
the artifact determinism tests rely on.
"""

from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

from .core import display_name
from .dtree import DecisionNode, DecisionTree, LeafNode, TreeNode
from .eda import BoxStats, CorrelationMatrix, RankBandSpread
from .errors import EmptyInput

#: Class palette (class 1 first); cycles if more classes than entries.
CLASS_COLORS = ("#f2c14e", "#74b3ce", "#63a46c", "#e4572e", "#8e6c88", "#5c6b73")

_FONT = "font-family:Helvetica,Arial,sans-serif"


def class_color(index: int) -> str:
    return CLASS_COLORS[(index - 1) % len(CLASS_COLORS)]


def _f(value: float, digits: int = 2) -> str:
    return format(value, f".{digits}f")


def _svg(width: float, height: float, body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(width, 0)}" '
        f'height="{_f(height, 0)}" viewBox="0 0 {_f(width, 0)} {_f(height, 0)}">'
    )
    return head + "".join(body) + "</svg>"


def _text(x: float, y: float, content: str, size: int = 12, anchor: str = "middle",
          fill: str = "#111111", extra: str = "") -> str:
    return (
        f'<text x="{_f(x, 1)}" y="{_f(y, 1)}" text-anchor="{anchor}" '
        f'style="{_FONT};font-size:{size}px;fill:{fill}"{extra}>{escape(content)}</text>'
    )


def _rect(x: float, y: float, w: float, h: float, fill: str, stroke: str = "none") -> str:
    return (
        f'<rect x="{_f(x, 1)}" y="{_f(y, 1)}" width="{_f(w, 1)}" height="{_f(h, 1)}" '
        f'fill="{fill}" stroke="{stroke}"/>'
    )


def _line(x1: float, y1: float, x2: float, y2: float, stroke: str = "#333333",
          width: float = 1.0) -> str:
    return (
        f'<line x1="{_f(x1, 1)}" y1="{_f(y1, 1)}" x2="{_f(x2, 1)}" y2="{_f(y2, 1)}" '
        f'stroke="{stroke}" stroke-width="{_f(width, 1)}"/>'
    )


def _diverging_color(value: float) -> str:
    """Linear two-ended scale over [-1, 1]: blue for negative, red for positive."""
    v = max(-1.0, min(1.0, value))
    if v >= 0:
        t, (r2, g2, b2) = v, (178, 24, 43)
    else:
        t, (r2, g2, b2) = -v, (33, 102, 172)
    r = round(255 + (r2 - 255) * t)
    g = round(255 + (g2 - 255) * t)
    b = round(255 + (b2 - 255) * t)
    return f"rgb({r},{g},{b})"


def render_heatmap(matrix: CorrelationMatrix) -> str:
    """Annotated correlation heatmap; one cell per coefficient."""
    n = matrix.size
    if n == 0:
        raise EmptyInput("empty correlation matrix")
    cell = 58
    left, top = 86, 46
    width = left + n * cell + 16
    height = top + n * cell + 16
    body: list[str] = []
    for j, label in enumerate(matrix.labels):
        body.append(_text(left + j * cell + cell / 2, top - 12, label, size=13))
    for i, label in enumerate(matrix.labels):
        body.append(_text(left - 10, top + i * cell + cell / 2 + 4, label, size=13, anchor="end"))
        for j in range(n):
            value = matrix.values[i][j]
            x, y = left + j * cell, top + i * cell
            body.append(_rect(x, y, cell, cell, _diverging_color(value), stroke="#ffffff"))
            ink = "#ffffff" if abs(value) > 0.65 else "#111111"
            body.append(_text(x + cell / 2, y + cell / 2 + 4, _f(value), size=12, fill=ink))
    return _svg(width, height, body)


def render_boxplots(stats: Sequence[tuple[str, BoxStats]]) -> str:
    """Side-by-side vertical box plots with annotated medians."""
    if not stats:
        raise EmptyInput("no box statistics to render")
    lo = min(min(s.whisker_low, *(s.outliers or (s.whisker_low,))) for _, s in stats)
    hi = max(max(s.whisker_high, *(s.outliers or (s.whisker_high,))) for _, s in stats)
    pad = (hi - lo) * 0.06 or 1.0
    lo, hi = lo - pad, hi + pad
    column, box_w = 92, 40
    top, bottom, left = 24, 42, 52
    plot_h = 320
    width = left + column * len(stats) + 24
    height = top + plot_h + bottom

    def y(value: float) -> float:
        return top + (hi - value) / (hi - lo) * plot_h

    body: list[str] = []
    body.append(_line(left - 8, top, left - 8, top + plot_h, stroke="#999999"))
    for tick in range(5):
        value = lo + (hi - lo) * tick / 4
        body.append(_text(left - 14, y(value) + 4, _f(value), size=10, anchor="end", fill="#555555"))
    for index, (label, s) in enumerate(stats):
        cx = left + index * column + column / 2
        bx = cx - box_w / 2
        body.append(_line(cx, y(s.whisker_low), cx, y(s.q1)))
        body.append(_line(cx, y(s.q3), cx, y(s.whisker_high)))
        body.append(_line(cx - box_w / 4, y(s.whisker_low), cx + box_w / 4, y(s.whisker_low)))
        body.append(_line(cx - box_w / 4, y(s.whisker_high), cx + box_w / 4, y(s.whisker_high)))
        body.append(_rect(bx, y(s.q3), box_w, y(s.q1) - y(s.q3), "#d7e3ef", stroke="#33506b"))
        body.append(_line(bx, y(s.median), bx + box_w, y(s.median), stroke="#a03030", width=2.0))
        body.append(_text(cx + box_w / 2 + 6, y(s.median) + 4, _f(s.median), size=10, anchor="start", fill="#a03030"))
        for outlier in s.outliers:
            body.append(
                f'<circle cx="{_f(cx, 1)}" cy="{_f(y(outlier), 1)}" r="3" '
                f'fill="none" stroke="#555555"/>'
            )
        body.append(_text(cx, top + plot_h + 22, label, size=12))
    return _svg(width, height, body)


def render_bands(spread: RankBandSpread) -> str:
    """Waterfall-style spread of scores across rank bands."""
    bands = spread.bands
    if not bands:
        raise EmptyInput("no rank bands to render")
    lo = min(b.min_score for b in bands)
    hi = max(b.max_score for b in bands)
    pad = (hi - lo) * 0.06 or 1.0
    lo, hi = lo - pad, hi + pad
    row_h, left, top = 34, 112, 28
    plot_w = 460
    width = left + plot_w + 70
    height = top + row_h * len(bands) + 34

    def x(value: float) -> float:
        return left + (value - lo) / (hi - lo) * plot_w

    body: list[str] = []
    for index, band in enumerate(bands):
        cy = top + index * row_h
        label = f"ranks {band.rank_low}-{band.rank_high}"
        body.append(_text(left - 10, cy + row_h / 2 + 4, label, size=11, anchor="end"))
        bar_w = max(x(band.max_score) - x(band.min_score), 1.0)
        body.append(_rect(x(band.min_score), cy + 7, bar_w, row_h - 14, "#74b3ce", stroke="#33506b"))
        body.append(_text(x(band.min_score) - 4, cy + row_h / 2 + 4, _f(band.min_score), size=10, anchor="end", fill="#555555"))
        body.append(_text(x(band.max_score) + 4, cy + row_h / 2 + 4, _f(band.max_score), size=10, anchor="start", fill="#555555"))
    body.append(_line(left, top + row_h * len(bands) + 6, left + plot_w, top + row_h * len(bands) + 6, stroke="#999999"))
    return _svg(width, height, body)


def _tree_layout(node: TreeNode, depth: int, slots: list[int], positions: dict) -> float:
    if isinstance(node, LeafNode):
        x = float(slots[0])
        slots[0] += 1
    else:
        lx = _tree_layout(node.left, depth + 1, slots, positions)
        rx = _tree_layout(node.right, depth + 1, slots, positions)
        x = (lx + rx) / 2.0
    positions[id(node)] = (x, depth)
    return x


def render_tree(tree: DecisionTree) -> str:
    """Node-link diagram with per-node class-distribution bars."""
    positions: dict = {}
    slots = [0]
    _tree_layout(tree.root, 1, slots, positions)
    n_leaves = slots[0]
    max_level = max(level for _, level in positions.values())
    node_w, node_h = 126, 46
    gap_x, gap_y = 26, 54
    left, top = 20, 16
    width = left * 2 + n_leaves * node_w + (n_leaves - 1) * gap_x
    height = top * 2 + max_level * node_h + (max_level - 1) * gap_y + 14

    def center(node: TreeNode) -> tuple[float, float]:
        x, level = positions[id(node)]
        cx = left + x * (node_w + gap_x) + node_w / 2
        cy = top + (level - 1) * (node_h + gap_y) + node_h / 2
        return cx, cy

    body: list[str] = []

    def draw_edges(node: TreeNode) -> None:
        if not isinstance(node, DecisionNode):
            return
        cx, cy = center(node)
        for child, tag in ((node.left, "<="), (node.right, ">")):
            kx, ky = center(child)
            body.append(_line(cx, cy + node_h / 2, kx, ky - node_h / 2, stroke="#888888"))
            mx, my = (cx + kx) / 2, (cy + ky) / 2 + 3
            body.append(_text(mx, my, f"{tag} {_f(node.threshold)}", size=9, fill="#666666"))
        draw_edges(node.left)
        draw_edges(node.right)

    def draw_nodes(node: TreeNode) -> None:
        cx, cy = center(node)
        x0, y0 = cx - node_w / 2, cy - node_h / 2
        body.append(_rect(x0, y0, node_w, node_h, "#ffffff", stroke="#33506b"))
        if isinstance(node, DecisionNode):
            title = f"{display_name(node.feature)} <= {_f(node.threshold)}"
        else:
            title = f"class {node.predicted_class}"
        body.append(_text(cx, y0 + 14, title, size=11))
        counts = node.distribution.counts
        total = node.distribution.total or 1
        bar_w, bar_h = node_w - 16, 9
        bx = x0 + 8
        by = y0 + node_h - bar_h - 14
        offset = 0.0
        for index, count in enumerate(counts, start=1):
            if count == 0:
                continue
            seg = bar_w * count / total
            body.append(_rect(bx + offset, by, seg, bar_h, class_color(index)))
            offset += seg
        body.append(_text(cx, y0 + node_h - 3, f"n={node.distribution.total}", size=9, fill="#666666"))
        if isinstance(node, DecisionNode):
            draw_nodes(node.left)
            draw_nodes(node.right)

    draw_edges(tree.root)
    draw_nodes(tree.root)
    return _svg(width, height, body)
