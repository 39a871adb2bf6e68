"""SVG pictures: Schreier graphs, unfolded trees inside right triangles, marked trees, the tilings 𝒟ₙ.

Everything is emitted as plain SVG text with fixed number formatting, so the
same input always gives the same bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .tripod import MARKS, MarkedTree, as_tripod, fiber_tree
from .wreath import WreathRecursion

COLORS = {"α": "#d62728", "β": "#1f77b4", "γ": "#2ca02c"}
EDGE_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2")


def _f(x) -> str:
    return f"{float(x):.3f}".rstrip("0").rstrip(".") if float(x) != 0 else "0"


def _svg(width: int, height: int, body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    )
    return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>', *body, "</svg>"]) + "\n"


def save(svg: str, path: str | Path) -> None:
    Path(path).write_text(svg, encoding="utf-8")


# -- Schreier graphs ---------------------------------------------------------------
@dataclass
class Graph:
    vertices: list[str]
    edges: list[tuple[str, str, str]]  # (label, source, target)
    positions: dict[str, tuple[float, float]] = field(default_factory=dict)

    def loops(self) -> list[tuple[str, str, str]]:
        return [e for e in self.edges if e[1] == e[2]]


def _words(d: int, n: int) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = [()]
    for _ in range(n):
        out = [v + (x,) for v in out for x in range(d)]
    return out


def schreier_graph(rec: WreathRecursion, level: int) -> Graph:
    """Vertices are the words of the given length; one edge from v to g(v) per generator g.

    Edges of involutions are stored once per unordered pair.
    """
    alpha = rec.alphabet
    words = _words(rec.degree, level)
    name = {v: "".join(alpha[x] for x in v) or "ε" for v in words}
    edges = []
    for g in rec.generators:
        perm = rec.level_permutation(((g, 1),), level)
        seen = set()
        for k, v in enumerate(words):
            w = words[perm[k]]
            key = (min(v, w), max(v, w)) if g in rec.involutions else (v, w)
            if key in seen:
                continue
            seen.add(key)
            edges.append((g, name[v], name[w]))
    return Graph([name[v] for v in words], edges)


def circle_layout(G: Graph) -> dict[str, tuple[float, float]]:
    n = len(G.vertices)
    if n == 1:
        return {G.vertices[0]: (0.0, 0.0)}
    return {
        v: (math.cos(2 * math.pi * k / n), math.sin(2 * math.pi * k / n)) for k, v in enumerate(G.vertices)
    }


def spring_layout(G: Graph, seed: int = 0) -> dict[str, tuple[float, float]]:
    import networkx as nx

    H = nx.MultiGraph()
    H.add_nodes_from(G.vertices)
    H.add_edges_from((a, b) for _, a, b in G.edges if a != b)
    pos = nx.spring_layout(H, seed=seed)
    return {v: (float(p[0]), float(p[1])) for v, p in pos.items()}


def triangle_layout(G: Graph, alphabet: Sequence[str]) -> dict[str, tuple[float, float]]:
    """Binary words placed at the centroids of the tiles of a recursively halved right triangle."""
    if len(alphabet) != 2:
        raise ValueError("the triangle layout needs a two-letter alphabet")
    out = {}
    for v in G.vertices:
        R, P, Q = (0.0, 0.0), (1.0, 0.0), (0.0, 1.0)
        for c in ("" if v == "ε" else v):
            M = ((P[0] + Q[0]) / 2, (P[1] + Q[1]) / 2)
            R, P, Q = (M, P, R) if c == alphabet[0] else (M, R, Q)
        out[v] = ((R[0] + P[0] + Q[0]) / 3, (R[1] + P[1] + Q[1]) / 3)
    return out


def graph_to_svg(G: Graph, layout: str = "spring", size: int = 600, seed: int = 0, alphabet=None) -> str:
    if layout == "circle":
        pos = circle_layout(G)
    elif layout == "triangle":
        pos = triangle_layout(G, alphabet or ("1", "2"))
    else:
        pos = spring_layout(G, seed)
    G.positions = pos
    xs = [p[0] for p in pos.values()]
    ys = [p[1] for p in pos.values()]
    span = max(max(xs) - min(xs), max(ys) - min(ys), 1e-9)
    pad = 30

    def tr(p):
        return (pad + (p[0] - min(xs)) / span * (size - 2 * pad), size - pad - (p[1] - min(ys)) / span * (size - 2 * pad))

    labels = sorted({g for g, _, _ in G.edges})
    color = {g: EDGE_COLORS[k % len(EDGE_COLORS)] for k, g in enumerate(labels)}
    body = []
    for g, a, b in G.edges:
        (x1, y1), (x2, y2) = tr(pos[a]), tr(pos[b])
        if a == b:
            body.append(f'<circle cx="{_f(x1)}" cy="{_f(y1 - 6)}" r="6" fill="none" stroke="{color[g]}"/>')
        else:
            body.append(
                f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" stroke="{color[g]}" stroke-width="1.2"/>'
            )
    for v in G.vertices:
        x, y = tr(pos[v])
        body.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="2.5" fill="black"/>')
    if len(G.vertices) <= 32:
        for v in G.vertices:
            x, y = tr(pos[v])
            body.append(f'<text x="{_f(x + 4)}" y="{_f(y - 4)}" font-size="10">{v}</text>')
    for k, g in enumerate(labels):
        body.append(f'<text x="10" y="{14 + 14 * k}" font-size="12" fill="{color[g]}">{g}</text>')
    return _svg(size, size, body)


# -- unfolding inside a right triangle ------------------------------------------------
Pt = tuple[Fraction, Fraction]
HALF = Fraction(1, 2)
TRIANGLE = ((Fraction(0), Fraction(0)), (Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))


def _reflect(p: Pt) -> Pt:
    """Mirror in the cathetus x = 0, the one that carries Z_α."""
    return (-p[0], p[1])


def _renormalize(p: Pt) -> Pt:
    """Similarity with ratio 1/√2 taking the doubled triangle back onto the standard one.

    The right-angle corner (0, 1) goes to the origin, and the two old
    hypotenuses become the new catheti.
    """
    x, y = p[0], p[1] - 1
    return (-HALF * x - HALF * y, HALF * x - HALF * y)


def on_cathetus_x(p: Pt) -> bool:
    return p[0] == 0 and 0 <= p[1] <= 1


def on_cathetus_y(p: Pt) -> bool:
    return p[1] == 0 and 0 <= p[0] <= 1


def on_hypotenuse(p: Pt) -> bool:
    return p[0] + p[1] == 1 and 0 <= p[0] <= 1


@dataclass
class TriangleFilling:
    segments: list[tuple[Pt, Pt, str]]  # endpoints and the tripod leg the segment copies
    marks: dict[str, Pt]
    tiles: list[tuple[Pt, Pt, Pt]]
    copies: int
    invariant_ok: bool


def _initial(legs) -> tuple[list[tuple[Pt, Pt, str]], dict[str, Pt]]:
    """A tripod with Z_α on x = 0, Z_γ on y = 0 symmetric to it, and Z_β on the hypotenuse.

    Only which legs are present matters for the picture; lengths are not to scale.
    The β and γ legs must be positive: a foot sitting at the center cannot be
    trimmed off the boundary, and later mirrors would glue extra points.
    """
    lengths = dict(zip(MARKS, as_tripod(legs)))
    if lengths["β"] == 0 or lengths["γ"] == 0:
        raise ValueError("the triangle layout needs positive β and γ legs")
    feet = {"α": (Fraction(0), HALF), "β": (HALF, HALF), "γ": (HALF, Fraction(0))}
    O = feet["α"] if lengths["α"] == 0 else (Fraction(1, 4), Fraction(1, 4))
    segs = [(O, feet[m], m) for m in MARKS if feet[m] != O]
    return segs, dict(feet)


def triangle_filling_layout(word: Sequence[int], legs=(1, 1, 1), trim: Fraction | float = HALF) -> TriangleFilling:
    """Unfold a tripod along ``word`` (letters 1, 2), keeping everything inside one right triangle.

    Each step mirrors the picture in the Z_α cathetus and shrinks the doubled
    triangle back. The foot Z_γ that loses its label has its edge scaled by
    ``trim``: 1 keeps it, 0 deletes it.
    """
    trim = Fraction(trim)
    segs, marks = _initial(legs)
    tiles = [TRIANGLE]
    ok = _feet_ok(marks)
    for i in word:
        if i not in (1, 2):
            raise ValueError(f"letters must be 1 or 2, got {i}")
        mirrored = [(_reflect(a), _reflect(b), m) for a, b, m in segs]
        mirror_marks = {m: _reflect(p) for m, p in marks.items()}
        lost = mirror_marks["γ"] if i == 1 else marks["γ"]
        new_marks = {
            "α": marks["β"],
            "γ": mirror_marks["β"],
            "β": marks["γ"] if i == 1 else mirror_marks["γ"],
        }
        segs = _trim(segs + mirrored, lost, trim)
        tiles = tiles + [tuple(_reflect(p) for p in t) for t in tiles]
        segs = [(_renormalize(a), _renormalize(b), m) for a, b, m in segs]
        tiles = [tuple(_renormalize(p) for p in t) for t in tiles]
        marks = {m: _renormalize(p) for m, p in new_marks.items()}
        ok = ok and _feet_ok(marks)
    return TriangleFilling(segs, marks, tiles, 2 ** len(word), ok)


def layout_tree(layout: TriangleFilling, legs=(1, 1, 1)) -> MarkedTree:
    """Read the drawing back as a metric tree, each segment weighted by the leg it copies."""
    length = dict(zip(MARKS, as_tripod(legs)))
    ids: dict[Pt, int] = {}
    adj: dict[int, dict[int, Fraction]] = {}
    for p in sorted({p for a, b, _ in layout.segments for p in (a, b)} | set(layout.marks.values())):
        ids[p] = len(ids)
        adj[ids[p]] = {}
    for a, b, m in layout.segments:
        adj[ids[a]][ids[b]] = adj[ids[b]][ids[a]] = length[m]
    return MarkedTree(adj, {m: ids[p] for m, p in layout.marks.items()}, {}, layout.copies)


def layout_matches_fiber_tree(word: Sequence[int], legs=(1, 1, 1)) -> bool:
    layout = triangle_filling_layout(word, legs)
    drawn = layout_tree(layout, legs)
    return layout.invariant_ok and drawn.is_tree() and drawn.canonical() == fiber_tree(legs, word).canonical()


def _trim(segs, point: Pt, factor: Fraction):
    touching = [k for k, (a, b, _) in enumerate(segs) if a == point or b == point]
    if len(touching) != 1 or factor == 1:
        return segs
    k = touching[0]
    a, b, m = segs[k]
    far = a if b == point else b
    if factor == 0:
        return segs[:k] + segs[k + 1 :]
    end = (far[0] + factor * (point[0] - far[0]), far[1] + factor * (point[1] - far[1]))
    return segs[:k] + [(far, end, m)] + segs[k + 1 :]


def _feet_ok(marks: dict[str, Pt]) -> bool:
    a, b, c = marks["α"], marks["β"], marks["γ"]
    return on_cathetus_x(a) and on_cathetus_y(c) and a == (c[1], c[0]) and on_hypotenuse(b)


def _triangle_svg(segs, tiles, marks, size: int = 600, show_tiles: bool = True) -> str:
    pad = 20
    scale = size - 2 * pad

    def tr(p):
        return (pad + float(p[0]) * scale, size - pad - float(p[1]) * scale)

    body = []
    if show_tiles:
        for t in tiles:
            pts = " ".join(f"{_f(x)},{_f(y)}" for x, y in map(tr, t))
            body.append(f'<polygon points="{pts}" fill="none" stroke="#cccccc" stroke-width="0.5"/>')
    for a, b, _ in segs:
        (x1, y1), (x2, y2) = tr(a), tr(b)
        body.append(f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" stroke="black" stroke-width="1"/>')
    for m in MARKS:
        x, y = tr(marks[m])
        body.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="4" fill="{COLORS[m]}"/>')
        body.append(f'<text x="{_f(x + 5)}" y="{_f(y - 5)}" font-size="12" fill="{COLORS[m]}">Z{m}</text>')
    return _svg(size, size, body)


def triangle_filling(word: Sequence[int], trim: Fraction | float = HALF, legs=(1, 1, 1), size: int = 600) -> str:
    layout = triangle_filling_layout(word, legs, trim)
    if not layout.invariant_ok:
        raise AssertionError("marked feet left their sides of the triangle")
    return _triangle_svg(layout.segments, layout.tiles, layout.marks, size, show_tiles=len(word) <= 8)


def draw_Dn(n: int, size: int = 600) -> tuple[str, int]:
    """The tiling of 𝒟ₙ by copies of 𝒟, drawn in a fixed frame; returns the SVG and the tile count."""
    layout = triangle_filling_layout((1,) * n)
    return _tiles_svg(layout.tiles, size), len(layout.tiles)


def _tiles_svg(tiles, size: int) -> str:
    pad = 20
    scale = size - 2 * pad
    body = []
    for t in tiles:
        pts = " ".join(f"{_f(pad + float(x) * scale)},{_f(size - pad - float(y) * scale)}" for x, y in t)
        body.append(f'<polygon points="{pts}" fill="#f0f0ff" stroke="black" stroke-width="0.8"/>')
    return _svg(size, size, body)


# -- marked trees ---------------------------------------------------------------------
def tree_layout(T: MarkedTree) -> dict[int, tuple[float, float]]:
    """Equal-angle layout rooted at Z_α, edges drawn with their metric lengths."""
    root = T.marks["α"]
    leaves: dict[int, int] = {}

    def count(v, parent):
        kids = [w for w in sorted(T.adj[v]) if w != parent]
        leaves[v] = sum(count(w, v) for w in kids) if kids else 1
        return leaves[v]

    count(root, None)
    pos = {root: (0.0, 0.0)}

    def place(v, parent, lo, hi):
        kids = [w for w in sorted(T.adj[v]) if w != parent]
        total = sum(leaves[w] for w in kids) or 1
        a = lo
        for w in kids:
            b = a + (hi - lo) * leaves[w] / total
            mid = (a + b) / 2
            r = float(T.adj[v][w])
            pos[w] = (pos[v][0] + r * math.cos(mid), pos[v][1] + r * math.sin(mid))
            place(w, v, a, b)
            a = b

    place(root, None, 0.0, 2 * math.pi)
    return pos


def draw_marked_tree(T: MarkedTree, size: int = 600) -> str:
    pos = tree_layout(T)
    xs = [p[0] for p in pos.values()]
    ys = [p[1] for p in pos.values()]
    span = max(max(xs) - min(xs), max(ys) - min(ys), 1e-9)
    pad = 30

    def tr(p):
        return (pad + (p[0] - min(xs)) / span * (size - 2 * pad), size - pad - (p[1] - min(ys)) / span * (size - 2 * pad))

    body = []
    for a, b, _ in T.edges():
        (x1, y1), (x2, y2) = tr(pos[a]), tr(pos[b])
        body.append(f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" stroke="black" stroke-width="1.2"/>')
    for v in T.vertices:
        x, y = tr(pos[v])
        body.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="2" fill="black"/>')
    for k, m in enumerate(MARKS):
        x, y = tr(pos[T.marks[m]])
        body.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{5 + 2 * k}" fill="none" stroke="{COLORS[m]}" stroke-width="2"/>')
        body.append(f'<text x="{_f(x + 8)}" y="{_f(y - 8 - 12 * k)}" font-size="12" fill="{COLORS[m]}">Z{m}</text>')
    return _svg(size, size, body)
