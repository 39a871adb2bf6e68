import itertools
import xml.etree.ElementTree as ET
from fractions import Fraction as F

import networkx as nx
import pytest

from img_lab import fixtures, render
from img_lab.tripod import fiber_tree

SVG = "{http://www.w3.org/2000/svg}"


def parse(svg):
    root = ET.fromstring(svg)
    assert root.tag == SVG + "svg"
    return root


def expected_edge_count(rec, n):
    words = list(itertools.product(range(rec.degree), repeat=n))
    total = 0
    for g in rec.generators:
        if g in rec.involutions:
            total += len({frozenset((v, rec.apply(g, v))) for v in words})
        else:
            total += len(words)
    return total


@pytest.mark.parametrize("name", ["gamma-hat", "gamma", "heisenberg-binary"])
@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_schreier_graph_counts(name, n):
    rec = fixtures.get(name)
    G = render.schreier_graph(rec, n)
    assert len(G.vertices) == rec.degree**n
    assert len(G.edges) == expected_edge_count(rec, n)
    for g, a, b in G.edges:
        assert rec.apply_str(g, "" if a == "ε" else a) == ("" if b == "ε" else b)


def test_gamma_hat_counts():
    rec = fixtures.gamma_hat()
    G = render.schreier_graph(rec, 3)
    assert (len(G.vertices), len(G.edges)) == (8, 16)
    assert len(render.schreier_graph(rec, 0).loops()) == 3


def test_schreier_graphs_are_connected():
    rec = fixtures.gamma_hat()
    for n in range(1, 7):
        G = render.schreier_graph(rec, n)
        H = nx.MultiGraph()
        H.add_nodes_from(G.vertices)
        H.add_edges_from((a, b) for _, a, b in G.edges)
        assert nx.is_connected(H)


@pytest.mark.parametrize("layout", ["spring", "circle", "triangle"])
def test_graph_svg_is_well_formed_and_deterministic(layout):
    G = render.schreier_graph(fixtures.gamma_hat(), 4)
    a = render.graph_to_svg(G, layout, seed=3)
    b = render.graph_to_svg(render.schreier_graph(fixtures.gamma_hat(), 4), layout, seed=3)
    assert a == b
    root = parse(a)
    assert len(root.findall(SVG + "line")) + len(root.findall(SVG + "circle")) >= len(G.edges)


def test_triangle_layout_places_words_in_distinct_tiles():
    G = render.schreier_graph(fixtures.gamma_hat(), 5)
    pos = render.triangle_layout(G, ("1", "2"))
    assert len(set(pos.values())) == len(G.vertices)
    assert all(x > 0 and y > 0 and x + y < 1 for x, y in pos.values())
    with pytest.raises(ValueError):
        render.triangle_layout(render.schreier_graph(fixtures.gamma(), 1), ("1", "2", "3", "4"))


def test_similarity_maps_the_doubled_triangle_back():
    R, P, Q = render.TRIANGLE
    # the doubled triangle has its right angle at Q and acute corners P and the mirror of P
    assert render._renormalize(Q) == R
    assert render._renormalize(P) == Q
    assert render._renormalize(render._reflect(P)) == P


@pytest.mark.parametrize("word", [u for n in range(6) for u in itertools.product((1, 2), repeat=n)])
def test_layout_draws_the_fiber_tree(word):
    assert render.layout_matches_fiber_tree(word)


@pytest.mark.parametrize("legs", [(F(1, 5), F(1, 2), F(3, 10)), (0, 1, 1), (2, 1, 3)])
def test_layout_with_other_legs(legs):
    for word in itertools.product((1, 2), repeat=4):
        assert render.layout_matches_fiber_tree(word, legs)


def test_layout_marks_stay_on_their_sides():
    for word in itertools.product((1, 2), repeat=6):
        lay = render.triangle_filling_layout(word)
        assert lay.invariant_ok
        assert render.on_cathetus_x(lay.marks["α"])
        assert render.on_cathetus_y(lay.marks["γ"])
        assert render.on_hypotenuse(lay.marks["β"])


def test_degenerate_legs_are_rejected():
    for legs in ((1, 0, 1), (1, 1, 0)):
        with pytest.raises(ValueError):
            render.triangle_filling_layout((1,), legs)
    with pytest.raises(ValueError):
        render.triangle_filling_layout((3,))


def test_untrimmed_layout_glues_extra_points():
    """Without trimming the orphaned feet, the drawing stops being the fiber tree."""
    bad = 0
    for word in itertools.product((1, 2), repeat=3):
        lay = render.triangle_filling_layout(word, trim=1)
        drawn = render.layout_tree(lay)
        if not drawn.is_tree() or drawn.canonical() != fiber_tree((1, 1, 1), word).canonical():
            bad += 1
    assert bad > 0


@pytest.mark.parametrize("n", range(7))
def test_Dn_tiling(n):
    svg, count = render.draw_Dn(n)
    assert count == 2**n
    assert len(parse(svg).findall(SVG + "polygon")) == 2**n
    tiles = render.triangle_filling_layout((1,) * n).tiles

    def area(t):
        (a, b), (c, d), (e, f) = t
        return abs((c - a) * (f - b) - (e - a) * (d - b)) / 2

    assert all(area(t) == F(1, 2 ** (n + 1)) for t in tiles)
    assert sum(area(t) for t in tiles) == F(1, 2)


def test_triangle_filling_svg(tmp_path):
    svg = render.triangle_filling((1, 2, 2, 1))
    parse(svg)
    render.save(svg, tmp_path / "fill.svg")
    assert (tmp_path / "fill.svg").read_text() == svg


def test_marked_tree_drawing():
    T = fiber_tree((1, 2, 1), (2, 1, 2))
    pos = render.tree_layout(T)
    assert set(pos) == set(T.vertices)
    for a, b, w in T.edges():
        (x1, y1), (x2, y2) = pos[a], pos[b]
        assert ((x1 - x2) ** 2 + (y1 - y2) ** 2) ** 0.5 == pytest.approx(float(w))
    root = parse(render.draw_marked_tree(T))
    assert len(root.findall(SVG + "line")) == len(T.edges())
