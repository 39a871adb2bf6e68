from fractions import Fraction as F

import pytest

from img_lab import complex as cx
from img_lab.nucleus import ORDERS


@pytest.fixture(scope="module")
def T1():
    return cx.build_T(1)


def test_word_codes_round_trip():
    for n in range(4):
        for code in range(4**n):
            v = cx.code_word(code, n)
            assert cx.word_code(v) == code
            assert cx.parse_word(cx.word_str(v)) == v
    assert cx.word_str((0, 2, 1)) == "132"


def test_simplex_names():
    s = cx.simplex("A1BC")
    assert s == frozenset({"A1", "B", "C"})
    assert cx.simplex_name(s) == "A1BC"
    assert len(cx.faces(s)) == 7


def test_expand_pieces():
    got = cx.expand_pieces("C1CA⊗1 ∪ A1AB⊗{3,4}")
    words = {w for _, w in got}
    assert words == {(0,), (2,), (3,)}
    assert (cx.simplex("C1"), (0,)) in got


def test_T1_reference_data(T1):
    res = cx.T1_checks(T1)
    assert len(res) == 13
    assert all(res.values()), [k for k, v in res.items() if not v]


def test_K_matches_detects_a_wrong_set(T1):
    assert cx.K_matches(T1, "a", "C1CA⊗1")
    assert not cx.K_matches(T1, "a", "C1CA⊗2")
    assert not cx.K_matches(T1, "b", "A1AB⊗{3,4}")


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_recursive_pasting_agrees_with_quotient(n):
    res = cx.pasting_checks(n)
    assert all(res.values()), [k for k, v in res.items() if not v]


@pytest.mark.parametrize("v", sorted(ORDERS))
def test_vertex_stabilizers(v):
    S, name = cx.stabilizer_of_point(v, ())
    assert name == f"Γ_{v}"
    assert len(S) == ORDERS[v]


def test_center_has_trivial_stabilizer():
    S, name = cx.stabilizer_of_point("ABC", ())
    assert S == {()}
    assert name == "{ε}"


def test_affine_maps():
    assert cx.affine_matches_table()
    assert cx.copies_land_in_tetrahedra()
    assert sorted(cx.degenerate_copies()) == sorted((cx.simplex_name(t), x + 1) for t, x in cx.COLLAPSED)


def test_point_validation():
    with pytest.raises(ValueError):
        cx.point({"A": 1, "B": 1, "C": 1})
    with pytest.raises(ValueError):
        cx.point({"A1": F(1, 2), "B1": F(1, 2)})
    with pytest.raises(ValueError):
        cx.I_point((cx.point({"A": 1})[0], ()))


def test_I_is_well_defined():
    for n in range(2):
        res = cx.I_well_defined(n)
        assert res["ok"], res["failures"]
        assert res["pairs_checked"] > 0


def test_theta_is_a_section(T1):
    res = cx.theta_checks(cx.sample_points(3, extra=40), T1, n=1)
    assert all(res.values()), [k for k, v in res.items() if not v]


def test_theta_on_a_barycenter(T1):
    w = {"A": F(1, 3), "B": F(1, 3), "C": F(1, 3)}
    q = cx.theta(w, T1)
    assert len(q[1]) == 1
    assert cx.I_point(q) == (cx.point(w)[0], ())


@pytest.mark.parametrize("n", [0, 1, 2])
def test_M_is_a_sphere_up_to_homology(n):
    M = cx.build_M(n)
    assert M.euler() == 2
    assert M.f_vector() == cx.quotient_M(n).f_vector()


def test_M_f_vectors():
    assert cx.quotient_M(0).f_vector() == (6, 12, 14, 6)
    assert cx.quotient_M(1).f_vector() == (12, 38, 52, 24)


@pytest.mark.parametrize("f", [cx.covering_p, cx.iota], ids=["p", "iota"])
def test_maps_on_M_are_well_defined(f):
    for n in range(2):
        res = cx.map_well_defined_M(f, n)
        assert res["ok"], res["failures"]


def test_covering_degree_on_top_cells():
    """Every tetrahedron of ℳ₁ has exactly four preimages in ℳ₂."""
    counts = cx.preimage_counts(1)
    assert set(counts[3]) == {4}


def test_covering_p_requires_a_letter():
    with pytest.raises(ValueError):
        cx.covering_p(((), (), 0))
    assert cx.covering_p(((), (0, 3), 0)) == ((), (0,), 1)
    assert cx.covering_p(((), (0, 1), 1)) == ((), (0,), 1)


@pytest.mark.parametrize("n", [0, 1, 2])
def test_fibers_are_unfolded_tripods(n):
    res = cx.fiber_isomorphism_check(n)
    assert res["ok"], res["failures"]
    assert res["checked"] == 3 * 2 ** (n + 1)


def test_fiber_needs_an_interior_point():
    M = cx.quotient_M(0)
    with pytest.raises(ValueError):
        cx.rho_fiber((F(0), F(1, 2)), (), 0, M)


def test_contraction():
    rep = cx.contraction_report(8)
    assert rep["U_products_are_similarities"]
    assert rep["block_triangular"]
    assert rep["V_pairs_within_bound"]
    assert rep["max_V_pair_norm"] == pytest.approx(2**-0.5)
    assert rep["contracting"]
    norms = [lv["max_norm"] for lv in rep["levels"]]
    assert norms[-1] < norms[0]
