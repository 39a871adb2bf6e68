import itertools
import random
from fractions import Fraction as F

import pytest

from img_lab import tripod as tp


def test_fold_values():
    assert tp.fold((3, 1, 5)) == (2, 6, 1)
    assert tp.fold_half((3, 1, 5)) == (1, 3, 1)
    assert tp.fold((F(1, 2), F(1, 2), 0)) == (F(1, 2), 0, F(1, 2))


def test_mass_is_conserved():
    assert tp.mass_conservation_check(2000, seed=4)


def test_normalized_fold_is_the_normalized_half_fold():
    rng = random.Random(0)
    for _ in range(200):
        p = tp.random_simplex_point(rng, 1000)
        assert tp.fold_normalized(p) == tp.normalize(tp.fold_half(p))


def test_unfold_branches_are_sections():
    res = tp.section_check(200, seed=1)
    assert all(res.values()), res
    with pytest.raises(ValueError):
        tp.unfold_branch(3, (1, 0, 0))


def test_symbol_ties():
    t = (F(1, 3), F(1, 3), F(1, 3))
    assert tp.symbol(t, tp.STRICT) == 2
    assert tp.symbol(t, tp.WEAK) == 1
    with pytest.raises(ValueError):
        tp.symbol(t, "round")
    assert tp.itinerary_conventions_agree(300)


def test_as_tripod_rejects_bad_legs():
    for bad in ((0, 0, 0), (1, -1, 1), (1, 1)):
        with pytest.raises(ValueError):
            tp.as_tripod(bad)


def test_two_step_mass():
    res = tp.two_step_check(500, seed=2)
    assert all(res.values()), res


@pytest.mark.parametrize("u", [u for n in range(5) for u in itertools.product((1, 2), repeat=n)])
def test_fiber_tree_folds_back_to_its_base(u):
    """The Hubbard tripod of the unfolded tree folds back to the base with the reversed itinerary."""
    legs = (F(2, 7), F(3, 7), F(2, 7))
    T = tp.fiber_tree(legs, u)
    assert T.is_tree()
    assert T.copies == 2 ** len(u)
    assert T.total_length() == 2 ** len(u) * tp.mass(legs)
    h = T.hubbard_legs()
    assert tp.iterate(tp.fold_half, h, len(u)) == legs
    assert tp.itinerary(h, len(u), tp.WEAK, tp.fold_half) == tuple(reversed(u))


def test_a_specific_fiber():
    T = tp.fiber_tree((1, 1, 1), (1, 2, 1))
    assert T.hubbard_legs() == (3, 1, 9)
    assert T.degree_histogram() == {1: 10, 2: 7, 3: 8}
    assert T.to_json()["copies"] == 8


def test_unfold_needs_distinct_marks():
    with pytest.raises(ValueError):
        tp.unfold_tree(1, tp.MarkedTree({0: {}}, {"α": 0, "β": 0, "γ": 0}, {0: 0}, 1))
    with pytest.raises(ValueError):
        tp.unfold_tree(3, tp.tripod_tree((1, 1, 1)))


def test_fiber_tree_by_itinerary_is_a_fiber():
    rng = random.Random(5)
    for _ in range(30):
        t = tp.random_tripod(rng, 50)
        T = tp.fiber_tree_by_itinerary(t, 4)
        assert T.is_tree()
        assert T.copies == 16


def test_grown_trees_recover_the_tripod():
    res = tp.hausdorff_check(samples=30, max_n=10, tree_n=5)
    assert all(res.values()), res


def test_power_bound_is_exact():
    assert tp.below_power_bound(F(1, 2), 1, 1)
    assert not tp.below_power_bound(F(1, 2), 1, 3)
    assert tp.below_power_bound(F(1, 2), 1, 3, strict=False)


def test_code_triangles():
    assert tp.code_triangle(()) == [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    assert tp.code_triangle((1,)) == [(0, 0, 1), (F(1, 2), 0, F(1, 2)), (0, 1, 0)]
    # the two level-one triangles share the edge x = z
    a = set(tp.code_triangle((1,)))
    b = set(tp.code_triangle((2,)))
    assert a & b == {(F(1, 2), 0, F(1, 2)), (0, 1, 0)}


def test_ratio_bounds():
    res = tp.ratio_bounds_check(10)
    assert res["ok"], res["failures"]
    assert res["words_checked"] == 2**11 - 2
    assert not tp.ratio_bounds_hold((1, 1, 10))


def test_psi_conjugates_folds():
    res = tp.psi_check(samples=100, depth=30)
    assert res["max_residual"] < 1e-3
    assert res["itineraries_agree"]
    assert res["corner_error"] < 1e-2


def test_finite_tree_slices():
    assert tp.is_finite_tree_slice((1, 0, 0)) == (True, 0, "reached (1, 0, 0)")
    assert tp.is_finite_tree_slice((1, 1, 0))[:2] == (True, 4)
    verdict, _, reason = tp.is_finite_tree_slice((1, 1, 1))
    assert verdict is False
    assert "cycle of length 2" in reason


def test_tent_map():
    res = tp.tent_map_check(32)
    assert res["ok"] and res["segment"]
