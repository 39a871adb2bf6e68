import random
from fractions import Fraction as F

import numpy as np
import pytest

from img_lab import julia as j


@pytest.mark.parametrize(
    "text, value",
    [
        ("2", j.q(2)),
        ("1/2", j.q(F(1, 2))),
        ("2i", j.q(0, 2)),
        ("i", j.q(0, 1)),
        ("-i", j.q(0, -1)),
        ("1+2i", j.q(1, 2)),
        ("-3/4-1/2i", j.q(F(-3, 4), F(-1, 2))),
        ("inf", j.INF),
        ("∞", j.INF),
    ],
)
def test_parse_point(text, value):
    assert j.parse_point(text) == value


def test_base_map_special_values():
    assert j.base_map(j.q(2)) == j.q(0)
    assert j.base_map(j.q(0)) == j.INF
    assert j.base_map(j.INF) == j.q(1)
    assert j.base_map(j.q(1)) == j.q(1)
    assert j.base_map(j.q(0, 1)) == j.q(-3, 4)


def test_base_map_agrees_with_floats():
    rng = random.Random(0)
    for _ in range(100):
        w = j._random_q(rng)
        if w == j.q(0):
            continue
        got = j.base_map(w)
        c = complex(float(w.re), float(w.im))
        want = (1 - 2 / c) ** 2
        assert complex(float(got.re), float(got.im)) == pytest.approx(want)


def test_gaussian_sqrt():
    rng = random.Random(1)
    for _ in range(100):
        r = j._random_q(rng)
        s = j.gaussian_sqrt(j._mul(r, r))
        assert s is not None and j._mul(s, s) == j._mul(r, r)
    assert j.gaussian_sqrt(j.q(2)) is None
    assert j.gaussian_sqrt(j.q(0, 2)) == j.q(1, 1)
    assert j.gaussian_sqrt(j.q(0)) == j.q(0)


def test_preimages_map_back():
    rng = random.Random(2)
    for _ in range(50):
        v = j._random_q(rng)
        if v == j.q(0):
            continue
        w = j.base_map(v)
        pre = j.base_preimages(w)
        assert v in pre
        assert all(j.base_map(x) == w for x in pre)


def test_backward_orbit_of_1():
    # 1 ← {1, ∞}, ∞ ← 0, 0 ← 2, and √2 is irrational
    assert [str(x) for x in j.backward_orbit_of_1()] == ["1", "∞", "0", "2"]


def test_forward_orbits():
    assert j.base_orbit(j.q(2))["orbit"] == ["2", "0", "∞", "1"]
    assert j.base_orbit(j.INF)["hits_1"]
    assert j.base_orbit(j.q(5), max_iter=30)["status"] == "height exceeds bound"
    assert j.base_orbit(j.q(-1), max_iter=3)["status"] in ("budget exhausted", "height exceeds bound")


def test_preperiodic_decision():
    for w in ("1", "inf", "0", "2"):
        assert j.base_preperiodic_to_1(w)
    for w in ("5", "2i", "1/2", "-1"):
        assert not j.base_preperiodic_to_1(w)


@pytest.mark.parametrize("w0", ["1", "inf", "0", "2"])
def test_tripod_cross_check(w0):
    res = j.tripod_cross_check(w0)
    assert res["comparable"] and res["ok"], res


def test_cross_check_outside_the_table():
    res = j.tripod_cross_check("2i")
    assert res == {"w0": "2i", "base": False, "comparable": False}


def test_line_images():
    """Images of each line, worked out by substituting into f by hand."""
    assert j.line_images(20) == {
        "w=2z": ["z=0"],
        "z=0": ["z=u"],
        "z=u": ["z=w"],
        "z=w": ["z=u"],
        "w=0": ["u=0"],
        "w=u": ["w=u"],
        "u=0": ["w=u"],
    }
    assert all(j.postcritical_checks(20).values())


def test_step_f_is_homogeneous():
    p = (0.3 + 0.1j, 1.2, 1)
    a = j.step_f(p)
    b = j.step_f(tuple(3j * c for c in p))
    ratio = [x / y for x, y in zip(a, b) if abs(y) > 1e-12]
    assert all(r == pytest.approx(ratio[0]) for r in ratio)
    with pytest.raises(ValueError):
        j.step_f((0, 0, 0))


def test_escape():
    assert j.escapes(1e8, 1)
    assert not j.escapes(0.5, 1)
    assert j.escapes(0.5 + 0.5j, 1)


def test_slice_grid_and_sampling():
    spec = j.SliceSample(1, complex(0.5, 0), 1.0, 8, N=50)
    g = spec.grid()
    assert g[-1, 0] == complex(-0.5, -1.0)
    assert g[0, -1] == complex(-0.5 + 7 * 0.25, -1.0 + 7 * 0.25)
    times = j.sample_slice(spec)
    assert times.shape == (8, 8)
    # the pixel at the real point 0.5 never escapes
    assert g[3, 4] == complex(0.5, 0)
    assert times[3, 4] == -1
    assert times[0, 0] >= 0


def test_segment_slice():
    res = j.segment_slice_check(100, 300)
    assert res["ok"], res


def test_ppm_round_trip(tmp_path):
    times = np.array([[-1, 0, 3], [10, 1, -1]])
    data = j.to_ppm(times, tmp_path / "a.ppm")
    assert (tmp_path / "a.ppm").read_bytes() == data
    img = j.read_ppm(data)
    assert img.shape == (2, 3, 3)
    assert img[0, 0, 0] == 0 and img[1, 2, 1] == 0
    assert img[0, 1, 0] == 255
    assert img[1, 0, 0] == 0 and img[0, 2, 0] > img[1, 0, 0]
    with pytest.raises(ValueError):
        j.read_ppm(b"P3\n1 1\n255\n\x00\x00\x00")
