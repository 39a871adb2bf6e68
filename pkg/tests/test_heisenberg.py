import random

import pytest

from img_lab import heisenberg as hz


def matrix(p):
    """(x, y, z) as the upper unitriangular matrix [[1, x, z], [0, 1, y], [0, 0, 1]]."""
    return ((1, p.x, p.z), (0, 1, p.y), (0, 0, 1))


def matmul(a, b):
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3)) for i in range(3))


@pytest.fixture
def rng():
    return random.Random(7)


def test_product_matches_unitriangular_matrices(rng):
    for _ in range(200):
        p, q = hz.random_point(rng), hz.random_point(rng)
        assert matrix(hz.h_mul(p, q)) == matmul(matrix(p), matrix(q))
        assert hz.h_mul(p, hz.h_inv(p)) == hz.ONE
        assert p * q == hz.h_mul(p, q)


def test_powers(rng):
    for _ in range(50):
        p = hz.random_point(rng)
        for n in range(-4, 5):
            expected = hz.ONE
            for _ in range(abs(n)):
                expected = hz.h_mul(expected, p if n > 0 else hz.h_inv(p))
            assert hz.h_pow(p, n) == expected


def test_commutator_of_the_generators():
    assert hz.h_commutator(hz.PHI_X, hz.PHI_Y) == hz.h(0, 0, 1)
    assert hz.h_pow(hz.PHI_TAU, 4) == hz.h(0, 0, 1)


def test_inverse_actions(rng):
    for _ in range(100):
        p = hz.random_point(rng)
        assert hz.act(hz.act(p, "s"), "s") == p
        assert hz.act(hz.act(p, "t"), ("t", -1)) == p
        assert hz.act(hz.act(p, "τ"), ("τ", -1)) == p


def test_ray_word_expansion():
    assert hz.ray_word("X") == hz.ray_word("tts")
    assert hz.ray_word("Y^-1") == hz.ray_word("t^-1s^-1t^-1")
    with pytest.raises(ValueError):
        hz.ray_word("Z")


def test_relations_hold():
    res = hz.relation_checks(samples=100)
    assert all(res.values()), [k for k, v in res.items() if not v]


def test_automorphism():
    res = hz.automorphism_checks(300, seed=3)
    assert all(res.values()), res
    assert hz.phi_auto(hz.h(0, 0, 2)) == hz.h(0, 0, 1)


def test_conjugation_identities():
    for name, res in hz.verify_conjugation_identities(300, seed=1).items():
        assert not res["failures"], name


def test_wrong_section_is_detected():
    bad = [p for p in (hz.random_point(random.Random(2)) for _ in range(20))
           if hz.phi_auto(hz.act_word(p, "t")) != hz.act_word(hz.phi_auto(p), "st^-1")]
    assert bad


def test_lattice():
    res = hz.lattice_check(max_len=3, samples=100)
    assert all(res.values()), res
    assert hz.lattice_word(hz.h(2, 3, 10)) == (2, 3, 4)
    with pytest.raises(ValueError):
        hz.lattice_word(hz.PHI_TAU)


def test_relations_in_the_tree_action():
    res = hz.cross_check_with_wreath()
    assert len(res) == 9
    assert all(res.values()), res


def test_verify_all():
    res = hz.verify_all(samples=200)
    assert len(res) == 30
    assert all(res.values())
