import pytest

from img_lab.nucleus import (
    AUTOMATON_STATES,
    K0,
    MAXIMAL,
    ORDERS,
    PAIRWISE,
    SECTION_TABLE,
    TRIPLES,
    NucleusLab,
)


@pytest.fixture(scope="module")
def lab():
    return NucleusLab()


def test_nucleus_size(lab):
    assert len(lab.nucleus) == 288
    assert lab.inclusion_exclusion() == 288


def test_automaton_states_are_in_the_nucleus(lab):
    assert {lab.elem(g) for g in AUTOMATON_STATES} <= lab.nucleus


@pytest.mark.parametrize("v", sorted(ORDERS))
def test_maximal_subgroups(lab, v):
    G = lab.group((v,))
    assert G.order == ORDERS[v]
    assert lab.check_named((v,), MAXIMAL[v])


@pytest.mark.parametrize("key", sorted({**PAIRWISE, **TRIPLES}))
def test_intersections(lab, key):
    table = {**PAIRWISE, **TRIPLES}
    assert lab.check_named(key, table[key])


def test_named_check_detects_wrong_generators(lab):
    assert not lab.check_named(("A", "B"), "γ")
    assert not lab.check_named(("A",), "β γ b")


def test_certificate(lab):
    cert = lab.verify_nucleus()
    assert cert.ok
    assert cert.size == 288
    assert cert.max_absorption_depth == 3
    data = cert.to_json()
    assert sum(data["absorption_depth_histogram"].values()) == 288 * 6
    # every element is needed
    assert "none" not in data["minimality_broken_by"]


def test_certificate_rejects_a_smaller_set(lab):
    smaller = frozenset(list(sorted(lab.nucleus))[:-1])
    assert not lab.verify_nucleus(smaller, minimality=False).ok


def test_section_table_rows(lab):
    res = lab.sections_table_check()
    assert len(res) == 18
    bad = {k for k, row in res.items() if not all(row)}
    assert bad == {"Γ_CA1", "Γ_CB1"}


def test_computed_sections_of_the_two_disputed_rows(lab):
    """⟨α, b⟩ and ⟨β, a⟩ have the sections read off the generators."""
    ca1 = lab.sections_of_group(("C", "A1"))
    assert ca1 == [lab.close(g).elements for g in ("aα", "aα", "c", "c")]
    cb1 = lab.sections_of_group(("C", "B1"))
    assert cb1 == [lab.close(g).elements for g in ("α", "γ", "α", "γ")]
    assert lab.group(("C", "A1")).elements == lab.close("α b").elements
    assert lab.group(("C", "B1")).elements == lab.close("β a").elements


def test_sections_stay_in_the_family(lab):
    fam = lab.stabilizer_families()
    for key in SECTION_TABLE:
        for S in lab.sections_of_group(key):
            assert S in fam


def test_T0(lab):
    T0 = lab.build_T0()
    assert T0["tetrahedra"] == ["ABCA1", "ABCB1", "ABCC1"]
    assert T0["common_face"] == "ABC"
    assert len(T0["triangles"]) == 9


def test_K0_faces(lab):
    faces = lab.K0_faces()
    assert set(faces) == set(K0)
    for g, face in K0.items():
        assert sorted(faces[g].split()) == sorted(face.split())
