"""Defining relations of Γ, checked with the exact word problem."""

from __future__ import annotations

from .fixtures import gamma
from .wreath import WreathRecursion

# (label, word) pairs that must be trivial
INVOLUTIONS = tuple((f"{g}^2 = ε", g + g) for g in ("α", "β", "γ", "a", "b", "c"))

# x^y = y x y; every generator is an involution so the direction does not matter
CONJUGATIONS = (
    ("α^a = α", "aαa", "α"),
    ("α^b = α", "bαb", "α"),
    ("α^c = α", "cαc", "α"),
    ("β^a = β", "aβa", "β"),
    ("β^b = β", "bβb", "β"),
    ("β^c = β^γ", "cβc", "γβγ"),
    ("γ^a = γ^α", "aγa", "αγα"),
    ("γ^b = γ^β", "bγb", "βγβ"),
    ("γ^c = γ", "cγc", "γ"),
)

POWERS = (
    ("(αγ)^4 = ε", "αγ" * 4),
    ("(αβ)^8 = ε", "αβ" * 8),
    ("(βγ)^8 = ε", "βγ" * 8),
    ("(acγ)^2 = ε", "acγ" * 2),
    ("(aαbβ)^4 = ε", "aαbβ" * 4),
)

ORDERS = (("ab", 8), ("ac", 4), ("bc", 4), ("acγ", 2), ("aαbβ", 4))


def check_relations(rec: WreathRecursion, trivial=(), equal=(), orders=()) -> dict[str, bool]:
    """Each trivial word, equal pair and claimed order, decided exactly."""
    out: dict[str, bool] = {}
    for label, w in trivial:
        out[label] = rec.is_trivial(w)
    for label, u, v in equal:
        out[label] = rec.are_equal(u, v)
    for w, k in orders:
        out[f"order of {w} = {k}"] = rec.order_of(w) == k
    return out


def gamma_relations(rec: WreathRecursion | None = None) -> dict[str, bool]:
    rec = rec or gamma()
    return check_relations(rec, INVOLUTIONS + POWERS, CONJUGATIONS, ORDERS)


# Γ̂ = ⟨a, b, c | a² = b² = c² = (ac)² = (ab)⁴ = (bc)⁴ = ε⟩
GAMMA_HAT = (
    ("a^2 = ε", "aa"),
    ("b^2 = ε", "bb"),
    ("c^2 = ε", "cc"),
    ("(ac)^2 = ε", "acac"),
    ("(ab)^4 = ε", "ab" * 4),
    ("(bc)^4 = ε", "bc" * 4),
)
GAMMA_HAT_ORDERS = (("ab", 4), ("ac", 2), ("bc", 4))


def _wreath_relations(name: str):
    from .heisenberg import WREATH_RELATIONS

    return tuple((f"{w.replace(' ', '')} = ε", w.replace(" ", "")) for w in WREATH_RELATIONS[name])


def relation_set(group: str) -> tuple[tuple, tuple, tuple]:
    """(trivial words, equal pairs, orders) stored for a fixture; empty when none are known."""
    if group == "gamma":
        return INVOLUTIONS + POWERS, CONJUGATIONS, ORDERS
    if group == "gamma-hat":
        return GAMMA_HAT, (), GAMMA_HAT_ORDERS
    if group in ("rays", "heisenberg"):
        return _wreath_relations(group), (), ()
    return (), (), ()
