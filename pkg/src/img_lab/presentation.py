"""The fundamental group F₃ ⋊ F₂ and the wreath recursion read off its virtual endomorphism.

Elements are normal forms ``(w, u)`` with ``w`` a reduced word in α, β, γ and
``u`` a reduced word in s, t; the product is
``(w1, u1)(w2, u2) = (w1 · u1 w2 u1^-1, u1 u2)``, where s and t act on
⟨α, β, γ⟩ by the braid-type conjugation rules below.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .fixtures import img_f
from .wreath import Perm, Rule, WreathRecursion
from .words import Word, WordParser, format_word, free_reduce, inverse

FIBER = ("α", "β", "γ")
BASE = ("s", "t")

_P3 = WordParser(FIBER)
_P5 = WordParser(FIBER + BASE)


def _w(text: str) -> Word:
    return free_reduce(_P3.parse(text))


# u x u^-1 for u in {s, t} and x in {α, β, γ}
CONJUGATION = {
    "s": {"α": _w("αγαγ^-1α^-1"), "β": _w("β"), "γ": _w("αγα^-1")},
    "t": {"α": _w("α"), "β": _w("γβγ^-1"), "γ": _w("γβγβ^-1γ^-1")},
}
# u^-1 x u, obtained by solving the rules above:
#   s: with c' = αγα^-1 the α-rule reads c' α c'^-1, so α = c'^-1 (sαs^-1) c'
#   t: with b' = γβγ^-1 the γ-rule reads b' γ b'^-1, so γ = b'^-1 (tγt^-1) b'
INVERSE_CONJUGATION = {
    "s": {"α": _w("γ^-1αγ"), "β": _w("β"), "γ": _w("γ^-1α^-1γαγ")},
    "t": {"α": _w("α"), "β": _w("β^-1γ^-1βγβ"), "γ": _w("β^-1γβ")},
}


def automorphism(letter: tuple[str, int]) -> dict[str, Word]:
    g, e = letter
    return CONJUGATION[g] if e == 1 else INVERSE_CONJUGATION[g]


def substitute(images: dict[str, Word], w: Word) -> Word:
    out: list[tuple[str, int]] = []
    for x, e in w:
        out.extend(images[x] if e == 1 else inverse(images[x]))
    return free_reduce(out)


def act(u: Word, w: Word) -> Word:
    """``u w u^-1`` as a word in α, β, γ."""
    for letter in reversed(u):
        w = substitute(automorphism(letter), w)
    return w


@dataclass(frozen=True)
class Pi1:
    w: Word = ()
    u: Word = ()

    def __mul__(self, other: "Pi1") -> "Pi1":
        return Pi1(free_reduce(self.w + act(self.u, other.w)), free_reduce(self.u + other.u))

    def inv(self) -> "Pi1":
        u_inv = inverse(self.u)
        return Pi1(act(u_inv, inverse(self.w)), u_inv)

    def conj(self, other: "Pi1") -> "Pi1":
        """``self · other · self^-1``."""
        return self * other * self.inv()

    def word(self) -> Word:
        return self.w + self.u

    def __str__(self) -> str:
        return format_word(self.word())


IDENTITY = Pi1()


def pi1(text: str | Word) -> Pi1:
    """Evaluate a word in α, β, γ, s, t."""
    word = _P5.parse(text) if isinstance(text, str) else text
    out = IDENTITY
    for g, e in word:
        if g in FIBER:
            out = out * Pi1(((g, e),), ())
        else:
            out = out * Pi1((), ((g, e),))
    return out


def exponent(word: Word, g: str) -> int:
    return sum(e for h, e in word if h == g)


# -- cosets of the domain ---------------------------------------------------
TRANSVERSAL = ("ε", "α", "s", "αs")


def coset_of(g: Pi1) -> int:
    """Index in the transversal (ε, α, s, αs) of the left coset g·G₁."""
    a = exponent(g.w, "α") % 2
    s = exponent(g.u, "s") % 2
    return {(0, 0): 0, (1, 0): 1, (0, 1): 2, (1, 1): 3}[(a, s)]


def in_domain(g: Pi1) -> bool:
    return coset_of(g) == 0


# -- the virtual endomorphism ------------------------------------------------
R_TEXT = "βαβ^-1γβt^-1s^-1"

# values on the free generators of the domain, indexed by (coset rep, letter)
FIBER_VALUES = {
    ("", "α"): None,  # ε·α·α^-1 is trivial
    ("α", "α"): "ε",  # α²
    ("", "β"): "α",
    ("α", "β"): "γ",  # αβα^-1
    ("", "γ"): "β",
    ("α", "γ"): "ε",  # αγα^-1
}
BASE_VALUES = {
    ("", "s"): None,
    ("s", "s"): "ε",  # s²
    ("", "t"): R_TEXT,  # t
    ("s", "t"): "t",  # sts^-1
}


def _schreier(word: Word, mover: str, values: dict) -> Pi1:
    """Rewrite a word of the index-two subgroup over its Schreier generators and map them."""
    coset = ""
    out = IDENTITY
    for g, e in word:
        if e == 1:
            gen = (coset, g)
            if g == mover:
                coset = "" if coset else mover
        else:
            if g == mover:
                coset = "" if coset else mover
            gen = (coset, g)
        val = values[gen]
        if val is None:
            continue
        img = pi1(val)
        out = out * (img if e == 1 else img.inv())
    if coset:
        raise ValueError("word is not in the domain")
    return out


def phi(g: Pi1) -> Pi1:
    """The virtual endomorphism on its index-four domain."""
    if not in_domain(g):
        raise ValueError(f"{g} is not in the domain (coset {TRANSVERSAL[coset_of(g)]})")
    return _schreier(g.w, "α", FIBER_VALUES) * _schreier(g.u, "s", BASE_VALUES)


def identify_by_action(candidate: Pi1, targets: dict[str, str]) -> bool:
    """Whether ``candidate x candidate^-1`` equals the wanted word for every x."""
    return all(candidate.conj(pi1(x)) == pi1(want) for x, want in targets.items())


# -- synthesis ---------------------------------------------------------------
def synthesize(generator: str | Pi1) -> tuple[Perm, tuple[Pi1, ...]]:
    """Root permutation and sections: σ(xᵢ) = xⱼ iff g rᵢ ∈ rⱼ G₁, section φ(rⱼ^-1 g rᵢ)."""
    g = pi1(generator) if isinstance(generator, str) else generator
    reps = [pi1(r) for r in TRANSVERSAL]
    perm, sections = [], []
    for r in reps:
        gr = g * r
        j = coset_of(gr)
        perm.append(j)
        sections.append(phi(reps[j].inv() * gr))
    return tuple(perm), tuple(sections)


def synthesize_recursion() -> WreathRecursion:
    rules = {}
    for g in FIBER + BASE:
        p, secs = synthesize(g)
        rules[g] = Rule(p, tuple(s.word() for s in secs))
    return WreathRecursion("img-f-synthesized", ("1", "2", "3", "4"), rules)


@lru_cache(maxsize=None)
def expected_tuples() -> dict[str, tuple[Perm, tuple[Pi1, ...]]]:
    """The fixture recursion read as π₁ normal forms."""
    rec = img_f()
    return {
        g: (rec.rules[g].perm, tuple(pi1(w) for w in rec.rules[g].sections))
        for g in rec.generators
    }


def derivation_diff() -> list[dict]:
    """Entry-wise comparison of the synthesized recursion with the fixture."""
    rows = []
    exp = expected_tuples()
    for g in FIBER + BASE:
        p, secs = synthesize(g)
        ep, esecs = exp[g]
        rows.append(
            {
                "generator": g,
                "perm": list(p),
                "expected_perm": list(ep),
                "sections": [str(s) for s in secs],
                "expected_sections": [str(s) for s in esecs],
                "match": p == ep and secs == esecs,
            }
        )
    return rows
