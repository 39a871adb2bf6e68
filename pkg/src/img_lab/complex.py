"""The complexes 𝒯ₙ and ℳₙ, the maps I, Θ, p between them, and the fibers over the triangle model.

A cell of 𝒯ₙ is a pair (σ, v): an open simplex σ of 𝒯₀ and a word v ∈ Xⁿ,
standing for σ ⊗ v. Words are stored as integers in base 4 with the first
letter most significant. Two cells σ ⊗ v and σ ⊗ h(v) are the same whenever
h ∈ Γ_σ and h|_v = ε. ℳₙ doubles every cell with a side δ ∈ {0, 1}, and
(σ, v, δ) is identified with (σ, h(v), δ + parity(h|_v)) for every h ∈ Γ_σ.

Points are ``(weights, word)`` where ``weights`` maps vertices of 𝒯₀ to
positive Fractions summing to one; the support of the weights is the open
simplex carrying the point.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .nucleus import AUTOMATON_STATES, K0, NucleusLab
from .wreath import abc_parity

# apexes first so that names read like A1BC, B1AC, C1AB
ORDER = ("A1", "B1", "C1", "A", "B", "C")
TETRAHEDRA = (("A1", "A", "B", "C"), ("B1", "A", "B", "C"), ("C1", "A", "B", "C"))

Simplex = frozenset
_TOKEN = re.compile(r"[ABC]1?")


def simplex(name: str | Iterable[str]) -> frozenset[str]:
    if isinstance(name, str):
        parts = _TOKEN.findall(name.replace(" ", ""))
        if "".join(parts) != name.replace(" ", ""):
            raise ValueError(f"cannot read simplex {name!r}")
        return frozenset(parts)
    return frozenset(name)


def simplex_name(s: Iterable[str]) -> str:
    s = set(s)
    return "".join(v for v in ORDER if v in s)


def faces(s: Iterable[str]) -> list[frozenset[str]]:
    s = sorted(s)
    return [frozenset(c) for r in range(1, len(s) + 1) for c in itertools.combinations(s, r)]


SIMPLICES: tuple[frozenset[str], ...] = tuple(
    sorted({f for t in TETRAHEDRA for f in faces(t)}, key=lambda f: (len(f), simplex_name(f)))
)


def word_code(v: Sequence[int]) -> int:
    code = 0
    for x in v:
        code = code * 4 + x
    return code


def code_word(code: int, n: int) -> tuple[int, ...]:
    out = []
    for _ in range(n):
        code, r = divmod(code, 4)
        out.append(r)
    return tuple(out[::-1])


def word_str(v: Sequence[int]) -> str:
    return "".join(str(x + 1) for x in v) or "ε"


def parse_word(text: str) -> tuple[int, ...]:
    text = text.strip()
    if text in ("", "ε"):
        return ()
    if not set(text) <= set("1234"):
        raise ValueError(f"word {text!r} is not over 1234")
    return tuple(int(c) - 1 for c in text)


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        p = self.parent
        root = a
        while p[root] != root:
            root = p[root]
        while p[a] != root:
            p[a], a = root, p[a]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # keep the smaller index as the root so roots are class minima
            if ra < rb:
                self.parent[rb] = ra
            else:
                self.parent[ra] = rb

    def reps(self) -> list[int]:
        return [self.find(a) for a in range(len(self.parent))]


# -- group tables ---------------------------------------------------------------
class GroupTables:
    """Integer tables for the nucleus: permutations, sections, parity, and level actions."""

    def __init__(self, lab: NucleusLab | None = None):
        self.lab = lab or NucleusLab()
        lab = self.lab
        self.elems = sorted(lab.nucleus)
        self.index = {g: i for i, g in enumerate(self.elems)}
        self.identity = self.index[lab.canon(())]
        self.perm = [lab.A.perm_of(g) for g in self.elems]
        self.sec = []
        for g in self.elems:
            row = []
            for x in range(4):
                s = lab.section(g, x)
                if s not in self.index:
                    raise ValueError(f"section of {lab.word_of(g)} at {x + 1} leaves the nucleus")
                row.append(self.index[s])
            self.sec.append(row)
        self.parity = [abc_parity(lab.A.to_word(g)) for g in self.elems]
        self.inv = [self.index[lab.canon(lab.A.inverse(g))] for g in self.elems]
        self.names = [lab.word_of(g) for g in self.elems]
        self.state = {name: self.index[lab.elem(name)] for name in AUTOMATON_STATES}
        self.state_name = {i: name for name, i in self.state.items()}
        self.vertex_group = {
            X: frozenset(self.index[g] for g in lab.group((X,)).elements) for X in ORDER
        }
        self.simplex_group = {
            s: frozenset.intersection(*(self.vertex_group[X] for X in s)) for s in SIMPLICES
        }
        self._images = {0: [[0] for _ in self.elems]}
        self._sections = {0: [[i] for i in range(len(self.elems))]}

    def name(self, i: int) -> str:
        return self.state_name.get(i) or self.names[i]

    def level(self, n: int) -> tuple[list[list[int]], list[list[int]]]:
        """``images[h][v]`` and ``sections[h][v]`` for all words v of length n."""
        if n not in self._images:
            prev_img, prev_sec = self.level(n - 1)
            size = 4 ** (n - 1)
            images, sections = [], []
            for h in range(len(self.elems)):
                img = [0] * (4 * size)
                sec = [0] * (4 * size)
                for x in range(4):
                    y = self.perm[h][x]
                    k = self.sec[h][x]
                    pi, ps = prev_img[k], prev_sec[k]
                    base, ybase = x * size, y * size
                    for r in range(size):
                        img[base + r] = ybase + pi[r]
                        sec[base + r] = ps[r]
                images.append(img)
                sections.append(sec)
            self._images[n], self._sections[n] = images, sections
        return self._images[n], self._sections[n]

    def act(self, h: int, v: Sequence[int]) -> tuple[tuple[int, ...], int]:
        out = []
        for x in v:
            out.append(self.perm[h][x])
            h = self.sec[h][x]
        return tuple(out), h

    def stabilizer(self, s: frozenset[str], v: Sequence[int]) -> frozenset[int]:
        """``{h|_v : h ∈ Γ_σ, h(v) = v}``, computed letter by letter."""
        S = self.simplex_group[s]
        for x in v:
            S = frozenset(self.sec[h][x] for h in S if self.perm[h][x] == x)
        return S

    @cached_property
    def families(self) -> dict[frozenset[int], str]:
        out = {}
        for els, name in self.lab.stabilizer_families().items():
            out[frozenset(self.index[g] for g in els)] = "{ε}" if len(els) == 1 else name
        return out

    def parity_is_homomorphism(self) -> bool:
        """Parity agrees on products that stay in the nucleus."""
        for i, g in enumerate(self.elems):
            for j, h in enumerate(self.elems):
                k = self.index.get(self.lab.mul(g, h))
                if k is not None and self.parity[k] != (self.parity[i] + self.parity[j]) % 2:
                    return False
        return True


_TABLES: GroupTables | None = None


def tables() -> GroupTables:
    global _TABLES
    if _TABLES is None:
        _TABLES = GroupTables()
    return _TABLES


# -- 𝒯ₙ ---------------------------------------------------------------------------
Cell = tuple[frozenset, int]


@dataclass
class TComplex:
    """𝒯ₙ: class representatives per simplex and the pasting data K_g, κ_g.

    ``rep[σ][v]`` is the least word code identified with v over σ.
    ``K[g]`` maps each cell (σ, rep) of K_{g,n} to κ_{g,n} of it.
    """

    n: int
    rep: dict[frozenset, list[int]]
    K: dict[int, dict[Cell, Cell]]
    T: GroupTables = field(repr=False, default=None)  # type: ignore[assignment]

    def same(self, s: frozenset, v: int, w: int) -> bool:
        return self.rep[s][v] == self.rep[s][w]

    def cells(self, dim: int | None = None) -> list[Cell]:
        out = []
        for s in SIMPLICES:
            if dim is None or len(s) - 1 == dim:
                out.extend((s, r) for r in sorted(set(self.rep[s])))
        return out

    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(self.cells(d)) for d in range(4))

    def euler(self) -> int:
        return sum((-1) ** d * c for d, c in enumerate(self.f_vector()))

    def K_named(self, g: str) -> dict[Cell, Cell]:
        return self.K.get(self.T.state[g], {})

    def K_cells(self, g: str) -> set[tuple[str, str]]:
        return {(simplex_name(s), word_str(code_word(r, self.n))) for s, r in self.K_named(g)}

    def gluing_list(self) -> list[tuple[str, str, str]]:
        """Maximal faces identified between different copies, as (face, word, word)."""
        rels = set()
        for s in SIMPLICES:
            classes: dict[int, list[int]] = {}
            for v, r in enumerate(self.rep[s]):
                classes.setdefault(r, []).append(v)
            for members in classes.values():
                for v, w in itertools.combinations(members, 2):
                    rels.add((s, v, w))
        maximal = [
            (s, v, w) for s, v, w in rels if not any(t > s and (t, v, w) in rels for t in SIMPLICES)
        ]
        return sorted(
            (simplex_name(s), word_str(code_word(v, self.n)), word_str(code_word(w, self.n)))
            for s, v, w in maximal
        )

    def to_json(self) -> dict:
        return {
            "level": self.n,
            "f_vector": list(self.f_vector()),
            "euler_characteristic": self.euler(),
            "tetrahedra": len(self.cells(3)),
            "gluing": [list(r) for r in self.gluing_list()] if self.n <= 2 else None,
            "K": {
                self.T.name(g): sorted(
                    f"{simplex_name(s)}⊗{word_str(code_word(r, self.n))}" for s, r in cells
                )
                for g, cells in sorted(self.K.items())
                if g in self.T.state_name
            }
            if self.n <= 2
            else None,
        }


def quotient_T(n: int, T: GroupTables | None = None) -> TComplex:
    """𝒯ₙ straight from the stabilizers: v ~ h(v) for h ∈ Γ_σ with h|_v = ε."""
    T = T or tables()
    images, sections = T.level(n)
    size = 4**n
    e = T.identity
    rep = {}
    for s in SIMPLICES:
        uf = UnionFind(size)
        for h in T.simplex_group[s]:
            img, sec = images[h], sections[h]
            for v in range(size):
                if sec[v] == e:
                    uf.union(v, img[v])
        rep[s] = uf.reps()
    K: dict[int, dict[Cell, Cell]] = {}
    for s in SIMPLICES:
        r = rep[s]
        for h in T.simplex_group[s]:
            img, sec = images[h], sections[h]
            for v in range(size):
                g = sec[v]
                if g == e:
                    continue
                cell, target = (s, r[v]), (s, r[img[v]])
                old = K.setdefault(g, {}).setdefault(cell, target)
                if old != target:
                    raise AssertionError(f"κ not well defined at {simplex_name(s)}⊗{v}")
    return TComplex(n, rep, K, T)


def _K0(T: GroupTables) -> dict[int, dict[Cell, Cell]]:
    K = {}
    for name, face in K0.items():
        K[T.state[name]] = {(s, 0): (s, 0) for s in faces(face.split())}
    return K


def build_T(n: int, T: GroupTables | None = None) -> TComplex:
    """𝒯ₙ by repeated pasting of 𝒯ₙ₋₁ ⊗ X along the sets K_g ⊗ x by κ_g.

    Only the states of the automaton are tracked, starting from the faces of
    𝒯₀ they fix.
    """
    T = T or tables()
    e = T.identity
    states = [T.state[g] for g in AUTOMATON_STATES[1:]]
    rep = {s: [0] for s in SIMPLICES}
    K = _K0(T)
    for m in range(n):
        size = 4 ** (m + 1)
        new_rep = {}
        for s in SIMPLICES:
            uf = UnionFind(size)
            for v, r in enumerate(rep[s]):
                if r != v:
                    for x in range(4):
                        uf.union(v * 4 + x, r * 4 + x)
            for g in states:
                for x in range(4):
                    if T.sec[g][x] != e:
                        continue
                    for (t, v), (_, w) in K.get(g, {}).items():
                        if t == s:
                            uf.union(v * 4 + x, w * 4 + T.perm[g][x])
            new_rep[s] = uf.reps()
        new_K: dict[int, dict[Cell, Cell]] = {}
        for h in states:
            for x in range(4):
                g = T.sec[h][x]
                if g == e:
                    continue
                for (s, v), (_, w) in K.get(h, {}).items():
                    r = new_rep[s]
                    cell, target = (s, r[v * 4 + x]), (s, r[w * 4 + T.perm[h][x]])
                    old = new_K.setdefault(g, {}).setdefault(cell, target)
                    if old != target:
                        raise AssertionError("κ depends on the choice of h")
        rep, K = new_rep, new_K
    return TComplex(n, rep, K, T)


def compare_T(a: TComplex, b: TComplex, only_states: bool = True) -> dict[str, bool]:
    T = a.T
    keys = [T.state[g] for g in AUTOMATON_STATES[1:]] if only_states else sorted(set(a.K) | set(b.K))
    return {
        "same identifications": all(a.rep[s] == b.rep[s] for s in SIMPLICES),
        "same K and κ": all(a.K.get(g, {}) == b.K.get(g, {}) for g in keys),
    }


def kappa_checks(C: TComplex) -> dict[str, bool]:
    """κ_g lands in K_{g⁻¹} and is inverted by κ_{g⁻¹}; outside the automaton κ fixes every cell."""
    T = C.T
    states = {T.state[g] for g in AUTOMATON_STATES}
    into, inverted, trivial_outside = True, True, True
    for g, cells in C.K.items():
        back = C.K.get(T.inv[g], {})
        for cell, target in cells.items():
            if target not in back:
                into = False
            elif back[target] != cell:
                inverted = False
            if g not in states and target != cell:
                trivial_outside = False
    return {
        "κ_g maps K_g into K_g⁻¹": into,
        "κ_g⁻¹ ∘ κ_g = id": inverted,
        "κ is trivial for nucleus elements outside the automaton": trivial_outside,
    }


def sections_stay_in_nucleus(n: int, T: GroupTables | None = None) -> bool:
    """Every section h|_v of every h ∈ Γ_σ is again a nucleus element, checked by canonical forms."""
    T = T or tables()
    lab = T.lab
    frontier = {g for s in SIMPLICES for g in T.simplex_group[s]}
    seen = set(frontier)
    for _ in range(n):
        nxt = set()
        for i in frontier:
            for x in range(4):
                s = lab.section(T.elems[i], x)
                if s not in lab.nucleus:
                    return False
                j = T.index[s]
                if j not in seen:
                    seen.add(j)
                    nxt.add(j)
        frontier = nxt
    return True


def expand_pieces(text: str) -> set[tuple[frozenset, tuple[int, ...]]]:
    """Read ``"B1AC⊗{1,3} ∪ A1AB⊗4"`` into (face, word) pairs for every face of the pieces."""
    out = set()
    for piece in text.split("∪"):
        face, _, words = piece.strip().partition("⊗")
        words = words.strip().strip("{}")
        for w in words.split(","):
            for f in faces(simplex(face.strip())):
                out.add((f, parse_word(w.strip())))
    return out


def K_matches(C: TComplex, g: str, text: str) -> bool:
    want = {(s, C.rep[s][word_code(v)]) for s, v in expand_pieces(text)}
    return set(C.K_named(g)) == want


# reference data for 𝒯₁: the pasting faces and the eleven sets K_{g,1}
T1_GLUING = (
    ("A1BC", "1", "2"),
    ("A1BC", "3", "4"),
    ("B1BC", "1", "3"),
    ("B1BC", "2", "4"),
    ("C1BC", "1", "4"),
    ("C1BC", "2", "3"),
)
K1_PIECES = {
    "α": "B1AC⊗{1,3}",
    "β": "C1AB⊗{1,4}",
    "γ": "B1AC⊗{2,4}",
    "a": "C1CA⊗1",
    "c": "A1AC⊗{3,4}",
    "b": "A1AB⊗{3,4} ∪ B1BA⊗{1,3}",
    "aα": "A1AC⊗{1,2}",
    "cγ": "C1CA⊗4",
    "bβ": "A1AB⊗{1,2} ∪ B1BA⊗{2,4}",
    "aαγ": "C1CA⊗2",
    "αc": "C1CA⊗3",
}


def kappa_is_identity(C: TComplex) -> bool:
    return all(target == cell for cells in C.K.values() for cell, target in cells.items())


def T1_checks(C: TComplex | None = None) -> dict[str, bool]:
    C = C or build_T(1)
    out = {"gluing list of 𝒯₁": tuple(C.gluing_list()) == T1_GLUING}
    for g, text in K1_PIECES.items():
        out[f"K_{g},1 = {text}"] = K_matches(C, g, text)
    out["every κ_g,1 is the identity"] = kappa_is_identity(C)
    return out


def pasting_checks(n: int, T: GroupTables | None = None) -> dict[str, bool]:
    """Recursive pasting agrees with the global quotient, sections stay in the nucleus, κ is consistent."""
    T = T or tables()
    C = build_T(n, T)
    out = {f"n={n}: {k}": v for k, v in compare_T(C, quotient_T(n, T)).items()}
    out[f"n={n}: sections of stabilizers stay in the nucleus"] = sections_stay_in_nucleus(n, T)
    out[f"n={n}: stabilizers lie in the listed families"] = stabilizers_in_families(n, T)["ok"]
    out.update({f"n={n}: {k}": v for k, v in kappa_checks(C).items()})
    return out


def stabilizer_of_point(weights_or_simplex, v: Sequence[int], T: GroupTables | None = None) -> tuple[frozenset, str | None]:
    """Stabilizer of ξ ⊗ v as a set of nucleus elements, with its family name."""
    T = T or tables()
    s = _support(weights_or_simplex)
    S = T.stabilizer(s, v)
    return frozenset(T.elems[i] for i in S), T.families.get(S)


def stabilizers_in_families(n: int, T: GroupTables | None = None) -> dict:
    """Exhaustive: every stabilizer of a cell of 𝒯ₘ, m ≤ n, is one of the listed groups."""
    T = T or tables()
    seen: dict[str, int] = {}
    bad = []
    for m in range(n + 1):
        for s in SIMPLICES:
            for code in range(4**m):
                v = code_word(code, m)
                name = T.families.get(T.stabilizer(s, v))
                if name is None:
                    bad.append(f"{simplex_name(s)}⊗{word_str(v)}")
                else:
                    seen[name] = seen.get(name, 0) + 1
    return {"ok": not bad, "unlisted": bad[:10], "families_seen": dict(sorted(seen.items()))}


# -- ℳₙ ---------------------------------------------------------------------------
@dataclass
class MComplex:
    """ℳₙ: for each simplex, class representatives of ``2·v + δ``."""

    n: int
    rep: dict[frozenset, list[int]]
    T: GroupTables = field(repr=False, default=None)  # type: ignore[assignment]

    def cls(self, s: frozenset, v: int, delta: int) -> int:
        return self.rep[s][2 * v + delta]

    def cells(self, dim: int | None = None) -> list[tuple[frozenset, int]]:
        out = []
        for s in SIMPLICES:
            if dim is None or len(s) - 1 == dim:
                out.extend((s, r) for r in sorted(set(self.rep[s])))
        return out

    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(self.cells(d)) for d in range(4))

    def euler(self) -> int:
        return sum((-1) ** d * c for d, c in enumerate(self.f_vector()))

    def to_json(self) -> dict:
        return {"level": self.n, "f_vector": list(self.f_vector()), "euler_characteristic": self.euler()}


def quotient_M(n: int, T: GroupTables | None = None) -> MComplex:
    T = T or tables()
    images, sections = T.level(n)
    size = 4**n
    rep = {}
    for s in SIMPLICES:
        uf = UnionFind(2 * size)
        for h in T.simplex_group[s]:
            img, sec = images[h], sections[h]
            for v in range(size):
                par = T.parity[sec[v]]
                for d in (0, 1):
                    uf.union(2 * v + d, 2 * img[v] + (d ^ par))
        rep[s] = uf.reps()
    return MComplex(n, rep, T)


SELF_PASTED = ("α", "β", "γ")
CROSS_PASTED = ("a", "b", "c", "aα", "bβ", "cγ", "aαγ", "αc")


def build_M(n: int, C: TComplex | None = None, T: GroupTables | None = None) -> MComplex:
    """ℳₙ from two copies of 𝒯ₙ pasted by the κ maps of the automaton states."""
    T = T or tables()
    C = C or build_T(n, T)
    size = 4**n
    rep = {}
    for s in SIMPLICES:
        uf = UnionFind(2 * size)
        for v, r in enumerate(C.rep[s]):
            for d in (0, 1):
                uf.union(2 * v + d, 2 * r + d)
        for name in SELF_PASTED + CROSS_PASTED:
            flip = 0 if name in SELF_PASTED else 1
            for (t, v), (_, w) in C.K_named(name).items():
                if t == s:
                    for d in (0, 1):
                        uf.union(2 * v + d, 2 * w + (d ^ flip))
        rep[s] = uf.reps()
    return MComplex(n, rep, T)


# -- the map I ---------------------------------------------------------------------
HALF = Fraction(1, 2)
EMBED = {
    "B": (0, 0, 0, 0, 0),
    "A": (1, 0, 0, 0, 0),
    "C": (0, 1, 0, 0, 0),
    "A1": (1, 0, 1, 0, 0),
    "B1": (0, 0, 0, 1, 0),
    "C1": (0, 1, 0, 0, 1),
}
EMBED = {k: tuple(Fraction(c) for c in v) for k, v in EMBED.items()}


def _mid(p: str, q: str) -> tuple[Fraction, ...]:
    return tuple((a + b) / 2 for a, b in zip(EMBED[p], EMBED[q]))


# image of each vertex of 𝒯₀ ⊗ x, letters 1..4
VERTEX_IMAGES = {
    "A": (EMBED["C"], EMBED["C1"], EMBED["A1"], EMBED["A"]),
    "B": (_mid("A", "C"),) * 4,
    "C": (EMBED["B"],) * 4,
    "A1": (_mid("C", "C1"), _mid("C", "C1"), _mid("A", "A1"), _mid("A", "A1")),
    "B1": (_mid("C", "A1"), _mid("A", "C1"), _mid("C", "A1"), _mid("A", "C1")),
    "C1": (EMBED["B1"], EMBED["B"], EMBED["B"], EMBED["B1"]),
}

# linear parts on the basis BA, BC, AA1, BB1, CC1; entry [i][j] is the i-th coordinate of the image of basis vector j
LINEAR_PARTS = (
    ((-HALF, -HALF, 0, 0, 0), (HALF, -HALF, 0, 0, 0), (0, 0, 0, HALF, 0), (0, 0, 0, 0, 1), (0, 0, HALF, 0, 0)),
    ((-HALF, -HALF, 0, 0, 0), (HALF, -HALF, 0, 0, 0), (0, 0, 0, 0, 0), (0, 0, 0, 0, 0), (1, 0, -HALF, HALF, 0)),
    ((HALF, -HALF, 0, 0, 0), (-HALF, -HALF, 0, 0, 0), (1, 0, -HALF, HALF, 0), (0, 0, 0, 0, 0), (0, 0, 0, 0, 0)),
    ((HALF, -HALF, 0, 0, 0), (-HALF, -HALF, 0, 0, 0), (0, 0, HALF, 0, 0), (0, 0, 0, 0, 1), (0, 0, 0, HALF, 0)),
)
LINEAR_PARTS = tuple(tuple(tuple(Fraction(c) for c in row) for row in M) for M in LINEAR_PARTS)
COLLAPSED = ((TETRAHEDRA[2], 1), (TETRAHEDRA[2], 2))


Point = tuple[tuple[tuple[str, Fraction], ...], tuple[int, ...]]


def point(weights: dict, word: Sequence[int] = ()) -> Point:
    w = {k: Fraction(v) for k, v in weights.items() if Fraction(v) != 0}
    if any(v < 0 for v in w.values()) or sum(w.values()) != 1:
        raise ValueError(f"weights {weights} are not barycentric")
    if not any(set(w) <= set(t) for t in TETRAHEDRA):
        raise ValueError(f"support {sorted(w)} is not a simplex of the complex")
    return tuple(sorted(w.items(), key=lambda kv: ORDER.index(kv[0]))), tuple(word)


def _support(p) -> frozenset:
    if isinstance(p, frozenset):
        return p
    if isinstance(p, str):
        return simplex(p)
    if isinstance(p, dict):
        return frozenset(k for k, v in p.items() if v)
    return frozenset(k for k, _ in p)


def coords(weights) -> tuple[Fraction, ...]:
    out = [Fraction(0)] * 5
    for k, c in weights:
        for i in range(5):
            out[i] += c * EMBED[k][i]
    return tuple(out)


def locate(p: Sequence[Fraction]) -> tuple[tuple[str, Fraction], ...]:
    """Barycentric weights of a point of R⁵ lying on the embedded 𝒯₀."""
    p1, p2, p3, p4, p5 = (Fraction(c) for c in p)
    w = {"A1": p3, "B1": p4, "C1": p5, "A": p1 - p3, "C": p2 - p5, "B": 1 - p1 - p2 - p4}
    if sum(1 for k in ("A1", "B1", "C1") if w[k] != 0) > 1 or any(c < 0 for c in w.values()):
        raise ValueError(f"{tuple(map(str, p))} is not on the complex")
    return point(w)[0]


def I_point(p: Point) -> Point:
    """I_n(ξ ⊗ x w) = I(ξ ⊗ x) ⊗ w; needs a nonempty word."""
    weights, word = p
    if not word:
        raise ValueError("I needs a word of length at least one")
    x = word[0]
    q = [Fraction(0)] * 5
    for k, c in weights:
        img = VERTEX_IMAGES[k][x]
        for i in range(5):
            q[i] += c * img[i]
    return locate(q), word[1:]


def I_affine(x: int, q: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """The same map through the translation and linear part: I(B⊗x) + 𝓘ₓ (q − B)."""
    M = LINEAR_PARTS[x]
    t = VERTEX_IMAGES["B"][x]
    return tuple(t[i] + sum(M[i][j] * q[j] for j in range(5)) for i in range(5))


def affine_matches_table() -> bool:
    return all(
        I_affine(x, EMBED[k]) == VERTEX_IMAGES[k][x] for k in EMBED for x in range(4)
    )


def copies_land_in_tetrahedra() -> bool:
    """The four vertex images of every copy lie in one tetrahedron of 𝒯₀."""
    for t in TETRAHEDRA:
        for x in range(4):
            support = set()
            for k in t:
                support |= {v for v, _ in locate(VERTEX_IMAGES[k][x])}
            if not any(support <= set(u) for u in TETRAHEDRA):
                return False
    return True


def _rank(rows: list[list[Fraction]]) -> int:
    rows = [list(r) for r in rows]
    rank, col = 0, 0
    ncols = len(rows[0]) if rows else 0
    while rank < len(rows) and col < ncols:
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col] / rows[rank][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank


def degenerate_copies() -> list[tuple[str, int]]:
    """Copies of tetrahedra whose image under I is not three-dimensional."""
    out = []
    for t in TETRAHEDRA:
        for x in range(4):
            base = VERTEX_IMAGES[t[0]][x]
            rows = [[a - b for a, b in zip(VERTEX_IMAGES[k][x], base)] for k in t[1:]]
            if _rank(rows) < 3:
                out.append((simplex_name(t), x + 1))
    return out


def _solve(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    """Unique exact solution of an overdetermined consistent system, else None."""
    m, k = len(A), len(A[0])
    M = [list(A[i]) + [b[i]] for i in range(m)]
    r = 0
    pivots = []
    for c in range(k):
        piv = next((i for i in range(r, m) if M[i][c] != 0), None)
        if piv is None:
            return None
        M[r], M[piv] = M[piv], M[r]
        M[r] = [a / M[r][c] for a in M[r]]
        for i in range(m):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * bb for a, bb in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    if any(M[i][k] != 0 for i in range(r, m)):
        return None
    return [M[i][k] for i in range(k)]


def same_point_T(C: TComplex, p: Point, q: Point) -> bool:
    if p[0] != q[0] or len(p[1]) != len(q[1]):
        return False
    s = _support(p[0])
    return C.rep[s][word_code(p[1])] == C.rep[s][word_code(q[1])]


def theta(weights, T1: TComplex | None = None) -> Point:
    """Θ: the inverse of I on the ten copies of 𝒯₁ that are not collapsed."""
    T1 = T1 or build_T(1)
    if not isinstance(weights, tuple):
        weights = point(weights)[0]
    xi = coords(weights)
    found: list[Point] = []
    for t in TETRAHEDRA:
        for x in range(4):
            if (t, x) in COLLAPSED:
                continue
            A = [[VERTEX_IMAGES[k][x][i] for k in t] for i in range(5)] + [[Fraction(1)] * 4]
            mu = _solve(A, list(xi) + [Fraction(1)])
            if mu is None or any(c < 0 for c in mu):
                continue
            found.append(point(dict(zip(t, mu)), (x,)))
    if not found:
        raise ValueError(f"no preimage for {weights}")
    first = found[0]
    for other in found[1:]:
        if not same_point_T(T1, first, other):
            raise AssertionError(f"Θ is not single valued at {weights}: {first} vs {other}")
    s = _support(first[0])
    return first[0], code_word(T1.rep[s][first[1][0]], 1)


def theta_n(p: Point, T1: TComplex | None = None) -> Point:
    weights, word = p
    w0, x = theta(weights, T1)
    return w0, x + tuple(word)


def sample_points(den: int = 4, extra: int = 0, seed: int = 0) -> list[tuple]:
    """Lattice points of every tetrahedron with the given denominator, plus random ones."""
    pts = set()
    for t in TETRAHEDRA:
        for comp in itertools.product(range(den + 1), repeat=4):
            if sum(comp) == den:
                pts.add(point({k: Fraction(c, den) for k, c in zip(t, comp)})[0])
    rng = random.Random(seed)
    for _ in range(extra):
        t = rng.choice(TETRAHEDRA)
        cuts = sorted(Fraction(rng.randint(0, 997), 997) for _ in range(3))
        parts = [cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1], 1 - cuts[2]]
        pts.add(point(dict(zip(t, parts)))[0])
    return sorted(pts, key=str)


def simplex_barycenters() -> list[tuple]:
    return [point({k: Fraction(1, len(s)) for k in s})[0] for s in SIMPLICES]


def I_well_defined(n: int, C_next: TComplex | None = None, C: TComplex | None = None, pts=None) -> dict:
    """Identified points of 𝒯ₙ₊₁ have identified images in 𝒯ₙ."""
    C_next = C_next or build_T(n + 1)
    C = C or build_T(n)
    pts = pts if pts is not None else simplex_barycenters()
    checked, bad = 0, []
    for weights in pts:
        s = _support(weights)
        classes: dict[int, list[int]] = {}
        for v, r in enumerate(C_next.rep[s]):
            classes.setdefault(r, []).append(v)
        for members in classes.values():
            if len(members) < 2:
                continue
            first = I_point((weights, code_word(members[0], n + 1)))
            for v in members[1:]:
                checked += 1
                other = I_point((weights, code_word(v, n + 1)))
                if not same_point_T(C, first, other):
                    bad.append((simplex_name(s), word_str(code_word(members[0], n + 1)), word_str(code_word(v, n + 1))))
    return {"pairs_checked": checked, "failures": bad[:10], "ok": not bad}


def theta_checks(pts=None, T1: TComplex | None = None, n: int = 2) -> dict[str, bool]:
    T1 = T1 or build_T(1)
    pts = pts if pts is not None else sample_points(4, extra=200)
    TT = T1.T
    right_inverse = all(I_point(theta(p, T1)) == (p, ()) for p in pts)
    into_K = True
    stab_grows = True
    for p in pts:
        s = _support(p)
        q = theta(p, T1)
        t = _support(q[0])
        for g in AUTOMATON_STATES[1:]:
            if s <= set(K0[g].split()) and (t, T1.rep[t][q[1][0]]) not in T1.K_named(g):
                into_K = False
        if not TT.simplex_group[s] <= TT.stabilizer(t, q[1]):
            stab_grows = False
    # Θₙ respects the identifications of 𝒯ₙ and is a section of Iₙ
    Cn, Cn1 = build_T(n), build_T(n + 1)
    level_ok = True
    for p in simplex_barycenters():
        s = _support(p)
        for v in range(4**n):
            word = code_word(v, n)
            q = theta_n((p, word), T1)
            if I_point(q) != (p, word):
                level_ok = False
            r = Cn.rep[s][v]
            if r != v and not same_point_T(Cn1, q, theta_n((p, code_word(r, n)), T1)):
                level_ok = False
    return {
        "I ∘ Θ = id": right_inverse,
        "Θ(K_g,0) ⊆ K_g,1": into_K,
        "stabilizer of Θ(ξ) contains Γ_ξ": stab_grows,
        f"Θ_{n} is a well-defined section of I_{n}": level_ok,
    }


# -- p and ι on ℳₙ ----------------------------------------------------------------
MPoint = tuple[tuple[tuple[str, Fraction], ...], tuple[int, ...], int]


def same_point_M(M: MComplex, p: MPoint, q: MPoint) -> bool:
    if p[0] != q[0] or len(p[1]) != len(q[1]):
        return False
    s = _support(p[0])
    return M.cls(s, word_code(p[1]), p[2]) == M.cls(s, word_code(q[1]), q[2])


def covering_p(p: MPoint) -> MPoint:
    """Drop the last letter; letters 3 and 4 switch the side."""
    weights, word, delta = p
    if not word:
        raise ValueError("p needs a word of length at least one")
    return weights, word[:-1], delta ^ (1 if word[-1] >= 2 else 0)


def iota(p: MPoint) -> MPoint:
    weights, word, delta = p
    w, rest = I_point((weights, word))
    return w, rest, delta


def map_well_defined_M(f, n: int, M_next: MComplex | None = None, M: MComplex | None = None, pts=None) -> dict:
    """Identified points of ℳₙ₊₁ have identified images in ℳₙ under ``f``."""
    M_next = M_next or quotient_M(n + 1)
    M = M or quotient_M(n)
    pts = pts if pts is not None else simplex_barycenters()
    checked, bad = 0, []
    for weights in pts:
        s = _support(weights)
        classes: dict[int, list[int]] = {}
        for i, r in enumerate(M_next.rep[s]):
            classes.setdefault(r, []).append(i)
        for members in classes.values():
            v0, d0 = divmod(members[0], 2)
            first = f((weights, code_word(v0, n + 1), d0))
            for i in members[1:]:
                v, d = divmod(i, 2)
                checked += 1
                if not same_point_M(M, first, f((weights, code_word(v, n + 1), d))):
                    bad.append((simplex_name(s), word_str(code_word(v0, n + 1)), d0, word_str(code_word(v, n + 1)), d))
    return {"pairs_checked": checked, "failures": bad[:10], "ok": not bad}


def preimage_counts(n: int, M_next: MComplex | None = None, M: MComplex | None = None) -> dict:
    """Number of distinct p-preimages of each cell of ℳₙ, split by dimension."""
    M_next = M_next or quotient_M(n + 1)
    M = M or quotient_M(n)
    counts: dict[int, dict[int, int]] = {}
    for s in SIMPLICES:
        pre: dict[int, set[int]] = {}
        for i, r in enumerate(M_next.rep[s]):
            v, d = divmod(i, 2)
            word = code_word(v, n + 1)
            _, w, dd = covering_p(((), word, d))
            pre.setdefault(M.cls(s, word_code(w), dd), set()).add(r)
        hist = counts.setdefault(len(s) - 1, {})
        for cells in pre.values():
            hist[len(cells)] = hist.get(len(cells), 0) + 1
    return {d: dict(sorted(h.items())) for d, h in sorted(counts.items())}


# -- fibers over the triangle model --------------------------------------------------
MU = (1, 1, 2, 2)  # letters 1, 2 ↦ 𝟏 and 3, 4 ↦ 𝟐
CENTER = simplex("ABC")
FEET = {"α": simplex("A1BC"), "β": simplex("B1AC"), "γ": simplex("C1AB")}


def rho_fiber(zeta: Sequence, u: Sequence[int], delta: int, M: MComplex):
    """The fiber of ℳₙ over (ζ, u, δ), as a marked tree.

    For every v with μ(v) = u it contributes a tripod copy: center on ABC and
    feet on A₁BC, B₁AC, C₁AB, with leg lengths (x₁, 1 − x₁ − x₂, x₂). Copies
    are glued where ℳₙ identifies their feet. A vertex is marked p when the
    generator p fixes the corresponding point of 𝒯ₙ.
    """
    from .tripod import MarkedTree

    x1, x2 = Fraction(zeta[0]), Fraction(zeta[1])
    legs = {"α": x1, "β": 1 - x1 - x2, "γ": x2}
    if min(legs.values()) <= 0:
        raise ValueError("ζ must lie in the open triangle")
    n = M.n
    if len(u) != n:
        raise ValueError(f"u must have length {n}")
    T = M.T
    ids: dict[tuple, int] = {}

    def vid(key):
        return ids.setdefault(key, len(ids))

    adj: dict[int, dict[int, Fraction]] = {}
    marks: dict[str, set[int]] = {p: set() for p in legs}
    copies = 0
    for code in range(4**n):
        v = code_word(code, n)
        if tuple(MU[x] for x in v) != tuple(u):
            continue
        copies += 1
        c = vid(("O", M.cls(CENTER, code, delta)))
        adj.setdefault(c, {})
        points = [(c, CENTER)]
        for p, s in FEET.items():
            z = vid((p, M.cls(s, code, delta)))
            adj.setdefault(z, {})
            adj[c][z] = adj[z][c] = legs[p]
            points.append((z, s))
        for vertex, s in points:
            stab = T.stabilizer(s, v)
            for p in legs:
                if T.state[p] in stab:
                    marks[p].add(vertex)
    if any(len(m) != 1 for m in marks.values()):
        raise AssertionError(f"marks are not unique: { {p: len(m) for p, m in marks.items()} }")
    tree = MarkedTree(adj, {p: next(iter(m)) for p, m in marks.items()}, {}, copies)
    return tree


def fiber_isomorphism_check(n: int, zetas=None, M: MComplex | None = None, reverse: bool = False) -> dict:
    """Fibers of ℳₙ against iterated unfoldings of the tripod, for every u and δ."""
    from .tripod import fiber_tree

    M = M or quotient_M(n)
    zetas = zetas or [(Fraction(1, 5), Fraction(3, 10)), (Fraction(1, 2), Fraction(1, 3)), (Fraction(1, 7), Fraction(5, 7))]
    checked, bad = 0, []
    for zeta in zetas:
        legs = (zeta[0], 1 - zeta[0] - zeta[1], zeta[1])
        for u in itertools.product((1, 2), repeat=n):
            want = fiber_tree(legs, tuple(reversed(u)) if reverse else u)
            for delta in (0, 1):
                got = rho_fiber(zeta, u, delta, M)
                checked += 1
                if not got.is_tree() or got.canonical() != want.canonical():
                    bad.append({"zeta": [str(c) for c in zeta], "u": list(u), "delta": delta})
    return {"checked": checked, "failures": bad[:5], "ok": not bad}


# -- contraction -------------------------------------------------------------------
def integer_parts() -> np.ndarray:
    """2·𝓘ₓ as int64 matrices."""
    return np.array([[[int(2 * c) for c in row] for row in M] for M in LINEAR_PARTS], dtype=np.int64)


def contraction_report(max_len: int = 12) -> dict:
    """Norms of all products 𝓘_{x₁}⋯𝓘_{xₙ} up to ``max_len``, deduplicated per level.

    The U blocks are checked exactly: (2ⁿU)ᵀ(2ⁿU) = 2ⁿ·I for every product.
    """
    P = integer_parts()
    V = P[:, 2:, 2:]
    level = np.eye(5, dtype=np.int64)[None]
    levels = []
    u_exact = True
    for n in range(1, max_len + 1):
        level = np.einsum("kij,xjl->kxil", level, P).reshape(-1, 5, 5)
        level = np.unique(level, axis=0)
        Ublk = level[:, :2, :2]
        gram = np.einsum("kji,kjl->kil", Ublk, Ublk)
        if not np.array_equal(gram, np.broadcast_to(2**n * np.eye(2, dtype=np.int64), gram.shape)):
            u_exact = False
        norms = np.linalg.norm(level.astype(float), ord=2, axis=(1, 2)) / 2**n
        levels.append({"length": n, "distinct_products": int(len(level)), "max_norm": float(norms.max())})
    pair_norms = [
        float(np.linalg.norm((V[x] @ V[y]).astype(float), ord=2) / 4) for x in range(4) for y in range(4)
    ]
    w_norms = [float(np.linalg.norm(P[x, 2:, :2].astype(float), ord=2) / 2) for x in range(4)]
    return {
        "levels": levels,
        "U_products_are_similarities": u_exact,
        "max_V_pair_norm": max(pair_norms),
        "V_pairs_within_bound": all(v <= 2**-0.5 + 1e-12 for v in pair_norms),
        "max_W_norm": max(w_norms),
        "block_triangular": bool(np.all(P[:, :2, 2:] == 0)),
        "contracting": levels[-1]["max_norm"] < 1,
    }
