"""Finite subgroups of Γ, the nucleus, intersection lattice and section tables."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

from . import fixtures
from .automaton import Canonicalizer, UndecidedError
from .wreath import WreathRecursion

Elem = tuple[int, ...]

VERTICES = ("A", "B", "C", "A1", "B1", "C1")

# generators of the six maximal finite subgroups
MAXIMAL = {
    "A": "β γ b c",
    "B": "α γ a c",
    "C": "α β a b",
    "A1": "α b c",
    "B1": "β a cγ",
    "C1": "γ aα bβ",
}
ORDERS = {"A": 128, "B": 32, "C": 128, "A1": 16, "B1": 8, "C1": 16}

PAIRWISE = {
    ("A", "B"): "γ c",
    ("A", "C"): "β b",
    ("B", "C"): "α a",
    ("A", "A1"): "b c",
    ("A", "B1"): "β cγ",
    ("A", "C1"): "γ bβ",
    ("B", "A1"): "α c",
    ("B", "B1"): "a cγ",
    ("B", "C1"): "γ aα",
    ("C", "A1"): "α b",
    ("C", "B1"): "β a",
    ("C", "C1"): "aα bβ",
    ("A1", "B1"): "",
    ("A1", "C1"): "",
    ("B1", "C1"): "",
}

# the nontrivial triple intersections; every other triple is trivial
TRIPLES = {
    ("A1", "B", "C"): "α",
    ("A", "B1", "C"): "β",
    ("A", "B", "C1"): "γ",
    ("A1", "A", "B"): "c",
    ("A1", "A", "C"): "b",
    ("B1", "A", "B"): "cγ",
    ("B1", "B", "C"): "a",
    ("C1", "B", "C"): "aα",
    ("C1", "A", "C"): "bβ",
}

# sections G|_1 .. G|_4, as generating sets; "" is the trivial group
SECTION_TABLE = {
    ("A",): ("α β a b", "γ aα bβ", "α b c", "β γ b c"),
    ("B",): ("β b",) * 4,
    ("C",): ("α γ a c",) * 4,
    ("A1",): ("aα bβ", "aα bβ", "b c", "b c"),
    ("B1",): ("α b", "γ bβ", "α b", "γ bβ"),
    ("C1",): ("β a cγ", "aαγ αc", "aαγ αc", "β a cγ"),
    ("A", "B"): ("β b", "bβ", "b", "β b"),
    ("A", "C"): ("α a", "γ aα", "α c", "γ c"),
    ("B", "C"): ("", "", "", ""),
    ("A", "A1"): ("aα bβ", "aα bβ", "b c", "b c"),
    ("A", "B1"): ("α b", "γ bβ", "α b", "γ bβ"),
    ("A", "C1"): ("β a", "aαγ", "αc", "β cγ"),
    ("B", "A1"): ("bβ", "bβ", "b", "b"),
    ("B", "B1"): ("b", "bβ", "b", "bβ"),
    ("B", "C1"): ("β", "", "", "β"),
    ("C", "A1"): ("α γ", "α γ", "α γ", "α γ"),
    ("C", "B1"): ("aα c",) * 4,
    ("C", "C1"): ("a cγ", "aαγ αc", "aαγ αc", "a cγ"),
}

# the 12 states of the automaton generating Γ
AUTOMATON_STATES = ("ε", "α", "β", "γ", "a", "b", "c", "aα", "bβ", "cγ", "aαγ", "αc")

# K_{g,0}: the face of the nucleus complex fixed pointwise by g
K0 = {
    "α": "A1 B C",
    "β": "B1 A C",
    "γ": "C1 A B",
    "a": "B1 B C",
    "b": "A1 A C",
    "c": "A1 A B",
    "aα": "C1 C B",
    "bβ": "C1 C A",
    "cγ": "B1 B A",
    "αc": "A1 B",
    "aαγ": "C1 B",
}

# stabilizers that can occur besides the members of the poset
EXTRA_STABILIZERS = ("aαγ αc", "aαγ", "αc")


def key_name(key: tuple[str, ...]) -> str:
    return "Γ_" + "".join(key) if key else "{ε}"


@dataclass
class Subgroup:
    name: str
    generators: tuple[str, ...]
    elements: frozenset[Elem]

    @property
    def order(self) -> int:
        return len(self.elements)


@dataclass
class NucleusCertificate:
    size: int
    state_closed: bool
    absorption_depth: dict[str, int] = field(default_factory=dict)
    max_absorption_depth: int = 0
    failures: list[str] = field(default_factory=list)
    minimality: dict[str, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.state_closed and not self.failures

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "state_closed": self.state_closed,
            "max_absorption_depth": self.max_absorption_depth,
            "absorption_depth_histogram": _histogram(self.absorption_depth.values()),
            "failures": self.failures,
            "minimality_checked": len(self.minimality),
            "minimality_broken_by": _histogram(self.minimality.values()),
            "ok": self.ok,
        }


def _histogram(values) -> dict[str, int]:
    out: dict[str, int] = {}
    for v in values:
        out[str(v)] = out.get(str(v), 0) + 1
    return dict(sorted(out.items()))


class NucleusLab:
    """Exact enumeration inside Γ, with canonical element ids."""

    def __init__(self, rec: WreathRecursion | None = None, bound: int = 10_000):
        self.rec = rec or fixtures.gamma()
        self.A = self.rec.automaton
        self.canon = Canonicalizer(self.A)
        self.bound = bound
        self._groups: dict[tuple[str, ...], Subgroup] = {}

    # -- elements -----------------------------------------------------------
    def elem(self, text: str) -> Elem:
        return self.canon(self.A.element(self.rec.word(text)))

    def mul(self, g: Elem, h: Elem) -> Elem:
        return self.canon(g + h)

    def word_of(self, g: Elem) -> str:
        return self.rec.fmt(self.A.to_word(g))

    def section(self, g: Elem, x: int) -> Elem:
        return self.canon(self.A.sections(g)[x])

    # -- subgroups ----------------------------------------------------------
    def close(self, generators: str | tuple[str, ...], name: str = "") -> Subgroup:
        """Subgroup generated by words; errors if larger than the bound."""
        gens = tuple(generators.split()) if isinstance(generators, str) else tuple(generators)
        gen_elems = [self.elem(g) for g in gens]
        identity = self.canon(())
        seen = {identity}
        queue = deque([identity])
        while queue:
            g = queue.popleft()
            for s in gen_elems:
                h = self.mul(g, s)
                if h not in seen:
                    seen.add(h)
                    queue.append(h)
                    if len(seen) > self.bound:
                        raise UndecidedError(f"subgroup ⟨{', '.join(gens)}⟩ exceeds {self.bound} elements")
        return Subgroup(name or "⟨" + ", ".join(gens) + "⟩", gens, frozenset(seen))

    def group(self, key: tuple[str, ...]) -> Subgroup:
        """Γ_X for a vertex key like ("A",), or the intersection for longer keys."""
        key = tuple(key)
        if key not in self._groups:
            if len(key) == 1:
                self._groups[key] = self.close(MAXIMAL[key[0]], key_name(key))
            else:
                els = frozenset.intersection(*(self.group((k,)).elements for k in key))
                self._groups[key] = Subgroup(key_name(key), (), els)
        return self._groups[key]

    def intersect(self, G: Subgroup, H: Subgroup) -> Subgroup:
        return Subgroup(f"{G.name} ∩ {H.name}", (), G.elements & H.elements)

    def generated_by_elements(self, elems) -> frozenset[Elem]:
        gens = [e for e in set(elems) if e]
        identity = self.canon(())
        seen = {identity}
        queue = deque([identity])
        while queue:
            g = queue.popleft()
            for s in gens:
                h = self.mul(g, s)
                if h not in seen:
                    seen.add(h)
                    queue.append(h)
                    if len(seen) > self.bound:
                        raise UndecidedError("generated subgroup exceeds bound")
        return frozenset(seen)

    # -- the nucleus --------------------------------------------------------
    @cached_property
    def nucleus(self) -> frozenset[Elem]:
        return frozenset().union(*(self.group((v,)).elements for v in VERTICES))

    def inclusion_exclusion(self, keys=VERTICES) -> int:
        """|∪ Γ_X| by inclusion-exclusion over all intersections."""
        total = 0
        for r in range(1, len(keys) + 1):
            for combo in combinations(keys, r):
                total += (-1) ** (r + 1) * self.group(combo).order
        return total

    def section_table(self, elems) -> dict[Elem, tuple[Elem, ...]]:
        d = self.rec.degree
        return {g: tuple(self.section(g, x) for x in range(d)) for g in elems}

    def absorption_depth(self, start: Elem, target: frozenset[Elem], depth_bound: int) -> int | None:
        """Least k such that every section of ``start`` at level k lies in ``target``."""
        frontier = {start} - target
        depth = 0
        while frontier:
            if depth >= depth_bound:
                return None
            nxt = set()
            for g in frontier:
                for s in self.A.sections(g):
                    c = self.canon(s)
                    if c not in target:
                        nxt.add(c)
            frontier = nxt
            depth += 1
        return depth

    def verify_nucleus(
        self,
        candidate: frozenset[Elem] | None = None,
        depth_bound: int = 8,
        minimality: bool = True,
    ) -> NucleusCertificate:
        N = self.nucleus if candidate is None else frozenset(candidate)
        table = self.section_table(N)
        state_closed = all(s in N for secs in table.values() for s in secs)
        cert = NucleusCertificate(size=len(N), state_closed=state_closed)
        if not state_closed:
            bad = next(g for g, secs in table.items() if any(s not in N for s in secs))
            cert.failures.append(f"not state-closed at {self.word_of(bad)}")
        gens = [self.elem(g) for g in self.rec.generators]
        for h in sorted(N):
            for g in gens:
                hg = self.mul(h, g)
                k = self.absorption_depth(hg, N, depth_bound)
                label = f"{self.word_of(h)}·{self.word_of(g)}"
                if k is None:
                    cert.failures.append(f"{label} not absorbed by depth {depth_bound}")
                else:
                    cert.absorption_depth[label] = k
        cert.max_absorption_depth = max(cert.absorption_depth.values(), default=0)
        if minimality and candidate is None:
            cert.minimality = self._minimality(N, table, depth_bound)
        return cert

    def _minimality(self, N, table, depth_bound) -> dict[str, str]:
        """For every element, the reason the nucleus breaks without it."""
        out = {}
        parents: dict[Elem, set[Elem]] = {}
        for g, secs in table.items():
            for s in secs:
                parents.setdefault(s, set()).add(g)
        for e in sorted(N):
            if parents.get(e, set()) - {e}:
                out[self.word_of(e)] = "state-closure"
                continue
            reduced = N - {e}
            gens = [self.elem(g) for g in self.rec.generators]
            broken = any(
                self.absorption_depth(self.mul(h, g), reduced, depth_bound) is None
                for h in reduced
                for g in gens
            )
            out[self.word_of(e)] = "absorption" if broken else "none"
        return out

    # -- tables -------------------------------------------------------------
    def check_named(self, key: tuple[str, ...], gens: str) -> bool:
        return self.group(key).elements == self.close(gens).elements

    def sections_of_group(self, key: tuple[str, ...]) -> list[frozenset[Elem]]:
        G = self.group(key).elements
        d = self.rec.degree
        return [self.generated_by_elements(self.section(g, x) for g in G) for x in range(d)]

    def sections_table_check(self) -> dict[str, list[bool]]:
        out = {}
        for key, row in SECTION_TABLE.items():
            got = self.sections_of_group(key)
            out[key_name(key)] = [got[x] == self.close(row[x]).elements for x in range(len(row))]
        return out

    def stabilizer_families(self) -> dict[frozenset[Elem], str]:
        """Element sets of 𝒢 (distinct subgroups) and of the extra family."""
        fam: dict[frozenset[Elem], str] = {}
        for key in self.poset_keys():
            fam.setdefault(self.group(key).elements, key_name(key))
        for gens in EXTRA_STABILIZERS:
            fam.setdefault(self.close(gens).elements, "⟨" + ", ".join(gens.split()) + "⟩")
        return fam

    @staticmethod
    def poset_keys() -> list[tuple[str, ...]]:
        keys: list[tuple[str, ...]] = []
        for r in (1, 2, 3):
            keys.extend(combinations(VERTICES, r))
        return keys

    # -- the complex of the poset ------------------------------------------
    def poset(self) -> dict:
        """Distinct subgroups of 𝒢 with their containment relation."""
        groups: dict[frozenset[Elem], list[str]] = {}
        for key in self.poset_keys():
            groups.setdefault(self.group(key).elements, []).append(key_name(key))
        items = list(groups.items())
        less = [
            (i, j)
            for i, (gi, _) in enumerate(items)
            for j, (gj, _) in enumerate(items)
            if i != j and gi < gj
        ]
        return {"groups": items, "less": less}

    def build_T0(self) -> dict:
        """Vertices, nontrivial triples and the tetrahedra of the nucleus complex."""
        triples = [
            frozenset(t) for t in combinations(VERTICES, 3) if self.group(t).order > 1
        ]
        tetrahedra = []
        for quad in combinations(VERTICES, 4):
            faces = [frozenset(f) for f in combinations(quad, 3)]
            if sum(f in triples for f in faces) >= 3:
                tetrahedra.append(frozenset(quad))
        common = frozenset.intersection(*tetrahedra) if tetrahedra else frozenset()
        four_fold = [q for q in combinations(VERTICES, 4) if self.group(q).order > 1]
        labels = {}
        for t in triples:
            key = tuple(v for v in VERTICES if v in t)
            G = self.group(key).elements
            nontriv = [g for g in G if g]
            labels["".join(key)] = self.word_of(nontriv[0]) if len(nontriv) == 1 else None
        return {
            "vertices": list(VERTICES),
            "triangles": sorted("".join(v for v in VERTICES if v in t) for t in triples),
            "tetrahedra": sorted("".join(v for v in VERTICES if v in t) for t in tetrahedra),
            "common_face": "".join(v for v in VERTICES if v in common),
            "four_fold_nontrivial": ["".join(q) for q in four_fold],
            "triangle_labels": labels,
        }

    def K0_faces(self) -> dict[str, str]:
        """For each nontrivial state g, the vertices X with g ∈ Γ_X."""
        out = {}
        for g in AUTOMATON_STATES[1:]:
            e = self.elem(g)
            verts = [v for v in VERTICES if e in self.group((v,)).elements]
            out[g] = " ".join(verts)
        return out
