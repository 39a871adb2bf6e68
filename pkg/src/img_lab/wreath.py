"""Wreath recursions: group words acting on the rooted tree over a finite alphabet.

Conventions. A rule ``g = p(g_1, ..., g_d)`` means ``g(x v) = p(x) g_x(v)``.
Words are products with the rightmost letter acting first, so
``(gh)(v) = g(h(v))`` and ``(gh)|_x = g|_{h(x)} h|_x``.
Alphabet letters are 0-based internally and printed 1-based.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .words import Word, WordParser, format_word, free_reduce, inverse

Perm = tuple[int, ...]


def perm_compose(p: Perm, q: Perm) -> Perm:
    """The permutation ``x -> p(q(x))``."""
    return tuple(p[i] for i in q)


def perm_inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def perm_from_cycles(cycles: str, degree: int) -> Perm:
    """``"(12)(34)"`` with 1-based letters."""
    img = list(range(degree))
    for cyc in cycles.replace(" ", "").strip("()").split(")("):
        if not cyc:
            continue
        pts = [int(c) - 1 for c in cyc]
        for a, b in zip(pts, pts[1:] + pts[:1]):
            img[a] = b
    return tuple(img)


def perm_cycles(p: Perm) -> str:
    seen, out = set(), []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(str(j + 1))
            j = p[j]
        out.append("(" + "".join(cyc) + ")")
    return "".join(out) or "()"


@dataclass(frozen=True)
class Rule:
    perm: Perm
    sections: tuple[Word, ...]


class WreathRecursion:
    """Finitely many generators, each with a root permutation and section words."""

    def __init__(
        self,
        name: str,
        alphabet: Sequence[str],
        rules: Mapping[str, Rule],
        involutions: Iterable[str] = (),
    ):
        self.name = name
        self.alphabet = tuple(alphabet)
        self.degree = len(self.alphabet)
        if self.degree == 0 or len(set(self.alphabet)) != self.degree:
            raise ValueError("alphabet must be nonempty with distinct letters")
        self.generators = tuple(rules)
        self.rules = dict(rules)
        self.involutions = frozenset(involutions)
        self.parser = WordParser(self.generators)
        for g, rule in self.rules.items():
            if sorted(rule.perm) != list(range(self.degree)):
                raise ValueError(f"rule for {g} is not a permutation of the alphabet")
            if len(rule.sections) != self.degree:
                raise ValueError(f"rule for {g} needs {self.degree} sections")
            for w in rule.sections:
                for h, _ in w:
                    if h not in self.rules:
                        raise ValueError(f"section of {g} uses undeclared generator {h}")
        self._letter_cache: dict[tuple[str, int], tuple[Perm, tuple[Word, ...]]] = {}
        self._automaton = None

    # -- words --------------------------------------------------------------
    def word(self, text: str | Word) -> Word:
        if isinstance(text, tuple):
            w = text
        else:
            w = self.parser.parse(text)
        for g, _ in w:
            if g not in self.rules:
                raise KeyError(f"unknown generator {g!r} in {self.name}")
        return self.reduce(w)

    def reduce(self, word: Iterable[tuple[str, int]]) -> Word:
        return free_reduce(word, self.involutions)

    def inverse(self, word: Word) -> Word:
        return self.reduce(inverse(word))

    def fmt(self, word: Word) -> str:
        return format_word(word)

    # -- one level ----------------------------------------------------------
    def letter_rule(self, letter: tuple[str, int]) -> tuple[Perm, tuple[Word, ...]]:
        cached = self._letter_cache.get(letter)
        if cached is not None:
            return cached
        g, e = letter
        if g not in self.rules:
            raise KeyError(f"unknown generator {g!r}")
        rule = self.rules[g]
        if e == 1 or g in self.involutions:
            out = (rule.perm, rule.sections)
        else:
            inv = perm_inverse(rule.perm)
            # (g^-1)|_x = (g|_{g^-1(x)})^-1
            out = (inv, tuple(inverse(rule.sections[inv[x]]) for x in range(self.degree)))
        self._letter_cache[letter] = out
        return out

    def first_level(self, word: Word) -> tuple[Perm, tuple[Word, ...]]:
        """Root permutation and the reduced sections of a word."""
        d = self.degree
        perm: Perm = tuple(range(d))
        secs: list[list[tuple[str, int]]] = [[] for _ in range(d)]
        # process right to left; secs[x] accumulates sections in reverse order
        for letter in reversed(word):
            p, s = self.letter_rule(letter)
            for x in range(d):
                y = perm[x]
                secs[x].append(s[y])  # type: ignore[arg-type]
            perm = perm_compose(p, perm)
        sections = []
        for x in range(d):
            flat = [lt for piece in reversed(secs[x]) for lt in piece]  # type: ignore[union-attr]
            sections.append(self.reduce(flat))
        return perm, tuple(sections)

    def apply(self, word: Word | str, v: Sequence[int]) -> tuple[int, ...]:
        """Image of the 0-based vertex ``v`` under ``word``."""
        w = self.word(word)
        out = []
        for x in v:
            if not 0 <= x < self.degree:
                raise ValueError(f"letter {x} outside the alphabet")
            perm, secs = self.first_level(w)
            out.append(perm[x])
            w = secs[x]
        return tuple(out)

    def section(self, word: Word | str, v: Sequence[int]) -> Word:
        w = self.word(word)
        for x in v:
            if not 0 <= x < self.degree:
                raise ValueError(f"letter {x} outside the alphabet")
            w = self.first_level(w)[1][x]
        return w

    def apply_str(self, word: Word | str, v: str) -> str:
        idx = [self.alphabet.index(c) for c in v]
        return "".join(self.alphabet[i] for i in self.apply(word, idx))

    def level_permutation(self, word: Word | str, n: int) -> list[int]:
        """Action on the ``d**n`` vertices of level ``n``, vertices in lexicographic order."""
        w = self.word(word)
        d = self.degree
        out = [0] * d**n
        # iterative depth-first walk carrying the section
        stack: list[tuple[Word, int, int, int]] = [(w, 0, 0, 0)]
        while stack:
            g, depth, src, dst = stack.pop()
            if depth == n:
                out[src] = dst
                continue
            perm, secs = self.first_level(g)
            for x in range(d):
                stack.append((secs[x], depth + 1, src * d + x, dst * d + perm[x]))
        return out

    # -- word problem -------------------------------------------------------
    @property
    def automaton(self):
        """The minimized state automaton; built on first use."""
        if self._automaton is None:
            from .automaton import Automaton

            self._automaton = Automaton(self)
        return self._automaton

    def is_trivial(self, word: Word | str, bound: int = 10**6) -> bool:
        A = self.automaton
        return A.is_trivial(A.element(self.word(word)), bound)

    def are_equal(self, g: Word | str, h: Word | str) -> bool:
        return self.is_trivial(self.word(g) + self.inverse(self.word(h)))

    def order_of(self, g: Word | str, max_order: int = 64) -> int | None:
        """Least n >= 1 with g^n trivial, or None if it exceeds ``max_order``."""
        A = self.automaton
        e = A.element(self.word(g))
        acc: tuple[int, ...] = ()
        for n in range(1, max_order + 1):
            acc = A.reduce(acc + e)
            if A.is_trivial(acc):
                return n
        return None

    # -- serialization ------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "name": self.name,
            "alphabet": list(self.alphabet),
            "generators": list(self.generators),
            "involutions": sorted(self.involutions),
            "rules": {
                g: {
                    "perm": [self.alphabet[i] for i in r.perm],
                    "sections": [format_word(w) for w in r.sections],
                }
                for g, r in self.rules.items()
            },
        }

    @classmethod
    def from_json(cls, data: Mapping | str) -> "WreathRecursion":
        if isinstance(data, str):
            data = json.loads(data)
        alphabet = list(data["alphabet"])
        parser = WordParser(data["generators"])
        rules = {}
        for g in data["generators"]:
            r = data["rules"][g]
            perm = tuple(alphabet.index(str(c)) for c in r["perm"])
            rules[g] = Rule(perm, tuple(parser.parse(s) for s in r["sections"]))
        return cls(data.get("name", "recursion"), alphabet, rules, data.get("involutions", ()))

    # -- basis change -------------------------------------------------------
    def conjugate_element(
        self, word: Word | str, tup: Sequence[Word | str], perm: Perm | None = None
    ) -> tuple[Perm, tuple[Word, ...]]:
        """First-level data of ``g`` after conjugating the recursion by ``h = perm(tup)``.

        The new wreath element is ``h psi(g) h^-1``; its sections are words over
        the same generators.
        """
        d = self.degree
        hp = perm if perm is not None else tuple(range(d))
        hs = [self.word(t) for t in tup]
        hp_inv = perm_inverse(hp)
        gp, gs = self.first_level(self.word(word))
        new_perm = perm_compose(hp, perm_compose(gp, hp_inv))
        sections = []
        for x in range(d):
            y = hp_inv[x]  # h^-1(x)
            # (h g h^-1)|_x = h|_{g h^-1 (x)} g|_{h^-1 x} (h|_{h^-1 x})^-1
            sections.append(self.reduce(hs[gp[y]] + gs[y] + inverse(hs[y])))
        return new_perm, tuple(sections)

    def conjugate_recursion(
        self, tup: Sequence[Word | str], perm: Perm | None = None, name: str | None = None
    ) -> "WreathRecursion":
        """Conjugate every generator's rule.

        Only sensible when the resulting sections are again words in the
        generators, which is always true here since sections are allowed to
        be arbitrary words.
        """
        rules = {}
        for g in self.generators:
            p, s = self.conjugate_element(((g, 1),), tup, perm)
            rules[g] = Rule(p, s)
        return WreathRecursion(name or self.name + "'", self.alphabet, rules, self.involutions)

    def __repr__(self) -> str:
        lines = [f"{self.name}:"]
        for g, r in self.rules.items():
            secs = ", ".join(format_word(w) for w in r.sections)
            lines.append(f"  {g} = {perm_cycles(r.perm)}({secs})")
        return "\n".join(lines)


# -- checks against quotients --------------------------------------------------
def _digits(code: int, d: int, n: int) -> list[int]:
    out = []
    for _ in range(n):
        code, r = divmod(code, d)
        out.append(r)
    return out[::-1]


def projection_check(
    rec4: WreathRecursion,
    rec2: WreathRecursion,
    letter_map: Sequence[int],
    gen_map: Mapping[str, str],
    depth: int,
) -> bool:
    """Whether ``letter_map(g(v)) == gen_map(g)(letter_map(v))`` for all generators and all v of length ``depth``.

    Checking the longest words is enough, because images of prefixes are prefixes.
    """
    d4, d2 = rec4.degree, rec2.degree
    project = []
    for code in range(d4**depth):
        acc = 0
        for x in _digits(code, d4, depth):
            acc = acc * d2 + letter_map[x]
        project.append(acc)
    for g in rec4.generators:
        big = rec4.level_permutation(((g, 1),), depth)
        small = rec2.level_permutation(rec2.word(gen_map[g]), depth)
        if any(project[big[v]] != small[project[v]] for v in range(d4**depth)):
            return False
    return True


def abc_parity(word: Word) -> int:
    return sum(1 for g, _ in word if g in "abc") % 2


def parity_invariant_check(
    rec: WreathRecursion | None = None, samples: int = 500, depth: int = 4, seed: int = 0, max_len: int = 12
) -> dict:
    """Random words fixing ``1ⁿ`` have the same a/b/c-parity as their section at ``1ⁿ``.

    Words fixing the vertex are made by composing a random word with a
    transversal word that carries its image back to ``1ⁿ``.
    """
    import random

    if rec is None:
        from .fixtures import gamma

        rec = gamma()
    rng = random.Random(seed)
    gens = list(rec.generators)
    checked, failures = 0, []
    for n in range(1, depth + 1):
        start = (0,) * n
        # transversal: back[v] is a word u with u(v) = start
        back: dict[tuple[int, ...], Word] = {start: ()}
        frontier = [start]
        while frontier:
            nxt = []
            for v in frontier:
                for g in gens:
                    w = rec.apply(((g, 1),), v)
                    if w not in back:
                        # g^-1 = g for involutions; u = back[v] g^-1
                        back[w] = rec.reduce(back[v] + rec.inverse(((g, 1),)))
                        nxt.append(w)
            frontier = nxt
        for _ in range(samples // depth + (1 if n <= samples % depth else 0)):
            w = tuple((rng.choice(gens), 1) for _ in range(rng.randint(1, max_len)))
            g = rec.reduce(back[rec.apply(w, start)] + w)
            assert rec.apply(g, start) == start
            sec = rec.section(g, start)
            checked += 1
            if abc_parity(g) != abc_parity(sec):
                failures.append(format_word(g))
    return {"checked": checked, "failures": failures[:10], "ok": not failures}
