"""Group words: parsing, printing, free reduction.

A word is a tuple of letters ``(name, exp)`` with ``exp`` equal to 1 or -1.
Generator names may be several characters long; parsing uses longest match.
"""

from __future__ import annotations

import re
from typing import Iterable, Sequence

Letter = tuple[str, int]
Word = tuple[Letter, ...]

EMPTY: Word = ()

ASCII_ALIASES = {
    "alpha": "α",
    "beta": "β",
    "gamma": "γ",
    "tau": "τ",
}
IDENTITY_TOKENS = ("ε", "1", "e")
_SUPERSCRIPTS = str.maketrans("⁰¹²³⁴⁵⁶⁷⁸⁹⁻", "0123456789-")


def inverse(word: Sequence[Letter]) -> Word:
    return tuple((g, -e) for g, e in reversed(word))


def free_reduce(word: Iterable[Letter], involutions: Iterable[str] = ()) -> Word:
    """Cancel ``x x^-1`` pairs; for involutive generators also ``x x``."""
    inv = frozenset(involutions)
    out: list[Letter] = []
    for g, e in word:
        if g in inv:
            e = 1
        if out and out[-1][0] == g and (out[-1][1] == -e or g in inv):
            out.pop()
        else:
            out.append((g, e))
    return tuple(out)


def power(word: Sequence[Letter], n: int) -> Word:
    if n >= 0:
        return tuple(word) * n
    return inverse(word) * (-n)


def format_word(word: Sequence[Letter], ascii_only: bool = False) -> str:
    if not word:
        return "ε" if not ascii_only else "1"
    parts = []
    for g, e in word:
        name = g
        if ascii_only:
            name = {v: k for k, v in ASCII_ALIASES.items()}.get(g, g)
        sep = " " if ascii_only and len(name) > 1 else ""
        parts.append(name + ("" if e == 1 else "^-1") + sep)
    return "".join(parts).strip()


class WordParser:
    """Parse strings such as ``"(ab)^8"``, ``"t^-1 s^-1 τ"`` or ``"aαbβ"``."""

    def __init__(self, generators: Iterable[str]):
        self.generators = tuple(generators)
        names = set(self.generators)
        names.update(k for k, v in ASCII_ALIASES.items() if v in self.generators)
        self._names = sorted(names, key=len, reverse=True)

    def parse(self, text: str) -> Word:
        s = text.translate(_SUPERSCRIPTS).replace(" ", "").replace("*", "").replace("·", "")
        word, pos = self._parse_seq(s, 0)
        if pos != len(s):
            raise ValueError(f"unexpected {s[pos]!r} at position {pos} in {text!r}")
        return word

    def _parse_seq(self, s: str, pos: int) -> tuple[Word, int]:
        out: list[Letter] = []
        while pos < len(s) and s[pos] != ")":
            if s[pos] == "(":
                inner, pos = self._parse_seq(s, pos + 1)
                if pos >= len(s) or s[pos] != ")":
                    raise ValueError(f"unbalanced parenthesis in {s!r}")
                pos += 1
                atom = inner
            else:
                atom, pos = self._parse_atom(s, pos)
            n, pos = self._parse_exponent(s, pos)
            out.extend(power(atom, n))
        return tuple(out), pos

    def _parse_atom(self, s: str, pos: int) -> tuple[Word, int]:
        for name in self._names:
            if s.startswith(name, pos):
                return ((ASCII_ALIASES.get(name, name), 1),), pos + len(name)
        for tok in IDENTITY_TOKENS:
            if s.startswith(tok, pos):
                return EMPTY, pos + len(tok)
        raise ValueError(f"unknown generator at {s[pos:]!r}")

    @staticmethod
    def _parse_exponent(s: str, pos: int) -> tuple[int, int]:
        m = re.compile(r"\^?(-?\d+)").match(s, pos)
        if m and (s[pos] == "^" or s[pos] == "-"):
            return int(m.group(1)), m.end()
        if s.startswith("^(", pos):
            end = s.index(")", pos)
            return int(s[pos + 2 : end]), end + 1
        return 1, pos
