"""Exact model of the external-ray group on the real Heisenberg group.

A point is a triple ``(x, y, z)`` of rationals standing for the matrix
``[[1, x, z], [0, 1, y], [0, 0, 1]]``. The generators s, t, τ act on the right,
and a word acts letter by letter from left to right.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import NamedTuple

from .fixtures import heisenberg, rays
from .words import WordParser


class H(NamedTuple):
    x: Fraction
    y: Fraction
    z: Fraction

    def __mul__(self, other: "H") -> "H":  # type: ignore[override]
        return h_mul(self, other)

    def __str__(self) -> str:
        return f"({self.x}, {self.y}, {self.z})"


def h(x=0, y=0, z=0) -> H:
    return H(Fraction(x), Fraction(y), Fraction(z))


ONE = h()


def h_mul(a: H, b: H) -> H:
    return H(a.x + b.x, a.y + b.y, a.z + b.z + a.x * b.y)


def h_inv(a: H) -> H:
    return H(-a.x, -a.y, -a.z + a.x * a.y)


def h_pow(a: H, n: int) -> H:
    # (x, y, z)^n = (nx, ny, nz + n(n-1)/2 xy), valid for negative n as well
    return H(n * a.x, n * a.y, n * a.z + Fraction(n * (n - 1), 2) * a.x * a.y)


def h_commutator(a: H, b: H) -> H:
    """``a b a^-1 b^-1``."""
    return h_mul(h_mul(a, b), h_mul(h_inv(a), h_inv(b)))


# images of the generators of ⟨X, Y, τ⟩
PHI_X = h(1, 0, 0)
PHI_Y = h(0, 1, 0)
PHI_TAU = h(0, 0, Fraction(1, 4))
MATRIX_OF = {"X": PHI_X, "Y": PHI_Y, "τ": PHI_TAU}

QUARTER = Fraction(1, 4)


def _s(p: H) -> H:
    x, y, z = p
    return H(-x - 1, -y, z + 2 * y)


def _t(p: H) -> H:
    x, y, z = p
    return H(-y - 1, x + 1, z - x * y - x - 1)


def _t_inv(p: H) -> H:
    # solve _t(q) = p for q
    x = p.y - 1
    y = -p.x - 1
    return H(x, y, p.z + x * y + x + 1)


def _tau(p: H) -> H:
    return H(p.x, p.y, p.z + QUARTER)


def _tau_inv(p: H) -> H:
    return H(p.x, p.y, p.z - QUARTER)


ACTIONS = {
    ("s", 1): _s,
    ("s", -1): _s,
    ("t", 1): _t,
    ("t", -1): _t_inv,
    ("τ", 1): _tau,
    ("τ", -1): _tau_inv,
}

_PARSER = WordParser(("s", "t", "τ", "X", "Y"))
# X = t²s and Y = tst as words in the ray generators
EXPANSIONS = {"X": "tts", "Y": "tst"}


def ray_word(text: str):
    """Parse a word in s, t, τ (X and Y are expanded)."""
    out = []
    for g, e in _PARSER.parse(text):
        if g in EXPANSIONS:
            sub = _PARSER.parse(EXPANSIONS[g])
            if e == -1:
                sub = tuple((q, -f) for q, f in reversed(sub))
            out.extend(sub)
        else:
            out.append((g, e))
    return tuple(out)


def act(p: H, g: str | tuple[str, int]) -> H:
    letter = (g, 1) if isinstance(g, str) else g
    return ACTIONS[letter](p)


def act_word(p: H, word) -> H:
    """Right action: the leftmost letter acts first."""
    if isinstance(word, str):
        word = ray_word(word)
    for letter in word:
        p = ACTIONS[letter](p)
    return p


def phi_auto(p: H) -> H:
    a, b, c = p
    return H((a - b) / 2, (a + b) / 2, c / 2 + (a * a - b * b) / 8 - a * b / 4 - a / 2)


def phi_inv(p: H) -> H:
    a, b, c = p
    return H(a + b, b - a, 2 * c + a + b - a * b - (a * a - b * b) / 2)


def random_point(rng: random.Random, span: int = 20, den: int = 12) -> H:
    return H(*(Fraction(rng.randint(-span * den, span * den), rng.randint(1, den)) for _ in range(3)))


# first-level stabilizer generators and their first sections, after the basis change
STABILIZER_IDENTITIES = (("sts", "sts"), ("t", "st^-1τ"), ("ττ", "τ"))


def verify_conjugation_identities(samples: int = 1000, seed: int = 0, points=None) -> dict:
    """``phi_auto(p·g) == phi_auto(p)·g|₁`` for each stabilizer generator g."""
    rng = random.Random(seed)
    pts = list(points) if points is not None else [ONE] + [random_point(rng) for _ in range(samples)]
    out = {}
    for g, sec in STABILIZER_IDENTITIES:
        bad = [p for p in pts if phi_auto(act_word(p, g)) != act_word(phi_auto(p), sec)]
        out[f"{g} -> {sec}"] = {"checked": len(pts), "failures": [str(p) for p in bad[:5]]}
    return out


def relation_checks(samples: int = 200, seed: int = 0) -> dict[str, bool]:
    """The group relations as identities of the action, plus the matrix identities."""
    rng = random.Random(seed)
    pts = [ONE, h(1, 2, 3)] + [random_point(rng) for _ in range(samples)]

    def acts_as(u: str, v: str) -> bool:
        return all(act_word(p, u) == act_word(p, v) for p in pts)

    def acts_as_mul(u: str, m: H) -> bool:
        return all(act_word(p, u) == h_mul(p, m) for p in pts)

    return {
        "s^2 = 1": acts_as("ss", ""),
        "t^4 = 1": acts_as("tttt", ""),
        "(st)^4 = τ^4": acts_as("stststst", "ττττ"),
        "[τ, s] = 1": acts_as("τsτ^-1s^-1", ""),
        "[τ, t] = 1": acts_as("τtτ^-1t^-1", ""),
        "[X, Y] = τ^4 (action)": acts_as("XYX^-1Y^-1", "ττττ"),
        "X acts as right multiplication by φ(X)": acts_as_mul("X", PHI_X),
        "Y acts as right multiplication by φ(Y)": acts_as_mul("Y", PHI_Y),
        "τ acts as right multiplication by φ(τ)": acts_as_mul("τ", PHI_TAU),
        "[φ(X), φ(Y)] = φ(τ)^4": h_commutator(PHI_X, PHI_Y) == h_pow(PHI_TAU, 4) == h(0, 0, 1),
    }


def automorphism_checks(samples: int = 1000, seed: int = 0) -> dict[str, bool]:
    rng = random.Random(seed)
    pairs = [(random_point(rng), random_point(rng)) for _ in range(samples)]
    return {
        "phi_auto is multiplicative": all(
            phi_auto(h_mul(p, q)) == h_mul(phi_auto(p), phi_auto(q)) for p, q in pairs
        ),
        "phi_inv inverts phi_auto": all(phi_inv(phi_auto(p)) == p and phi_auto(phi_inv(p)) == p for p, _ in pairs),
        "phi_auto halves the center": all(phi_auto(h(0, 0, p.z)) == h(0, 0, p.z / 2) for p, _ in pairs),
    }


# -- the integer lattice -----------------------------------------------------
def is_integral(p: H) -> bool:
    return all(c.denominator == 1 for c in p)


def lattice_word(p: H) -> tuple[int, int, int]:
    """Exponents ``(a, b, k)`` with ``p = φ(X)^a φ(Y)^b φ(τ)^{4k}``; requires integer entries."""
    if not is_integral(p):
        raise ValueError(f"{p} is not in the integer lattice")
    a, b = int(p.x), int(p.y)
    return a, b, int(p.z) - a * b


def lattice_check(max_len: int = 4, samples: int = 200, seed: int = 0) -> dict[str, bool]:
    """⟨φ(X), φ(Y), φ(τ)^4⟩ is exactly the set of integer triples."""
    gens = [PHI_X, PHI_Y, h_pow(PHI_TAU, 4)]
    gens += [h_inv(g) for g in gens]
    frontier = {ONE}
    reached = {ONE}
    for _ in range(max_len):
        frontier = {h_mul(p, g) for p in frontier for g in gens} - reached
        reached |= frontier
    rng = random.Random(seed)
    ok_words = True
    for _ in range(samples):
        p = h(rng.randint(-50, 50), rng.randint(-50, 50), rng.randint(-50, 50))
        a, b, k = lattice_word(p)
        if h_mul(h_mul(h_pow(PHI_X, a), h_pow(PHI_Y, b)), h_pow(PHI_TAU, 4 * k)) != p:
            ok_words = False
    return {
        "words in the generators stay integral": all(is_integral(p) for p in reached),
        "integer triples are products of the generators": ok_words,
        "φ(X)φ(Y) = (1, 1, 1)": h_mul(PHI_X, PHI_Y) == h(1, 1, 1),
        "φ(Y)φ(X) = (1, 1, 0)": h_mul(PHI_Y, PHI_X) == h(1, 1, 0),
        "φ(τ) is outside the lattice": not is_integral(PHI_TAU),
    }


# -- the same relations in the tree action -----------------------------------
WREATH_RELATIONS = {
    "rays": ("ss", "tttt", "stststst τ^-4", "τsτ^-1s^-1", "τtτ^-1t^-1", "tts tst s^-1t^-2 t^-1s^-1t^-1 τ^-4"),
    "heisenberg": ("XYX^-1Y^-1τ^-4", "XτX^-1τ^-1", "YτY^-1τ^-1"),
}


def cross_check_with_wreath() -> dict[str, bool]:
    out = {}
    for name, rec in (("rays", rays()), ("heisenberg", heisenberg())):
        for rel in WREATH_RELATIONS[name]:
            out[f"{name}: {rel.replace(' ', '')} = ε"] = rec.is_trivial(rel.replace(" ", ""))
    return out


def verify_all(samples: int = 1000, seed: int = 0) -> dict[str, bool]:
    checks: dict[str, bool] = {}
    checks.update(relation_checks(seed=seed))
    checks.update(automorphism_checks(samples, seed))
    for name, res in verify_conjugation_identities(samples, seed).items():
        checks[f"stabilizer identity {name}"] = not res["failures"]
    checks.update({f"lattice: {k}": v for k, v in lattice_check(seed=seed).items()})
    checks.update(cross_check_with_wreath())
    return checks
