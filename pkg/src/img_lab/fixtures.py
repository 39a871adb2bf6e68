"""The recursions studied in this package, as ready-made values."""

from __future__ import annotations

from functools import lru_cache

from .wreath import Rule, WreathRecursion, perm_from_cycles
from .words import WordParser

X4 = ("1", "2", "3", "4")
X2 = ("1", "2")
ID4 = "()"

# root permutations of the four-letter alphabet
SIGMA = "(12)(34)"
PI_GAMMA = "(13)(24)"
# the other pairing, kept for comparison experiments
PI_ALT = "(14)(23)"


def _build(name, alphabet, spec, involutions=()):
    parser = WordParser(spec)
    d = len(alphabet)
    rules = {}
    for g, (cycles, secs) in spec.items():
        rules[g] = Rule(perm_from_cycles(cycles, d), tuple(parser.parse(s) for s in secs))
    return WreathRecursion(name, alphabet, rules, involutions)


@lru_cache(maxsize=None)
def gamma() -> WreathRecursion:
    """The index-two extension Γ = ⟨α, β, γ, a, b, c⟩ acting on {1,2,3,4}*."""
    spec = {
        "α": (SIGMA, ("ε", "ε", "ε", "ε")),
        "β": (ID4, ("α", "γ", "α", "γ")),
        "γ": (ID4, ("β", "ε", "ε", "β")),
        "a": (PI_GAMMA, ("ε", "ε", "ε", "ε")),
        "b": (ID4, ("aα", "aα", "c", "c")),
        "c": (ID4, ("bβ", "bβ", "b", "b")),
    }
    return _build("gamma", X4, spec, involutions="αβγabc")


@lru_cache(maxsize=None)
def img_f(pi: str = PI_GAMMA) -> WreathRecursion:
    """The iterated monodromy group on generators α, β, γ, s, t.

    ``pi`` is the root permutation of ``s``; see the decisions log for why the
    default pairs 1 with 3.
    """
    r = "βαβ^-1γβt^-1s^-1"
    spec = {
        "α": (SIGMA, ("ε", "ε", "ε", "ε")),
        "β": (ID4, ("α", "γ", "α", "β^-1γβ")),
        "γ": (ID4, ("β", "ε", "ε", "β")),
        "s": (pi, ("ε", "β^-1", "ε", "β")),
        "t": (ID4, (r, r, "t", "t")),
    }
    return _build("img-f" if pi == PI_GAMMA else "img-f" + pi, X4, spec)


@lru_cache(maxsize=None)
def gamma_hat() -> WreathRecursion:
    """The binary quotient ⟨a, b, c⟩ with a = σ, b = (a, c), c = (b, b)."""
    spec = {
        "a": ("(12)", ("ε", "ε")),
        "b": ("()", ("a", "c")),
        "c": ("()", ("b", "b")),
    }
    return _build("gamma-hat", X2, spec, involutions="abc")


@lru_cache(maxsize=None)
def rays(pi: str = PI_GAMMA) -> WreathRecursion:
    """The external-ray group ⟨τ, s, t⟩."""
    spec = {
        "τ": (SIGMA, ("ε", "τ", "ε", "τ")),
        "s": (pi, ("ε", "ε", "ε", "ε")),
        "t": (ID4, ("t^-1s^-1τ", "t^-1s^-1τ", "t", "t")),
    }
    return _build("rays" if pi == PI_GAMMA else "rays" + pi, X4, spec)


@lru_cache(maxsize=None)
def heisenberg(pi: str = PI_GAMMA) -> WreathRecursion:
    """⟨X, Y, τ⟩ after the basis change by (s, s, 1, 1)."""
    spec = {
        "X": (pi, ("X", "X", "Yτ^-2", "Yτ^-2")),
        "Y": (pi, ("τ", "τ", "X^-1Yτ", "X^-1Yτ")),
        "τ": (SIGMA, ("ε", "τ", "ε", "τ")),
    }
    return _build("heisenberg" if pi == PI_GAMMA else "heisenberg" + pi, X4, spec)


@lru_cache(maxsize=None)
def heisenberg_binary() -> WreathRecursion:
    spec = {
        "X": ("(12)", ("X", "Y")),
        "Y": ("(12)", ("ε", "X^-1Y")),
        "τ": ("()", ("ε", "ε")),
    }
    return _build("heisenberg-binary", X2, spec)


REGISTRY = {
    "gamma": gamma,
    "img-f": img_f,
    "gamma-hat": gamma_hat,
    "rays": rays,
    "heisenberg": heisenberg,
    "heisenberg-binary": heisenberg_binary,
}


def get(name: str) -> WreathRecursion:
    try:
        return REGISTRY[name]()
    except KeyError:
        raise KeyError(f"unknown group {name!r}; choose from {sorted(REGISTRY)}") from None
