"""Tripods, folding and unfolding of marked trees, itineraries and the triangle coding.

A tripod is a triple of leg lengths ``(x1, x2, x3)`` for the legs ``Z_αO``,
``Z_βO`` and ``Z_γO``. Itinerary symbols 𝟏 and 𝟐 are the ints 1 and 2.
Exact parts use :class:`fractions.Fraction`; the triangle coding ψ returns floats.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

Tripod = tuple  # (x1, x2, x3)
MARKS = ("α", "β", "γ")

STRICT = "strict"  # 𝟏 iff x3 > x1, ties go to 𝟐
WEAK = "weak"  # 𝟏 iff x1 <= x3


def as_tripod(legs: Iterable) -> tuple[Fraction, Fraction, Fraction]:
    t = tuple(Fraction(x) for x in legs)
    if len(t) != 3 or any(x < 0 for x in t) or sum(t) == 0:
        raise ValueError(f"not a tripod: {legs}")
    return t  # type: ignore[return-value]


def mass(t: Sequence) -> Fraction:
    return sum(t, Fraction(0)) if isinstance(t[0], Fraction) else sum(t)


def normalize(t: Sequence) -> tuple:
    m = mass(t)
    return tuple(x / m for x in t)


def fold(t: Sequence) -> tuple:
    """F(x, y, z) = (|x - z|, 2 min(x, z), y)."""
    x, y, z = t
    return (abs(x - z), 2 * min(x, z), y)


def fold_half(t: Sequence) -> tuple:
    """F₁: fold the path Z_α Z_γ in two."""
    x, y, z = t
    return (abs(x - z) / 2, min(x, z), y)


def fold_normalized(t: Sequence) -> tuple:
    """F̃ on normalized tripods."""
    x, y, z = t
    d = 1 + y
    return (abs(x - z) / d, 2 * min(x, z) / d, 2 * y / d)


def unfold_branch(i: int, t: Sequence) -> tuple:
    """The inverse branches Φ̃₁, Φ̃₂ of F̃."""
    x, y, z = t
    d = 1 + x + y
    if i == 1:
        return (y / d, z / d, (2 * x + y) / d)
    if i == 2:
        return ((2 * x + y) / d, z / d, y / d)
    raise ValueError(f"branch must be 1 or 2, got {i}")


def symbol(t: Sequence, tie: str = STRICT) -> int:
    x, _, z = t
    if tie == STRICT:
        return 1 if z > x else 2
    if tie == WEAK:
        return 1 if x <= z else 2
    raise ValueError(f"unknown tie convention {tie!r}")


def itinerary(t: Sequence, n: int, tie: str = STRICT, step=fold) -> tuple[int, ...]:
    """First n symbols along the orbit of ``step`` (F, F₁ and F̃ share itineraries)."""
    out = []
    for _ in range(n):
        out.append(symbol(t, tie))
        t = step(t)
    return tuple(out)


def iterate(step, t, n: int):
    for _ in range(n):
        t = step(t)
    return t


def two_step_mass(t: Sequence):
    """Mass of F₁²(T) in closed form."""
    x, y, z = t
    return (3 * x + 2 * y + z) / 4 if x <= z else (x + 2 * y + 3 * z) / 4


# -- marked trees -------------------------------------------------------------
@dataclass
class MarkedTree:
    """A finite metric tree with marked vertices Z_α, Z_β, Z_γ.

    ``origin`` maps each vertex to the vertex it covers in the tree this one was
    unfolded from; ``copies`` counts the tripod copies the tree is made of.
    """

    adj: dict[int, dict[int, Fraction]]
    marks: dict[str, int]
    origin: dict[int, int] = field(default_factory=dict)
    copies: int = 1

    @property
    def vertices(self) -> list[int]:
        return sorted(self.adj)

    def edges(self) -> list[tuple[int, int, Fraction]]:
        return [(u, v, w) for u in sorted(self.adj) for v, w in sorted(self.adj[u].items()) if u < v]

    def total_length(self):
        return sum((w for _, _, w in self.edges()), Fraction(0))

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def is_tree(self) -> bool:
        if not self.adj:
            return False
        n_edges = sum(len(a) for a in self.adj.values()) // 2
        return n_edges == len(self.adj) - 1 and len(self.distances(next(iter(self.adj)))) == len(self.adj)

    def distances(self, source: int) -> dict[int, Fraction]:
        dist = {source: Fraction(0)}
        stack = [source]
        while stack:
            u = stack.pop()
            for v, w in self.adj[u].items():
                if v not in dist:
                    dist[v] = dist[u] + w
                    stack.append(v)
        return dist

    def mark_distances(self) -> dict[str, Fraction]:
        """Pairwise distances between the marked points."""
        out = {}
        for i, p in enumerate(MARKS):
            d = self.distances(self.marks[p])
            for q in MARKS[i + 1:]:
                out[p + q] = d[self.marks[q]]
        return out

    def hubbard_legs(self) -> tuple[Fraction, Fraction, Fraction]:
        """Leg lengths of the convex hull of the three marks."""
        d = self.mark_distances()
        ab, ag, bg = d["αβ"], d["αγ"], d["βγ"]
        return ((ab + ag - bg) / 2, (ab + bg - ag) / 2, (ag + bg - ab) / 2)

    def degree_histogram(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for v in self.adj:
            out[self.degree(v)] = out.get(self.degree(v), 0) + 1
        return dict(sorted(out.items()))

    def canonical(self):
        """Isomorphism invariant of the marked metric tree (complete for trees).

        Unmarked vertices of degree two are suppressed, then the tree is rooted at
        Z_α and encoded recursively by marks and sorted (length, child) pairs.
        """
        adj = {u: dict(a) for u, a in self.adj.items()}
        marked = set(self.marks.values())
        for v in list(adj):
            if v not in marked and len(adj[v]) == 2:
                (a, wa), (b, wb) = adj[v].items()
                del adj[a][v], adj[b][v]
                adj[a][b] = adj[b][a] = wa + wb
                del adj[v]
        labels = {v: "".join(p for p in MARKS if self.marks[p] == v) for v in adj}

        def code(v, parent):
            kids = sorted((adj[v][c], code(c, v)) for c in adj[v] if c != parent)
            return (labels[v], tuple(kids))

        return code(self.marks["α"], None)

    def to_json(self) -> dict:
        return {
            "vertices": self.vertices,
            "edges": [[u, v, str(w)] for u, v, w in self.edges()],
            "marks": {f"Z_{p}": v for p, v in self.marks.items()},
            "copies": self.copies,
            "total_length": str(self.total_length()),
        }


def tripod_tree(legs: Sequence) -> MarkedTree:
    """The tripod as a marked tree; feet on zero legs coincide with the center."""
    t = as_tripod(legs)
    adj: dict[int, dict[int, Fraction]] = {0: {}}
    marks = {}
    for k, (p, x) in enumerate(zip(MARKS, t), start=1):
        if x == 0:
            marks[p] = 0
        else:
            adj[k] = {0: x}
            adj[0][k] = x
            marks[p] = k
    return MarkedTree(adj, marks, {v: v for v in adj}, 1)


def unfold_tree(i: int, T: MarkedTree) -> MarkedTree:
    """Φᵢ: two copies of T glued at their Z_α points, then relabeled."""
    if len(set(T.marks.values())) == 1:
        raise ValueError("all marked points coincide")
    if i not in (1, 2):
        raise ValueError(f"branch must be 1 or 2, got {i}")
    root = T.marks["α"]
    shift = max(T.adj) + 1
    second = {v: (root if v == root else v + shift) for v in T.adj}
    adj: dict[int, dict[int, Fraction]] = {}
    origin: dict[int, int] = {}
    for relabel in ({v: v for v in T.adj}, second):
        for u, nbrs in T.adj.items():
            ru = relabel[u]
            origin[ru] = u
            row = adj.setdefault(ru, {})
            for v, w in nbrs.items():
                row[relabel[v]] = w
    marks = {
        "α": T.marks["β"],
        "γ": second[T.marks["β"]],
        "β": T.marks["γ"] if i == 1 else second[T.marks["γ"]],
    }
    return MarkedTree(adj, marks, origin, 2 * T.copies)


def unfold_word(T: MarkedTree, word: Sequence[int]) -> MarkedTree:
    """Apply Φ_{w₁} first and Φ_{w_last} last."""
    for i in word:
        T = unfold_tree(i, T)
    return T


def fiber_tree(legs: Sequence, word: Sequence[int] = ()) -> MarkedTree:
    """Fiber over the tripod point with symbolic word u: Φ_{uₙ}∘⋯∘Φ_{u₁}(tripod)."""
    return unfold_word(tripod_tree(legs), word)


def fiber_tree_by_itinerary(legs: Sequence, n: int, tie: str = STRICT) -> MarkedTree:
    """Φ_{k₁}∘⋯∘Φ_{kₙ}(Fⁿ(t)) where k is the F-itinerary of t."""
    t = as_tripod(legs)
    k = itinerary(t, n, tie)
    return fiber_tree(iterate(fold, t, n), tuple(reversed(k)))


def grow_tree(legs: Sequence, n: int, tie: str = WEAK) -> MarkedTree:
    """T⁽ⁿ⁾ = Φ_{k₁}∘⋯∘Φ_{kₙ}(F₁ⁿ(T)) with the F₁-itinerary k of T."""
    t = as_tripod(legs)
    k = itinerary(t, n, tie, fold_half)
    return fiber_tree(iterate(fold_half, t, n), tuple(reversed(k)))


def hausdorff_step(legs: Sequence, n: int) -> Fraction:
    """Length of the branch added from T⁽ⁿ⁾ to T⁽ⁿ⁺¹⁾: the leg OZ_β of F₁ⁿ(T)."""
    return iterate(fold_half, as_tripod(legs), n)[1]


def below_power_bound(value, d, n: int, strict: bool = True) -> bool:
    """Exact test of value < d / 2^((n-1)/2) (or <=) for nonnegative rationals."""
    lhs = value * value * Fraction(2) ** (n - 1)
    return lhs < d * d if strict else lhs <= d * d


def random_tripod(rng: random.Random, den: int = 1000) -> tuple[Fraction, Fraction, Fraction]:
    while True:
        t = tuple(Fraction(rng.randint(0, den), den) for _ in range(3))
        if sum(t) > 0:
            return t  # type: ignore[return-value]


def random_simplex_point(rng: random.Random, den: int = 10**6) -> tuple[Fraction, Fraction, Fraction]:
    """A rational point of Δ with all coordinates positive."""
    while True:
        a, b = sorted(rng.randint(1, den - 1) for _ in range(2))
        if 0 < a < b < den:
            return (Fraction(a, den), Fraction(b - a, den), Fraction(den - b, den))


# -- the triangle coding --------------------------------------------------------
B1 = ((0, 1, 0), (0, 0, 1), (2, 1, 0))
B2 = ((2, 1, 0), (0, 0, 1), (0, 1, 0))
B = {1: B1, 2: B2}


def mat_mul(P, Q):
    return tuple(tuple(sum(P[i][k] * Q[k][j] for k in range(3)) for j in range(3)) for i in range(3))


def code_matrix(word: Sequence[int]):
    M = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    for i in word:
        M = mat_mul(M, B[i])
    return M


def column_sums(M) -> tuple[int, int, int]:
    return tuple(sum(M[r][c] for r in range(3)) for c in range(3))  # type: ignore[return-value]


def code_triangle(word: Sequence[int]) -> list[tuple[Fraction, ...]]:
    """Vertices of Δ_{i₁…iₙ}: the normalized columns of B_{i₁}⋯B_{iₙ}."""
    M = code_matrix(word)
    sums = column_sums(M)
    return [tuple(Fraction(M[r][c], sums[c]) for r in range(3)) for c in range(3)]


def psi_exact(p: Sequence, depth: int, tie: str = STRICT) -> tuple[Fraction, ...]:
    """Barycenter of the triangle coded by the first ``depth`` symbols of p's F-itinerary."""
    verts = code_triangle(itinerary(as_tripod(p), depth, tie))
    return tuple(sum(v[r] for v in verts) / 3 for r in range(3))


def psi(p: Sequence, depth: int = 40, tie: str = STRICT) -> tuple[float, float, float]:
    return tuple(float(x) for x in psi_exact(p, depth, tie))  # type: ignore[return-value]


def psi_residual(p: Sequence, depth: int = 40, tie: str = STRICT) -> float:
    """‖ψ(F(p)) − F̃(ψ(p))‖₁, with F̃ evaluated exactly on the exact barycenter."""
    p = normalize(as_tripod(p))
    lhs = psi_exact(fold(p), depth, tie)
    rhs = fold_normalized(psi_exact(p, depth, tie))
    return float(sum(abs(a - b) for a, b in zip(lhs, rhs)))


def ratio_bounds_hold(sums: tuple[int, int, int]) -> bool:
    """1/3 < a/c < 3, 1/3 < a/b < 3/2, 1/3 < c/b < 3/2 in integer arithmetic."""
    a, b, c = sums
    return (
        c < 3 * a < 9 * c
        and b < 3 * a and 2 * a < 3 * b
        and b < 3 * c and 2 * c < 3 * b
    )


def ratio_bounds_check(max_len: int = 16) -> dict:
    """Walk all words up to max_len, multiplying the B-matrices exactly."""
    checked = 0
    failures = []
    stack = [((), ((1, 0, 0), (0, 1, 0), (0, 0, 1)))]
    while stack:
        word, M = stack.pop()
        if len(word) == max_len:
            continue
        for i in (1, 2):
            P = mat_mul(M, B[i])
            w = word + (i,)
            checked += 1
            if not ratio_bounds_hold(column_sums(P)) and len(failures) < 10:
                failures.append("".join(map(str, w)))
            stack.append((w, P))
    return {"words_checked": checked, "max_len": max_len, "failures": failures, "ok": not failures}


# -- finite tree slices and the tent map ------------------------------------------
def is_finite_tree_slice(legs: Sequence, max_iter: int = 10_000) -> tuple[bool | None, int, str]:
    """Whether the F-orbit reaches (1, 0, 0). Returns (verdict, steps, reason)."""
    t = normalize(as_tripod(legs))
    target = (Fraction(1), Fraction(0), Fraction(0))
    seen = {}
    for n in range(max_iter + 1):
        if t == target:
            return True, n, "reached (1, 0, 0)"
        if t in seen:
            return False, n, f"cycle of length {n - seen[t]} entered at step {seen[t]}"
        seen[t] = n
        t = fold(t)
    return None, max_iter, "undecided"


def _point_distance(T: MarkedTree, source: int, point: tuple[int, int, Fraction]) -> Fraction:
    """Distance from a vertex to the point at offset s along edge (u, v)."""
    u, v, s = point
    d = T.distances(source)
    return min(d[u] + s, d[v] + T.adj[u][v] - s)


def _locate(T: MarkedTree, path: list[int], dist: Fraction) -> tuple[int, int, Fraction]:
    for u, v in zip(path, path[1:]):
        w = T.adj[u][v]
        if dist <= w:
            return u, v, dist
        dist -= w
    raise ValueError("distance beyond the end of the path")


def _path(T: MarkedTree, a: int, b: int) -> list[int]:
    parent = {a: None}
    stack = [a]
    while stack:
        u = stack.pop()
        for v in T.adj[u]:
            if v not in parent:
                parent[v] = u
                stack.append(v)
    out = [b]
    while out[-1] != a:
        out.append(parent[out[-1]])
    return out[::-1]


def tent_map_check(grid: int = 64) -> dict:
    """The covering of the segment fiber by its own unfolding is the tent map.

    The segment tripod (1, 0, 0) is F-invariant with itinerary 𝟐𝟐𝟐…, so Φ₂ of it,
    scaled by 1/2, is the same marked segment. A point at distance s from Z_γ is
    sent by the covering to a point at distance 1 - |2s - 1| from Z_γ.
    """
    T = tripod_tree((1, 0, 0))
    U = unfold_tree(2, T)
    path = _path(U, U.marks["γ"], U.marks["α"])
    bad = []
    for k in range(grid + 1):
        s = Fraction(k, grid)
        u, v, off = _locate(U, path, 2 * s)
        image = (U.origin[u], U.origin[v], off)
        got = _point_distance(T, T.marks["γ"], image)
        want = 1 - abs(2 * s - 1)
        if got != want:
            bad.append(str(s))
    return {
        "grid": grid,
        "segment": U.hubbard_legs() == (Fraction(2), Fraction(0), Fraction(0)),
        "failures": bad,
        "ok": not bad,
    }


# -- property sweeps -------------------------------------------------------------
def mass_conservation_check(samples: int = 10_000, seed: int = 0) -> bool:
    rng = random.Random(seed)
    return all(mass(fold(t)) == mass(t) for t in (random_tripod(rng) for _ in range(samples)))


def section_check(samples: int = 100, seed: int = 0) -> dict[str, bool]:
    """F̃∘Φ̃ᵢ = id and the images of Φ̃₁, Φ̃₂ lie on either side of x = z."""
    rng = random.Random(seed)
    pts = [random_simplex_point(rng) for _ in range(samples)]
    corners = [(Fraction(1), Fraction(0), Fraction(0)), (Fraction(0), Fraction(1), Fraction(0)), (Fraction(0), Fraction(0), Fraction(1))]
    out = {}
    for i in (1, 2):
        imgs = [unfold_branch(i, p) for p in pts + corners]
        out[f"F̃∘Φ̃{i} = id"] = all(fold_normalized(q) == p for p, q in zip(pts + corners, imgs))
        out[f"Φ̃{i} is normalized"] = all(mass(q) == 1 for q in imgs)
        side = (lambda q: q[0] <= q[2]) if i == 1 else (lambda q: q[0] >= q[2])
        out[f"Φ̃{i} lands in its half"] = all(side(q) for q in imgs)
    return out


def two_step_check(samples: int = 1000, seed: int = 0) -> dict[str, bool]:
    rng = random.Random(seed)
    ts = [random_tripod(rng) for _ in range(samples)]
    return {
        "closed form of mass(F₁²)": all(mass(iterate(fold_half, t, 2)) == two_step_mass(t) for t in ts),
        "mass(F₁²(T)) ≤ mass(T)/2": all(2 * mass(iterate(fold_half, t, 2)) <= mass(t) for t in ts),
    }


def hausdorff_check(samples: int = 100, max_n: int = 12, seed: int = 0, tree_n: int = 6) -> dict[str, bool]:
    """dₙ < d/2^((n-1)/2) and dₙ ≤ mass(F₁ⁿ(T)); tree growth matches the added branches."""
    rng = random.Random(seed)
    ok_bound = ok_mass = ok_growth = ok_hubbard = True
    for k in range(samples):
        t = random_tripod(rng)
        d = mass(t)
        for n in range(max_n + 1):
            dn = hausdorff_step(t, n)
            m = mass(iterate(fold_half, t, n))
            ok_bound &= below_power_bound(dn, d, n)
            ok_mass &= dn <= m and below_power_bound(m, d, n, strict=False)
        if k < 10:
            prev = grow_tree(t, 0)
            for n in range(tree_n):
                nxt = grow_tree(t, n + 1)
                ok_growth &= nxt.total_length() - prev.total_length() == 2**n * hausdorff_step(t, n)
                ok_hubbard &= nxt.hubbard_legs() == t
                prev = nxt
    return {
        "dₙ < d/2^((n-1)/2)": ok_bound,
        "dₙ ≤ mass(F₁ⁿ(T))": ok_mass,
        "T⁽ⁿ⁺¹⁾ adds 2ⁿ branches of length dₙ": ok_growth,
        "Hubbard tripod of T⁽ⁿ⁾ is T": ok_hubbard,
    }


def psi_check(samples: int = 1000, depth: int = 40, seed: int = 0, tie: str = STRICT) -> dict:
    rng = random.Random(seed)
    residuals = []
    itineraries_agree = True
    for k in range(samples):
        p = random_simplex_point(rng)
        residuals.append(psi_residual(p, depth, tie))
        if k < 100:
            q = psi_exact(p, depth, tie)
            itineraries_agree &= itinerary(q, depth, tie, fold_normalized) == itinerary(p, depth, tie)
    corner_err = 0.0
    for c in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
        q = psi_exact(c, depth, tie)
        corner_err = max(corner_err, float(sum(abs(a - b) for a, b in zip(q, c))))
    return {
        "depth": depth,
        "samples": samples,
        "max_residual": max(residuals),
        "mean_residual": sum(residuals) / len(residuals),
        "itineraries_agree": itineraries_agree,
        "corner_error": corner_err,
    }


def itinerary_conventions_agree(samples: int = 1000, n: int = 20, seed: int = 0) -> bool:
    """Off the tie set both conventions give the same symbols."""
    rng = random.Random(seed)
    for _ in range(samples):
        t = random_simplex_point(rng)
        orbit = [iterate(fold, t, k) for k in range(n)]
        if any(o[0] == o[2] for o in orbit):
            continue
        if itinerary(t, n, STRICT) != itinerary(t, n, WEAK):
            return False
    return True
