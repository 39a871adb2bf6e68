"""Numerical and exact checks on f[z:w:u] = [(w−2z)² : (w−2u)² : w²].

Floating-point iteration decides escape to the superattracting point [1:0:0]
and samples slices w = w₀. The base map w ↦ (1 − 2/w)² is iterated exactly
over the Gaussian rationals, with ∞ as an explicit value.
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import isqrt
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import tripod


# -- floating-point dynamics -------------------------------------------------------
def step_f(p):
    """One step on homogeneous coordinates, renormalized so the largest modulus is 1."""
    z, w, u = (complex(c) for c in p)
    out = ((w - 2 * z) ** 2, (w - 2 * u) ** 2, w * w)
    m = max(abs(c) for c in out)
    if m == 0:
        raise ValueError("f is undefined at [0:0:0]")
    return tuple(c / m for c in out)


def _step_arrays(z, w, u):
    z, w, u = (w - 2 * z) ** 2, (w - 2 * u) ** 2, w * w
    m = np.maximum(np.maximum(np.abs(z), np.abs(w)), np.abs(u))
    return z / m, w / m, u / m


def escapes(z, w, N: int = 500, eps: float = 1e-6) -> bool:
    """Whether the affine point (z, w) enters the chart |w|, |u| < eps of [1:0:0] within N steps."""
    p = (complex(z), complex(w), 1)
    m = max(abs(c) for c in p)
    p = tuple(c / m for c in p)
    for _ in range(N + 1):
        if abs(p[1]) < eps and abs(p[2]) < eps:
            return True
        p = step_f(p)
    return False


class SliceSample(NamedTuple):
    w0: complex
    center: complex
    radius: float
    resolution: int
    N: int = 500
    eps: float = 1e-6

    @property
    def pixel(self) -> float:
        return 2 * self.radius / self.resolution

    def grid(self) -> np.ndarray:
        """Sample points: the lower-left corner of each pixel, row 0 at the top."""
        k = np.arange(self.resolution)
        x = self.center.real - self.radius + k * self.pixel
        y = self.center.imag - self.radius + k * self.pixel
        return x[None, :] + 1j * y[::-1, None]


def sample_slice(spec: SliceSample) -> np.ndarray:
    """Escape time per pixel of the slice w = w₀; -1 marks pixels that never escape."""
    Z = spec.grid().ravel()
    z = Z.astype(np.complex128)
    w = np.full_like(z, complex(spec.w0))
    u = np.ones_like(z)
    m = np.maximum(np.maximum(np.abs(z), np.abs(w)), np.abs(u))
    z, w, u = z / m, w / m, u / m
    times = np.full(z.shape, -1, dtype=np.int64)
    active = np.arange(z.size)
    for n in range(spec.N + 1):
        done = (np.abs(w) < spec.eps) & (np.abs(u) < spec.eps)
        times[active[done]] = n
        keep = ~done
        active, z, w, u = active[keep], z[keep], w[keep], u[keep]
        if active.size == 0 or n == spec.N:
            break
        z, w, u = _step_arrays(z, w, u)
    return times.reshape(spec.resolution, spec.resolution)


def to_ppm(times: np.ndarray, path: str | Path | None = None) -> bytes:
    """Binary P6 image: never-escaping pixels black, the rest shaded by log escape time."""
    top = max(int(times.max()), 1)
    level = np.log1p(np.maximum(times, 0)) / np.log1p(top)
    shade = np.where(times < 0, 0, np.rint(255 * (1 - level))).astype(np.uint8)
    rgb = np.repeat(shade[:, :, None], 3, axis=2)
    h, w = times.shape
    data = f"P6\n{w} {h}\n255\n".encode() + rgb.tobytes()
    if path is not None:
        Path(path).write_bytes(data)
    return data


def read_ppm(data: bytes) -> np.ndarray:
    parts = data.split(b"\n", 3)
    if parts[0] != b"P6":
        raise ValueError("not a binary PPM")
    w, h = map(int, parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w, 3)


def segment_slice_check(resolution: int = 400, N: int = 500) -> dict:
    """At w₀ = 1 the non-escaping pixels should hug the real segment [0, 1]."""
    spec = SliceSample(1, complex(0.5, 0), 1.0, resolution, N)
    times = sample_slice(spec)
    Z = spec.grid()
    stuck = Z[times < 0]
    px = spec.pixel
    near = (np.abs(stuck.imag) <= px) & (stuck.real >= -px) & (stuck.real <= 1 + px)
    frac = float(near.mean()) if stuck.size else 0.0
    return {
        "non_escaping": int(stuck.size),
        "within_one_pixel": int(near.sum()),
        "fraction": frac,
        "ok": stuck.size > 0 and frac >= 0.99,
    }


# -- exact Gaussian rationals with ∞ ------------------------------------------------
class Q(NamedTuple):
    re: Fraction
    im: Fraction = Fraction(0)

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


INF = "∞"


def q(re, im=0) -> Q:
    return Q(Fraction(re), Fraction(im))


def parse_point(text: str):
    """Read "2", "1/2", "2i", "1+2i", "-3/4-1/2i" or "inf"/"∞"."""
    t = text.strip().replace(" ", "")
    if t in ("inf", "∞", "oo"):
        return INF
    if not t.endswith("i"):
        return q(Fraction(t))
    body = t[:-1]
    cut = max(body.rfind("+"), body.rfind("-"))
    if cut > 0:
        re, im = body[:cut], body[cut:]
    else:
        re, im = "0", body
    if im in ("", "+"):
        im = "1"
    elif im == "-":
        im = "-1"
    return q(Fraction(re), Fraction(im))


def _mul(a: Q, b: Q) -> Q:
    return Q(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re)


def _inv(a: Q) -> Q:
    n = a.re * a.re + a.im * a.im
    return Q(a.re / n, -a.im / n)


ZERO, ONE, TWO = q(0), q(1), q(2)


def base_map(w):
    """ŵ(w) = (1 − 2/w)², with 0 ↦ ∞ and ∞ ↦ 1."""
    if w == INF:
        return ONE
    if w == ZERO:
        return INF
    r = _inv(w)
    t = Q(1 - 2 * r.re, -2 * r.im)
    return _mul(t, t)


def _bits(w) -> int:
    if w == INF:
        return 0
    return max(c.numerator.bit_length() + c.denominator.bit_length() for c in w)


def base_orbit(w0, max_iter: int = 100, max_bits: int = 4096) -> dict:
    """Exact forward orbit, stopped at 1, at a repeat, or when the heights explode."""
    orbit = [w0]
    seen = {w0: 0}
    w = w0
    status = "budget exhausted"
    for _ in range(max_iter):
        if w == ONE:
            status = "reached 1"
            break
        w = base_map(w)
        if w in seen:
            status = f"cycle entered at step {seen[w]}"
            orbit.append(w)
            break
        seen[w] = len(orbit)
        orbit.append(w)
        if _bits(w) > max_bits:
            status = "height exceeds bound"
            break
    else:
        if w == ONE:
            status = "reached 1"
    return {"orbit": [_short(x) for x in orbit], "status": status, "hits_1": status == "reached 1"}


def _short(w) -> str:
    b = _bits(w)
    return str(w) if b <= 256 else f"<{b}-bit value>"


def _rational_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    a, b = isqrt(x.numerator), isqrt(x.denominator)
    return Fraction(a, b) if a * a == x.numerator and b * b == x.denominator else None


def gaussian_sqrt(c: Q) -> Q | None:
    """A square root in ℚ(i), or None when there is none."""
    r = _rational_sqrt(c.re * c.re + c.im * c.im)
    if r is None:
        return None
    x = _rational_sqrt((c.re + r) / 2)
    if x is not None and x != 0:
        return Q(x, c.im / (2 * x))
    y = _rational_sqrt((r - c.re) / 2)
    if y is not None and y != 0:
        return Q(c.im / (2 * y), y)
    return ZERO if c == ZERO else None


def base_preimages(w) -> list:
    """All preimages of w under ŵ in ℚ(i) ∪ {∞}."""
    if w == INF:
        return [ZERO]
    out = []
    s = gaussian_sqrt(w)
    if s is None:
        return out
    for root in {s, Q(-s.re, -s.im)}:
        # 1 − 2/v = root
        d = Q(1 - root.re, -root.im)
        out.append(INF if d == ZERO else _mul(TWO, _inv(d)))
    return sorted(set(out), key=str)


def backward_orbit_of_1(max_depth: int = 50) -> list:
    """The Gaussian-rational points that eventually map to 1; the search stops when no new points appear."""
    found = [ONE]
    frontier = [ONE]
    for _ in range(max_depth):
        nxt = []
        for w in frontier:
            for v in base_preimages(w):
                if v not in found:
                    found.append(v)
                    nxt.append(v)
        if not nxt:
            break
        frontier = nxt
    return found


def base_preperiodic_to_1(w0, max_iter: int = 100) -> bool:
    """Exact decision: w₀ lies in the (finite) backward orbit of 1.

    The forward orbit is also computed and must agree whenever it terminates.
    """
    w0 = parse_point(w0) if isinstance(w0, str) else w0
    verdict = w0 in backward_orbit_of_1()
    orbit = base_orbit(w0, max_iter)
    decided = orbit["hits_1"] or orbit["status"].startswith("cycle")
    if decided and orbit["hits_1"] != verdict:
        raise AssertionError(f"forward orbit of {w0} disagrees with the backward orbit")
    return verdict


# slices whose Hubbard tripod is degenerate, matched with tripods by their position on the orbit to 1
TRIPOD_OF_SLICE = {
    "2": (Fraction(1, 2), Fraction(0), Fraction(1, 2)),
    "0": (Fraction(0), Fraction(1), Fraction(0)),
    INF: (Fraction(0), Fraction(0), Fraction(1)),
    "1": (Fraction(1), Fraction(0), Fraction(0)),
}


def tripod_cross_check(w0, max_iter: int = 100) -> dict:
    """Base preperiodicity against finiteness of the tripod fiber, on the comparable slices."""
    w = parse_point(w0) if isinstance(w0, str) else w0
    key = INF if w == INF else str(w)
    base = base_preperiodic_to_1(w, max_iter)
    if key not in TRIPOD_OF_SLICE:
        return {"w0": key, "base": base, "comparable": False}
    legs = TRIPOD_OF_SLICE[key]
    verdict, steps, _ = tripod.is_finite_tree_slice(legs)
    orbit = base_orbit(w, max_iter)
    base_steps = orbit["orbit"].index("1") if base else None
    return {
        "w0": key,
        "base": base,
        "tripod": verdict,
        "comparable": True,
        "base_steps": base_steps,
        "tripod_steps": steps,
        "ok": base == verdict and base_steps == steps,
    }


# -- exact checks on the projective map ---------------------------------------------
def f_exact(p: tuple[Q, Q, Q]) -> tuple[Q, Q, Q]:
    z, w, u = p

    def sub2(a: Q, b: Q) -> Q:
        return Q(a.re - 2 * b.re, a.im - 2 * b.im)

    a, b = sub2(w, z), sub2(w, u)
    return _mul(a, a), _mul(b, b), _mul(w, w)


def _on_line(name: str, p) -> bool:
    z, w, u = p
    return {
        "w=2z": w == Q(2 * z.re, 2 * z.im),
        "z=0": z == ZERO,
        "z=u": z == u,
        "z=w": z == w,
        "w=0": w == ZERO,
        "w=u": w == u,
        "u=0": u == ZERO,
    }[name]


POSTCRITICAL = ("z=0", "z=u", "z=w", "w=0", "w=u", "u=0")
CRITICAL_CHAIN = ("w=2z", "z=0", "z=u", "z=w", "z=u")


def _random_q(rng: random.Random) -> Q:
    return q(Fraction(rng.randint(-20, 20), rng.randint(1, 9)), Fraction(rng.randint(-20, 20), rng.randint(1, 9)))


def _point_on(name: str, rng: random.Random):
    a, b = _random_q(rng), _random_q(rng)
    return {
        "w=2z": (a, Q(2 * a.re, 2 * a.im), b),
        "z=0": (ZERO, a, b),
        "z=u": (a, b, a),
        "z=w": (a, a, b),
        "w=0": (a, ZERO, b),
        "w=u": (a, b, b),
        "u=0": (a, b, ZERO),
    }[name]


def line_images(samples: int = 50, seed: int = 0) -> dict[str, list[str]]:
    """For each line, the post-critical lines containing the images of all sampled points."""
    rng = random.Random(seed)
    out = {}
    for name in ("w=2z",) + POSTCRITICAL:
        images = [f_exact(_point_on(name, rng)) for _ in range(samples)]
        out[name] = [m for m in POSTCRITICAL if all(_on_line(m, p) for p in images)]
    return out


def postcritical_checks(samples: int = 50, seed: int = 0) -> dict[str, bool]:
    images = line_images(samples, seed)
    chain_ok = all(CRITICAL_CHAIN[k + 1] in images[CRITICAL_CHAIN[k]] for k in range(len(CRITICAL_CHAIN) - 1))
    return {
        "post-critical lines are forward invariant": all(images[m] for m in POSTCRITICAL),
        "critical line w=2z follows z=0, z=u, z=w, z=u": chain_ok,
    }


def oracle_report(resolution: int = 400, N: int = 500) -> dict:
    orbits = {k: base_orbit(parse_point(k)) for k in ("2", "inf", "1", "5")}
    return {
        "slice_w0_1": segment_slice_check(resolution, N),
        "orbit_2": orbits["2"],
        "orbit_inf": orbits["inf"],
        "orbit_5": {"status": orbits["5"]["status"], "steps": len(orbits["5"]["orbit"]) - 1},
        "backward_orbit_of_1": [str(x) for x in backward_orbit_of_1()],
        "cross_checks": [tripod_cross_check(k) for k in ("1", "inf", "0", "2", "5")],
        "postcritical": postcritical_checks(),
    }
