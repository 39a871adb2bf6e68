"""The ``img-lab`` command line: one subcommand group per module plus the check suites."""

from __future__ import annotations

import json
import sys
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from pathlib import Path

import click

SUITES = ("relations", "nucleus", "img-derivation", "complex", "tripod", "rays", "oracle")


@dataclass
class RunConfig:
    seed: int = 0
    nucleus_depth: int = 8
    complex_depth: int = 4
    fiber_depth: int = 3
    max_len: int = 12
    ratio_len: int = 16
    tripod_samples: int = 100
    hausdorff_n: int = 12
    mass_samples: int = 10_000
    psi_depth: int = 40
    psi_samples: int = 1000
    psi_tolerance: float = 1e-4
    norm_tolerance: float = 1e-12
    heisenberg_samples: int = 1000
    slice_resolution: int = 400
    slice_iters: int = 500

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name != "seed" and not v > 0:
                raise ValueError(f"{f.name} must be positive, got {v}")

    @classmethod
    def load(cls, path: str | Path | None = None, **overrides) -> "RunConfig":
        """Values from a TOML file, then the non-None overrides on top."""
        values = {}
        if path is not None:
            try:
                import tomllib
            except ModuleNotFoundError:  # Python < 3.11
                import tomli as tomllib
            values.update(tomllib.loads(Path(path).read_text()))
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


class Report:
    def __init__(self, suite: str, cfg: RunConfig):
        self.suite = suite
        self.cfg = cfg
        self.checks: list[dict] = []
        self.stats: dict = {}

    def add(self, anchor: str, results: dict[str, bool]) -> None:
        for name, ok in results.items():
            self.checks.append({"anchor": f"{self.suite}/{anchor}", "check": name, "ok": bool(ok)})

    def check(self, anchor: str, name: str, ok: bool) -> None:
        self.add(anchor, {name: ok})

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.checks)

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "config": asdict(self.cfg),
            "checks": self.checks,
            "stats": self.stats,
            "passed": sum(c["ok"] for c in self.checks),
            "failed": sum(not c["ok"] for c in self.checks),
            "ok": self.ok,
        }

    def text(self) -> str:
        lines = [f"suite {self.suite}"]
        for c in self.checks:
            lines.append(f"  {'PASS' if c['ok'] else 'FAIL'}  [{c['anchor']}] {c['check']}")
        for k, v in self.stats.items():
            lines.append(f"  stat  {k} = {json.dumps(v, ensure_ascii=False, sort_keys=True)}")
        lines.append(f"  {'PASS' if self.ok else 'FAIL'}  {self.suite}: {len(self.checks)} checks")
        return "\n".join(lines)


# -- suites -------------------------------------------------------------------------
def _relations(r: Report) -> None:
    from . import fixtures, relations, wreath

    for group in ("gamma", "gamma-hat", "rays", "heisenberg"):
        r.add(f"{group}", relations.check_relations(fixtures.get(group), *relations.relation_set(group)))
    r.check(
        "projection",
        "Γ → Γ̂ (α, β, γ ↦ ε) agrees with the letter map 1,2 ↦ 𝟏, 3,4 ↦ 𝟐 to depth 6",
        wreath.projection_check(
            fixtures.gamma(), fixtures.gamma_hat(), [0, 0, 1, 1],
            {"α": "ε", "β": "ε", "γ": "ε", "a": "a", "b": "b", "c": "c"}, 6,
        ),
    )
    r.check(
        "projection",
        "⟨X, Y, τ⟩ → binary ⟨X, Y⟩ (τ ↦ ε) agrees with the letter map to depth 8",
        wreath.projection_check(
            fixtures.heisenberg(), fixtures.heisenberg_binary(), [0, 0, 1, 1], {"X": "X", "Y": "Y", "τ": "ε"}, 8
        ),
    )
    par = wreath.parity_invariant_check(samples=500, depth=4, seed=r.cfg.seed)
    r.check("parity", "a/b/c parity of g equals that of g|_{1ⁿ} when g fixes 1ⁿ", par["ok"])
    r.stats["parity_words_checked"] = par["checked"]


def _nucleus(r: Report) -> None:
    from .nucleus import MAXIMAL, ORDERS, PAIRWISE, TRIPLES, NucleusLab, key_name

    lab = NucleusLab()
    r.check("size", "nucleus size = 288", len(lab.nucleus) == 288)
    for v, order in ORDERS.items():
        r.check("orders", f"|Γ_{v}| = {order}", lab.group((v,)).order == order)
    for key, gens in {**PAIRWISE, **TRIPLES}.items():
        r.check("intersections", f"{key_name(key)} = ⟨{', '.join(gens.split()) or 'ε'}⟩", lab.check_named(key, gens))
    for v, gens in MAXIMAL.items():
        r.check("maximal", f"Γ_{v} = ⟨{', '.join(gens.split())}⟩", lab.check_named((v,), gens))
    cert = lab.verify_nucleus(depth_bound=r.cfg.nucleus_depth)
    r.check("certificate", "nucleus is state-closed", cert.state_closed)
    r.check(
        "certificate",
        f"every product with a generator is absorbed within depth {r.cfg.nucleus_depth}",
        not cert.failures,
    )
    r.stats["certificate"] = cert.to_json()


def _img_derivation(r: Report) -> None:
    from .presentation import R_TEXT, derivation_diff, pi1, synthesize

    for row in derivation_diff():
        r.check("recursion", f"{row['generator']} = {row['perm']}{tuple(row['sections'])}", row["match"])
    _, secs = synthesize("t")
    r.check("recursion", f"t|_1 = t|_2 = r = {R_TEXT}", secs[0] == secs[1] == pi1(R_TEXT))


def _complex(r: Report) -> None:
    from . import complex as cx

    T = cx.tables()
    r.add("T1", cx.T1_checks(cx.build_T(1, T)))
    for n in range(r.cfg.complex_depth + 1):
        r.add("pasting", cx.pasting_checks(n, T))
    r.check("I-map", "affine formulas match the vertex table", cx.affine_matches_table())
    r.check("I-map", "each copy lands in a tetrahedron", cx.copies_land_in_tetrahedra())
    r.check("I-map", "exactly two copies collapse", cx.degenerate_copies() == [("C1ABC", 2), ("C1ABC", 3)])
    r.check("I-map", "I₁ is well defined on 𝒯₂", cx.I_well_defined(1)["ok"])
    r.add("theta", cx.theta_checks())
    rep = cx.contraction_report(r.cfg.max_len)
    tol = r.cfg.norm_tolerance
    r.check("contraction", "U-block products are similarities of ratio 2^(-n/2) (exact)", rep["U_products_are_similarities"])
    r.check("contraction", "‖V_x V_y‖ ≤ 1/√2 for all pairs", rep["max_V_pair_norm"] <= 2**-0.5 + tol)
    r.check("contraction", "linear parts are block triangular", rep["block_triangular"])
    r.check("contraction", f"max norm of products of length {r.cfg.max_len} < 1", rep["contracting"])
    r.stats["contraction_max_norms"] = [round(lv["max_norm"], 12) for lv in rep["levels"]]
    r.stats["max_V_pair_norm"] = round(rep["max_V_pair_norm"], 12)
    r.stats["euler_characteristics_T"] = [cx.build_T(n, T).euler() for n in range(r.cfg.complex_depth + 1)]
    M1 = cx.build_M(1)
    r.check("covering", "p is well defined on ℳ₁ → ℳ₀", cx.map_well_defined_M(cx.covering_p, 1)["ok"])
    r.check("covering", "ι is well defined on ℳ₁ → ℳ₀", cx.map_well_defined_M(cx.iota, 1)["ok"])
    r.stats["M_f_vectors"] = {"M0": list(cx.build_M(0).f_vector()), "M1": list(M1.f_vector())}
    for n in range(r.cfg.fiber_depth + 1):
        fib = cx.fiber_isomorphism_check(n)
        r.check("fibers", f"n={n}: ρ-fibers of ℳ are isomorphic to the unfolded tripod trees", fib["ok"])
        r.stats[f"fibers_checked_n{n}"] = fib["checked"]


def _tripod(r: Report) -> None:
    from . import tripod as tp

    cfg = r.cfg
    r.check("mass", f"F conserves mass on {cfg.mass_samples} random rational tripods", tp.mass_conservation_check(cfg.mass_samples, cfg.seed))
    r.add("sections", tp.section_check(seed=cfg.seed))
    r.add("two-step", tp.two_step_check(seed=cfg.seed))
    ratio = tp.ratio_bounds_check(cfg.ratio_len)
    r.check("ratio-bounds", f"column-sum ratio bounds for all words of length ≤ {cfg.ratio_len}", ratio["ok"])
    r.stats["ratio_words_checked"] = ratio["words_checked"]
    r.add("hausdorff", tp.hausdorff_check(cfg.tripod_samples, cfg.hausdorff_n, cfg.seed))
    tent = tp.tent_map_check()
    r.check("tent", "F on the boundary segment is the tent map", tent["ok"])
    psi = tp.psi_check(cfg.psi_samples, cfg.psi_depth, cfg.seed)
    r.check("psi", f"ψ conjugacy residual < {cfg.psi_tolerance} at depth {cfg.psi_depth}", psi["max_residual"] < cfg.psi_tolerance)
    r.check("psi", "F and F̃ itineraries agree", psi["itineraries_agree"])
    r.stats["psi_residual"] = {
        "samples": psi["samples"],
        "depth": psi["depth"],
        "max": float(f"{psi['max_residual']:.6e}"),
        "mean": float(f"{psi['mean_residual']:.6e}"),
    }
    r.check("itinerary", "strict and weak tie conventions agree off the ties", tp.itinerary_conventions_agree(seed=cfg.seed))


def _rays(r: Report) -> None:
    from . import heisenberg

    r.add("identities", heisenberg.verify_all(r.cfg.heisenberg_samples, r.cfg.seed))


def _oracle(r: Report) -> None:
    from . import julia

    cfg = r.cfg
    seg = julia.segment_slice_check(cfg.slice_resolution, cfg.slice_iters)
    r.check("slice", "w₀ = 1: ≥ 99% of non-escaping pixels within one pixel of [0, 1]", seg["ok"])
    r.stats["slice_w0_1"] = seg
    o2 = julia.base_orbit(julia.parse_point("2"))
    oinf = julia.base_orbit(julia.INF)
    r.check("orbits", "2 → 0 → ∞ → 1", o2["orbit"] == ["2", "0", "∞", "1"])
    r.check("orbits", "∞ → 1", oinf["orbit"] == ["∞", "1"])
    back = julia.backward_orbit_of_1()
    r.check("orbits", "Gaussian-rational backward orbit of 1 is {1, ∞, 0, 2}", sorted(map(str, back)) == sorted(["1", "∞", "0", "2"]))
    cross = [julia.tripod_cross_check(k) for k in ("1", "inf", "0", "2", "5", "1/2", "2i")]
    comparable = [c for c in cross if c["comparable"]]
    r.check("cross-check", f"tripod and base finiteness agree on {len(comparable)} comparable slices", bool(comparable) and all(c["ok"] for c in comparable))
    r.stats["cross_checks"] = cross
    r.add("lines", julia.postcritical_checks(seed=cfg.seed))


RUNNERS = {
    "relations": _relations,
    "nucleus": _nucleus,
    "img-derivation": _img_derivation,
    "complex": _complex,
    "tripod": _tripod,
    "rays": _rays,
    "oracle": _oracle,
}


def run_suite(name: str, cfg: RunConfig | None = None) -> Report:
    if name not in RUNNERS:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    report = Report(name, cfg or RunConfig())
    RUNNERS[name](report)
    return report


def dump(report_json: dict) -> str:
    return json.dumps(report_json, ensure_ascii=False, indent=2, sort_keys=False) + "\n"


# -- helpers ------------------------------------------------------------------------
def _emit(data, out: str | None) -> None:
    text = data if isinstance(data, str) else json.dumps(data, ensure_ascii=False, indent=2) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
        click.echo(f"wrote {out}")
    else:
        click.echo(text, nl=False)


def _legs(text: str) -> tuple[Fraction, ...]:
    parts = [Fraction(p) for p in text.split(",")]
    if len(parts) != 3:
        raise click.BadParameter("expected three comma-separated numbers")
    return tuple(parts)


def _word12(text: str) -> tuple[int, ...]:
    if any(ch not in "12" for ch in text):
        raise click.BadParameter("words use the letters 1 and 2")
    return tuple(int(ch) for ch in text)


def _complex_number(text: str) -> complex:
    from .julia import INF, parse_point

    p = parse_point(text)
    if p == INF:
        raise click.BadParameter("the slice needs a finite w0")
    return complex(float(p.re), float(p.im))


# -- commands -----------------------------------------------------------------------
@click.group()
def main():
    """Self-similar groups, complexes, tripod dynamics and Julia slices for f(z, w) = ((1 − 2z/w)², (1 − 2/w)²)."""


@main.command("suite")
@click.argument("name", type=click.Choice(SUITES + ("all",)))
@click.option("--json", "as_json", is_flag=True, help="Machine-readable report.")
@click.option("--seed", type=int, default=None)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def suite_cmd(name, as_json, seed, config_path, out):
    """Run a check suite; exit code 0 iff every check passes."""
    cfg = RunConfig.load(config_path, seed=seed)
    names = SUITES if name == "all" else (name,)
    reports = [run_suite(n, cfg) for n in names]
    if as_json:
        payload = reports[0].to_json() if len(reports) == 1 else {r.suite: r.to_json() for r in reports}
        _emit(dump(payload), out)
    else:
        _emit("\n".join(r.text() for r in reports) + "\n", out)
    sys.exit(0 if all(r.ok for r in reports) else 1)


# group
@main.group()
def group():
    """Wreath recursions and the word problem."""


@group.command("relations")
@click.option("--group", "name", default="gamma", show_default=True)
@click.option("--json", "as_json", is_flag=True)
def group_relations(name, as_json):
    from . import fixtures, relations

    res = relations.check_relations(fixtures.get(name), *relations.relation_set(name))
    if as_json:
        _emit({"group": name, "relations": res, "ok": all(res.values())}, None)
    else:
        for k, v in res.items():
            click.echo(f"{'PASS' if v else 'FAIL'}  {k}")
        click.echo(f"{name}: {sum(res.values())}/{len(res)} relations hold")
    sys.exit(0 if all(res.values()) else 1)


@group.command("order")
@click.option("--word", required=True)
@click.option("--group", "name", default="gamma", show_default=True)
@click.option("--max-order", default=64, show_default=True)
def group_order(word, name, max_order):
    from . import fixtures

    k = fixtures.get(name).order_of(word, max_order)
    click.echo(f"order of {word} in {name}: {k if k is not None else f'> {max_order} or infinite'}")


@group.command("dump")
@click.option("--group", "name", default="gamma", show_default=True)
@click.option("--out", default=None)
def group_dump(name, out):
    from . import fixtures

    _emit(fixtures.get(name).to_json(), out)


# derive-img
@main.command("derive-img")
@click.option("--json", "as_json", is_flag=True)
def derive_img(as_json):
    """Synthesize the recursion of IMG(f) and compare it with the fixture."""
    from .presentation import derivation_diff, synthesize_recursion

    rows = derivation_diff()
    if as_json:
        _emit({"recursion": synthesize_recursion().to_json(), "diff": rows}, None)
    else:
        rec = synthesize_recursion()
        for g in rec.generators:
            rule = rec.rules[g]
            perm = "".join(rec.alphabet[i] for i in rule.perm)
            click.echo(f"{g} = [{perm}]({', '.join(rec.fmt(w) for w in rule.sections)})")
        for row in rows:
            if not row["match"]:
                click.echo(f"MISMATCH {row['generator']}: expected {row['expected_perm']} {row['expected_sections']}")
        click.echo("matches the fixture" if all(r["match"] for r in rows) else "differs from the fixture")
    sys.exit(0 if all(r["match"] for r in rows) else 1)


# nucleus
@main.group()
def nucleus():
    """The nucleus of Γ and its finite subgroups."""


@nucleus.command("verify")
@click.option("--depth", default=8, show_default=True)
def nucleus_verify(depth):
    from .nucleus import NucleusLab

    cert = NucleusLab().verify_nucleus(depth_bound=depth)
    _emit(cert.to_json(), None)
    sys.exit(0 if cert.ok else 1)


@nucleus.command("table")
@click.option("--json", "as_json", is_flag=True)
def nucleus_table(as_json):
    """Sections G|_x of the finite subgroups, recomputed and compared with the stored table."""
    from .nucleus import SECTION_TABLE, NucleusLab, key_name

    lab = NucleusLab()
    rows = []
    for key, printed in SECTION_TABLE.items():
        got = lab.sections_of_group(key)
        names = [lab.stabilizer_families().get(g) or f"order {len(g)}" for g in got]
        match = [got[x] == lab.close(printed[x]).elements for x in range(4)]
        rows.append({"group": key_name(key), "sections": names, "stored": list(printed), "match": match})
    if as_json:
        _emit(rows, None)
    else:
        for row in rows:
            flag = "ok  " if all(row["match"]) else "DIFF"
            click.echo(f"{flag} {row['group']}: {' | '.join(row['sections'])}")
    sys.exit(0 if all(all(r["match"]) for r in rows) else 1)


# complex
@main.group("complex")
def complex_grp():
    """The complexes 𝒯ₙ, ℳₙ and the map I."""


@complex_grp.command("build")
@click.option("--level", "n", default=1, show_default=True)
@click.option("--out", default=None)
def complex_build(n, out):
    from . import complex as cx

    C = cx.build_T(n)
    data = C.to_json()
    data["copies"] = 4**n
    data["vertex_classes"] = {
        cx.simplex_name(s): len(set(C.rep[s])) for s in cx.SIMPLICES if len(s) == 1
    }
    data["M_f_vector"] = list(cx.build_M(n, C).f_vector())
    _emit(data, out)


@complex_grp.command("contraction")
@click.option("--max-len", default=12, show_default=True)
def complex_contraction(max_len):
    from . import complex as cx

    rep = cx.contraction_report(max_len)
    _emit(rep, None)
    sys.exit(0 if rep["contracting"] else 1)


# fiber
@main.group()
def fiber():
    """Tripods, their unfoldings and the folding map."""


@fiber.command("tree")
@click.option("--legs", required=True, help="x,y,z leg lengths")
@click.option("--word", default="", help="unfolding word in 1, 2")
@click.option("--out", default=None)
def fiber_tree_cmd(legs, word, out):
    from .tripod import fiber_tree

    _emit(fiber_tree(_legs(legs), _word12(word)).to_json(), out)


@fiber.command("psi")
@click.option("--point", required=True, help="p1,p2,p3 in the simplex")
@click.option("--depth", default=40, show_default=True)
def fiber_psi(point, depth):
    from .tripod import psi

    click.echo(" ".join(f"{c:.12g}" for c in psi(_legs(point), depth)))


@fiber.command("finite")
@click.option("--legs", required=True)
@click.option("--max-iter", default=10_000, show_default=True)
def fiber_finite(legs, max_iter):
    from .tripod import is_finite_tree_slice

    verdict, steps, reason = is_finite_tree_slice(_legs(legs), max_iter)
    word = {True: "finite", False: "infinite", None: "undecided"}[verdict]
    click.echo(f"{word} after {steps} steps ({reason})")


# rays
@main.group()
def rays():
    """External rays on the Heisenberg group."""


@rays.command("verify")
@click.option("--samples", default=1000, show_default=True)
@click.option("--seed", default=0, show_default=True)
def rays_verify(samples, seed):
    from .heisenberg import verify_all

    res = verify_all(samples, seed)
    for k, v in res.items():
        click.echo(f"{'PASS' if v else 'FAIL'}  {k}")
    sys.exit(0 if all(res.values()) else 1)


# julia
@main.command("slice")
@click.option("--w0", required=True, help="e.g. 1, 2i, 1/2+i")
@click.option("--res", default=400, show_default=True)
@click.option("--iters", default=500, show_default=True)
@click.option("--center", default="-1/4+1/2i", show_default=True, help="write negative values as --center=-1/4")
@click.option("--radius", default=2.0, show_default=True)
@click.option("--out", required=True)
def slice_cmd(w0, res, iters, center, radius, out):
    """Escape-time picture of the slice w = w0 as a binary PPM."""
    from .julia import SliceSample, sample_slice, to_ppm

    spec = SliceSample(_complex_number(w0), _complex_number(center), radius, res, iters)
    times = sample_slice(spec)
    to_ppm(times, out)
    click.echo(f"wrote {out}: {res}x{res}, {int((times < 0).sum())} non-escaping pixels")


@main.command("base-orbit")
@click.option("--w0", required=True)
@click.option("--exact", is_flag=True, help="Gaussian-rational arithmetic and an exact verdict.")
@click.option("--steps", default=20, show_default=True)
def base_orbit_cmd(w0, exact, steps):
    """Orbit of w0 under w ↦ (1 − 2/w)²."""
    from . import julia

    if exact:
        p = julia.parse_point(w0)
        orbit = julia.base_orbit(p, steps)
        click.echo(" → ".join(orbit["orbit"]) + f"  ({orbit['status']})")
        verdict = julia.base_preperiodic_to_1(p, steps)
        click.echo(f"reaches 1: {'yes' if verdict else 'no'}")
        return
    w = _complex_number(w0)
    vals = [w]
    for _ in range(steps):
        if w == 0:
            break
        w = (1 - 2 / w) ** 2
        vals.append(w)
    click.echo(" → ".join(f"{v.real:.6g}{v.imag:+.6g}i" for v in vals))


# render
@main.group()
def render():
    """SVG pictures."""


@render.command("schreier")
@click.option("--group", "name", default="gamma-hat", show_default=True)
@click.option("--level", default=4, show_default=True)
@click.option("--layout", type=click.Choice(["spring", "circle", "triangle"]), default="spring", show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", required=True)
def render_schreier(name, level, layout, seed, out):
    from . import fixtures, render as rd

    rec = fixtures.get(name)
    G = rd.schreier_graph(rec, level)
    rd.save(rd.graph_to_svg(G, layout, seed=seed, alphabet=rec.alphabet), out)
    click.echo(f"wrote {out}: {len(G.vertices)} vertices, {len(G.edges)} edges")


@render.command("fill")
@click.option("--word", required=True, help="unfolding word in 1, 2")
@click.option("--legs", default="1,1,1", show_default=True)
@click.option("--trim", default="1/2", show_default=True, help="scale of the edge to the unlabeled Z_γ (0 deletes it)")
@click.option("--out", required=True)
def render_fill(word, legs, trim, out):
    from . import render as rd

    rd.save(rd.triangle_filling(_word12(word), Fraction(trim), _legs(legs)), out)
    click.echo(f"wrote {out}")


@render.command("tree")
@click.option("--legs", required=True)
@click.option("--word", default="")
@click.option("--out", required=True)
def render_tree(legs, word, out):
    from . import render as rd
    from .tripod import fiber_tree

    rd.save(rd.draw_marked_tree(fiber_tree(_legs(legs), _word12(word))), out)
    click.echo(f"wrote {out}")


@render.command("tiling")
@click.option("--level", default=4, show_default=True)
@click.option("--out", required=True)
def render_tiling(level, out):
    from . import render as rd

    svg, count = rd.draw_Dn(level)
    rd.save(svg, out)
    click.echo(f"wrote {out}: {count} tiles")


if __name__ == "__main__":
    main()
