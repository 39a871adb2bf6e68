"""One test per acceptance criterion, each printing a PASS/FAIL line with its numbers."""

import os
import subprocess
import sys
import time
from contextlib import contextmanager

import numpy as np

from conftest import CRITERIA

from img_lab import complex as cx
from img_lab import heisenberg as hz
from img_lab import julia
from img_lab import tripod as tp
from img_lab.cli import SUITES
from img_lab.nucleus import AUTOMATON_STATES, MAXIMAL, ORDERS, PAIRWISE, SECTION_TABLE, TRIPLES, NucleusLab, key_name
from img_lab.presentation import R_TEXT, derivation_diff, pi1, synthesize
from img_lab.relations import gamma_relations


def record(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    CRITERIA[n] = line
    print(line)


@contextmanager
def timed():
    box = {}
    start = time.perf_counter()
    yield box
    box["seconds"] = time.perf_counter() - start


def test_criterion_1_relations():
    with timed() as t:
        res = gamma_relations()
    bad = [k for k, v in res.items() if not v]
    ok = not bad and t["seconds"] < 10
    record(1, ok, f"{len(res) - len(bad)}/{len(res)} relations in {t['seconds']:.2f}s (limit 10s)")
    assert not bad, bad
    assert t["seconds"] < 10
    for name in ("order of ab = 8", "order of ac = 4", "order of bc = 4", "(acγ)^2 = ε", "(aαbβ)^4 = ε"):
        assert res[name]
    assert sum("^a" in k or "^b" in k or "^c" in k for k in res) == 9


def test_criterion_2_img_derivation():
    with timed() as t:
        rows = derivation_diff()
        _, secs = synthesize("t")
        r_ok = secs[0] == secs[1] == pi1(R_TEXT)
    ok = all(r["match"] for r in rows) and r_ok and t["seconds"] < 5
    record(2, ok, f"{sum(r['match'] for r in rows)}/5 generator tuples, r = {R_TEXT}: {r_ok}, {t['seconds']:.2f}s (limit 5s)")
    assert [r["generator"] for r in rows] == ["α", "β", "γ", "s", "t"]
    assert all(r["match"] for r in rows), [r for r in rows if not r["match"]]
    assert r_ok
    assert t["seconds"] < 5


def test_criterion_3_nucleus():
    with timed() as t:
        lab = NucleusLab()
        size = len(lab.nucleus)
        orders = tuple(lab.group((v,)).order for v in ("A", "B", "C", "A1", "B1", "C1"))
        table = {**PAIRWISE, **TRIPLES}
        named = {key_name(k): lab.check_named(k, g) for k, g in table.items()}
        named.update({key_name((v,)): lab.check_named((v,), g) for v, g in MAXIMAL.items()})
        cert = lab.verify_nucleus(depth_bound=8)
    bad = [k for k, v in named.items() if not v]
    ok = size == 288 and orders == (128, 32, 128, 16, 8, 16) and not bad and cert.ok and t["seconds"] < 300
    record(
        3, ok,
        f"|N| = {size}, orders {orders}, {len(named) - len(bad)}/{len(named)} generator sets, "
        f"certificate depth {cert.max_absorption_depth} ≤ 8, {t['seconds']:.1f}s (limit 300s)",
    )
    assert size == 288
    assert orders == tuple(ORDERS[v] for v in ("A", "B", "C", "A1", "B1", "C1")) == (128, 32, 128, 16, 8, 16)
    assert not bad, bad
    assert cert.ok and cert.max_absorption_depth <= 8
    assert t["seconds"] < 300


def generators_of(lab, G) -> str:
    """A generating set of G drawn from the automaton states, for messages."""
    from itertools import combinations

    words = [w for w in AUTOMATON_STATES if w != "ε"]
    for r in (1, 2, 3):
        for gens in combinations(words, r):
            if lab.close(gens).elements == G:
                return "⟨" + ", ".join(gens) + "⟩"
    return f"order {len(G)}"


def test_criterion_4_section_tables():
    lab = NucleusLab()
    rows, mismatches = 0, []
    for key, printed in SECTION_TABLE.items():
        got = lab.sections_of_group(key)
        rows += 1
        if any(got[x] != lab.close(printed[x]).elements for x in range(4)):
            stored = " | ".join("⟨" + ", ".join(w.split()) + "⟩" for w in printed)
            computed = " | ".join(generators_of(lab, g) for g in got)
            mismatches.append(f"{key_name(key)}: stored {stored}; computed {computed}")
    ok = rows == 18 and not mismatches
    record(4, ok, f"{rows - len(mismatches)}/{rows} rows re-derived" + "".join(f"; {m}" for m in mismatches))
    assert rows == 18
    assert not mismatches, "\n".join(mismatches)


def test_criterion_5_complexes():
    T = cx.tables()
    T1 = cx.T1_checks(cx.build_T(1, T))
    pasting = {}
    for n in range(5):
        pasting.update(cx.pasting_checks(n, T))
    theta = cx.theta_checks()
    rep = cx.contraction_report(12)
    tol = 1e-12

    # numerical companion to the exact U-block check: ‖U_{x1}⋯U_{xn}‖ = 2^(-n/2)
    U = cx.integer_parts()[:, :2, :2].astype(float) / 2
    prods = np.eye(2)[None]
    u_err = 0.0
    for n in range(1, 9):
        prods = np.einsum("kij,xjl->kxil", prods, U).reshape(-1, 2, 2)
        norms = np.linalg.norm(prods, ord=2, axis=(1, 2))
        u_err = max(u_err, float(np.abs(norms - 2 ** (-n / 2)).max()))

    max12 = rep["levels"][-1]["max_norm"]
    checks = {
        "gluing list and eleven K_{g,1}, κ identities": all(T1.values()),
        "pasting n ≤ 4": all(pasting.values()),
        "I∘Θ = id": theta["I ∘ Θ = id"],
        "Θ checks": all(theta.values()),
        "max norm at length 12 < 1": max12 < 1,
        "U blocks exact": rep["U_products_are_similarities"] and u_err < tol,
        "pair bound 1/√2": rep["max_V_pair_norm"] <= 2**-0.5 + tol,
    }
    bad = [k for k, v in checks.items() if not v]
    record(
        5, not bad,
        f"{len(T1)} T1 checks, {len(pasting)} pasting checks, max norm(12) = {max12:.4f}, "
        f"max V pair norm = {rep['max_V_pair_norm']:.12f}, U-norm error {u_err:.1e}",
    )
    assert len(T1) == 13
    assert not bad, bad


def test_criterion_6_tripod():
    with timed() as t:
        mass = tp.mass_conservation_check(10_000, seed=0)
        sections = tp.section_check(100, seed=0)
        two = tp.two_step_check(1000, seed=0)
        ratio = tp.ratio_bounds_check(16)
        haus = tp.hausdorff_check(samples=100, max_n=12, seed=0)
        psi = tp.psi_check(samples=1000, depth=40, seed=0)
    checks = {
        "mass": mass,
        "F̃∘Φ̃ᵢ = id": all(v for k, v in sections.items() if "= id" in k),
        "two-step": all(two.values()),
        "ratio bounds": ratio["ok"],
        "Hausdorff bound": haus["dₙ < d/2^((n-1)/2)"],
        "ψ residual": psi["max_residual"] < 1e-4,
        "runtime": t["seconds"] < 120,
    }
    bad = [k for k, v in checks.items() if not v]
    record(
        6, not bad,
        f"{ratio['words_checked']} coded words (2^16 at length 16), ψ max residual {psi['max_residual']:.2e} "
        f"< 1e-4, {t['seconds']:.1f}s (limit 120s)",
    )
    assert ratio["words_checked"] >= 2**16
    assert psi["samples"] == 1000 and psi["depth"] == 40
    assert not bad, bad


def test_criterion_7_fibers():
    results = [cx.fiber_isomorphism_check(n) for n in range(4)]
    checked = sum(r["checked"] for r in results)
    ok = all(r["ok"] for r in results)
    record(7, ok, f"{checked} fibers for n ≤ 3 isomorphic to unfolded tripods")
    assert ok, [r["failures"] for r in results if not r["ok"]]
    assert [r["checked"] for r in results] == [6, 12, 24, 48]


def test_criterion_8_rays():
    with timed() as t:
        rel = hz.relation_checks(samples=200)
        auto = hz.automorphism_checks(1000)
        stab = hz.verify_conjugation_identities(1000)
        wreath = hz.cross_check_with_wreath()
    checks = {**rel, **auto, **wreath}
    checks.update({f"stabilizer {k}": not v["failures"] for k, v in stab.items()})
    bad = [k for k, v in checks.items() if not v]
    ok = not bad and len(stab) == 3 and t["seconds"] < 10
    record(8, ok, f"{len(checks) - len(bad)}/{len(checks)} identities, {t['seconds']:.2f}s (limit 10s)")
    for name in ("s^2 = 1", "t^4 = 1", "(st)^4 = τ^4", "[X, Y] = τ^4 (action)", "[φ(X), φ(Y)] = φ(τ)^4"):
        assert rel[name]
    assert not bad, bad
    assert t["seconds"] < 10


def test_criterion_9_oracle():
    with timed() as t:
        seg = julia.segment_slice_check(400, 500)
        o2 = julia.base_orbit(julia.parse_point("2"))
        oinf = julia.base_orbit(julia.INF)
        cross = [julia.tripod_cross_check(k) for k in ("1", "inf", "0", "2", "5", "1/2", "2i")]
    comparable = [c for c in cross if c["comparable"]]
    checks = {
        "segment": seg["fraction"] >= 0.99 and seg["non_escaping"] > 0,
        "2 → 0 → ∞ → 1": o2["orbit"] == ["2", "0", "∞", "1"],
        "∞ → 1": oinf["orbit"] == ["∞", "1"],
        "cross-check": bool(comparable) and all(c["ok"] for c in comparable),
        "runtime": t["seconds"] < 60,
    }
    bad = [k for k, v in checks.items() if not v]
    record(
        9, not bad,
        f"{seg['within_one_pixel']}/{seg['non_escaping']} non-escaping pixels near [0, 1], "
        f"{len(comparable)} comparable slices agree, {t['seconds']:.1f}s (limit 60s)",
    )
    assert not bad, bad


def _suite_json(name: str, hashseed: str) -> bytes:
    env = dict(os.environ, PYTHONHASHSEED=hashseed)
    cmd = [sys.executable, "-c", "from img_lab.cli import main; main()", "suite", name, "--json", "--seed", "0"]
    return subprocess.run(cmd, capture_output=True, env=env, timeout=600).stdout


def test_criterion_10_determinism():
    differ = []
    for name in SUITES:
        a, b = _suite_json(name, "1"), _suite_json(name, "2")
        if not a or a != b:
            differ.append(name)
    record(10, not differ, f"{len(SUITES) - len(differ)}/{len(SUITES)} suites byte-identical across two runs")
    assert not differ, differ
