import json
import xml.etree.ElementTree as ET

import pytest
from click.testing import CliRunner

from img_lab.cli import RunConfig, Report, main, run_suite
from img_lab.julia import read_ppm


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(main, list(args), catch_exceptions=False)

    return invoke


def test_help_lists_the_groups(run):
    res = run("--help")
    assert res.exit_code == 0
    for cmd in ("suite", "group", "derive-img", "nucleus", "complex", "fiber", "rays", "slice", "base-orbit", "render"):
        assert cmd in res.output


@pytest.mark.parametrize("name", ["relations", "img-derivation", "rays"])
def test_fast_suites_pass(run, name):
    res = run("suite", name)
    assert res.exit_code == 0, res.output
    assert res.output.strip().splitlines()[-1].startswith(f"  PASS  {name}:")


def test_suite_json(run, tmp_path):
    out = tmp_path / "r.json"
    res = run("suite", "relations", "--json", "--seed", "3", "--out", str(out))
    assert res.exit_code == 0
    data = json.loads(out.read_text())
    assert data["suite"] == "relations"
    assert data["config"]["seed"] == 3
    assert data["ok"] and data["failed"] == 0
    assert data["passed"] == len(data["checks"])
    assert all(c["anchor"].startswith("relations/") for c in data["checks"])


def test_suite_config_file(run, tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text("tripod_samples = 5\nmass_samples = 50\npsi_samples = 20\npsi_depth = 30\nhausdorff_n = 6\nratio_len = 8\n")
    res = run("suite", "tripod", "--json", "--config", str(cfg))
    assert res.exit_code == 0, res.output
    data = json.loads(res.output)
    assert data["config"]["tripod_samples"] == 5
    assert data["config"]["ratio_len"] == 8


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text("samples = 5\n")
    with pytest.raises(ValueError, match="unknown config keys"):
        RunConfig.load(cfg)


def test_config_validation(tmp_path):
    with pytest.raises(ValueError):
        RunConfig(max_len=0)
    cfg = tmp_path / "c.toml"
    cfg.write_text("max_len = 5\nseed = 2\n")
    c = RunConfig.load(cfg, seed=9, max_len=None)
    assert (c.max_len, c.seed) == (5, 9)


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("everything")


def test_failing_checks_fail_the_report():
    r = Report("x", RunConfig())
    r.check("a", "fine", True)
    assert r.ok
    r.check("a", "broken", False)
    assert not r.ok
    assert "  FAIL  [x/a] broken" in r.text()
    assert r.to_json()["failed"] == 1


def test_group_commands(run, tmp_path):
    res = run("group", "relations")
    assert res.exit_code == 0
    assert run("group", "order", "--word", "ab").output.strip().endswith("8")
    out = tmp_path / "g.json"
    assert run("group", "dump", "--group", "rays", "--out", str(out)).exit_code == 0
    assert json.loads(out.read_text())["generators"]


def test_derive_img(run):
    res = run("derive-img", "--json")
    assert res.exit_code == 0
    data = json.loads(res.output)
    assert [r["generator"] for r in data["diff"]] == ["α", "β", "γ", "s", "t"]
    assert all(r["match"] for r in data["diff"])
    assert data["recursion"]["generators"] == ["α", "β", "γ", "s", "t"]


def test_nucleus_table_reports_the_two_differing_rows(run):
    res = run("nucleus", "table")
    assert res.exit_code == 1
    diff = [line for line in res.output.splitlines() if "DIFF" in line]
    assert len(diff) == 2
    assert any("Γ_CA1" in line for line in diff) and any("Γ_CB1" in line for line in diff)


def test_complex_build(run):
    res = run("complex", "build", "--level", "1")
    assert res.exit_code == 0
    data = json.loads(res.output)
    assert data["copies"] == 4
    assert data["M_f_vector"] == [12, 38, 52, 24]


def test_complex_contraction(run):
    res = run("complex", "contraction", "--max-len", "6")
    assert res.exit_code == 0
    assert json.loads(res.output)["contracting"]


def test_fiber_commands(run):
    res = run("fiber", "tree", "--legs", "1,1,1", "--word", "121")
    assert json.loads(res.output)["copies"] == 8
    assert run("fiber", "finite", "--legs", "1,1,0").output.startswith("finite after 4 steps")
    assert run("fiber", "finite", "--legs", "1,1,1").output.startswith("infinite")
    vals = [float(x) for x in run("fiber", "psi", "--point", "1/3,1/3,1/3").output.split()]
    assert sum(vals) == pytest.approx(1)
    assert CliRunner().invoke(main, ["fiber", "tree", "--legs", "1,1", "--word", ""]).exit_code != 0
    assert CliRunner().invoke(main, ["fiber", "tree", "--legs", "1,1,1", "--word", "13"]).exit_code != 0


def test_rays_verify(run):
    res = run("rays", "verify", "--samples", "50")
    assert res.exit_code == 0
    assert "FAIL" not in res.output


def test_slice(run, tmp_path):
    out = tmp_path / "s.ppm"
    res = run("slice", "--w0", "1", "--res", "40", "--iters", "100", "--center", "1/2", "--radius", "1", "--out", str(out))
    assert res.exit_code == 0
    assert read_ppm(out.read_bytes()).shape == (40, 40, 3)
    assert CliRunner().invoke(main, ["slice", "--w0", "inf", "--out", str(out)]).exit_code != 0


def test_base_orbit(run):
    res = run("base-orbit", "--w0", "2", "--exact")
    assert "2 → 0 → ∞ → 1" in res.output
    assert "reaches 1: yes" in res.output
    assert "reaches 1: no" in run("base-orbit", "--w0", "2i", "--exact", "--steps", "10").output
    assert run("base-orbit", "--w0", "2", "--steps", "1").output.startswith("2+0i → 0+0i")


@pytest.mark.parametrize(
    "args",
    [
        ("schreier", "--level", "3"),
        ("schreier", "--level", "3", "--layout", "triangle"),
        ("fill", "--word", "1212"),
        ("tree", "--legs", "1,2,1", "--word", "21"),
        ("tiling", "--level", "3"),
    ],
)
def test_render_commands(run, tmp_path, args):
    out = tmp_path / "x.svg"
    res = run("render", *args, "--out", str(out))
    assert res.exit_code == 0, res.output
    ET.fromstring(out.read_text())
