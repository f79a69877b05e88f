import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from greenforge.cli import compare_expected, load_scenario, main, ScenarioError

ROOT = Path(__file__).resolve().parents[1]
SCEN = ROOT / "scenarios"


def run(*args, env=None):
    return subprocess.run([sys.executable, "-m", "greenforge.cli", *args], capture_output=True, text=True,
                          cwd=ROOT, env=env)


def test_admissible_enum_two_lines():
    out = run("admissible", "enum", "--lo", "0", "--hi", "1")
    assert out.returncode == 0
    assert out.stdout.splitlines() == ["0", "0,1"]


def test_admissible_check_witness(capsys):
    assert main(["admissible", "check", "0,1,2,4"]) == 1
    assert json.loads(capsys.readouterr().out)["witness"] == [1, 1, 2]
    assert main(["admissible", "check", "0,1,2"]) == 0


def test_exit_codes():
    assert run("verify", "--scenario", "scenarios/phi0.toml").returncode == 0
    assert run("verify", "--scenario", "scenarios/phi01_d1.toml").returncode == 2
    both = run("verify", "--scenario", "scenarios/phi0.toml", "--scenario", "scenarios/phi01_d1.toml")
    assert both.returncode == 2 and len(json.loads(both.stdout)) == 2


def test_wall_clock_only_on_stderr():
    out = run("verify", "--scenario", "scenarios/phi0.toml")
    import re
    assert re.search(r"PASS in \d+\.\d\ds", out.stderr)
    assert "PASS in" not in out.stdout


def test_golden_sections_match():
    for name in ("phi0", "phi01_d1", "phi01_d2"):
        rep = json.loads(run("verify", "--scenario", f"scenarios/{name}.toml").stdout)
        assert rep["golden"]["match"], rep["golden"]


def test_golden_mismatch_is_failure(tmp_path):
    for f in SCEN.glob("two_loop.*.toml"):
        shutil.copy(f, tmp_path)
    text = (SCEN / "phi0.toml").read_text().replace("dim = 19\n", "dim = 18\n", 1)
    (tmp_path / "s.toml").write_text(text)
    out = run("verify", "--scenario", str(tmp_path / "s.toml"))
    assert out.returncode == 1 and "!!" in out.stderr


def test_non_admissible_scenario(tmp_path):
    for f in SCEN.glob("two_loop.*.toml"):
        shutil.copy(f, tmp_path)
    text = (SCEN / "phi0.toml").read_text().replace("phi = [0]", "phi = [0, 1, 2, 4]")
    (tmp_path / "bad.toml").write_text(text)
    with pytest.raises(ScenarioError, match=r"\(1, 1, 2\)"):
        load_scenario(tmp_path / "bad.toml")
    out = run("verify", "--scenario", str(tmp_path / "bad.toml"))
    assert out.returncode == 1 and "(1, 1, 2)" in out.stdout


def test_parse_error_has_line(tmp_path):
    (tmp_path / "broken.toml").write_text('name = "x"\nphi = [0,\nm = 3\n')
    with pytest.raises(ScenarioError, match="line"):
        load_scenario(tmp_path / "broken.toml")


def test_not_nilpotent_hint(tmp_path):
    (tmp_path / "loop.toml").write_text(
        'length_bound = 2\n[quiver]\nvertices = ["1"]\narrows = [{label = "t", source = "1", target = "1"}]\n')
    out = run("algebra", "info", str(tmp_path / "loop.toml"))
    assert out.returncode == 1 and "length_bound" in out.stderr


def test_prime_override_by_environment():
    import os
    env = dict(os.environ, GREENFORGE_PRIME="103")
    out = run("verify", "--scenario", "scenarios/phi0.toml", env=env)
    assert json.loads(out.stdout)["prime"] == 103
    assert json.loads(run("verify", "--scenario", "scenarios/phi0.toml", "--prime", "107").stdout)["prime"] == 107


def test_algebra_hom_and_green_commands():
    alg, cx = "scenarios/two_loop.algebra.toml", "scenarios/two_loop.complexes.toml"
    info = json.loads(run("algebra", "info", alg).stdout)
    assert info["dim"] == 4 and info["self_injective"]
    homs = json.loads(run("hom", "--algebra", alg, "--object", cx, "--range", "1").stdout)
    assert homs["shifts"]["0"]["X>X"] == 4
    green = json.loads(run("green", "build", "--phi", "0,1", "--object", cx, "--algebra", alg,
                           "--shift-power", "1").stdout)
    assert sum(green["idempotent_columns"].values()) == green["dim"]


def test_loaded_complexes_match_corpus():
    sc, p = load_scenario(SCEN / "phi0.toml")
    from greenforge.catcore import HomotopyCategory, ProjCategory
    from greenforge.corpus import corpus_homotopy
    from greenforge.quivalg import build_algebra
    h = HomotopyCategory(ProjCategory(build_algebra(sc.algebra, p)), sc.complexes)
    ref = corpus_homotopy(2, 2, p)
    for a in sc.complexes:
        for b in sc.complexes:
            for s in (-1, 0, 1):
                assert h.hom_dim((a, 0), (b, s)) == ref.hom_dim((a, 0), (b, s))


def test_compare_expected_partial():
    assert compare_expected({"a": 1, "b": {"c": 2, "d": 3}}, {"b": {"c": 2}}) == []
    assert compare_expected({"a": 1}, {"a": 2, "z": 0}) == ["a: expected 2, got 1", "z: missing"]
