"""Acceptance criteria 1-8, each timed against its budget with one PASS/FAIL line."""

import json
import subprocess
import sys
import time
from itertools import combinations, product
from pathlib import Path

import pytest

from greenforge.approx import (ApproxContext, coghost_ideal, coghost_via_approximation, fcogh, fgh,
                               ghost_ideal, ghost_via_approximation, lemma51_oracle)
from greenforge.corpus import M_NAMES, corpus_homotopy
from greenforge.green import build_green
from greenforge.phiorbit import (OrbitCategory, admissibility_witness, associativity_witness,
                                 enumerate_admissible, is_admissible, synthetic_orbit_tensor)
from greenforge.quivalg import check_self_injective

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = ["scenarios/phi0.toml", "scenarios/phi01_d1.toml", "scenarios/phi01_d2.toml"]
CORPUS = ("X", "Y", "A", "SA")


def report(capsys, number, ok, seconds, note=""):
    with capsys.disabled():
        print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} ({seconds:.2f}s){' ' + note if note else ''}")


def cli(*args):
    return subprocess.run([sys.executable, "-m", "greenforge.cli", *args], capture_output=True, text=True, cwd=ROOT)


def brute_force_admissible(s):
    s = set(s)
    return 0 in s and not any(i + j + k in s and ((i + j in s) != (j + k in s))
                              for i in s for j in s for k in s)


def test_criterion_1_admissibility(capsys):
    t = time.perf_counter()
    others = [-3, -2, -1, 1, 2, 3]
    subsets = [(0,) + c for r in range(7) for c in combinations(others, r)]
    agree = len(subsets) == 64 and all(is_admissible(s) == brute_force_admissible(s) for s in subsets)
    accepted = is_admissible({0}) and is_admissible({0, 1, 2}) and all(is_admissible({0, n}) for n in range(1, 7))
    rejected = admissibility_witness({0, 1, 2, 4}) == (1, 1, 2)
    seconds = time.perf_counter() - t
    ok = agree and accepted and rejected and seconds < 1
    report(capsys, 1, ok, seconds)
    assert ok


def test_criterion_2_green_associativity(capsys):
    t = time.perf_counter()
    hcat = corpus_homotopy(2, 2, 101)
    sets = enumerate_admissible(-3, 3)
    for phi in sets:
        # build_green checks every basis triple and the unit before returning
        build_green(OrbitCategory(hcat, phi, 1), CORPUS)
    degrees, tensor = synthetic_orbit_tensor((0, 1, 2, 4))
    violated = associativity_witness(tensor) is not None
    seconds = time.perf_counter() - t
    ok = len(sets) == 27 and violated and seconds < 30
    report(capsys, 2, ok, seconds, f"{len(sets)} admissible sets")
    assert ok


def test_criterion_3_ghost_routes(capsys):
    t = time.perf_counter()
    hcat = corpus_homotopy(2, 2, 101)
    ctx = ApproxContext(OrbitCategory(hcat, (0,), 1), M_NAMES)
    routes = all(ghost_ideal(ctx, x, y) == ghost_via_approximation(ctx, x, y)
                 and coghost_ideal(ctx, x, y) == coghost_via_approximation(ctx, x, y)
                 for x, y in product(CORPUS, repeat=2))
    vanishing = all(ghost_ideal(ctx, m, y).dim == 0 and coghost_ideal(ctx, y, m).dim == 0
                    and fcogh(ctx, m, y) == coghost_ideal(ctx, m, y) and fgh(ctx, y, m) == ghost_ideal(ctx, y, m)
                    for m, y in product(M_NAMES, CORPUS))
    seconds = time.perf_counter() - t
    ok = routes and vanishing and seconds < 10
    report(capsys, 3, ok, seconds)
    assert ok


def test_criterion_4_cohomology_description(capsys):
    t = time.perf_counter()
    hcat = corpus_homotopy(2, 2, 101)
    injective = check_self_injective(hcat.base.alg).self_injective
    ctx = ApproxContext(OrbitCategory(hcat, (0,), 1), M_NAMES)
    equal = all(ghost_ideal(ctx, x, y) == coghost_ideal(ctx, x, y) == lemma51_oracle(hcat, x, y, 1)
                == lemma51_oracle(hcat, x, y, 1, module=True)
                for x, y in product(CORPUS, repeat=2))
    seconds = time.perf_counter() - t
    ok = injective and equal and seconds < 10
    report(capsys, 4, ok, seconds)
    assert ok


@pytest.fixture(scope="module")
def example5():
    t = time.perf_counter()
    out = cli("example5", "--n", "2", "--s", "2")
    return out, json.loads(out.stdout), time.perf_counter() - t


@pytest.mark.xfail(strict=True, reason="the printed relations leave (b2 b4)^s, a nonzero ghost, alive: "
                                       "the presented algebra has dim 20 against dim 19 for Lambda_x")
def test_criterion_5_worked_example(capsys, example5):
    out, rep, seconds = example5
    ok = (out.returncode == 0 and rep["presentation_check"] and rep["fingerprints_equal"]
          and rep["presented_dim"] == rep["lambda_x"]["dim"] and seconds < 60)
    note = (f"presentation_check={rep['presentation_check']} presented dim {rep['presented_dim']} "
            f"vs Lambda_x dim {rep['lambda_x']['dim']}; fingerprints equal={rep['fingerprints_equal']}")
    report(capsys, 5, ok, seconds, note)
    assert ok


def test_criterion_5_diagnosis(example5):
    """What does hold, and where the defect sits."""
    out, rep, seconds = example5
    assert out.returncode == 1 and "presentation_check is false" in out.stderr
    assert rep["fingerprints_equal"] and rep["lambda_x"]["dim"] == rep["lambda_y"]["dim"] == 19
    pres = rep["presentation"]
    assert pres["relations"] and pres["orthogonal_idempotents"] and pres["generates"]
    assert rep["presented_dim"] == 20
    ghost = rep["ghost_power"]
    assert ghost["nonzero_in_End_K"] and not ghost["nonzero_in_lambda_x"] and ghost["End_K_dim"] == 20
    assert rep["presentation_check_amended"]
    assert rep["third_vertex"]["matches_Y"]


def test_criterion_6_phi0(capsys):
    t = time.perf_counter()
    out = cli("verify", "--scenario", "scenarios/phi0.toml", "--orth-bound", "4")
    rep = json.loads(out.stdout)
    seconds = time.perf_counter() - t
    ok = (out.returncode == 0 and rep["status"] == "PASS" and rep["fingerprints_equal"]
          and rep["self_orthogonality"] == {str(m): 0 for m in range(-4, 5) if m} and seconds < 120)
    report(capsys, 6, ok, seconds)
    assert ok


def test_criterion_7_phi01(capsys):
    t = time.perf_counter()
    codes, notes = [], []
    for path in ("scenarios/phi01_d1.toml", "scenarios/phi01_d2.toml"):
        out = cli("verify", "--scenario", path)
        rep = json.loads(out.stdout)
        codes.append(out.returncode)
        if rep["gate"]["passed"]:
            good = rep["status"] == "PASS" and out.returncode == 0
        else:
            good = rep["status"] == "HYPOTHESES_FAILED" and out.returncode == 2 and rep["gate"]["witnesses"]
        notes.append(f"{Path(path).stem}={rep['status']}")
        codes.append(0 if good else 1)
    seconds = time.perf_counter() - t
    ok = 1 not in codes and seconds < 300
    report(capsys, 7, ok, seconds, ", ".join(notes))
    assert ok


def test_criterion_8_determinism(capsys):
    t = time.perf_counter()
    args = [a for s in SCENARIOS for a in ("--scenario", s)]
    runs = [cli("verify", *args, "--jobs", "1").stdout for _ in range(3)]
    runs.append(cli("verify", *args, "--jobs", "4").stdout)
    ex = [cli("example5", "--n", "2", "--s", "2").stdout for _ in range(3)]
    singles = [[cli("verify", "--scenario", s).stdout for _ in range(3)] for s in SCENARIOS]
    ok = len(set(runs)) == 1 and len(set(ex)) == 1 and all(len(set(r)) == 1 for r in singles)
    ok = ok and all(run for run in runs + ex)
    report(capsys, 8, ok, time.perf_counter() - t)
    assert ok
