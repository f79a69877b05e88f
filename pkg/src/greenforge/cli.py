"""Command-line front end: TOML scenarios in, canonical JSON reports out.

Exit codes: 0 for PASS, 2 when the theorem's hypotheses fail (a finding, not
an error), 1 for anything else.  Reports go to stdout; timings go to stderr.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Mapping, Sequence

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

import numpy as np

from .catcore import CatComplex, HomotopyCategory, ProjCategory, assemble
from .exactlin import next_prime, resolve_prime
from .phiorbit import AdmissibleSet, NotAdmissible, OrbitCategory, admissibility_witness, enumerate_admissible
from .quivalg import (Algebra, InvalidSpec, NotNilpotentAtBound, PathBoundSpec, build_algebra,
                      check_self_injective, dumps_canonical, path_element, spec_from_dict, trace_radical)
from .tilt import PrimeTooSmall, Scenario, fingerprint, verify_theorem31

EXIT_PASS, EXIT_FAIL, EXIT_HYPOTHESES = 0, 1, 2


class ScenarioError(ValueError):
    """A scenario, algebra or complex file could not be loaded."""


# ---------------------------------------------------------------------------
# loading


def _read_toml(path: Path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        # the decoder's message already carries "(at line L, column C)"
        raise ScenarioError(f"{path}: {exc}") from None
    except OSError as exc:
        raise ScenarioError(f"{path}: {exc.strerror}") from None


def _section(data: Mapping, key: str, base: Path) -> tuple[dict, Path]:
    """An inline table, or a path (relative to ``base``) to a TOML file holding it."""
    value = data.get(key)
    if value is None:
        raise ScenarioError(f"missing '{key}'")
    if isinstance(value, str):
        path = (base / value).resolve()
        return _read_toml(path), path.parent
    return value, base


def load_algebra_spec(path: str | Path) -> tuple[PathBoundSpec, int | None]:
    data = _read_toml(Path(path))
    try:
        return spec_from_dict(data), data.get("prime")
    except InvalidSpec as exc:
        raise ScenarioError(f"{path}: {exc}") from None


def complexes_from_dict(data: Mapping, alg: Algebra) -> dict[str, CatComplex]:
    """``[complex.NAME]`` tables: ``summands`` lists (vertex, degree) pairs; each
    ``[[complex.NAME.entry]]`` gives ``source``/``target`` summand indices and
    relation-style ``terms`` of (coeff, path) pairs for the map P_source -> P_target.
    """
    cat = ProjCategory(alg)
    out = {}
    for name, body in data.get("complex", {}).items():
        try:
            summands = [(alg.vertex_labels.index(str(v)), int(deg)) for v, deg in body["summands"]]
        except ValueError:
            raise ScenarioError(f"complex {name}: unknown vertex in {body['summands']}") from None
        except KeyError:
            raise ScenarioError(f"complex {name}: missing 'summands'") from None
        degrees = sorted({deg for _, deg in summands})
        slots = {deg: [k for k, (_, d) in enumerate(summands) if d == deg] for deg in degrees}
        terms = {deg: tuple(summands[k][0] for k in slots[deg]) for deg in degrees}
        pieces: dict[int, dict] = {}
        for entry in body.get("entry", []):
            s, t = int(entry["source"]), int(entry["target"])
            (u, du), (v, dv) = summands[s], summands[t]
            if dv != du + 1:
                raise ScenarioError(f"complex {name}: entry {s}->{t} does not raise degree by one")
            elem = np.zeros(alg.dim, dtype=np.int64)
            for coef, path in entry["terms"]:
                elem = elem + int(coef) * path_element(alg, [str(a) for a in path])
            key = (slots[du].index(s), slots[dv].index(t))
            block = pieces.setdefault(du, {})
            block[key] = np.mod(block.get(key, 0) + cat.element(u, v, elem), alg.p)
        diffs = {}
        for deg, blocks in pieces.items():
            rows = [(w,) for w in terms[deg]]
            cols = [(w,) for w in terms.get(deg + 1, ())]
            diffs[deg] = assemble(cat, rows, cols, blocks)
        cx = CatComplex(terms, diffs)
        if not cx.check(cat):
            raise ScenarioError(f"complex {name}: d o d is not zero")
        out[str(name)] = cx
    if not out:
        raise ScenarioError("no [complex.*] tables found")
    return out


def load_scenario(path: str | Path, prime: int | None = None) -> tuple[Scenario, int]:
    """Parse a scenario file; the prime is --prime, else GREENFORGE_PRIME, else the file's, else the default."""
    path = Path(path)
    data = _read_toml(path)
    base = path.resolve().parent
    try:
        alg_data, _ = _section(data, "algebra", base)
        spec = spec_from_dict(alg_data)
        if prime is None and "GREENFORGE_PRIME" not in os.environ:
            prime = data.get("prime", alg_data.get("prime"))
        p = resolve_prime(prime)
        alg = build_algebra(spec, p)
        cx_data, _ = _section(data, "complexes", base)
        complexes = complexes_from_dict(cx_data, alg)
        phi = AdmissibleSet(tuple(int(i) for i in data.get("phi", [0])))
        m = tuple(str(x) for x in data["m"])
        right_end = str(data["right_end"])
    except NotAdmissible as exc:
        raise ScenarioError(f"{path}: phi {exc}") from None
    except (InvalidSpec, KeyError) as exc:
        raise ScenarioError(f"{path}: {exc}") from None
    for name in m + (right_end,):
        if name not in complexes:
            raise ScenarioError(f"{path}: '{name}' is not a defined complex")
    sc = Scenario(
        name=str(data.get("name", path.stem)),
        algebra=spec,
        complexes=complexes,
        m=m,
        right_end=right_end,
        phi=tuple(phi),
        shift_power=int(data.get("shift_power", 1)),
        orth_bound=int(data.get("orth_bound", 4)),
        minimal=bool(data.get("minimal", True)),
        expected=dict(data.get("expected", {})),
    )
    return sc, p


# ---------------------------------------------------------------------------
# reports


def compare_expected(report: Mapping, expected: Mapping, prefix: str = "") -> list[str]:
    """Paths where the report disagrees with the golden section (which may be partial)."""
    diffs = []
    for key, want in expected.items():
        where = f"{prefix}{key}"
        if key not in report:
            diffs.append(f"{where}: missing")
        elif isinstance(want, Mapping) and isinstance(report[key], Mapping):
            diffs.extend(compare_expected(report[key], want, where + "."))
        elif report[key] != want:
            diffs.append(f"{where}: expected {want!r}, got {report[key]!r}")
    return diffs


def _load_overridden(path, prime, phi, orth_bound) -> tuple[Scenario, int]:
    sc, p = load_scenario(path, prime)
    if phi is not None:
        sc.phi = tuple(AdmissibleSet(tuple(phi)))
    if orth_bound is not None:
        sc.orth_bound = orth_bound
    return sc, p


def run_scenario(path: str, prime: int | None = None, phi: Sequence[int] | None = None,
                 orth_bound: int | None = None) -> dict:
    """Load and verify one scenario; never raises for scenario-level problems."""
    try:
        sc, p = _load_overridden(path, prime, phi, orth_bound)
        try:
            report = verify_theorem31(sc, p)
        except PrimeTooSmall as exc:
            if prime is not None or "GREENFORGE_PRIME" in os.environ:
                raise
            # complexes carry coefficients mod p, so reload rather than reuse them
            sc, retry = _load_overridden(path, next_prime(4 * exc.dim), phi, orth_bound)
            report = verify_theorem31(sc, retry)
            report["prime_reselected_from"] = p
        if sc.expected:
            diffs = compare_expected(report, sc.expected)
            report["golden"] = {"match": not diffs, "differences": diffs}
        return report
    except NotNilpotentAtBound as exc:
        return {"scenario": str(path), "status": "ERROR",
                "error": f"{exc}; raise length_bound in the algebra spec"}
    except (ScenarioError, NotAdmissible, PrimeTooSmall, ValueError) as exc:
        return {"scenario": str(path), "status": "ERROR", "error": str(exc)}


def report_exit_code(report: Mapping) -> int:
    status = report.get("status")
    if report.get("golden", {}).get("match") is False:
        return EXIT_FAIL
    if status == "PASS":
        return EXIT_PASS
    if status == "HYPOTHESES_FAILED":
        return EXIT_HYPOTHESES
    return EXIT_FAIL


def _banner(lines: Sequence[str]):
    bar = "!" * 72
    print(bar, file=sys.stderr)
    for line in lines:
        print(f"!! {line}", file=sys.stderr)
    print(bar, file=sys.stderr)


def _emit(obj: Any):
    sys.stdout.write(dumps_canonical(obj) + "\n")


# ---------------------------------------------------------------------------
# the worked example


def example5_report(n: int = 2, s: int = 2, prime: int | None = None) -> dict:
    from .corpus import (corpus_homotopy, generator_images, ghost_quotient, lambda_spec)
    from .catcore import endomorphism_algebra
    from .quivalg import build_algebra as _build
    from .tilt import _evaluate, build_triangle_from_approx, presentation_check
    from .corpus import M_NAMES

    p = resolve_prime(prime)
    hcat = corpus_homotopy(n, s, p, shifts=range(-2, 3))
    objects_x = ("SA", "X", "A")
    quot_x = ghost_quotient(hcat, objects_x)
    lam_x = endomorphism_algebra(quot_x, list(objects_x))
    quot_y = ghost_quotient(hcat, ("SA", "Y", "A"))
    lam_y = endomorphism_algebra(quot_y, ["SA", "Y", "A"])
    images = generator_images(hcat, lam_x, quot_x, objects_x)
    verbatim = presentation_check(lam_x, lambda_spec(n, s), images)
    amended = presentation_check(lam_x, lambda_spec(n, s, amended=True), images)
    presented = _build(lambda_spec(n, s), p)
    fp_x, fp_y = fingerprint(lam_x), fingerprint(lam_y)
    # (b2 b4)^s in End_K and in Lambda_x: nonzero before killing ghosts, zero after
    end_k = endomorphism_algebra(hcat, [(o, 0) for o in objects_x])
    power = ("b2", "b4") * s
    ghost_power = {
        "path": list(power),
        "nonzero_in_End_K": bool(np.any(_evaluate(end_k, generator_images(hcat, end_k, None, objects_x), power))),
        "nonzero_in_lambda_x": bool(np.any(_evaluate(lam_x, images, power))),
        "End_K_dim": end_k.dim,
    }

    tri = build_triangle_from_approx(hcat, M_NAMES, "X", name="cocone")
    probes = list(M_NAMES) + ["X", "Y"]
    profile = {}
    for other in probes:
        for shift in range(-2, 3):
            pair = (hcat.hom_dim((tri.x, 0), (other, shift)), hcat.hom_dim((other, 0), (tri.x, shift)))
            want = (hcat.hom_dim(("Y", 0), (other, shift)), hcat.hom_dim((other, 0), ("Y", shift)))
            profile[f"{other}[{shift}]"] = list(pair) if pair == want else {"third": list(pair), "Y": list(want)}
    return {
        "n": n, "s": s, "prime": p,
        "lambda_x": {"dim": lam_x.dim, "associative": lam_x.check_associative() is None,
                     "fingerprint": fp_x.to_json()},
        "lambda_y": {"dim": lam_y.dim, "fingerprint": fp_y.to_json()},
        "fingerprints_equal": fp_x == fp_y,
        "presented_dim": presented.dim,
        "presentation_check": verbatim["holds"],
        "presentation": verbatim,
        "presentation_check_amended": amended["holds"],
        "presentation_amended": amended,
        "ghost_power": ghost_power,
        "third_vertex": {"middle": list(tri.middle),
                         "matches_Y": all(isinstance(v, list) for v in profile.values()),
                         "hom_profile": profile},
    }


# ---------------------------------------------------------------------------
# subcommands


def _phi_arg(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.replace(" ", "").split(",") if t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}") from None


def cmd_admissible(args) -> int:
    if args.action == "check":
        witness = admissibility_witness(args.set)
        _emit({"set": sorted(set(args.set)), "admissible": witness is None,
               "witness": None if witness is None else list(witness)})
        return EXIT_PASS if witness is None else EXIT_FAIL
    for phi in enumerate_admissible(args.lo, args.hi):
        print(",".join(map(str, phi)))
    return EXIT_PASS


def cmd_algebra(args) -> int:
    spec, file_prime = load_algebra_spec(args.spec)
    p = resolve_prime(args.prime if args.prime is not None else
                      (None if "GREENFORGE_PRIME" in os.environ else file_prime))
    alg = build_algebra(spec, p)
    info = {"prime": p, "dim": alg.dim, "vertices": list(alg.vertex_labels),
            "radical_dim": trace_radical(alg).dim if alg.dim < p else None,
            "self_injective": check_self_injective(alg).self_injective,
            "algebra": alg.to_json()}
    if args.fingerprint:
        info["fingerprint"] = fingerprint(alg).to_json()
    _emit(info)
    return EXIT_PASS


def _load_pair(args) -> tuple[Algebra, dict]:
    spec, file_prime = load_algebra_spec(args.algebra)
    p = resolve_prime(args.prime if args.prime is not None else
                      (None if "GREENFORGE_PRIME" in os.environ else file_prime))
    alg = build_algebra(spec, p)
    return alg, complexes_from_dict(_read_toml(Path(args.object)), alg)


def cmd_hom(args) -> int:
    alg, complexes = _load_pair(args)
    hcat = HomotopyCategory(ProjCategory(alg), complexes)
    names = list(complexes)
    out = {"prime": alg.p, "shifts": {}}
    for shift in range(-args.range, args.range + 1):
        out["shifts"][str(shift)] = {f"{a}>{b}": hcat.hom_dim((a, 0), (b, shift)) for a in names for b in names}
    _emit(out)
    return EXIT_PASS


def cmd_green(args) -> int:
    from .green import build_green
    alg, complexes = _load_pair(args)
    hcat = HomotopyCategory(ProjCategory(alg), complexes)
    orbit = OrbitCategory(hcat, AdmissibleSet(args.phi), args.shift_power)
    g = build_green(orbit, list(complexes))
    _emit(g.to_json())
    return EXIT_PASS


def _verify_job(job):
    path, prime, phi, orth_bound = job
    t = time.perf_counter()
    report = run_scenario(path, prime, phi, orth_bound)
    return report, time.perf_counter() - t


def cmd_verify(args) -> int:
    jobs = [(path, args.prime, args.phi, args.orth_bound) for path in args.scenario]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_verify_job, jobs))
    else:
        results = [_verify_job(job) for job in jobs]
    codes = []
    for (report, seconds), path in zip(results, args.scenario):
        print(f"[{path}] {report.get('status')} in {seconds:.2f}s", file=sys.stderr)
        code = report_exit_code(report)
        if code == EXIT_FAIL:
            reason = report.get("error") or report.get("failure") or report.get("golden", {}).get("differences")
            _banner([f"{path}: {report.get('status')}", str(reason)])
        codes.append(code)
    _emit(results[0][0] if len(results) == 1 else [r for r, _ in results])
    if EXIT_FAIL in codes:
        return EXIT_FAIL
    return EXIT_HYPOTHESES if EXIT_HYPOTHESES in codes else EXIT_PASS


def cmd_example5(args) -> int:
    t = time.perf_counter()
    report = example5_report(args.n, args.s, args.prime)
    print(f"example5 n={args.n} s={args.s} in {time.perf_counter() - t:.2f}s", file=sys.stderr)
    _emit(report)
    problems = []
    if not report["presentation_check"]:
        pres = report["presentation"]
        problems.append(f"presentation_check is false: presented dim {pres['presented_dim']}, "
                        f"computed dim {pres['dim']}, failed relation {pres['failed_relation']}")
    if not report["fingerprints_equal"] and args.n == args.s:
        problems.append("fingerprints of Lambda_x and Lambda_y differ")
    if problems:
        _banner(problems)
        return EXIT_FAIL
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="greenforge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    adm = sub.add_parser("admissible", help="admissible subsets of Z")
    adm_sub = adm.add_subparsers(dest="action", required=True)
    chk = adm_sub.add_parser("check")
    chk.add_argument("set", type=_phi_arg, help="e.g. 0,1,2")
    enum = adm_sub.add_parser("enum")
    enum.add_argument("--lo", type=int, required=True)
    enum.add_argument("--hi", type=int, required=True)
    adm.set_defaults(func=cmd_admissible)

    alg = sub.add_parser("algebra", help="build an algebra from a TOML spec")
    alg_sub = alg.add_subparsers(dest="action", required=True)
    info = alg_sub.add_parser("info")
    info.add_argument("spec")
    info.add_argument("--prime", type=int)
    info.add_argument("--fingerprint", action="store_true")
    alg.set_defaults(func=cmd_algebra)

    hom = sub.add_parser("hom", help="homotopy hom dimensions between complexes")
    hom.add_argument("--algebra", required=True)
    hom.add_argument("--object", required=True, help="TOML file of [complex.*] tables")
    hom.add_argument("--range", type=int, default=2, help="shifts from -R to R")
    hom.add_argument("--prime", type=int)
    hom.set_defaults(func=cmd_hom)

    green = sub.add_parser("green", help="Beilinson-Green algebras")
    green_sub = green.add_subparsers(dest="action", required=True)
    build = green_sub.add_parser("build")
    build.add_argument("--phi", type=_phi_arg, required=True)
    build.add_argument("--object", required=True)
    build.add_argument("--algebra", required=True)
    build.add_argument("--shift-power", type=int, default=1)
    build.add_argument("--prime", type=int)
    green.set_defaults(func=cmd_green)

    ver = sub.add_parser("verify", help="run the derived-equivalence check on scenario files")
    ver.add_argument("--scenario", action="append", required=True)
    ver.add_argument("--phi", type=_phi_arg)
    ver.add_argument("--prime", type=int)
    ver.add_argument("--orth-bound", type=int)
    ver.add_argument("--jobs", type=int, default=1)
    ver.set_defaults(func=cmd_verify)

    ex = sub.add_parser("example5", help="the two-loop worked example")
    ex.add_argument("--n", type=int, default=2)
    ex.add_argument("--s", type=int, default=2)
    ex.add_argument("--prime", type=int)
    ex.set_defaults(func=cmd_example5)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, NotAdmissible, InvalidSpec) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except NotNilpotentAtBound as exc:
        print(f"error: {exc}; raise length_bound in the algebra spec", file=sys.stderr)
        return EXIT_FAIL
    except PrimeTooSmall as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
