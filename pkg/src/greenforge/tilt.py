"""Approximation triangles, the tilting set, fingerprints and the end-to-end check."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Mapping, Sequence

import numpy as np

from .approx import (ApproxContext, Approximation, HypothesesFailed, fcogh, lemma_fg_check, right_approximation)
from .catcore import (CatComplex, HomotopyCategory, ProjCategory, QuotientCategory, assemble,
                      endomorphism_algebra, formal_identity, hom_complexes, mapping_cone, shift_complex)
from .exactlin import QuotientSpace, Subspace, left_kernel, matmul, next_prime
from .green import (GreenAlgebra, build_green, build_ideal_I, build_ideal_J, quotient_algebra)
from .phiorbit import AdmissibleSet, OrbitCategory
from .quivalg import (Algebra, PathBoundSpec, build_algebra, product_space, trace_radical)


class SelfOrthFailed(RuntimeError):
    def __init__(self, shift: int, dim: int):
        super().__init__(f"Hom(T, T[{shift}]) has dimension {dim}")
        self.shift, self.dim = shift, dim


class NotSplitOverField(RuntimeError):
    pass


class PrimeTooSmall(ValueError):
    def __init__(self, dim: int, p: int):
        super().__init__(f"the trace-form radical needs p > dim; got dim {dim} with p = {p}; "
                         f"try --prime {next_prime(4 * dim)}")
        self.dim, self.p = dim, p


# ---------------------------------------------------------------------------
# triangles


@dataclass
class NAangleData:
    """x -f-> D -g-> y -> x[1] inside a homotopy category (n = 3)."""

    hcat: HomotopyCategory
    x: str
    middle: tuple
    y: str
    f: Approximation
    g: Approximation


def direct_sum(complexes: Sequence[CatComplex], base) -> CatComplex:
    degrees = sorted({i for c in complexes for i in c.terms})
    terms = {i: sum((c.term(i) for c in complexes), ()) for i in degrees}
    diffs = {}
    for i in degrees:
        rows = [c.term(i) for c in complexes]
        cols = [c.term(i + 1) for c in complexes]
        diffs[i] = assemble(base, rows, cols, {(k, k): c.diff(base, i) for k, c in enumerate(complexes)})
    return CatComplex(terms, diffs)


def build_triangle_from_approx(hcat: HomotopyCategory, m: Sequence[str], y: str,
                               name: str | None = None, minimal: bool = True) -> NAangleData:
    """Complete a right add(M)-approximation g: D -> y to a triangle x -> D -> y -> x[1].

    x is the cocone of g, added to ``hcat`` under ``name``; its degree i term is
    y^{i-1} (+) D^i with differential [[-d_y, 0], [-g^i, d_D]] and f is the
    projection onto D.
    """
    base = hcat.base
    ctx = ApproxContext(OrbitCategory(hcat, (0,), 0), tuple(m))
    g = right_approximation(ctx, y, minimal=minimal)
    D = g.summands
    name = name or f"cocone({y})"
    Y = hcat.complexes[y]
    parts = [hcat.complexes[s] for s in D]
    dsum = direct_sum(parts, base)
    reps, off = [], 0
    for s in D:
        n = hcat.hom_dim((s, 0), (y, 0))
        reps.append(hcat.representative(s, y, g.vector[off:off + n]))
        off += n
    g_blocks = {}
    for i in dsum.degrees:
        pieces = {(k, 0): hcat.space(s, y, 0).block(reps[k], i)
                  for k, (s, part) in enumerate(zip(D, parts)) if part.term(i) and Y.term(i)}
        g_blocks[i] = assemble(base, [part.term(i) for part in parts], [Y.term(i)], pieces)
    x = shift_complex(mapping_cone(base, dsum, Y, g_blocks), -1)
    hcat.add_complex(name, x)
    # f: x -> D_k projects the degree-i term y^{i-1} (+) D^i onto the k-th part of D^i
    f_parts = []
    for k, (s, part) in enumerate(zip(D, parts)):
        blocks = {}
        for i in x.degrees:
            src = [Y.term(i - 1)] + [pp.term(i) for pp in parts]
            if part.term(i):
                blocks[i] = assemble(base, src, [part.term(i)], {(1 + k, 0): formal_identity(base, part.term(i))})
            else:
                blocks[i] = np.zeros(0, dtype=np.int64)
        f_parts.append(hcat.element(name, s, blocks))
    f_vec = np.concatenate(f_parts) if f_parts else np.zeros(0, dtype=np.int64)
    return NAangleData(hcat, name, tuple(D), y, Approximation(tuple(D), name, f_vec, "left"), g)


# ---------------------------------------------------------------------------
# tilting set


@dataclass
class TiltingSet:
    t_complex: CatComplex
    quotient: QuotientCategory
    orthogonality: dict               # shift -> dim Hom(T, T[shift])
    green: GreenAlgebra
    gamma: Algebra                    # G(U) / I
    gamma_space: QuotientSpace
    columns: dict                     # i -> complex over proj(gamma)
    summands: tuple                   # U


def build_T(data: NAangleData, ctx: ApproxContext, orth_bound: int = 4) -> TiltingSet:
    """T = (x -[f, 0]-> D (+) M) with x in degree 0, over the orbit category modulo Fcogh_add(M)."""
    orbit = ctx.category
    M = ctx.M
    objs = list(dict.fromkeys((data.x,) + tuple(data.middle) + M))
    ideal = {(a, b): fcogh(ctx, a, b) for a, b in product(objs, repeat=2)}
    quot = QuotientCategory(orbit, ideal, objs)
    top = tuple(data.middle) + M
    # f has its tokens in the degree-0 orbit component
    pieces = {}
    off = 0
    for k, s in enumerate(data.middle):
        n = orbit.hcat.hom_dim((data.x, 0), (s, 0))
        tok = orbit.embed(data.x, s, 0, data.f.vector[off:off + n])
        pieces[k] = quot.project(data.x, s, tok)
        off += n
    diff = assemble(quot, [(data.x,)], [(s,) for s in top], {(0, k): v for k, v in pieces.items()})
    T = CatComplex({0: (data.x,), 1: top}, {0: diff})
    if not T.check(quot):
        raise ArithmeticError("T does not square to zero")
    orth = {}
    for m in range(-orth_bound, orth_bound + 1):
        if m == 0:
            continue
        orth[m] = hom_complexes(quot, T, T, m).dim
    bad = [(m, dmn) for m, dmn in orth.items() if dmn]
    if bad:
        raise SelfOrthFailed(*bad[0])

    U = (data.x,) + M
    green = build_green(orbit, U)
    plain = ApproxContext(OrbitCategory(orbit.hcat, (0,), orbit.d), M)
    I = build_ideal_I(green, plain)
    gamma = quotient_algebra(green.algebra, I)
    qspace = QuotientSpace(Subspace.full(green.dim), I.space, green.algebra.p)
    proj = ProjCategory(gamma)
    columns = {}
    for i in orbit.phi:
        src = green.vertex(i, data.x)
        tgt = tuple(green.vertex(i, s) for s in top)
        pieces = {}
        off = 0
        for k, s in enumerate(data.middle):
            n = orbit.hcat.hom_dim((data.x, 0), (s, 0))
            elem = green.element(i, i, data.x, s, data.f.vector[off:off + n])
            pieces[(0, k)] = proj.element(src, tgt[k], qspace.coords(elem)[0])
            off += n
        d0 = assemble(proj, [(src,)], [(v,) for v in tgt], pieces)
        columns[i] = CatComplex({0: (src,), 1: tgt}, {0: d0})
    return TiltingSet(T, quot, orth, green, gamma, qspace, columns, U)


def endo_in_quotient(ts: TiltingSet) -> tuple[Algebra, dict]:
    """End of the sum of the columns in K^b(proj gamma), with per-block dimensions."""
    proj = ProjCategory(ts.gamma)
    names = {i: f"T{i}" for i in ts.columns}
    hcat = HomotopyCategory(proj, {names[i]: c for i, c in ts.columns.items()})
    objs = [(names[i], 0) for i in ts.columns]
    alg = endomorphism_algebra(hcat, objs, names=[names[i] for i in ts.columns])
    blocks = {f"{i},{j}": hcat.hom_dim((names[i], 0), (names[j], 0)) for i, j in product(ts.columns, repeat=2)}
    return alg, blocks


# ---------------------------------------------------------------------------
# fingerprints


@dataclass
class Fingerprint:
    dim: int
    radical_dims: list
    center_dim: int
    semisimple_dim: int
    cartan_entries: list
    cartan_canonical: list | None = None

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "radical_dims": self.radical_dims,
            "center_dim": self.center_dim,
            "semisimple_dim": self.semisimple_dim,
            "cartan_entries": self.cartan_entries,
            "cartan_canonical": self.cartan_canonical,
        }


def center(alg: Algebra) -> Subspace:
    n = alg.dim
    cols = [np.mod(alg.mult[:, j, :] - alg.mult[j, :, :], alg.p) for j in range(n)]
    return left_kernel(np.hstack(cols), alg.p, rows=n) if cols else Subspace.zero(0)


def _corner_space(alg: Algebra, e, f) -> Subspace:
    eye = np.eye(alg.dim, dtype=np.int64)
    left = alg.multiply(np.broadcast_to(e, eye.shape), eye)
    return Subspace.span(alg.multiply(left, np.broadcast_to(f, eye.shape)), alg.dim, alg.p)


def _split_idempotent(s: Algebra, e, rng, tries: int = 40) -> list[np.ndarray]:
    """Split an idempotent of a semisimple algebra into primitive orthogonal ones."""
    p = s.p
    corner = _corner_space(s, e, e)
    if corner.dim == 1:
        return [e]
    n = corner.dim
    for _ in range(tries):
        c = matmul(rng.integers(0, p, size=(1, n)), corner.basis, p)[0]
        # left multiplication by c restricted to eSe, in the corner's coordinates
        img = s.multiply(np.broadcast_to(c, corner.basis.shape), corner.basis)
        L = corner.coords(img, p)
        found, covered = [], 0
        for lam in range(p):
            shifted = np.mod(L - lam * np.eye(n, dtype=np.int64), p)
            power = np.eye(n, dtype=np.int64)
            for _ in range(n):
                power = matmul(power, shifted, p)
            gen = left_kernel(power, p, rows=n)
            if gen.dim:
                found.append(gen)
                covered += gen.dim
            if covered == n:
                break
        if covered < n:
            continue            # characteristic polynomial does not split for this c
        if len(found) < 2:
            continue
        # e = sum of its components along the generalised eigenspaces of L_c
        coords_e = corner.coords(e.reshape(1, -1), p)[0]
        stacked = np.vstack([g.basis for g in found])
        sol = left_kernel(np.vstack([stacked, coords_e.reshape(1, -1)]), p)
        # express coords_e = sum_k a_k stacked_k
        vec = sol.basis[0]
        inv = pow(int((-vec[-1]) % p), p - 2, p)
        a = np.mod(vec[:-1] * inv, p)
        parts, off = [], 0
        for g in found:
            piece = matmul(a[off:off + g.dim].reshape(1, -1), g.basis, p)
            parts.append(matmul(piece, corner.basis, p)[0])
            off += g.dim
        out = []
        for part in parts:
            if np.any(part):
                out.extend(_split_idempotent(s, part, rng, tries))
        return out
    raise NotSplitOverField("could not split an idempotent over F_p; raise the prime or extend the field")


def _lift_idempotents(alg: Algebra, rad: Subspace, q: QuotientSpace, ebar: list) -> list[np.ndarray]:
    p = alg.p
    one = alg.one
    lifted: list[np.ndarray] = []
    for k, e in enumerate(ebar):
        f = np.mod(one - sum(lifted, np.zeros(alg.dim, dtype=np.int64)), p)
        if k == len(ebar) - 1:
            lifted.append(f)
            break
        a = q.lift(e.reshape(1, -1))[0]
        a = alg.multiply(alg.multiply(f, a), f)
        for _ in range(64):
            a2 = alg.multiply(a, a)
            if np.array_equal(a2, a):
                break
            a = np.mod(3 * a2 - 2 * alg.multiply(a2, a), p)
        else:
            raise ArithmeticError("idempotent lifting did not converge")
        lifted.append(a)
    return lifted


def primitive_idempotents(alg: Algebra, seed: int = 0) -> list[np.ndarray]:
    p = alg.p
    if alg.dim >= p:
        raise PrimeTooSmall(alg.dim, p)
    rad = trace_radical(alg)
    s = quotient_algebra(alg, rad, verify=False)
    q = QuotientSpace(Subspace.full(alg.dim), rad, p)
    rng = np.random.default_rng(seed)
    ebar = []
    for u in s.units:
        if np.any(u):
            ebar.extend(_split_idempotent(s, u, rng))
    return _lift_idempotents(alg, rad, q, ebar)


def _canonical_matrix(c: np.ndarray):
    r = c.shape[0]
    if r > 7:
        return None
    best = None
    for perm in permutations(range(r)):
        cand = c[np.ix_(perm, perm)].tolist()
        if best is None or cand < best:
            best = cand
    return best


def fingerprint(alg: Algebra, seed: int = 0) -> Fingerprint:
    p = alg.p
    if alg.dim >= p:
        raise PrimeTooSmall(alg.dim, p)
    rad = trace_radical(alg)
    dims = []
    power = rad
    while power.dim:
        dims.append(power.dim)
        nxt = product_space(alg, power, rad)
        if nxt.dim >= power.dim:
            raise ArithmeticError("radical is not nilpotent")
        power = nxt
    idem = primitive_idempotents(alg, seed)
    cartan = np.array([[_corner_space(alg, e, f).dim for f in idem] for e in idem], dtype=np.int64)
    return Fingerprint(alg.dim, dims, center(alg).dim, alg.dim - rad.dim,
                       sorted(int(v) for v in cartan.reshape(-1)), _canonical_matrix(cartan))


# ---------------------------------------------------------------------------
# presentations


def _evaluate(alg: Algebra, images: Mapping[str, np.ndarray], path: Sequence[str]) -> np.ndarray:
    out = None
    for label in path:
        out = images[label] if out is None else alg.multiply(out, images[label])
    return out


def presentation_check(alg: Algebra, spec: PathBoundSpec, images: Mapping[str, np.ndarray]) -> dict:
    """Do the images satisfy the presentation, generate alg, and match its dimension?

    ``images`` maps every vertex and arrow label of the quiver to an element of alg.
    """
    p = alg.p
    q = spec.quiver
    verts = [np.mod(np.asarray(images[v], dtype=np.int64), p) for v in q.vertices]
    out = {"relations": True, "failed_relation": None}
    ok_idem = all(np.array_equal(alg.multiply(e, f), e if i == j else np.zeros_like(e))
                  for i, e in enumerate(verts) for j, f in enumerate(verts))
    out["orthogonal_idempotents"] = bool(ok_idem and np.array_equal(np.mod(sum(verts), p), alg.one))
    for a in q.arrows:
        e_s = verts[q.vertex_index(a.source)]
        e_t = verts[q.vertex_index(a.target)]
        img = np.asarray(images[a.label], dtype=np.int64)
        if not np.array_equal(alg.multiply(alg.multiply(e_s, img), e_t), np.mod(img, p)):
            out["orthogonal_idempotents"] = False
    for k, rel in enumerate(spec.relations):
        total = np.zeros(alg.dim, dtype=np.int64)
        for coef, path in rel.terms:
            total = np.mod(total + coef * _evaluate(alg, images, path), p)
        if np.any(total):
            out["relations"] = False
            out["failed_relation"] = k
            break
    # span of all paths up to the bound
    layer = [np.asarray(images[a.label], dtype=np.int64) for a in q.arrows]
    arrows = list(layer)
    span = Subspace.span(np.vstack(verts + layer), alg.dim, p)
    for _ in range(spec.length_bound - 1):
        if not layer:
            break
        nxt = [alg.multiply(u, v) for u in layer for v in arrows]
        nxt = [v for v in nxt if np.any(v)]
        if not nxt:
            break
        layer = list(Subspace.span(np.vstack(nxt), alg.dim, p).basis)
        span = Subspace.span(np.vstack([span.basis] + layer), alg.dim, p)
    out["generates"] = span.dim == alg.dim
    presented = build_algebra(spec, p)
    out["presented_dim"] = presented.dim
    out["dim"] = alg.dim
    out["holds"] = bool(out["relations"] and out["orthogonal_idempotents"] and out["generates"]
                        and presented.dim == alg.dim)
    return out


# ---------------------------------------------------------------------------
# the pipeline


@dataclass
class Scenario:
    name: str
    algebra: PathBoundSpec
    complexes: dict                       # name -> CatComplex over proj of the algebra
    m: tuple
    right_end: str
    phi: tuple = (0,)
    shift_power: int = 1
    orth_bound: int = 4
    minimal: bool = True
    expected: dict = field(default_factory=dict)


def verify_theorem31(sc: Scenario, p: int | None = None, alg: Algebra | None = None) -> dict:
    """Run the full pipeline; returns a report whose "status" is PASS, FAIL or HYPOTHESES_FAILED."""
    from .exactlin import _p
    p = _p(p)
    alg = alg or build_algebra(sc.algebra, p)
    base = ProjCategory(alg)
    hcat = HomotopyCategory(base, sc.complexes)
    phi = AdmissibleSet(tuple(sc.phi))
    report: dict = {"scenario": sc.name, "prime": p, "phi": list(phi), "shift_power": sc.shift_power,
                    "algebra_dim": alg.dim}

    tri = build_triangle_from_approx(hcat, sc.m, sc.right_end, name="cocone")
    report["triangle"] = {"middle": list(tri.middle), "x": tri.x, "y": tri.y}
    orbit = OrbitCategory(hcat, phi, sc.shift_power)
    ctx = ApproxContext(orbit, sc.m)
    try:
        gate = lemma_fg_check(ctx, tri.x, tri.y, tri.f, tri.g)
    except HypothesesFailed as exc:
        report["gate"] = {"passed": False, "witnesses": exc.witnesses}
        report["status"] = "HYPOTHESES_FAILED"
        return report
    report["gate"] = {"passed": True, **_jsonable(gate)}
    if not (gate["fgh_equal"] and gate["fcogh_equal"]):
        report["status"] = "FAIL"
        report["failure"] = "factorizable ghost ideals differ after the gate passed"
        return report

    ts = build_T(tri, ctx, sc.orth_bound)
    report["self_orthogonality"] = {str(m): d for m, d in sorted(ts.orthogonality.items())}
    report["green_U"] = {"dim": ts.green.dim, "ideal_I": ts.green.dim - ts.gamma.dim, "quotient_dim": ts.gamma.dim,
                         "block_dims": {f"{l},{t}": n for (l, t), n in sorted(ts.green.block_dims().items())}}
    V = (tri.y,) + tuple(sc.m)
    gV = build_green(orbit, V)
    J = build_ideal_J(gV, ApproxContext(OrbitCategory(hcat, (0,), sc.shift_power), sc.m))
    gammaV = quotient_algebra(gV.algebra, J)
    qV = QuotientSpace(Subspace.full(gV.dim), J.space, p)
    v_blocks = {}
    for (l, t), _ in sorted(gV.block_dims().items()):
        idx = [b for b, (ll, tt, *_r) in enumerate(gV.block_index) if (ll, tt) == (l, t)]
        sub = Subspace.span(np.eye(gV.dim, dtype=np.int64)[idx], gV.dim, p) if idx else Subspace.zero(gV.dim)
        v_blocks[f"{l},{t}"] = qV.image_of(sub).dim
    report["green_V"] = {"dim": gV.dim, "ideal_J": J.dim, "quotient_dim": gammaV.dim,
                         "quotient_block_dims": v_blocks}
    end, t_blocks = endo_in_quotient(ts)
    report["tilting_endomorphisms"] = {"dim": end.dim, "block_dims": t_blocks}
    fp_t = fingerprint(end)
    fp_v = fingerprint(gammaV)
    report["fingerprints"] = {"tilting": fp_t.to_json(), "green_V_mod_J": fp_v.to_json()}
    blocks_ok = all(t_blocks.get(k, 0) == v for k, v in v_blocks.items()) and \
        all(v_blocks.get(k, 0) == v for k, v in t_blocks.items())
    report["block_dims_match"] = blocks_ok
    report["fingerprints_equal"] = fp_t == fp_v
    report["status"] = "PASS" if fp_t == fp_v and blocks_ok else "FAIL"
    return report


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj
