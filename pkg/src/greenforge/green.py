"""Beilinson-Green algebras of finite admissible Phi, their ideals I, J and quotients."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np

from .approx import ApproxContext, fcogh, fgh
from .catcore import IdealNotClosed
from .exactlin import QuotientSpace, Subspace, kernel, matmul
from .phiorbit import AdmissibleSet, OrbitCategory
from .quivalg import Algebra


@dataclass
class GreenAlgebra:
    phi: AdmissibleSet
    objects: tuple
    d: int
    algebra: Algebra
    block_index: list        # basis index -> (l, t, a, b, token)
    offsets: dict            # (l, t, a, b) -> (offset, size)
    vertices: list           # idempotent index -> (i, a)

    @property
    def dim(self) -> int:
        return self.algebra.dim

    def block_dims(self) -> dict:
        out = {}
        for (l, t, a, b), (_, n) in self.offsets.items():
            out[(l, t)] = out.get((l, t), 0) + n
        return out

    def vertex(self, i: int, a) -> int:
        if not isinstance(a, int):
            a = self.objects.index(a)
        return self.vertices.index((i, a))

    def element(self, l: int, t: int, a, b, coords) -> np.ndarray:
        """Algebra element supported on one block and one summand pair."""
        a = a if isinstance(a, int) else self.objects.index(a)
        b = b if isinstance(b, int) else self.objects.index(b)
        out = np.zeros(self.dim, dtype=np.int64)
        off, n = self.offsets[(l, t, a, b)]
        out[off:off + n] = coords
        return out

    def to_json(self) -> dict:
        return {
            "phi": list(self.phi),
            "shift_power": self.d,
            "objects": [str(o) for o in self.objects],
            "dim": self.dim,
            "block_dims": {f"{l},{t}": n for (l, t), n in sorted(self.block_dims().items())},
            "idempotent_columns": {str(i): n for i, n in idempotent_columns(self).items()},
            "algebra": self.algebra.to_json(),
        }


def build_green(cat: OrbitCategory, objects: Sequence, verify: bool = True) -> GreenAlgebra:
    """Block (l, t) is E^{l-t}(U) for U the sum of the objects; products x_{lk} F^{l-k}(y_{kt})."""
    phi = cat.phi
    U = tuple(objects)
    k = len(U)
    offsets, index, labels, off = {}, [], [], 0
    vertices = [(i, a) for i in phi for a in range(k)]
    vpos = {v: n for n, v in enumerate(vertices)}
    corners = []
    for l, t in product(phi, repeat=2):
        if l - t not in phi:
            continue
        for a, b in product(range(k), repeat=2):
            n = cat.component_dim(U[a], U[b], l - t)
            offsets[(l, t, a, b)] = (off, n)
            for tok in range(n):
                index.append((l, t, a, b, tok))
                labels.append(f"{l},{t}:{U[a]}>{U[b]}:{tok}")
                corners.append((vpos[(l, a)], vpos[(t, b)]))
            off += n
    dim = off
    mult = np.zeros((dim, dim, dim), dtype=np.int64)
    for l, m, t in product(phi, repeat=3):
        if l - m not in phi or m - t not in phi or l - t not in phi:
            continue
        for a, b, c in product(range(k), repeat=3):
            o1, n1 = offsets[(l, m, a, b)]
            o2, n2 = offsets[(m, t, b, c)]
            o3, n3 = offsets[(l, t, a, c)]
            if n1 and n2 and n3:
                mult[o1:o1 + n1, o2:o2 + n2, o3:o3 + n3] = cat.component_tensor(U[a], U[b], U[c], l - m, m - t)
    units = np.zeros((len(vertices), dim), dtype=np.int64)
    for n, (i, a) in enumerate(vertices):
        o, s = offsets[(i, i, a, a)]
        units[n, o:o + s] = cat.hcat.identity((U[a], 0))
    alg = Algebra(labels, mult, units, vertex_labels=[f"{i}:{U[a]}" for i, a in vertices],
                  p=cat.p, corners=corners)
    g = GreenAlgebra(phi, U, cat.d, alg, index, offsets, vertices)
    if verify:
        bad = alg.check_associative()
        if bad is not None:
            raise ArithmeticError(f"Green algebra is not associative at basis triple {bad}")
        if not alg.check_unit():
            raise ArithmeticError("idempotents do not sum to the identity")
    return g


def idempotent_columns(g: GreenAlgebra) -> dict:
    """dim G e_i for each i in Phi, with e_i the sum of the e_(i, a)."""
    cols = {i: 0 for i in g.phi}
    for l, t, a, b, tok in g.block_index:
        cols[t] += 1
    if sum(cols.values()) != g.dim:
        raise ArithmeticError("columns do not partition the basis")
    return cols


def _left_module(alg: Algebra, v: int) -> list[int]:
    """Basis of G e_v."""
    return [b for b, (_, j) in enumerate(alg.corner_of()) if j == v]


def module_hom_space(alg: Algebra, u: int, v: int) -> Subspace:
    """Left G-module maps G e_u -> G e_v, as matrices flattened row-major (row convention)."""
    src, tgt = _left_module(alg, u), _left_module(alg, v)
    ns, nt = len(src), len(tgt)
    if not ns or not nt:
        return Subspace.zero(ns * nt)
    p = alg.p
    # phi(g s) = g phi(s) for all basis g and s in the source basis
    rows = []
    for gb in range(alg.dim):
        ls = alg.mult[gb][np.ix_(src, src)]          # g . s in the source basis  (ns x ns)
        lt = alg.mult[gb][np.ix_(tgt, tgt)]          # g . w in the target basis  (nt x nt)
        # (Ls Phi - Phi Lt) as a linear function of Phi (ns x nt unknowns)
        a = np.kron(ls, np.eye(nt, dtype=np.int64)) - np.kron(np.eye(ns, dtype=np.int64), lt.T)
        rows.append(np.mod(a, p))
    sysmat = np.vstack(rows)
    return kernel(sysmat, p, cols=ns * nt)


def lemma_llx_check(g: GreenAlgebra, x1, x2, i: int, j: int, x3=None, k: int | None = None) -> dict:
    """Compare Hom_G(G e_(i,x1), G e_(j,x2)) with E^{i-j}(x1, x2) and check mu is multiplicative.

    mu sends y in E^{i-j}(x1, x2), placed in block (i, j), to right multiplication by y.
    """
    alg, p = g.algebra, g.algebra.p
    u, v = g.vertex(i, x1), g.vertex(j, x2)
    homs = module_hom_space(alg, u, v)
    a1 = x1 if isinstance(x1, int) else g.objects.index(x1)
    a2 = x2 if isinstance(x2, int) else g.objects.index(x2)
    expected = g.offsets[(i, j, a1, a2)][1] if (i, j, a1, a2) in g.offsets else 0
    src, tgt = _left_module(alg, u), _left_module(alg, v)

    def mu(y, s, t):
        return alg.mult[np.ix_(s, range(alg.dim), t)].transpose(0, 2, 1) @ y % p

    images = []
    if expected:
        off, n = g.offsets[(i, j, a1, a2)]
        for tok in range(n):
            y = np.zeros(alg.dim, dtype=np.int64)
            y[off + tok] = 1
            images.append(mu(y, src, tgt).reshape(-1))
    images = np.array(images, dtype=np.int64).reshape(len(images), len(src) * len(tgt))
    in_space = homs.contains(images, p) if len(images) else True
    injective = Subspace.span(images, len(src) * len(tgt), p).dim == expected if len(images) else True
    out = {
        "module_hom_dim": homs.dim,
        "expected_dim": expected,
        "mu_lands_in_homs": bool(in_space),
        "mu_injective": bool(injective),
    }
    if x3 is not None and k is not None:
        a3 = x3 if isinstance(x3, int) else g.objects.index(x3)
        w = g.vertex(k, x3)
        third = _left_module(alg, w)
        ok = True
        if (i, j, a1, a2) in g.offsets and (j, k, a2, a3) in g.offsets:
            o1, n1 = g.offsets[(i, j, a1, a2)]
            o2, n2 = g.offsets[(j, k, a2, a3)]
            for s1, s2 in product(range(n1), range(n2)):
                y1 = np.zeros(alg.dim, dtype=np.int64)
                y2 = np.zeros(alg.dim, dtype=np.int64)
                y1[o1 + s1] = 1
                y2[o2 + s2] = 1
                lhs = mu(alg.multiply(y1, y2), src, third)
                rhs = matmul(mu(y1, src, tgt), mu(y2, tgt, third), p)
                if not np.array_equal(lhs, rhs):
                    ok = False
                    break
        out["multiplicative"] = ok
    out["holds"] = (out["module_hom_dim"] == expected and out["mu_lands_in_homs"]
                    and out["mu_injective"] and out.get("multiplicative", True))
    return out


# ---------------------------------------------------------------------------
# ideals and quotients


def ideal_witness(alg: Algebra, sub: Subspace):
    """None if sub is a two-sided ideal, else (side, generator row, basis index)."""
    if sub.dim == 0:
        return None
    p = alg.p
    left = np.mod(np.einsum("si,ijk->sjk", sub.basis, alg.mult), p)     # s * b_j
    right = np.mod(np.einsum("sj,ijk->sik", sub.basis, alg.mult), p)    # b_i * s
    for side, prods in (("right", left), ("left", right)):
        flat = prods.reshape(-1, alg.dim)
        if not sub.contains(flat, p):
            red = QuotientSpace(Subspace.full(alg.dim), sub, p).reduce(flat)
            s, b = divmod(int(np.flatnonzero(np.any(red != 0, axis=1))[0]), alg.dim)
            return (side, s, b)
    return None


@dataclass
class IdealBasis:
    space: Subspace
    block_diagonal: bool
    block_dims: dict

    @property
    def dim(self) -> int:
        return self.space.dim


def _diagonal_ideal(g: GreenAlgebra, pieces: dict) -> IdealBasis:
    """Place an ideal of End(U) (per summand pair) in every diagonal block."""
    rows = []
    dims = {}
    for i in g.phi:
        count = 0
        for (a, b), sub in pieces.items():
            if sub.dim == 0:
                continue
            off, n = g.offsets[(i, i, a, b)]
            r = np.zeros((sub.dim, g.dim), dtype=np.int64)
            r[:, off:off + n] = sub.basis
            rows.append(r)
            count += sub.dim
        dims[f"{i},{i}"] = count
    space = Subspace.span(np.vstack(rows), g.dim, g.algebra.p) if rows else Subspace.zero(g.dim)
    ideal = IdealBasis(space, True, dims)
    bad = ideal_witness(g.algebra, space)
    if bad is not None:
        raise IdealNotClosed(f"block-diagonal ideal is not closed: {bad}", bad)
    return ideal


def _plain_pieces(g: GreenAlgebra, ctx: ApproxContext, fn) -> dict:
    plain = ctx.category
    if isinstance(plain, OrbitCategory) and tuple(plain.phi) != (0,):
        raise ValueError("the ideals I and J live in the plain category; use Phi = {0}")
    return {(a, b): fn(ctx, g.objects[a], g.objects[b])
            for a, b in product(range(len(g.objects)), repeat=2)}


def build_ideal_I(g: GreenAlgebra, ctx: ApproxContext) -> IdealBasis:
    """Fcogh_M(U) in each diagonal block."""
    return _diagonal_ideal(g, _plain_pieces(g, ctx, fcogh))


def build_ideal_J(g: GreenAlgebra, ctx: ApproxContext) -> IdealBasis:
    """Fgh_M(V) in each diagonal block."""
    return _diagonal_ideal(g, _plain_pieces(g, ctx, fgh))


def quotient_algebra(alg: Algebra, ideal: IdealBasis | Subspace, verify: bool = True) -> Algebra:
    """Structure constants on the canonical complement of a two-sided ideal."""
    sub = ideal.space if isinstance(ideal, IdealBasis) else ideal
    p = alg.p
    bad = ideal_witness(alg, sub)
    if bad is not None:
        raise IdealNotClosed(f"not an ideal: {bad}", bad)
    q = QuotientSpace(Subspace.full(alg.dim), sub, p)
    reps = q.reps
    n = q.dim
    prods = alg.multiply(np.repeat(reps, n, axis=0), np.tile(reps, (n, 1)))
    mult = q.coords(prods).reshape(n, n, n)
    units = q.coords(alg.units)
    corners = None
    try:
        cof = alg.corner_of()
        corners = []
        for r in reps:
            found = {cof[b] for b in np.flatnonzero(r)}
            if len(found) != 1:
                corners = None
                break
            corners.append(found.pop())
    except ValueError:
        corners = None
    grading = None
    if alg.grading is not None:
        grading = [alg.grading[piv] for piv in q.pivots]
    out = Algebra([alg.labels[piv] for piv in q.pivots], mult, units, grading=grading,
                  vertex_labels=alg.vertex_labels, p=p, corners=corners)
    if verify:
        if out.check_associative() is not None or not out.check_unit():
            raise ArithmeticError("quotient algebra fails associativity or unit laws")
    return out
