"""add(M)-approximations and the ghost, coghost and factorization ideals.

Everything is computed inside a category whose hom spaces already carry the
Phi-orbit grading (an ``OrbitCategory``, or a plain category for Phi = {0}),
so "maps from F^{-i}M" are simply orbit morphisms out of M.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Mapping, Sequence

import numpy as np

from .catcore import (CatComplex, ComputedCategory, FormalObject, HomotopyCategory, ProjCategory,
                      ideal_closure_witness, left_action, right_action)
from .exactlin import (QuotientSpace, Subspace, annihilator, intersect, left_kernel, matmul)
from .phiorbit import AdmissibleSet, OrbitCategory
from .quivalg import radical_generators, trace_radical
from .catcore import endomorphism_algebra


class HypothesesFailed(RuntimeError):
    """The theorem's applicability conditions do not hold for a scenario."""

    def __init__(self, message: str, witnesses=None):
        super().__init__(message)
        self.witnesses = witnesses or {}


@dataclass
class ApproxContext:
    category: ComputedCategory
    m_summands: FormalObject

    def __post_init__(self):
        if not isinstance(self.m_summands, FormalObject):
            self.m_summands = FormalObject(tuple(self.m_summands))
        objs = set(self.category.objects())
        missing = [m for m in self.m_summands if m not in objs]
        if missing:
            raise ValueError(f"M summands {missing} are not objects of the category")

    @property
    def p(self) -> int:
        return self.category.p

    @property
    def phi(self) -> AdmissibleSet:
        return getattr(self.category, "phi", AdmissibleSet((0,)))

    @property
    def f_power(self) -> int:
        return getattr(self.category, "d", 0)

    @property
    def M(self) -> tuple:
        return tuple(self.m_summands)


@dataclass
class Approximation:
    """A morphism D -> x (right) or x -> D (left) between formal sums."""

    summands: tuple          # the add(M) side, one entry per copy
    target: object
    vector: np.ndarray       # flat coordinates in Hom(D, x) or Hom(x, D)
    side: str


def _radical_blocks(ctx: ApproxContext):
    """Per pair (a, b) of M summands, the radical of End(M) inside Hom(M_a, M_b)."""
    cat, M = ctx.category, ctx.M
    end = endomorphism_algebra(cat, M)
    rad = trace_radical(end)
    out = {}
    for a, b in product(range(len(M)), repeat=2):
        off, n = end.block_offsets[(a, b)]
        rows = rad.basis[:, off:off + n] if rad.dim else np.zeros((0, n), dtype=np.int64)
        # a radical element restricted to a block stays radical (block corners are e_a rad e_b)
        out[(a, b)] = Subspace.span(rows, n, ctx.p)
    return out


def right_approximation(ctx: ApproxContext, x, minimal: bool = False) -> Approximation:
    """D_x -> x with one copy of M_a per chosen token of Hom(M_a, x).

    With ``minimal`` the tokens of Hom(M_a, x) are a complement of the maps
    factoring through rad End(M); otherwise the full hom basis is used.
    """
    cat, M, p = ctx.category, ctx.M, ctx.p
    rads = _radical_blocks(ctx) if minimal else None
    summands, pieces = [], []
    for a, m in enumerate(M):
        n = cat.hom_dim(m, x)
        if not n:
            continue
        if minimal:
            through = []
            for b, mb in enumerate(M):
                r = rads[(a, b)]
                t = cat.compose_tensor(m, mb, x)
                if r.dim and t.shape[1]:
                    prods = np.einsum("si,ijk->sjk", r.basis, t).reshape(-1, n)
                    through.append(np.mod(prods, p))
            sub = Subspace.span(np.vstack(through), n, p) if through else Subspace.zero(n)
            tokens = QuotientSpace(Subspace.full(n), sub, p).reps
        else:
            tokens = np.eye(n, dtype=np.int64)
        for tok in tokens:
            summands.append(m)
            pieces.append(tok)
    vec = np.concatenate(pieces) if pieces else np.zeros(0, dtype=np.int64)
    return Approximation(tuple(summands), x, np.mod(vec, p), "right")


def left_approximation(ctx: ApproxContext, x, minimal: bool = False) -> Approximation:
    """x -> D^x, dual to ``right_approximation``."""
    cat, M, p = ctx.category, ctx.M, ctx.p
    rads = _radical_blocks(ctx) if minimal else None
    summands, cols = [], []
    for a, m in enumerate(M):
        n = cat.hom_dim(x, m)
        if not n:
            continue
        if minimal:
            through = []
            for b, mb in enumerate(M):
                r = rads[(b, a)]
                t = cat.compose_tensor(x, mb, m)
                if r.dim and t.shape[0]:
                    prods = np.einsum("tj,ijk->itk", r.basis, t).reshape(-1, n)
                    through.append(np.mod(prods, p))
            sub = Subspace.span(np.vstack(through), n, p) if through else Subspace.zero(n)
            tokens = QuotientSpace(Subspace.full(n), sub, p).reps
        else:
            tokens = np.eye(n, dtype=np.int64)
        for tok in tokens:
            summands.append(m)
            cols.append(tok)
    # Hom((x,), D) is laid out summand by summand, which is exactly this concatenation
    vec = np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64)
    return Approximation(tuple(summands), x, np.mod(vec, p), "left")


def to_orbit(cat: ComputedCategory, approx: Approximation) -> Approximation:
    """Re-express an approximation given by plain morphisms in orbit coordinates (degree 0)."""
    if not isinstance(cat, OrbitCategory):
        return approx
    pieces, off = [], 0
    for s in approx.summands:
        src, tgt = (s, approx.target) if approx.side == "right" else (approx.target, s)
        n = cat.hcat.hom_dim((src, 0), (tgt, 0))
        pieces.append(cat.embed(src, tgt, 0, approx.vector[off:off + n]))
        off += n
    vec = np.concatenate(pieces) if pieces else np.zeros(0, dtype=np.int64)
    return Approximation(approx.summands, approx.target, vec, approx.side)


def is_right_approx(ctx: ApproxContext, summands, x, vec) -> bool:
    """Hom(M_a, D) -> Hom(M_a, x), u -> u f, is onto for every summand M_a."""
    cat = ctx.category
    D = tuple(summands)
    for m in ctx.M:
        target = cat.hom_dim(m, x)
        if not target:
            continue
        mat = right_action(cat, vec, (m,), D, (x,))
        if Subspace.span(mat, target, ctx.p).dim != target:
            return False
    return True


def is_left_approx(ctx: ApproxContext, summands, x, vec) -> bool:
    """Hom(D, M_a) -> Hom(x, M_a), u -> f u, is onto for every summand M_a."""
    cat = ctx.category
    D = tuple(summands)
    for m in ctx.M:
        target = cat.hom_dim(x, m)
        if not target:
            continue
        mat = left_action(cat, vec, (x,), D, (m,))
        if Subspace.span(mat, target, ctx.p).dim != target:
            return False
    return True


# ---------------------------------------------------------------------------
# ideals


def ghost_ideal(ctx: ApproxContext, x, y) -> Subspace:
    """{g : h g = 0 for every h in Hom(M_a, x)}."""
    cat = ctx.category
    n = cat.hom_dim(x, y)
    cols = []
    for m in ctx.M:
        t = cat.compose_tensor(m, x, y)
        if t.shape[0] and t.shape[2]:
            cols.append(t.transpose(1, 0, 2).reshape(n, -1))
    if not cols:
        return Subspace.full(n)
    return left_kernel(np.hstack(cols), ctx.p, rows=n)


def coghost_ideal(ctx: ApproxContext, x, y) -> Subspace:
    """{g : g h = 0 for every h in Hom(y, M_a)}."""
    cat = ctx.category
    n = cat.hom_dim(x, y)
    cols = []
    for m in ctx.M:
        t = cat.compose_tensor(x, y, m)
        if t.shape[1] and t.shape[2]:
            cols.append(t.reshape(n, -1))
    if not cols:
        return Subspace.full(n)
    return left_kernel(np.hstack(cols), ctx.p, rows=n)


def ghost_via_approximation(ctx: ApproxContext, x, y, approx: Approximation | None = None) -> Subspace:
    """{g : f_x g = 0} for a right approximation f_x: D_x -> x."""
    approx = approx or right_approximation(ctx, x, minimal=True)
    n = ctx.category.hom_dim(x, y)
    if not approx.summands:
        return Subspace.full(n)
    mat = left_action(ctx.category, approx.vector, approx.summands, (x,), (y,))
    return left_kernel(mat, ctx.p, rows=n)


def coghost_via_approximation(ctx: ApproxContext, x, y, approx: Approximation | None = None) -> Subspace:
    """{g : g f^y = 0} for a left approximation f^y: y -> D^y."""
    approx = approx or left_approximation(ctx, y, minimal=True)
    n = ctx.category.hom_dim(x, y)
    if not approx.summands:
        return Subspace.full(n)
    mat = right_action(ctx.category, approx.vector, (x,), (y,), approx.summands)
    return left_kernel(mat, ctx.p, rows=n)


def factor_subspace(ctx: ApproxContext, x, y) -> Subspace:
    """Span of the composites x -> M_a -> y."""
    cat = ctx.category
    n = cat.hom_dim(x, y)
    rows = []
    for m in ctx.M:
        t = cat.compose_tensor(x, m, y)
        if t.shape[0] and t.shape[1]:
            rows.append(t.reshape(-1, n))
    if not rows:
        return Subspace.zero(n)
    return Subspace.span(np.mod(np.vstack(rows), ctx.p), n, ctx.p)


def fgh(ctx: ApproxContext, x, y) -> Subspace:
    return intersect(ghost_ideal(ctx, x, y), factor_subspace(ctx, x, y), ctx.p)


def fcogh(ctx: ApproxContext, x, y) -> Subspace:
    return intersect(coghost_ideal(ctx, x, y), factor_subspace(ctx, x, y), ctx.p)


IDEALS = {"gh": ghost_ideal, "cogh": coghost_ideal, "factor": factor_subspace, "fgh": fgh, "fcogh": fcogh}


def ideal_family(ctx: ApproxContext, objects: Sequence, kind: str) -> dict:
    """The ideal ``kind`` on every ordered pair of objects."""
    fn = IDEALS[kind]
    return {(x, y): fn(ctx, x, y) for x, y in product(objects, repeat=2)}


def family_closed(ctx: ApproxContext, family: Mapping, objects: Sequence):
    """None if the family absorbs composition on both sides, else a witness."""
    return ideal_closure_witness(ctx.category, family, list(objects))


def family_dims(family: Mapping) -> dict:
    return {f"{x}>{y}": s.dim for (x, y), s in sorted(family.items(), key=lambda kv: (str(kv[0][0]), str(kv[0][1])))}


# ---------------------------------------------------------------------------
# cohomology description over a self-injective algebra


def _cocycles_and_boundaries(base: ProjCategory, y: CatComplex, i: int, shift: int = 0):
    """Z^i and B^i of y[shift] inside the k-space of its degree-i term."""
    sign = -1 if shift % 2 else 1
    term = lambda k: y.term(k + shift)
    n = base.module_dim(term(i))
    d_out = sign * y.diff(base, i + shift)
    d_in = sign * y.diff(base, i - 1 + shift)
    out_mat = base.realize(term(i), term(i + 1), d_out) if term(i + 1) else np.zeros((n, 0), dtype=np.int64)
    z = left_kernel(np.mod(out_mat, base.p), base.p, rows=n)
    if term(i - 1):
        b = Subspace.span(np.mod(base.realize(term(i - 1), term(i), d_in), base.p), n, base.p)
    else:
        b = Subspace.zero(n)
    return z, b


def _module_generators(base: ProjCategory, P, z: Subspace) -> np.ndarray:
    """Representatives of Z / rad(A) Z, i.e. generators of Z as an A-module."""
    gens = [r for _, _, r in radical_generators(base.alg)]
    if z.dim == 0:
        return z.basis
    moved = [matmul(z.basis, base.act(P, g), base.p) for g in gens]
    rz = Subspace.span(np.vstack(moved), z.ambient_dim, base.p) if moved else Subspace.zero(z.ambient_dim)
    return QuotientSpace(z, intersect(rz, z, base.p), base.p).reps


def lemma51_oracle(hcat: HomotopyCategory, x: str, y: str, n: int, shift: int = 0,
                   module: bool = False) -> Subspace:
    """Homotopy classes x -> y[shift] inducing zero on H^0, ..., H^n.

    The k-linear route tests every cocycle; the module route only tests
    A-module generators of each cocycle space.  Returned in token coordinates.
    """
    base = hcat.base
    if not isinstance(base, ProjCategory):
        raise TypeError("cohomology needs a category of projective modules")
    sp = hcat.space(x, y, shift)
    X, Y = hcat.complexes[x], hcat.complexes[y]
    p = base.p
    cons = []
    for i in range(0, n + 1):
        if i not in sp.layout or not sp.layout[i][1]:
            continue
        zx, _ = _cocycles_and_boundaries(base, X, i)
        _, by = _cocycles_and_boundaries(base, Y, i, shift)
        tests = _module_generators(base, X.term(i), zx) if module else zx.basis
        if len(tests) == 0:
            continue
        ann = annihilator(by, p)                       # rows r with B . r^T = 0
        if ann.shape[0] == 0:
            continue
        off, width = sp.layout[i]
        # alpha -> z alpha^i ann^T is linear in alpha; one column block per (z, ann row)
        src, tgt = X.term(i), Y.term(i + shift)
        mat = np.zeros((sp.ambient_dim, len(tests) * ann.shape[0]), dtype=np.int64)
        for t in range(width):
            e = np.zeros(width, dtype=np.int64)
            e[t] = 1
            img = matmul(matmul(tests, base.realize(src, tgt, e), p), ann.T, p)
            mat[off + t] = img.reshape(-1)
        cons.append(mat)
    allowed = sp.all_chain_maps
    if cons:
        allowed = intersect(allowed, left_kernel(np.hstack(cons), p, rows=sp.ambient_dim), p)
    return sp.quotient.image_of(allowed)


# ---------------------------------------------------------------------------
# hypotheses of the main theorem


@dataclass
class VanishingReport:
    holds: bool
    hom_m_to_x: dict = field(default_factory=dict)     # i -> dim Hom(M, F^i x)
    hom_y_to_m: dict = field(default_factory=dict)     # i -> dim Hom(y, F^i M)
    witnesses: list = field(default_factory=list)


def check_vanishing_hypotheses(ctx: ApproxContext, x, y) -> VanishingReport:
    """Hom(M, F^i x) = 0 = Hom(y, F^i M) for all nonzero i in Phi."""
    cat = ctx.category
    rep = VanishingReport(True)
    if not isinstance(cat, OrbitCategory):
        return rep
    for i in cat.phi:
        if i == 0:
            continue
        a = sum(cat.component_dim(m, x, i) for m in ctx.M)
        b = sum(cat.component_dim(y, m, i) for m in ctx.M)
        rep.hom_m_to_x[i] = a
        rep.hom_y_to_m[i] = b
        if a:
            rep.witnesses.append({"hom": "M->F^i X", "i": i, "dim": a})
        if b:
            rep.witnesses.append({"hom": "Y->F^i M", "i": i, "dim": b})
    rep.holds = not rep.witnesses
    return rep


def plain_context(ctx: ApproxContext) -> ApproxContext:
    """The same M in the Phi = {0} category underlying an orbit context."""
    cat = ctx.category
    if isinstance(cat, OrbitCategory):
        return ApproxContext(OrbitCategory(cat.hcat, (0,), cat.d), ctx.m_summands)
    return ctx


def lemma_fg_sides(ctx: ApproxContext, obj, side: str) -> tuple[dict, dict]:
    """Both sides of the factorizable-ghost comparison on End(obj (+) M).

    side "gh": Fgh over add(M) in the orbit category against Fgh_M in the plain
    category, placed in the degree-0 component.  side "cogh": the coghost dual.
    """
    objs = list(dict.fromkeys((obj,) + ctx.M))
    plain = plain_context(ctx)
    fn = fgh if side == "gh" else fcogh
    lhs, rhs = {}, {}
    cat = ctx.category
    for a, b in product(objs, repeat=2):
        lhs[(a, b)] = fn(ctx, a, b)
        inner = fn(plain, a, b)
        if isinstance(cat, OrbitCategory):
            inner = cat.embed_subspace(a, b, 0, inner)
        rhs[(a, b)] = inner
    return lhs, rhs


def lemma_fg_check(ctx: ApproxContext, x, y, f: Approximation, g: Approximation) -> dict:
    """Gate for the main theorem plus both equalities of the factorizable-ghost lemma.

    x is the left end of the triangle (f: x -> D), y the right end (g: D -> y);
    f and g may be given by plain morphisms.
    Raises HypothesesFailed with witnesses when a hypothesis does not hold.
    """
    f, g = to_orbit(ctx.category, f), to_orbit(ctx.category, g)
    witnesses = {}
    if not is_left_approx(ctx, f.summands, x, f.vector):
        witnesses["left_approximation"] = False
    if not is_right_approx(ctx, g.summands, y, g.vector):
        witnesses["right_approximation"] = False
    van = check_vanishing_hypotheses(ctx, x, y)
    if not van.holds:
        witnesses["vanishing"] = van.witnesses
    if witnesses:
        raise HypothesesFailed("hypotheses of the main theorem fail", witnesses)
    gh_l, gh_r = lemma_fg_sides(ctx, y, "gh")
    co_l, co_r = lemma_fg_sides(ctx, x, "cogh")
    return {
        "fgh_equal": all(gh_l[k] == gh_r[k] for k in gh_l),
        "fcogh_equal": all(co_l[k] == co_r[k] for k in co_l),
        "vanishing": {"M->F^i X": van.hom_m_to_x, "Y->F^i M": van.hom_y_to_m},
    }
