"""Computed additive categories, complexes over them and homotopy classes.

A morphism between formal direct sums P = (p_1, ..., p_r) and
Q = (q_1, ..., q_s) is a flat coordinate vector: the blocks Hom(p_a, q_b) in
row-major order.  Composition is written left to right, f then g.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .exactlin import QuotientSpace, Subspace, _p, asmat, left_kernel, matmul
from .quivalg import Algebra


class IdealNotClosed(ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class NotAChainMap(ValueError):
    pass


class ComputedCategory:
    """Hom spaces with chosen token bases and composition tensors.

    Subclasses provide ``_hom_dim``, ``_compose`` and ``_identity``; results
    are cached, so every category is immutable once queried.
    """

    def __init__(self, p: int | None = None):
        self.p = _p(p)
        self._dims: dict = {}
        self._comp: dict = {}
        self._ids: dict = {}

    def objects(self) -> list:
        raise NotImplementedError

    def hom_dim(self, x, y) -> int:
        key = (x, y)
        if key not in self._dims:
            self._dims[key] = int(self._hom_dim(x, y))
        return self._dims[key]

    def compose_tensor(self, x, y, z) -> np.ndarray:
        key = (x, y, z)
        if key not in self._comp:
            shape = (self.hom_dim(x, y), self.hom_dim(y, z), self.hom_dim(x, z))
            if 0 in shape:
                t = np.zeros(shape, dtype=np.int64)
            else:
                t = np.mod(np.asarray(self._compose(x, y, z), dtype=np.int64), self.p).reshape(shape)
            t.setflags(write=False)
            self._comp[key] = t
        return self._comp[key]

    def identity(self, x) -> np.ndarray:
        if x not in self._ids:
            self._ids[x] = np.mod(np.asarray(self._identity(x), dtype=np.int64), self.p)
        return self._ids[x]

    def compose(self, x, y, z, f, g) -> np.ndarray:
        t = self.compose_tensor(x, y, z)
        f = np.asarray(f, dtype=np.int64)
        g = np.asarray(g, dtype=np.int64)
        if 0 in t.shape:
            return np.zeros(t.shape[2], dtype=np.int64)
        left = matmul(f.reshape(1, -1), t.reshape(t.shape[0], -1), self.p).reshape(t.shape[1], t.shape[2])
        return matmul(g.reshape(1, -1), left, self.p)[0]

    def _hom_dim(self, x, y):
        raise NotImplementedError

    def _compose(self, x, y, z):
        raise NotImplementedError

    def _identity(self, x):
        raise NotImplementedError


def check_category(cat: ComputedCategory, objects: Sequence | None = None):
    """Exhaustive associativity and unit check; returns a witness or None."""
    objs = list(cat.objects() if objects is None else objects)
    p = cat.p
    for x, y in product(objs, repeat=2):
        t = cat.compose_tensor(x, x, y)
        if t.shape[0] and t.shape[1]:
            got = matmul(cat.identity(x).reshape(1, -1), t.reshape(t.shape[0], -1), p).reshape(t.shape[1], t.shape[2])
            if not np.array_equal(got, np.eye(t.shape[1], dtype=np.int64)):
                return ("left unit", x, y)
        t = cat.compose_tensor(x, y, y)
        if t.shape[0] and t.shape[1]:
            got = np.mod(np.einsum("ijk,j->ik", t, cat.identity(y)), p)
            if not np.array_equal(got, np.eye(t.shape[0], dtype=np.int64)):
                return ("right unit", x, y)
    for w, x, y, z in product(objs, repeat=4):
        a = cat.compose_tensor(w, x, y)
        b = cat.compose_tensor(x, y, z)
        if 0 in a.shape[:2] or b.shape[1] == 0:
            continue
        c = cat.compose_tensor(w, y, z)
        d = cat.compose_tensor(w, x, z)
        left = np.mod(np.einsum("ijm,mkn->ijkn", a, c), p)
        right = np.mod(np.einsum("jkm,imn->ijkn", b, d), p)
        if not np.array_equal(left, right):
            return ("associativity", w, x, y, z)
    return None


class ProjCategory(ComputedCategory):
    """proj A for a corner-adapted algebra: objects are idempotent indices."""

    def __init__(self, alg: Algebra):
        super().__init__(alg.p)
        self.alg = alg
        alg.corner_of()
        self._idx = {}

    def objects(self) -> list:
        return list(range(len(self.alg.units)))

    def indices(self, i, j) -> list[int]:
        if (i, j) not in self._idx:
            self._idx[(i, j)] = self.alg.corner_indices(i, j)
        return self._idx[(i, j)]

    def _hom_dim(self, i, j):
        return len(self.indices(i, j))

    def _compose(self, i, j, k):
        return self.alg.mult[np.ix_(self.indices(i, j), self.indices(j, k), self.indices(i, k))]

    def _identity(self, i):
        return self.alg.units[i][self.indices(i, i)]

    def element(self, i, j, vec) -> np.ndarray:
        """Restrict an algebra element to its (i, j) corner coordinates."""
        return np.asarray(vec, dtype=np.int64)[self.indices(i, j)]

    def module_basis(self, v) -> list[int]:
        """Basis indices of the projective A e_v (paths ending at v)."""
        corners = self.alg.corner_of()
        return [b for b in range(self.alg.dim) if corners[b][1] == v]

    def module_dim(self, P) -> int:
        return sum(len(self.module_basis(v)) for v in _summands(P))

    def realize(self, P, Q, vec) -> np.ndarray:
        """k-linear matrix (row convention) of a morphism between sums of projectives."""
        P, Q = _summands(P), _summands(Q)
        b = blocks(self, P, Q)
        vec = np.asarray(vec, dtype=np.int64)
        rows = []
        for a, u in enumerate(P):
            src = self.module_basis(u)
            parts = []
            for c, v in enumerate(Q):
                r = np.zeros(self.alg.dim, dtype=np.int64)
                r[self.indices(u, v)] = b.block(vec, a, c)
                prod_ = np.mod(np.einsum("wzk,z->wk", self.alg.mult[src], r), self.p)
                parts.append(prod_[:, self.module_basis(v)])
            rows.append(np.hstack(parts) if parts else np.zeros((len(src), 0), dtype=np.int64))
        if not rows:
            return np.zeros((0, self.module_dim(Q)), dtype=np.int64)
        return np.vstack(rows)

    def act(self, P, a) -> np.ndarray:
        """Matrix of left multiplication by an algebra element on the module (+) A e_v."""
        P = _summands(P)
        n = self.module_dim(P)
        out = np.zeros((n, n), dtype=np.int64)
        off = 0
        for v in P:
            idx = self.module_basis(v)
            blk = np.mod(np.einsum("z,zwk->wk", np.asarray(a, dtype=np.int64), self.alg.mult[:, idx]), self.p)
            out[off:off + len(idx), off:off + len(idx)] = blk[:, idx]
            off += len(idx)
        return out


class TableCategory(ComputedCategory):
    """A category given by explicit tables (used for small synthetic cases)."""

    def __init__(self, objects, dims: Mapping, tensors: Mapping, identities: Mapping, p: int | None = None):
        super().__init__(p)
        self._objects = list(objects)
        self._tdims = dict(dims)
        self._tensors = dict(tensors)
        self._tids = dict(identities)

    def objects(self):
        return list(self._objects)

    def _hom_dim(self, x, y):
        return self._tdims.get((x, y), 0)

    def _compose(self, x, y, z):
        shape = (self.hom_dim(x, y), self.hom_dim(y, z), self.hom_dim(x, z))
        return self._tensors.get((x, y, z), np.zeros(shape, dtype=np.int64))

    def _identity(self, x):
        return self._tids[x]


# ---------------------------------------------------------------------------
# formal direct sums


@dataclass(frozen=True)
class FormalObject:
    """A finite direct sum of objects; labels may carry shift tags."""

    summands: tuple

    def __iter__(self):
        return iter(self.summands)

    def __len__(self):
        return len(self.summands)


def _summands(obj) -> tuple:
    return tuple(obj.summands) if isinstance(obj, FormalObject) else tuple(obj)


class Blocks:
    """Offsets of the blocks Hom(p_a, q_b) inside a flat morphism vector."""

    def __init__(self, cat: ComputedCategory, source, target):
        self.source = _summands(source)
        self.target = _summands(target)
        self.offsets = {}
        off = 0
        for a, x in enumerate(self.source):
            for b, y in enumerate(self.target):
                n = cat.hom_dim(x, y)
                self.offsets[(a, b)] = (off, n)
                off += n
        self.dim = off

    def block(self, vec, a, b) -> np.ndarray:
        off, n = self.offsets[(a, b)]
        return np.asarray(vec)[..., off:off + n]


_BLOCKS: dict = {}
_TENSORS: dict = {}


def blocks(cat: ComputedCategory, source, target) -> Blocks:
    key = (id(cat), _summands(source), _summands(target))
    if key not in _BLOCKS:
        _BLOCKS[key] = (cat, Blocks(cat, source, target))
    return _BLOCKS[key][1]


def formal_dim(cat: ComputedCategory, source, target) -> int:
    return blocks(cat, source, target).dim


def formal_compose_tensor(cat: ComputedCategory, P, Q, R) -> np.ndarray:
    """Composition Hom(P,Q) x Hom(Q,R) -> Hom(P,R) for direct sums."""
    P, Q, R = _summands(P), _summands(Q), _summands(R)
    key = (id(cat), P, Q, R)
    if key in _TENSORS:
        return _TENSORS[key][1]
    bpq, bqr, bpr = blocks(cat, P, Q), blocks(cat, Q, R), blocks(cat, P, R)
    t = np.zeros((bpq.dim, bqr.dim, bpr.dim), dtype=np.int64)
    for a, x in enumerate(P):
        for b, y in enumerate(Q):
            o1, n1 = bpq.offsets[(a, b)]
            if not n1:
                continue
            for c, z in enumerate(R):
                o2, n2 = bqr.offsets[(b, c)]
                o3, n3 = bpr.offsets[(a, c)]
                if n2 and n3:
                    t[o1:o1 + n1, o2:o2 + n2, o3:o3 + n3] += cat.compose_tensor(x, y, z)
    t = np.mod(t, cat.p)
    t.setflags(write=False)
    _TENSORS[key] = (cat, t)
    return t


def formal_compose(cat: ComputedCategory, P, Q, R, f, g) -> np.ndarray:
    """f in Hom(P,Q), g in Hom(Q,R); batches of rows are allowed for f."""
    t = formal_compose_tensor(cat, P, Q, R)
    f = np.asarray(f, dtype=np.int64).reshape(-1, t.shape[0])
    g = np.asarray(g, dtype=np.int64).reshape(-1)
    if 0 in t.shape:
        return np.zeros((f.shape[0], t.shape[2]), dtype=np.int64)
    right = np.mod(np.einsum("ijk,j->ik", t, g), cat.p)
    return matmul(f, right, cat.p)


def left_action(cat: ComputedCategory, d, P, Q, R) -> np.ndarray:
    """Matrix (row convention) of g -> d g from Hom(Q,R) to Hom(P,R), for d in Hom(P,Q)."""
    t = formal_compose_tensor(cat, P, Q, R)
    if 0 in t.shape:
        return np.zeros((t.shape[1], t.shape[2]), dtype=np.int64)
    d = np.asarray(d, dtype=np.int64).reshape(1, -1)
    return matmul(d, t.reshape(t.shape[0], -1), cat.p).reshape(t.shape[1], t.shape[2])


def right_action(cat: ComputedCategory, d, P, Q, R) -> np.ndarray:
    """Matrix of f -> f d from Hom(P,Q) to Hom(P,R), for d in Hom(Q,R)."""
    t = formal_compose_tensor(cat, P, Q, R)
    if 0 in t.shape:
        return np.zeros((t.shape[0], t.shape[2]), dtype=np.int64)
    return np.mod(np.einsum("ijk,j->ik", t, np.asarray(d, dtype=np.int64)), cat.p)


def formal_identity(cat: ComputedCategory, P) -> np.ndarray:
    P = _summands(P)
    b = blocks(cat, P, P)
    out = np.zeros(b.dim, dtype=np.int64)
    for a, x in enumerate(P):
        off, n = b.offsets[(a, a)]
        out[off:off + n] = cat.identity(x)
    return out


def assemble(cat: ComputedCategory, row_parts: Sequence, col_parts: Sequence, pieces: Mapping) -> np.ndarray:
    """Flat morphism between concatenated sums from sub-blocks {(r, c): vector}."""
    rows = [_summands(r) for r in row_parts]
    cols = [_summands(c) for c in col_parts]
    P = sum(rows, ())
    Q = sum(cols, ())
    big = blocks(cat, P, Q)
    out = np.zeros(big.dim, dtype=np.int64)
    roff = np.cumsum([0] + [len(r) for r in rows])
    coff = np.cumsum([0] + [len(c) for c in cols])
    for (r, c), vec in pieces.items():
        small = blocks(cat, rows[r], cols[c])
        vec = np.asarray(vec, dtype=np.int64)
        for a, b in product(range(len(rows[r])), range(len(cols[c]))):
            o, n = small.offsets[(a, b)]
            O, N = big.offsets[(roff[r] + a, coff[c] + b)]
            out[O:O + N] = vec[o:o + n]
    return np.mod(out, cat.p)


def extract(cat: ComputedCategory, row_parts: Sequence, col_parts: Sequence, vec, r: int, c: int) -> np.ndarray:
    """Sub-block (r, c) of a morphism between concatenated sums."""
    rows = [_summands(x) for x in row_parts]
    cols = [_summands(x) for x in col_parts]
    big = blocks(cat, sum(rows, ()), sum(cols, ()))
    small = blocks(cat, rows[r], cols[c])
    out = np.zeros(small.dim, dtype=np.int64)
    roff = sum(len(x) for x in rows[:r])
    coff = sum(len(x) for x in cols[:c])
    vec = np.asarray(vec)
    for a, b in product(range(len(rows[r])), range(len(cols[c]))):
        o, n = small.offsets[(a, b)]
        O, N = big.offsets[(roff + a, coff + b)]
        out[o:o + n] = vec[O:O + N]
    return out


# ---------------------------------------------------------------------------
# complexes


class CatComplex:
    """Bounded complex: degree -> tuple of summands, d^i: X^i -> X^{i+1} as flat vectors."""

    def __init__(self, terms: Mapping[int, Iterable], diffs: Mapping[int, Iterable] | None = None):
        self.terms = {int(i): tuple(s) for i, s in terms.items() if len(tuple(s))}
        self.diffs = {int(i): np.asarray(v, dtype=np.int64) for i, v in (diffs or {}).items()}

    def term(self, i: int) -> tuple:
        return self.terms.get(i, ())

    @property
    def degrees(self) -> list[int]:
        return sorted(self.terms)

    @property
    def span(self) -> tuple[int, int]:
        d = self.degrees
        return (d[0], d[-1]) if d else (0, -1)

    def diff(self, cat: ComputedCategory, i: int) -> np.ndarray:
        n = formal_dim(cat, self.term(i), self.term(i + 1))
        v = self.diffs.get(i)
        if v is None or v.size == 0:
            return np.zeros(n, dtype=np.int64)
        if v.size != n:
            raise ValueError(f"differential in degree {i} has {v.size} coordinates, expected {n}")
        return np.mod(v, cat.p)

    def check(self, cat: ComputedCategory) -> bool:
        lo, hi = self.span
        for i in range(lo, hi):
            dd = formal_compose(cat, self.term(i), self.term(i + 1), self.term(i + 2), self.diff(cat, i), self.diff(cat, i + 1))
            if np.any(dd):
                return False
        return True

    def __repr__(self):
        return f"CatComplex({self.terms})"


def shift_complex(x: CatComplex, d: int) -> CatComplex:
    """x[d]: degree i holds x^{i+d}, differential (-1)^d d_x^{i+d}."""
    sign = -1 if d % 2 else 1
    return CatComplex({i - d: s for i, s in x.terms.items()},
                      {i - d: sign * v for i, v in x.diffs.items()})


def stalk(objects, degree: int = 0) -> CatComplex:
    return CatComplex({degree: tuple(objects)})


@dataclass
class ChainMapSpace:
    """Chain maps x -> y[shift] and the null-homotopic ones, in a degree-wise layout."""

    source: CatComplex
    target: CatComplex
    shift: int
    layout: dict            # degree -> (offset, size)
    ambient_dim: int
    all_chain_maps: Subspace
    null_homotopic: Subspace
    quotient: QuotientSpace

    @property
    def dim(self) -> int:
        return self.quotient.dim

    def block(self, vec, i: int) -> np.ndarray:
        off, n = self.layout.get(i, (0, 0))
        return np.asarray(vec)[..., off:off + n]

    def from_blocks(self, pieces: Mapping[int, Iterable]) -> np.ndarray:
        out = np.zeros(self.ambient_dim, dtype=np.int64)
        for i, v in pieces.items():
            off, n = self.layout[i]
            out[off:off + n] = v
        return out

    def coords(self, vec) -> np.ndarray:
        """Token coordinates of a chain map; raises NotAChainMap otherwise."""
        v = asmat(vec, self.quotient.p, cols=self.ambient_dim)
        if not self.all_chain_maps.contains(v, self.quotient.p):
            raise NotAChainMap("vector is not a chain map")
        return self.quotient.coords(v)


def hom_complexes(cat: ComputedCategory, x: CatComplex, y: CatComplex, shift: int = 0) -> ChainMapSpace:
    """Hom from x to y[shift] in the homotopy category, as chain maps modulo homotopy."""
    p = cat.p
    sign = -1 if shift % 2 else 1
    Y = lambda i: y.term(i + shift)                       # y[shift]^i
    dY = lambda i: sign * y.diff(cat, i + shift)          # d_{y[shift]}^i
    lo, hi = x.span
    layout, off = {}, 0
    for i in range(lo, hi + 1):
        n = formal_dim(cat, x.term(i), Y(i))
        layout[i] = (off, n)
        off += n
    amb = off

    # chain condition in degree i: d_x^i f^{i+1} - f^i d_Y^i in Hom(x^i, Y^{i+1})
    cols, coff = {}, 0
    for i in range(lo - 1, hi + 1):
        n = formal_dim(cat, x.term(i), Y(i + 1))
        cols[i] = (coff, n)
        coff += n
    cond = np.zeros((amb, coff), dtype=np.int64)
    for i in range(lo - 1, hi + 1):
        c0, cn = cols[i]
        if not cn:
            continue
        if i + 1 in layout and layout[i + 1][1]:
            r0, rn = layout[i + 1]
            cond[r0:r0 + rn, c0:c0 + cn] += left_action(cat, x.diff(cat, i), x.term(i), x.term(i + 1), Y(i + 1))
        if i in layout and layout[i][1]:
            r0, rn = layout[i]
            cond[r0:r0 + rn, c0:c0 + cn] -= right_action(cat, dY(i), x.term(i), Y(i), Y(i + 1))
    chain = left_kernel(np.mod(cond, p), p, rows=amb)

    # homotopies r^i: x^i -> Y^{i-1}; f^i = d_x^i r^{i+1} + r^i d_Y^{i-1}
    hl, hoff = {}, 0
    for i in range(lo, hi + 1):
        n = formal_dim(cat, x.term(i), Y(i - 1))
        hl[i] = (hoff, n)
        hoff += n
    hmat = np.zeros((hoff, amb), dtype=np.int64)
    for i in range(lo, hi + 1):
        f0, fn = layout[i]
        if not fn:
            continue
        if i + 1 in hl and hl[i + 1][1]:
            r0, rn = hl[i + 1]
            hmat[r0:r0 + rn, f0:f0 + fn] += left_action(cat, x.diff(cat, i), x.term(i), x.term(i + 1), Y(i))
        r0, rn = hl[i]
        if rn:
            hmat[r0:r0 + rn, f0:f0 + fn] += right_action(cat, dY(i - 1), x.term(i), Y(i - 1), Y(i))
    null = Subspace.span(np.mod(hmat, p), amb, p)
    return ChainMapSpace(x, y, shift, layout, amb, chain, null, QuotientSpace(chain, null, p))


def identity_chain_map(cat: ComputedCategory, x: CatComplex, space: ChainMapSpace) -> np.ndarray:
    return space.from_blocks({i: formal_identity(cat, x.term(i)) for i in x.degrees})


def compose_chain_maps(cat: ComputedCategory, x: CatComplex, y: CatComplex, z: CatComplex,
                       a: int, b: int, F, G, target_layout: Mapping, target_dim: int,
                       f_layout: Mapping, g_layout: Mapping) -> np.ndarray:
    """Degree-wise composites f g[a] for all pairs of rows of F and G."""
    p = cat.p
    F = np.asarray(F, dtype=np.int64).reshape(-1, sum(n for _, n in f_layout.values()) if f_layout else 0)
    G = np.asarray(G, dtype=np.int64)
    out = np.zeros((F.shape[0], G.shape[0], target_dim), dtype=np.int64)
    for i, (o3, n3) in target_layout.items():
        if not n3 or i not in f_layout or (i + a) not in g_layout:
            continue
        o1, n1 = f_layout[i]
        o2, n2 = g_layout[i + a]
        if not n1 or not n2:
            continue
        t = formal_compose_tensor(cat, x.term(i), y.term(i + a), z.term(i + a + b))
        fi = F[:, o1:o1 + n1]
        gi = G[:, o2:o2 + n2]
        left = matmul(fi, t.reshape(n1, -1), p).reshape(F.shape[0], n2, n3)
        out[:, :, o3:o3 + n3] = np.mod(np.einsum("tj,sjk->stk", gi, left), p)
    return out


class HomotopyCategory(ComputedCategory):
    """K^b over a base category for named complexes; objects are (name, shift).

    Hom((x, s), (y, t)) is Hom_K(x, y[t - s]); the token basis depends only on
    t - s, which is what lets F = shift act on orbit morphisms by relabelling.
    """

    def __init__(self, base: ComputedCategory, complexes: Mapping[str, CatComplex] | None = None,
                 shifts: Iterable[int] | None = None):
        super().__init__(base.p)
        self.base = base
        self.complexes: dict[str, CatComplex] = {}
        self._spaces: dict = {}
        self.shifts = None if shifts is None else sorted(set(shifts))
        for name, cx in (complexes or {}).items():
            self.add_complex(name, cx)

    def add_complex(self, name: str, cx: CatComplex) -> None:
        if name in self.complexes:
            raise ValueError(f"complex {name!r} already present")
        if not cx.check(self.base):
            raise ValueError(f"{name}: differential does not square to zero")
        self.complexes[name] = cx

    def objects(self) -> list:
        shifts = self.shifts if self.shifts is not None else [0]
        return [(n, s) for n in self.complexes for s in shifts]

    @staticmethod
    def _obj(x):
        return x if isinstance(x, tuple) else (x, 0)

    def space(self, x: str, y: str, shift: int) -> ChainMapSpace:
        key = (x, y, shift)
        if key not in self._spaces:
            self._spaces[key] = hom_complexes(self.base, self.complexes[x], self.complexes[y], shift)
        return self._spaces[key]

    def hom_dim(self, x, y):
        return super().hom_dim(self._obj(x), self._obj(y))

    def compose_tensor(self, x, y, z):
        return super().compose_tensor(self._obj(x), self._obj(y), self._obj(z))

    def identity(self, x):
        return super().identity(self._obj(x))

    def _hom_dim(self, x, y):
        return self.space(x[0], y[0], y[1] - x[1]).dim

    def _compose(self, x, y, z):
        a, b = y[1] - x[1], z[1] - y[1]
        sf = self.space(x[0], y[0], a)
        sg = self.space(y[0], z[0], b)
        sh = self.space(x[0], z[0], a + b)
        X, Y, Z = (self.complexes[n] for n in (x[0], y[0], z[0]))
        amb = compose_chain_maps(self.base, X, Y, Z, a, b, sf.quotient.reps, sg.quotient.reps,
                                 sh.layout, sh.ambient_dim, sf.layout, sg.layout)
        flat = amb.reshape(-1, sh.ambient_dim)
        return sh.quotient.coords(flat).reshape(sf.dim, sg.dim, sh.dim)

    def _identity(self, x):
        sp = self.space(x[0], x[0], 0)
        return sp.quotient.coords(identity_chain_map(self.base, self.complexes[x[0]], sp))[0]

    def element(self, x, y, blocks_by_degree: Mapping[int, Iterable], shift: int = 0) -> np.ndarray:
        """Token coordinates of the chain map x -> y[shift] with the given degree-wise blocks."""
        sp = self.space(x, y, shift)
        return sp.coords(sp.from_blocks(blocks_by_degree))[0]

    def representative(self, x, y, coords, shift: int = 0) -> np.ndarray:
        sp = self.space(x, y, shift)
        return sp.quotient.lift(np.asarray(coords).reshape(1, -1))[0]


def category_of_complexes(cat: ComputedCategory, objects: Mapping[str, CatComplex],
                          shifts: Iterable[int] = (0,), verify: bool = True) -> HomotopyCategory:
    """Homotopy category on the given complexes and shift tags."""
    h = HomotopyCategory(cat, objects, shifts)
    if verify:
        bad = check_category(h)
        if bad is not None:
            raise ArithmeticError(f"homotopy category fails {bad}")
    return h


def mapping_cone(cat: ComputedCategory, x: CatComplex, y: CatComplex, f_blocks: Mapping[int, Iterable]) -> CatComplex:
    """Cone of a chain map f: x -> y.

    Degree i is y^i (+) x^{i+1} with differential [[d_y, 0], [f^{i+1}, -d_x]].
    """
    sp = hom_complexes(cat, x, y, 0)
    vec = sp.from_blocks({i: v for i, v in f_blocks.items() if i in sp.layout})
    if not sp.all_chain_maps.contains(vec, cat.p):
        raise NotAChainMap("mapping_cone needs a chain map")
    lo = min(y.span[0], x.span[0] - 1)
    hi = max(y.span[1], x.span[1] - 1)
    terms, diffs = {}, {}
    for i in range(lo, hi + 1):
        terms[i] = y.term(i) + x.term(i + 1)
    for i in range(lo, hi):
        src = [y.term(i), x.term(i + 1)]
        tgt = [y.term(i + 1), x.term(i + 2)]
        pieces = {(0, 0): y.diff(cat, i), (1, 1): -x.diff(cat, i + 1)}
        if i + 1 in sp.layout:
            pieces[(1, 0)] = sp.block(vec, i + 1)
        diffs[i] = assemble(cat, src, tgt, pieces)
    return CatComplex(terms, diffs)


class QuotientCategory(ComputedCategory):
    """cat / ideal with canonical complement representatives."""

    def __init__(self, cat: ComputedCategory, ideal: Mapping, objects: Sequence, verify: bool = True):
        super().__init__(cat.p)
        self.cat = cat
        self._objects = list(objects)
        self.ideal = {}
        self.spaces = {}
        for x, y in product(self._objects, repeat=2):
            n = cat.hom_dim(x, y)
            sub = ideal.get((x, y)) or Subspace.zero(n)
            self.ideal[(x, y)] = sub
            self.spaces[(x, y)] = QuotientSpace(Subspace.full(n), sub, self.p)
        if verify:
            bad = ideal_closure_witness(cat, self.ideal, self._objects)
            if bad is not None:
                raise IdealNotClosed(f"ideal is not closed under composition at {bad[:4]}", bad)

    def objects(self):
        return list(self._objects)

    def _hom_dim(self, x, y):
        return self.spaces[(x, y)].dim

    def _compose(self, x, y, z):
        f = self.spaces[(x, y)].reps
        g = self.spaces[(y, z)].reps
        t = self.cat.compose_tensor(x, y, z)
        full = np.mod(np.einsum("si,tj,ijk->stk", f, g, t), self.p)
        return self.spaces[(x, z)].coords(full.reshape(-1, t.shape[2])).reshape(f.shape[0], g.shape[0], -1)

    def _identity(self, x):
        return self.spaces[(x, x)].coords(self.cat.identity(x))[0]

    def project(self, x, y, vec) -> np.ndarray:
        return self.spaces[(x, y)].coords(vec)[0]


def ideal_closure_witness(cat: ComputedCategory, ideal: Mapping, objects: Sequence):
    """First (side, x, y, z, token) where the ideal fails to absorb a composite."""
    for x, y, z in product(objects, repeat=3):
        t = cat.compose_tensor(x, y, z)
        if 0 in t.shape:
            continue
        target = ideal[(x, z)]
        left = ideal[(x, y)]
        if left.dim:
            prods = np.mod(np.einsum("si,ijk->sjk", left.basis, t), cat.p).reshape(-1, t.shape[2])
            if not target.contains(prods, cat.p):
                return ("left", x, y, z)
        right = ideal[(y, z)]
        if right.dim:
            prods = np.mod(np.einsum("tj,ijk->tik", right.basis, t), cat.p).reshape(-1, t.shape[2])
            if not target.contains(prods, cat.p):
                return ("right", x, y, z)
    return None


def quotient_category(cat: ComputedCategory, ideal: Mapping, objects: Sequence | None = None) -> QuotientCategory:
    return QuotientCategory(cat, ideal, cat.objects() if objects is None else objects)


def endomorphism_algebra(cat: ComputedCategory, objects: Sequence, names: Sequence[str] | None = None) -> Algebra:
    """End of the direct sum of the objects, with the summand identities as idempotents."""
    objects = list(objects)
    names = [str(o) for o in objects] if names is None else list(names)
    k = len(objects)
    offsets, labels, corners, off = {}, [], [], 0
    for a, b in product(range(k), repeat=2):
        n = cat.hom_dim(objects[a], objects[b])
        offsets[(a, b)] = (off, n)
        labels.extend(f"{names[a]}>{names[b]}:{t}" for t in range(n))
        corners.extend([(a, b)] * n)
        off += n
    dim = off
    mult = np.zeros((dim, dim, dim), dtype=np.int64)
    for a, b, c in product(range(k), repeat=3):
        o1, n1 = offsets[(a, b)]
        o2, n2 = offsets[(b, c)]
        o3, n3 = offsets[(a, c)]
        if n1 and n2 and n3:
            mult[o1:o1 + n1, o2:o2 + n2, o3:o3 + n3] = cat.compose_tensor(objects[a], objects[b], objects[c])
    units = np.zeros((k, dim), dtype=np.int64)
    for a in range(k):
        o, n = offsets[(a, a)]
        units[a, o:o + n] = cat.identity(objects[a])
    alg = Algebra(labels, mult, units, vertex_labels=names, p=cat.p, corners=corners)
    alg.block_offsets = offsets
    return alg


def hom_dimensions(cat: ComputedCategory, objects: Sequence, names: Sequence[str] | None = None) -> dict:
    names = [str(o) for o in objects] if names is None else list(names)
    return {f"{names[a]}>{names[b]}": cat.hom_dim(x, y)
            for (a, x), (b, y) in product(enumerate(objects), repeat=2)}
