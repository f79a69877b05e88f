"""Quivers with relations and finite-dimensional structure-constant algebras.

Paths compose left to right: for arrows a: u -> v and b: v -> w the path
``a.b`` runs from u to w.  The projective P_v = A e_v is spanned by the
paths ending at v, and Hom_A(P_u, P_v) is identified with e_u A e_v acting
by right multiplication, so composing homs (first, then second) is the
product in A in the same order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from typing import Mapping, Sequence

import numpy as np

from .exactlin import (
    QuotientSpace,
    Subspace,
    _p,
    asmat,
    left_kernel,
    matmul,
    rref,
)


class NotNilpotentAtBound(ValueError):
    """Some path of the maximal length survives the truncation."""


class InvalidSpec(ValueError):
    pass


@dataclass(frozen=True)
class Arrow:
    label: str
    source: str
    target: str


@dataclass(frozen=True)
class Quiver:
    vertices: tuple[str, ...]
    arrows: tuple[Arrow, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "arrows", tuple(Arrow(*a) if not isinstance(a, Arrow) else a for a in self.arrows))
        if len(set(self.vertices)) != len(self.vertices):
            raise InvalidSpec("duplicate vertex label")
        labels = [a.label for a in self.arrows]
        if len(set(labels)) != len(labels) or set(labels) & set(self.vertices):
            raise InvalidSpec("arrow labels must be unique and distinct from vertex labels")
        for a in self.arrows:
            if a.source not in self.vertices or a.target not in self.vertices:
                raise InvalidSpec(f"arrow {a.label} has an unknown endpoint")

    def vertex_index(self, v: str) -> int:
        return self.vertices.index(v)

    def arrow(self, label: str) -> Arrow:
        for a in self.arrows:
            if a.label == label:
                return a
        raise InvalidSpec(f"unknown arrow {label!r}")

    def path_ends(self, path: Sequence[str]) -> tuple[str, str]:
        arrows = [self.arrow(x) for x in path]
        for a, b in zip(arrows, arrows[1:]):
            if a.target != b.source:
                raise InvalidSpec(f"path {'.'.join(path)} is not composable at {a.label}.{b.label}")
        return arrows[0].source, arrows[-1].target


@dataclass(frozen=True)
class Relation:
    terms: tuple[tuple[int, tuple[str, ...]], ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((int(c), tuple(path)) for c, path in self.terms))
        if not self.terms:
            raise InvalidSpec("empty relation")
        if any(len(path) == 0 for _, path in self.terms):
            raise InvalidSpec("relation terms must be paths of positive length")


@dataclass(frozen=True)
class PathBoundSpec:
    quiver: Quiver
    relations: tuple[Relation, ...]
    length_bound: int

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple(self.relations))
        if self.length_bound < 1:
            raise InvalidSpec("length_bound must be at least 1")
        for rel in self.relations:
            ends = {self.quiver.path_ends(path) for _, path in rel.terms}
            if len(ends) != 1:
                raise InvalidSpec("relation is not uniform: " + relation_text(rel))
            if max(len(path) for _, path in rel.terms) > self.length_bound:
                raise InvalidSpec("length_bound is shorter than a relation term")


def relation_text(rel: Relation) -> str:
    return " + ".join(f"{c}*{'.'.join(path)}" for c, path in rel.terms)


class Algebra:
    """Finite-dimensional associative algebra given by structure constants.

    ``mult[a, b]`` holds the coordinates of basis[a] * basis[b].  ``units``
    lists a complete set of orthogonal idempotents (one row per idempotent);
    when every basis element lies in a single corner e_i A e_j the algebra
    is *corner adapted* and can serve as the base of a projective category.
    """

    def __init__(self, labels, mult, units, grading=None, vertex_labels=None,
                 arrows=None, p: int | None = None, corners=None):
        self.p = _p(p)
        self.labels = list(labels)
        self.mult = np.mod(np.asarray(mult, dtype=np.int64), self.p)
        n = len(self.labels)
        if self.mult.shape != (n, n, n):
            raise InvalidSpec("structure tensor has the wrong shape")
        self.units = asmat(units, self.p, cols=n)
        self.grading = None if grading is None else list(grading)
        self.vertex_labels = list(vertex_labels) if vertex_labels is not None else [str(i) for i in range(len(self.units))]
        # arrow label -> (source index, target index, coordinate vector)
        self.arrows = dict(arrows or {})
        self._corner_of = None if corners is None else [tuple(c) for c in corners]
        self._flat = None

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def one(self) -> np.ndarray:
        return np.mod(self.units.sum(axis=0), self.p)

    def idempotent_indices(self) -> list[int]:
        out = []
        for u in self.units:
            nz = np.flatnonzero(u)
            if len(nz) != 1 or u[nz[0]] != 1:
                raise ValueError("idempotents are not basis elements")
            out.append(int(nz[0]))
        return out

    def _flatmult(self) -> np.ndarray:
        if self._flat is None:
            self._flat = self.mult.reshape(self.dim, self.dim * self.dim)
        return self._flat

    def multiply(self, a, b) -> np.ndarray:
        """Product of (batches of) elements; a and b broadcast over leading rows."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if a.ndim == 1 and b.ndim == 1:
            left = matmul(a.reshape(1, -1), self._flatmult(), self.p).reshape(self.dim, self.dim)
            return matmul(b.reshape(1, -1), left, self.p)[0]
        a2 = a.reshape(-1, self.dim)
        b2 = b.reshape(-1, self.dim)
        lefts = matmul(a2, self._flatmult(), self.p).reshape(-1, self.dim, self.dim)
        return np.mod(np.einsum("rj,rjk->rk", b2, lefts), self.p)

    def left_matrix(self, a) -> np.ndarray:
        """Matrix of x -> a*x in row convention."""
        return matmul(np.asarray(a, dtype=np.int64).reshape(1, -1), self._flatmult(), self.p).reshape(self.dim, self.dim)

    def right_matrix(self, b) -> np.ndarray:
        """Matrix of x -> x*b in row convention."""
        return np.mod(np.einsum("ajk,j->ak", self.mult, np.asarray(b, dtype=np.int64)), self.p)

    def power(self, a, k: int) -> np.ndarray:
        out = self.one
        for _ in range(k):
            out = self.multiply(out, a)
        return out

    def corner_of(self) -> list[tuple[int, int]]:
        """Corner (i, j) of every basis element; raises if not corner adapted."""
        if self._corner_of is None:
            eye = np.eye(self.dim, dtype=np.int64)
            found = [None] * self.dim
            for i, j in product(range(len(self.units)), repeat=2):
                piece = self.multiply(self.multiply(np.broadcast_to(self.units[i], eye.shape), eye),
                                      np.broadcast_to(self.units[j], eye.shape))
                for b in range(self.dim):
                    if np.array_equal(piece[b], eye[b]):
                        found[b] = (i, j)
            if any(c is None for c in found):
                raise ValueError("basis is not adapted to the idempotents")
            self._corner_of = found
        return self._corner_of

    def corner_indices(self, i: int, j: int) -> list[int]:
        return [b for b, c in enumerate(self.corner_of()) if c == (i, j)]

    def check_associative(self) -> tuple[int, int, int] | None:
        """First basis triple (a, b, c) with (ab)c != a(bc), or None.

        For a corner-adapted basis the check runs corner by corner: products
        are first confirmed to land in the expected corner, after which only
        corner-compatible triples can contribute.
        """
        n = self.dim
        if n == 0:
            return None
        m = self.mult
        try:
            corners = self.corner_of()
        except ValueError:
            corners = None
        if corners is None:
            left = np.mod(np.einsum("abm,mcn->abcn", m, m), self.p)
            right = np.mod(np.einsum("bcm,amn->abcn", m, m), self.p)
            bad = np.argwhere(np.any(left != right, axis=-1))
            return tuple(int(v) for v in bad[0]) if len(bad) else None
        k = len(self.units)
        blocks = {(i, j): [] for i in range(k) for j in range(k)}
        for b, c in enumerate(corners):
            blocks[c].append(b)
        for i, j, l in product(range(k), repeat=3):
            a_idx, b_idx = blocks[(i, j)], blocks[(j, l)]
            if not a_idx or not b_idx:
                continue
            outside = np.ones(n, dtype=bool)
            outside[blocks[(i, l)]] = False
            sub = m[np.ix_(a_idx, b_idx)]
            if np.any(sub[:, :, outside]):
                x, y = np.argwhere(np.any(sub[:, :, outside], axis=-1))[0]
                return a_idx[x], b_idx[y], -1
        for i, j, l in product(range(k), repeat=3):
            a_idx, b_idx = blocks[(i, j)], blocks[(j, l)]
            il = blocks[(i, l)]
            if not a_idx or not b_idx:
                continue
            ab = m[np.ix_(a_idx, b_idx, il)]                      # (A, B, |il|)
            for r in range(k):
                c_idx = blocks[(l, r)]
                if not c_idx:
                    continue
                jr, ir = blocks[(j, r)], blocks[(i, r)]
                if not ir:
                    continue
                left = np.einsum("abm,mcn->abcn", ab, m[np.ix_(il, c_idx, ir)]) if il else \
                    np.zeros((len(a_idx), len(b_idx), len(c_idx), len(ir)), dtype=np.int64)
                if jr:
                    bc = m[np.ix_(b_idx, c_idx, jr)]
                    right = np.einsum("bcm,amn->abcn", bc, m[np.ix_(a_idx, jr, ir)])
                else:
                    right = np.zeros_like(left)
                bad = np.argwhere(np.any(np.mod(left - right, self.p) != 0, axis=-1))
                if len(bad):
                    x, y, z = bad[0]
                    return a_idx[x], b_idx[y], c_idx[z]
        return None

    def check_unit(self) -> bool:
        eye = np.eye(self.dim, dtype=np.int64)
        one = np.broadcast_to(self.one, eye.shape)
        return bool(np.array_equal(self.multiply(one, eye), eye) and np.array_equal(self.multiply(eye, one), eye))

    def change_basis(self, q) -> Algebra:
        """Same algebra in the basis given by the rows of the invertible matrix q."""
        from .exactlin import inverse

        q = asmat(q, self.p)
        qi = inverse(q, self.p)
        prod_ = self.multiply(np.repeat(q, self.dim, axis=0), np.tile(q, (self.dim, 1)))
        mult = matmul(prod_, qi, self.p).reshape(self.dim, self.dim, self.dim)
        units = matmul(self.units, qi, self.p)
        return Algebra([f"q{i}" for i in range(self.dim)], mult, units, p=self.p)

    def to_json(self) -> dict:
        entries = [[int(a), int(b), int(c), int(self.mult[a, b, c])] for a, b, c in zip(*np.nonzero(self.mult))]
        return {
            "prime": self.p,
            "dim": self.dim,
            "basis": self.labels,
            "grading": self.grading,
            "idempotents": self.units.tolist(),
            "mult": entries,
        }


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"{type(obj).__name__} is not JSON serializable")


def dumps_canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True, default=_json_default)


def multiply(alg: Algebra, a, b) -> np.ndarray:
    return alg.multiply(a, b)


def corner(alg: Algebra, i, j) -> Subspace:
    """e_i A e_j as a subspace of A; vertices may be given by index or label."""
    i = _vertex(alg, i)
    j = _vertex(alg, j)
    eye = np.eye(alg.dim, dtype=np.int64)
    piece = alg.multiply(alg.multiply(np.broadcast_to(alg.units[i], eye.shape), eye),
                         np.broadcast_to(alg.units[j], eye.shape))
    return Subspace.span(piece, alg.dim, alg.p)


def _vertex(alg: Algebra, v) -> int:
    if isinstance(v, str):
        if v not in alg.vertex_labels:
            raise InvalidSpec(f"unknown vertex {v!r}")
        return alg.vertex_labels.index(v)
    if not 0 <= v < len(alg.units):
        raise InvalidSpec(f"vertex index {v} out of range")
    return int(v)


# ---------------------------------------------------------------------------
# building kQ/I


def _enumerate_paths(quiver: Quiver, bound: int) -> list[tuple[int, tuple[int, ...]]]:
    """All paths (start vertex, arrow indices) of length <= bound."""
    out_arrows = {v: [] for v in range(len(quiver.vertices))}
    src = [quiver.vertex_index(a.source) for a in quiver.arrows]
    tgt = [quiver.vertex_index(a.target) for a in quiver.arrows]
    for k, s in enumerate(src):
        out_arrows[s].append(k)
    paths = [(v, ()) for v in range(len(quiver.vertices))]
    frontier = [(v, (), v) for v in range(len(quiver.vertices))]
    for _ in range(bound):
        nxt = []
        for start, arrows, end in frontier:
            for k in out_arrows[end]:
                nxt.append((start, arrows + (k,), tgt[k]))
        paths.extend((s, a) for s, a, _ in nxt)
        frontier = nxt
    return paths


def _path_key(path) -> tuple:
    start, arrows = path
    return (len(arrows), arrows, start)


def build_algebra(spec: PathBoundSpec, p: int | None = None) -> Algebra:
    """kQ/I truncated at the length bound, with a greedy length-then-lex basis."""
    p = _p(p)
    q = spec.quiver
    nv = len(q.vertices)
    N = spec.length_bound
    src = [q.vertex_index(a.source) for a in q.arrows]
    tgt = [q.vertex_index(a.target) for a in q.arrows]
    label_index = {a.label: k for k, a in enumerate(q.arrows)}

    def end(path):
        start, arrows = path
        return tgt[arrows[-1]] if arrows else start

    paths = sorted(_enumerate_paths(q, N), key=_path_key)
    corners: dict[tuple[int, int], list] = {}
    for path in paths:
        corners.setdefault((path[0], end(path)), []).append(path)
    ending_at = {v: [x for x in paths if end(x) == v] for v in range(nv)}
    starting_at = {v: [x for x in paths if x[0] == v] for v in range(nv)}

    generators: dict[tuple[int, int], list[dict]] = {c: [] for c in corners}
    for rel in spec.relations:
        terms = [(c % p, tuple(label_index[x] for x in path)) for c, path in rel.terms]
        s, t = src[terms[0][1][0]], tgt[terms[0][1][-1]]
        shortest = min(len(a) for _, a in terms)
        for left in ending_at[s]:
            if len(left[1]) + shortest > N:
                continue
            for right in starting_at[t]:
                room = N - len(left[1]) - len(right[1])
                if room < shortest:
                    continue
                vec: dict = {}
                for c, arrows in terms:
                    if len(arrows) <= room:
                        key = (left[0], left[1] + arrows + right[1])
                        vec[key] = (vec.get(key, 0) + c) % p
                vec = {k: v for k, v in vec.items() if v}
                if vec:
                    generators[(left[0], end(right))].append(vec)

    standard: list = []
    normal_form: dict = {}
    for c, cpaths in corners.items():
        order = cpaths[::-1]          # leading term = largest path
        col = {path: i for i, path in enumerate(order)}
        rows = generators[c]
        if rows:
            mat = np.zeros((len(rows), len(order)), dtype=np.int64)
            for r, vec in enumerate(rows):
                for path, coef in vec.items():
                    mat[r, col[path]] = coef
            red, piv, _ = rref(mat, p)
        else:
            red, piv = np.zeros((0, len(order)), dtype=np.int64), ()
        pivset = set(piv)
        free = [i for i in range(len(order)) if i not in pivset]
        for i in free:
            if len(order[i][1]) == N:
                a = order[i]
                raise NotNilpotentAtBound(
                    f"path {_path_label(q, a)} of length {N} is not in the relation ideal; raise length_bound")
            standard.append(order[i])
        for r, i in enumerate(piv):
            normal_form[order[i]] = {order[j]: (-red[r, j]) % p for j in free if red[r, j]}
        for i in free:
            normal_form[order[i]] = {order[i]: 1}

    standard.sort(key=_path_key)
    index = {path: i for i, path in enumerate(standard)}
    n = len(standard)
    mult = np.zeros((n, n, n), dtype=np.int64)
    for a, pa in enumerate(standard):
        for b, pb in enumerate(standard):
            if end(pa) != pb[0]:
                continue
            arrows = pa[1] + pb[1]
            if len(arrows) >= N:
                continue
            for path, coef in normal_form[(pa[0], arrows)].items():
                mult[a, b, index[path]] = coef
    units = np.zeros((nv, n), dtype=np.int64)
    for v in range(nv):
        units[v, index[(v, ())]] = 1
    arrows = {}
    for k, a in enumerate(q.arrows):
        vec = np.zeros(n, dtype=np.int64)
        if N >= 1 and (src[k], (k,)) in normal_form:
            for path, coef in normal_form[(src[k], (k,))].items():
                vec[index[path]] = coef
        arrows[a.label] = (src[k], tgt[k], vec)
    return Algebra(
        [_path_label(q, x) for x in standard],
        mult,
        units,
        grading=[len(x[1]) for x in standard],
        vertex_labels=q.vertices,
        arrows=arrows,
        p=p,
    )


def _path_label(q: Quiver, path) -> str:
    start, arrows = path
    if not arrows:
        return f"e_{q.vertices[start]}"
    return ".".join(q.arrows[k].label for k in arrows)


def path_element(alg: Algebra, path: Sequence[str]) -> np.ndarray:
    """Image in alg of a path given by arrow labels."""
    out = None
    for label in path:
        vec = alg.arrows[label][2]
        out = vec if out is None else alg.multiply(out, vec)
    if out is None:
        raise InvalidSpec("empty path")
    return out


# ---------------------------------------------------------------------------
# radical and self-injectivity


def trace_radical(alg: Algebra) -> Subspace:
    """{a : tr(L_{ab}) = 0 for all b}; the Jacobson radical when p > dim."""
    t = np.mod(np.einsum("ckk->c", alg.mult), alg.p)
    form = matmul(alg.mult.reshape(-1, alg.dim), t.reshape(-1, 1), alg.p).reshape(alg.dim, alg.dim)
    return left_kernel(form, alg.p, rows=alg.dim)


def radical(alg: Algebra) -> Subspace:
    """Radical from the path-length grading when available, else the trace form."""
    if alg.grading is not None:
        idx = [i for i, g in enumerate(alg.grading) if g > 0]
        return Subspace.span(np.eye(alg.dim, dtype=np.int64)[idx], alg.dim, alg.p)
    return trace_radical(alg)


def product_space(alg: Algebra, u: Subspace, v: Subspace) -> Subspace:
    if u.dim == 0 or v.dim == 0:
        return Subspace.zero(alg.dim)
    prods = alg.multiply(np.repeat(u.basis, v.dim, axis=0), np.tile(v.basis, (u.dim, 1)))
    return Subspace.span(prods, alg.dim, alg.p)


def _sandwich(alg: Algebra, i: int, space: Subspace, j: int) -> Subspace:
    if space.dim == 0:
        return Subspace.zero(alg.dim)
    k = space.dim
    x = alg.multiply(np.broadcast_to(alg.units[i], (k, alg.dim)), space.basis)
    x = alg.multiply(x, np.broadcast_to(alg.units[j], (k, alg.dim)))
    return Subspace.span(x, alg.dim, alg.p)


def radical_generators(alg: Algebra) -> list[tuple[int, int, np.ndarray]]:
    """(u, v, r) with r running over a basis of e_u (rad/rad^2) e_v."""
    if alg.arrows:
        return [(s, t, vec) for s, t, vec in alg.arrows.values() if np.any(vec)]
    rad = radical(alg)
    rad2 = product_space(alg, rad, rad)
    out = []
    k = len(alg.units)
    for u, v in product(range(k), repeat=2):
        top = QuotientSpace(_sandwich(alg, u, rad, v), _sandwich(alg, u, rad2, v), alg.p)
        out.extend((u, v, r) for r in top.reps)
    return out


@dataclass
class SelfInjectivity:
    self_injective: bool
    ext_dims: dict = field(default_factory=dict)


def check_self_injective(alg: Algebra) -> SelfInjectivity:
    """Ext^1(S_v, A) for every simple S_v from the start of its projective resolution.

    P_1 = (+) P_u over radical generators r: u -> v maps onto rad P_v; with K
    its kernel, Ext^1(S_v, A) = {phi in Hom(P_1, A) : phi|K = 0} modulo the
    restrictions of Hom(P_v, A).  Hom(P_u, A) is the corner space e_u A.
    """
    p = alg.p
    n = alg.dim
    corners = alg.corner_of()
    ends_at = lambda u: [b for b in range(n) if corners[b][1] == u]     # basis of A e_u
    starts_at = lambda u: [b for b in range(n) if corners[b][0] == u]   # basis of e_u A
    gens = radical_generators(alg)
    ext = {}
    for v in range(len(alg.units)):
        mine = [(u, r) for u, t, r in gens if t == v]
        if not mine:
            ext[alg.vertex_labels[v]] = 0
            continue
        # pi: P_1 -> A, rows indexed by the coordinates of P_1
        p1_rows = []
        for u, r in mine:
            idx = ends_at(u)
            p1_rows.append(alg.multiply(np.eye(n, dtype=np.int64)[idx], np.broadcast_to(r, (len(idx), n))))
        pi = np.vstack(p1_rows)
        k = left_kernel(pi, p, rows=pi.shape[0])
        offsets = np.cumsum([0] + [len(ends_at(u)) for u, _ in mine])
        # phi = (w_g), w_g in e_u A; restriction to K is sum_g k_g * w_g
        blocks = []
        for g, (u, _) in enumerate(mine):
            w_idx = starts_at(u)
            a_idx = ends_at(u)
            kg = k.basis[:, offsets[g]:offsets[g + 1]]               # (dimK, |Ae_u|)
            # entry: sum_c kg[kk, c] * mult[a_idx[c], w, :]
            t = np.einsum("kc,cwz->wkz", kg, alg.mult[np.ix_(a_idx, w_idx)])
            blocks.append(np.mod(t.reshape(len(w_idx), -1), p))
        constraint = np.vstack(blocks) if k.dim else np.zeros((sum(len(starts_at(u)) for u, _ in mine), 0), dtype=np.int64)
        z = left_kernel(constraint, p, rows=constraint.shape[0])
        # restrictions of psi in e_v A: w_g = r_g * w
        w_idx = starts_at(v)
        images = []
        for w in w_idx:
            parts = []
            for u, r in mine:
                prod_ = alg.multiply(r, np.eye(n, dtype=np.int64)[w])
                parts.append(prod_[starts_at(u)])
            images.append(np.concatenate(parts))
        b = Subspace.span(np.array(images), z.ambient_dim, p)
        ext[alg.vertex_labels[v]] = z.dim - b.dim
    return SelfInjectivity(all(d == 0 for d in ext.values()), ext)


# ---------------------------------------------------------------------------
# spec files


def spec_from_dict(data: Mapping) -> PathBoundSpec:
    try:
        qd = data["quiver"]
        vertices = [str(v) for v in qd["vertices"]]
        arrows = [Arrow(str(a["label"]), str(a["source"]), str(a["target"])) for a in qd.get("arrows", [])]
        relations = [Relation([(int(c), tuple(str(x) for x in path)) for c, path in rel["terms"]])
                     for rel in data.get("relation", [])]
        return PathBoundSpec(Quiver(tuple(vertices), tuple(arrows)), tuple(relations), int(data["length_bound"]))
    except KeyError as exc:
        raise InvalidSpec(f"missing key {exc}") from None


def spec_to_dict(spec: PathBoundSpec, prime: int | None = None) -> dict:
    out = {
        "length_bound": spec.length_bound,
        "quiver": {
            "vertices": list(spec.quiver.vertices),
            "arrows": [{"label": a.label, "source": a.source, "target": a.target} for a in spec.quiver.arrows],
        },
        "relation": [{"terms": [[c, list(path)] for c, path in rel.terms]} for rel in spec.relations],
    }
    if prime is not None:
        out["prime"] = prime
    return out
