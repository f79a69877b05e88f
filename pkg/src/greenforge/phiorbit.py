"""Admissible subsets of Z and Phi-orbit categories."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Sequence

import numpy as np

from .catcore import ComputedCategory, HomotopyCategory
from .exactlin import Subspace, matmul


class NotAdmissible(ValueError):
    def __init__(self, phi, witness):
        super().__init__(f"{sorted(phi)} is not admissible; witness {witness}")
        self.witness = witness


def admissibility_witness(s: Iterable[int]):
    """First (i, j, k) breaking the triple condition, ("0",) if 0 is missing, None if admissible."""
    s = sorted(set(s))
    members = set(s)
    if 0 not in members:
        return ("0",)
    for i, j, k in product(s, repeat=3):
        if i + j + k in members and ((i + j in members) != (j + k in members)):
            return (i, j, k)
    return None


def is_admissible(s: Iterable[int]) -> bool:
    return admissibility_witness(s) is None


@dataclass(frozen=True)
class AdmissibleSet:
    elements: tuple[int, ...]

    def __post_init__(self):
        elems = tuple(sorted(set(self.elements)))
        object.__setattr__(self, "elements", elems)
        bad = admissibility_witness(elems)
        if bad is not None:
            raise NotAdmissible(elems, bad)

    def __contains__(self, i) -> bool:
        return i in self.elements

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def __str__(self):
        return ",".join(map(str, self.elements))

    @classmethod
    def parse(cls, text: str) -> AdmissibleSet:
        return cls(tuple(int(t) for t in text.replace(" ", "").split(",") if t))


def enumerate_admissible(lo: int, hi: int) -> list[AdmissibleSet]:
    """All admissible subsets of [lo, hi] containing 0, shortest first then lexicographic."""
    if lo > 0 or hi < 0:
        raise ValueError("the range must contain 0")
    others = [i for i in range(lo, hi + 1) if i != 0]
    out = []
    for r in range(len(others) + 1):
        for extra in combinations(others, r):
            s = tuple(sorted((0,) + extra))
            if is_admissible(s):
                out.append(AdmissibleSet(s))
    return out


class OrbitCategory(ComputedCategory):
    """Hom(x, y) = (+)_{i in Phi} Hom_K(x, y[d i]); composition f_i F^i(g_j), zero off Phi.

    Objects are complex names of the underlying homotopy category.  Tokens of
    a hom space are concatenated component by component in increasing i.
    """

    def __init__(self, hcat: HomotopyCategory, phi: AdmissibleSet | Sequence[int], d: int = 1):
        super().__init__(hcat.p)
        self.hcat = hcat
        self.phi = phi if isinstance(phi, AdmissibleSet) else AdmissibleSet(tuple(phi))
        self.d = int(d)

    def objects(self):
        return list(self.hcat.complexes)

    def component_dim(self, x, y, i: int) -> int:
        if i not in self.phi:
            return 0
        return self.hcat.hom_dim((x, 0), (y, self.d * i))

    def component_tensor(self, x, y, z, i: int, j: int) -> np.ndarray:
        """f_i in Hom(x, F^i y), g_j in Hom(y, F^j z) -> f_i F^i(g_j) in Hom(x, F^{i+j} z)."""
        return self.hcat.compose_tensor((x, 0), (y, self.d * i), (z, self.d * (i + j)))

    def layout(self, x, y) -> dict:
        out, off = {}, 0
        for i in self.phi:
            n = self.component_dim(x, y, i)
            out[i] = (off, n)
            off += n
        return out

    def _hom_dim(self, x, y):
        return sum(n for _, n in self.layout(x, y).values())

    def _compose(self, x, y, z):
        lf, lg, lh = self.layout(x, y), self.layout(y, z), self.layout(x, z)
        t = np.zeros((self.hom_dim(x, y), self.hom_dim(y, z), self.hom_dim(x, z)), dtype=np.int64)
        for i, j in product(self.phi, repeat=2):
            if i + j not in self.phi:
                continue
            (o1, n1), (o2, n2), (o3, n3) = lf[i], lg[j], lh[i + j]
            if n1 and n2 and n3:
                t[o1:o1 + n1, o2:o2 + n2, o3:o3 + n3] = self.component_tensor(x, y, z, i, j)
        return t

    def _identity(self, x):
        out = np.zeros(self.hom_dim(x, x), dtype=np.int64)
        off, n = self.layout(x, x)[0]
        out[off:off + n] = self.hcat.identity((x, 0))
        return out

    def component(self, x, y, vec, i: int) -> np.ndarray:
        off, n = self.layout(x, y).get(i, (0, 0))
        return np.asarray(vec)[..., off:off + n]

    def embed(self, x, y, i: int, vec) -> np.ndarray:
        """Place component-i coordinates (rows allowed) into the full orbit hom."""
        vec = np.asarray(vec, dtype=np.int64)
        off, n = self.layout(x, y)[i]
        out = np.zeros(vec.shape[:-1] + (self.hom_dim(x, y),), dtype=np.int64)
        out[..., off:off + n] = vec
        return out

    def embed_subspace(self, x, y, i: int, sub: Subspace) -> Subspace:
        return Subspace.span(self.embed(x, y, i, sub.basis), self.hom_dim(x, y), self.p)


@dataclass
class GradedHom:
    phi: AdmissibleSet
    components: dict        # i -> dimension of Hom(x, F^i y)

    @property
    def dim(self) -> int:
        return sum(self.components.values())


def orbit_hom(cat: OrbitCategory, x, y) -> GradedHom:
    return GradedHom(cat.phi, {i: cat.component_dim(x, y, i) for i in cat.phi})


def orbit_compose(cat: OrbitCategory, x, y, z, f: tuple[int, np.ndarray], g: tuple[int, np.ndarray]):
    """(i, f_i) then (j, g_j) -> (i + j, f_i F^i(g_j)), or None for the zero element."""
    (i, fi), (j, gj) = f, g
    if i not in cat.phi or j not in cat.phi or i + j not in cat.phi:
        return None
    t = cat.component_tensor(x, y, z, i, j)
    if 0 in t.shape:
        return (i + j, np.zeros(t.shape[2], dtype=np.int64))
    left = matmul(np.asarray(fi).reshape(1, -1), t.reshape(t.shape[0], -1), cat.p).reshape(t.shape[1], t.shape[2])
    return (i + j, matmul(np.asarray(gj).reshape(1, -1), left, cat.p)[0])


def synthetic_orbit_tensor(phi: Sequence[int], p: int | None = None):
    """Free graded composition on one object, one token per degree in phi.

    t_i t_j = t_{i+j} whenever i, j, i + j lie in phi.  Returns (degrees, tensor)
    so callers can test associativity of the truncated product directly.
    """
    degrees = sorted(set(phi))
    idx = {i: n for n, i in enumerate(degrees)}
    k = len(degrees)
    t = np.zeros((k, k, k), dtype=np.int64)
    for i, j in product(degrees, repeat=2):
        if i + j in idx:
            t[idx[i], idx[j], idx[i + j]] = 1
    return degrees, t


def associativity_witness(t: np.ndarray, p: int | None = None):
    """First basis triple (a, b, c) with (ab)c != a(bc) for a structure tensor, else None."""
    left = np.einsum("abm,mcn->abcn", t, t)
    right = np.einsum("bcm,amn->abcn", t, t)
    if p is not None:
        left, right = np.mod(left, p), np.mod(right, p)
    bad = np.argwhere(np.any(left != right, axis=3))
    return tuple(int(v) for v in bad[0]) if len(bad) else None
