"""Built-in instances: A = k[x,y]/(x^n - y^s, xy), its small complexes and the presented Lambda_x."""

from __future__ import annotations

from itertools import product

import numpy as np

from .catcore import CatComplex, HomotopyCategory, ProjCategory, QuotientCategory, endomorphism_algebra, stalk
from .approx import ApproxContext, ghost_ideal
from .phiorbit import OrbitCategory
from .quivalg import Algebra, Arrow, PathBoundSpec, Quiver, Relation, build_algebra, path_element
from .tilt import Scenario

M_NAMES = ("A", "SA")


def two_loop_spec(n: int = 2, s: int = 2) -> PathBoundSpec:
    """One vertex, loops x and y, relations x^n - y^s, xy and yx (the last makes it commutative)."""
    q = Quiver(("1",), (Arrow("x", "1", "1"), Arrow("y", "1", "1")))
    rels = (
        Relation([(1, ("x",) * n), (-1, ("y",) * s)]),
        Relation([(1, ("x", "y"))]),
        Relation([(1, ("y", "x"))]),
    )
    return PathBoundSpec(q, rels, max(n, s) + 1)


def corpus_complexes(alg: Algebra) -> dict[str, CatComplex]:
    """X = (A -x-> A), Y = (A -y-> A) with the left A in degree 0, the stalk A and A shifted into degree 1."""
    x = path_element(alg, ["x"])
    y = path_element(alg, ["y"])
    return {
        "X": CatComplex({0: (0,), 1: (0,)}, {0: x}),
        "Y": CatComplex({0: (0,), 1: (0,)}, {0: y}),
        "A": stalk((0,), 0),
        "SA": stalk((0,), 1),
    }


def corpus_homotopy(n: int = 2, s: int = 2, p: int | None = None, shifts=(0,)) -> HomotopyCategory:
    alg = build_algebra(two_loop_spec(n, s), p)
    return HomotopyCategory(ProjCategory(alg), corpus_complexes(alg), shifts)


def lambda_spec(n: int = 2, s: int = 2, amended: bool = False) -> PathBoundSpec:
    """Quiver with relations for Lambda_x; vertex 1 is A in degree 1, 2 is X, 3 is A.

    ``amended`` adds (b2 b4)^s = 0, which together with the sum relation also
    kills (b3 b1)^s.
    """
    q = Quiver(("1", "2", "3"), (
        Arrow("a1", "1", "1"), Arrow("a2", "3", "3"),
        Arrow("b1", "1", "2"), Arrow("b2", "2", "3"),
        Arrow("b3", "2", "1"), Arrow("b4", "3", "2"),
    ))
    zero = [("a1", "b1"), ("b3", "a1"), ("a2", "b4"), ("b1", "b2"), ("b4", "b3"), ("b2", "a2")]
    rels = [Relation([(1, path)]) for path in zero]
    rels += [
        Relation([(1, ("a1",) * n), (-1, ("b1", "b3") * s)]),
        Relation([(1, ("a2",) * n), (-1, ("b4", "b2") * s)]),
        Relation([(1, ("b3", "b1") * s), (1, ("b2", "b4") * s)]),
    ]
    if amended:
        rels.append(Relation([(1, ("b2", "b4") * s)]))
    return PathBoundSpec(q, tuple(rels), 4 * max(n, s))


def lambda_objects() -> tuple[str, ...]:
    """Summand order matching the presentation's vertices 1, 2, 3."""
    return ("SA", "X", "A")


def ghost_quotient(hcat: HomotopyCategory, objects=("SA", "X", "A"), m=M_NAMES) -> QuotientCategory:
    """K modulo the ideal of add(M)-ghosts, on the given objects."""
    ctx = ApproxContext(OrbitCategory(hcat, (0,), 0), m)
    ideal = {(a, b): ghost_ideal(ctx, a, b) for a, b in product(objects, repeat=2)}
    return QuotientCategory(ctx.category, ideal, list(objects))


def lambda_algebra(hcat: HomotopyCategory, objects=("SA", "X", "A")) -> Algebra:
    """End of the sum of the objects in K modulo ghosts."""
    return endomorphism_algebra(ghost_quotient(hcat, objects), list(objects))


def generator_images(hcat: HomotopyCategory, end: Algebra, quot: QuotientCategory | None = None,
                     objects=("SA", "X", "A")) -> dict:
    """Images of the presentation's vertices and arrows in an endomorphism algebra of the objects.

    a1 is x on the degree-1 term of SA, a2 is x on A, b1: SA -> X and b2: X -> A
    are identities in the shared degree, b3: X -> SA and b4: A -> X are y.
    """
    alg = hcat.base.alg
    x = path_element(alg, ["x"])
    y = path_element(alg, ["y"])
    one = alg.one
    chain = {
        "a1": ("SA", "SA", {1: x}),
        "a2": ("A", "A", {0: x}),
        "b1": ("SA", "X", {1: one}),
        "b2": ("X", "A", {0: one}),
        "b3": ("X", "SA", {1: y}),
        "b4": ("A", "X", {0: y}),
    }
    objs = list(objects)
    out = {}
    for v, name in zip(("1", "2", "3"), objs):
        k = objs.index(name)
        out[v] = np.asarray(end.units[k])
    for label, (src, tgt, blocks) in chain.items():
        tokens = hcat.element(src, tgt, {i: hcat.base.element(0, 0, b) for i, b in blocks.items()})
        if quot is not None:
            tokens = quot.project(src, tgt, tokens)
        a, b = objs.index(src), objs.index(tgt)
        off, n = end.block_offsets[(a, b)]
        vec = np.zeros(end.dim, dtype=np.int64)
        vec[off:off + n] = tokens
        out[label] = vec
    return out


def scenario(phi=(0,), shift_power: int = 1, n: int = 2, s: int = 2, right_end: str = "X",
             orth_bound: int = 4) -> Scenario:
    spec = two_loop_spec(n, s)
    alg = build_algebra(spec)
    name = f"two-loop n={n} s={s} phi={','.join(map(str, phi))} d={shift_power} end={right_end}"
    return Scenario(name, spec, corpus_complexes(alg), M_NAMES, right_end, tuple(phi), shift_power, orth_bound)
