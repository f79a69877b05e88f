from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from greenforge.catcore import ProjCategory
from greenforge.exactlin import Subspace, rank
from greenforge.quivalg import (Arrow, InvalidSpec, NotNilpotentAtBound, PathBoundSpec, Quiver, Relation,
                                build_algebra, check_self_injective, corner, dumps_canonical, path_element,
                                spec_from_dict, spec_to_dict)

P = 101


def two_loop(n=2, s=2, bound=4):
    q = Quiver(("1",), (Arrow("x", "1", "1"), Arrow("y", "1", "1")))
    rels = (Relation([(1, ("x",) * n), (-1, ("y",) * s)]), Relation([(1, ("x", "y"))]), Relation([(1, ("y", "x"))]))
    return PathBoundSpec(q, rels, bound)


def a_n(n, relations=()):
    verts = tuple(str(i) for i in range(1, n + 1))
    arrows = tuple(Arrow(chr(ord("a") + i), verts[i], verts[i + 1]) for i in range(n - 1))
    return PathBoundSpec(Quiver(verts, arrows), tuple(relations), max(n, 1))


def brute_force_dim(bound):
    """dim of k<x,y>/(x^2-y^2, xy, yx) below the bound, from all 31 paths of length <= 4."""
    words = [w for k in range(bound + 1) for w in product("xy", repeat=k)]
    col = {w: i for i, w in enumerate(words)}
    rels = [{("x", "x"): 1, ("y", "y"): -1}, {("x", "y"): 1}, {("y", "x"): 1}]
    rows = []
    for rel in rels:
        for u, v in product(words, repeat=2):
            row = np.zeros(len(words), dtype=np.int64)
            for w, c in rel.items():
                full = u + w + v
                if len(full) <= bound:
                    row[col[full]] += c
            if row.any() and all(len(u + w + v) <= bound for w in rel):
                rows.append(row)
    return len(words), len(words) - rank(np.array(rows) % P, P)


def test_ground_field():
    alg = build_algebra(PathBoundSpec(Quiver(("1",), ()), (), 1), P)
    assert alg.dim == 1 and alg.labels == ["e_1"]


def test_two_loop_basis_matches_brute_force():
    alg = build_algebra(two_loop(), P)
    npaths, dim = brute_force_dim(4)
    assert npaths == 31
    assert alg.dim == dim == 4
    assert alg.labels == ["e_1", "x", "y", "x.x"]


def test_two_loop_products():
    alg = build_algebra(two_loop(), P)
    x, y = path_element(alg, ["x"]), path_element(alg, ["y"])
    assert not alg.multiply(x, y).any()
    assert np.array_equal(alg.multiply(x, x), alg.multiply(y, y))
    assert alg.multiply(x, x).any()
    assert np.array_equal(alg.multiply(alg.one, x), x)


def test_corners_and_peirce():
    alg = build_algebra(two_loop(), P)
    assert corner(alg, "1", "1").dim == 4
    a3 = build_algebra(a_n(3), P)
    assert corner(a3, "3", "1").dim == 0
    assert sum(corner(a3, i, j).dim for i, j in product(range(3), repeat=2)) == a3.dim


def test_composition_convention():
    # a: P_1 -> P_2 and b: P_2 -> P_3 compose (a then b) to the path ab
    alg = build_algebra(a_n(3), P)
    cat = ProjCategory(alg)
    a, b = path_element(alg, ["a"]), path_element(alg, ["b"])
    ab = path_element(alg, ["a", "b"])
    fa, fb = cat.element(0, 1, a), cat.element(1, 2, b)
    assert np.array_equal(cat.compose(0, 1, 2, fa, fb), cat.element(0, 2, ab))
    # as maps of modules: right multiplication, (p)(a)(b) = p a b
    ra, rb, rab = cat.realize((0,), (1,), fa), cat.realize((1,), (2,), fb), cat.realize((0,), (2,), cat.element(0, 2, ab))
    assert np.array_equal(np.mod(ra @ rb, P), rab)


def test_self_injective():
    assert check_self_injective(build_algebra(two_loop(), P)).self_injective
    assert not check_self_injective(build_algebra(a_n(2), P)).self_injective
    semisimple = PathBoundSpec(Quiver(("1", "2"), ()), (), 1)
    assert check_self_injective(build_algebra(semisimple, P)).self_injective


def test_not_nilpotent_at_bound():
    q = Quiver(("1",), (Arrow("t", "1", "1"),))
    with pytest.raises(NotNilpotentAtBound):
        build_algebra(PathBoundSpec(q, (), 3), P)
    alg = build_algebra(PathBoundSpec(q, (Relation([(1, ("t",) * 3)]),), 3), P)
    assert alg.dim == 3


def test_invalid_specs():
    q = Quiver(("1", "2"), (Arrow("a", "1", "2"),))
    with pytest.raises(InvalidSpec):
        PathBoundSpec(q, (Relation([(1, ("a",)), (1, ("a", "a"))]),), 3)


def test_larger_bound_same_table():
    small, big = build_algebra(two_loop(bound=3), P), build_algebra(two_loop(bound=6), P)
    assert small.labels == big.labels
    assert np.array_equal(small.mult, big.mult)


def test_spec_roundtrip_and_canonical_dump():
    spec = two_loop()
    again = spec_from_dict(spec_to_dict(spec))
    assert again == spec
    a, b = build_algebra(spec, P), build_algebra(again, P)
    assert dumps_canonical(a.to_json()) == dumps_canonical(b.to_json())


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4))
def test_built_algebras_are_associative_and_unital(n, s):
    alg = build_algebra(two_loop(n, s, max(n, s) + 1), P)
    assert alg.check_associative() is None
    assert alg.check_unit()


@settings(max_examples=10, deadline=None)
@given(st.integers(1, 5))
def test_radical_nilpotent_at_bound(n):
    from greenforge.quivalg import product_space, trace_radical
    alg = build_algebra(a_n(n), P)
    rad = trace_radical(alg)
    power = rad
    for _ in range(n):
        power = product_space(alg, power, rad)
    assert power.dim == 0
