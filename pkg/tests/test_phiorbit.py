from itertools import combinations, product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from greenforge.phiorbit import (AdmissibleSet, NotAdmissible, OrbitCategory, admissibility_witness,
                                 associativity_witness, enumerate_admissible, is_admissible, orbit_compose,
                                 orbit_hom, synthetic_orbit_tensor)


def reference_admissible(s):
    # for all i, j, k in s with i + j + k in s: i + j in s exactly when j + k in s
    s = set(s)
    if 0 not in s:
        return False
    for i in s:
        for j in s:
            for k in s:
                if i + j + k in s and ((i + j in s) != (j + k in s)):
                    return False
    return True


def subsets_with_zero(lo, hi):
    others = [i for i in range(lo, hi + 1) if i]
    for r in range(len(others) + 1):
        for extra in combinations(others, r):
            yield (0,) + extra


def test_examples():
    assert is_admissible({0})
    assert is_admissible({0, 1, 2})
    assert all(is_admissible({0, n}) for n in range(1, 7))
    assert admissibility_witness({0, 1, 2, 4}) == (1, 1, 2)
    with pytest.raises(NotAdmissible) as err:
        AdmissibleSet((0, 1, 2, 4))
    assert err.value.witness == (1, 1, 2)


def test_matches_reference_on_all_subsets():
    subsets = list(subsets_with_zero(-3, 3))
    assert len(subsets) == 64
    for s in subsets:
        assert is_admissible(s) == reference_admissible(s), s


def test_enumeration():
    assert [tuple(s) for s in enumerate_admissible(0, 1)] == [(0,), (0, 1)]
    assert [tuple(s) for s in enumerate_admissible(0, 0)] == [(0,)]
    found = enumerate_admissible(-3, 3)
    assert len(found) == sum(reference_admissible(s) for s in subsets_with_zero(-3, 3)) == 27


@given(st.sets(st.integers(-4, 4)))
def test_admissibility_iff_truncated_product_associative(extra):
    phi = sorted(extra | {0})
    _, t = synthetic_orbit_tensor(phi)
    assert (associativity_witness(t) is None) == is_admissible(phi)


def test_orbit_components(hcat):
    plain = OrbitCategory(hcat, (0,), 1)
    assert orbit_hom(plain, "X", "X").components == {0: hcat.hom_dim("X", "X")}
    graded = OrbitCategory(hcat, (0, 1), 1)
    assert orbit_hom(graded, "X", "X").components == {0: 4, 1: 2}
    assert orbit_hom(graded, "A", "A").components == {0: 4, 1: 0}


def test_orbit_compose_truncation(hcat):
    cat = OrbitCategory(hcat, (0, 1), 1)
    f = np.ones(cat.component_dim("X", "X", 1), dtype=np.int64)
    assert orbit_compose(cat, "X", "X", "X", (1, f), (1, f)) is None
    ident = hcat.identity("X")
    i, out = orbit_compose(cat, "X", "X", "X", (0, ident), (0, ident))
    assert i == 0 and np.array_equal(out, ident)


@pytest.mark.parametrize("phi", [(0, 1), (0, 2), (-1, 0), (0, 1, 2, 3)])
def test_orbit_category_associative(hcat, phi):
    from greenforge.catcore import check_category
    cat = OrbitCategory(hcat, phi, 1)
    assert check_category(cat, ["X", "A", "SA"]) is None


def test_non_admissible_synthetic_witness():
    degrees, t = synthetic_orbit_tensor((0, 1, 2, 4))
    a, b, c = associativity_witness(t)
    i, j, k = degrees[a], degrees[b], degrees[c]
    assert i + j + k in degrees and ((i + j in degrees) != (j + k in degrees))
