from itertools import product

import numpy as np
import pytest

from greenforge.approx import ApproxContext
from greenforge.catcore import endomorphism_algebra
from greenforge.corpus import M_NAMES
from greenforge.exactlin import Subspace
from greenforge.green import (build_green, build_ideal_I, build_ideal_J, ideal_witness, idempotent_columns,
                              lemma_llx_check, quotient_algebra)
from greenforge.phiorbit import OrbitCategory
from greenforge.tilt import fingerprint

P = 101


def test_phi0_is_plain_endomorphism_algebra(hcat):
    g = build_green(OrbitCategory(hcat, (0,), 1), ["X", "A"])
    end = endomorphism_algebra(hcat, [("X", 0), ("A", 0)])
    assert g.block_dims() == {(0, 0): end.dim}
    assert idempotent_columns(g) == {0: end.dim}
    assert fingerprint(g.algebra) == fingerprint(end)


def test_stalk_example(hcat):
    g = build_green(OrbitCategory(hcat, (0, 1), 1), ["A"])
    assert g.block_dims() == {(0, 0): 4, (1, 0): 0, (1, 1): 4}
    assert g.dim == 8
    assert idempotent_columns(g) == {0: 4, 1: 4}


@pytest.mark.parametrize("phi,d", [((0, 1), 1), ((0, 1), 2), ((0, 2), 1), ((-1, 0), 1), ((0, 1, 2), 1)])
def test_green_structure(hcat, phi, d):
    g = build_green(OrbitCategory(hcat, phi, d), ["X", "A", "SA"])
    alg = g.algebra
    # block support: tokens only where l - t lies in phi
    assert all(l - t in g.phi for l, t, *_ in g.block_index)
    assert sum(idempotent_columns(g).values()) == g.dim
    units = alg.units
    for a, b in product(range(len(units)), repeat=2):
        prod = alg.multiply(units[a], units[b])
        assert np.array_equal(prod, units[a] if a == b else np.zeros(alg.dim, dtype=np.int64))
    assert np.array_equal(np.mod(units.sum(axis=0), P), alg.one)


def test_truncated_products_vanish(hcat):
    # two degree-one tokens would compose into degree 2, which is outside Phi = {0, 1}
    g = build_green(OrbitCategory(hcat, (0, 1), 1), ["X", "A"])
    ones = [k for k, (l, t, *_r) in enumerate(g.block_index) if l - t == 1]
    assert ones
    mult = g.algebra.mult
    assert not any(np.any(mult[a, b]) for a in ones for b in ones)


def test_llx(hcat):
    g = build_green(OrbitCategory(hcat, (0, 1), 1), ["X", "A", "SA"])
    for x1, x2 in product(["X", "A", "SA"], repeat=2):
        for i, j in product((0, 1), repeat=2):
            out = lemma_llx_check(g, x1, x2, i, j)
            assert out["holds"], (x1, x2, i, j, out)
            if i - j not in g.phi:
                assert out["module_hom_dim"] == out["expected_dim"] == 0


@pytest.mark.parametrize("phi,d", [((0,), 1), ((0, 1), 2), ((0, 1), 1)])
def test_ideals_closed_and_quotient_dims(hcat, plain_ctx, phi, d):
    orbit = OrbitCategory(hcat, phi, d)
    gu = build_green(orbit, ("X",) + M_NAMES)
    gv = build_green(orbit, ("Y",) + M_NAMES)
    I, J = build_ideal_I(gu, plain_ctx), build_ideal_J(gv, plain_ctx)
    assert ideal_witness(gu.algebra, I.space) is None
    assert ideal_witness(gv.algebra, J.space) is None
    assert I.dim == len(phi) and J.dim == len(phi)
    qu = quotient_algebra(gu.algebra, I)
    assert qu.dim == gu.dim - I.dim
    assert qu.check_associative() is None and qu.check_unit()


def test_ideals_need_plain_context(hcat):
    orbit = OrbitCategory(hcat, (0, 1), 2)
    g = build_green(orbit, ("X",) + M_NAMES)
    with pytest.raises(ValueError):
        build_ideal_I(g, ApproxContext(orbit, M_NAMES))
