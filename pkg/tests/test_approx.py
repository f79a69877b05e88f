from itertools import product

import numpy as np
import pytest

from greenforge.approx import (ApproxContext, HypothesesFailed, Approximation, check_vanishing_hypotheses,
                               coghost_ideal, coghost_via_approximation, factor_subspace, family_closed, fcogh,
                               fgh, ghost_ideal, ghost_via_approximation, ideal_family, is_left_approx,
                               is_right_approx, left_approximation, lemma51_oracle, lemma_fg_check,
                               right_approximation)
from greenforge.catcore import left_action
from greenforge.corpus import M_NAMES
from greenforge.exactlin import Subspace
from greenforge.phiorbit import OrbitCategory
from greenforge.quivalg import check_self_injective
from greenforge.tilt import build_triangle_from_approx

from conftest import CORPUS

P = 101
PAIRS = list(product(CORPUS, repeat=2))


def test_approximation_of_m_summand_is_split(plain_ctx):
    for m in M_NAMES:
        g = right_approximation(plain_ctx, m)
        assert is_right_approx(plain_ctx, g.summands, m, g.vector)
        f = left_approximation(plain_ctx, m)
        assert is_left_approx(plain_ctx, f.summands, m, f.vector)


def test_zero_hom_gives_empty_approximation(hcat):
    ctx = ApproxContext(OrbitCategory(hcat, (0,), 1), ("SA",))
    # nothing maps from A shifted into degree 1 to the stalk A in degree 0
    g = right_approximation(ctx, "A")
    assert g.summands == () and is_right_approx(ctx, (), "A", g.vector)


def test_minimal_approximations_of_corpus(plain_ctx):
    for x in ("X", "Y"):
        assert right_approximation(plain_ctx, x, minimal=True).summands == ("A", "SA")
        assert left_approximation(plain_ctx, x, minimal=True).summands == ("A", "SA")


def test_triangle_map_is_an_approximation(hcat, plain_ctx):
    tri = build_triangle_from_approx(hcat, M_NAMES, "X", name="cocone_test")
    assert is_right_approx(plain_ctx, tri.g.summands, "X", tri.g.vector)


def test_non_approximation_detected(plain_ctx):
    g = right_approximation(plain_ctx, "X")
    assert not is_right_approx(plain_ctx, g.summands, "X", np.zeros_like(g.vector))


def test_definitional_and_kernel_routes_agree(plain_ctx):
    for x, y in PAIRS:
        assert ghost_ideal(plain_ctx, x, y) == ghost_via_approximation(plain_ctx, x, y)
        assert coghost_ideal(plain_ctx, x, y) == coghost_via_approximation(plain_ctx, x, y)


def test_ghosts_vanish_on_m(plain_ctx):
    for m, y in product(M_NAMES, CORPUS):
        assert ghost_ideal(plain_ctx, m, y).dim == 0
        assert coghost_ideal(plain_ctx, y, m).dim == 0
        assert fcogh(plain_ctx, m, y) == coghost_ideal(plain_ctx, m, y)
        assert fgh(plain_ctx, y, m) == ghost_ideal(plain_ctx, y, m)


def test_ghost_equals_coghost_on_corpus(plain_ctx):
    for x, y in PAIRS:
        assert ghost_ideal(plain_ctx, x, y) == coghost_ideal(plain_ctx, x, y)
        assert fgh(plain_ctx, x, y) == fcogh(plain_ctx, x, y)


def test_ghost_dims_golden(plain_ctx):
    dims = {(x, y): ghost_ideal(plain_ctx, x, y).dim for x, y in PAIRS}
    ones = {("X", "X"), ("X", "Y"), ("Y", "X"), ("Y", "Y")}
    assert dims == {k: int(k in ones) for k in PAIRS}


def test_factor_space_examples(plain_ctx):
    cat = plain_ctx.category
    for x, m in product(CORPUS, M_NAMES):
        assert factor_subspace(plain_ctx, x, m) == Subspace.full(cat.hom_dim(x, m))


def test_factor_space_through_left_approximation(plain_ctx):
    # a map factors through add(M) exactly when it factors through a left approximation
    cat = plain_ctx.category
    for x, y in PAIRS:
        f = left_approximation(plain_ctx, x)
        n = cat.hom_dim(x, y)
        if not f.summands:
            assert factor_subspace(plain_ctx, x, y).dim == 0
            continue
        mat = left_action(cat, f.vector, (x,), f.summands, (y,))
        assert factor_subspace(plain_ctx, x, y) == Subspace.span(mat, n, P)


def test_factor_space_zero_without_maps_to_m(hcat):
    ctx = ApproxContext(OrbitCategory(hcat, (0,), 1), ("SA",))
    assert factor_subspace(ctx, "A", "A").dim == 0


def test_cohomology_description_both_routes(hcat, plain_ctx):
    assert check_self_injective(hcat.base.alg).self_injective
    for x, y in PAIRS:
        linear = lemma51_oracle(hcat, x, y, 1)
        module = lemma51_oracle(hcat, x, y, 1, module=True)
        assert linear == module == ghost_ideal(plain_ctx, x, y)


def test_cohomology_description_identity_and_zero(hcat):
    ghosts = lemma51_oracle(hcat, "X", "X", 1)
    assert not ghosts.contains(hcat.identity("X"), P)
    assert ghosts.contains(np.zeros(hcat.hom_dim("X", "X"), dtype=np.int64), P)


@pytest.mark.parametrize("kind", ["gh", "cogh", "fgh", "fcogh", "factor"])
def test_ideal_families_closed(plain_ctx, kind):
    fam = ideal_family(plain_ctx, CORPUS, kind)
    assert family_closed(plain_ctx, fam, CORPUS) is None


def test_vanishing_phi0_vacuous(plain_ctx):
    assert check_vanishing_hypotheses(plain_ctx, "X", "Y").holds


def test_vanishing_witness(hcat):
    ctx = ApproxContext(OrbitCategory(hcat, (0, 1), 1), M_NAMES)
    rep = check_vanishing_hypotheses(ctx, "Y", "X")
    assert not rep.holds
    assert {"hom": "M->F^i X", "i": 1, "dim": 2} in rep.witnesses
    ok = check_vanishing_hypotheses(ApproxContext(OrbitCategory(hcat, (0, 1), 2), M_NAMES), "Y", "X")
    assert ok.holds and ok.hom_m_to_x == {1: 0}


def test_gate_raises_with_witnesses(hcat):
    tri = build_triangle_from_approx(hcat, M_NAMES, "X", name="cocone_gate")
    ctx = ApproxContext(OrbitCategory(hcat, (0, 1), 1), M_NAMES)
    with pytest.raises(HypothesesFailed) as err:
        lemma_fg_check(ctx, tri.x, tri.y, tri.f, tri.g)
    assert "vanishing" in err.value.witnesses


def test_gate_rejects_non_approximation(hcat, plain_ctx):
    tri = build_triangle_from_approx(hcat, M_NAMES, "X", name="cocone_zero")
    g = Approximation(tri.g.summands, tri.g.target, np.zeros_like(tri.g.vector), "right")
    with pytest.raises(HypothesesFailed) as err:
        lemma_fg_check(plain_ctx, tri.x, tri.y, tri.f, g)
    assert err.value.witnesses.get("right_approximation") is False


def test_gate_passes_phi0(hcat, plain_ctx):
    tri = build_triangle_from_approx(hcat, M_NAMES, "X", name="cocone_ok")
    out = lemma_fg_check(plain_ctx, tri.x, tri.y, tri.f, tri.g)
    assert out["fgh_equal"] and out["fcogh_equal"]
