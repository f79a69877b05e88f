import pytest

from greenforge.approx import ApproxContext
from greenforge.corpus import M_NAMES, corpus_homotopy
from greenforge.phiorbit import OrbitCategory
from greenforge.quivalg import build_algebra
from greenforge.corpus import two_loop_spec

CORPUS = ("X", "Y", "A", "SA")


@pytest.fixture(scope="session")
def two_loop():
    return build_algebra(two_loop_spec(2, 2), 101)


@pytest.fixture(scope="session")
def hcat():
    return corpus_homotopy(2, 2, 101, shifts=range(-3, 4))


@pytest.fixture(scope="session")
def plain_ctx(hcat):
    return ApproxContext(OrbitCategory(hcat, (0,), 1), M_NAMES)
