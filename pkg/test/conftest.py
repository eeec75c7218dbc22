import os
import logging

import pytest

from crystalspectra.crystal import builtin, PerturbationSpec, BUILTIN_NAMES

test_dir = os.path.dirname(os.path.abspath(__file__))
fix_dir = os.path.join(test_dir, 'fixtures')


def fixture_text(name):
    with open(os.path.join(fix_dir, name)) as f:
        return f.read()


@pytest.fixture(scope="session", params=["a", "", 12.5, -5, 0, True])
def fixNonPositiveInteger(request):
    return request.param

@pytest.fixture(scope="session", params=["1", "3,1", "a,b", "1,2,3", "nan,1"])
def fixBadIntervals(request):
    return request.param

@pytest.fixture(scope="module", params=list(BUILTIN_NAMES))
def fixBuiltin(request):
    """Fixture returning every builtin crystal"""
    return builtin(request.param)

@pytest.fixture(scope="module")
def fixZd1(request):
    return builtin("zd:1")

@pytest.fixture(scope="module")
def fixZd2(request):
    return builtin("zd:2")

@pytest.fixture(scope="module")
def fixHexagonal(request):
    return builtin("hexagonal")

@pytest.fixture(scope="module")
def fixKagome(request):
    return builtin("kagome")

@pytest.fixture(scope="module")
def fixDiamondChain(request):
    return builtin("diamond-chain")

@pytest.fixture(scope="module")
def fixEmptyPerturbation(request):
    return PerturbationSpec()

@pytest.fixture(scope="module")
def fixBump(request):
    """R_s = +3 at cell 0 of zd:1"""
    return PerturbationSpec(potential_short={((0,), 0): 3.0})

@pytest.fixture(scope="module")
def fixWell(request):
    """R_s = -1 at cell 0 of zd:1"""
    return PerturbationSpec(potential_short={((0,), 0): -1.0})

@pytest.fixture(scope="module")
def fixLogger(request):
    return logging.getLogger("crystalspectra.test")
