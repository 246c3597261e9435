import numpy as np
import pytest
from hypothesis import settings

from ncphase import DeformationSpec

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

ALL_SPECS = [
    DeformationSpec.commutative(),
    DeformationSpec.canonical(0.3, 0.1, -0.2),
    DeformationSpec.lie1(2.0),
    DeformationSpec.lie2(1.0),
    DeformationSpec.quadratic(1.0),
]


@pytest.fixture(params=ALL_SPECS, ids=lambda s: s.kind.value)
def spec(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
