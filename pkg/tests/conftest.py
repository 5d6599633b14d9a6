"""
Shared fixtures for the kappa-psi test suite.
"""
import pytest

from src.models.schemas import VerifyBounds
from src.services.correlator import CorrelatorService
from src.services.verify import SMALL_BOUNDS
from src.services.virasoro import VariableLayout


@pytest.fixture
def service():
    """A correlator service with empty caches."""
    return CorrelatorService()


@pytest.fixture
def small_bounds() -> VerifyBounds:
    return SMALL_BOUNDS


@pytest.fixture
def small_layout(small_bounds) -> VariableLayout:
    return VariableLayout(small_bounds)


@pytest.fixture
def tiny_layout() -> VariableLayout:
    return VariableLayout(VerifyBounds(max_t=3, max_s=2, max_degree=4))
