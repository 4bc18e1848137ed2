"""Pytest configuration and fixtures."""

import pytest
import sys
from pathlib import Path
from unittest.mock import patch

# Add repository root to path
sys.path.insert(0, str(Path(__file__).parent.parent.parent))


R_OPERATING = 0.2


@pytest.fixture(autouse=True)
def fresh_cache():
    """Start every test with an empty memo cache."""
    from evps.core.cache import reset_cache

    reset_cache()
    yield
    reset_cache()


@pytest.fixture
def settings_override():
    """Patch individual Settings fields for one test."""
    from evps.core.config import get_settings

    settings = get_settings()
    patches = []

    def apply(**fields):
        for name, value in fields.items():
            p = patch.object(settings, name, value)
            p.start()
            patches.append(p)
        return settings

    yield apply
    for p in reversed(patches):
        p.stop()


@pytest.fixture
def bell_state():
    """(|00> + |11>)/sqrt(2) at cutoff 2."""
    import numpy as np
    from evps.quantum.fock import FockSpace, QuantumState

    space = FockSpace(2, 2)
    vec = np.zeros(4, dtype=complex)
    vec[0] = vec[3] = 1.0
    return QuantumState.from_vector(space, vec)


@pytest.fixture
def ghz4():
    """N = 4 at the canonical operating point, single source."""
    from evps.schemas import GhzParams

    return GhzParams(N=4, r=R_OPERATING, k=0.0)

