import numpy as np
import pytest

from lyapspec import sft
from lyapspec.cocycle import OneStepCocycle


@pytest.fixture(scope="session")
def diag_cocycle():
    """Full shift on two symbols with commuting diagonal generators;
    every thermodynamic quantity has a closed form."""
    return OneStepCocycle(
        Q=sft.full_shift(2),
        generators=[np.diag([2.0, 0.5]), np.diag([3.0, 1.0 / 3.0])],
    )


@pytest.fixture(scope="session")
def pos_cocycle():
    """Full shift on two symbols, one diagonal and one positive
    generator; irreducible, typical, quasi-multiplicative."""
    return OneStepCocycle(
        Q=sft.full_shift(2),
        generators=[np.diag([2.0, 1.0]), np.array([[1.0, 1.0], [1.0, 2.0]])],
    )


@pytest.fixture(scope="session")
def golden_mean_Q():
    return sft.validate([[1, 1], [1, 0]])


@pytest.fixture(scope="session")
def golden_identity(golden_mean_Q):
    """Identity generators over the golden-mean shift: pressure at any
    q equals the shift entropy log((1+sqrt 5)/2)."""
    return OneStepCocycle(
        Q=golden_mean_Q, generators=[np.eye(2), np.eye(2)],
    )


@pytest.fixture(scope="session")
def rotation_cocycle():
    """Two rotations: isometries, no domination, complex eigenvalues."""
    def rot(theta):
        ct, st = np.cos(theta), np.sin(theta)
        return np.array([[ct, -st], [st, ct]])

    return OneStepCocycle(
        Q=sft.full_shift(2), generators=[rot(0.7), rot(1.9)],
    )
