import numpy as np
import pytest

from barolab import EquationOfState, Regularizer


@pytest.fixture
def sw_eos():
    """Shallow water with g = 1: gamma = 2, p_bar = 1/2, unit reference density."""
    return EquationOfState.shallow_water(1.0)


@pytest.fixture
def iso_eos():
    return EquationOfState.isothermal(1.0, 1.0)


@pytest.fixture
def cubic_reg():
    return Regularizer.cubic(0.1)


def observed_order(errors, factor=2.0):
    """Mean convergence order from errors on successively refined grids."""
    errors = np.asarray(errors, dtype=float)
    return float(np.mean(np.log(errors[:-1] / errors[1:]) / np.log(factor)))
