# SPDX-License-Identifier: LGPL-3.0-or-later
import math

import numpy as np
import pytest

from curvedg.core.exceptions import ConfigError, NumericsError
from curvedg.euler import primitive_to_conserved
from curvedg.mesh import structured_box
from curvedg.solver import compute_timestep
from fixtures.flow import GAS, uniform_values

STATE = primitive_to_conserved(1.0, (0.5, 0.0, 0.0), 1.0, GAS)


def test_uniform_state_matches_hand_formula():
    mesh = structured_box(2)
    h = mesh.inscribed_diameters()
    values = uniform_values(STATE, mesh.n_elements, 10)
    lam = 0.5 + math.sqrt(1.4)
    expected = 0.4 * h.min() / (lam * 9.0)
    assert compute_timestep(values, h, GAS, 2, 0.4) == pytest.approx(expected, rel=1e-14)


def test_degree_scaling():
    h = np.full(6, 0.3)
    dt2 = compute_timestep(uniform_values(STATE, 6, 10), h, GAS, 2, 1.0)
    dt4 = compute_timestep(uniform_values(STATE, 6, 35), h, GAS, 4, 1.0)
    assert dt2 / dt4 == pytest.approx(25.0 / 9.0, rel=1e-13)


def test_viscous_limit_applies():
    h = np.full(4, 0.1)
    values = uniform_values(STATE, 4, 4)
    inviscid = compute_timestep(values, h, GAS, 1, 0.5)
    viscous = compute_timestep(values, h, GAS, 1, 0.5, eps_max=0.3)
    assert viscous == pytest.approx(min(inviscid, 0.5 * 0.01 / (0.3 * 16.0)), rel=1e-14)
    assert viscous < inviscid


def test_invalid_inputs():
    values = uniform_values(STATE, 2, 4)
    with pytest.raises(ConfigError):
        compute_timestep(values, np.ones(2), GAS, 1, 0.0)
    with pytest.raises(NumericsError):
        compute_timestep(values, np.array([1.0, 0.0]), GAS, 1, 0.5)
