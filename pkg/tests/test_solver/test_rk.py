# SPDX-License-Identifier: LGPL-3.0-or-later
import math

import numpy as np
import pytest

from curvedg.core.exceptions import ConfigError
from curvedg.solver import FORWARD_EULER, LSRK54, RKScheme, rk_step


def _integrate(dt, T=2.0):
    y = np.array([1.0])
    for _ in range(int(round(T / dt))):
        y = rk_step(y, lambda u, t: -u, dt)
    return abs(float(y[0]) - math.exp(-T))


def test_fourth_order_convergence():
    dts = [0.2 / 2**i for i in range(6)]
    errors = [_integrate(dt) for dt in dts]
    slopes = [math.log2(errors[i] / errors[i + 1]) for i in range(5)]
    for s in slopes[2:]:
        assert s == pytest.approx(4.0, abs=0.1)
    fit = np.polyfit(np.log(dts), np.log(errors), 1)[0]
    assert fit == pytest.approx(4.0, abs=0.1)


def test_scheme_shape():
    assert LSRK54.stages == 5
    assert LSRK54.a[0] == 0.0
    assert sum(LSRK54.b) != 0.0


def test_zero_rhs_leaves_state_unchanged():
    u = np.random.default_rng(0).standard_normal(17)
    assert np.array_equal(rk_step(u, lambda v, t: np.zeros_like(v), 0.3), u)


def test_single_stage_scheme_is_forward_euler():
    u = np.array([2.0, -1.0])
    out = rk_step(u, lambda v, t: 3.0 * v + t, 0.1, FORWARD_EULER, t=1.0)
    assert np.allclose(out, u + 0.1 * (3.0 * u + 1.0), atol=1e-15)


def test_stage_times():
    seen = []

    def rhs(u, t):
        seen.append(t)
        return np.zeros_like(u)

    rk_step(np.zeros(1), rhs, 0.5, t=2.0)
    assert seen == pytest.approx([2.0 + 0.5 * c for c in LSRK54.c])


def test_input_not_modified_and_bad_dt():
    u = np.ones(3)
    rk_step(u, lambda v, t: v, 0.1)
    assert np.all(u == 1.0)
    with pytest.raises(ConfigError):
        rk_step(u, lambda v, t: v, 0.0)


def test_scheme_validation():
    with pytest.raises(ConfigError):
        RKScheme("bad", (0.5,), (1.0,), (0.0,))
    with pytest.raises(ConfigError):
        RKScheme("bad", (0.0, 1.0), (1.0,), (0.0,))
