# SPDX-License-Identifier: LGPL-3.0-or-later
import numpy as np
import pytest

from curvedg.core.exceptions import ConfigError, NumericsError
from curvedg.euler import (
    BoundaryKind,
    FallbackCounter,
    boundary_state,
    hllc_flux,
    llf_flux,
    normal_flux,
    pressure,
    primitive_to_conserved,
    riemann_solver,
)
from fixtures.flow import GAS, random_normals, random_states
from fixtures.sampling import random_rotation

SOLVERS = [llf_flux, hllc_flux]


def _rel(a, b):
    return np.abs(a - b).max() / max(1.0, np.abs(b).max())


@pytest.mark.parametrize("solver", SOLVERS)
def test_consistency(solver):
    U = random_states(1000, seed=1)
    n = random_normals(1000, seed=2)
    assert _rel(solver(U, U, n, GAS), normal_flux(U, n, GAS)) < 1e-12


@pytest.mark.parametrize("solver", SOLVERS)
def test_conservation_antisymmetry(solver):
    UL = random_states(1000, seed=3)
    UR = random_states(1000, seed=4)
    n = random_normals(1000, seed=5)
    total = solver(UL, UR, n, GAS) + solver(UR, UL, -n, GAS)
    assert np.abs(total).max() < 1e-12 * max(1.0, np.abs(solver(UL, UR, n, GAS)).max())


@pytest.mark.parametrize("solver", SOLVERS)
def test_rotational_invariance(solver):
    UL = random_states(1000, seed=6)
    UR = random_states(1000, seed=7)
    n = random_normals(1000, seed=8)
    R = random_rotation(seed=9)

    def rotate(U):
        out = U.copy()
        out[:, 1:4] = U[:, 1:4] @ R.T
        return out

    F = solver(UL, UR, n, GAS)
    Fr = solver(rotate(UL), rotate(UR), n @ R.T, GAS)
    expected = rotate(F)
    assert _rel(Fr, expected) < 1e-10


def test_llf_against_scalar_implementation():
    UL = primitive_to_conserved(1.0, (0.0, 0.0, 0.0), 1.0, GAS)
    UR = primitive_to_conserved(0.125, (0.0, 0.0, 0.0), 0.1, GAS)
    n = np.array([1.0, 0.0, 0.0])
    cl = np.sqrt(1.4 * 1.0 / 1.0)
    cr = np.sqrt(1.4 * 0.1 / 0.125)
    lam = max(cl, cr)
    fl = np.array([0.0, 1.0, 0.0, 0.0, 0.0])
    fr = np.array([0.0, 0.1, 0.0, 0.0, 0.0])
    expected = 0.5 * (fl + fr) - 0.5 * lam * (UR - UL)
    assert np.abs(llf_flux(UL, UR, n, GAS) - expected).max() < 1e-14


@pytest.mark.parametrize("direction", [1.0, -1.0])
def test_hllc_resolves_isolated_contact(direction):
    n = random_normals(1, seed=10)[0]
    v = 0.3 * direction * n + np.cross(n, [0.2, 0.1, 0.4])
    UL = primitive_to_conserved(1.0, v, 0.8, GAS)
    UR = primitive_to_conserved(0.4, v, 0.8, GAS)
    upwind = UL if direction > 0 else UR
    assert np.abs(hllc_flux(UL, UR, n, GAS) - normal_flux(upwind, n, GAS)).max() < 1e-12


def test_hllc_supersonic_left_moving():
    n = np.array([1.0, 0.0, 0.0])
    UL = primitive_to_conserved(1.0, (-3.0, 0.1, 0.0), 1.0, GAS)
    UR = primitive_to_conserved(0.9, (-3.2, 0.0, 0.1), 1.1, GAS)
    assert np.abs(hllc_flux(UL, UR, n, GAS) - normal_flux(UR, n, GAS)).max() < 1e-13


def test_hllc_fallback_is_counted():
    counter = FallbackCounter()
    U = random_states(4, seed=12)
    n = random_normals(4, seed=13)
    hllc_flux(U, U, n, GAS, counter=counter)
    assert counter.take() == 0
    counter.add(3)
    assert counter.count == 3
    assert counter.take() == 3
    assert counter.count == 0


def test_inadmissible_input_raises():
    bad = np.array([1.0, 0.0, 0.0, 0.0, -1.0])
    good = np.array([1.0, 0.0, 0.0, 0.0, 2.5])
    for solver in SOLVERS:
        with pytest.raises(NumericsError):
            solver(bad, good, np.array([1.0, 0.0, 0.0]), GAS)


def test_solver_lookup():
    assert riemann_solver("HLLC") is hllc_flux
    with pytest.raises(ConfigError):
        riemann_solver("roe")


def test_wall_ghost_with_tangential_flow_is_interior():
    n = np.array([0.0, 0.0, 1.0])
    U = primitive_to_conserved(1.0, (0.5, -0.2, 0.0), 1.0, GAS)
    assert np.array_equal(boundary_state(U, n, "slip_wall"), U)


@pytest.mark.parametrize("solver", SOLVERS)
def test_wall_with_normal_flow_has_no_mass_flux(solver):
    n = random_normals(50, seed=14)
    U = primitive_to_conserved(np.ones(50), n, np.ones(50), GAS)
    ghost = boundary_state(U, n, BoundaryKind.SLIP_WALL)
    assert np.allclose(ghost[:, 1:4] / ghost[:, :1], -n, atol=1e-15)
    F = solver(U, ghost, n, GAS)
    assert np.abs(F[:, 0]).max() < 1e-12
    assert np.allclose(pressure(ghost, GAS), pressure(U, GAS), atol=1e-14)


def test_farfield_and_symmetry_ghosts():
    Uinf = primitive_to_conserved(1.0, (0.4, 0.0, 0.0), 1.0, GAS)
    U = random_states(5, seed=15)
    n = random_normals(5, seed=16)
    assert np.array_equal(boundary_state(U, n, "farfield", Uinf), np.tile(Uinf, (5, 1)))
    assert np.array_equal(boundary_state(U, n, "symmetry"), boundary_state(U, n, "slip_wall"))
    with pytest.raises(ConfigError):
        boundary_state(U, n, "inflow")
