# SPDX-License-Identifier: LGPL-3.0-or-later
import numpy as np
import pytest

from curvedg.core.exceptions import ConfigError, NumericsError
from curvedg.curving import CurvedMesh
from curvedg.euler import freestream_state
from curvedg.mesh import structured_box
from curvedg.refelem import reference_element
from curvedg.solver import BoundaryConditions, RunConfig, format_convergence_log, run_steady, write_convergence_log
from fixtures.flow import GAS, perturbed_values

SIDES = ("xmin", "xmax", "ymin", "ymax", "zmin", "zmax")
FREESTREAM = freestream_state(0.3, 0.0, 1.0, 1.0, GAS)


def _box():
    mesh = structured_box(2)
    bc = BoundaryConditions({s: "farfield" for s in SIDES}, FREESTREAM)
    return mesh, CurvedMesh.straight(mesh, 1), bc


def test_free_stream_converges_in_one_check_interval_per_level():
    mesh, curved, bc = _box()
    cfg = RunConfig(p_schedule=(1, 2, 3), check_interval=5, max_iterations=(50,), final_tolerance=1e-9)
    result = run_steady(cfg, mesh, curved, GAS, bc)
    assert [r.level for r in result.levels] == [1, 2, 3]
    assert all(r.iteration == 5 and r.converged for r in result.levels)
    dts = [r.dt for r in result.levels]
    assert dts[0] > dts[1] > dts[2]
    assert result.converged
    assert result.rhs_evaluations == 3 * 5 * 5
    assert result.values.shape == (mesh.n_elements, 5, 20)
    assert np.abs(result.values - FREESTREAM[None, :, None]).max() < 1e-12


def test_single_level_schedule_gives_one_row(tmp_path):
    mesh, curved, bc = _box()
    cfg = RunConfig(p_schedule=(2,), check_interval=2, max_iterations=(4,))
    result = run_steady(cfg, mesh, curved, GAS, bc)
    assert len(result.levels) == 1
    text = format_convergence_log(result.levels)
    lines = text.splitlines()
    assert lines[0] == "level,iteration,dt,residual_inf,wall_seconds"
    assert len(lines) == 2 and lines[1].startswith("2,2,")
    out = write_convergence_log(result.levels, tmp_path / "log" / "conv.csv")
    assert out.read_text() == text


def test_perturbation_decays_through_farfield():
    mesh, curved, bc = _box()
    nodes = curved.all_nodes()
    cfg = RunConfig(p_schedule=(1,), check_interval=50, max_iterations=(400,), final_tolerance=1e-12, riemann="llf")
    result = run_steady(cfg, mesh, curved, GAS, bc, initial=perturbed_values(nodes, seed=1, amplitude=0.05))
    history = result.levels[0].history
    assert len(history) == 8
    assert history[-1][1] < 0.5 * history[0][1]


def test_cost_accounting():
    mesh, curved, bc = _box()
    cfg = RunConfig(p_schedule=(1, 2), check_interval=3, max_iterations=(3,))
    result = run_steady(cfg, mesh, curved, GAS, bc)
    k = mesh.n_elements
    n_cub = [reference_element(p).n_cub for p in (1, 2)]
    assert [r.rhs_evaluations for r in result.levels] == [15, 15]
    assert result.cost == pytest.approx(15 * k * (n_cub[0] + n_cub[1]))


def test_fixed_time_step_and_divergence():
    mesh, curved, bc = _box()
    cfg = RunConfig(p_schedule=(1,), dt=(0.01,), check_interval=2, max_iterations=(2,))
    assert run_steady(cfg, mesh, curved, GAS, bc).levels[0].dt == 0.01
    nodes = curved.all_nodes()
    blowup = RunConfig(p_schedule=(1,), dt=(50.0,), check_interval=1, max_iterations=(20,), riemann="llf")
    with pytest.raises(NumericsError):
        run_steady(blowup, mesh, curved, GAS, bc, initial=perturbed_values(nodes, seed=2, amplitude=0.3))


def test_run_config_validation():
    with pytest.raises(ConfigError):
        RunConfig(p_schedule=(3, 2))
    with pytest.raises(ConfigError):
        RunConfig(p_schedule=(2, 2))
    with pytest.raises(ConfigError):
        RunConfig(cfl=0.0)
    with pytest.raises(ConfigError):
        RunConfig(residual_norm="l1")
    with pytest.raises(ConfigError):
        RunConfig(p_schedule=(2,), dt=(0.1, 0.1))
    cfg = RunConfig(p_schedule=(2, 3, 4), tolerances=(1e-3,))
    assert cfg.tolerance(0) == 1e-3
    assert cfg.tolerance(1) == 1e-4
    assert cfg.tolerance(2) == cfg.final_tolerance


def test_initial_state_shape_checked():
    mesh, curved, bc = _box()
    with pytest.raises(ConfigError):
        run_steady(RunConfig(p_schedule=(1,)), mesh, curved, GAS, bc, initial=np.ones((3, 5, 4)))
