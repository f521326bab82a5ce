# SPDX-License-Identifier: LGPL-3.0-or-later
import os
from functools import lru_cache

import numpy as np
import pytest

from curvedg.curving import CurvedMesh, ElasticMaterial, curve_mesh, solve_elasticity, sphere_displacement
from curvedg.euler import freestream_state
from curvedg.euler.state import RHO
from curvedg.mesh import extract_submesh
from curvedg.refelem import reference_element
from curvedg.solver import BoundaryConditions, RunConfig, run_steady
from fixtures.flow import GAS
from fixtures.meshes import full_shell

MACH = 0.38
FREESTREAM = freestream_state(MACH, 0.0, 1.0, 1.0, GAS)
THREADS = os.cpu_count() or 1


def _bc():
    return BoundaryConditions({"sphere": "slip_wall", "farfield": "farfield"}, FREESTREAM)


@lru_cache(maxsize=None)
def _curved_sphere(n: int, degree: int):
    mesh = full_shell(n)
    sub = extract_submesh(mesh, (-1.6,) * 3, (1.6,) * 3, "sphere")
    field = solve_elasticity(sub, ElasticMaterial(1.0, 0.3), lambda x: sphere_displacement((0, 0, 0), 1.0, x), 2)
    return mesh, curve_mesh(mesh, field, degree)


def _surface_density(mesh, values, degree):
    ref = reference_element(degree)
    nodes = CurvedMesh.straight(mesh, degree)
    xs, rho = [], []
    for bf in mesh.faces_with_tag("sphere"):
        ids = ref.colloc_face_ids[bf.face]
        xs.append(nodes.element_nodes(bf.element)[ids])
        rho.append(values[bf.element, RHO, ids])
    return np.concatenate(xs), np.concatenate(rho)


def test_impulsive_start_residual_decays():
    mesh = full_shell(3)
    cfg = RunConfig(p_schedule=(1,), check_interval=50, max_iterations=(300,), final_tolerance=1e-12, cfl=0.3)
    result = run_steady(cfg, mesh, CurvedMesh.straight(mesh, 1), GAS, _bc())
    history = result.levels[0].history
    assert len(history) == 6
    assert history[-1][1] < history[0][1]
    assert np.all(np.isfinite(result.values))


def test_staged_start_leaves_less_transient_at_highest_degree():
    mesh = full_shell(3)
    curved = CurvedMesh.straight(mesh, 3)
    common = dict(final_tolerance=1e-12, check_interval=50, cfl=0.3)
    staged = run_steady(
        RunConfig(p_schedule=(1, 2, 3), tolerances=(1e-12, 1e-12), max_iterations=(300, 200, 50), **common),
        mesh, curved, GAS, _bc(),
    )
    direct = run_steady(RunConfig(p_schedule=(3,), max_iterations=(50,), **common), mesh, curved, GAS, _bc())
    assert [rec.level for rec in staged.levels] == [1, 2, 3]
    assert staged.levels[-1].iteration == direct.levels[0].iteration == 50
    assert staged.levels[-1].cost == direct.levels[0].cost
    assert staged.levels[-1].residual < direct.levels[0].residual
    assert np.all(np.isfinite(staged.values))


@pytest.mark.slow
def test_subsonic_sphere_converges_with_fore_aft_symmetry():
    mesh, curved = _curved_sphere(9, 3)
    assert 2000 <= mesh.n_elements <= 5000
    cfg = RunConfig(
        p_schedule=(2, 3),
        tolerances=(1e-4,),
        final_tolerance=1e-6,
        check_interval=100,
        max_iterations=(20000, 40000),
        cfl=0.3,
        threads=THREADS,
    )
    result = run_steady(cfg, mesh, curved, GAS, _bc())
    assert result.converged

    residuals = np.array([r for _, r in result.levels[-1].history])
    tail = residuals[len(residuals) // 4 :]
    assert np.all(tail[1:] <= 1.1 * tail[:-1])

    x, rho = _surface_density(mesh, result.values, 3)
    front = rho[x[:, 0] < -0.8].mean()
    back = rho[x[:, 0] > 0.8].mean()
    assert abs(front - back) / FREESTREAM[RHO] < 0.05


@pytest.mark.slow
def test_p_refinement_needs_less_work_than_pure_high_order():
    mesh, curved = _curved_sphere(9, 4)
    common = dict(final_tolerance=1e-6, check_interval=100, cfl=0.3, threads=THREADS)
    staged = run_steady(
        RunConfig(p_schedule=(2, 3, 4), tolerances=(1e-4, 1e-5), max_iterations=(20000, 20000, 100000), **common),
        mesh, curved, GAS, _bc(),
    )
    direct = run_steady(RunConfig(p_schedule=(4,), max_iterations=(100000,), **common), mesh, curved, GAS, _bc())
    assert staged.converged and direct.converged
    assert staged.cost < direct.cost
