# SPDX-License-Identifier: LGPL-3.0-or-later
from __future__ import annotations

import argparse
import copy
import logging
from pathlib import Path
from typing import Any, Callable, Dict, Optional

import numpy as np

from ..bench.layout_bench import KERNELS, BenchConfig, default_threads, run_layout_bench, write_bench_report
from ..config.case_config import CaseConfig
from ..core.exceptions import ConfigError, CurvingError
from ..core.logger import Log
from ..core.utils import U
from ..core.validation_suite import ValidationSuite
from ..curving.curved_mesh import CurvedMesh, check_curved_jacobians, curve_mesh
from ..curving.elasticity import DisplacementMap, solve_elasticity
from ..curving.nurbs import read_nurbs
from ..curving.projection import boundary_displacements, sphere_displacement
from ..curving.sidecar import read_sidecar, write_sidecar
from ..export.state_file import SolutionState, read_state, write_state
from ..export.vtk_writer import write_vtk
from ..mesh.gmsh_io import read_gmsh
from ..mesh.mesh import Mesh
from ..mesh.structured import sphere_shell
from ..mesh.submesh import SubMesh, extract_submesh
from ..operators.element_operators import build_mesh_operators, divergence_residuals
from ..refelem.reference_element import reference_element
from ..solver.rhs import boundary_summary
from ..solver.steady import run_steady, write_convergence_log

SURFACE_TOL = 1e-6
DIVERGENCE_TOL = 1e-8

# CLI dest -> output section key
_OUTPUT_OVERRIDES = {
    "sidecar_path": "sidecar",
    "state_path": "state",
    "vtk_path": "vtk",
    "bench_report": "bench",
}
# CLI dest -> bench section key
_BENCH_OVERRIDES = {
    "bench_degree": "degree",
    "bench_elements": "elements",
    "bench_repetitions": "repetitions",
    "bench_threads": "threads",
}


class Orchestrator:
    """
    Subcommand driver.
    - curve:  sub-mesh -> boundary displacement -> elasticity -> curved sidecar + quality gate
    - solve:  freestream start -> p-schedule pseudo-time march -> state + convergence log
    - export: state + (curved) mesh -> legacy VTK
    - bench:  padded vs unpadded kernel timings -> CSV
    """

    def __init__(self, logger: logging.Logger, args: argparse.Namespace, conf: Optional[Dict[str, Any]] = None):
        self.logger = logger
        self.args = args
        self.conf: Dict[str, Any] = dict(conf or {})
        self._case: Optional[CaseConfig] = None
        Log.trace(
            self.logger,
            "🧠 Orchestrator init: command=%r threads=%r",
            getattr(args, "command", None),
            getattr(args, "threads", None),
        )

    # ------------------------------------------------------------------
    # Case assembly
    # ------------------------------------------------------------------

    def case_dict(self) -> Dict[str, Any]:
        """Merged case file with the CLI path/knob overrides folded in."""
        d = copy.deepcopy(self.conf)
        a = self.args

        if getattr(a, "mesh_path", None):
            d["mesh"] = {"path": a.mesh_path}
        if getattr(a, "straight", False):
            d.pop("curved_mesh", None)
        elif getattr(a, "curved_mesh_path", None):
            d["curved_mesh"] = a.curved_mesh_path

        output = dict(d.get("output") or {})
        if getattr(a, "output_dir", None):
            output["directory"] = a.output_dir
        for dest, key in _OUTPUT_OVERRIDES.items():
            if getattr(a, dest, None):
                output[key] = getattr(a, dest)
        if output:
            d["output"] = output

        bench = dict(d.get("bench") or {})
        for dest, key in _BENCH_OVERRIDES.items():
            if getattr(a, dest, None) is not None:
                bench[key] = getattr(a, dest)
        if bench:
            d["bench"] = bench
        return d

    def case(self) -> CaseConfig:
        if self._case is None:
            self._case = CaseConfig.from_dict(self.case_dict(), logger=self.logger)
            Log.trace(self.logger, "📄 case:\n%s", self._case.to_json())
        return self._case

    @property
    def threads(self) -> int:
        return int(getattr(self.args, "threads", 1) or 1)

    @property
    def show_progress(self) -> bool:
        return bool(getattr(self.args, "progress", False))

    def load_mesh(self, case: CaseConfig) -> Mesh:
        section = case.mesh
        if section.builtin is not None:
            b = section.builtin
            Log.step(self.logger, f"Building {'octant ' if b.octant else ''}sphere shell (n={b.n}, r={b.radius}, outer={b.outer})")
            mesh = sphere_shell(b.n, b.radius, b.outer, octant=b.octant, logger=self.logger)
        elif section.path is not None:
            Log.step(self.logger, f"Reading mesh {section.path}")
            mesh = read_gmsh(Path(section.path).expanduser(), logger=self.logger)
        else:
            raise ConfigError(msg="the case file defines no mesh (`mesh.path` or `mesh.builtin`)")
        Log.kv(self.logger, "Mesh", {"elements": mesh.n_elements, "vertices": mesh.n_vertices, "tags": ",".join(mesh.tags)})
        return mesh

    def load_curved(self, case: CaseConfig, mesh: Mesh, degree: int) -> CurvedMesh:
        if case.curved_mesh is None:
            Log.warn(self.logger, "No curved_mesh given: using straight elements")
            return CurvedMesh.straight(mesh, degree)
        Log.step(self.logger, f"Reading curved-mesh sidecar {case.curved_mesh}")
        curved = read_sidecar(Path(case.curved_mesh).expanduser(), mesh)
        self.logger.info("Sidecar: p=%d, %d curved elements", curved.degree, curved.n_curved)
        return curved

    def surface_target(self, case: CaseConfig) -> DisplacementMap:
        target = case.curving.target
        if target.kind == "sphere":
            self.logger.info("Curving target: sphere center=%s radius=%g", list(target.center), target.radius)
            return lambda x: sphere_displacement(target.center, target.radius, x)
        Log.step(self.logger, f"Reading NURBS target {target.path}")
        surfaces = read_nurbs(Path(str(target.path)).expanduser())
        self.logger.info("Curving target: %d NURBS patches", len(surfaces))
        return lambda x: boundary_displacements(surfaces, x, logger=self.logger)

    # ------------------------------------------------------------------
    # Subcommands
    # ------------------------------------------------------------------

    def cmd_curve(self) -> int:
        case = self.case()
        mesh = self.load_mesh(case)
        case.check_mesh(mesh, need_curving=True)
        cv = case.curving
        degree = int(getattr(self.args, "curve_degree", None) or case.curving_degree())

        lo, hi = cv.box()
        Log.step(self.logger, f"Extracting sub-mesh in box {list(lo)} .. {list(hi)}")
        sub = extract_submesh(mesh, lo, hi, cv.surface_tag, cv.symmetry_tags, logger=self.logger)
        Log.kv(
            self.logger,
            "Sub-mesh",
            {"elements": sub.n_elements, "surface_faces": len(sub.faces_d1), "clamped_faces": len(sub.faces_d2), "slip_faces": len(sub.faces_n)},
        )

        target = self.surface_target(case)
        Log.step(self.logger, f"Solving linear elasticity (p={cv.fem_degree})")
        field = solve_elasticity(sub, cv.material(), target, cv.fem_degree, threads=self.threads, logger=self.logger)
        field_path = case.output.path("field")
        field.save(field_path)
        self.logger.info("Deformation field: %s", field_path)

        Log.step(self.logger, f"Curving {sub.n_elements} elements at p={degree}")
        curved = curve_mesh(mesh, field, degree, check=False, logger=self.logger)

        report = self.curving_checks(case, sub, curved, target)
        validation_path = case.output.path("validation")
        U.atomic_write_text(validation_path, U.json_dump(report))
        if report["failed_critical"]:
            failed = sorted(k for k, v in report["results"].items() if not v.get("passed") and not v.get("skipped"))
            raise CurvingError(
                msg=f"curved mesh failed its quality gate: {failed}",
                context={"validation": str(validation_path), "errors": {k: report["results"][k].get("error") for k in failed}},
            )

        sidecar_path = case.output.path("sidecar")
        write_sidecar(curved, sidecar_path)
        Log.ok(self.logger, f"Curved mesh written: {sidecar_path} ({curved.n_curved} curved elements)")
        if case.curved_mesh is not None and Path(case.curved_mesh).expanduser().resolve() != sidecar_path.expanduser().resolve():
            Log.warn(self.logger, f"curved_mesh ({case.curved_mesh}) differs from the sidecar just written ({sidecar_path})")
        return 0

    def curving_checks(
        self,
        case: CaseConfig,
        sub: SubMesh,
        curved: CurvedMesh,
        target: Callable[[np.ndarray], np.ndarray],
    ) -> Dict[str, Any]:
        """Positive Jacobians (critical), surface fit, and divergence of constants on the curved elements."""
        ref = reference_element(curved.degree)
        scale = case.curving.target.radius if case.curving.target.kind == "sphere" else 1.0

        def jacobians(ctx: Dict[str, Any]) -> Dict[str, Any]:
            try:
                jmin = check_curved_jacobians(curved, logger=self.logger)
            except CurvingError as e:
                raise CurvingError(msg=e.user_message(include_context=True), context=e.context) from e
            worst = min(jmin, key=jmin.get) if jmin else None
            return {"min_jacobian": jmin[worst] if jmin else None, "element": worst}

        def surface_fit(ctx: Dict[str, Any]) -> Dict[str, Any]:
            pts = np.concatenate(
                [curved.element_nodes(int(sub.elements[e]))[ref.colloc_face_ids[f]] for e, f in sub.faces_d1.tolist()]
            )
            dev = float(np.linalg.norm(target(pts), axis=1).max()) if len(pts) else 0.0
            if dev > SURFACE_TOL * scale:
                raise CurvingError(msg=f"surface nodes deviate by {dev:.3e} from the target (tolerance {SURFACE_TOL * scale:.1e})")
            return {"max_deviation": dev, "nodes": int(len(pts))}

        def divergence(ctx: Dict[str, Any]) -> Dict[str, Any]:
            if not curved.n_curved:
                return {"max_residual": 0.0}
            nodes = np.stack(list(curved.curved.values()))
            res = divergence_residuals(build_mesh_operators(nodes, ref, threads=self.threads, logger=self.logger))
            worst = float(res.max())
            if worst > DIVERGENCE_TOL:
                raise CurvingError(msg=f"discrete divergence of constants is {worst:.3e} (tolerance {DIVERGENCE_TOL:.0e})")
            return {"max_residual": worst}

        suite = ValidationSuite(self.logger, show_progress=self.show_progress)
        suite.add_check("positive_jacobian", jacobians, critical=True, description="Curved Jacobians > 0", tags=["geometry"])
        suite.add_check("surface_fit", surface_fit, description="Surface nodes on target", tags=["geometry"])
        suite.add_check("divergence", divergence, description="Free-stream divergence", tags=["operators"])
        return suite.run_all({}, stop_on_critical=True)

    def cmd_solve(self) -> int:
        case = self.case()
        mesh = self.load_mesh(case)
        case.check_mesh(mesh)
        Log.kv(self.logger, "Boundary faces", boundary_summary(mesh, case.boundary_conditions()))
        curved = self.load_curved(case, mesh, case.run.final_degree)

        fs = case.freestream
        Log.kv(
            self.logger,
            "Case",
            {
                "mach": fs.mach,
                "alpha": fs.alpha,
                "gamma": case.gas.gamma,
                "riemann": case.riemann,
                "viscosity": case.viscosity.eps0 if case.viscosity.active else "off",
                "p_schedule": list(case.run.p_schedule),
            },
        )

        config = case.run_config(threads=self.threads, deterministic=bool(getattr(self.args, "deterministic", False)))
        result = run_steady(
            config,
            mesh,
            curved,
            case.gas,
            case.boundary_conditions(),
            progress=self.show_progress,
            logger=self.logger,
        )

        state_path = case.output.path("state")
        write_state(
            SolutionState(
                degree=result.degree,
                values=result.values,
                eps=result.eps,
                gamma=case.gas.gamma,
                mesh_checksum=mesh.checksum(),
            ),
            state_path,
        )
        log_path = write_convergence_log(result.levels, case.output.path("log"))
        Log.kv(
            self.logger,
            "Run",
            {"converged": result.converged, "rhs_evaluations": result.rhs_evaluations, "cost": f"{result.cost:.4e}"},
        )
        if not result.converged:
            Log.warn(self.logger, "Final level stopped at its iteration cap before reaching the tolerance")
        Log.ok(self.logger, f"State: {state_path}  log: {log_path}")
        return 0

    def cmd_export(self) -> int:
        case = self.case()
        mesh = self.load_mesh(case)
        state_path = case.output.path("state")
        Log.step(self.logger, f"Reading state {state_path}")
        state = read_state(state_path, mesh)
        curved = self.load_curved(case, mesh, state.degree).nodes_at_degree(state.degree)
        write_vtk(
            case.output.path("vtk"),
            curved.all_nodes(),
            state.values,
            state.eps,
            state.degree,
            state.gas,
            title=f"curvedg p={state.degree} K={state.n_elements}",
            logger=self.logger,
        )
        return 0

    def cmd_bench(self) -> int:
        case = self.case()
        b = case.bench
        config = BenchConfig(
            degree=b.degree,
            elements=b.elements,
            repetitions=b.repetitions,
            threads=b.threads if b.threads is not None else default_threads(),
            chunk=case.run.chunk,
        )
        report = run_layout_bench(config, gas=case.gas, progress=self.show_progress, logger=self.logger)
        path = write_bench_report(report.rows, case.output.path("bench"))
        if report.rows and len(config.threads) > 1:
            Log.kv(self.logger, "Speedup (padded)", {k: f"{report.speedup(k):.2f}" for k in KERNELS})
        Log.ok(self.logger, f"Bench report: {path} ({len(report.rows)} rows, layouts identical={report.layouts_identical})")
        return 0

    # ------------------------------------------------------------------
    # Entry
    # ------------------------------------------------------------------

    def run(self) -> int:
        command = getattr(self.args, "command", None) or self.conf.get("command")
        handlers: Dict[str, Callable[[], int]] = {
            "curve": self.cmd_curve,
            "solve": self.cmd_solve,
            "export": self.cmd_export,
            "bench": self.cmd_bench,
        }
        if command not in handlers:
            raise ConfigError(msg=f"unknown command {command!r}", context={"choices": sorted(handlers)})

        U.banner(self.logger, f"Mode: {command}")
        t0 = U.timer()
        rc = handlers[command]()
        U.banner(self.logger, "Done")
        self.logger.info("⏱️  %s finished in %.1fs", command, U.timer() - t0)
        return rc
