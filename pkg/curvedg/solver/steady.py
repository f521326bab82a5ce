# SPDX-License-Identifier: LGPL-3.0-or-later
"""Pseudo-time marching to steady state over a p-refinement schedule."""
from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..core.exceptions import ConfigError, NumericsError
from ..core.utils import U
from ..curving.curved_mesh import CurvedMesh
from ..euler.state import GasModel
from ..euler.viscosity import ViscosityModel
from ..mesh.mesh import Mesh
from ..refelem.reference_element import reference_element
from .layout import SolutionStore
from .prefine import p_refine_embed
from .rhs import DEFAULT_CHUNK, BoundaryConditions, DGOperator
from .rk import LSRK54, RKScheme, rk_step
from .timestep import compute_timestep, fixed_timestep

_LOG = logging.getLogger("curvedg.solver")

LOG_HEADER = ("level", "iteration", "dt", "residual_inf", "wall_seconds")
DIVERGENCE_FACTOR = 1e6
INTERMEDIATE_TOLERANCE = 1e-4
RESIDUAL_NORMS = ("inf", "l2")


@dataclass(frozen=True)
class RunConfig:
    p_schedule: Tuple[int, ...] = (2,)
    tolerances: Tuple[Optional[float], ...] = ()
    final_tolerance: float = 1e-9
    check_interval: int = 1000
    max_iterations: Tuple[int, ...] = (100000,)
    cfl: float = 0.5
    dt: Tuple[Optional[float], ...] = ()
    riemann: str = "hllc"
    viscosity: Optional[ViscosityModel] = None
    residual_norm: str = "inf"
    threads: int = 1
    deterministic: bool = False
    padded: bool = True
    chunk: int = DEFAULT_CHUNK
    debug: bool = False

    def __post_init__(self) -> None:
        sched = tuple(int(p) for p in self.p_schedule)
        object.__setattr__(self, "p_schedule", sched)
        if not sched or sched[0] < 1 or any(b <= a for a, b in zip(sched, sched[1:])):
            raise ConfigError(msg=f"p-schedule must be non-empty, >= 1 and strictly increasing, got {list(sched)}")
        if self.check_interval < 1:
            raise ConfigError(msg=f"check interval must be >= 1, got {self.check_interval}")
        if not (math.isfinite(self.cfl) and self.cfl > 0.0):
            raise ConfigError(msg=f"CFL number must be > 0, got {self.cfl}")
        if self.residual_norm not in RESIDUAL_NORMS:
            raise ConfigError(msg=f"residual norm must be one of {RESIDUAL_NORMS}, got {self.residual_norm!r}")
        if not (self.final_tolerance > 0.0):
            raise ConfigError(msg=f"final tolerance must be > 0, got {self.final_tolerance}")
        for name in ("tolerances", "max_iterations", "dt"):
            seq = tuple(getattr(self, name))
            if len(seq) > len(sched):
                raise ConfigError(msg=f"{name} has more entries than the p-schedule", context={name: list(seq)})
            object.__setattr__(self, name, seq)
        if not self.max_iterations or any(int(m) < 1 for m in self.max_iterations):
            raise ConfigError(msg="max_iterations entries must be >= 1")
        for d in self.dt:
            fixed_timestep(d)

    def tolerance(self, level: int) -> float:
        if level == len(self.p_schedule) - 1:
            return float(self.final_tolerance)
        if level < len(self.tolerances) and self.tolerances[level] is not None:
            return float(self.tolerances[level])
        return INTERMEDIATE_TOLERANCE

    def iteration_cap(self, level: int) -> int:
        return int(self.max_iterations[min(level, len(self.max_iterations) - 1)])

    def fixed_dt(self, level: int) -> Optional[float]:
        return fixed_timestep(self.dt[level]) if level < len(self.dt) else None


@dataclass(frozen=True)
class LevelRecord:
    level: int
    iteration: int
    dt: float
    residual_inf: float
    wall_seconds: float
    residual: float
    converged: bool
    rhs_evaluations: int
    cost: float
    history: Tuple[Tuple[int, float], ...] = ()

    def row(self) -> Tuple[str, ...]:
        return (str(self.level), str(self.iteration), repr(self.dt), repr(self.residual_inf), f"{self.wall_seconds:.3f}")


@dataclass
class SteadyResult:
    values: np.ndarray
    degree: int
    eps: np.ndarray
    levels: List[LevelRecord] = field(default_factory=list)

    @property
    def rhs_evaluations(self) -> int:
        return sum(r.rhs_evaluations for r in self.levels)

    @property
    def cost(self) -> float:
        return float(sum(r.cost for r in self.levels))

    @property
    def converged(self) -> bool:
        return bool(self.levels) and self.levels[-1].converged


def residual_norms(update: np.ndarray, dt: float, *, deterministic: bool = False) -> Tuple[float, float]:
    """(inf, l2) norms of an RK update divided by dt."""
    r = np.abs(np.asarray(update, dtype=float)).ravel() / dt
    inf = float(r.max()) if r.size else 0.0
    sq = r * r
    total = math.fsum(sq) if deterministic else float(sq.sum())
    return inf, math.sqrt(total / max(1, r.size))


def format_convergence_log(levels: Sequence[LevelRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(LOG_HEADER)
    for rec in levels:
        w.writerow(rec.row())
    return buf.getvalue()


def write_convergence_log(levels: Sequence[LevelRecord], path: Path) -> Path:
    path = Path(path)
    U.atomic_write_text(path, format_convergence_log(levels))
    return path


def run_steady(
    config: RunConfig,
    mesh: Mesh,
    curved: CurvedMesh,
    gas: GasModel,
    boundary: BoundaryConditions,
    *,
    initial: Optional[np.ndarray] = None,
    scheme: RKScheme = LSRK54,
    progress: bool = False,
    logger: Optional[logging.Logger] = None,
) -> SteadyResult:
    """
    March each level of the p-schedule until the residual (last RK update / dt)
    drops below that level's tolerance or the iteration cap is hit. The first
    level starts from `initial` (K, 5, Np) or the freestream; later levels start
    from the zero-extended modal embedding of the previous result.
    """
    log = logger or _LOG
    K = mesh.n_elements
    values: Optional[np.ndarray] = None
    prev_ref = None
    result: Optional[SteadyResult] = None
    levels: List[LevelRecord] = []
    h = mesh.inscribed_diameters()
    eps_max = config.viscosity.eps0 if config.viscosity is not None and config.viscosity.active else 0.0

    for level, p in enumerate(config.p_schedule):
        ref = reference_element(p)
        if values is None:
            if initial is not None:
                values = np.array(initial, dtype=float)
                if values.shape != (K, 5, ref.n_basis):
                    raise ConfigError(msg="initial state does not match mesh and degree", context={"shape": values.shape})
            else:
                values = np.tile(boundary.freestream[None, :, None], (K, 1, ref.n_basis))
        else:
            values = p_refine_embed(values, prev_ref, ref)
        prev_ref = ref

        t0 = U.timer()
        nodes = curved.nodes_at_degree(p).all_nodes()
        op = DGOperator(
            mesh, ref, nodes, gas, boundary,
            riemann=config.riemann, viscosity=config.viscosity, threads=config.threads,
            deterministic=config.deterministic, chunk=config.chunk, debug=config.debug, logger=log,
        )
        dt = config.fixed_dt(level)
        if dt is None:
            dt = compute_timestep(values, h, gas, p, config.cfl, eps_max=eps_max)
        tol = config.tolerance(level)
        cap = config.iteration_cap(level)
        log.info("Level p=%d: K=%d Np=%d dt=%.3e tol=%.1e cap=%d", p, K, ref.n_basis, dt, tol, cap)

        store = SolutionStore.from_values(values, padded=config.padded)

        def rhs(data: np.ndarray, t: float) -> np.ndarray:
            return op.compute_rhs(store.with_data(data)).data

        first: Optional[float] = None
        history: List[Tuple[int, float]] = []
        res_inf = res_sel = float("nan")
        converged = False
        it = 0
        try:
            with U.progress(progress) as bar:
                task = bar.add_task(f"p={p}", total=cap)
                while it < cap:
                    check = (it + 1) % config.check_interval == 0 or it + 1 == cap
                    new = rk_step(store.data, rhs, dt, scheme)
                    it += 1
                    if check:
                        res_inf, res_l2 = residual_norms(
                            store.with_data(new - store.data).values(), dt, deterministic=config.deterministic
                        )
                        res_sel = res_inf if config.residual_norm == "inf" else res_l2
                        log.debug("p=%d it=%d residual_inf=%.3e residual_l2=%.3e", p, it, res_inf, res_l2)
                        if not math.isfinite(res_sel) or (
                            first is not None and res_sel > DIVERGENCE_FACTOR * max(first, tol)
                        ):
                            raise NumericsError(
                                msg=f"solver diverged at p={p}, iteration {it}",
                                context={"residual": res_sel, "first_residual": first, "dt": dt},
                            )
                        history.append((it, res_sel))
                        if first is None:
                            first = res_sel
                        bar.update(task, completed=it)
                    store = store.with_data(new)
                    if check and res_sel < tol:
                        converged = True
                        break
        finally:
            op.close()

        values = store.values()
        wall = U.timer() - t0
        evals = op.rhs_evaluations
        rec = LevelRecord(
            level=p,
            iteration=it,
            dt=float(dt),
            residual_inf=res_inf,
            wall_seconds=wall,
            residual=res_sel,
            converged=converged,
            rhs_evaluations=evals,
            cost=float(evals) * K * ref.n_cub,
            history=tuple(history),
        )
        levels.append(rec)
        (log.info if converged else log.warning)(
            "Level p=%d %s after %d iterations: residual=%.3e (%.1fs, %d RHS evaluations)",
            p, "converged" if converged else "stopped", it, res_sel, wall, evals,
        )
        result = SteadyResult(values=values, degree=p, eps=op.last_eps.copy(), levels=list(levels))

    assert result is not None
    return result
