# SPDX-License-Identifier: LGPL-3.0-or-later
"""
Typed view of a merged case file.

    mesh:         path | builtin {kind: sphere_shell, n, radius, outer, octant}
    curved_mesh:  sidecar to load for `solve`/`export` (optional)
    gas:          {gamma}
    freestream:   {mach, alpha, density, pressure}
    boundary:     {tag: slip_wall | farfield | symmetry}
    riemann:      hllc | llf
    viscosity:    {eps0, kappa, s0_offset, component, weighted_indicator}
    run:          p-schedule, tolerances, CFL or fixed dt, ...
    curving:      sub-mesh box, surface tag, target surface, material
    output:       directory and artefact file names
    bench:        {degree, elements, repetitions, threads}

Every section is optional and falls back to the defaults below. Unknown keys
inside a section are rejected; unknown top-level keys belong to the CLI.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Type, TypeVar

import numpy as np

from ..core.exceptions import ConfigError
from ..curving.elasticity import ElasticMaterial
from ..euler.boundary import BoundaryKind, parse_boundary_map
from ..euler.riemann import RIEMANN_SOLVERS
from ..euler.state import GasModel, freestream_state
from ..euler.viscosity import ViscosityModel
from ..mesh.mesh import Mesh
from ..solver.rhs import DEFAULT_CHUNK, BoundaryConditions
from ..solver.steady import RunConfig

_LOG = logging.getLogger("curvedg.config")

SECTIONS = (
    "mesh", "curved_mesh", "gas", "freestream", "boundary", "riemann",
    "viscosity", "run", "curving", "output", "bench",
)
TARGET_KINDS = ("sphere", "nurbs")

T = TypeVar("T")


def _section(raw: Mapping[str, Any], name: str) -> Dict[str, Any]:
    value = raw.get(name)
    if value is None:
        return {}
    if not isinstance(value, Mapping):
        raise ConfigError(msg=f"config section `{name}` must be a mapping", context={"got": type(value).__name__})
    return dict(value)


def _build(cls: Type[T], data: Mapping[str, Any], where: str) -> T:
    known = {f.name for f in fields(cls)}  # type: ignore[arg-type]
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(msg=f"unknown keys in `{where}`: {unknown}", context={"allowed": sorted(known)})
    try:
        return cls(**data)
    except (TypeError, ValueError) as e:
        raise ConfigError(msg=f"invalid `{where}` section: {e}", cause=e) from e


def _floats(value: Any, n: Optional[int] = None, where: str = "value") -> Tuple[float, ...]:
    out = tuple(float(v) for v in (value if isinstance(value, (list, tuple)) else [value]))
    if n is not None and len(out) != n:
        raise ConfigError(msg=f"{where} needs {n} numbers, got {len(out)}")
    return out


def _optional_floats(value: Any) -> Tuple[Optional[float], ...]:
    items = value if isinstance(value, (list, tuple)) else [value]
    return tuple(None if v is None else float(v) for v in items)


@dataclass(frozen=True)
class BuiltinMesh:
    kind: str = "sphere_shell"
    n: int = 6
    radius: float = 1.0
    outer: float = 3.0
    octant: bool = True

    def __post_init__(self) -> None:
        if self.kind != "sphere_shell":
            raise ConfigError(msg=f"unknown builtin mesh {self.kind!r}", context={"choices": ["sphere_shell"]})
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "outer", float(self.outer))
        object.__setattr__(self, "octant", bool(self.octant))
        if self.n < 1 or not 0.0 < self.radius < self.outer:
            raise ConfigError(msg="sphere_shell needs n >= 1 and 0 < radius < outer", context=asdict(self))


@dataclass(frozen=True)
class MeshSection:
    path: Optional[str] = None
    builtin: Optional[BuiltinMesh] = None

    def __post_init__(self) -> None:
        if isinstance(self.builtin, Mapping):
            object.__setattr__(self, "builtin", _build(BuiltinMesh, self.builtin, "mesh.builtin"))
        if self.path is not None and self.builtin is not None:
            raise ConfigError(msg="`mesh` takes either `path` or `builtin`, not both")

    @property
    def defined(self) -> bool:
        return self.path is not None or self.builtin is not None


@dataclass(frozen=True)
class FreestreamSection:
    mach: float = 0.38
    alpha: float = 0.0
    density: float = 1.0
    pressure: float = 1.0

    def __post_init__(self) -> None:
        for f in fields(self):
            object.__setattr__(self, f.name, float(getattr(self, f.name)))
        if not (math.isfinite(self.mach) and self.mach >= 0.0):
            raise ConfigError(msg=f"freestream Mach number must be >= 0, got {self.mach}")
        if not (self.density > 0.0 and self.pressure > 0.0):
            raise ConfigError(msg="freestream density and pressure must be > 0")

    def state(self, gas: GasModel) -> np.ndarray:
        return freestream_state(self.mach, self.alpha, self.density, self.pressure, gas)


@dataclass(frozen=True)
class RunSection:
    p_schedule: Tuple[int, ...] = (2,)
    tolerances: Tuple[Optional[float], ...] = ()
    final_tolerance: float = 1e-9
    check_interval: int = 1000
    max_iterations: Tuple[int, ...] = (100000,)
    cfl: float = 0.5
    dt: Tuple[Optional[float], ...] = ()
    residual_norm: str = "inf"
    padded: bool = True
    chunk: int = DEFAULT_CHUNK
    debug: bool = False

    def __post_init__(self) -> None:
        sched = self.p_schedule if isinstance(self.p_schedule, (list, tuple)) else [self.p_schedule]
        caps = self.max_iterations if isinstance(self.max_iterations, (list, tuple)) else [self.max_iterations]
        object.__setattr__(self, "p_schedule", tuple(int(p) for p in sched))
        object.__setattr__(self, "max_iterations", tuple(int(m) for m in caps))
        object.__setattr__(self, "tolerances", _optional_floats(self.tolerances) if self.tolerances != () else ())
        object.__setattr__(self, "dt", _optional_floats(self.dt) if self.dt != () else ())
        object.__setattr__(self, "final_tolerance", float(self.final_tolerance))
        object.__setattr__(self, "check_interval", int(self.check_interval))
        object.__setattr__(self, "cfl", float(self.cfl))
        object.__setattr__(self, "residual_norm", str(self.residual_norm).lower())
        object.__setattr__(self, "padded", bool(self.padded))
        object.__setattr__(self, "chunk", int(self.chunk))
        object.__setattr__(self, "debug", bool(self.debug))

    @property
    def final_degree(self) -> int:
        return self.p_schedule[-1]


@dataclass(frozen=True)
class SurfaceTarget:
    kind: str = "sphere"
    center: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    radius: float = 1.0
    path: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind not in TARGET_KINDS:
            raise ConfigError(msg=f"unknown curving target {self.kind!r}", context={"choices": list(TARGET_KINDS)})
        object.__setattr__(self, "center", _floats(self.center, 3, "curving.target.center"))
        object.__setattr__(self, "radius", float(self.radius))
        if self.kind == "sphere" and not self.radius > 0.0:
            raise ConfigError(msg=f"target sphere radius must be > 0, got {self.radius}")
        if self.kind == "nurbs" and not self.path:
            raise ConfigError(msg="a nurbs curving target needs `path`")


@dataclass(frozen=True)
class CurvingSection:
    box_lo: Optional[Tuple[float, float, float]] = None
    box_hi: Optional[Tuple[float, float, float]] = None
    surface_tag: str = "sphere"
    symmetry_tags: Tuple[str, ...] = ()
    fem_degree: int = 2
    degree: Optional[int] = None
    target: SurfaceTarget = field(default_factory=SurfaceTarget)
    youngs_modulus: float = 1.0
    poisson_ratio: float = 0.0

    def __post_init__(self) -> None:
        if isinstance(self.target, Mapping):
            object.__setattr__(self, "target", _build(SurfaceTarget, self.target, "curving.target"))
        for name in ("box_lo", "box_hi"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, _floats(value, 3, f"curving.{name}"))
        object.__setattr__(self, "symmetry_tags", tuple(str(t) for t in self.symmetry_tags))
        object.__setattr__(self, "fem_degree", int(self.fem_degree))
        object.__setattr__(self, "youngs_modulus", float(self.youngs_modulus))
        object.__setattr__(self, "poisson_ratio", float(self.poisson_ratio))
        if self.degree is not None:
            object.__setattr__(self, "degree", int(self.degree))
        if self.fem_degree < 1:
            raise ConfigError(msg=f"curving.fem_degree must be >= 1, got {self.fem_degree}")
        self.material()

    def material(self) -> ElasticMaterial:
        return ElasticMaterial(self.youngs_modulus, self.poisson_ratio)

    def box(self) -> Tuple[Tuple[float, ...], Tuple[float, ...]]:
        if self.box_lo is None or self.box_hi is None:
            raise ConfigError(msg="curving needs `box_lo` and `box_hi`")
        return self.box_lo, self.box_hi


@dataclass(frozen=True)
class OutputSection:
    directory: str = "./out"
    state: str = "state.npz"
    log: str = "convergence.csv"
    vtk: str = "solution.vtk"
    sidecar: str = "curved.cdg"
    field: str = "deformation.npz"
    validation: str = "validation.json"
    bench: str = "bench.csv"

    def path(self, name: str) -> Path:
        """Artefact path; relative names live under `directory`."""
        p = Path(getattr(self, name)).expanduser()
        return p if p.is_absolute() else Path(self.directory).expanduser() / p


@dataclass(frozen=True)
class BenchSection:
    degree: int = 4
    elements: int = 5000
    repetitions: int = 5
    threads: Optional[Tuple[int, ...]] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "degree", int(self.degree))
        object.__setattr__(self, "elements", int(self.elements))
        object.__setattr__(self, "repetitions", int(self.repetitions))
        if self.threads is not None:
            t = self.threads if isinstance(self.threads, (list, tuple)) else [self.threads]
            object.__setattr__(self, "threads", tuple(int(x) for x in t))


@dataclass(frozen=True)
class CaseConfig:
    mesh: MeshSection = field(default_factory=MeshSection)
    curved_mesh: Optional[str] = None
    gas: GasModel = field(default_factory=GasModel)
    freestream: FreestreamSection = field(default_factory=FreestreamSection)
    boundary: Mapping[str, BoundaryKind] = field(default_factory=dict)
    riemann: str = "hllc"
    viscosity: ViscosityModel = field(default_factory=lambda: ViscosityModel(eps0=0.0))
    run: RunSection = field(default_factory=RunSection)
    curving: CurvingSection = field(default_factory=CurvingSection)
    output: OutputSection = field(default_factory=OutputSection)
    bench: BenchSection = field(default_factory=BenchSection)

    def __post_init__(self) -> None:
        object.__setattr__(self, "boundary", dict(sorted(parse_boundary_map(self.boundary).items())))
        object.__setattr__(self, "riemann", str(self.riemann).lower())
        if self.riemann not in RIEMANN_SOLVERS:
            raise ConfigError(msg=f"unknown riemann solver {self.riemann!r}", context={"choices": sorted(RIEMANN_SOLVERS)})
        # RunConfig owns the cross-field checks (schedule order, list lengths, fixed dt)
        self.run_config()

    # ------------------------------------------------------------- building

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any], *, logger: Optional[logging.Logger] = None) -> "CaseConfig":
        log = logger or _LOG
        extra = sorted(k for k in raw if k not in SECTIONS)
        if extra:
            log.debug("Top-level keys left to the CLI: %s", extra)
        visc = _section(raw, "viscosity")
        visc.setdefault("eps0", 0.0)
        curved = raw.get("curved_mesh")
        if isinstance(curved, Mapping):
            curved = curved.get("path")
        boundary = raw.get("boundary") or {}
        if not isinstance(boundary, Mapping):
            raise ConfigError(msg="config section `boundary` must map tags to kinds")
        return cls(
            mesh=_build(MeshSection, _section(raw, "mesh"), "mesh"),
            curved_mesh=None if curved is None else str(curved),
            gas=_build(GasModel, {k: float(v) for k, v in _section(raw, "gas").items()}, "gas"),
            freestream=_build(FreestreamSection, _section(raw, "freestream"), "freestream"),
            boundary=dict(boundary),
            riemann=str(raw.get("riemann", "hllc")),
            viscosity=_build(ViscosityModel, visc, "viscosity"),
            run=_build(RunSection, _section(raw, "run"), "run"),
            curving=_build(CurvingSection, _section(raw, "curving"), "curving"),
            output=_build(OutputSection, _section(raw, "output"), "output"),
            bench=_build(BenchSection, _section(raw, "bench"), "bench"),
        )

    def to_dict(self) -> Dict[str, Any]:
        d = asdict(self)
        d["boundary"] = {tag: kind.value for tag, kind in self.boundary.items()}
        return _plain(d)

    def to_json(self) -> str:
        """Sorted keys; floats use Python's shortest round-trip repr."""
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CaseConfig":
        return cls.from_dict(json.loads(text))

    # -------------------------------------------------------------- helpers

    def run_config(self, *, threads: int = 1, deterministic: bool = False) -> RunConfig:
        r = self.run
        return RunConfig(
            p_schedule=r.p_schedule,
            tolerances=r.tolerances,
            final_tolerance=r.final_tolerance,
            check_interval=r.check_interval,
            max_iterations=r.max_iterations,
            cfl=r.cfl,
            dt=r.dt,
            riemann=self.riemann,
            viscosity=self.viscosity if self.viscosity.active else None,
            residual_norm=r.residual_norm,
            threads=threads,
            deterministic=deterministic,
            padded=r.padded,
            chunk=r.chunk,
            debug=r.debug,
        )

    def boundary_conditions(self) -> BoundaryConditions:
        return BoundaryConditions(self.boundary, self.freestream.state(self.gas))

    def curving_degree(self) -> int:
        return self.curving.degree if self.curving.degree is not None else self.run.final_degree

    def check_mesh(self, mesh: Mesh, *, need_curving: bool = False) -> None:
        """Referenced tags must exist in the mesh, and every mesh tag needs a condition."""
        tags = set(mesh.tags)
        unknown = sorted(set(self.boundary) - tags)
        if unknown:
            raise ConfigError(msg=f"boundary conditions name tags missing from the mesh: {unknown}", context={"mesh_tags": sorted(tags)})
        self.boundary_conditions().check_tags(mesh)
        if need_curving:
            missing = sorted({self.curving.surface_tag, *self.curving.symmetry_tags} - tags)
            if missing:
                raise ConfigError(msg=f"curving names tags missing from the mesh: {missing}", context={"mesh_tags": sorted(tags)})


def _plain(obj: Any) -> Any:
    """Tuples to lists so the dict matches what a JSON/YAML parser yields."""
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj

