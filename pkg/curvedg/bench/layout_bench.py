# SPDX-License-Identifier: LGPL-3.0-or-later
"""
Micro-benchmark of the element kernels: the volume term, the surface term and
the RK register update, each on the padded and the unpadded store and for
every requested thread count. Reports the median wall time per kernel.
"""
from __future__ import annotations

import csv
import io
import logging
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.exceptions import ConfigError, NumericsError
from ..core.utils import U
from ..curving.curved_mesh import CurvedMesh
from ..euler.state import N_CONSERVED, GasModel, check_admissible, freestream_state, primitive_to_conserved
from ..mesh.mesh import Mesh
from ..mesh.structured import structured_box
from ..operators.element_operators import build_mesh_operators
from ..refelem.basis import n_basis
from ..refelem.reference_element import ReferenceElement, reference_element
from ..solver.layout import SolutionStore
from ..solver.rhs import DEFAULT_CHUNK, BoundaryConditions, DGOperator
from ..solver.rk import LSRK54, rk_step

_LOG = logging.getLogger("curvedg.bench")

BENCH_HEADER = ("kernel", "layout", "threads", "median_seconds", "repetitions")
KERNELS = ("volume", "surface", "rk_update")
LAYOUTS = ("padded", "unpadded")
BENCH_TAG = "farfield"


def default_threads() -> Tuple[int, ...]:
    n = os.cpu_count() or 1
    return (1,) if n == 1 else (1, n)


@dataclass(frozen=True)
class BenchConfig:
    degree: int = 4
    elements: int = 5000
    repetitions: int = 5
    threads: Tuple[int, ...] = field(default_factory=default_threads)
    seed: int = 0
    chunk: int = DEFAULT_CHUNK

    def __post_init__(self) -> None:
        if self.degree < 1:
            raise ConfigError(msg=f"bench degree must be >= 1, got {self.degree}")
        if self.elements < 6:
            raise ConfigError(msg=f"bench needs at least 6 elements, got {self.elements}")
        if self.repetitions < 0:
            raise ConfigError(msg=f"repetitions must be >= 0, got {self.repetitions}")
        threads = tuple(int(t) for t in self.threads)
        if not threads or min(threads) < 1:
            raise ConfigError(msg=f"thread counts must be >= 1, got {list(threads)}")
        object.__setattr__(self, "threads", threads)


@dataclass(frozen=True)
class BenchRow:
    kernel: str
    layout: str
    threads: int
    median_seconds: float
    repetitions: int

    def row(self) -> Tuple[str, ...]:
        return (self.kernel, self.layout, str(self.threads), f"{self.median_seconds:.6e}", str(self.repetitions))


@dataclass
class BenchReport:
    rows: List[BenchRow]
    n_elements: int
    degree: int
    layouts_identical: bool

    def median(self, kernel: str, layout: str, threads: int) -> float:
        for r in self.rows:
            if (r.kernel, r.layout, r.threads) == (kernel, layout, threads):
                return r.median_seconds
        raise KeyError((kernel, layout, threads))

    def speedup(self, kernel: str, layout: str = "padded") -> float:
        """Single-thread median over the best multi-thread median."""
        single = self.median(kernel, layout, 1)
        multi = [r.median_seconds for r in self.rows if r.kernel == kernel and r.layout == layout and r.threads > 1]
        return single / min(multi) if multi else 1.0


def bench_mesh(n_elements: int) -> Mesh:
    """Smallest Kuhn-split unit cube with at least n_elements tets, farfield on all sides."""
    n = max(1, math.ceil((n_elements / 6.0) ** (1.0 / 3.0) - 1e-9))
    return structured_box(n, tagger=lambda pts: BENCH_TAG)


def _admissible_everywhere(values: np.ndarray, ref: ReferenceElement, gas: GasModel) -> bool:
    for where, interp in (("nodal state", None), ("cubature state", ref.interp_cub), ("face trace", ref.interp_face)):
        U = values.transpose(0, 2, 1) if interp is None else np.einsum("gn,kcn->kgc", interp, values)
        try:
            check_admissible(U, gas, where=where)
        except NumericsError as e:
            _LOG.debug("Synthetic state rejected: %s", e)
            return False
    return True


def random_admissible_values(
    ref: ReferenceElement,
    n_elements: int,
    gas: GasModel,
    seed: int = 0,
    *,
    amplitude: float = 0.1,
    attempts: int = 8,
) -> np.ndarray:
    """
    Nodal values (K, 5, Np): a random admissible constant state per element
    plus a random linear-mode perturbation of relative size `amplitude`.
    The perturbation is halved until the nodal, cubature and face values are
    all admissible; after `attempts` halvings the constants are returned.
    """
    rng = np.random.default_rng(seed)
    K, npn = int(n_elements), ref.n_basis
    base = primitive_to_conserved(
        rng.uniform(0.8, 1.25, K), rng.uniform(-0.4, 0.4, (K, 3)), rng.uniform(0.8, 1.25, K), gas
    )
    n_linear = min(n_basis(1), npn)
    modal = np.zeros((K, N_CONSERVED, npn))
    modal[:, :, 1:n_linear] = rng.uniform(-1.0, 1.0, (K, N_CONSERVED, n_linear - 1))
    shape = modal @ ref.vandermonde.T
    peak = np.abs(shape).max(axis=2, keepdims=True)
    shape = np.divide(shape, peak, out=np.zeros_like(shape), where=peak > 0.0)
    delta = shape * (np.abs(base) + 0.1)[:, :, None]

    for _ in range(attempts):
        values = base[:, :, None] + amplitude * delta
        if _admissible_everywhere(values, ref, gas):
            return values
        amplitude *= 0.5
    _LOG.warning("Perturbed bench state stayed inadmissible after %d attempts; using constants", attempts)
    return np.repeat(base[:, :, None], npn, axis=2)


def _median_time(fn: Callable[[], object], repetitions: int) -> float:
    fn()
    samples = []
    for _ in range(repetitions):
        t0 = U.timer()
        fn()
        samples.append(U.timer() - t0)
    return float(np.median(samples))


def run_layout_bench(
    config: BenchConfig,
    *,
    gas: Optional[GasModel] = None,
    progress: bool = False,
    logger: Optional[logging.Logger] = None,
) -> BenchReport:
    log = logger or _LOG
    gas = gas or GasModel()
    mesh = bench_mesh(config.elements)
    ref = reference_element(config.degree)
    K = mesh.n_elements
    log.info("Bench: p=%d, K=%d (requested %d), Np=%d, repetitions=%d", config.degree, K, config.elements, ref.n_basis, config.repetitions)

    nodes = CurvedMesh.straight(mesh, config.degree).all_nodes()
    ops = build_mesh_operators(nodes, ref, threads=max(config.threads), logger=log)
    bc = BoundaryConditions({BENCH_TAG: "farfield"}, freestream_state(0.5, 0.0, 1.0, 1.0, gas))
    values = random_admissible_values(ref, K, gas, config.seed)
    stores: Dict[str, SolutionStore] = {
        "padded": SolutionStore.from_values(values, padded=True),
        "unpadded": SolutionStore.from_values(values, padded=False),
    }

    outputs: Dict[str, np.ndarray] = {}
    rows: List[BenchRow] = []
    total = len(config.threads) * len(LAYOUTS) * len(KERNELS) if config.repetitions else 0
    with U.progress(progress) as bar:
        task = bar.add_task("Benchmarking kernels", total=total)
        for threads in config.threads:
            with DGOperator(
                mesh, ref, nodes, gas, bc,
                threads=threads, deterministic=True, chunk=config.chunk, operators=ops, logger=log,
            ) as op:
                for layout in LAYOUTS:
                    store = stores[layout]
                    if threads == config.threads[0]:
                        outputs[layout] = op.compute_rhs(store).values()
                    if not config.repetitions:
                        continue
                    frozen = op.compute_rhs(store).data
                    kernels: Dict[str, Callable[[], object]] = {
                        "volume": lambda s=store: op.volume_terms(s),
                        "surface": lambda s=store: op.surface_terms(s),
                        "rk_update": lambda s=store: rk_step(s.data, lambda u, t: frozen, 1e-6, LSRK54),
                    }
                    for name in KERNELS:
                        med = _median_time(kernels[name], config.repetitions)
                        rows.append(BenchRow(name, layout, threads, med, config.repetitions))
                        log.debug("bench %s/%s/%d threads: %.3e s", name, layout, threads, med)
                        bar.update(task, advance=1)

    identical = bool(np.array_equal(outputs["padded"], outputs["unpadded"]))
    if not identical:
        log.warning("Padded and unpadded layouts produced different residuals")
    return BenchReport(rows=rows, n_elements=K, degree=config.degree, layouts_identical=identical)


def format_bench_report(rows: Sequence[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_HEADER)
    for r in rows:
        w.writerow(r.row())
    return buf.getvalue()


def write_bench_report(rows: Sequence[BenchRow], path: Path) -> Path:
    path = Path(path)
    U.atomic_write_text(path, format_bench_report(rows))
    return path
