# SPDX-License-Identifier: LGPL-3.0-or-later
"""
Semi-discrete DG right-hand side

    dU/dt = M^-1 ( sum_m S_m F_m(I_cub U) - M_dOmega (F* . n) )

with the optional element-wise artificial viscosity written as the
first-order system q = sqrt(eps) grad U, dU/dt + div(F - sqrt(eps) q) = 0.

Work is split into fixed element chunks. Each phase writes disjoint element
slices and completes before the next starts: traces, then (viscous only) the
auxiliary gradient and its traces, then the residual.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence

import numpy as np

from ..core.exceptions import ConfigError
from ..euler.boundary import BoundaryKind, boundary_state
from ..euler.riemann import FallbackCounter, riemann_solver
from ..euler.state import N_CONSERVED, GasModel, check_admissible, flux
from ..euler.viscosity import ViscosityModel, aux_flux, central_trace, element_viscosity, grad_flux
from ..mesh.mesh import Mesh
from ..operators.element_operators import ElementOperators, build_mesh_operators
from ..refelem.reference_element import ReferenceElement
from .layout import SolutionStore, TraceStore

_LOG = logging.getLogger("curvedg.solver")

DEFAULT_CHUNK = 64


@dataclass(frozen=True)
class BoundaryConditions:
    """Boundary tag -> kind, and the freestream state used by farfield faces."""

    kinds: Mapping[str, BoundaryKind]
    freestream: np.ndarray = field(default_factory=lambda: np.zeros(N_CONSERVED))

    def __post_init__(self) -> None:
        object.__setattr__(self, "kinds", {str(t): BoundaryKind.parse(k) for t, k in self.kinds.items()})
        u = np.array(self.freestream, dtype=float).reshape(N_CONSERVED)
        u.setflags(write=False)
        object.__setattr__(self, "freestream", u)

    def check_tags(self, mesh: Mesh) -> None:
        missing = [t for t in mesh.tags if t not in self.kinds]
        if missing:
            raise ConfigError(msg=f"no boundary condition for tags {missing}", context={"known": sorted(self.kinds)})


def _chunk(blocks: np.ndarray, idx: np.ndarray, length: int) -> np.ndarray:
    """Contiguous (c, fields, length) copy of the live slots of elements idx."""
    return np.ascontiguousarray(blocks[idx, :, :length])


def interpolate_to_faces(store: SolutionStore, ops: ElementOperators) -> TraceStore:
    """U_g = I_g U for every element and field, read from the live slots in place."""
    Ig = ops.interp_face
    traces = TraceStore.for_elements(store.n_elements, Ig.shape[0], padded=store.padded)
    traces.live()[...] = np.einsum("gn,kcn->kcg", Ig, store.live())
    return traces


class DGOperator:
    def __init__(
        self,
        mesh: Mesh,
        ref: ReferenceElement,
        nodes: np.ndarray,
        gas: GasModel,
        boundary: BoundaryConditions,
        *,
        riemann: str = "hllc",
        viscosity: Optional[ViscosityModel] = None,
        threads: int = 1,
        deterministic: bool = False,
        chunk: int = DEFAULT_CHUNK,
        order: Optional[Sequence[int]] = None,
        operators: Optional[ElementOperators] = None,
        debug: bool = False,
        logger: Optional[logging.Logger] = None,
    ):
        self.logger = logger or _LOG
        self.mesh = mesh
        self.ref = ref
        self.gas = gas
        self.boundary = boundary
        self.riemann_name = str(riemann).lower()
        self.riemann = riemann_solver(riemann)
        self.viscosity = viscosity if viscosity is not None and viscosity.active else None
        self.threads = max(1, int(threads))
        self.deterministic = bool(deterministic)
        self.debug = bool(debug)
        boundary.check_tags(mesh)

        K = mesh.n_elements
        self.ops = operators if operators is not None else build_mesh_operators(nodes, ref, threads=self.threads, logger=self.logger)
        if self.ops.n_elements != K:
            raise ConfigError(msg="operators and mesh disagree on the element count", context={"mesh": K, "operators": self.ops.n_elements})

        self.order = np.arange(K) if order is None else np.asarray(order, dtype=np.int64)
        if self.order.shape != (K,) or not np.array_equal(np.sort(self.order), np.arange(K)):
            raise ConfigError(msg="element order must be a permutation of all elements")
        if chunk < 1:
            raise ConfigError(msg=f"chunk size must be >= 1, got {chunk}")
        size = int(chunk) if self.deterministic else max(int(chunk), -(-K // self.threads))
        self.chunks: List[np.ndarray] = [self.order[i : i + size] for i in range(0, K, size)]

        self.n_face_points = 4 * ref.n_face
        self._normals = self.ops.geometry.normals.reshape(K, self.n_face_points, 3)
        self._kinds: List[BoundaryKind] = list(BoundaryKind)
        self._nb_elem, self._nb_point, self._bcode = self._gather_tables()
        self._jw = self.ops.geometry.jac * ref.cub_weights if self.viscosity is not None else None

        self.counter = FallbackCounter()
        self.rhs_evaluations = 0
        self.last_eps = np.zeros(K)
        self._pool: Optional[ThreadPoolExecutor] = None

    # ------------------------------------------------------------------ setup

    def _gather_tables(self):
        mesh, Ng = self.mesh, self.ref.n_face
        K, nfp = mesh.n_elements, self.n_face_points
        nb_elem = np.full((K, nfp), -1, dtype=np.int64)
        nb_point = np.zeros((K, nfp), dtype=np.int64)
        for link in mesh.face_links:
            idx = self.ref.face_node_maps[link.perm]
            inv = np.argsort(idx)
            mine = slice(link.face * Ng, (link.face + 1) * Ng)
            theirs = slice(link.neighbor_face * Ng, (link.neighbor_face + 1) * Ng)
            nb_elem[link.element, mine] = link.neighbor
            nb_point[link.element, mine] = link.neighbor_face * Ng + idx
            nb_elem[link.neighbor, theirs] = link.element
            nb_point[link.neighbor, theirs] = link.face * Ng + inv
        code = np.full((K, nfp), -1, dtype=np.int8)
        for bf in mesh.boundary_faces:
            code[bf.element, bf.face * Ng : (bf.face + 1) * Ng] = self._kinds.index(self.boundary.kinds[bf.tag])
        if np.any((nb_elem < 0) & (code < 0)):
            raise ConfigError(msg="face without neighbour or boundary condition")
        return nb_elem, nb_point, code

    @property
    def n_elements(self) -> int:
        return self.mesh.n_elements

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None

    def __enter__(self) -> "DGOperator":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _map_chunks(self, fn: Callable[[np.ndarray], None]) -> None:
        if self.threads == 1 or len(self.chunks) == 1:
            for idx in self.chunks:
                fn(idx)
            return
        if self._pool is None:
            self._pool = ThreadPoolExecutor(max_workers=self.threads, thread_name_prefix="curvedg-rhs")
        # list() re-raises the first worker exception
        list(self._pool.map(fn, self.chunks))

    # ---------------------------------------------------------------- kernels

    def _face_values(self, tb: np.ndarray, idx: np.ndarray) -> np.ndarray:
        """Own traces of elements idx as (c, 4 Ng, 5)."""
        return np.ascontiguousarray(tb[idx, :, : self.n_face_points].transpose(0, 2, 1))

    def _outer_states(self, idx: np.ndarray, tb: np.ndarray, UL: np.ndarray) -> np.ndarray:
        nb = self._nb_elem[idx]
        pt = self._nb_point[idx]
        UR = np.empty_like(UL)
        inner = nb >= 0
        UR[inner] = tb[nb[inner], :, pt[inner]]
        codes = self._bcode[idx]
        nrm = self._normals[idx]
        for code, kind in enumerate(self._kinds):
            m = codes == code
            if m.any():
                UR[m] = boundary_state(UL[m], nrm[m], kind, self.boundary.freestream)
        return UR

    def _central(
        self, idx: np.ndarray, own: np.ndarray, neighbour: Callable[[np.ndarray, np.ndarray], np.ndarray], eps: np.ndarray
    ) -> np.ndarray:
        """Average of sqrt(eps)-weighted one-sided traces; boundary points keep their own value."""
        nb = self._nb_elem[idx]
        pt = self._nb_point[idx]
        inner = nb >= 0
        star = own.copy()
        star[inner] = central_trace(own[inner], aux_flux(neighbour(nb[inner], pt[inner]), eps[nb[inner]]))
        return star

    def _trace_kernel(self, blocks: np.ndarray, tb: np.ndarray) -> Callable[[np.ndarray], None]:
        Ig, npn, nfp, gas = self.ops.interp_face, self.ref.n_basis, self.n_face_points, self.gas

        def run(idx: np.ndarray) -> None:
            U = _chunk(blocks, idx, npn)
            check_admissible(U.transpose(0, 2, 1), gas, where="nodal state", elements=idx)
            tb[idx, :, :nfp] = np.einsum("gn,kcn->kcg", Ig, U)

        return run

    def _aux_kernel(self, blocks, tb, eps, q, q_traces) -> Callable[[np.ndarray], None]:
        ops, npn = self.ops, self.ref.n_basis
        Ic, Ig = ops.interp_cub, ops.interp_face

        def run(idx: np.ndarray) -> None:
            e = eps[idx]
            aU = aux_flux(np.einsum("qn,kcn->kqc", Ic, _chunk(blocks, idx, npn)), e)
            vol = np.einsum("kmnq,kqc->kmnc", ops.stiffness[idx], aU)
            star = self._central(idx, aux_flux(self._face_values(tb, idx), e), lambda n, g: tb[n, :, g], eps)
            surf = np.einsum("kng,kgc,kgm->kmnc", ops.face_mass[idx], star, self._normals[idx])
            c = len(idx)
            rhs = (surf - vol).transpose(0, 2, 1, 3).reshape(c, npn, 3 * N_CONSERVED)
            qk = ops.solve_mass(rhs, elements=idx).reshape(c, npn, 3, N_CONSERVED).transpose(0, 2, 1, 3)
            q[idx] = qk
            q_traces[idx] = np.einsum("gn,kmnc->kgcm", Ig, qk)

        return run

    def _residual_kernel(self, blocks, tb, out, eps=None, q=None, q_traces=None) -> Callable[[np.ndarray], None]:
        ops, gas, npn = self.ops, self.gas, self.ref.n_basis
        Ic = ops.interp_cub

        def run(idx: np.ndarray) -> None:
            Ucub = np.einsum("qn,kcn->kqc", Ic, _chunk(blocks, idx, npn))
            check_admissible(Ucub, gas, where="cubature state", elements=idx)
            F = flux(Ucub, gas, checked=False)
            UL = self._face_values(tb, idx)
            check_admissible(UL, gas, where="face trace", elements=idx)
            nrm = self._normals[idx]
            Fn = self.riemann(UL, self._outer_states(idx, tb, UL), nrm, gas, checked=False, counter=self.counter)
            if q is not None:
                e = eps[idx]
                F = F - grad_flux(np.einsum("qn,kmnc->kqcm", Ic, q[idx]), e)
                star = self._central(idx, grad_flux(q_traces[idx], e), lambda n, g: q_traces[n, g], eps)
                Fn = Fn - np.einsum("kgcm,kgm->kgc", star, nrm)
            vol = np.einsum("kmnq,kqcm->knc", ops.stiffness[idx], F)
            surf = np.einsum("kng,kgc->knc", ops.face_mass[idx], Fn)
            out[idx, :, :npn] = ops.solve_mass(vol - surf, elements=idx).transpose(0, 2, 1)

        return run

    # ------------------------------------------------------------------- API

    def _check_store(self, store: SolutionStore) -> None:
        if store.n_elements != self.n_elements or store.length != self.ref.n_basis or store.n_fields != N_CONSERVED:
            raise ConfigError(
                msg="solution store does not match the operator",
                context={"K": store.n_elements, "length": store.length, "Np": self.ref.n_basis},
            )

    def _traces(self, store: SolutionStore) -> TraceStore:
        traces = TraceStore.for_elements(self.n_elements, self.n_face_points, padded=store.padded)
        self._map_chunks(self._trace_kernel(store.blocks(), traces.blocks()))
        return traces

    def interpolate_to_faces(self, store: SolutionStore) -> TraceStore:
        self._check_store(store)
        return self._traces(store)

    def element_viscosity(self, values: np.ndarray) -> np.ndarray:
        if self.viscosity is None:
            return np.zeros(self.n_elements)
        return element_viscosity(values, self.ref, self.viscosity, self._jw)

    def compute_rhs(self, store: SolutionStore) -> SolutionStore:
        """
        Residual store with the layout of `store`. Kernels gather element
        chunks from the padded blocks and write the live slots of the result;
        padding is never touched.
        """
        self._check_store(store)
        K, nfp = self.n_elements, self.n_face_points
        blocks = store.blocks()
        traces = self._traces(store)
        tb = traces.blocks()

        result = store.like()
        out = result.blocks()
        eps = self.element_viscosity(store.live())
        self.last_eps = eps
        if self.viscosity is not None and eps.max() > 0.0:
            q = np.empty((K, 3, self.ref.n_basis, N_CONSERVED))
            q_traces = np.empty((K, nfp, N_CONSERVED, 3))
            self._map_chunks(self._aux_kernel(blocks, tb, eps, q, q_traces))
            self._map_chunks(self._residual_kernel(blocks, tb, out, eps, q, q_traces))
        else:
            self._map_chunks(self._residual_kernel(blocks, tb, out))

        self.rhs_evaluations += 1
        fallbacks = self.counter.take()
        if fallbacks:
            self.logger.debug("HLLC fell back to LLF at %d face points", fallbacks)
        if self.debug:
            traces.assert_padding("face interpolation")
            result.assert_padding("compute_rhs")
        return result

    def rhs_values(self, values: np.ndarray) -> np.ndarray:
        """Residual (K, 5, Np) for logical nodal values (K, 5, Np), through an unpadded store."""
        return self.compute_rhs(SolutionStore.from_values(values, padded=False)).values()

    def volume_terms(self, store: SolutionStore) -> np.ndarray:
        """Inviscid sum_m S_m F_m(I_cub U), (K, Np, 5), before the mass solve."""
        self._check_store(store)
        ops, gas, npn = self.ops, self.gas, self.ref.n_basis
        blocks = store.blocks()
        out = np.empty((self.n_elements, npn, N_CONSERVED))

        def run(idx: np.ndarray) -> None:
            F = flux(np.einsum("qn,kcn->kqc", ops.interp_cub, _chunk(blocks, idx, npn)), gas, checked=False)
            out[idx] = np.einsum("kmnq,kqcm->knc", ops.stiffness[idx], F)

        self._map_chunks(run)
        return out

    def surface_terms(self, store: SolutionStore) -> np.ndarray:
        """Inviscid M_dOmega (F* . n), (K, Np, 5), before the mass solve."""
        self._check_store(store)
        ops, gas = self.ops, self.gas
        tb = self._traces(store).blocks()
        out = np.empty((self.n_elements, self.ref.n_basis, N_CONSERVED))

        def run(idx: np.ndarray) -> None:
            UL = self._face_values(tb, idx)
            Fn = self.riemann(UL, self._outer_states(idx, tb, UL), self._normals[idx], gas, checked=False, counter=self.counter)
            out[idx] = np.einsum("kng,kgc->knc", ops.face_mass[idx], Fn)

        self._map_chunks(run)
        self.counter.take()
        return out

    def auxiliary_gradient(self, values: np.ndarray, eps: np.ndarray) -> np.ndarray:
        """q = sqrt(eps) grad U in weak form, shaped (K, 3, Np, 5)."""
        store = SolutionStore.from_values(values, padded=False)
        self._check_store(store)
        K = self.n_elements
        tb = self._traces(store).blocks()
        q = np.empty((K, 3, self.ref.n_basis, N_CONSERVED))
        q_traces = np.empty((K, self.n_face_points, N_CONSERVED, 3))
        self._map_chunks(self._aux_kernel(store.blocks(), tb, np.asarray(eps, dtype=float), q, q_traces))
        return q


def compute_rhs(store: SolutionStore, operator: DGOperator) -> SolutionStore:
    return operator.compute_rhs(store)


def boundary_summary(mesh: Mesh, boundary: BoundaryConditions) -> Dict[str, int]:
    """Number of boundary faces per kind."""
    out: Dict[str, int] = {}
    for bf in mesh.boundary_faces:
        kind = boundary.kinds[bf.tag].value
        out[kind] = out.get(kind, 0) + 1
    return out
