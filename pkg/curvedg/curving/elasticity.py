# SPDX-License-Identifier: LGPL-3.0-or-later
"""
Linear elasticity on the curving sub-mesh with continuous vector Lagrange
elements. The surface displacement is imposed on D1 faces, D2 faces are
clamped, and N faces slide along their (axis-aligned) plane.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import LinearOperator, cg, spsolve
from scipy.spatial import cKDTree

from ..core.exceptions import ConfigError, CurvingError
from ..mesh.submesh import SubMesh
from ..refelem import reference_element
from ..refelem.basis import barycentric
from .deformation import DeformationField, affine_jacobians

_LOG = logging.getLogger("curvedg.curving.elasticity")

DIRECT_SOLVE_LIMIT = 20000
CG_RTOL = 1e-10
AXIS_TOL = 1e-10
ASSEMBLY_CHUNK = 256

DisplacementMap = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ElasticMaterial:
    youngs_modulus: float = 1.0
    poisson_ratio: float = 0.0

    def __post_init__(self) -> None:
        if not self.youngs_modulus > 0.0:
            raise ConfigError(msg=f"Young's modulus must be positive, got {self.youngs_modulus}")
        if not -1.0 < self.poisson_ratio < 0.5:
            raise ConfigError(msg=f"Poisson ratio must lie in (-1, 0.5), got {self.poisson_ratio}")

    @property
    def lame_lambda(self) -> float:
        E, nu = self.youngs_modulus, self.poisson_ratio
        return nu * E / ((1.0 + nu) * (1.0 - 2.0 * nu))

    @property
    def lame_mu(self) -> float:
        return self.youngs_modulus / (2.0 * (1.0 + self.poisson_ratio))


@dataclass(frozen=True, eq=False)
class FemSpace:
    degree: int
    node_xyz: np.ndarray
    elem_nodes: np.ndarray
    jac: np.ndarray
    rx: np.ndarray

    @property
    def n_nodes(self) -> int:
        return int(self.node_xyz.shape[0])

    @property
    def n_dofs(self) -> int:
        return 3 * self.n_nodes


def build_space(submesh: SubMesh, degree: int) -> FemSpace:
    """Global Lagrange nodes: element nodes merged by coordinate."""
    if degree < 1:
        raise ConfigError(msg=f"FEM degree must be >= 1, got {degree}")
    ref = reference_element(degree)
    verts = submesh.vertices
    tets = submesh.local_tets
    x = verts[tets]
    lam = barycentric(ref.colloc_nodes)
    pts = np.einsum("nv,kvc->knc", lam, x).reshape(-1, 3)

    scale = float(np.ptp(verts, axis=0).max())
    edge = np.linalg.norm(x[:, 1] - x[:, 0], axis=1).min()
    tol = 1e-8 * min(scale, edge / degree)
    pairs = cKDTree(pts).query_pairs(tol, output_type="ndarray")
    n = pts.shape[0]
    graph = sp.coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    # number global nodes by first appearance
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    relabel = np.empty_like(order)
    relabel[order] = np.arange(order.size)
    ids = relabel[labels]
    node_xyz = pts[first[order]]

    _, dxdr = affine_jacobians(verts, tets)
    jac = np.linalg.det(dxdr)
    if np.any(jac <= 0.0):
        raise CurvingError(msg="sub-mesh contains inverted elements", context={"elements": np.nonzero(jac <= 0)[0][:20].tolist()})
    rx = np.linalg.inv(dxdr)
    return FemSpace(degree=degree, node_xyz=node_xyz, elem_nodes=ids.reshape(tets.shape[0], -1), jac=jac, rx=rx)


def _local_stiffness(space: FemSpace, lam: float, mu: float, elems: np.ndarray) -> np.ndarray:
    ref = reference_element(space.degree)
    w = ref.cub_weights
    # G[k,q,n,m] = d phi_n / d x_m at cubature node q
    G = np.einsum("jqn,kjm->kqnm", ref.deriv_cub, space.rx[elems])
    Kl = lam * np.einsum("q,kqna,kqlb->knalb", w, G, G)
    Kl += mu * np.einsum("q,kqnb,kqla->knalb", w, G, G)
    lap = mu * np.einsum("q,kqnm,kqlm->knl", w, G, G)
    for a in range(3):
        Kl[:, :, a, :, a] += lap
    Kl *= space.jac[elems, None, None, None, None]
    npn = ref.n_basis
    return Kl.reshape(len(elems), 3 * npn, 3 * npn)


def assemble_stiffness(space: FemSpace, material: ElasticMaterial, *, threads: int = 1) -> sp.csr_matrix:
    """Global stiffness; per-chunk local matrices are summed in chunk order."""
    K = space.elem_nodes.shape[0]
    dofs = (3 * space.elem_nodes[:, :, None] + np.arange(3)).reshape(K, -1)
    chunks = [np.arange(s, min(s + ASSEMBLY_CHUNK, K)) for s in range(0, K, ASSEMBLY_CHUNK)]

    def work(elems: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        Kl = _local_stiffness(space, material.lame_lambda, material.lame_mu, elems)
        d = dofs[elems]
        rows = np.broadcast_to(d[:, :, None], Kl.shape).ravel()
        cols = np.broadcast_to(d[:, None, :], Kl.shape).ravel()
        return rows, cols, Kl.ravel()

    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(c) for c in chunks]
    rows = np.concatenate([p[0] for p in parts])
    cols = np.concatenate([p[1] for p in parts])
    vals = np.concatenate([p[2] for p in parts])
    n = space.n_dofs
    return sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()


def _face_nodes(space: FemSpace, faces: np.ndarray) -> List[np.ndarray]:
    ref = reference_element(space.degree)
    return [space.elem_nodes[e, ref.colloc_face_ids[f]] for e, f in faces.tolist()]


def _face_axes(submesh: SubMesh) -> np.ndarray:
    pts = submesh.face_points(submesh.faces_n)
    if pts.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    n = np.cross(pts[:, 1] - pts[:, 0], pts[:, 2] - pts[:, 0])
    n /= np.linalg.norm(n, axis=1, keepdims=True)
    axes = np.argmax(np.abs(n), axis=1)
    bad = np.abs(n[np.arange(len(n)), axes]) < 1.0 - AXIS_TOL
    if np.any(bad):
        raise CurvingError(
            msg="symmetry faces must lie in axis-aligned planes",
            context={"faces": submesh.faces_n[bad][:10].tolist()},
        )
    return axes


def boundary_constraints(
    space: FemSpace, submesh: SubMesh, dirichlet: Optional[DisplacementMap]
) -> Tuple[np.ndarray, np.ndarray, Dict[str, int]]:
    """
    Fixed-DOF mask and prescribed values. A node on several classes takes the
    strongest: clamped (D2) over prescribed (D1) over sliding (N).
    """
    n = space.n_nodes
    fixed = np.zeros((n, 3), dtype=bool)
    values = np.zeros((n, 3))

    d2 = np.unique(np.concatenate(_face_nodes(space, submesh.faces_d2) or [np.zeros(0, np.int64)]))
    d1 = np.unique(np.concatenate(_face_nodes(space, submesh.faces_d1) or [np.zeros(0, np.int64)]))
    d1 = np.setdiff1d(d1, d2)
    if d1.size and dirichlet is not None:
        g = np.asarray(dirichlet(space.node_xyz[d1]), dtype=float).reshape(-1, 3)
        if not np.all(np.isfinite(g)):
            raise CurvingError(msg="surface displacement is not finite")
        values[d1] = g
    fixed[d1] = True
    fixed[d2] = True
    values[d2] = 0.0

    strong = np.zeros(n, dtype=bool)
    strong[d1] = True
    strong[d2] = True
    axes = _face_axes(submesh)
    n_sliding = 0
    for nodes, axis in zip(_face_nodes(space, submesh.faces_n), axes.tolist()):
        free_nodes = nodes[~strong[nodes]]
        n_sliding += int((~fixed[free_nodes, axis]).sum())
        fixed[free_nodes, axis] = True
        values[free_nodes, axis] = 0.0

    stats = {"clamped_nodes": int(d2.size), "surface_nodes": int(d1.size), "sliding_dofs": n_sliding}
    return fixed.reshape(-1), values.reshape(-1), stats


def _solve_reduced(A: sp.csr_matrix, b: np.ndarray, log: logging.Logger) -> np.ndarray:
    n = A.shape[0]
    if n <= DIRECT_SOLVE_LIMIT:
        x = spsolve(A.tocsc(), b)
        return np.atleast_1d(x)
    d = A.diagonal()
    if np.any(d <= 0):
        raise CurvingError(msg="elasticity system has a non-positive diagonal")
    M = LinearOperator((n, n), matvec=lambda v: v / d)
    x, info = cg(A, b, rtol=CG_RTOL, atol=0.0, M=M, maxiter=10 * n)
    if info != 0:
        raise CurvingError(msg="conjugate gradients did not converge", context={"info": int(info), "dofs": n})
    log.debug("CG converged on %d dofs", n)
    return x


def solve_elasticity(
    submesh: SubMesh,
    material: ElasticMaterial,
    dirichlet: Optional[DisplacementMap],
    p_fem: int,
    *,
    threads: int = 1,
    logger: Optional[logging.Logger] = None,
) -> DeformationField:
    """
    Solve div sigma(u) = 0 with u = dirichlet(x) on D1, u = 0 on D2 and zero
    normal displacement on N. Returns the solved field with its stiffness
    matrix attached for energy checks.
    """
    log = logger or _LOG
    space = build_space(submesh, p_fem)
    K = assemble_stiffness(space, material, threads=threads)
    fixed, values, stats = boundary_constraints(space, submesh, dirichlet)
    if stats["clamped_nodes"] + stats["surface_nodes"] == 0:
        raise CurvingError(msg="elasticity problem has no Dirichlet boundary; the system is singular")

    free = ~fixed
    u = values.copy()
    n_free = int(free.sum())
    log.info(
        "Elasticity: p=%d, %d nodes, %d free dofs (E=%g, nu=%g)",
        p_fem, space.n_nodes, n_free, material.youngs_modulus, material.poisson_ratio,
    )
    if n_free:
        Kff = K[free][:, free]
        rhs = -(K[free][:, fixed] @ values[fixed])
        u[free] = _solve_reduced(Kff.tocsr(), rhs, log)
    if not np.all(np.isfinite(u)):
        raise CurvingError(msg="elasticity solve produced non-finite displacements (singular system?)")

    return DeformationField(
        degree=p_fem,
        vertices=submesh.vertices,
        tets=np.asarray(submesh.local_tets),
        node_xyz=space.node_xyz,
        elem_nodes=space.elem_nodes,
        displacement=u.reshape(-1, 3),
        parent_elements=np.asarray(submesh.elements),
        stiffness=K,
        fixed_dofs=fixed,
    )


def strain_energy(field: DeformationField, displacement: Optional[np.ndarray] = None) -> float:
    """1/2 u^T K u for the field's own solution or a trial displacement."""
    if field.stiffness is None:
        raise ConfigError(msg="deformation field carries no stiffness matrix (loaded from disk?)")
    u = (field.displacement if displacement is None else np.asarray(displacement)).reshape(-1)
    return 0.5 * float(u @ (field.stiffness @ u))
