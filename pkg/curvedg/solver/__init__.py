# SPDX-License-Identifier: LGPL-3.0-or-later
from .layout import ALIGN, BlockStore, SolutionStore, TraceStore, padded_length
from .prefine import embed_modal, modal_coefficients, p_refine_embed
from .rhs import BoundaryConditions, DGOperator, compute_rhs, interpolate_to_faces
from .rk import FORWARD_EULER, LSRK54, RKScheme, rk_step
from .steady import LevelRecord, RunConfig, SteadyResult, format_convergence_log, run_steady, write_convergence_log
from .timestep import compute_timestep, element_wavespeeds

__all__ = [
    "ALIGN",
    "FORWARD_EULER",
    "LSRK54",
    "BlockStore",
    "BoundaryConditions",
    "DGOperator",
    "LevelRecord",
    "RKScheme",
    "RunConfig",
    "SolutionStore",
    "SteadyResult",
    "TraceStore",
    "compute_rhs",
    "compute_timestep",
    "element_wavespeeds",
    "embed_modal",
    "format_convergence_log",
    "interpolate_to_faces",
    "modal_coefficients",
    "p_refine_embed",
    "padded_length",
    "rk_step",
    "run_steady",
    "write_convergence_log",
]
