# SPDX-License-Identifier: LGPL-3.0-or-later
from .case_config import (
    BenchSection,
    BuiltinMesh,
    CaseConfig,
    CurvingSection,
    FreestreamSection,
    MeshSection,
    OutputSection,
    RunSection,
    SurfaceTarget,
)
from .config_loader import Config

__all__ = [
    "BenchSection",
    "BuiltinMesh",
    "CaseConfig",
    "Config",
    "CurvingSection",
    "FreestreamSection",
    "MeshSection",
    "OutputSection",
    "RunSection",
    "SurfaceTarget",
]
