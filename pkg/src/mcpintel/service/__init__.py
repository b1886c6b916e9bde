"""Platform service: REST API, relational persistence, pipeline run
orchestration, projections, case-study replay and the CLI."""

from .config import PlatformConfig, load_config, save_config
from .projections import (
    LandscapeProjection,
    MatrixProjection,
    landscape_projection,
    matrix_projection,
    stride_distribution,
)
from .runs import PipelineContext, RunInProgressError, RunKind, RunRecord, RunStatus, run_pipeline
from .storage import Storage

__all__ = [
    "LandscapeProjection",
    "MatrixProjection",
    "PipelineContext",
    "PlatformConfig",
    "RunInProgressError",
    "RunKind",
    "RunRecord",
    "RunStatus",
    "Storage",
    "landscape_projection",
    "load_config",
    "matrix_projection",
    "run_pipeline",
    "save_config",
    "stride_distribution",
]
