"""Request and response models shared by the HTTP app and the CLI.

Every file format the command line reads has a model here, so both
front ends reject unknown keys and malformed payloads identically.
"""

from __future__ import annotations

from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

__all__ = [
    "StrictModel",
    "HalfSpaceEntry",
    "SpecFile",
    "OperatorFile",
    "SetHalfSpace",
    "SetFile",
    "GridPayload",
    "JetEntry",
    "PointsFile",
    "AnalyzeRequest",
    "ConesRequest",
    "CheckRequest",
    "RegularizeRequest",
    "LinearRequest",
    "DecomposeRequest",
    "Report",
]


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class HalfSpaceEntry(StrictModel):
    """One constraint row: curvature upper triangle, drift, zero-order."""

    a: list[float]
    b: list[float]
    c: float = 0.0
    level: float = Field(0.0, alias="lambda")


class SpecFile(StrictModel):
    n: int
    kind: Literal[
        "halfspace_list", "builtin_psd", "builtin_parabola_a9", "builtin_laplacian"
    ]
    halfspaces: list[HalfSpaceEntry] = []
    name: str = ""


class OperatorFile(StrictModel):
    n: int
    a: list[list[float]]
    b: list[float] = [0.0, 0.0]
    c: float = 0.0
    level: float = Field(0.0, alias="lambda")
    floor: float = 1e-8


class SetHalfSpace(StrictModel):
    normal: list[float]
    offset: float = 0.0


class SetFile(StrictModel):
    d: int
    kind: Literal["halfspace_list", "generators", "builtin_parabola_a9"]
    halfspaces: list[SetHalfSpace] = []
    generators: list[list[float]] = []


class GridPayload(StrictModel):
    """Inline grid; values may use the string "-inf" as the bottom marker."""

    origin: list[float]
    spacing: Union[float, list[float]]
    values: list[Any]


class JetEntry(StrictModel):
    r: float
    p: list[float]
    a: list[float]


class PointsFile(StrictModel):
    jets: list[JetEntry]


class AnalyzeRequest(StrictModel):
    spec: SpecFile
    seed: int
    samples: int = 8
    include_timings: bool = False


class ConesRequest(StrictModel):
    set_spec: SetFile = Field(alias="set")
    seed: int
    samples: int = 50
    tol: float = 1e-9
    include_timings: bool = False


class CheckRequest(StrictModel):
    spec: SpecFile
    grid: GridPayload
    mode: Literal["c2", "visc", "dist"]
    seed: Optional[int] = None
    tol: Optional[float] = None
    eps: Optional[float] = None
    samples: int = 8
    include_timings: bool = False


class RegularizeRequest(StrictModel):
    grid: GridPayload
    radii: list[float]
    include_timings: bool = False


class LinearRequest(StrictModel):
    operator: OperatorFile
    battery: str = "all"
    seed: int
    eps: Optional[float] = None
    samples: int = 4
    include_timings: bool = False


class DecomposeRequest(StrictModel):
    spec: SpecFile
    jets: list[JetEntry]
    seed: int
    samples: int = 16
    tol: float = 1e-9
    include_timings: bool = False


class Report(StrictModel):
    command: str
    inputs: dict[str, Any]
    seed: Optional[int] = None
    verdicts: dict[str, Any]
    witnesses: dict[str, Any]
    timings: Optional[dict[str, float]] = None
