"""

BaseContext for every command.
Each command context holds its parsed flags plus the fields its steps fill in.

"""
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from modspace import Graph
from optimize import OptimizerConfig, RunResult


DENSE_MAX_N = 12
MASK_MAX_N = 64


# Base
class BaseContext(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    command: Optional[str] = None
    seed: int = 0
    out: Optional[str] = None
    artifacts: List[str] = Field(default_factory=list)


class OptimizerFlags(BaseContext):
    """Optimizer overrides shared by solve and success-table."""
    trials: int = Field(default=10, ge=1)
    sectors: List[Literal["even", "odd"]] = Field(default_factory=lambda: ["even", "odd"])
    lr: float = 0.05
    lr_min: float = 0.001
    patience: int = Field(default=50, ge=1)
    threshold: float = Field(default=1e-5, ge=0.0)
    readout_threshold: float = 0.5
    checkpoint_stride: int = Field(default=0, ge=0)
    blocks: Optional[int] = Field(default=None, ge=1)
    max_iterations: int = Field(default=20000, ge=1)
    decay_guard: Literal["once", "per_decay"] = "once"

    @field_validator("sectors", mode="before")
    @classmethod
    def _split_sectors(cls, value):
        if isinstance(value, str):
            return ["even", "odd"] if value == "both" else [s.strip() for s in value.split(",") if s.strip()]
        return value

    def optimizer_config(self) -> OptimizerConfig:
        return OptimizerConfig(
            lr_initial=self.lr,
            lr_min=self.lr_min,
            plateau_patience=self.patience,
            improvement_threshold=self.threshold,
            readout_threshold=self.readout_threshold,
            checkpoint_stride=self.checkpoint_stride,
            n_blocks=self.blocks,
            max_trials_per_sector=self.trials,
            max_iterations=self.max_iterations,
            decay_guard=self.decay_guard,
            sectors=self.sectors,
        )


# Contexts per command
class GenGraphContext(BaseContext):
    n: int = Field(ge=2, le=MASK_MAX_N)
    kind: Literal["3regular", "erdos_renyi"] = "3regular"
    p: float = Field(default=0.5, ge=0.0, le=1.0)
    weights: Literal["unit", "pm1"] = "unit"

    graph: Optional[Graph] = None
    path: Optional[str] = None


class SolveContext(OptimizerFlags):
    instance: Optional[str] = None          # local instance file
    remote: Optional[str] = None            # instance name in the remote library
    instance_url: Optional[str] = None
    n: Optional[int] = Field(default=None, ge=2, le=MASK_MAX_N)     # generate instead of load
    kind: Literal["3regular", "erdos_renyi"] = "3regular"
    p: float = Field(default=0.5, ge=0.0, le=1.0)
    weights: Literal["unit", "pm1"] = "unit"
    known_optimum: Optional[int] = None

    graph: Optional[Graph] = None
    reference_energy: Optional[int] = None
    reference_cut: Optional[int] = None
    result: Optional[RunResult] = None
    summary: Optional[Dict[str, Any]] = None

    @model_validator(mode="after")
    def _one_source(self):
        sources = [s for s in (self.instance, self.remote, self.n) if s is not None]
        if len(sources) != 1:
            raise ValueError("give exactly one of --instance, --remote or --n")
        return self


class SuccessTableContext(OptimizerFlags):
    """Sizes and instance counts of the success-rate table."""
    sizes: List[int] = Field(default_factory=lambda: [4, 8, 12])
    instances: int = Field(default=10, ge=1)
    workers: Optional[int] = Field(default=None, ge=1)

    jobs: List[Dict[str, Any]] = Field(default_factory=list)
    rows: List[Dict[str, Any]] = Field(default_factory=list)
    table: List[Dict[str, Any]] = Field(default_factory=list)

    @field_validator("sizes")
    @classmethod
    def _even_sizes(cls, sizes: List[int]) -> List[int]:
        for n in sizes:
            if n < 4 or n % 2 or n > MASK_MAX_N:
                raise ValueError(f"3-regular sizes must be even and within 4..{MASK_MAX_N}, got {n}")
        return sizes


class BenchContext(BaseContext):
    sizes: List[int] = Field(default_factory=lambda: [16, 24, 32, 40, 48])
    repetitions: int = Field(default=100, ge=1)
    blocks: Optional[int] = Field(default=None, ge=1)

    rows: List[Dict[str, Any]] = Field(default_factory=list)
    slope: Optional[float] = None

    @field_validator("sizes")
    @classmethod
    def _even_sizes(cls, sizes: List[int]) -> List[int]:
        for n in sizes:
            if n < 4 or n % 2 or n > MASK_MAX_N:
                raise ValueError(f"bench sizes must be even and within 4..{MASK_MAX_N}, got {n}")
        return sizes


class VerifyContext(BaseContext):
    sizes: List[int] = Field(default_factory=lambda: [4, 6, 8, 10])
    cases: int = Field(default=20, ge=1)
    inject_fault: bool = False

    checks: List[Dict[str, Any]] = Field(default_factory=list)
    passed: Optional[bool] = None

    @field_validator("sizes")
    @classmethod
    def _dense_sizes(cls, sizes: List[int]) -> List[int]:
        for n in sizes:
            if n < 4 or n % 2 or n > DENSE_MAX_N:
                raise ValueError(f"verification sizes must be even and within 4..{DENSE_MAX_N}, got {n}")
        return sizes
