"""Pydantic schemas for the JSON input files (tables and scenario grids)."""
from __future__ import annotations

from typing import Annotated, Optional

from pydantic import BaseModel, ConfigDict, Field

Count = Annotated[int, Field(strict=True, ge=0)]


class GroupEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    label: Optional[str] = None
    bilateral: tuple[Count, Count, Count]
    unilateral: tuple[Count, Count] = (0, 0)


class TableFile(BaseModel):
    groups: list[GroupEntry]


class BootstrapEntry(BaseModel):
    n_boot: int = Field(default=2000, ge=1)
    max_regen: int = Field(default=100, ge=0)


class ScenarioEntry(BaseModel):
    """One Monte Carlo scenario; kappa is a scalar (null) or per-group list (alternative)."""

    model_config = ConfigDict(extra="forbid")

    name: Optional[str] = None
    model: str
    fitted_model: Optional[str] = None
    pis: list[Annotated[float, Field(gt=0.0, lt=1.0)]]
    kappa: float | list[float]
    m_plus: int = Field(ge=0)
    n_plus: int = Field(ge=0)
    alpha: float = Field(default=0.05, gt=0.0, lt=1.0)
    n_rep: int = Field(default=10_000, ge=1)
    methods: list[str] = Field(default_factory=lambda: ["g2", "x2", "x2adj"])
    bootstrap: BootstrapEntry = Field(default_factory=BootstrapEntry)


class ScenarioFile(BaseModel):
    seed: Optional[int] = None
    scenarios: list[ScenarioEntry]
