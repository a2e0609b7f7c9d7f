"""Result envelope and exit codes for informa CLI commands."""

from typing import Any
from pydantic import BaseModel, Field


class NextStep(BaseModel):
    """Suggested next command to run."""

    run: list[str]
    summary: str


class ResultEnvelope(BaseModel):
    """Standard result envelope for all informa commands."""

    version: str = Field(default="1.0")
    command: list[str]
    status: str
    code: str
    summary: str
    run_id: str
    duration_ms: int
    facts: dict[str, Any] = Field(default_factory=dict)
    next: list[NextStep] = Field(default_factory=list)


# Exit codes
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_INFORMATIVE = 2
EXIT_NUMERICAL = 3
