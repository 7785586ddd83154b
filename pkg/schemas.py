"""
Pydantic Schemas
Workbench commands and the operation report shared by the CLI and the API
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

# ============================================================================
# COMMAND SCHEMAS
# ============================================================================

class CommandBody(BaseModel):
    """
    Arguments of one workbench operation

    args are expression strings (or rationals for euler-exp / binom);
    the remaining fields mirror the command-line flags.
    """

    args: List[str] = Field(default_factory=list, description="Positional arguments (expressions)")
    backend: Optional[str] = Field(None, description="lc, omega or ratfunc")
    at: Optional[str] = Field(None, description="Standard point, or a backend point for transfer")
    interval: Optional[List[str]] = Field(None, description="Interval endpoints [a, b]")
    digits: Optional[int] = Field(None, ge=1, le=200, description="Decimal digits for ivt")
    terms: Optional[int] = Field(None, ge=1, le=64, description="Binomial terms for binom")
    N: Optional[str] = Field(None, description="Hyperinteger rule in n (default n)")
    offset: Optional[str] = Field(None, description="Hyper-offset for sumthm: +q/N, -q/N or a rule in n")

    # Field configuration overrides
    truncation: Optional[int] = Field(None, description="truncation_order")
    precision: Optional[int] = Field(None, description="working_precision")
    cutoff: Optional[int] = Field(None, description="sequence_cutoff")
    tol: Optional[str] = Field(None, description="st_tolerance")

    decimal: Optional[int] = Field(None, ge=0, le=200, description="Print values as decimals with this many digits")

    model_config = ConfigDict(
        json_schema_extra={
            "examples": [
                {"args": ["x^2"], "at": "3", "backend": "lc"},
                {"args": ["1/n^2", "1/n"], "backend": "omega"},
                {"args": ["x^2-2"], "interval": ["1", "2"], "digits": 6},
            ]
        }
    )

    @field_validator("interval")
    @classmethod
    def validate_interval(cls, v):
        """Ensure interval has two endpoints"""
        if v is not None and len(v) != 2:
            raise ValueError("interval needs exactly two endpoints")
        return v

    def overrides(self) -> Dict[str, Any]:
        """FieldConfig overrides carried by the command"""
        return {
            "truncation_order": self.truncation,
            "working_precision": self.precision,
            "sequence_cutoff": self.cutoff,
            "st_tolerance": self.tol,
        }


class Command(CommandBody):
    verb: str = Field(..., description="Workbench verb, e.g. derive, compare, ivt")


# ============================================================================
# REPORT SCHEMAS
# ============================================================================

class OperationReport(BaseModel):
    """JSON shape of every operation: stable top-level field names"""

    model_config = ConfigDict(extra="forbid")

    operation: str
    inputs: Dict[str, Any]
    verdict: Optional[str] = None
    probes: List[Dict[str, Any]] = Field(default_factory=list)
    values: Dict[str, Any] = Field(default_factory=dict)
    tolerances: Dict[str, str] = Field(default_factory=dict)


class ErrorResponse(BaseModel):
    status: str = "error"
    error: str
    message: str
    remedy: str
