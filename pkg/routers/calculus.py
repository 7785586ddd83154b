"""
Calculus Router
Derivatives, continuity probes, decimal root finding and transfer checks
"""

from fastapi import APIRouter

from core.workbench import run_verb
from schemas import CommandBody, OperationReport

router = APIRouter(prefix="/calculus", tags=["Calculus"])

# ============================================================================
# DIFFERENTIAL RATIOS
# ============================================================================

@router.post("/derive", response_model=OperationReport)
def derive(body: CommandBody):
    """
    st(dy/dx) at a standard point

    Example body: {"args": ["x^2"], "at": "3", "backend": "lc"}
    """
    return run_verb("derive", body)


@router.post("/second-derivative", response_model=OperationReport)
def derive_second(body: CommandBody):
    """st of the second difference ratio"""
    return run_verb("derive2", body)

# ============================================================================
# CONTINUITY
# ============================================================================

@router.post("/cont", response_model=OperationReport)
def continuity(body: CommandBody):
    """Infinitely small increments at a standard point"""
    return run_verb("cont", body)


@router.post("/ucont", response_model=OperationReport)
def uniform_continuity(body: CommandBody):
    """Microcontinuity at hyperpoints of an open interval (lc only)"""
    return run_verb("ucont", body)

# ============================================================================
# ROOTS AND TRANSFER
# ============================================================================

@router.post("/ivt", response_model=OperationReport)
def intermediate_value(body: CommandBody):
    """Decimal digits of a zero by 10-part subdivision"""
    return run_verb("ivt", body)


@router.post("/transfer", response_model=OperationReport)
def transfer(body: CommandBody):
    """
    Spot-check an identity lhs = rhs at backend points

    A NoTransfer finding is a report (HTTP 200, verdict "NoTransfer"), not an error.
    """
    return run_verb("transfer", body)
