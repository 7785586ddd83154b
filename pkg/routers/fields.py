"""
Fields Router
Classification, comparison and standard parts in the three backends
"""

from fastapi import APIRouter

from core.workbench import run_verb
from schemas import CommandBody, OperationReport

router = APIRouter(prefix="/fields", tags=["Fields"])

# ============================================================================
# ENDPOINTS
# ============================================================================

@router.post("/classify", response_model=OperationReport)
def classify(body: CommandBody):
    """
    Classify one element: Zero / Infinitesimal / Appreciable / Infinite,
    its sign and, for infinitesimals and infinities, its order

    args: [element] written with x = eps (lc), x = X (ratfunc) or n (omega)
    """
    return run_verb("classify", body)


@router.post("/compare", response_model=OperationReport)
def compare(body: CommandBody):
    """
    Compare two elements

    On the sequence backend the verdict is Less / Greater / EventuallyEqual
    only when a cofinite pattern decides it; otherwise Undecided (HTTP 200,
    verdict "Undecided").
    """
    return run_verb("compare", body)


@router.post("/st", response_model=OperationReport)
def standard_part(body: CommandBody):
    """Standard part of a finite element"""
    return run_verb("st", body)
