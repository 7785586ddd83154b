"""
Hyperfinite Router
Hyperfinite sums and products, Euler's passages, the sum-theorem probe and
the Cauchy / ultrapower quotient demonstration (sequence backend)
"""

from fastapi import APIRouter

from core.workbench import run_verb
from schemas import CommandBody, OperationReport

router = APIRouter(prefix="/hyperfinite", tags=["Hyperfinite"])


@router.post("/sum", response_model=OperationReport)
def hyperfinite_sum(body: CommandBody):
    """a_1 + ... + a_N; args: [rule in k], N: rule in n (default n)"""
    return run_verb("hsum", body)


@router.post("/product", response_model=OperationReport)
def hyperfinite_product(body: CommandBody):
    return run_verb("hprod", body)


@router.post("/euler-exp", response_model=OperationReport)
def euler_exponential(body: CommandBody):
    """(1 + kz/N)^N beside exp(kz); args: [k, z]"""
    return run_verb("euler-exp", body)


@router.post("/binomial", response_model=OperationReport)
def euler_binomial(body: CommandBody):
    """First `terms` binomial terms C(N, r) (kz/N)^r; args: [k, z]"""
    return run_verb("binom", body)


@router.post("/sum-theorem", response_model=OperationReport)
def sum_theorem(body: CommandBody):
    """Remainder of a series of continuous functions at x0 + offset; args: [u in k and x]"""
    return run_verb("sumthm", body)


@router.post("/ultrademo", response_model=OperationReport)
def ultrapower_demo(body: CommandBody):
    return run_verb("ultrademo", body)
