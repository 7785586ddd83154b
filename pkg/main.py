"""
FastAPI Application
Infinitesimal Calculus Workbench - HTTP API over the Levi-Civita, sequence
and rational-function backends
"""

import logging

from fastapi import FastAPI, Request, status
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from config import API_VERSION, DEBUG, HOST, PORT
from core.access_control import BACKEND_ACCESS_MATRIX
from core.errors import BTrackError
from routers import calculus, fields, hyperfinite

logger = logging.getLogger(__name__)

# ============================================================================
# APP CONFIGURATION
# ============================================================================

app = FastAPI(
    title="Infinitesimal Calculus Workbench API",
    description="""
    Calculus with actual infinitesimals over three ordered-field backends.

    ## 🎯 Backends

    * **lc** - truncated Levi-Civita series in eps, exact rational coefficients
    * **omega** - rational sequences modulo cofinite agreement, with explicit *Undecided*
    * **ratfunc** - rational functions in x ordered at infinity (no transfer principle)

    ## 🧮 Operations

    * **Fields** - classify, compare, standard part
    * **Calculus** - st(dy/dx), continuity and microcontinuity probes, decimal IVT, transfer checks
    * **Hyperfinite** - hyperfinite sums/products, Euler's (1 + kz/N)^N, sum-theorem probe

    Every operation returns the same report shape:
    `{operation, inputs, verdict, probes, values, tolerances}`.
    Engine errors return `{status, error, message, remedy}`.
    """,
    version=API_VERSION,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_methods=["*"],
    allow_headers=["*"],
)

# ============================================================================
# ERROR HANDLERS
# ============================================================================

@app.exception_handler(BTrackError)
async def engine_error_handler(request: Request, exc: BTrackError):
    """Render engine errors with their own HTTP status"""
    logger.info(f"⚠️ {request.url.path}: {exc.name}: {exc.message}")
    return JSONResponse(status_code=exc.http_status, content=exc.to_dict())


@app.exception_handler(404)
async def not_found_handler(request: Request, exc):
    """Handle 404 Not Found errors"""
    return JSONResponse(
        status_code=status.HTTP_404_NOT_FOUND,
        content={
            "status": "error",
            "message": "Endpoint not found",
            "detail": f"Path '{request.url.path}' is not available",
            "available_docs": "/docs",
        },
    )


@app.exception_handler(500)
async def internal_error_handler(request: Request, exc):
    """Handle 500 Internal Server errors"""
    logger.exception(f"🔴 500 on {request.method} {request.url.path}: {exc}")
    return JSONResponse(
        status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
        content={
            "status": "error",
            "message": "Internal server error",
            "detail": str(exc),
        },
    )

# ============================================================================
# ROUTERS
# ============================================================================

app.include_router(fields.router)
app.include_router(calculus.router)
app.include_router(hyperfinite.router)

# ============================================================================
# ROOT ENDPOINTS
# ============================================================================

@app.get("/", tags=["Root"])
def read_root():
    """
    Root endpoint - API information
    """
    return {
        "name": "Infinitesimal Calculus Workbench API",
        "version": API_VERSION,
        "status": "running",
        "backends": ["lc", "omega", "ratfunc"],
        "verbs": BACKEND_ACCESS_MATRIX,
        "docs": "/docs",
        "endpoints": {
            "fields": "/fields - classify, compare, st",
            "calculus": "/calculus - derive, second-derivative, cont, ucont, ivt, transfer",
            "hyperfinite": "/hyperfinite - sum, product, euler-exp, binomial, sum-theorem, ultrademo",
        },
    }


@app.get("/health", tags=["Root"])
def health_check():
    """
    Health check endpoint

    Used by monitoring tools to check if API is running
    """
    return {"status": "ok", "service": "infinitesimal-workbench", "version": API_VERSION}

# ============================================================================
# STARTUP EVENTS
# ============================================================================

@app.on_event("startup")
async def startup_event():
    """Run on application startup"""
    logger.info(f"🚀 Infinitesimal Calculus Workbench API v{API_VERSION} starting")
    logger.info(f"📚 Docs: http://{HOST}:{PORT}/docs")

# ============================================================================
# RUN SERVER (Development)
# ============================================================================

if __name__ == "__main__":
    import uvicorn

    uvicorn.run("main:app", host=HOST, port=PORT, reload=DEBUG, log_level="info")
