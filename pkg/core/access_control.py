"""
Access Control Logic
Verb and backend validation
"""

from typing import List

from core.errors import UnsupportedBackend

ALL_BACKENDS = ["lc", "omega", "ratfunc"]

BACKEND_ACCESS_MATRIX = {
    "derive": ALL_BACKENDS,
    "derive2": ALL_BACKENDS,
    "cont": ALL_BACKENDS,
    "ucont": ["lc"],
    "classify": ALL_BACKENDS,
    "compare": ALL_BACKENDS,
    "st": ALL_BACKENDS,
    "euler-exp": ["omega"],
    "binom": ["omega"],
    "hsum": ["omega"],
    "hprod": ["omega"],
    "ivt": ["lc"],
    "sumthm": ["omega"],
    "transfer": ALL_BACKENDS,
    "ultrademo": ["omega"],
}

VERBS = list(BACKEND_ACCESS_MATRIX)


def validate_verb(verb: str) -> bool:
    """Validate if verb is known"""
    if verb not in BACKEND_ACCESS_MATRIX:
        raise UnsupportedBackend(f"unknown verb '{verb}'", f"choose one of: {', '.join(VERBS)}")
    return True


def validate_backend_access(verb: str, backend: str) -> bool:
    """Validate if the backend supports a verb"""
    validate_verb(verb)
    allowed = BACKEND_ACCESS_MATRIX[verb]
    if backend not in allowed:
        raise UnsupportedBackend(
            f"'{verb}' is not available on backend '{backend}'",
            f"use --backend {' or --backend '.join(allowed)}",
        )
    return True


def get_allowed_backends(verb: str) -> List[str]:
    """Get list of backends a verb can run on"""
    return BACKEND_ACCESS_MATRIX.get(verb, [])


def default_backend(verb: str) -> str:
    """The first allowed backend, used when none is given"""
    return get_allowed_backends(verb)[0] if verb in BACKEND_ACCESS_MATRIX else "lc"
