"""Learning partially unitary mappings u (D x n, u u^T = I) that maximize a
quadratic fidelity, via a constrained eigenproblem iteration."""

from ._pulearn import *  # noqa: F401,F403
from ._pulearn import (
    Channel,
    DegenerateError,
    Error,
    InputError,
    Sample,
    SolverConfig,
)

__all__ = [name for name in dir() if not name.startswith("_")]
