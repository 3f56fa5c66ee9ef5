"""Numerical laboratory for trilinear invariant functionals on PGL(2, R).

The package evaluates the reduced kernel, the rank-one Hermitian forms on
diagonally K-invariant vectors, their Airy-type asymptotics, the Beta-integral
normal forms used to derive them, van der Corput style bounds, and a
synthetic-spectrum sandbox for the dyadic summation argument.
"""

from triperiod.errors import ContractError, DomainError, RangeError, SingularityError
from triperiod.repn import (
    CircleFunction,
    RepParams,
    SpectralParam,
    TestVector,
    eval_kernel,
    make_test_vector,
)

__version__ = "0.1.0"

__all__ = [
    "CircleFunction",
    "ContractError",
    "DomainError",
    "RangeError",
    "RepParams",
    "SingularityError",
    "SpectralParam",
    "TestVector",
    "eval_kernel",
    "make_test_vector",
]
