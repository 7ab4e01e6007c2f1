"""Exact arithmetic and linear algebra used throughout the package."""
from .scalars import GaussianRational, GR, ZERO, ONE, I, PiScalar, HbarSeries, as_gr
from .poly import HbarPoly, HBAR, POLY_ONE, POLY_ZERO, poly_matrix
from .smith import (
    HBAR_POLYS,
    INTEGERS,
    SmithDecomposition,
    integer_alternating_divisors,
    integer_kernel_basis,
    smith_normal_form,
)
from .linalg import (
    DimensionMismatch,
    Echelon,
    image_basis,
    kernel_basis,
    rank,
    subspace_quotient_dim,
)
from .modules import (
    CohomologyModule,
    CompositionNonzero,
    complex_cohomology_over_pid,
    truncated_cohomology,
)
