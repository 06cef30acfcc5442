"""Superoptimal analytic approximation of matrix functions on the circle.

Computes Nehari best approximations, superoptimal singular values and the
canonical (and partial canonical) factorizations of the error function,
together with balanced unitary completions, Wiener-Hopf index profiles and
a theorem-by-theorem numerical verification layer.
"""

from .laurent import (
    MatFun,
    adjoint,
    analyticity_defect,
    band_limit,
    block_diag,
    coanalyticity_defect,
    conj,
    default_grid_size,
    evaluate_grid,
    fourier_coeffs,
    hstack,
    mat_multiply,
    pointwise_svd,
    sup_norm,
    transpose,
    winding_number,
)

__version__ = "0.1.0"
