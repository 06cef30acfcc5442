"""Wiener-Hopf index profiles and badly-approximable classification.

Indices of a unitary-valued symbol are recovered from kernel dimensions of
the shifted Toeplitz operators T_{z^k U}: for nondecreasing integers d_j,

    dim Ker T_{z^k U} = sum_j max(0, -d_j - k),

and the profile over a window of shifts pins the d_j uniquely.  The
factors Q1, Q2 of the factorization itself are never constructed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import laurent
from .errors import InputError, InternalConsistencyError, NotUnitaryError
from .laurent import MatFun
from .operators import (
    stable_kernel_dim,
    toeplitz_index,
    unitarity_defect,
)


@dataclass
class WienerHopfIndices:
    """Nondecreasing index vector d_1 <= ... <= d_n with the count of
    negative entries."""

    indices: list
    negative_count: int

    def index_of_toeplitz(self):
        return -sum(self.indices)


def wh_indices(U, tol=1e-8):
    """Index vector of a unitary-valued square symbol.

    Probes dim Ker T_{z^k U} over the (adaptively located) window of
    shifts where the kernel is active; the recovered nondecreasing
    integers must reproduce the observed profile exactly, otherwise the
    truncation is declared inconsistent.
    """
    n = U.rows
    if U.rows != U.cols:
        raise InputError("Wiener-Hopf indices need a square symbol")
    defect = unitarity_defect(U)
    if defect > tol:
        raise NotUnitaryError(f"symbol is not unitary-valued (defect {defect:.3e})")
    cap = U.bandwidth() + 5

    # k_hi: first shift with trivial kernel (= max(0, -d_1));
    # k_lo: same on the adjoint side (= max(0, d_n))
    k_hi = 0
    while stable_kernel_dim(U.shift(k_hi)) > 0:
        k_hi += 1
        if k_hi > cap:
            raise InternalConsistencyError("kernel of T_{z^k U} never empties; "
                                           "symbol is not Fredholm-like")
    Uadj = laurent.adjoint(U)
    k_lo = 0
    while stable_kernel_dim(Uadj.shift(k_lo)) > 0:
        k_lo += 1
        if k_lo > cap:
            raise InternalConsistencyError("cokernel of T_{z^k U} never empties; "
                                           "symbol is not Fredholm-like")

    profile = {}
    for k in range(-k_lo - 1, k_hi + 1):
        profile[k] = stable_kernel_dim(U.shift(k))
    # counts[s] = #{j : d_j <= s} from first differences of the profile
    indices = []
    for s in range(-k_hi, k_lo + 1):
        count = profile[-s - 1] - profile[-s]
        while count > len(indices) and len(indices) < n:
            indices.append(s)
    if len(indices) != n:
        raise InternalConsistencyError(
            f"kernel profile {profile} is not consistent with {n} indices")
    for k, dim in profile.items():
        predicted = sum(max(0, -d - k) for d in indices)
        if predicted != dim:
            raise InternalConsistencyError(
                f"kernel profile mismatch at shift {k}: saw {dim}, predicted {predicted}")
    neg = sum(1 for d in indices if d < 0)
    return WienerHopfIndices(indices, neg)


def is_badly_approximable_scalar(phi, tol=1e-8):
    """Scalar test: constant modulus on the grid and ind T_{phi/|phi|} >= 1."""
    if phi.shape != (1, 1):
        raise InputError("expected a scalar function")
    if phi.is_zero():
        return False
    vals = phi.samples()[:, 0, 0]
    mags = np.abs(vals)
    top = float(np.max(mags))
    if np.max(np.abs(mags - top)) > tol * top:
        return False
    return toeplitz_index(phi.scale(1.0 / top)) >= 1


def is_very_badly_approximable_unitary(U, tol=1e-8):
    """Thm-style classification of a unitary-valued symbol.

    Three equivalent criteria are computed and must agree: all Wiener-Hopf
    indices negative; T_{zU} has dense range; T_{zbar U*} has trivial
    kernel.
    """
    idx = wh_indices(U, tol)
    by_indices = idx.negative_count == U.rows

    zU = U.shift(1)
    # dense range of T_{zU}  <=>  trivial cokernel
    by_dense_range = stable_kernel_dim(laurent.adjoint(zU)) == 0
    # trivial kernel of T_{zbar U*}
    by_kernel = stable_kernel_dim(laurent.adjoint(U).shift(-1)) == 0

    if not (by_indices == by_dense_range == by_kernel):
        raise InternalConsistencyError(
            f"classification criteria disagree: indices={by_indices}, "
            f"dense_range={by_dense_range}, kernel={by_kernel}")
    return by_indices
