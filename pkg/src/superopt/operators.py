"""Finite block Hankel and Toeplitz truncations of H_Phi and T_Phi.

For a symbol of bandwidth K the Hankel operator has finite rank and the
K-block truncation is exact, so its SVD delivers the true singular triples.
Toeplitz kernels are computed from rectangular truncations (all rows a
polynomial argument can reach) and certified by a stabilization loop over
the domain degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import laurent
from .errors import (
    BandwidthError,
    InputError,
    NotUnitaryError,
    TruncationInstabilityError,
)
from .laurent import MatFun

RANK_ATOL = 1e-10
RANK_RTOL = 1e-10


@dataclass
class BlockOperatorMatrix:
    """Dense truncation of a block Hankel or Toeplitz operator.

    trunc is the number of block columns (polynomial degree cutoff on the
    domain side); the dense matrix has codomain_trunc block rows.
    """

    kind: str  # "hankel" | "toeplitz"
    symbol: MatFun
    trunc: int
    codomain_trunc: int
    dense: np.ndarray
    _triples: tuple | None = field(default=None, repr=False)

    def singular_triples(self):
        return singular_triples(self)


def hankel_truncation(symbol):
    """Exact dense matrix of H_symbol; block (i, j) is coefficient -(i+j+1).

    An analytic symbol yields the 0 x 0 matrix (the operator is zero).
    """
    m, n = symbol.shape
    K = symbol.neg_band()
    dense = np.zeros((m * K, n * K), dtype=complex)
    for i in range(K):
        for j in range(K - i):
            c = symbol.coeffs.get(-(i + j + 1))
            if c is not None:
                dense[i * m:(i + 1) * m, j * n:(j + 1) * n] = c
    return BlockOperatorMatrix("hankel", symbol, K, K, dense)


def toeplitz_truncation(symbol, T):
    """Square (m*T) x (n*T) block Toeplitz truncation, block (i, j) =
    coefficient (i - j)."""
    if T < symbol.bandwidth():
        raise BandwidthError(f"truncation {T} below bandwidth {symbol.bandwidth()}")
    dense = _toeplitz_dense(symbol, T, T)
    return BlockOperatorMatrix("toeplitz", symbol, T, T, dense)


def _toeplitz_dense(symbol, T, Tprime):
    m, n = symbol.shape
    dense = np.zeros((m * Tprime, n * T), dtype=complex)
    for k, c in symbol.coeffs.items():
        for j in range(T):
            i = j + k
            if 0 <= i < Tprime:
                dense[i * m:(i + 1) * m, j * n:(j + 1) * n] = c
    return dense


def toeplitz_rect(symbol, T):
    """Rectangular truncation with every reachable codomain row present.

    For a polynomial argument of degree < T the product P_+(symbol * f) has
    degree < T + pos_band, so the kernel of this matrix is exactly the set
    of polynomial kernel vectors of T_symbol of degree < T (no spurious
    top-degree kernel vectors).
    """
    Tprime = T + symbol.pos_band()
    dense = _toeplitz_dense(symbol, T, Tprime)
    return BlockOperatorMatrix("toeplitz", symbol, T, Tprime, dense)


def singular_triples(op):
    """Full SVD of the dense truncation, values nonincreasing.

    For Hankel kind these are exactly the singular values of the operator.
    Right singular vectors reinterpret as polynomial vector functions via
    coefvec_to_matfun.
    """
    if op._triples is None:
        if op.dense.size == 0:
            rows, cols = op.dense.shape
            op._triples = (np.zeros(0), np.zeros((rows, 0)), np.zeros((cols, 0)))
        else:
            u, s, vh = np.linalg.svd(op.dense)
            op._triples = (s, u, vh.conj().T)
    return op._triples


def operator_norm(op):
    svals = singular_triples(op)[0]
    return float(svals[0]) if svals.size else 0.0


def hankel_norm(symbol):
    return operator_norm(hankel_truncation(symbol))


def hankel_svals(symbol):
    return singular_triples(hankel_truncation(symbol))[0]


class EssentialNormNote(NamedTuple):
    value: float
    note: str


def essential_norm_note(symbol):
    """Essential norm of H_symbol for a trigonometric-polynomial symbol.

    Such symbols are continuous, hence within H-infinity + C, so the
    essential norm is 0 and the standing gap hypothesis holds whenever the
    Hankel norm is positive.
    """
    return EssentialNormNote(
        0.0, "band-limited symbol is continuous; distance to H^inf+C is 0")


def coefvec_to_matfun(vec, n, T):
    """Interpret a stacked coefficient vector (blocks of size n per degree)
    as an n x 1 polynomial vector function of degree < T."""
    vec = np.asarray(vec, dtype=complex).reshape(T, n)
    return MatFun(n, 1, {k: vec[k].reshape(n, 1) for k in range(T)})


def matfun_to_coefvec(f, T):
    if f.cols != 1:
        raise InputError("expected a column function")
    out = np.zeros(T * f.rows, dtype=complex)
    for k, c in f.coeffs.items():
        if not 0 <= k < T:
            raise InputError("column function exceeds the degree cap")
        out[k * f.rows:(k + 1) * f.rows] = c[:, 0]
    return out


def orthonormal_cols(cols, tol=1e-12):
    """Orthonormal basis of span(cols) via SVD (gauge not fixed)."""
    cols = np.asarray(cols, dtype=complex)
    if cols.size == 0 or cols.shape[1] == 0:
        return cols.reshape(cols.shape[0], 0)
    u, s, _ = np.linalg.svd(cols, full_matrices=False)
    rank = int(np.sum(s > max(tol, tol * s[0])))
    return u[:, :rank]


def phase_fix(cols, tol=1e-8):
    """Rotate each column so its first significant entry is real positive."""
    cols = np.array(cols, dtype=complex)
    for j in range(cols.shape[1]):
        c = cols[:, j]
        big = np.abs(c) > tol * np.max(np.abs(c))
        i = int(np.argmax(big))
        ph = c[i]
        if abs(ph) > 0:
            cols[:, j] = c * (np.conj(ph) / abs(ph))
    return cols


def canonical_subspace_basis(cols, tol=1e-12):
    """Deterministic, gauge-invariant orthonormal basis of span(cols).

    Pivot coordinates are chosen by pivoted Cholesky of the orthogonal
    projector (leverage scores), which depends only on the subspace; the
    basis is the Gram-Schmidt of the echelon form over those pivots with
    real positive pivot diagonal.  Any two bases of the same subspace map
    to the same output; this is the gauge fix used for inner factors.
    Intended for small subspaces (the pivot block stays well conditioned).
    """
    q = orthonormal_cols(cols, tol)
    rank = q.shape[1]
    if rank == 0:
        return q
    proj = q @ q.conj().T
    diag = np.real(np.diag(proj)).copy()
    L = np.zeros((proj.shape[0], rank), dtype=complex)
    pivots = []
    for j in range(rank):
        # round leverage scores so gauge-level rounding noise cannot flip
        # the pivot choice between tied coordinates
        i = int(np.argmax(np.round(diag, 9)))
        d = diag[i]
        if d <= 1e-14:
            break
        col = proj[:, i] - L[:, :j] @ np.conj(L[i, :j])
        L[:, j] = col / np.sqrt(d)
        diag = np.maximum(diag - np.abs(L[:, j]) ** 2, 0.0)
        pivots.append(i)
    block = q[pivots, :]
    echelon = q @ np.linalg.inv(block)
    qq, r = np.linalg.qr(echelon)
    phases = np.diag(r).copy()
    phases = np.where(np.abs(phases) > 0, phases / np.abs(phases), 1.0)
    return qq * np.conj(phases)


def _kernel_cols(symbol, T, tol):
    op = toeplitz_rect(symbol, T)
    if op.dense.size == 0:
        return np.eye(symbol.cols * T, dtype=complex)
    u, s, vh = np.linalg.svd(op.dense)
    smax = s[0] if s.size else 0.0
    thresh = max(tol, tol * smax) if smax > 0 else tol
    ncols = symbol.cols * T
    rank = int(np.sum(s > thresh))
    return vh.conj().T[:, rank:ncols]


def kernel_profile(symbol, tol=RANK_ATOL, T0=None, Tmax=None):
    """Numerical kernel dimensions of T_symbol over growing domain degree.

    Returns (Ts, dims, T_final).  Stabilization: the per-step increment
    dim(T+2) - dim(T) must repeat twice; finite kernels settle at increment
    0, Beurling-type kernels at a constant growth rate.
    """
    K = symbol.bandwidth()
    if T0 is None:
        T0 = K + 8
    if Tmax is None:
        Tmax = K + 64
    Ts, dims = [], []
    T = T0
    while T <= Tmax:
        Ts.append(T)
        dims.append(_kernel_cols(symbol, T, tol).shape[1])
        if len(dims) >= 3:
            d1 = dims[-1] - dims[-2]
            d2 = dims[-2] - dims[-3]
            if d1 == d2:
                return Ts, dims, T
        T += 2
    raise TruncationInstabilityError(
        f"kernel dimension of T_symbol did not stabilize below degree {Tmax}: {dims}")


def kernel_basis(op, tol=RANK_ATOL):
    """Orthonormal polynomial basis of the numerical kernel of a Toeplitz
    operator, reported only after the dimension growth pattern stabilizes.

    Vectors carry the deterministic phase convention (first significant
    coefficient real positive) and are ordered by lowest degree.
    """
    if op.kind != "toeplitz":
        raise InputError("kernel_basis expects a Toeplitz truncation")
    symbol = op.symbol
    Ts, dims, T = kernel_profile(symbol, tol, T0=max(op.trunc, symbol.bandwidth() + 2))
    cols = phase_fix(orthonormal_cols(_kernel_cols(symbol, T, tol)))
    funs = [coefvec_to_matfun(cols[:, j], symbol.cols, T) for j in range(cols.shape[1])]
    return sorted(funs, key=lambda f: (max(f.coeffs, default=0), min(f.coeffs, default=0)))


def stable_kernel_dim(symbol, tol=RANK_ATOL):
    """Dimension of Ker T_symbol, requiring the finite-kernel pattern
    (increment 0 twice in a row)."""
    Ts, dims, _ = kernel_profile(symbol, tol)
    if dims[-1] != dims[-2]:
        raise TruncationInstabilityError(
            f"kernel of T_symbol keeps growing ({dims}); not a finite kernel")
    return dims[-1]


def unitarity_defect(symbol, N=None):
    """max over the grid of || U(z)^* U(z) - I ||."""
    vals = symbol.samples(N)
    gram = np.matmul(np.conj(np.swapaxes(vals, 1, 2)), vals)
    return float(np.max(np.abs(gram - np.eye(symbol.cols))))


def toeplitz_index(symbol, tol=RANK_ATOL, unitary_tol=1e-8):
    """ind T_symbol = dim Ker T_symbol - dim Ker T_symbol* for a
    unitary-valued symbol (Fredholm since band-limited symbols are
    continuous)."""
    if symbol.rows != symbol.cols:
        raise InputError("index needs a square symbol")
    defect = unitarity_defect(symbol)
    if defect > unitary_tol:
        raise NotUnitaryError(f"symbol is not unitary-valued (defect {defect:.3e})")
    dim_ker = stable_kernel_dim(symbol, tol)
    dim_coker = stable_kernel_dim(laurent.adjoint(symbol), tol)
    return dim_ker - dim_coker
