"""Matrix-valued trigonometric (Laurent) polynomials on the unit circle.

A MatFun stores a sparse map {k: m x n coefficient matrix} together with a
lazily cached grid of samples at the N-th roots of unity.  Coefficients are
the ground truth; the grid is the workhorse for pointwise products, SVDs and
divisions.  Rational intermediates (inner factors, best-approximation
errors) are kept as band-limited truncations with an explicit residual
budget, see band_limit().
"""

from __future__ import annotations

import numpy as np

from .errors import BandwidthError, DegenerateSymbolError, InputError, TruncationBudgetError

PRUNE_TOL = 1e-12
TRUNC_BAND = 64
TRUNC_BUDGET = 1e-9


def _as_matrix(a, m, n):
    mat = np.asarray(a, dtype=complex)
    if mat.shape != (m, n):
        raise InputError(f"coefficient has shape {mat.shape}, expected {(m, n)}")
    return mat


class MatFun:
    """Immutable matrix function with Laurent coefficients of finite band.

    The grid cache maps N -> array of shape (N, m, n) and is write-once per
    N, so instances are safe to share between threads.
    """

    __slots__ = ("rows", "cols", "coeffs", "_grids")

    def __init__(self, rows, cols, coeffs):
        if rows < 0 or cols < 0:
            raise InputError("matrix dimensions must be nonnegative")
        self.rows = int(rows)
        self.cols = int(cols)
        pruned = {}
        for k, c in coeffs.items():
            mat = _as_matrix(c, rows, cols)
            if mat.size and np.max(np.abs(mat)) > PRUNE_TOL:
                pruned[int(k)] = mat
        self.coeffs = pruned
        self._grids = {}

    # -- construction -----------------------------------------------------

    @classmethod
    def from_coeffs(cls, m, n, entries):
        """Build from a list of (k, matrix) pairs; repeated k merge additively."""
        acc = {}
        for k, c in entries:
            mat = _as_matrix(c, m, n)
            if k in acc:
                acc[k] = acc[k] + mat
            else:
                acc[k] = mat
        return cls(m, n, acc)

    @classmethod
    def constant(cls, mat):
        mat = np.atleast_2d(np.asarray(mat, dtype=complex))
        return cls(mat.shape[0], mat.shape[1], {0: mat})

    @classmethod
    def identity(cls, n):
        return cls.constant(np.eye(n))

    @classmethod
    def zero(cls, m, n):
        return cls(m, n, {})

    @classmethod
    def scalar(cls, coeffs):
        """Scalar function from {k: complex}."""
        return cls(1, 1, {k: np.array([[v]], dtype=complex) for k, v in coeffs.items()})

    @classmethod
    def z_power(cls, k, n=1):
        """z^k times the n x n identity."""
        return cls(n, n, {k: np.eye(n, dtype=complex)})

    # -- basic queries -----------------------------------------------------

    @property
    def shape(self):
        return (self.rows, self.cols)

    def is_zero(self):
        return not self.coeffs

    def bandwidth(self):
        """Largest |k| carrying a nonzero coefficient (0 for the zero function)."""
        if not self.coeffs:
            return 0
        return max(abs(k) for k in self.coeffs)

    def neg_band(self):
        return max((-k for k in self.coeffs if k < 0), default=0)

    def pos_band(self):
        return max((k for k in self.coeffs if k > 0), default=0)

    def coeff(self, k):
        c = self.coeffs.get(k)
        if c is None:
            return np.zeros((self.rows, self.cols), dtype=complex)
        return c

    def max_abs_coeff(self):
        if not self.coeffs:
            return 0.0
        return max(float(np.max(np.abs(c))) for c in self.coeffs.values())

    # -- grid --------------------------------------------------------------

    def default_grid(self):
        return default_grid_size(self.bandwidth())

    def samples(self, N=None):
        """Values at the N points exp(2*pi*i*l/N); cached per N."""
        if N is None:
            N = self.default_grid()
        return evaluate_grid(self, N)

    # -- arithmetic (pure, return new MatFun) --------------------------------

    def __add__(self, other):
        if self.shape != other.shape:
            raise InputError("shape mismatch in addition")
        acc = dict(self.coeffs)
        for k, c in other.coeffs.items():
            acc[k] = acc[k] + c if k in acc else c
        return MatFun(self.rows, self.cols, acc)

    def __sub__(self, other):
        return self + other.scale(-1.0)

    def scale(self, a):
        return MatFun(self.rows, self.cols, {k: a * c for k, c in self.coeffs.items()})

    def shift(self, j):
        """Multiplication by z^j."""
        return MatFun(self.rows, self.cols, {k + j: c for k, c in self.coeffs.items()})

    def analytic_part(self):
        return MatFun(self.rows, self.cols, {k: c for k, c in self.coeffs.items() if k >= 0})

    def antianalytic_part(self):
        return MatFun(self.rows, self.cols, {k: c for k, c in self.coeffs.items() if k < 0})

    def submatrix(self, rows, cols):
        rows = list(rows)
        cols = list(cols)
        return MatFun(len(rows), len(cols),
                      {k: c[np.ix_(rows, cols)] for k, c in self.coeffs.items()})

    def __repr__(self):
        ks = sorted(self.coeffs)
        return f"MatFun({self.rows}x{self.cols}, k={ks})"


def default_grid_size(K):
    """max(64, next power of two >= 8*(K+1)); oversampling margin for
    winding numbers and rational-function truncation."""
    N = 64
    while N < 8 * (K + 1):
        N *= 2
    return N


def evaluate_grid(f, N):
    """Values of f at the N-th roots of unity via FFT synthesis.

    N must be a power of two with N >= 2*(K+1) so that the band is
    recoverable from the samples.
    """
    N = int(N)
    if N & (N - 1) or N <= 0:
        raise BandwidthError(f"grid size {N} is not a power of two")
    if N < 2 * (f.bandwidth() + 1):
        raise BandwidthError(f"grid size {N} too small for bandwidth {f.bandwidth()}")
    cached = f._grids.get(N)
    if cached is not None:
        return cached
    spec = np.zeros((N, f.rows, f.cols), dtype=complex)
    for k, c in f.coeffs.items():
        spec[k % N] += c
    vals = N * np.fft.ifft(spec, axis=0)
    f._grids[N] = vals
    return vals


def fourier_coeffs(samples, band):
    """Inverse of evaluate_grid on band-limited input: coefficients for
    |k| <= band by discrete Fourier analysis."""
    samples = np.asarray(samples, dtype=complex)
    N = samples.shape[0]
    if N < 2 * (band + 1):
        raise BandwidthError(f"{N} samples cannot resolve band {band}")
    spec = np.fft.fft(samples, axis=0) / N
    out = {}
    for k in range(-band, band + 1):
        c = spec[k % N]
        if np.max(np.abs(c)) > PRUNE_TOL:
            out[k] = c
    return out


def from_samples(m, n, samples, band):
    return MatFun(m, n, fourier_coeffs(samples, band))


def band_limit(m, n, samples, band=TRUNC_BAND, budget=TRUNC_BUDGET, what="function"):
    """Band-limited truncation of grid samples with an honest error budget.

    Returns (MatFun, residual) where residual is the largest out-of-band
    Fourier coefficient magnitude.  Raises TruncationBudgetError when the
    tail exceeds the budget: rational intermediates whose poles creep toward
    the circle are rejected rather than silently mangled.
    """
    samples = np.asarray(samples, dtype=complex)
    N = samples.shape[0]
    band = min(band, N // 2 - 1)
    spec = np.fft.fft(samples, axis=0) / N
    inband = np.zeros(N, dtype=bool)
    for k in range(-band, band + 1):
        inband[k % N] = True
    tail = spec[~inband]
    residual = float(np.max(np.abs(tail))) if tail.size else 0.0
    if residual > budget:
        raise TruncationBudgetError(
            f"truncation residual {residual:.3e} of {what} exceeds budget {budget:.1e}")
    out = {}
    for k in range(-band, band + 1):
        c = spec[k % N]
        if np.max(np.abs(c)) > PRUNE_TOL:
            out[k] = c
    return MatFun(m, n, out), residual


def mat_multiply(f, g):
    """Pointwise matrix product; exact in coefficients.

    Small coefficient maps are convolved directly; large ones go through a
    grid big enough for the combined bandwidth, which is still exact for
    band-limited factors.
    """
    if f.cols != g.rows:
        raise InputError(f"inner dimensions {f.cols} and {g.rows} do not match")
    if len(f.coeffs) * len(g.coeffs) <= 4096:
        acc = {}
        for kf, cf in f.coeffs.items():
            for kg, cg in g.coeffs.items():
                k = kf + kg
                p = cf @ cg
                if k in acc:
                    acc[k] += p
                else:
                    acc[k] = p
        return MatFun(f.rows, g.cols, acc)
    K = f.bandwidth() + g.bandwidth()
    N = default_grid_size(K)
    vals = np.matmul(f.samples(N), g.samples(N))
    return from_samples(f.rows, g.cols, vals, K)


def adjoint(f):
    """adjoint(f)(z) = f(z)^*; coefficient k maps to conj-transpose of
    coefficient -k."""
    return MatFun(f.cols, f.rows,
                  {-k: np.conj(c.T) for k, c in f.coeffs.items()})


def transpose(f):
    return MatFun(f.cols, f.rows, {k: c.T for k, c in f.coeffs.items()})


def conj(f):
    return MatFun(f.rows, f.cols, {-k: np.conj(c) for k, c in f.coeffs.items()})


def hstack(funs):
    """Column-concatenate matrix functions of equal row count."""
    rows = funs[0].rows
    cols = sum(f.cols for f in funs)
    keys = set()
    for f in funs:
        if f.rows != rows:
            raise InputError("row count mismatch in hstack")
        keys |= set(f.coeffs)
    acc = {}
    for k in keys:
        acc[k] = np.concatenate([f.coeff(k) for f in funs], axis=1)
    return MatFun(rows, cols, acc)


def block_diag(funs, shape=None):
    """Block-diagonal assembly; zero-size blocks are allowed."""
    m = sum(f.rows for f in funs)
    n = sum(f.cols for f in funs)
    if shape is not None:
        m, n = shape
    keys = set()
    for f in funs:
        keys |= set(f.coeffs)
    acc = {}
    for k in keys:
        blk = np.zeros((m, n), dtype=complex)
        i = j = 0
        for f in funs:
            blk[i:i + f.rows, j:j + f.cols] = f.coeff(k)
            i += f.rows
            j += f.cols
        acc[k] = blk
    return MatFun(m, n, acc)


def pointwise_svd(f, N=None):
    """Full SVD of f at every grid point; singular values nonincreasing.

    Returns (svals, lvecs, rvecs) with shapes (N, min(m,n)), (N, m, m),
    (N, n, n)."""
    vals = f.samples(N)
    lvecs, svals, rvecs = np.linalg.svd(vals)
    return svals, lvecs, rvecs


def sup_norm(f, N=None):
    """max over the grid of the pointwise operator (spectral) norm."""
    if f.is_zero() or f.rows == 0 or f.cols == 0:
        return 0.0
    return float(np.max(np.linalg.svd(f.samples(N), compute_uv=False)))


def analyticity_defect(f):
    """max over k < 0 of the max-abs of coefficient k; zero iff analytic
    within the stored band."""
    neg = [float(np.max(np.abs(c))) for k, c in f.coeffs.items() if k < 0]
    return max(neg, default=0.0)


def coanalyticity_defect(f):
    pos = [float(np.max(np.abs(c))) for k, c in f.coeffs.items() if k > 0]
    return max(pos, default=0.0)


def winding_number(u, N=None):
    """Winding number of a nonvanishing scalar function around the origin.

    Total argument increment over the grid divided by 2*pi.  The grid is
    refined (doubled) while successive arguments jump by more than ~pi/2,
    which certifies the count for band-limited symbols.
    """
    if u.shape != (1, 1):
        raise InputError("winding_number needs a scalar function")
    if N is None:
        N = u.default_grid()
    while True:
        vals = u.samples(N)[:, 0, 0]
        mags = np.abs(vals)
        if np.min(mags) < max(1e-10, 1e-8 * np.max(mags)):
            raise DegenerateSymbolError("symbol vanishes (numerically) on the grid")
        args = np.angle(vals)
        inc = np.diff(np.concatenate([args, args[:1]]))
        inc = (inc + np.pi) % (2 * np.pi) - np.pi
        if np.max(np.abs(inc)) < 0.5 * np.pi:
            total = float(np.sum(inc)) / (2 * np.pi)
            wind = int(round(total))
            if abs(total - wind) > 1e-6:
                raise DegenerateSymbolError(f"winding estimate {total} is not near an integer")
            return wind
        if N >= 1 << 16:
            raise DegenerateSymbolError("argument increments did not settle under refinement")
        N *= 2
