"""Inner-outer factorization, z-invariant subspaces and balanced completions.

The computational primitives are the Fejer-Riesz spectral factorization of a
nonnegative trigonometric polynomial and the wandering subspace M (-) zM of
a z-invariant polynomial span.  A balanced completion of an inner co-outer
Upsilon is the wandering basis of Ker T_{Upsilon^t}, which by Beurling-Lax
is the inner function generating that kernel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import laurent
from .errors import (
    BandwidthError,
    CompletionFailureError,
    DegenerateSymbolError,
    InputError,
    InternalConsistencyError,
    NotInnerError,
    NotNonnegativeError,
    TruncationInstabilityError,
    ZeroInputError,
)
from .laurent import MatFun, band_limit, conj, hstack, mat_multiply, transpose
from .operators import (
    canonical_subspace_basis,
    kernel_profile,
    matfun_to_coefvec,
    orthonormal_cols,
    unitarity_defect,
    _kernel_cols,
)

DEGREE_CAP = 32
DEGREE_CAP_MAX = 120


def fejer_riesz_outer(t, tol=1e-9):
    """Outer h with |h|^2 = t for a nonnegative scalar trig polynomial.

    Standard root-splitting of the associated algebraic polynomial
    z^K t(z): roots off the circle pair up as (rho, 1/conj(rho)) and the
    outer factor collects those with |rho| >= 1, boundary zeros (even
    order since t >= 0) being split evenly.  Normalized so h(0) > 0.
    """
    if t.shape != (1, 1):
        raise InputError("fejer_riesz_outer expects a scalar function")
    N = max(t.default_grid(), 64)
    vals = t.samples(N)[:, 0, 0]
    scale = float(np.max(np.abs(vals))) if vals.size else 0.0
    if scale == 0.0:
        raise ZeroInputError("cannot factor the zero function")
    if np.max(np.abs(vals.imag)) > tol * max(1.0, scale):
        raise NotNonnegativeError("symbol is not real on the circle")
    if np.min(vals.real) < -tol * max(1.0, scale):
        raise NotNonnegativeError(
            f"symbol attains {np.min(vals.real):.3e} on the circle")

    # trim negligible leading coefficients so the companion matrix is sane
    K = t.pos_band()
    while K > 0 and np.max(np.abs(t.coeff(K))) < 1e-11 * scale:
        K -= 1
    if K == 0:
        c = np.sqrt(np.mean(vals.real))
        return MatFun.scalar({0: c})

    p = np.array([t.coeff(j)[0, 0] for j in range(K, -K - 1, -1)], dtype=complex)
    roots = np.roots(p)
    roots = _polish_roots(p, roots)
    selected = _select_outer_roots(roots, K, t)
    q = np.poly(selected)  # monic, highest degree first
    qfun = MatFun.scalar({k: q[K - k] for k in range(K + 1)})
    qvals = qfun.samples(N)[:, 0, 0]
    gamma = np.sqrt(np.sum(vals.real) / np.sum(np.abs(qvals) ** 2))
    h0 = qfun.scale(gamma)
    phase = h0.coeff(0)[0, 0]
    if abs(phase) > 0:
        h0 = h0.scale(np.conj(phase) / abs(phase))
    hvals = h0.samples(N)[:, 0, 0]
    defect = float(np.max(np.abs(np.abs(hvals) ** 2 - vals.real)))
    if defect > 1e-8 * max(1.0, scale):
        raise InternalConsistencyError(
            f"spectral factor mismatch {defect:.3e}; ill-conditioned roots")
    return h0


def _polish_roots(p, roots):
    dp = np.polyder(p)
    for _ in range(2):
        num = np.polyval(p, roots)
        den = np.polyval(dp, roots)
        ok = np.abs(den) > 1e-300
        roots = np.where(ok, roots - num / np.where(ok, den, 1.0), roots)
    return roots


def _select_outer_roots(roots, K, t, band=1e-6):
    """Pick the K roots of the outer factor.

    Roots clearly off the circle are kept when |rho| > 1.  Near-circle
    roots are even-order zeros of the nonnegative symbol, i.e. simple
    zeros of dt/dtheta, so their angles are re-solved by Newton on the
    derivative, which recovers them to machine precision.
    """
    mags = np.abs(roots)
    bnd = np.abs(mags - 1.0) < band
    sel = list(roots[~bnd & (mags > 1.0)])
    b = sorted(roots[bnd], key=lambda r: float(np.angle(r)))
    if len(b) % 2 == 0:
        for i in range(0, len(b), 2):
            theta = _refine_boundary_angle(t, float(np.angle(b[i] + b[i + 1])))
            sel.append(np.exp(1j * theta))
    else:
        sel.extend(sorted(b, key=lambda r: -abs(r))[:K - len(sel)])
    if len(sel) != K:
        # ambiguous boundary clustering: fall back to the K largest moduli
        order = np.argsort(-mags)
        sel = list(roots[order[:K]])
    return np.array(sel)


def _refine_boundary_angle(t, theta):
    ks = np.array(sorted(t.coeffs))
    cs = np.array([t.coeff(k)[0, 0] for k in ks])
    for _ in range(50):
        e = np.exp(1j * ks * theta)
        g = float(np.real(np.sum(1j * ks * cs * e)))
        gp = float(np.real(np.sum(-(ks ** 2) * cs * e)))
        if abs(gp) < 1e-300:
            break
        step = g / gp
        theta -= step
        if abs(step) < 1e-15:
            break
    return theta


def column_inner_outer(f, tol=1e-9):
    """Factor an analytic column f = theta * h with theta inner (n x 1) and
    h scalar outer; theta is f / h on the grid, band-limited under the
    truncation budget."""
    if f.cols != 1:
        raise InputError("expected an n x 1 column function")
    if laurent.analyticity_defect(f) > tol:
        raise InputError("column is not analytic")
    if f.is_zero():
        raise ZeroInputError("cannot factor the zero column")
    t = mat_multiply(laurent.adjoint(f), f)
    h = fejer_riesz_outer(t, tol)
    N = laurent.default_grid_size(max(f.bandwidth(), h.bandwidth(), 15))
    for attempt in range(2):
        hvals = h.samples(N)[:, 0, 0]
        if np.min(np.abs(hvals)) >= 1e-6 * np.max(np.abs(hvals)):
            break
        N *= 2
    else:
        raise DegenerateSymbolError("outer factor vanishes near the circle")
    vals = f.samples(N) / h.samples(N)[:, 0, 0][:, None, None]
    theta, _ = band_limit(f.rows, 1, vals, what="inner column factor")
    if unitarity_defect(theta) > 1e-8:
        raise InternalConsistencyError("column inner factor is not isometric")
    recon = mat_multiply(theta, h)
    if laurent.sup_norm(recon - f) > 1e-8 * max(1.0, laurent.sup_norm(f)):
        raise InternalConsistencyError("inner-outer factors do not recombine")
    return theta, h


@dataclass
class SubspaceBasis:
    """Degree-capped orthonormal basis of span{z^k g_j} in coefficient space."""

    ambient_dim: int
    degree_cap: int
    generators: list
    orthonormal_cols: np.ndarray

    def dim(self):
        return self.orthonormal_cols.shape[1]


def _span_cols(vectors, D, n):
    cols = []
    for g in vectors:
        if g.rows != n or g.cols != 1:
            raise InputError("generators must be n x 1 columns")
        deg = max(g.coeffs, default=0)
        if laurent.analyticity_defect(g) > 0:
            raise InputError("generators must be analytic polynomials")
        base = matfun_to_coefvec(g, D + 1)
        for k in range(0, D - deg + 1):
            shifted = np.zeros_like(base)
            shifted[k * n:] = base[:len(base) - k * n]
            cols.append(shifted)
    return np.column_stack(cols) if cols else np.zeros((n * (D + 1), 0), dtype=complex)


def minimal_z_invariant_subspace(vectors, degree_cap=DEGREE_CAP):
    """Orthonormal basis of the minimal z-invariant span of the given
    polynomial columns, up to the degree cap."""
    vectors = list(vectors)
    if not vectors:
        raise ZeroInputError("no generators given")
    n = vectors[0].rows
    maxdeg = max(max(g.coeffs, default=0) for g in vectors)
    if degree_cap < maxdeg + 2:
        raise BandwidthError("degree cap leaves no stabilization margin")
    cols = _span_cols(vectors, degree_cap, n)
    q = orthonormal_cols(cols)
    return SubspaceBasis(n, degree_cap, vectors, q)


def _wandering_cols(vectors, D, n, tol=1e-10):
    """Orthonormal columns spanning M_D (-) z M_{D-1}."""
    span_d = orthonormal_cols(_span_cols(vectors, D, n))
    span_prev = _span_cols(vectors, D - 1, n)
    if span_prev.size:
        padded = np.zeros((n * (D + 1), span_prev.shape[1]), dtype=complex)
        padded[n:, :] = span_prev  # multiply by z: shift one degree up
        zbasis = orthonormal_cols(padded)
    else:
        zbasis = np.zeros((n * (D + 1), 0), dtype=complex)
    resid = span_d - zbasis @ (zbasis.conj().T @ span_d)
    if not resid.size:
        return np.zeros((n * (D + 1), 0), dtype=complex)
    u, s, _ = np.linalg.svd(resid, full_matrices=False)
    r = int(np.sum(s > 0.5))
    return u[:, :r]


def wandering_basis(M, tol=1e-8, gauge=True, rng=None):
    """Inner function whose columns span M (-) zM (Beurling-Lax generator).

    The wandering rank must repeat under cap -> cap+2 and the assembled
    function must take isometric values on the grid; the cap grows until
    both hold.  gauge=True applies the canonical phase/echelon convention;
    rng scrambles the basis first (a no-op when the gauge fix is on, by
    design), so rng with gauge=False exhibits the constant-unitary freedom.
    """
    n = M.ambient_dim
    D = M.degree_cap
    prev = None
    while D <= DEGREE_CAP_MAX:
        cols = _wandering_cols(M.generators, D, n)
        ups = _cols_to_matfun(cols, n, D)
        if prev is not None and prev[0] == cols.shape[1]:
            diff = _subspace_distance(ups, prev[1])
            if diff < tol and unitarity_defect(ups) < tol:
                if rng is not None:
                    cols = cols @ _haar_unitary(cols.shape[1], rng)
                if gauge:
                    cols = canonical_subspace_basis(cols)
                return _cols_to_matfun(cols, n, D)
        prev = (cols.shape[1], ups)
        D += 2
    raise TruncationInstabilityError("wandering rank did not stabilize under the degree cap")


def _subspace_distance(a, b):
    """Pointwise distance between the ranges of two inner functions after
    the best constant-unitary alignment."""
    N = laurent.default_grid_size(max(a.bandwidth(), b.bandwidth()))
    va, vb = a.samples(N), b.samples(N)
    gram = np.matmul(np.conj(np.swapaxes(va, 1, 2)), vb)
    u, s, vh = np.linalg.svd(np.sum(gram, axis=0) / N)
    rot = u @ vh
    return float(np.max(np.abs(np.matmul(va, np.broadcast_to(rot, va.shape[:1] + rot.shape)) - vb)))


def _cols_to_matfun(cols, n, D):
    funs = []
    for j in range(cols.shape[1]):
        vec = cols[:, j].reshape(D + 1, n)
        funs.append(MatFun(n, 1, {k: vec[k].reshape(n, 1) for k in range(D + 1)}))
    if not funs:
        return MatFun.zero(n, 0)
    return hstack(funs)


def is_co_outer(f, tol=1e-10):
    """True iff f^t is outer, tested as Ker T_{conj(f)} = {0} with the
    stabilized kernel profile."""
    if laurent.analyticity_defect(f) > 1e-8:
        raise InputError("co-outer test expects an analytic function")
    _, dims, _ = kernel_profile(conj(f), tol)
    return dims[-1] == 0


@dataclass
class BalancedPair:
    """Inner co-outer Upsilon (n x r) with its balanced completion Theta
    (n x (n-r)); v is the assembled unitary-valued (Upsilon, conj(Theta))."""

    upsilon: MatFun
    theta: MatFun
    v: MatFun
    r: int

    @property
    def n(self):
        return self.upsilon.rows


def balanced_completion(upsilon, tol=1e-8, rng=None, gauge=True):
    """Complete an inner co-outer n x r function to a balanced unitary.

    Theta is the wandering basis of Ker T_{Upsilon^t}; the kernel dimension
    must grow by exactly n - r per degree once stabilized.  The result is
    phase-canonicalized (deterministic) unless gauge=False, in which case
    an optional rng scrambles the internal bases to exhibit the
    uniqueness-modulo-constant-unitary freedom.
    """
    n, r = upsilon.shape
    if not 0 < r <= n:
        raise InputError(f"completion needs 0 < r <= n, got r={r}, n={n}")
    defect = unitarity_defect(upsilon)
    if defect > tol:
        raise NotInnerError(f"upsilon is not inner (defect {defect:.3e})")
    if laurent.analyticity_defect(upsilon) > tol:
        raise NotInnerError("upsilon is not analytic")
    if r == n:
        # an n-balanced matrix function is a constant unitary
        theta = MatFun.zero(n, 0)
        return BalancedPair(upsilon, theta, upsilon, r)
    if not is_co_outer(upsilon):
        raise CompletionFailureError("upsilon is not co-outer; no balanced completion")

    upst = transpose(upsilon)
    Ts, dims, T = kernel_profile(upst, T0=upst.bandwidth() + 8)
    if dims[-1] - dims[-2] != 2 * (n - r):
        raise CompletionFailureError(
            f"kernel of T_Upsilon^t grows by {(dims[-1] - dims[-2]) / 2} per degree, "
            f"expected {n - r}")
    cols = orthonormal_cols(_kernel_cols(upst, T, 1e-10))
    if rng is not None:
        cols = cols @ _haar_unitary(cols.shape[1], rng)
    gens = [_column(cols, j, n, T) for j in range(cols.shape[1])]
    M = SubspaceBasis(n, T, gens, cols)
    theta = wandering_basis(M, gauge=gauge, rng=rng)
    if theta.cols != n - r:
        raise CompletionFailureError(
            f"wandering rank {theta.cols} of the completion, expected {n - r}")
    v = hstack([upsilon, conj(theta)])
    vdefect = unitarity_defect(v)
    if vdefect > 1e-8:
        raise CompletionFailureError(f"assembled completion not unitary ({vdefect:.3e})")
    return BalancedPair(upsilon, theta, v, r)


def _column(cols, j, n, T):
    vec = cols[:, j].reshape(T, n)
    return MatFun(n, 1, {k: vec[k].reshape(n, 1) for k in range(T)})


def _haar_unitary(k, rng):
    z = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _apply_unitary(f, u):
    return MatFun(f.rows, f.cols, {k: c @ u for k, c in f.coeffs.items()})
