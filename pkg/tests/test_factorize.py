import numpy as np
import pytest

from superopt import MatFun, adjoint, analyticity_defect, mat_multiply, sup_norm
from superopt.errors import CompletionFailureError, NotNonnegativeError, ZeroInputError
from superopt.factorize import (
    balanced_completion,
    column_inner_outer,
    fejer_riesz_outer,
    is_co_outer,
    minimal_z_invariant_subspace,
    wandering_basis,
)
from superopt.operators import unitarity_defect

S2 = 2 ** -0.5


def unit_column(entries):
    """n x 1 polynomial column from {row: {k: coeff}}-style dicts."""
    n = len(entries)
    coeffs = {}
    for i, poly in enumerate(entries):
        for k, v in poly.items():
            coeffs.setdefault(k, np.zeros((n, 1), dtype=complex))[i, 0] = v
    return MatFun(n, 1, coeffs)


# -- Fejer-Riesz ----------------------------------------------------------

def test_fejer_riesz_of_one():
    h = fejer_riesz_outer(MatFun.scalar({0: 1.0}))
    assert set(h.coeffs) == {0}
    assert h.coeff(0)[0, 0] == pytest.approx(1.0)


def test_fejer_riesz_known_factor():
    # 2 + z + zbar = |1 + z|^2
    h = fejer_riesz_outer(MatFun.scalar({0: 2.0, 1: 1.0, -1: 1.0}))
    assert h.coeff(0)[0, 0] == pytest.approx(1.0, abs=1e-10)
    assert h.coeff(1)[0, 0] == pytest.approx(1.0, abs=1e-10)


def test_fejer_riesz_root_split():
    # 2.5 + z + zbar = |sqrt2 + z/sqrt2|^2
    h = fejer_riesz_outer(MatFun.scalar({0: 2.5, 1: 1.0, -1: 1.0}))
    assert h.coeff(0)[0, 0] == pytest.approx(np.sqrt(2), abs=1e-10)
    assert h.coeff(1)[0, 0] == pytest.approx(1 / np.sqrt(2), abs=1e-10)


def test_fejer_riesz_rejects_signed_symbol():
    with pytest.raises(NotNonnegativeError):
        fejer_riesz_outer(MatFun.scalar({0: 0.5, 1: 1.0, -1: 1.0}))


def test_fejer_riesz_random_moduli():
    rng = np.random.default_rng(9)
    for _ in range(8):
        deg = int(rng.integers(1, 5))
        c = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
        f = MatFun.scalar({k: c[k] for k in range(deg + 1)})
        t = mat_multiply(adjoint(f), f)
        h = fejer_riesz_outer(t)
        N = 256
        tv = t.samples(N)[:, 0, 0].real
        hv = h.samples(N)[:, 0, 0]
        assert np.max(np.abs(np.abs(hv) ** 2 - tv)) < 1e-8 * max(1.0, tv.max())
        assert analyticity_defect(h) == 0.0
        roots = np.roots([h.coeff(k)[0, 0] for k in range(h.pos_band(), -1, -1)])
        assert np.all(np.abs(roots) >= 1 - 1e-10)


# -- column inner-outer ----------------------------------------------------

def test_inner_outer_monomial_column():
    f = unit_column([{1: 1.0}, {}])
    theta, h = column_inner_outer(f)
    assert sup_norm(theta - f) < 1e-10
    assert h.coeff(0)[0, 0] == pytest.approx(1.0)


def test_inner_outer_one_z_column():
    f = unit_column([{0: 1.0}, {1: 1.0}])
    theta, h = column_inner_outer(f)
    assert h.coeff(0)[0, 0] == pytest.approx(np.sqrt(2), abs=1e-10)
    want = unit_column([{0: S2}, {1: S2}])
    assert sup_norm(theta - want) < 1e-8


def test_inner_outer_sum_difference_column():
    f = unit_column([{0: 1.0, 1: 1.0}, {0: 1.0, 1: -1.0}])
    theta, h = column_inner_outer(f)
    assert h.coeff(0)[0, 0] == pytest.approx(2.0, abs=1e-10)
    want = unit_column([{0: 0.5, 1: 0.5}, {0: 0.5, 1: -0.5}])
    assert sup_norm(theta - want) < 1e-8


def test_inner_outer_rejects_zero():
    with pytest.raises(ZeroInputError):
        column_inner_outer(MatFun.zero(2, 1))


# -- invariant subspaces and wandering bases --------------------------------

def test_minimal_subspace_single_coordinate():
    e1 = unit_column([{0: 1.0}, {}])
    M = minimal_z_invariant_subspace([e1], degree_cap=10)
    assert M.dim() == 11
    q = M.orthonormal_cols
    assert np.max(np.abs(q.conj().T @ q - np.eye(11))) < 1e-12
    ups = wandering_basis(M)
    assert sup_norm(ups - e1) < 1e-10


def test_minimal_subspace_full_space():
    e1 = unit_column([{0: 1.0}, {}])
    e2 = unit_column([{}, {0: 1.0}])
    M = minimal_z_invariant_subspace([e1, e2], degree_cap=8)
    assert M.dim() == 18
    ups = wandering_basis(M)
    assert ups.cols == 2
    assert sup_norm(ups - MatFun.identity(2)) < 1e-10


def test_minimal_subspace_outer_scalar_generator():
    golden = (1 + np.sqrt(5)) / 2
    g = MatFun.scalar({0: golden, 1: 1.0})
    M = minimal_z_invariant_subspace([g], degree_cap=12)
    # codimension one per degree block
    assert M.dim() == 12
    ups = wandering_basis(M)
    # generator is outer, so the span is all of H^2 and the wandering
    # vector is the constant 1
    assert ups.shape == (1, 1)
    assert sup_norm(ups - MatFun.scalar({0: 1.0})) < 1e-7


def test_wandering_of_blaschke_generator():
    g = MatFun.scalar({0: -1.0, 1: 2.0})  # 2z - 1, zero at 1/2 inside the disk
    M = minimal_z_invariant_subspace([g], degree_cap=32)
    ups = wandering_basis(M)
    vals = ups.samples()[:, 0, 0]
    assert np.max(np.abs(np.abs(vals) - 1.0)) < 1e-8
    # match the closed-form Blaschke factor (z - 1/2)/(1 - z/2) up to phase
    N = vals.size
    zs = np.exp(2j * np.pi * np.arange(N) / N)
    b = (zs - 0.5) / (1 - 0.5 * zs)
    ratio = vals / b
    assert np.max(np.abs(ratio - ratio[0])) < 1e-7
    assert abs(abs(ratio[0]) - 1) < 1e-8


# -- co-outer test ----------------------------------------------------------

def test_is_co_outer_examples():
    assert is_co_outer(unit_column([{0: 1.0}, {1: 1.0}]))
    assert not is_co_outer(unit_column([{1: 1.0}, {}]))
    assert is_co_outer(MatFun.identity(2))


# -- balanced completions ----------------------------------------------------

def test_completion_of_constant_column():
    e1 = unit_column([{0: 1.0}, {}])
    pair = balanced_completion(e1)
    assert pair.r == 1
    assert pair.theta.shape == (2, 1)
    assert sup_norm(pair.theta - unit_column([{}, {0: 1.0}])) < 1e-9
    assert unitarity_defect(pair.v) < 1e-10


def test_completion_thematic_fixture():
    ups = unit_column([{0: S2}, {1: S2}])
    pair = balanced_completion(ups)
    want = unit_column([{0: 0.0, 1: -S2}, {0: S2}])
    assert sup_norm(pair.theta - want) < 1e-8
    assert unitarity_defect(pair.v) < 1e-8
    # det V is the constant 1
    vals = pair.v.samples(64)
    dets = np.linalg.det(vals)
    assert np.max(np.abs(dets - 1.0)) < 1e-8


def test_completion_full_rank_is_constant():
    pair = balanced_completion(MatFun.identity(2))
    assert pair.theta.cols == 0
    assert sup_norm(pair.v - MatFun.identity(2)) == 0.0


def test_completion_rejects_non_co_outer():
    zcol = unit_column([{1: 1.0}, {}])
    with pytest.raises(CompletionFailureError):
        balanced_completion(zcol)


def test_completion_unique_modulo_right_unitary():
    ups = unit_column([{0: S2}, {1: S2}])
    base = balanced_completion(ups)
    rng = np.random.default_rng(123)
    other = balanced_completion(ups, rng=rng, gauge=False)
    # fit a constant unitary by Procrustes on the grid
    N = 64
    a = base.theta.samples(N)
    b = other.theta.samples(N)
    g = np.sum(np.matmul(np.conj(np.swapaxes(a, 1, 2)), b), axis=0)
    u, _, vh = np.linalg.svd(g)
    rot = u @ vh
    fitted = np.matmul(a, np.broadcast_to(rot, (N, 1, 1)))
    assert np.max(np.abs(fitted - b)) < 1e-7


def test_completion_three_dim_random_polynomial_column():
    rng = np.random.default_rng(5)
    # build a polynomial unit column: last entry from Fejer-Riesz of the slack
    c1 = 0.4 * (rng.normal(size=3) + 1j * rng.normal(size=3)) / 3
    f1 = MatFun.scalar({k: c1[k] for k in range(3)})
    t = mat_multiply(adjoint(f1), f1)
    slack = MatFun.scalar({0: 1.0}) - t
    h = fejer_riesz_outer(slack)
    col = MatFun(3, 1, {})
    coeffs = {}
    for k, v in f1.coeffs.items():
        coeffs.setdefault(k, np.zeros((3, 1), dtype=complex))[0, 0] = v[0, 0]
    for k, v in h.coeffs.items():
        coeffs.setdefault(k, np.zeros((3, 1), dtype=complex))[2, 0] = v[0, 0]
    col = MatFun(3, 1, coeffs)
    assert unitarity_defect(col) < 1e-10
    pair = balanced_completion(col)
    assert pair.theta.shape == (3, 2)
    assert unitarity_defect(pair.v) < 1e-8
    dets = np.linalg.det(pair.v.samples(128))
    assert np.max(np.abs(dets - np.mean(dets))) < 1e-8
    assert abs(abs(np.mean(dets)) - 1.0) < 1e-8
