import numpy as np
import pytest

from superopt import MatFun, winding_number
from superopt.errors import NotUnitaryError
from superopt.operators import toeplitz_index
from superopt.windices import (
    is_badly_approximable_scalar,
    is_very_badly_approximable_unitary,
    wh_indices,
)


def blaschke_half(conjugated=False, band=48):
    """(z - 1/2)/(1 - z/2) as a truncated series (or its conjugate)."""
    coeffs = {0: -0.5}
    for k in range(1, band + 1):
        coeffs[k] = 0.75 * 2.0 ** (-(k - 1))
    b = MatFun.scalar(coeffs)
    if conjugated:
        from superopt import conj
        return conj(b)
    return b


def diag_powers(*ks):
    n = len(ks)
    funs = {}
    for i, k in enumerate(ks):
        mat = np.zeros((n, n), dtype=complex)
        mat[i, i] = 1.0
        funs.setdefault(k, np.zeros((n, n), dtype=complex))
        funs[k] += mat
    return MatFun(n, n, funs)


def test_indices_mixed_diagonal():
    got = wh_indices(diag_powers(-1, 2))
    assert got.indices == [-1, 2]
    assert got.negative_count == 1


def test_indices_backward_shift_block():
    got = wh_indices(diag_powers(-1, -1))
    assert got.indices == [-1, -1]
    assert got.negative_count == 2


def test_indices_constant_unitary():
    rot = np.array([[np.cos(0.3), -np.sin(0.3)], [np.sin(0.3), np.cos(0.3)]])
    got = wh_indices(MatFun.constant(rot))
    assert got.indices == [0, 0]
    assert got.negative_count == 0


def test_indices_match_toeplitz_index():
    for U in (diag_powers(-1, 2), diag_powers(-2, -1), diag_powers(1, 1)):
        idx = wh_indices(U)
        assert idx.index_of_toeplitz() == toeplitz_index(U)


def test_indices_reject_nonunitary():
    with pytest.raises(NotUnitaryError):
        wh_indices(MatFun.constant(np.diag([2.0, 1.0])))


def test_indices_scalar_equals_winding():
    for u in (MatFun.scalar({1: 1.0}), MatFun.scalar({-2: 1.0}), blaschke_half()):
        assert wh_indices(u).indices == [winding_number(u)]


def test_badly_approximable_scalar_cases():
    assert is_badly_approximable_scalar(MatFun.scalar({-1: 1.0}))
    assert not is_badly_approximable_scalar(MatFun.scalar({1: 1.0}))
    assert not is_badly_approximable_scalar(MatFun.scalar({0: 2.0, 1: 1.0}))


def test_very_badly_approximable_cases():
    assert is_very_badly_approximable_unitary(diag_powers(-1, -1))
    assert not is_very_badly_approximable_unitary(diag_powers(-1, 1))
    bbar = blaschke_half(conjugated=True)
    assert is_very_badly_approximable_unitary(bbar)
    assert toeplitz_index(bbar) == 1


def test_negative_count_consistency():
    # z^k shifts of the conjugate Blaschke: wind(z b) = 0 and T_{zb} invertible
    bbar = blaschke_half(conjugated=True)
    idx = wh_indices(bbar)
    assert idx.indices == [-1]
    assert idx.negative_count == 1
