"""Cholesky-backed SPD helpers against brute-force and numpy references."""
import numpy as np
import pytest

from mvdlm import (
    NotPositiveDefinite,
    SpdMatrix,
    as_spd,
    cholesky_lower,
    log_det_spd,
    spd_solve,
    symmetrize,
)

from oracles import det_cofactor

A3 = np.array([[4.0, 1.2, 0.4], [1.2, 3.0, -0.5], [0.4, -0.5, 2.5]])
A3_LOGDET = 3.1962211343033946  # frozen: log of cofactor-expansion determinant


def random_spd(rng, n, jitter=0.5):
    B = rng.standard_normal((n, n))
    return B @ B.T + (n + jitter) * np.eye(n)


def test_symmetrize_returns_symmetric_average():
    a = np.array([[1.0, 2.0], [0.0, 3.0]])
    s = symmetrize(a)
    assert np.array_equal(s, s.T)
    assert np.allclose(s, np.array([[1.0, 1.0], [1.0, 3.0]]))


def test_symmetrize_preserves_symmetric_input_exactly():
    rng = np.random.default_rng(0)
    a = random_spd(rng, 4)
    a = 0.5 * (a + a.T)
    assert np.array_equal(symmetrize(a), a)


def test_symmetrize_rejects_nonsquare():
    with pytest.raises(Exception):
        symmetrize(np.zeros((2, 3)))


def test_cholesky_reconstruction():
    rng = np.random.default_rng(1)
    for n in (1, 2, 5, 8):
        a = random_spd(rng, n)
        L = cholesky_lower(a)
        assert np.allclose(np.tril(L), L)
        assert np.allclose(L @ L.T, a, atol=1e-12 * np.abs(a).max())


def test_log_det_matches_cofactor_expansion():
    assert log_det_spd(A3) == pytest.approx(A3_LOGDET, abs=1e-12)
    assert log_det_spd(A3) == pytest.approx(np.log(det_cofactor(A3)), abs=1e-12)


def test_log_det_matches_slogdet_on_random_instances():
    rng = np.random.default_rng(2)
    for n in (1, 3, 6):
        a = random_spd(rng, n)
        sign, ref = np.linalg.slogdet(a)
        assert sign > 0
        assert log_det_spd(a) == pytest.approx(ref, abs=1e-10)


def test_solve_residual_small():
    rng = np.random.default_rng(3)
    a = random_spd(rng, 6)
    b = rng.standard_normal((6, 4))
    x = spd_solve(a, b)
    assert np.allclose(a @ x, b, atol=1e-9)
    assert np.allclose(x, np.linalg.solve(a, b), atol=1e-9)


def test_spd_matrix_solve_half_gram_identity():
    # solve_half(B) returns Z with Z'Z == B' A^{-1} B, the quadratic-form
    # building block used throughout the densities.
    rng = np.random.default_rng(4)
    a = random_spd(rng, 5)
    b = rng.standard_normal((5, 3))
    spd = SpdMatrix(a)
    z = spd.solve_half(b)
    assert np.allclose(z.T @ z, b.T @ np.linalg.solve(a, b), atol=1e-10)


def test_spd_matrix_properties_and_array_protocol():
    spd = SpdMatrix(A3)
    assert spd.dim == 3
    assert spd.log_det == pytest.approx(A3_LOGDET, abs=1e-12)
    assert np.array_equal(np.asarray(spd), A3)


def test_ridge_adds_scaled_identity():
    a = np.array([[1.0, 0.0], [0.0, 1.0]])
    spd = SpdMatrix(a, ridge=0.5)
    assert np.allclose(np.asarray(spd), a + 0.5 * np.eye(2))


def test_ridge_rescues_semidefinite_matrix():
    a = np.array([[1.0, 1.0], [1.0, 1.0]])  # rank 1, plain Cholesky may fail
    spd = SpdMatrix(a, ridge=1e-9)
    assert np.isfinite(spd.log_det)


def test_not_positive_definite_raised():
    indef = np.array([[1.0, 2.0], [2.0, 1.0]])  # eigenvalues 3, -1
    with pytest.raises(NotPositiveDefinite):
        SpdMatrix(indef)
    with pytest.raises(NotPositiveDefinite):
        cholesky_lower(indef)


def test_as_spd_accepts_spd_passthrough():
    spd = SpdMatrix(A3)
    assert as_spd(spd) is spd
    assert isinstance(as_spd(A3), SpdMatrix)
