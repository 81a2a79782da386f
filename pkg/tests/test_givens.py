import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparse_givens.givens import (
    HALF_PI,
    GivensModel,
    all_pairs,
    apply_rotation_left,
    build_covariance,
    build_precision,
    canonical_angle,
    compose_eigenmatrix,
    decompose_eigenmatrix,
    model_from_angles,
    pair_index,
    rotator_matrix,
)

from conftest import make_random_model


def dense_compose(model):
    # independent oracle: explicit dense matrix product
    R = np.eye(model.q)
    for pair, w in zip(model.pairs, model.angles):
        R = R @ rotator_matrix(pair, w, model.q)
    return R


def test_rotator_matrix_zero_angle_is_identity():
    assert np.array_equal(rotator_matrix((1, 2), 0.0, 3), np.eye(3))


def test_rotator_matrix_half_pi_permutes():
    assert np.allclose(rotator_matrix((1, 2), HALF_PI, 2), [[0, 1], [-1, 0]])


def test_rotator_matrix_entries_direct_trig():
    # independent trig evaluation of the (1,3) rotator at pi/6
    O = rotator_matrix((1, 3), math.pi / 6, 3)
    c, s = math.cos(math.pi / 6), math.sin(math.pi / 6)
    expect = np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]])
    assert np.allclose(O, expect, atol=1e-15)


def test_rotator_matrix_bad_pair():
    with pytest.raises(IndexError):
        rotator_matrix((2, 2), 0.1, 3)
    with pytest.raises(IndexError):
        rotator_matrix((1, 4), 0.1, 3)


def test_apply_rotation_left_identity_operand():
    out = apply_rotation_left(np.eye(3), (1, 2), 0.7)
    assert np.allclose(out, rotator_matrix((1, 2), 0.7, 3))


def test_apply_rotation_left_zero_angle():
    M = np.arange(9.0).reshape(3, 3)
    assert np.array_equal(apply_rotation_left(M, (1, 3), 0.0), M)


def test_apply_rotation_left_round_trip():
    rng = np.random.default_rng(1)
    M = rng.standard_normal((4, 4))
    out = apply_rotation_left(M, (1, 2), math.pi / 4)
    back = apply_rotation_left(out, (1, 2), math.pi / 4, transpose=True)
    assert np.abs(back - M).max() < 1e-12


def test_compose_empty_is_identity():
    m = GivensModel(q=4, pairs=(), angles=(), eigenvalues=(4.0, 3.0, 2.0, 1.0))
    assert np.array_equal(compose_eigenmatrix(m), np.eye(4))


def test_compose_single_rotator():
    m = GivensModel(q=2, pairs=((1, 2),), angles=(math.pi / 3,),
                    eigenvalues=(2.0, 1.0))
    assert np.allclose(compose_eigenmatrix(m), rotator_matrix((1, 2), math.pi / 3, 2))


def test_compose_matches_dense_product_oracle(rng):
    for _ in range(50):
        m = make_random_model(rng, q=int(rng.integers(2, 9)))
        assert np.abs(compose_eigenmatrix(m) - dense_compose(m)).max() < 1e-12


def test_compose_orthogonality(rng):
    for _ in range(50):
        m = make_random_model(rng)
        R = compose_eigenmatrix(m)
        assert np.abs(R.T @ R - np.eye(m.q)).max() < 1e-10


def test_build_covariance_diagonal_case():
    m = GivensModel(q=2, pairs=(), angles=(), eigenvalues=(4.0, 1.0))
    assert np.allclose(build_covariance(m), np.diag([4.0, 1.0]))
    assert np.allclose(build_precision(m), np.diag([0.25, 1.0]))


def test_build_covariance_quarter_turn_dense_oracle():
    # dense R D R' oracle; +pi/4 with d=(3,1) has off-diagonal -1, and the
    # mirrored angle -pi/4 is the eigen-decomposition of [[2, 1], [1, 2]]
    m = GivensModel(q=2, pairs=((1, 2),), angles=(math.pi / 4,),
                    eigenvalues=(3.0, 1.0))
    R = rotator_matrix((1, 2), math.pi / 4, 2)
    expect = R @ np.diag([3.0, 1.0]) @ R.T
    assert np.allclose(build_covariance(m), expect, atol=1e-14)
    assert np.allclose(build_covariance(m), [[2.0, -1.0], [-1.0, 2.0]], atol=1e-14)
    m2 = GivensModel(q=2, pairs=((1, 2),), angles=(-math.pi / 4,),
                     eigenvalues=(3.0, 1.0))
    assert np.allclose(build_covariance(m2), [[2.0, 1.0], [1.0, 2.0]], atol=1e-14)


def test_build_covariance_spectrum_matches_eigenvalues(rng):
    for _ in range(20):
        m = make_random_model(rng, q=int(rng.integers(2, 10)))
        V = build_covariance(m)
        assert np.allclose(np.sort(np.linalg.eigvalsh(V)),
                           np.sort(m.eigenvalues), atol=1e-10)


def test_covariance_times_precision_is_identity(rng):
    for _ in range(20):
        m = make_random_model(rng)
        VK = build_covariance(m) @ build_precision(m)
        assert np.abs(VK - np.eye(m.q)).max() < 1e-10


def test_decompose_identity():
    angles, signs = decompose_eigenmatrix(np.eye(5))
    assert all(w == 0.0 for w in angles.values())
    assert np.array_equal(signs, np.ones(5))


def test_decompose_pure_permutation_rotator():
    angles, signs = decompose_eigenmatrix(np.array([[0.0, 1.0], [-1.0, 0.0]]))
    assert angles[(1, 2)] == pytest.approx(HALF_PI)


def test_decompose_rejects_non_orthogonal():
    with pytest.raises(ValueError):
        decompose_eigenmatrix(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_decompose_compose_round_trip(rng):
    for _ in range(200):
        m = make_random_model(rng)
        R = compose_eigenmatrix(m)
        angles, signs = decompose_eigenmatrix(R)
        expect = dict.fromkeys(all_pairs(m.q), 0.0)
        expect.update(dict(zip(m.pairs, m.angles)))
        for pair in all_pairs(m.q):
            assert angles[pair] == pytest.approx(expect[pair], abs=1e-10)
        assert np.array_equal(signs, np.ones(m.q))


def test_decompose_general_orthogonal_with_signs(rng):
    # arbitrary orthogonal input: recomposition including signs reproduces it
    for _ in range(50):
        q = int(rng.integers(2, 10))
        Q, _ = np.linalg.qr(rng.standard_normal((q, q)))
        angles, signs = decompose_eigenmatrix(Q)
        m = model_from_angles(q, angles, np.arange(q, 0, -1.0))
        assert np.abs(compose_eigenmatrix(m) @ np.diag(signs) - Q).max() < 1e-9


def test_half_pi_conjugation_permutes_rows_and_cols(rng):
    M = rng.standard_normal((5, 5))
    O = rotator_matrix((2, 4), HALF_PI, 5)
    out = O @ M @ O.T
    perm = np.arange(5)
    perm[[1, 3]] = perm[[3, 1]]
    assert np.allclose(np.abs(out), np.abs(M[np.ix_(perm, perm)]), atol=1e-14)


def test_snap_tolerance_zeroes_small_angles():
    m = GivensModel(q=3, pairs=((1, 2),), angles=(1e-14,),
                    eigenvalues=(3.0, 2.0, 1.0))
    angles, _ = decompose_eigenmatrix(compose_eigenmatrix(m))
    assert angles[(1, 2)] == 0.0
    angles, _ = decompose_eigenmatrix(compose_eigenmatrix(m), snap_tol=1e-16)
    assert angles[(1, 2)] != 0.0


def test_model_validation():
    with pytest.raises(ValueError):
        GivensModel(q=3, pairs=((1, 2),), angles=(0.0,), eigenvalues=(3, 2, 1))
    with pytest.raises(ValueError):
        GivensModel(q=3, pairs=(), angles=(), eigenvalues=(1.0, 1.0, 0.5))
    with pytest.raises(ValueError):
        GivensModel(q=3, pairs=((1, 3), (1, 2)), angles=(0.1, 0.2),
                    eigenvalues=(3, 2, 1))
    with pytest.raises(IndexError):
        GivensModel(q=3, pairs=((1, 4),), angles=(0.1,), eigenvalues=(3, 2, 1))


def test_negative_half_pi_canonicalized():
    m = GivensModel(q=2, pairs=((1, 2),), angles=(-HALF_PI,), eigenvalues=(2, 1))
    assert m.angles[0] == HALF_PI


@given(st.floats(min_value=-math.pi / 2, max_value=math.pi / 2,
                 allow_nan=False).filter(lambda w: w > -math.pi / 2))
def test_canonical_angle_preserves_interior(w):
    assert canonical_angle(w) == w


@given(st.integers(min_value=2, max_value=40))
@settings(max_examples=30)
def test_pair_index_enumerates_lexicographically(q):
    for t, (i, j) in enumerate(all_pairs(q)):
        assert pair_index(i, j, q) == t


def test_model_dict_round_trip(rng):
    m = make_random_model(rng, q=6)
    m2 = GivensModel.from_dict(m.to_dict())
    assert m2 == m
