import numpy as np
import pytest

from dickesim import (ExcitationState, InvalidParam, basis_checks,
                      basis_matrix, permutation_invariance_check, project)


def state_of(beta):
    return ExcitationState(beta=np.asarray(beta, dtype=complex), t=0.0)


def random_state(n, seed, scale=0.02):
    rng = np.random.default_rng(seed)
    return state_of(scale * (rng.normal(size=n) + 1j * rng.normal(size=n)))


def test_symmetric_two_atom_state():
    b = 0.03 - 0.01j
    dec = project(state_of([b, b]))
    assert dec.beta_plus == pytest.approx(np.sqrt(2) * b, rel=1e-15)
    assert abs(dec.gamma[0]) < 1e-18
    assert dec.f_sr == pytest.approx(1.0, abs=1e-15)


def test_antisymmetric_two_atom_state():
    b = 0.03 - 0.01j
    dec = project(state_of([b, -b]))
    assert abs(dec.beta_plus) < 1e-18
    assert dec.gamma[0] == pytest.approx(np.sqrt(2) * b, rel=1e-15)
    assert dec.f_sr == pytest.approx(0.0, abs=1e-15)
    assert dec.f_sub == pytest.approx(1.0, abs=1e-15)


def test_single_atom_state():
    dec = project(state_of([0.1j]))
    assert dec.gamma.size == 0
    assert dec.f_sr == pytest.approx(1.0)
    assert dec.p_sub == 0.0


def test_zero_state_fractions_absent():
    dec = project(state_of([0.0, 0.0, 0.0]))
    assert dec.f_sr is None
    assert dec.f_sub is None
    assert dec.p_plus == 0.0
    assert dec.p_sub == 0.0


def test_projection_matches_basis_matrix_oracle():
    state = random_state(50, seed=1)
    dec = project(state)
    u = basis_matrix(50)
    coeffs = u @ state.beta
    assert dec.beta_plus == pytest.approx(coeffs[0], rel=1e-13)
    assert np.allclose(dec.gamma, coeffs[1:], rtol=1e-13, atol=1e-18)
    total = float(np.sum(np.abs(state.beta) ** 2))
    norm_sq = float(np.sum(np.abs(coeffs) ** 2))
    assert dec.p_plus + dec.p_sub == pytest.approx(norm_sq, rel=1e-13)
    assert dec.p_plus + dec.p_sub == pytest.approx(total, rel=1e-12)


@pytest.mark.parametrize("n,seed", [(2, 0), (7, 1), (100, 2), (1000, 3)])
def test_parseval_identity(n, seed):
    state = random_state(n, seed)
    dec = project(state)
    total = float(np.sum(np.abs(state.beta) ** 2))
    assert dec.p_plus + dec.p_sub == pytest.approx(total, rel=1e-12)
    # equivalent algebraic form of the subradiant weight
    z = state.beta.sum()
    assert dec.p_sub == pytest.approx(total - abs(z) ** 2 / n, rel=1e-11, abs=1e-18)


def test_fraction_consistency_with_means():
    state = random_state(80, seed=5)
    dec = project(state)
    n = 80
    ave1 = float(np.mean(np.abs(state.beta) ** 2))
    ave2_sq = abs(state.beta.sum() / n) ** 2
    assert dec.f_sr == pytest.approx(ave2_sq / ave1, rel=1e-12)
    assert dec.f_sr * ave1 == pytest.approx(ave2_sq, rel=1e-12)
    assert dec.f_sr + dec.f_sub == 1.0


def test_fraction_bounds_random_states():
    for seed in range(10):
        dec = project(random_state(30, seed))
        assert 0.0 <= dec.f_sr <= 1.0


def test_fraction_extremes():
    uniform = state_of(np.full(20, 0.01 + 0.02j))
    assert project(uniform).f_sr == pytest.approx(1.0, abs=1e-13)
    rng = np.random.default_rng(9)
    beta = rng.normal(size=20) + 1j * rng.normal(size=20)
    beta -= beta.mean()                       # zero-sum -> no symmetric weight
    assert project(state_of(0.01 * beta)).f_sr == pytest.approx(0.0, abs=1e-13)


def test_basis_matrix_small_cases():
    u2 = basis_matrix(2)
    r = 1.0 / np.sqrt(2)
    assert np.allclose(u2, [[r, r], [r, -r]], atol=1e-16)
    assert np.allclose(u2 @ u2.T, np.eye(2), atol=1e-16)

    u3 = basis_matrix(3)
    assert np.allclose(u3[0], np.full(3, 1 / np.sqrt(3)), atol=1e-16)
    assert np.allclose(u3[1], [1 / np.sqrt(2), -1 / np.sqrt(2), 0.0], atol=1e-16)
    assert np.allclose(u3[2], [1 / np.sqrt(6), 1 / np.sqrt(6), -2 / np.sqrt(6)], atol=1e-16)
    gram = u3 @ u3.T
    off = gram - np.diag(np.diag(gram))
    assert np.max(np.abs(off)) < 1e-15


@pytest.mark.parametrize("n", [2, 3, 50, 500])
def test_basis_orthonormal_and_complete(n):
    report = basis_checks(n)
    assert report.max_orthonormality_dev < 1e-12
    assert report.max_parseval_dev < 1e-12


def test_basis_checks_size_cap():
    with pytest.raises(InvalidParam):
        basis_checks(10, max_n=5)


def test_permutation_swap_changes_gamma_not_weights():
    state = state_of([0.01, 0.03j, -0.02])
    report = permutation_invariance_check(state, np.array([1, 0, 2]))
    assert report.gamma_changed
    assert report.dev_p_plus < 1e-15
    assert report.dev_p_sub < 1e-15
    assert report.dev_f_sr < 1e-15


def test_permutation_random_relabeling():
    state = random_state(100, seed=11)
    rng = np.random.default_rng(12)
    perm = rng.permutation(100)
    report = permutation_invariance_check(state, perm)
    assert report.dev_f_sr < 1e-12
    assert report.dev_p_sub < 1e-12


def test_identity_permutation_bitwise():
    state = random_state(40, seed=13)
    report = permutation_invariance_check(state, np.arange(40))
    assert not report.gamma_changed
    assert report.dev_p_plus == 0.0
    assert report.dev_p_sub == 0.0
    assert report.dev_f_sr == 0.0


def test_permutation_validation():
    state = random_state(5, seed=1)
    with pytest.raises(InvalidParam):
        permutation_invariance_check(state, np.array([0, 1, 2, 3, 3]))
