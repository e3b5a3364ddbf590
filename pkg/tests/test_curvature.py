import numpy as np
import pytest

import warpcurve as wc
from warpcurve.curvature import (CurvatureSpec, check_structural, f_eval,
                                 f_grad, in_cone, matrix_derivative,
                                 sample_cone, sym_poly)


def test_spec_validation():
    with pytest.raises(wc.ConfigError):
        CurvatureSpec(n=1, r=2)
    with pytest.raises(wc.ConfigError):
        CurvatureSpec(n=0, r=0)
    assert CurvatureSpec(n=2, r=2).normalization == 1.0
    assert CurvatureSpec(n=2, r=1).normalization == 2.0


def test_sym_poly_values():
    assert sym_poly([1.0, 2.0], 2) == pytest.approx(2.0)
    assert sym_poly([1.0, 1.0], 1) == pytest.approx(2.0)
    assert sym_poly([0.3, -0.1], 2) == pytest.approx(-0.03, rel=1e-14)
    assert sym_poly([5.0, -2.0], 0) == 1.0


def test_in_cone_cases():
    for r in (1, 2):
        assert in_cone(CurvatureSpec(2, r), [1.0, 1.0])
    assert not in_cone(CurvatureSpec(2, 2), [3.0, -0.1])
    assert in_cone(CurvatureSpec(2, 1), [3.0, -0.1])


def test_f_eval_normalization_and_values():
    for r in (1, 2):
        spec = CurvatureSpec(2, r)
        assert f_eval(spec, [0.7, 0.7]) == pytest.approx(0.7, rel=1e-15)
    assert f_eval(CurvatureSpec(2, 2), [1.0, 4.0]) == pytest.approx(2.0)
    with pytest.raises(wc.ConeError):
        f_eval(CurvatureSpec(2, 2), [1.0, -1.0])


def test_f_grad_closed_form_and_fd():
    spec = CurvatureSpec(2, 1)
    g = f_grad(spec, np.array([0.4, 2.0]))
    assert np.allclose(g, [0.5, 0.5])           # f linear: f_i = 1/n
    spec2 = CurvatureSpec(2, 2)
    g2 = f_grad(spec2, np.array([1.0, 4.0]))
    assert np.allclose(g2, [1.0, 0.25], rtol=1e-14)
    rep = wc.fd_gradcheck(spec2, np.array([1.0, 4.0]))
    assert rep.max_rel_err <= 1e-7


def test_f_grad_schur_ordering():
    # descending lambda gives ascending f_i
    spec = CurvatureSpec(2, 2)
    rng = np.random.default_rng(5)
    lam = np.sort(sample_cone(spec, rng, 300, 0.5, 2.0), axis=-1)[:, ::-1]
    g = f_grad(spec, lam)
    assert np.all(g[:, 0] <= g[:, 1] + 1e-14)


def test_matrix_derivative_diagonal_and_umbilic():
    spec = CurvatureSpec(2, 2)
    F = matrix_derivative(spec, np.diag([3.0, 1.0]))
    fi = f_grad(spec, np.array([3.0, 1.0]))
    assert np.allclose(F, np.diag(fi), atol=1e-14)
    F_umb = matrix_derivative(spec, np.diag([0.8, 0.8]))
    assert np.allclose(F_umb, 0.5 * f_grad(spec, [0.8, 0.8])[0] * 2 * np.eye(2),
                       atol=1e-13)
    # nearly repeated eigenvalues: the limit rule keeps F well conditioned
    m = np.array([[0.8 + 5e-13, 1e-13], [1e-13, 0.8]])
    F_near = matrix_derivative(spec, m)
    assert np.allclose(F_near, F_umb, atol=1e-10)


def _fd_matrix_derivative(spec, m, step=1e-6):
    out = np.empty_like(m)
    n = m.shape[0]
    for k in range(n):
        for l in range(k, n):
            E = np.zeros_like(m)
            E[k, l] = E[l, k] = 1.0
            lp = np.linalg.eigvalsh(m + step * E)[::-1]
            lm = np.linalg.eigvalsh(m - step * E)[::-1]
            d = (f_eval(spec, lp) - f_eval(spec, lm)) / (2 * step)
            out[k, l] = out[l, k] = d / (2.0 if k != l else 1.0)
    return out


def test_matrix_derivative_matches_fd_on_random_cone_matrices():
    spec = CurvatureSpec(2, 2)
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(50):
        lam = sample_cone(spec, rng, 1, 0.5, 2.0)[0]
        th = rng.uniform(0, 2 * np.pi)
        Q = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
        m = (Q * lam) @ Q.T
        F = matrix_derivative(spec, m)
        fd = _fd_matrix_derivative(spec, m)
        worst = max(worst, np.abs(F - fd).max() / np.abs(F).max())
    assert worst <= 1e-6


def test_F_matrix_derivative_on_geometry():
    prof = wc.WarpingProfile.cosh(0.2, 3.0)
    grid = wc.make_grid(2, 16)
    spec = CurvatureSpec(2, 2)
    # umbilic slice: every node has lam1 = lam2, so F = f_1 * identity
    geom_c = wc.compute_geometry(np.full(grid.shape, 1.0), grid, prof)
    F = wc.F_matrix_derivative(spec, geom_c, (3, 5))
    fi = f_grad(spec, geom_c.lam[3, 5])
    assert np.allclose(F, fi[0] * np.eye(2), atol=1e-12)
    # wavy state: agrees with the raw-matrix path on the symmetrized form
    rng = np.random.default_rng(8)
    z = 1.0 + wc.random_smooth(grid, rng, 0.15)
    geom = wc.compute_geometry(z, grid, prof)
    node = (7, 2)
    F = wc.F_matrix_derivative(spec, geom, node)
    assert np.allclose(F, matrix_derivative(spec, geom.atilde[node]),
                       atol=1e-13)
    # trace identity: F : atilde = sum f_i lam_i = f (Euler)
    contraction = float((F * geom.atilde[node]).sum())
    assert contraction == pytest.approx(f_eval(spec, geom.lam[node]),
                                        rel=1e-12)


def test_permutation_symmetry_and_homogeneity():
    spec = CurvatureSpec(2, 2)
    rng = np.random.default_rng(2)
    lam = sample_cone(spec, rng, 2000, 0.5, 2.0)
    assert np.abs(f_eval(spec, lam[:, ::-1]) - f_eval(spec, lam)).max() <= 1e-14
    c = rng.uniform(0.25, 4.0, size=2000)
    hom = np.abs(f_eval(spec, c[:, None] * lam) - c * f_eval(spec, lam))
    assert (hom / np.abs(c * f_eval(spec, lam))).max() <= 1e-12


def test_monotonicity_at_many_cone_points():
    for spec in (CurvatureSpec(1, 1), CurvatureSpec(2, 1), CurvatureSpec(2, 2)):
        rng = np.random.default_rng(spec.n * 7 + spec.r)
        lam = sample_cone(spec, rng, 10000, 0.3, 3.0)
        assert np.all(f_grad(spec, lam) > 0)


def test_check_structural_reports():
    rep1 = check_structural(CurvatureSpec(2, 1), 1.0, 1.0, samples=2000)
    assert rep1.min_sum_fi == pytest.approx(1.0, abs=1e-14)   # f linear
    assert rep1.euler_violation <= 1e-12
    rep2 = check_structural(CurvatureSpec(2, 2), 1.0, 1.0, samples=2000)
    assert rep2.min_sum_fi >= 1.0 - 1e-12
    assert rep2.euler_violation <= 1e-12
    assert rep2.concavity_violation <= 1e-12
    assert rep2.schur_violation <= 1e-12
    assert rep2.min_fi > 0
    with pytest.raises(wc.ConfigError):
        check_structural(CurvatureSpec(2, 2), 2.0, 1.0)
    with pytest.raises(wc.ConfigError):
        check_structural(CurvatureSpec(2, 2), 1.0, 1.0, samples=10)


def test_structural_report_is_deterministic():
    a = check_structural(CurvatureSpec(2, 2), 0.5, 2.0, samples=1500, seed=42)
    b = check_structural(CurvatureSpec(2, 2), 0.5, 2.0, samples=1500, seed=42)
    assert a.min_sum_fi == b.min_sum_fi
    assert a.min_sum_fi_lambda == b.min_sum_fi_lambda


def test_cone_error_carries_node():
    spec = CurvatureSpec(2, 2)
    lam = np.ones((4, 4, 2))
    lam[2, 3] = [1.0, -1.0]
    with pytest.raises(wc.ConeError) as exc:
        f_eval(spec, lam)
    assert exc.value.node == (2, 3)
