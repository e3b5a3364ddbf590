import numpy as np
import pytest

import warpcurve as wc
from warpcurve.curvature import sample_cone
from warpcurve.grid import NodeField, random_smooth
from warpcurve.oracle import eig2_oracle, fd_gradcheck, fd_jacobian
from warpcurve.solver import assemble_jacobian, residual

from conftest import make_problem


@pytest.fixture(scope="module")
def hp_small():
    return make_problem(n=1, N=32, eps=0.1, t_plus=1.5)


def test_fd_jacobian_certifies_analytic_mode(hp_small):
    z = NodeField.constant(hp_small.grid, hp_small.t0)
    Ja = assemble_jacobian(z, 0.0, hp_small).toarray()
    Jf = fd_jacobian(z, 0.0, hp_small)
    assert np.abs(Ja - Jf).max() / np.abs(Ja).max() <= 1e-6


def test_fd_jacobian_n2(hp_small):
    hp = make_problem(n=2, N=16, r=2, eps=0.1, t_plus=1.5)
    rng = np.random.default_rng(23)
    z = NodeField(hp.t0 + random_smooth(hp.grid, rng, 0.05), hp.grid)
    Ja = assemble_jacobian(z, 0.8, hp).toarray()
    Jf = fd_jacobian(z, 0.8, hp)
    assert np.abs(Ja - Jf).max() / np.abs(Ja).max() <= 1e-6


def test_linearity_probe(hp_small):
    rng = np.random.default_rng(3)
    z = NodeField(hp_small.t0 + random_smooth(hp_small.grid, rng, 0.04),
                  hp_small.grid)
    J = assemble_jacobian(z, 1.0, hp_small)
    v = random_smooth(hp_small.grid, rng, 1.0)
    r0 = residual(z, 1.0, hp_small).values
    errs = []
    for d in (1e-3, 5e-4, 2.5e-4):
        r1 = residual(NodeField(z.values + d * v, hp_small.grid), 1.0,
                      hp_small).values
        lin = r0 + d * hp_small.grid.unflatten(J @ hp_small.grid.flatten(v))
        errs.append(np.abs(r1 - lin).max())
    for a, b in zip(errs, errs[1:]):
        assert 3.2 <= a / b <= 4.8          # O(delta^2) remainder


def test_zero_perturbation_gives_zero_difference(hp_small):
    z = NodeField.constant(hp_small.grid, 1.0)
    r1 = residual(z, 0.5, hp_small).values
    r2 = residual(z.copy(), 0.5, hp_small).values
    assert np.array_equal(r1, r2)


def test_gradcheck_linear_f_is_exact():
    # f is linear for r = 1, so the central difference has no truncation
    # term at all; a large step keeps subtraction noise below 1e-12
    rep = fd_gradcheck(wc.CurvatureSpec(2, 1), np.array([3.0, 2.0]), step=0.25)
    assert rep.max_abs_err <= 1e-12


def test_gradcheck_example_point():
    rep = fd_gradcheck(wc.CurvatureSpec(2, 2), np.array([1.0, 4.0]))
    assert rep.max_rel_err <= 1e-7


def test_gradcheck_random_sweep_is_reproducible():
    spec = wc.CurvatureSpec(2, 2)
    lam = sample_cone(spec, np.random.default_rng(777), 1000, 0.5, 2.0)
    worst = max(fd_gradcheck(spec, lam[i]).max_rel_err for i in range(1000))
    assert worst <= 1e-6
    lam2 = sample_cone(spec, np.random.default_rng(777), 1000, 0.5, 2.0)
    assert np.array_equal(lam, lam2)        # fixed seed, bit-identical


def test_gradcheck_cone_margin():
    spec = wc.CurvatureSpec(2, 2)
    with pytest.raises(wc.ConeError):
        fd_gradcheck(spec, np.array([1.0, 1e-7]), step=1e-6)


def test_eig2_identity_and_diagonal():
    lam, Q = eig2_oracle(np.eye(2))
    assert np.allclose(lam, [1.0, 1.0]) and np.allclose(Q, np.eye(2))
    lam, Q = eig2_oracle(np.diag([3.0, 1.0]))
    assert np.allclose(lam, [3.0, 1.0])


def test_eig2_symmetric_example():
    m = np.array([[2.0, 1.0], [1.0, 2.0]])
    lam, Q = eig2_oracle(m)
    assert np.allclose(lam, [3.0, 1.0])
    v1 = Q[:, 0]
    assert np.allclose(np.abs(v1), np.ones(2) / np.sqrt(2), atol=1e-14)
    assert np.abs(Q @ Q.T - np.eye(2)).max() <= 1e-14
    assert np.abs((Q * lam) @ Q.T - m).max() <= 1e-14


def test_eig2_random_reconstruction():
    rng = np.random.default_rng(31)
    for _ in range(100):
        a, b, c = rng.normal(size=3)
        m = np.array([[a, b], [b, c]])
        lam, Q = eig2_oracle(m)
        assert lam[0] >= lam[1]
        assert np.abs((Q * lam) @ Q.T - m).max() <= 1e-13
        assert np.abs(Q @ Q.T - np.eye(2)).max() <= 1e-14


def test_oracle_report_rejects_bad_errors():
    with pytest.raises(ValueError):
        wc.OracleReport("x", -1.0, 0.0, None)
