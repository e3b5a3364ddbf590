import numpy as np
import pytest
import scipy.sparse.linalg as spla

import warpcurve as wc
from warpcurve.grid import NodeField, random_smooth
from warpcurve.solver import (SolverConfig, assemble_jacobian,
                              build_manufactured, continuation,
                              manufactured_residual_norm, newton_solve,
                              residual)

from conftest import make_problem


@pytest.fixture(scope="module")
def hp1():
    return make_problem(n=1, N=256)          # eps=0, t0 = 1.05


@pytest.fixture(scope="module")
def hp1_wavy():
    return make_problem(n=1, N=256, eps=0.1, t_plus=1.5)   # t0 = 1


def test_residual_zero_at_s0_constant(hp1):
    z = NodeField.constant(hp1.grid, hp1.t0)
    assert np.abs(residual(z, 0.0, hp1).values).max() <= 1e-14


def test_residual_zero_at_s1_crossing(hp1):
    z = NodeField.constant(hp1.grid, 1.0)
    assert np.abs(residual(z, 1.0, hp1).values).max() <= 1e-14


def test_residual_positive_above_crossing(hp1):
    z = NodeField.constant(hp1.grid, 1.1)
    r = residual(z, 1.0, hp1).values
    # tanh(1.1) - sinh(1)/cosh(1.1), frozen from 30-digit evaluation
    assert np.abs(r - 0.09616091838644745).max() <= 1e-14
    assert np.all(r > 0)


def test_residual_errors(hp1):
    grid = hp1.grid
    with pytest.raises(wc.DomainError):
        residual(NodeField.constant(grid, 3.5), 1.0, hp1)
    # a state outside the cone: at the bottom of a strong dip the graph
    # curves away from the downward normal, so lambda goes negative
    u = grid.coords()[0]
    z = 1.2 + 0.8 * np.cos(u)
    with pytest.raises(wc.ConeError) as exc:
        residual(NodeField(z, grid), 1.0, hp1)
    assert exc.value.node is not None


def test_jacobian_row_sums_at_constant_slice(hp1):
    # derivative stencils annihilate constants, so row sums equal the
    # zeroth-order coefficient k' - d_t Psi
    z = NodeField.constant(hp1.grid, hp1.t0)
    J = assemble_jacobian(z, 0.0, hp1)
    rowsums = np.asarray(J @ np.ones(hp1.grid.size))
    t0 = hp1.t0
    kap = np.tanh(t0)
    kprime = 1.0 / np.cosh(t0) ** 2
    expected = kprime + (hp1.eps_phi + kap) * kap   # = -phi'(t0) k(t0)
    assert np.abs(rowsums - expected).max() <= 1e-12
    assert expected > 0


def test_jacobian_sparsity_tridiagonal_periodic(hp1):
    z = NodeField.constant(hp1.grid, hp1.t0)
    J = assemble_jacobian(z, 0.5, hp1).tocsr()
    nnz_per_row = np.diff(J.indptr)
    assert nnz_per_row.max() <= 3


def test_analytic_vs_colored_fd_jacobian(hp1_wavy):
    rng = np.random.default_rng(17)
    grid = hp1_wavy.grid
    worst = 0.0
    for _ in range(5):
        z = NodeField(hp1_wavy.t0 + random_smooth(grid, rng, 0.05), grid)
        s = float(rng.uniform(0, 1))
        Ja = assemble_jacobian(z, s, hp1_wavy, "analytic")
        Jf = assemble_jacobian(z, s, hp1_wavy, "fd-colored")
        diff = np.abs((Ja - Jf).toarray()).max() / np.abs(Ja.data).max()
        worst = max(worst, diff)
    assert worst <= 1e-6


def test_jacobian_mode_rejected(hp1):
    z = NodeField.constant(hp1.grid, 1.0)
    with pytest.raises(wc.ConfigError):
        assemble_jacobian(z, 0.5, hp1, "spectral")


def test_newton_zero_iterations_at_exact_solution(hp1):
    z0 = NodeField.constant(hp1.grid, hp1.t0)
    z, stats = newton_solve(z0, 0.0, hp1)
    assert stats.iterations == 0
    assert np.array_equal(z.values, z0.values)


def test_newton_uniqueness_at_s0(hp1):
    u = hp1.grid.coords()[0]
    z0 = NodeField(hp1.t0 + 0.05 * np.sin(u), hp1.grid)
    z, stats = newton_solve(z0, 0.0, hp1)
    assert np.abs(z.values - hp1.t0).max() <= 1e-8
    norms = stats.residual_norms
    assert all(b < a for a, b in zip(norms, norms[1:]))   # monotone damping
    assert stats.quadratic_constant < 100.0


def test_newton_stall_on_iteration_budget(hp1_wavy):
    z0 = NodeField.constant(hp1_wavy.grid, hp1_wavy.t0)
    cfg = SolverConfig(max_newton=1, newton_tol=1e-14)
    with pytest.raises(wc.NewtonStall):
        newton_solve(z0, 1.0, hp1_wavy, cfg)


def test_newton_barrier_assertion(hp1):
    z0 = NodeField.constant(hp1.grid, hp1.t0)
    with pytest.raises(wc.BarrierViolation):
        newton_solve(z0, 0.0, hp1, barrier=(1.1, 1.6))


def test_continuation_reaches_one_with_strictly_increasing_s(hp1):
    z, report = continuation(hp1)
    s = report.s_values
    assert s[0] == 0.0 and s[-1] == 1.0
    assert all(b > a for a, b in zip(s, s[1:]))
    assert np.abs(z.values - 1.0).max() <= 1e-8
    assert report.final.residual <= 1e-10
    assert report.verdict == "converged"


def test_continuation_wavy_stays_in_crossing_interval(hp1_wavy):
    lo, hi = wc.barrier_crossings(hp1_wavy.prescription)
    z, report = continuation(hp1_wavy)
    for st in report.steps:
        assert lo < st.z_min and st.z_max < hi
        assert st.cone_margin > 0
    assert report.final.residual <= 1e-10


def test_continuation_stall_surfaces(hp1_wavy):
    cfg = SolverConfig(max_newton=0, ds_min=1e-2)
    with pytest.raises(wc.ContinuationStall):
        continuation(hp1_wavy, cfg)


def test_step_doubling_after_easy_successes(hp1):
    _, report = continuation(hp1)
    ds = [st.ds for st in report.steps[1:]]
    assert any(b > a for a, b in zip(ds, ds[1:]))   # doubling happened


def test_constant_solution_is_stencil_exact(hp1):
    for N in (128, 256):
        hp = make_problem(n=1, N=N)
        z = NodeField.constant(hp.grid, 1.0)
        assert np.abs(residual(z, 1.0, hp).values).max() <= 1e-13


def test_manufactured_residual_order(cosh_profile):
    spec = wc.CurvatureSpec(1, 1)
    errs = [manufactured_residual_norm(wc.make_grid(1, N), cosh_profile, spec)
            for N in (64, 128)]
    assert 3.4 <= errs[0] / errs[1] <= 4.6


def test_manufactured_newton_polish(cosh_profile):
    grid = wc.make_grid(1, 128)
    spec = wc.CurvatureSpec(1, 1)
    zm, hp = build_manufactured(grid, cosh_profile, spec)
    assert hp.unsafe
    z, stats = newton_solve(zm, 1.0, hp)
    # the discrete solution is O(dx^2) from the manufactured field
    assert np.abs(z.values - zm.values).max() <= 10 * grid.dx ** 2
    assert stats.iterations <= 3


def test_mesh_independent_newton_counts():
    iters = []
    for N in (128, 256):
        hp = make_problem(n=1, N=N, eps=0.1, t_plus=1.5)
        z0 = NodeField.constant(hp.grid, hp.t0)
        _, stats = newton_solve(z0, 1.0, hp)
        iters.append(stats.iterations)
    assert abs(iters[0] - iters[1]) <= 2


def test_jacobian_modes_give_same_newton_iterates():
    # warm start as inside continuation: converged at s=0.9, step to s=1
    hp = make_problem(n=1, N=256, eps=0.1, t_plus=1.5)
    zprev, _ = newton_solve(NodeField.constant(hp.grid, hp.t0), 0.9, hp)

    def first_iterates(mode, k=3):
        z = zprev.values.copy()
        out = []
        for _ in range(k):
            r = residual(z, 1.0, hp).values
            J = assemble_jacobian(z, 1.0, hp, mode)
            z = z + hp.grid.unflatten(
                spla.spsolve(J.tocsc(), -hp.grid.flatten(r)))
            out.append(z.copy())
        return out

    za = first_iterates("analytic")
    zf = first_iterates("fd-colored")
    for a, b in zip(za, zf):
        assert np.abs(a - b).max() <= 1e-8


def test_solver_config_validation():
    with pytest.raises(wc.ConfigError):
        SolverConfig(newton_tol=-1.0)
    with pytest.raises(wc.ConfigError):
        SolverConfig(ds0=2.0)
    with pytest.raises(wc.ConfigError):
        SolverConfig(jacobian_mode="magic")


def test_report_csv_round_trip(hp1):
    _, report = continuation(hp1)
    rows = list(report.csv_rows())
    assert len(rows) == len(report.steps)
    first = rows[0].split(",")
    assert float(first[0]) == 0.0
    assert len(first) == len(report.csv_header().split(","))
