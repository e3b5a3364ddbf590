import numpy as np
import pytest

import warpcurve as wc
from warpcurve.grid import NodeField, derivatives, load_field, reduce, save_field


def test_make_grid_spacing():
    g = wc.make_grid(1, 256)
    assert g.dx == pytest.approx(2 * np.pi / 256, rel=1e-15)
    g2 = wc.make_grid(2, 48, order=4)
    assert g2.size == 2304


@pytest.mark.parametrize("bad", [
    dict(n=3, N=32), dict(n=1, N=8), dict(n=1, N=64, L=-1.0),
    dict(n=1, N=64, order=3),
])
def test_make_grid_rejects(bad):
    with pytest.raises(wc.ConfigError):
        wc.make_grid(**bad)


def test_constant_field_has_zero_derivatives():
    g = wc.make_grid(2, 24)
    grad, hess = derivatives(NodeField.constant(g, 3.7))
    assert np.all(grad == 0.0)
    assert np.all(hess == 0.0)


def test_gradient_of_sine_truncation_constant():
    g = wc.make_grid(1, 256)
    u = g.coords()[0]
    grad = g.gradient(np.sin(u))[0]
    err = np.abs(grad - np.cos(u)).max()
    C = err / g.dx ** 2
    assert C <= 0.2          # centered-difference Taylor remainder is 1/6


def test_mixed_partial_at_quarter_period():
    g = wc.make_grid(2, 16)
    X, Y = g.coords()
    hess = g.hessian(np.sin(X) * np.sin(Y))
    i = 16 // 4              # node exactly at (pi/2, pi/2)
    assert abs(hess[0, 1][i, i] - 0.0) <= g.dx ** 2
    assert np.array_equal(hess[0, 1], hess[1, 0])


def test_reduce_modes():
    g = wc.make_grid(1, 256)
    assert reduce(NodeField.constant(g, 3.0), "max") == 3.0
    alt = NodeField(np.where(np.arange(256) % 2 == 0, 1.0, -1.0), g)
    assert reduce(alt, "linf") == 1.0
    sin = NodeField(np.sin(g.coords()[0]), g)
    assert reduce(sin, "l2") == pytest.approx(1.7724538509055160, abs=1e-3)
    with pytest.raises(wc.ConfigError):
        reduce(sin, "median")


@pytest.mark.parametrize("order", [2, 4])
def test_integration_by_parts_skew_adjoint(order):
    g = wc.make_grid(2, 24, order=order)
    rng = np.random.default_rng(7)
    z = wc.random_smooth(g, rng, 1.0, max_freq=3)
    w = [wc.random_smooth(g, rng, 1.0, max_freq=3) for _ in range(g.n)]
    grad = g.gradient(z)
    div = sum(g.d1(w[d], d) for d in range(g.n))
    total = sum((grad[d] * w[d]).sum() for d in range(g.n)) + (z * div).sum()
    assert abs(total) * g.dx ** g.n <= 1e-10


@pytest.mark.parametrize("order", [2, 4])
def test_gradient_convergence_order(order):
    errs = []
    for N in (32, 64):
        g = wc.make_grid(1, N, order=order)
        u = g.coords()[0]
        errs.append(np.abs(g.gradient(np.sin(u))[0] - np.cos(u)).max())
    ratio = errs[0] / errs[1]
    assert abs(ratio - 2 ** order) <= 0.1 * 2 ** order


def test_node_field_validation():
    g = wc.make_grid(1, 32)
    with pytest.raises(wc.ShapeError):
        NodeField(np.zeros(31), g)
    bad = np.zeros(32)
    bad[3] = np.inf
    with pytest.raises(wc.ShapeError):
        NodeField(bad, g)


def test_field_serialization_round_trip(tmp_path):
    g = wc.make_grid(2, 16)
    rng = np.random.default_rng(3)
    fld = NodeField(rng.normal(size=g.shape), g)
    path = tmp_path / "z.f64"
    save_field(fld, path)
    raw = path.read_bytes()
    assert raw == fld.values.ravel(order="F").astype("<f8").tobytes()
    back = load_field(path, g)
    assert np.array_equal(back.values, fld.values)


def test_sparse_operators_match_roll_stencils():
    for n, N, order in ((1, 32, 2), (1, 32, 4), (2, 16, 2), (2, 16, 4)):
        g = wc.make_grid(n, N, order=order)
        rng = np.random.default_rng(n * 10 + order)
        z = rng.normal(size=g.shape)
        flat = g.flatten(z)
        for d in range(n):
            assert np.allclose(g.d1_matrix(d) @ flat, g.flatten(g.d1(z, d)),
                               atol=1e-12)
            assert np.allclose(g.d2_matrix(d) @ flat, g.flatten(g.d2(z, d)),
                               atol=1e-12)
        if n == 2:
            mixed = g.d1(g.d1(z, 0), 1)
            assert np.allclose(g.d11_matrix() @ flat, g.flatten(mixed),
                               atol=1e-12)


@pytest.mark.parametrize("n,N,order", [(1, 20, 2), (1, 16, 4), (2, 17, 2),
                                       (2, 16, 4)])
def test_coloring_is_a_valid_jacobian_coloring(n, N, order):
    g = wc.make_grid(n, max(N, 16), order=order)
    colors, ncol = g.coloring()
    foot = g.stencil_footprint()
    conflicts = set()
    for a in foot:
        for b in foot:
            conflicts.add(tuple((ai - bi) % g.N for ai, bi in zip(a, b)))
    conflicts.discard((0,) * n)
    if n == 1:
        nodes = [(i,) for i in range(g.N)]
    else:
        nodes = [(i0, i1) for i1 in range(g.N) for i0 in range(g.N)]
    for flat, node in enumerate(nodes):
        for d in conflicts:
            nb = tuple((x + y) % g.N for x, y in zip(node, d))
            nb_flat = nb[0] if n == 1 else nb[0] + g.N * nb[1]
            assert colors[flat] != colors[nb_flat]
    assert ncol == colors.max() + 1
