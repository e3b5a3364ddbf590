"""Extrinsic geometry of the graph {(z(u), u)} in the warped product.

All quantities are computed per node from (z, grad z, hess z) and the
profile values h(z), h'(z):

    W       = sqrt(h^2 + |grad z|^2)
    g_ij    = h^2 delta_ij + z_i z_j
    g^ij    = delta_ij / h^2 - z_i z_j / (h^2 W^2)
    a_ij    = (-h z_ij + 2 h' z_i z_j + h^2 h' delta_ij) / W
    A       = g^{-1} a                      (shape operator)
    lam     = eigenvalues of g^{-1/2} a g^{-1/2}, sorted descending
    nu0     = <N, e_0> = -h / W             (downward orientation)
    tau     = -h nu0 = h^2 / W              (support function)
    eta     = -H(z), H an antiderivative of h

Eigenvalues come from the symmetrized form, which is similar to A, so
they are real and equal to the principal curvatures.  The inverse square
root of the rank-one-updated metric has the cancellation-free closed form

    g^{-1/2} = I/h - (p p^T) / (W h (W + h)),   p = grad z.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import FrameError
from .grid import NodeField, TorusGrid

_FRAME_TOL = 1e-10


@dataclass
class GraphGeometry:
    """Per-node extrinsic data of a graph (grid axes first, matrix axes last)."""

    grid: TorusGrid = field(repr=False)
    profile: object = field(repr=False)
    z: np.ndarray = field(repr=False)
    grad: np.ndarray = field(repr=False)      # (*shape, n)
    hess: np.ndarray = field(repr=False)      # (*shape, n, n)
    h: np.ndarray = field(repr=False)
    h1: np.ndarray = field(repr=False)
    h2: np.ndarray = field(repr=False)
    W: np.ndarray = field(repr=False)
    g: np.ndarray = field(repr=False)
    g_inv: np.ndarray = field(repr=False)
    g_inv_sqrt: np.ndarray = field(repr=False)
    a: np.ndarray = field(repr=False)
    A: np.ndarray = field(repr=False)
    atilde: np.ndarray = field(repr=False)
    lam: np.ndarray = field(repr=False)       # (*shape, n), descending
    eigvec: np.ndarray = field(repr=False)    # (*shape, n, n), cols match lam
    nu0: np.ndarray = field(repr=False)
    tau: np.ndarray = field(repr=False)
    eta: np.ndarray = field(repr=False)

    @property
    def grad_sup(self):
        return float(np.sqrt((self.grad ** 2).sum(axis=-1)).max())


def geometry_from_derivatives(zvals, grad, hess, grid, profile, eta_anchor=None):
    """Build the geometry from explicit derivative fields.

    grad and hess use the grid layout (n, ...) and (n, n, ...); the solver
    passes discrete stencils here, the manufactured-solution harness passes
    exact analytic derivatives.
    """
    n = grid.n
    h, h1, h2 = profile.eval(zvals)
    h = np.asarray(h)
    h1 = np.asarray(h1)
    h2 = np.asarray(h2)
    p = np.moveaxis(np.asarray(grad), 0, -1)              # (*shape, n)
    H = np.moveaxis(np.asarray(hess), (0, 1), (-2, -1))    # (*shape, n, n)
    p2 = (p * p).sum(axis=-1)
    W = np.sqrt(h * h + p2)
    eye = np.eye(n)
    pp = p[..., :, None] * p[..., None, :]
    g = (h * h)[..., None, None] * eye + pp
    g_inv = (1.0 / (h * h))[..., None, None] * eye \
        - pp * (1.0 / (h * h * W * W))[..., None, None]
    g_inv_sqrt = (1.0 / h)[..., None, None] * eye \
        - pp * (1.0 / (W * h * (W + h)))[..., None, None]
    b = -h[..., None, None] * H + (2.0 * h1)[..., None, None] * pp \
        + (h * h * h1)[..., None, None] * eye
    a = b / W[..., None, None]
    A = g_inv @ a
    atilde = g_inv_sqrt @ a @ g_inv_sqrt
    atilde = 0.5 * (atilde + np.swapaxes(atilde, -1, -2))
    w, Q = np.linalg.eigh(atilde)
    lam = w[..., ::-1]
    Q = Q[..., ::-1]
    eta = -profile.antiderivative(zvals)
    if eta_anchor is not None:
        eta = eta + profile.antiderivative(eta_anchor)
    return GraphGeometry(
        grid=grid, profile=profile, z=np.asarray(zvals, dtype=float),
        grad=p, hess=H, h=h, h1=h1, h2=h2, W=W, g=g, g_inv=g_inv,
        g_inv_sqrt=g_inv_sqrt, a=a, A=A, atilde=atilde, lam=lam, eigvec=Q,
        nu0=-h / W, tau=h * h / W, eta=np.asarray(eta, dtype=float))


def compute_geometry(z, grid=None, profile=None, eta_anchor=None):
    """Geometry of a discrete height field (stencil derivatives).

    Raises DomainError if any height leaves the profile interval.
    """
    if isinstance(z, NodeField):
        zvals = z.values
        grid = z.grid if grid is None else grid
    else:
        zvals = np.asarray(z, dtype=float)
    return geometry_from_derivatives(
        zvals, grid.gradient(zvals), grid.hessian(zvals), grid, profile,
        eta_anchor=eta_anchor)


@dataclass
class SpecialFrameReport:
    node: object
    deviation: float
    special: np.ndarray
    general: np.ndarray


def special_frame_check(geom, node):
    """Recompute the shape operator at one node in the gradient-aligned frame.

    Rotates coordinates so axis 1 follows grad z, evaluates the special
    frame formulas (diagonal metric), and reports the maximum deviation
    from the rotated general-formula operator g^{-1} a.
    """
    gvec = np.atleast_1d(geom.grad[node])
    norm = float(np.sqrt((gvec ** 2).sum()))
    if norm < _FRAME_TOL:
        raise FrameError(f"|grad z| = {norm:.3e} at node {node}: "
                         "special frame undefined")
    n = geom.grid.n
    if n == 1:
        R = np.array([[1.0 if gvec[0] > 0 else -1.0]])
    else:
        e1 = gvec / norm
        R = np.array([[e1[0], e1[1]], [-e1[1], e1[0]]])
    Ht = R @ np.atleast_2d(geom.hess[node]) @ R.T
    h = float(geom.h[node])
    h1 = float(geom.h1[node])
    W = float(geom.W[node])
    z1 = norm
    A_sp = np.empty((n, n))
    A_sp[0, 0] = (-h * Ht[0, 0] + 2.0 * h1 * z1 * z1 + h * h * h1) / W ** 3
    for j in range(1, n):
        A_sp[0, j] = -h * Ht[0, j] / W ** 3
        A_sp[j, 0] = -Ht[j, 0] / (h * W)
    for i in range(1, n):
        for j in range(1, n):
            A_sp[i, j] = (-h * Ht[i, j] + (h * h * h1 if i == j else 0.0)) \
                / (h * h * W)
    A_gen = R @ np.atleast_2d(geom.A[node]) @ R.T
    dev = float(np.abs(A_sp - A_gen).max())
    return SpecialFrameReport(node=node, deviation=dev, special=A_sp,
                              general=A_gen)


def support_identity_check(geom):
    """Discrete residuals of the support-function gradient identities.

    err_eta: base identity  d_i(eta o z) = -h(z) z_i.
    err_tau: surface identity  grad tau = -A(grad eta), with surface
    gradients expressed through g^{-1} in base coordinates.

    Both vanish in the continuum, so the returned values are pure stencil
    truncation errors, O(dx^order).
    """
    grid = geom.grid
    Deta = np.moveaxis(grid.gradient(geom.eta), 0, -1)
    err_eta = float(np.abs(Deta + geom.h[..., None] * geom.grad).max())
    Dtau = np.moveaxis(grid.gradient(geom.tau), 0, -1)
    lhs = np.einsum("...ij,...j->...i", geom.g_inv, Dtau)
    rhs = -np.einsum("...ij,...j->...i", geom.A,
                     np.einsum("...ij,...j->...i", geom.g_inv, Deta))
    err_tau = float(np.abs(lhs - rhs).max())
    return err_eta, err_tau


def fields_csv(geom):
    """CSV dump of (W, lambda_max, lambda_min, tau) keyed by coordinates."""
    grid = geom.grid
    buf = io.StringIO()
    axes = ",".join(f"u{d}" for d in range(grid.n))
    buf.write(f"{axes},W,lambda_max,lambda_min,tau\n")
    X = grid.coords()
    lam_max = geom.lam[..., 0]
    lam_min = geom.lam[..., -1]
    for node in _iter_nodes(grid):
        cs = ",".join(format(X[d][node], ".17g") for d in range(grid.n))
        buf.write(f"{cs},{geom.W[node]:.17g},{lam_max[node]:.17g},"
                  f"{lam_min[node]:.17g},{geom.tau[node]:.17g}\n")
    return buf.getvalue()


def _iter_nodes(grid):
    # flat (F) order: axis 0 fastest
    if grid.n == 1:
        for i in range(grid.N):
            yield (i,)
    else:
        for i1 in range(grid.N):
            for i0 in range(grid.N):
                yield (i0, i1)
