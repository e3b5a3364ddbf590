"""Residual, sparse Jacobian, damped Newton, and continuation in s.

The discrete problem at homotopy parameter s is, per node,

    R(z) = f(lam(z)) - Psi(s, z, u) = 0,

with lam the principal curvatures of the graph of z.  The analytic
Jacobian differentiates the eigenvalue composite through the generalized
eigenproblem a v = lam g v: with g-orthonormal eigenvectors v_i,

    d f(lam) = sum_i f_i v_i^T (da - lam_i dg) v_i,

which needs no matrix square roots and stays smooth through eigenvalue
crossings because f is symmetric.  Writing M = sum f_i v_i v_i^T and
M2 = sum f_i lam_i v_i v_i^T, the per-node sensitivities to (z, grad z,
hess z) contract against the sparse stencil operators of the grid.

Continuation starts from the exact constant solution z = t0 at s = 0 and
advances s adaptively (halve on stall, double after two easy steps,
clamp to land on s = 1), asserting the barrier slab and cone
admissibility at every accepted state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import curvature
from .errors import (BarrierViolation, ConeError, ConfigError,
                     ContinuationStall, DomainError, NewtonStall)
from .geometry import compute_geometry, geometry_from_derivatives
from .grid import NodeField


@dataclass(frozen=True)
class SolverConfig:
    newton_tol: float = 1e-10     # residual sup-norm target
    max_newton: int = 30
    max_halvings: int = 20        # backtracking budget per Newton step
    ds0: float = 0.1
    ds_min: float = 1e-4
    jacobian_mode: str = "analytic"   # or "fd-colored"
    fd_step: float = 1e-6             # scaled by (1 + |z|_inf)
    easy_iters: int = 4               # step counts as easy if iters <= this

    def __post_init__(self):
        if min(self.newton_tol, self.ds0, self.ds_min, self.fd_step) <= 0:
            raise ConfigError("solver tolerances must be positive")
        if self.ds0 > 1.0:
            raise ConfigError("initial continuation step must be <= 1")
        if self.jacobian_mode not in ("analytic", "fd-colored"):
            raise ConfigError(f"unknown jacobian mode {self.jacobian_mode!r}")


@dataclass
class _EvalState:
    geom: object
    fvals: np.ndarray
    fgrad: np.ndarray
    psi: np.ndarray
    psi_t: np.ndarray
    res: np.ndarray


def _evaluate(zvals, s, hp):
    geom = compute_geometry(zvals, hp.grid, hp.profile)
    fvals = curvature.f_eval(hp.spec, geom.lam)
    fgrad = curvature.f_grad(hp.spec, geom.lam)
    psi, psi_t = hp.psi_of(s, zvals)
    return _EvalState(geom=geom, fvals=fvals, fgrad=fgrad, psi=psi,
                      psi_t=psi_t, res=fvals - psi)


def residual(z, s, hp):
    """Per-node f(lam(z)) - Psi(s, z, u) as a NodeField."""
    zvals = z.values if isinstance(z, NodeField) else np.asarray(z, float)
    state = _evaluate(zvals, s, hp)
    return NodeField(state.res, hp.grid)


def _analytic_jacobian(state, hp):
    geom = state.geom
    grid = hp.grid
    n = grid.n
    h, h1, h2, W = geom.h, geom.h1, geom.h2, geom.W
    p = geom.grad
    fi = state.fgrad
    lam = geom.lam
    V = geom.g_inv_sqrt @ geom.eigvec          # g-orthonormal eigenvectors
    M = np.einsum("...ik,...k,...jk->...ij", V, fi, V)
    M2 = np.einsum("...ik,...k,...jk->...ij", V, fi * lam, V)
    sfl = (fi * lam).sum(axis=-1)
    Mp = np.einsum("...ij,...j->...i", M, p)
    M2p = np.einsum("...ij,...j->...i", M2, p)
    c_hess = -(h / W)[..., None, None] * M
    c_grad = (4.0 * h1 / W)[..., None] * Mp \
        - p * (sfl / W ** 2)[..., None] - 2.0 * M2p
    MH = np.einsum("...ij,...ij->...", M, geom.hess)
    pMp = np.einsum("...i,...ij,...j->...", p, M, p)
    trM = np.einsum("...ii->...", M)
    trM2 = np.einsum("...ii->...", M2)
    c_z = (-h1 * MH + 2.0 * h2 * pMp + (2.0 * h * h1 ** 2 + h ** 2 * h2) * trM) \
        / W - sfl * h * h1 / W ** 2 - 2.0 * h * h1 * trM2
    flat = grid.flatten
    J = sp.diags(flat(c_z - state.psi_t), format="csr")
    for d in range(n):
        J = J + sp.diags(flat(c_grad[..., d])) @ grid.d1_matrix(d)
        J = J + sp.diags(flat(c_hess[..., d, d])) @ grid.d2_matrix(d)
    if n == 2:
        # the symmetric cross entries share one stencil, hence the factor 2
        J = J + sp.diags(flat(2.0 * c_hess[..., 0, 1])) @ grid.d11_matrix()
    return J.tocsr()


def _fd_colored_jacobian(zvals, s, hp, step):
    grid = hp.grid
    colors, ncol = grid.coloring()
    foot = grid.stencil_footprint()
    N, size = grid.N, grid.size
    if grid.n == 1:
        idx = np.arange(size)
        maps = [(idx - d[0]) % N for d in foot]
    else:
        i0, i1 = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
        i0f, i1f = grid.flatten(i0), grid.flatten(i1)
        maps = [((i0f - d[0]) % N) + N * ((i1f - d[1]) % N) for d in foot]
    rows, cols, data = [], [], []
    for c in range(ncol):
        members = np.nonzero(colors == c)[0]
        pert = np.zeros(size)
        pert[members] = step
        dz = grid.unflatten(pert)
        rp = grid.flatten(_evaluate(zvals + dz, s, hp).res)
        rm = grid.flatten(_evaluate(zvals - dz, s, hp).res)
        dr = (rp - rm) / (2.0 * step)
        for m in maps:
            r = m[members]
            rows.append(r)
            cols.append(members)
            data.append(dr[r])
    return sp.csr_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(size, size))


def assemble_jacobian(z, s, hp, mode="analytic", cfg=None):
    """Sparse Jacobian of the residual at z (stencil-footprint sparsity)."""
    cfg = cfg or SolverConfig()
    zvals = z.values if isinstance(z, NodeField) else np.asarray(z, float)
    if mode == "analytic":
        return _analytic_jacobian(_evaluate(zvals, s, hp), hp)
    if mode != "fd-colored":
        raise ConfigError(f"unknown jacobian mode {mode!r}")
    step = cfg.fd_step * (1.0 + float(np.abs(zvals).max()))
    for attempt in range(4):
        try:
            return _fd_colored_jacobian(zvals, s, hp, step)
        except ConeError:
            if attempt == 3:
                raise
            step /= 10.0


@dataclass
class NewtonStats:
    iterations: int
    residual_norms: list
    halvings: int
    converged: bool

    @property
    def quadratic_constant(self):
        """max r_{k+1} / r_k^2 over the tail pairs above rounding floor."""
        rs = [r for r in self.residual_norms if r > 5e-15]
        pairs = [(rs[i], rs[i + 1]) for i in range(len(rs) - 1)]
        tail = pairs[-3:]
        if not tail:
            return 0.0
        return max(rb / ra ** 2 for ra, rb in tail)


def _check_barrier(zvals, barrier):
    if barrier is None:
        return
    lo, hi = barrier
    zmin, zmax = float(zvals.min()), float(zvals.max())
    if not (lo < zmin and zmax < hi):
        raise BarrierViolation(
            f"iterate range [{zmin:.6g}, {zmax:.6g}] leaves the open slab "
            f"({lo:.6g}, {hi:.6g})")


def newton_solve(z0, s, hp, cfg=None, barrier=None):
    """Damped Newton at fixed s; every accepted iterate stays admissible.

    Backtracks (up to cfg.max_halvings) while the trial is inadmissible,
    leaves the profile interval, or fails to decrease the residual
    sup-norm.  When barrier levels are supplied, every accepted iterate is
    asserted to stay strictly inside them.
    """
    cfg = cfg or SolverConfig()
    zvals = (z0.values if isinstance(z0, NodeField) else np.asarray(z0, float)
             ).copy()
    state = _evaluate(zvals, s, hp)   # ConeError here = inadmissible start
    _check_barrier(zvals, barrier)
    rnorm = float(np.abs(state.res).max())
    norms = [rnorm]
    iters = 0
    halvings = 0
    while rnorm > cfg.newton_tol:
        if iters >= cfg.max_newton:
            raise NewtonStall(
                f"no convergence in {cfg.max_newton} iterations at s={s:.6g} "
                f"(residual {rnorm:.3e})")
        if cfg.jacobian_mode == "analytic":
            J = _analytic_jacobian(state, hp)
        else:
            J = assemble_jacobian(zvals, s, hp, "fd-colored", cfg)
        delta = spla.spsolve(J.tocsc(), -hp.grid.flatten(state.res))
        delta = hp.grid.unflatten(delta)
        alpha = 1.0
        accepted = False
        for _ in range(cfg.max_halvings + 1):
            trial = zvals + alpha * delta
            try:
                tstate = _evaluate(trial, s, hp)
            except (ConeError, DomainError):
                alpha *= 0.5
                halvings += 1
                continue
            tnorm = float(np.abs(tstate.res).max())
            if tnorm < rnorm:
                zvals, state, rnorm = trial, tstate, tnorm
                accepted = True
                break
            alpha *= 0.5
            halvings += 1
        if not accepted:
            raise NewtonStall(
                f"backtracking exhausted at s={s:.6g} (residual {rnorm:.3e})")
        _check_barrier(zvals, barrier)
        iters += 1
        norms.append(rnorm)
    return (NodeField(zvals, hp.grid),
            NewtonStats(iterations=iters, residual_norms=norms,
                        halvings=halvings, converged=True))


@dataclass
class StepRecord:
    s: float
    ds: float
    newton_iters: int
    residual: float
    z_min: float
    z_max: float
    cone_margin: float
    grad_max: float
    lam1_max: float


@dataclass
class SolveReport:
    steps: list = field(default_factory=list)
    verdict: str = "incomplete"

    @property
    def s_values(self):
        return [st.s for st in self.steps]

    @property
    def final(self):
        return self.steps[-1]

    def csv_header(self):
        return ("s,ds,newton_iters,residual,z_min,z_max,cone_margin,"
                "grad_max,lam1_max")

    def csv_rows(self):
        for st in self.steps:
            yield (f"{st.s:.17g},{st.ds:.17g},{st.newton_iters},"
                   f"{st.residual:.17g},{st.z_min:.17g},{st.z_max:.17g},"
                   f"{st.cone_margin:.17g},{st.grad_max:.17g},"
                   f"{st.lam1_max:.17g}")


def _monitors(zvals, s, hp):
    state = _evaluate(zvals, s, hp)
    margin = curvature.cone_margin(hp.spec, state.geom.lam)
    return (float(np.abs(state.res).max()), float(zvals.min()),
            float(zvals.max()), float(np.min(margin)),
            state.geom.grad_sup, float(state.geom.lam[..., 0].max()))


def continuation(hp, cfg=None):
    """Track the solution branch from (s=0, z=t0) to s=1.

    Adaptive stepping: halve ds on a Newton stall (ContinuationStall below
    ds_min), double after two consecutive easy steps, clamp the last step
    so s = 1 is hit exactly.  Accepted states are asserted to stay inside
    the barrier slab and the admissibility cone.
    """
    cfg = cfg or SolverConfig()
    barrier = (hp.t_minus, hp.t_plus)
    report = SolveReport()
    z = NodeField.constant(hp.grid, hp.t0)
    z, stats = newton_solve(z, 0.0, hp, cfg, barrier=barrier)
    res, zmin, zmax, margin, gmax, lmax = _monitors(z.values, 0.0, hp)
    report.steps.append(StepRecord(0.0, 0.0, stats.iterations, res, zmin,
                                   zmax, margin, gmax, lmax))
    s = 0.0
    ds = cfg.ds0
    easy_streak = 0
    while s < 1.0:
        s_try = min(s + ds, 1.0)
        try:
            z_new, stats = newton_solve(z, s_try, hp, cfg, barrier=barrier)
        except NewtonStall:
            ds *= 0.5
            easy_streak = 0
            if ds < cfg.ds_min:
                raise ContinuationStall(
                    f"step fell below ds_min = {cfg.ds_min:.3e} at s = {s:.6g}")
            continue
        z = z_new
        step_ds = s_try - s
        s = s_try
        res, zmin, zmax, margin, gmax, lmax = _monitors(z.values, s, hp)
        if margin <= 0:
            raise ConeError(f"accepted state left the cone at s={s:.6g}")
        report.steps.append(StepRecord(s, step_ds, stats.iterations, res,
                                       zmin, zmax, margin, gmax, lmax))
        if stats.iterations <= cfg.easy_iters:
            easy_streak += 1
        else:
            easy_streak = 0
        if easy_streak >= 2:
            ds = min(2.0 * ds, 1.0)
            easy_streak = 0
    report.verdict = "converged"
    return z, report


# -- manufactured solutions ---------------------------------------------------

class ManufacturedProblem:
    """Prescription tabulated from an exact height field (unsafe mode).

    psi is a function of u alone (t-independent), so d_t Psi = 0; it
    generally violates the decay hypothesis, which is the point: it gives
    exact nonconstant solutions for convergence-order studies.
    """

    unsafe = True

    def __init__(self, grid, profile, spec, psi_values, t_minus, t_plus):
        self.grid = grid
        self.profile = profile
        self.spec = spec
        self.psi_values = np.asarray(psi_values, dtype=float)
        self.t_minus = float(t_minus)
        self.t_plus = float(t_plus)
        self.t0 = 0.5 * (t_minus + t_plus)

    def psi_of(self, s, zvals):
        zeros = np.zeros_like(self.psi_values)
        return self.psi_values, zeros


def manufactured_field(grid, center=1.0, amplitude=0.01, freqs=None):
    """Exact height field with analytic derivatives.

    n=1: z = c + A sin(m0 x);  n=2: z = c + A sin(m0 x) cos(m1 y), with
    x, y scaled to period L.  Returns (z, grad, hess) in grid layout.
    """
    if freqs is None:
        freqs = (1,) * grid.n
    w = 2.0 * np.pi / grid.L
    X = grid.coords()
    if grid.n == 1:
        a = freqs[0] * w
        x = a * X[0]
        z = center + amplitude * np.sin(x)
        grad = (amplitude * a * np.cos(x))[None]
        hess = (-amplitude * a * a * np.sin(x))[None, None]
        return z, grad, hess
    a = freqs[0] * w
    b = freqs[1] * w
    x = a * X[0]
    y = b * X[1]
    sx, cx = np.sin(x), np.cos(x)
    sy, cy = np.sin(y), np.cos(y)
    z = center + amplitude * sx * cy
    grad = np.stack([amplitude * a * cx * cy, -amplitude * b * sx * sy])
    hxx = -amplitude * a * a * sx * cy
    hyy = -amplitude * b * b * sx * cy
    hxy = -amplitude * a * b * cx * sy
    hess = np.stack([np.stack([hxx, hxy]), np.stack([hxy, hyy])])
    return z, grad, hess


def build_manufactured(grid, profile, spec, center=1.0, amplitude=0.01,
                       freqs=None):
    """Manufactured problem: z_m plus the psi that makes it exact.

    The prescription is f(lam) of the *continuum* geometry of z_m (exact
    analytic derivatives), so the discrete residual at z_m is pure stencil
    truncation error.
    """
    z, grad, hess = manufactured_field(grid, center, amplitude, freqs)
    geom = geometry_from_derivatives(z, grad, hess, grid, profile)
    psi = curvature.f_eval(spec, geom.lam)
    span = max(3.0 * amplitude, 1e-3)
    hp = ManufacturedProblem(grid, profile, spec, psi,
                             t_minus=center - span, t_plus=center + span)
    return NodeField(z, grid), hp


def manufactured_residual_norm(grid, profile, spec, center=1.0,
                               amplitude=0.01, freqs=None):
    """Sup-norm of the discrete residual at the manufactured solution."""
    z, hp = build_manufactured(grid, profile, spec, center, amplitude, freqs)
    return float(np.abs(residual(z, 1.0, hp).values).max())
