"""Normalized r-th mean curvature functions on Garding cones.

The admissible symmetric function of order r in dimension n is

    f(lam) = (S_r(lam) / C(n, r)) ** (1/r),

defined on the cone Gamma_r = {S_1 > 0, ..., S_r > 0}.  The normalization
makes f homogeneous of degree one with f(1, ..., 1) = 1, so the radial
level k(t) = f(kappa, ..., kappa) equals kappa(t) for every r, Euler's
relation gives sum_i f_i lam_i = f exactly, and f is concave on Gamma_r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConeError, ConfigError

# below this eigenvalue gap the spectral divided differences are replaced
# by their repeated-eigenvalue limits
EIG_PAIR_TOL = 1e-9


@dataclass(frozen=True)
class CurvatureSpec:
    """Order r and dimension n of the curvature function, 1 <= r <= n."""

    n: int
    r: int

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError(f"dimension n must be >= 1, got {self.n}")
        if not 1 <= self.r <= self.n:
            raise ConfigError(f"order r must satisfy 1 <= r <= n={self.n}")

    @property
    def normalization(self):
        return float(math.comb(self.n, self.r))


def sym_poly(lam, q):
    """Elementary symmetric polynomial S_q over the last axis; S_0 = 1."""
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    if not 0 <= q <= n:
        raise ConfigError(f"order q must satisfy 0 <= q <= {n}")
    batch = lam.shape[:-1]
    e = np.zeros(batch + (q + 1,))
    e[..., 0] = 1.0
    for i in range(n):
        li = lam[..., i]
        top = min(i + 1, q)
        for m in range(top, 0, -1):
            e[..., m] += li * e[..., m - 1]
    out = e[..., q]
    return float(out) if out.ndim == 0 else out


def _sym_poly_reduced(lam, q):
    """S_q(lam | i) with entry i omitted, shape batch + (n,).

    Uses e_q(lam) = e_q(lam|i) + lam_i e_{q-1}(lam|i) upward in q.
    """
    lam = np.asarray(lam, dtype=float)
    n = lam.shape[-1]
    red = np.ones(lam.shape[:-1] + (n,))
    for m in range(1, q + 1):
        full = np.asarray(sym_poly(lam, m))
        red = full[..., None] - lam * red
    return red


def cone_margin(spec, lam):
    """min over 1 <= q <= r of S_q(lam); positive iff lam is in Gamma_r."""
    lam = np.asarray(lam, dtype=float)
    margins = [np.asarray(sym_poly(lam, q)) for q in range(1, spec.r + 1)]
    out = margins[0]
    for m in margins[1:]:
        out = np.minimum(out, m)
    return float(out) if out.ndim == 0 else out


def in_cone(spec, lam):
    """Membership in the Garding cone Gamma_r (strict inequalities)."""
    m = cone_margin(spec, lam)
    if np.ndim(m) == 0:
        return bool(m > 0)
    return m > 0


def _require_cone(spec, lam):
    m = np.asarray(cone_margin(spec, lam))
    if np.any(m <= 0):
        if m.ndim == 0:
            raise ConeError(f"lambda outside Gamma_{spec.r}: margin {float(m):.3e}")
        flat = int(np.argmin(m))
        node = np.unravel_index(flat, m.shape)
        raise ConeError(
            f"lambda outside Gamma_{spec.r} at node {node}: "
            f"margin {float(m.ravel()[flat]):.3e}", node=node)


def f_eval(spec, lam):
    """Normalized curvature value (S_r / C(n,r)) ** (1/r) on Gamma_r."""
    lam = np.asarray(lam, dtype=float)
    _require_cone(spec, lam)
    val = (sym_poly(lam, spec.r) / spec.normalization) ** (1.0 / spec.r)
    return float(val) if np.ndim(val) == 0 else val


def f_grad(spec, lam):
    """Partial derivatives f_i, all positive on Gamma_r.

    f_i = (1/r) (S_r/C)^(1/r - 1) S_{r-1}(lam|i) / C.
    """
    lam = np.asarray(lam, dtype=float)
    _require_cone(spec, lam)
    C = spec.normalization
    r = spec.r
    Sr = np.asarray(sym_poly(lam, r))
    red = _sym_poly_reduced(lam, r - 1)
    out = (1.0 / r) * (Sr / C) ** (1.0 / r - 1.0)
    return out[..., None] * red / C


def _cluster_average(lam, vals, tol=EIG_PAIR_TOL):
    """Average vals over clusters of nearly equal (sorted) lam entries.

    Implements the repeated-eigenvalue limit: inside a cluster the
    divided differences of the spectral calculus degenerate and the
    derivative values must coincide.
    """
    lam = np.asarray(lam, dtype=float)
    vals = np.array(vals, dtype=float)
    n = lam.shape[0]
    start = 0
    for i in range(1, n + 1):
        if i == n or abs(lam[i] - lam[i - 1]) > tol:
            if i - start > 1:
                vals[start:i] = vals[start:i].mean()
            start = i
    return vals


def F_matrix_derivative(spec, geom, node):
    """Derivative of f with respect to the symmetrized shape form at a node.

    Returns the symmetric matrix Q diag(f_i) Q^T where Q diagonalizes the
    symmetrized form g^{-1/2} a g^{-1/2}; nearly equal eigenvalues are
    merged per the limit rule before the frame is applied.
    """
    lam = geom.lam[node]
    Q = geom.eigvec[node]
    return _matrix_derivative_from_spectrum(spec, lam, Q)


def matrix_derivative(spec, sym_matrix):
    """Same as F_matrix_derivative but for a raw symmetric matrix."""
    m = np.asarray(sym_matrix, dtype=float)
    w, Q = np.linalg.eigh(m)
    lam = w[::-1]
    Q = Q[:, ::-1]
    return _matrix_derivative_from_spectrum(spec, lam, Q)


def _matrix_derivative_from_spectrum(spec, lam, Q):
    fi = f_grad(spec, lam)
    fi = _cluster_average(lam, fi)
    return (Q * fi) @ Q.T


@dataclass
class StructuralReport:
    """Sampled extrema of the structural conditions on a cone slab."""

    spec: CurvatureSpec
    mu1: float
    mu2: float
    samples: int
    seed: int
    min_sum_fi: float
    min_sum_fi_lambda: float
    euler_violation: float
    concavity_violation: float
    min_fi: float
    schur_violation: float
    note: str = ("on the cone boundary the normalized f tends to 0, so the "
                 "limsup condition holds whenever inf psi > 0")


def sample_cone(spec, rng, count, fmin=1.0, fmax=1.0):
    """Random points of Gamma_r rescaled so f lands in [fmin, fmax]."""
    out = np.empty((count, spec.n))
    got = 0
    while got < count:
        cand = rng.uniform(-1.0, 2.0, size=(4 * (count - got) + 16, spec.n))
        keep = cand[in_cone(spec, cand)]
        take = min(count - got, keep.shape[0])
        out[got:got + take] = keep[:take]
        got += take
    targets = rng.uniform(fmin, fmax, size=count)
    vals = f_eval(spec, out)
    return out * (targets / vals)[:, None]


def check_structural(spec, mu1, mu2, samples=2000, seed=20240901):
    """Sample the slab {mu1 <= f <= mu2} and report structural extrema.

    Reported quantities: the sampled minima of sum f_i and sum f_i lam_i,
    the worst violation of the Euler saturation sum f_i lam_i = f, and the
    worst midpoint-concavity violation over paired samples.
    """
    if not 0 < mu1 <= mu2:
        raise ConfigError("need 0 < mu1 <= mu2")
    if samples < 1000:
        raise ConfigError("need at least 1000 samples")
    rng = np.random.default_rng(seed)
    lam = sample_cone(spec, rng, samples, mu1, mu2)
    fv = f_eval(spec, lam)
    fg = f_grad(spec, lam)
    sum_fi = fg.sum(axis=-1)
    sum_fi_lam = (fg * lam).sum(axis=-1)
    euler = np.abs(sum_fi_lam - fv).max()
    half = samples // 2
    a, b = lam[:half], lam[half:2 * half]
    conc = (f_eval(spec, a) + f_eval(spec, b)) / 2.0 - f_eval(spec, (a + b) / 2.0)
    concavity = max(0.0, float(conc.max()))
    lam_desc = -np.sort(-lam, axis=-1)
    fg_desc = f_grad(spec, lam_desc)
    schur = float(np.maximum(0.0, fg_desc[..., :-1] - fg_desc[..., 1:]).max()) \
        if spec.n > 1 else 0.0
    return StructuralReport(
        spec=spec, mu1=float(mu1), mu2=float(mu2), samples=samples, seed=seed,
        min_sum_fi=float(sum_fi.min()),
        min_sum_fi_lambda=float(sum_fi_lam.min()),
        euler_violation=float(euler),
        concavity_violation=concavity,
        min_fi=float(fg.min()),
        schur_violation=schur)
