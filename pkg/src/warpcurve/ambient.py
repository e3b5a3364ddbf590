"""Warping profiles h(t) on an open interval and the ambient quantities
derived pointwise from them: the fiber principal curvature kappa = h'/h,
the radial curvature level k(t) = f(kappa,...,kappa), and the sectional
curvature coefficients of the warped metric dt^2 + h^2(t) dsigma^2.

Profiles are immutable after construction and safe for concurrent reads.
"""

from __future__ import annotations

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ConfigError, DomainError, ProfileError

KINDS = ("cosh", "exp", "power", "custom-table")

# scan resolution used to vet tabulated profiles at construction
_TABLE_SCAN = 1024


class WarpingProfile:
    """The warping function h, its first two derivatives, and its
    antiderivative, on an explicit open interval (t_lo, t_hi).

    Built-in kinds: ``cosh`` (h = cosh t on a subinterval of [0, inf)),
    ``exp`` (h = e^t, constant kappa = 1), ``power`` (h = t^p, p > 0,
    decreasing kappa = p/t).  ``custom-table`` interpolates samples with a
    not-a-knot cubic spline; its derivatives come from the spline, and
    kappa > 0 is vetted on a 1024-point scan unless the mean-convexity
    check is explicitly suppressed (degenerate test profiles only).
    """

    def __init__(self, kind, params=(), t_lo=None, t_hi=None,
                 require_mean_convex=True, _spline=None):
        if kind not in KINDS:
            raise ConfigError(f"unknown profile kind {kind!r}")
        if t_lo is None or t_hi is None or not (t_lo < t_hi):
            raise ConfigError("profile needs an explicit interval t_lo < t_hi")
        self.kind = kind
        self.params = tuple(float(p) for p in params)
        self.t_lo = float(t_lo)
        self.t_hi = float(t_hi)
        self.require_mean_convex = bool(require_mean_convex)
        self._spline = _spline
        if kind == "power":
            if not self.params or self.params[0] <= 0:
                raise ConfigError("power profile needs exponent p > 0")
            if self.t_lo < 0:
                raise ProfileError("power profile lives on (0, inf)")
        if kind == "custom-table":
            if _spline is None:
                raise ConfigError("custom-table profile requires samples; "
                                  "use WarpingProfile.from_table")
            self._antideriv = _spline.antiderivative()
            self._scan_table()

    # -- constructors ------------------------------------------------------

    @classmethod
    def cosh(cls, t_lo, t_hi):
        return cls("cosh", (), t_lo, t_hi)

    @classmethod
    def exp(cls, t_lo, t_hi):
        return cls("exp", (), t_lo, t_hi)

    @classmethod
    def power(cls, p, t_lo, t_hi):
        return cls("power", (p,), t_lo, t_hi)

    @classmethod
    def from_table(cls, ts, hs, t_lo=None, t_hi=None, require_mean_convex=True):
        ts = np.asarray(ts, dtype=float)
        hs = np.asarray(hs, dtype=float)
        if ts.ndim != 1 or ts.shape != hs.shape or ts.size < 4:
            raise ConfigError("table needs matching 1-d arrays, >= 4 samples")
        if np.any(np.diff(ts) <= 0):
            raise ConfigError("table abscissae must be strictly increasing")
        spline = CubicSpline(ts, hs, bc_type="not-a-knot")
        if t_lo is None:
            t_lo = ts[0]
        if t_hi is None:
            t_hi = ts[-1]
        if t_lo < ts[0] or t_hi > ts[-1]:
            raise ConfigError("requested interval exceeds the table range")
        return cls("custom-table", (), t_lo, t_hi,
                   require_mean_convex=require_mean_convex, _spline=spline)

    def _scan_table(self):
        # vet h > 0 (always) and kappa > 0 (unless suppressed) on the
        # interior of the queried interval
        t = np.linspace(self.t_lo, self.t_hi, _TABLE_SCAN + 2)[1:-1]
        h = self._spline(t)
        if np.any(h <= 0):
            bad = t[np.argmin(h)]
            raise ProfileError(f"tabulated h <= 0 near t={bad:.6g}")
        if self.require_mean_convex:
            kap = self._spline(t, 1) / h
            if np.any(kap <= 0):
                bad = t[np.argmin(kap)]
                raise ProfileError(
                    f"tabulated profile has kappa <= 0 near t={bad:.6g}")

    # -- pointwise evaluation ----------------------------------------------

    def _check_domain(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(~np.isfinite(t)) or np.any(t <= self.t_lo) or np.any(t >= self.t_hi):
            raise DomainError(
                f"t outside profile interval ({self.t_lo:.6g}, {self.t_hi:.6g})")
        return t

    def eval(self, t):
        """Return (h, h', h'') at t; t may be a scalar or an array."""
        scalar = np.isscalar(t) or np.ndim(t) == 0
        t = self._check_domain(t)
        if self.kind == "cosh":
            h, h1, h2 = np.cosh(t), np.sinh(t), np.cosh(t)
        elif self.kind == "exp":
            h = np.exp(t)
            h1 = h
            h2 = h
        elif self.kind == "power":
            p = self.params[0]
            h = t ** p
            h1 = p * t ** (p - 1.0)
            h2 = p * (p - 1.0) * t ** (p - 2.0)
        else:
            h = self._spline(t)
            h1 = self._spline(t, 1)
            h2 = self._spline(t, 2)
        if np.any(h <= 0):
            raise ProfileError("h(t) <= 0 inside the queried interval")
        if scalar:
            return float(h), float(h1), float(h2)
        return h, h1, h2

    def antiderivative(self, t):
        """An antiderivative H of h (closed form for built-in kinds)."""
        scalar = np.isscalar(t) or np.ndim(t) == 0
        t = self._check_domain(t)
        if self.kind == "cosh":
            H = np.sinh(t)
        elif self.kind == "exp":
            H = np.exp(t)
        elif self.kind == "power":
            p = self.params[0]
            H = t ** (p + 1.0) / (p + 1.0)
        else:
            H = self._antideriv(t)
        return float(H) if scalar else H


# -- module-level operations ------------------------------------------------

def eval_warp(profile, t):
    """h, h', h'' of the warping function at t."""
    return profile.eval(t)


def kappa(profile, t):
    """Principal curvature h'/h of the slice {t} x M (must be positive)."""
    h, h1, _ = profile.eval(t)
    kap = h1 / h
    if np.any(np.asarray(kap) <= 0):
        raise ProfileError(
            "kappa = h'/h <= 0: profile violates mean convexity of the leaves")
    return kap


def k_radial(profile, spec, t):
    """Curvature level of the slice: f(kappa, ..., kappa).

    With the normalized symmetric functions of warpcurve.curvature this
    equals kappa(t) for every order r.
    """
    from .curvature import f_eval
    kap = np.asarray(kappa(profile, t), dtype=float)
    lam = np.stack([kap] * spec.n, axis=-1)
    out = f_eval(spec, lam)
    if np.ndim(t) == 0 and np.isscalar(out) is False and np.ndim(out) == 0:
        return float(out)
    return out


def ambient_curvature(profile, t):
    """Sectional curvature coefficients of the warped metric at level t.

    Returns (c_radial, c_tangential) = (h''/h, -(h'/h)^2): the radial
    coefficient multiplies the dt wedge forms, the tangential one is the
    flat-base value (the base curvature forms vanish on the torus).
    """
    h, h1, h2 = profile.eval(t)
    return h2 / h, -((h1 / h) ** 2)
