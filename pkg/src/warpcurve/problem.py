"""Prescriptions, barrier levels, the decaying gauge, and the homotopy.

The target equation prescribes f(lam) = psi(z, u).  The homotopy

    Psi(s, t, u) = s psi(t, u) + (1 - s) phi(t) k(t)

connects it (s = 1) to a problem with the exact constant solution t0
(s = 0), where k(t) = f(kappa, ..., kappa) is the radial curvature level
and phi is a positive decreasing gauge with phi(t0) = 1.

The built-in prescription family is

    psi(t, u) = (c0 + eps * g(u)) / h(t),

with g a product of integer-frequency cosines.  For it h * psi is
t-independent, so the decay hypothesis d/dt (h psi) <= 0 holds with
equality; custom prescriptions are checked by finite differences with a
small slack.  The gauge is the explicit closed form

    phi(t) = k(t0) h(t0) exp(eps_phi (t0 - t)) / (k(t) h(t)),

which turns the homotopy drift condition at s = 0 into the identity
d/dt (phi k) + kappa (phi k) = -eps_phi * phi k < 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import ambient
from .errors import (BisectError, ConfigError, GaugeError, ValidationError)

T_LATTICE = 257            # t-points of the validation lattice
S_LATTICE = (0.0, 0.25, 0.5, 0.75, 1.0)
CUSTOM_C_SLACK = 1e-10     # FD slack for d/dt (h psi) <= 0 on custom forms
_BISECT_ITERS = 60
_MARGIN_FACTOR = 0.5       # how far beyond the barriers (a)/(b) are sampled


def _angular_field(grid, mode):
    """Product of per-axis cosines with integer frequencies."""
    mode = tuple(int(m) for m in np.atleast_1d(mode))
    if len(mode) != grid.n:
        raise ConfigError(f"angular mode needs {grid.n} frequencies, got {mode}")
    X = grid.coords() * (2.0 * np.pi / grid.L)
    out = np.ones(grid.shape)
    for d, m in enumerate(mode):
        if m != 0:
            out = out * np.cos(m * X[d])
    return out


@dataclass
class Prescription:
    """A validated prescription psi together with its barrier levels."""

    form: str
    profile: object = field(repr=False)
    spec: object = field(repr=False)
    grid: object = field(repr=False)
    t_minus: float = 0.0
    t_plus: float = 0.0
    c0: float = 0.0
    eps: float = 0.0
    mode: tuple = (1,)
    psi_fn: object = field(default=None, repr=False)
    psi_t_fn: object = field(default=None, repr=False)
    validated: bool = False
    angular: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.form not in ("radial-decay", "custom"):
            raise ConfigError(f"unknown prescription form {self.form!r}")
        if self.form == "radial-decay":
            self.angular = _angular_field(self.grid, self.mode)
        if self.form == "custom" and self.psi_fn is None:
            raise ConfigError("custom prescription needs psi_fn(t, coords)")

    # t and ang/coords must be mutually broadcastable arrays
    def _psi(self, t, ang, coords):
        if self.form == "radial-decay":
            h, _, _ = self.profile.eval(t)
            return (self.c0 + self.eps * ang) / h
        return self.psi_fn(t, coords)

    def _psi_t(self, t, ang, coords):
        if self.form == "radial-decay":
            h, h1, _ = self.profile.eval(t)
            return -(h1 / h) * (self.c0 + self.eps * ang) / h
        if self.psi_t_fn is not None:
            return self.psi_t_fn(t, coords)
        dt = 1e-6 * (1.0 + np.abs(t))
        return (self.psi_fn(t + dt, coords) - self.psi_fn(t - dt, coords)) \
            / (2.0 * dt)

    def _dt_h_psi(self, t, ang, coords):
        if self.form == "radial-decay":
            # h * psi = c0 + eps * g(u): exactly t-independent
            return np.zeros(np.broadcast(np.asarray(t), ang).shape)
        h, h1, _ = self.profile.eval(t)
        return h1 * self._psi(t, ang, coords) + h * self._psi_t(t, ang, coords)

    # -- per-node evaluation on a height field ------------------------------

    def psi_of(self, zvals):
        return self._psi(zvals, self.angular, self.grid.coords())

    def psi_t_of(self, zvals):
        return self._psi_t(zvals, self.angular, self.grid.coords())

    # -- (t-lattice) x (all nodes) evaluation --------------------------------

    def _flat_args(self):
        ang = None if self.angular is None else self.grid.flatten(self.angular)
        coords = np.stack([self.grid.flatten(c) for c in self.grid.coords()])
        return ang, coords

    def psi_lattice(self, tarr):
        ang, coords = self._flat_args()
        t = np.asarray(tarr)[:, None]
        a = None if ang is None else ang[None, :]
        return self._psi(t, a, coords[:, None, :])

    def dt_h_psi_lattice(self, tarr):
        ang, coords = self._flat_args()
        t = np.asarray(tarr)[:, None]
        a = ang[None, :] if ang is not None else np.zeros((1, self.grid.size))
        return self._dt_h_psi(t, a, coords[:, None, :])

    def k_of(self, t):
        return ambient.k_radial(self.profile, self.spec, t)


def _worst(margins, tarr):
    """Index of the worst lattice point; returns (t, node, value)."""
    flat = int(np.argmin(margins))
    it, node = np.unravel_index(flat, margins.shape)
    return float(tarr[it]), int(node), float(margins[it, node])


def build_prescription(profile, spec, grid, form="radial-decay", c0=1.0,
                       eps=0.0, mode=1, t_minus=None, t_plus=None,
                       psi_fn=None, psi_t_fn=None, validate=True):
    """Construct a prescription and verify the existence hypotheses.

    Checks, in order: positivity of psi on the slab, (a) psi > k at and
    below t_minus, (b) psi < k at and above t_plus, (c) d/dt (h psi) <= 0
    on [t_minus, t_plus].  Raises ValidationError naming the first failed
    hypothesis with a witnessing (t, node).
    """
    if t_minus is None or t_plus is None:
        raise ConfigError("prescription needs barrier levels t_minus < t_plus")
    if not (profile.t_lo < t_minus < t_plus < profile.t_hi):
        raise ConfigError(
            f"need t_lo < t_minus < t_plus < t_hi, got "
            f"({profile.t_lo}, {t_minus}, {t_plus}, {profile.t_hi})")
    if form == "radial-decay" and c0 <= 0:
        raise ConfigError("radial-decay prescription needs c0 > 0")
    p = Prescription(form=form, profile=profile, spec=spec, grid=grid,
                     t_minus=float(t_minus), t_plus=float(t_plus),
                     c0=float(c0), eps=float(eps), mode=mode,
                     psi_fn=psi_fn, psi_t_fn=psi_t_fn)
    if validate:
        _validate_prescription(p)
        p.validated = True
    return p


def validation_lattices(p):
    """t-lattices used by the hypothesis checks: (below, slab, above)."""
    lo, hi = p.profile.t_lo, p.profile.t_hi
    inset = 1e-9 * (hi - lo)
    width = _MARGIN_FACTOR * (p.t_plus - p.t_minus)
    below = np.linspace(max(lo + inset, p.t_minus - width), p.t_minus, 65)
    above = np.linspace(p.t_plus, min(hi - inset, p.t_plus + width), 65)
    slab = np.linspace(p.t_minus, p.t_plus, T_LATTICE)
    return below, slab, above


def _validate_prescription(p):
    below, slab, above = validation_lattices(p)
    psi_slab = p.psi_lattice(slab)
    if np.min(psi_slab) <= 0:
        t, node, val = _worst(psi_slab, slab)
        raise ValidationError("positivity", t=t, node=node,
                              detail=f"psi = {val:.6g} <= 0")
    k_below = np.asarray(p.k_of(below))[:, None]
    marg_a = p.psi_lattice(below) - k_below
    if np.min(marg_a) <= 0:
        t, node, val = _worst(marg_a, below)
        raise ValidationError("a", t=t, node=node,
                              detail=f"psi - k = {val:.6g} <= 0 (need psi > k)")
    k_above = np.asarray(p.k_of(above))[:, None]
    marg_b = k_above - p.psi_lattice(above)
    if np.min(marg_b) <= 0:
        t, node, val = _worst(marg_b, above)
        raise ValidationError("b", t=t, node=node,
                              detail=f"k - psi = {val:.6g} <= 0 (need psi < k)")
    slack = 0.0 if p.form == "radial-decay" else CUSTOM_C_SLACK
    decay = p.dt_h_psi_lattice(slab)
    if np.max(decay) > slack:
        t, node, val = _worst(-decay, slab)
        raise ValidationError("c", t=t, node=node,
                              detail=f"d/dt(h psi) = {-val:.6g} > 0")


def barrier_crossings(p):
    """Per-node bisection of psi(t, u) = k(t) on [t_minus, t_plus].

    Returns the lowest and highest crossing heights: the tightest
    constant-slice barriers compatible with the maximum principle.
    """
    ang, coords = p._flat_args()
    M = p.grid.size

    def F(t):
        a = None if ang is None else ang
        return np.asarray(p._psi(t, a, coords)) - np.asarray(p.k_of(t))

    lo = np.full(M, p.t_minus)
    hi = np.full(M, p.t_plus)
    Flo = F(lo)
    Fhi = F(hi)
    if np.any(Flo <= 0) or np.any(Fhi >= 0):
        bad = int(np.argmin(Flo)) if np.any(Flo <= 0) else int(np.argmax(Fhi))
        raise BisectError(f"no sign change for the crossing at node {bad}")
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        pos = F(mid) > 0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)
    cross = 0.5 * (lo + hi)
    return float(cross.min()), float(cross.max())


# -- gauge -------------------------------------------------------------------

@dataclass
class Gauge:
    """Explicit decreasing gauge phi with phi(t0) = 1."""

    profile: object = field(repr=False)
    spec: object = field(repr=False)
    t0: float = 0.0
    eps_phi: float = 0.1
    k0h0: float = field(default=0.0, repr=False)

    def __post_init__(self):
        h0, _, _ = self.profile.eval(self.t0)
        k0 = ambient.k_radial(self.profile, self.spec, self.t0)
        self.k0h0 = k0 * h0

    def phi(self, t):
        h, _, _ = self.profile.eval(t)
        k = ambient.k_radial(self.profile, self.spec, t)
        return self.k0h0 * np.exp(self.eps_phi * (self.t0 - t)) / (k * h)

    def phi_prime(self, t):
        h, h1, h2 = self.profile.eval(t)
        kap = h1 / h
        kap_prime = h2 / h - kap * kap
        return self.phi(t) * (-self.eps_phi - kap - kap_prime / kap)

    def psi0(self, t):
        """The s = 0 prescription phi(t) k(t) = k0 h0 e^{eps(t0-t)} / h."""
        h, _, _ = self.profile.eval(t)
        return self.k0h0 * np.exp(self.eps_phi * (self.t0 - t)) / h

    def psi0_t(self, t):
        h, h1, _ = self.profile.eval(t)
        return -(self.eps_phi + h1 / h) * self.psi0(t)


def build_phi(profile, spec, t_minus, t_plus, t0=None, eps_phi=0.1):
    """Construct the gauge; GaugeError if it fails to decrease strictly."""
    if t0 is None:
        t0 = 0.5 * (t_minus + t_plus)
    if not (t_minus < t0 < t_plus):
        raise ConfigError(f"anchor t0 = {t0} must lie in ({t_minus}, {t_plus})")
    if eps_phi < 0:
        raise GaugeError("decay rate eps_phi must be nonnegative")
    # eps_phi = 0 is admitted so the verify table can exhibit the homotopy (v)
    # failure as a negative control; a solve does not depend on (v)
    g = Gauge(profile=profile, spec=spec, t0=float(t0), eps_phi=float(eps_phi))
    lo, hi = profile.t_lo, profile.t_hi
    inset = 1e-9 * (hi - lo)
    t = np.linspace(lo + inset, hi - inset, T_LATTICE)
    dphi = g.phi_prime(t)
    if np.max(dphi) >= 0:
        bad = float(t[int(np.argmax(dphi))])
        raise GaugeError(
            f"phi' = {float(np.max(dphi)):.6g} >= 0 near t = {bad:.6g}; "
            "raise eps_phi")
    return g


# -- homotopy ----------------------------------------------------------------

@dataclass
class ConditionRow:
    name: str
    margin: float
    witness: tuple
    passed: bool
    note: str = ""


@dataclass
class HomotopyProblem:
    """The full continuation problem: prescription, gauge, and anchor."""

    prescription: Prescription
    profile: object = field(repr=False)
    spec: object = field(repr=False)
    grid: object = field(repr=False)
    gauge: Gauge = None
    t0: float = 0.0
    eps_phi: float = 0.1

    @property
    def t_minus(self):
        return self.prescription.t_minus

    @property
    def t_plus(self):
        return self.prescription.t_plus

    def psi_of(self, s, zvals):
        """(Psi, d_t Psi) per node at homotopy parameter s."""
        p = self.prescription
        val = s * p.psi_of(zvals) + (1.0 - s) * self.gauge.psi0(zvals)
        dt = s * p.psi_t_of(zvals) + (1.0 - s) * self.gauge.psi0_t(zvals)
        return val, dt

    def psi_lattice(self, s, tarr):
        p = self.prescription
        val = s * p.psi_lattice(tarr) \
            + (1.0 - s) * np.asarray(self.gauge.psi0(tarr))[:, None]
        return val

    def drift_lattice(self, s, tarr):
        """d_t Psi + kappa Psi on (t-lattice) x nodes (homotopy condition (v)).

        Evaluated through the exact reduction s d_t(h psi)/h - (1-s)
        eps_phi phi k, so equalities in the decay hypothesis show up as
        literal zeros instead of rounding noise.
        """
        p = self.prescription
        h, _, _ = self.profile.eval(tarr)
        return s * (p.dt_h_psi_lattice(tarr) / h[:, None]) \
            + (1.0 - s) * (-self.eps_phi) \
            * np.asarray(self.gauge.psi0(tarr))[:, None]

    def drift_raw_lattice(self, s, tarr):
        """Same quantity assembled termwise from Psi and d_t Psi."""
        p = self.prescription
        h, h1, _ = self.profile.eval(tarr)
        kap = (h1 / h)[:, None]
        val = self.psi_lattice(s, tarr)
        dt = s * np.asarray(p._psi_t(np.asarray(tarr)[:, None],
                                     None if p.angular is None
                                     else p._flat_args()[0][None, :],
                                     p._flat_args()[1][:, None, :])) \
            + (1.0 - s) * np.asarray(self.gauge.psi0_t(tarr))[:, None]
        return dt + kap * val

    def homotopy_report(self):
        """Numeric margins of the homotopy conditions (ii)-(v) on the lattice.

        Conditions (ii)-(iv) are strict for every s in the lattice, and so
        is (v) for s < 1; the s = 1 slice of (v) reduces to the decay
        hypothesis (c), which itself admits equality, so that slice is
        checked with the (c) slack instead.
        """
        p = self.prescription
        _, slab, _ = validation_lattices(p)
        rows = []

        vals = np.stack([self.psi_lattice(s, slab) for s in S_LATTICE])
        m2 = float(vals.min())
        idx = np.unravel_index(int(np.argmin(vals)), vals.shape)
        rows.append(ConditionRow(
            "homotopy (ii): Psi > 0", m2,
            (S_LATTICE[idx[0]], float(slab[idx[1]]), int(idx[2])), m2 > 0))

        k_lo = float(np.asarray(p.k_of(p.t_minus)))
        k_hi = float(np.asarray(p.k_of(p.t_plus)))
        lo_vals = np.stack([self.psi_lattice(s, np.array([p.t_minus]))[0]
                            for s in S_LATTICE])
        m3 = float((lo_vals - k_lo).min())
        i3 = np.unravel_index(int(np.argmin(lo_vals - k_lo)), lo_vals.shape)
        rows.append(ConditionRow(
            "homotopy (iii): Psi(s, t_minus) > k", m3,
            (S_LATTICE[i3[0]], p.t_minus, int(i3[1])), m3 > 0))

        hi_vals = np.stack([self.psi_lattice(s, np.array([p.t_plus]))[0]
                            for s in S_LATTICE])
        m4 = float((k_hi - hi_vals).min())
        i4 = np.unravel_index(int(np.argmax(hi_vals)), hi_vals.shape)
        rows.append(ConditionRow(
            "homotopy (iv): Psi(s, t_plus) < k", m4,
            (S_LATTICE[i4[0]], p.t_plus, int(i4[1])), m4 > 0))

        strict_s = [s for s in S_LATTICE if s < 1.0]
        drifts = np.stack([self.drift_lattice(s, slab) for s in strict_s])
        m5 = float((-drifts).min())
        i5 = np.unravel_index(int(np.argmax(drifts)), drifts.shape)
        end = self.drift_lattice(1.0, slab)
        slack = 0.0 if p.form == "radial-decay" else CUSTOM_C_SLACK
        end_ok = float(end.max()) <= slack
        rows.append(ConditionRow(
            "homotopy (v): d_t Psi + kappa Psi < 0", m5,
            (strict_s[i5[0]], float(slab[i5[1]]), int(i5[2])),
            (m5 > 0) and end_ok,
            note="strict for s < 1; s = 1 slice checked non-strictly "
                 "(reduces to hypothesis (c))"))
        return rows


def psi_homotopy(hp, s, t, u=None):
    """Value and t-derivative of the homotopy at (s, t, u).

    With u = None, t may be a full height field (per-node evaluation);
    with a node index u, t is the scalar height there.
    """
    if not 0.0 <= s <= 1.0:
        raise ConfigError(f"homotopy parameter s = {s} outside [0, 1]")
    if u is None:
        return hp.psi_of(s, np.asarray(t, dtype=float))
    p = hp.prescription
    ang = None if p.angular is None else p.angular[u]
    coords = np.array([c[u] for c in hp.grid.coords()])
    val = s * p._psi(t, ang, coords) + (1.0 - s) * hp.gauge.psi0(t)
    dt = s * p._psi_t(t, ang, coords) + (1.0 - s) * hp.gauge.psi0_t(t)
    return float(val), float(dt)


def build_homotopy(prescription, t0=None, eps_phi=0.1):
    """Attach the gauge and anchor to a validated prescription."""
    p = prescription
    gauge = build_phi(p.profile, p.spec, p.t_minus, p.t_plus, t0=t0,
                      eps_phi=eps_phi)
    return HomotopyProblem(prescription=p, profile=p.profile, spec=p.spec,
                           grid=p.grid, gauge=gauge, t0=gauge.t0,
                           eps_phi=gauge.eps_phi)
