"""The condition-by-condition verification table.

Every structural claim the construction rests on is checked numerically
at desk scale: profile mean convexity, prescription hypotheses, gauge
properties, homotopy family conditions, curvature-function structure, geometry
identities, and oracle agreement of the analytic derivative paths.  Each
check yields one row (name, worst-case value, verdict).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import curvature, oracle
from .geometry import compute_geometry, special_frame_check, support_identity_check
from .grid import NodeField, make_grid, random_smooth
from .problem import CUSTOM_C_SLACK, validation_lattices
from .solver import assemble_jacobian


@dataclass
class CheckRow:
    name: str
    value: float
    requirement: str
    passed: bool

    def format(self, width=46):
        mark = "pass" if self.passed else "FAIL"
        return f"{self.name:<{width}s} {self.value: .17g}  [{self.requirement}]  {mark}"


def _row(name, value, requirement, passed):
    return CheckRow(name, float(value), requirement, bool(passed))


def profile_rows(profile):
    t = np.linspace(profile.t_lo, profile.t_hi, 1026)[1:-1]
    h, h1, _ = profile.eval(t)
    kap = h1 / h
    return [
        _row("profile: min h on domain scan", h.min(), "> 0", h.min() > 0),
        _row("profile: min kappa on domain scan", kap.min(), "> 0",
             kap.min() > 0),
    ]


def prescription_rows(p):
    below, slab, above = validation_lattices(p)
    psi_slab = p.psi_lattice(slab)
    rows = [_row("prescription: min psi on slab", psi_slab.min(), "> 0",
                 psi_slab.min() > 0)]
    marg_a = p.psi_lattice(below) - np.asarray(p.k_of(below))[:, None]
    rows.append(_row("hypothesis (a): min psi - k, t <= t_minus",
                     marg_a.min(), "> 0", marg_a.min() > 0))
    marg_b = np.asarray(p.k_of(above))[:, None] - p.psi_lattice(above)
    rows.append(_row("hypothesis (b): min k - psi, t >= t_plus",
                     marg_b.min(), "> 0", marg_b.min() > 0))
    slack = 0.0 if p.form == "radial-decay" else CUSTOM_C_SLACK
    decay = p.dt_h_psi_lattice(slab)
    rows.append(_row("hypothesis (c): max d/dt(h psi) on slab",
                     decay.max(), f"<= {slack:g}", decay.max() <= slack))
    return rows


def gauge_rows(hp):
    p = hp.prescription
    below, slab, above = validation_lattices(p)
    g = hp.gauge
    rows = []
    phi_slab = np.asarray(g.phi(slab))
    rows.append(_row("gauge (a): min phi", phi_slab.min(), "> 0",
                     phi_slab.min() > 0))
    phi_below = np.asarray(g.phi(below))
    rows.append(_row("gauge (b): min phi - 1, t <= t_minus",
                     phi_below.min() - 1.0, "> 0", phi_below.min() > 1.0))
    phi_above = np.asarray(g.phi(above))
    rows.append(_row("gauge (c): min 1 - phi, t >= t_plus",
                     1.0 - phi_above.max(), "> 0", phi_above.max() < 1.0))
    full = np.concatenate([below, slab, above])
    dphi = np.asarray(g.phi_prime(full))
    rows.append(_row("gauge (d): max phi'", dphi.max(), "< 0", dphi.max() < 0))
    rows.append(_row("gauge: |phi(t0) - 1|", abs(float(g.phi(g.t0)) - 1.0),
                     "<= 1e-14", abs(float(g.phi(g.t0)) - 1.0) <= 1e-14))
    return rows


def homotopy_rows(hp):
    rows = []
    for r in hp.homotopy_report():
        rows.append(_row(r.name, r.margin, "> 0 (strict lattice)", r.passed))
    return rows


def structural_rows(spec, mu1, mu2, seed):
    rep = curvature.check_structural(spec, mu1, mu2, samples=2000, seed=seed)
    return [
        _row("curvature: Euler |sum f_i lam_i - f|", rep.euler_violation,
             "<= 1e-12", rep.euler_violation <= 1e-12),
        _row("curvature: midpoint concavity violation",
             rep.concavity_violation, "<= 1e-12",
             rep.concavity_violation <= 1e-12),
        _row("curvature: min sum f_i on slab", rep.min_sum_fi, "> 0",
             rep.min_sum_fi > 0),
        _row("curvature: min sum f_i lam_i on slab", rep.min_sum_fi_lambda,
             "> 0", rep.min_sum_fi_lambda > 0),
        _row("curvature: min f_i on slab", rep.min_fi, "> 0", rep.min_fi > 0),
        _row("curvature: Schur ordering violation", rep.schur_violation,
             "<= 1e-12", rep.schur_violation <= 1e-12),
    ]


def curvature_property_rows(spec, seed):
    rng = np.random.default_rng(seed + 1)
    lam = curvature.sample_cone(spec, rng, 1000, 0.5, 2.0)
    c = rng.uniform(0.5, 2.0, size=1000)
    hom = np.abs(curvature.f_eval(spec, lam * c[:, None])
                 - c * curvature.f_eval(spec, lam)).max()
    rows = [_row("curvature: homogeneity |f(c lam) - c f|", hom, "<= 1e-12",
                 hom <= 1e-12)]
    if spec.n > 1:
        perm = np.abs(curvature.f_eval(spec, lam[..., ::-1])
                      - curvature.f_eval(spec, lam)).max()
        rows.append(_row("curvature: permutation symmetry", perm, "<= 1e-14",
                         perm <= 1e-14))
    worst = 0.0
    for i in range(200):
        rep = oracle.fd_gradcheck(spec, lam[i])
        worst = max(worst, rep.max_rel_err)
    rows.append(_row("oracle: f_grad vs FD, 200 cone points", worst,
                     "<= 1e-6", worst <= 1e-6))
    if spec.n == 2:
        worst = 0.0
        for i in range(100):
            m = _random_cone_matrix(spec, rng)
            F = curvature.matrix_derivative(spec, m)
            fd = _fd_matrix_derivative(spec, m)
            worst = max(worst, np.abs(F - fd).max() / np.abs(F).max())
        rows.append(_row("oracle: matrix derivative vs FD", worst, "<= 1e-6",
                         worst <= 1e-6))
    return rows


def _random_cone_matrix(spec, rng):
    lam = curvature.sample_cone(spec, rng, 1, 0.5, 2.0)[0]
    th = rng.uniform(0, 2 * np.pi)
    Q = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    return (Q * lam) @ Q.T


def _fd_matrix_derivative(spec, m, step=1e-6):
    n = m.shape[0]
    out = np.empty((n, n))
    for k in range(n):
        for l in range(k, n):
            E = np.zeros((n, n))
            E[k, l] = 1.0
            E[l, k] = 1.0
            fp = curvature.f_eval(spec, _eigvals_desc(m + step * E))
            fm = curvature.f_eval(spec, _eigvals_desc(m - step * E))
            d = (fp - fm) / (2.0 * step)
            out[k, l] = out[l, k] = d / (2.0 if k != l else 1.0)
    return out


def _eigvals_desc(m):
    return np.linalg.eigvalsh(m)[::-1]


def geometry_rows(hp, seed):
    grid, profile, spec = hp.grid, hp.profile, hp.spec
    rng = np.random.default_rng(seed + 2)
    rows = []
    zc = NodeField.constant(grid, hp.t0)
    geom_c = compute_geometry(zc, grid, profile)
    kap0 = float(geom_c.h1[(0,) * grid.n] / geom_c.h[(0,) * grid.n])
    umb = float(np.abs(geom_c.lam - kap0).max())
    rows.append(_row("geometry: umbilic slice |lam - kappa|", umb, "<= 1e-12",
                     umb <= 1e-12))
    amp = 0.04 * (hp.t_plus - hp.t_minus)
    z = hp.t0 + random_smooth(grid, rng, amp)
    geom = compute_geometry(z, grid, profile)
    det_err = np.abs(np.linalg.det(geom.g)
                     / (geom.h ** (2 * grid.n - 2) * geom.W ** 2) - 1.0).max()
    rows.append(_row("geometry: det g identity rel err", det_err, "<= 1e-10",
                     det_err <= 1e-10))
    orient = np.abs(geom.nu0 * geom.W + geom.h).max() / geom.h.max()
    rows.append(_row("geometry: orientation nu0 W = -h", orient, "<= 1e-14",
                     orient <= 1e-14))
    dev = 0.0
    count = 0
    gn = np.sqrt((geom.grad ** 2).sum(axis=-1))
    for _ in range(400):
        node = tuple(rng.integers(grid.N, size=grid.n))
        if gn[node] < 1e-8:
            continue
        dev = max(dev, special_frame_check(geom, node).deviation)
        count += 1
    rows.append(_row(f"geometry: special frame dev, {count} nodes", dev,
                     "<= 1e-10", dev <= 1e-10))
    if grid.n == 2:
        worst = 0.0
        for _ in range(50):
            node = tuple(rng.integers(grid.N, size=2))
            lam, _ = oracle.eig2_oracle(geom.atilde[node])
            worst = max(worst, float(np.abs(lam - geom.lam[node]).max()))
        rows.append(_row("oracle: eig2 vs eigh eigenvalues", worst,
                         "<= 1e-10", worst <= 1e-10))
    rows.extend(_support_order_rows(hp))
    return rows


def _support_order_rows(hp):
    grid, profile = hp.grid, hp.profile
    amp = 0.04 * (hp.t_plus - hp.t_minus)

    def errs(g):
        X = g.coords()
        w = 2.0 * np.pi / g.L
        z = hp.t0 + amp * np.sin(w * X[0]) * (np.cos(w * X[1]) if g.n == 2 else 1.0)
        return support_identity_check(compute_geometry(z, g, profile))

    e1 = errs(grid)
    g2 = make_grid(grid.n, 2 * grid.N, grid.L, grid.order)
    e2 = errs(g2)
    expect = 2.0 ** grid.order
    rows = []
    for label, a, b in (("eta", e1[0], e2[0]), ("tau", e1[1], e2[1])):
        ratio = a / b
        ok = abs(ratio - expect) <= 0.15 * expect
        rows.append(_row(f"geometry: support {label} error ratio N->2N",
                         ratio, f"{expect:g} +- 15%", ok))
    return rows


def jacobian_rows(hp, seed, states=3):
    grid = hp.grid
    rng = np.random.default_rng(seed + 3)
    amp = 0.04 * (hp.t_plus - hp.t_minus)
    worst = 0.0
    for _ in range(states):
        z = NodeField(hp.t0 + random_smooth(grid, rng, amp), grid)
        s = float(rng.uniform(0.0, 1.0))
        Ja = assemble_jacobian(z, s, hp, "analytic")
        Jf = assemble_jacobian(z, s, hp, "fd-colored")
        scale = float(np.abs(Ja.data).max())
        diff = float(np.abs((Ja - Jf).toarray()).max())
        worst = max(worst, diff / scale)
    return [_row(f"oracle: analytic vs colored-FD jacobian, {states} states",
                 worst, "<= 1e-6", worst <= 1e-6)]


def build_condition_table(hp, seed=12345):
    """All verification rows for a configured problem."""
    rows = []
    rows += profile_rows(hp.profile)
    rows += prescription_rows(hp.prescription)
    rows += gauge_rows(hp)
    rows += homotopy_rows(hp)
    k_lo = float(np.asarray(hp.prescription.k_of(hp.t_minus)))
    k_hi = float(np.asarray(hp.prescription.k_of(hp.t_plus)))
    mu1, mu2 = min(k_lo, k_hi), max(k_lo, k_hi)
    rows += structural_rows(hp.spec, mu1, mu2, seed)
    rows += curvature_property_rows(hp.spec, seed)
    rows += geometry_rows(hp, seed)
    rows += jacobian_rows(hp, seed)
    return rows
