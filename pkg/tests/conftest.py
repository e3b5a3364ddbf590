import numpy as np
import pytest

import warpcurve as wc

SINH1 = 1.1752011936438014568823818506       # sinh(1), 30 digits
COSH1 = 1.5430806348152437784779056208
TANH1 = 0.7615941559557648881194582826


@pytest.fixture(scope="session")
def cosh_profile():
    return wc.WarpingProfile.cosh(0.2, 3.0)


@pytest.fixture(scope="session")
def exp_profile():
    return wc.WarpingProfile.exp(-2.0, 2.0)


def make_problem(n=1, N=256, r=1, eps=0.0, t_minus=0.5, t_plus=1.6,
                 t0=None, eps_phi=0.1, order=2, profile=None):
    """Canonical cosh problem with the crossing exactly at t = 1."""
    profile = profile or wc.WarpingProfile.cosh(0.2, 3.0)
    grid = wc.make_grid(n, N, order=order)
    spec = wc.CurvatureSpec(n=n, r=r)
    mode = 1 if n == 1 else (1, 1)
    p = wc.build_prescription(profile, spec, grid, c0=np.sinh(1.0), eps=eps,
                              mode=mode, t_minus=t_minus, t_plus=t_plus)
    return wc.build_homotopy(p, t0=t0, eps_phi=eps_phi)
