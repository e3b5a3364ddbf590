"""Flat torus base (R/LZ)^n, n in {1, 2}, with periodic centered
finite-difference stencils of order 2 or 4.

Node ordering is fixed once and for all: axis 0 varies fastest (Fortran
ravel), so the Jacobian sparsity pattern and all serialized dumps are
deterministic.  On the flat base, frame components of z_i and z_ij
coincide with coordinate partial derivatives.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError, ShapeError

# centered stencil weights, offset -> coefficient (unscaled by dx powers)
_W1 = {
    2: {1: 0.5, -1: -0.5},
    4: {2: -1.0 / 12.0, 1: 8.0 / 12.0, -1: -8.0 / 12.0, -2: 1.0 / 12.0},
}
_W2 = {
    2: {1: 1.0, 0: -2.0, -1: 1.0},
    4: {2: -1.0 / 12.0, 1: 16.0 / 12.0, 0: -30.0 / 12.0,
        -1: 16.0 / 12.0, -2: 1.0 / 12.0},
}


class TorusGrid:
    """Uniform periodic grid on the flat torus (R/LZ)^n."""

    def __init__(self, n, N, L=2.0 * np.pi, order=2):
        if n not in (1, 2):
            raise ConfigError(f"dimension n must be 1 or 2, got {n}")
        if N < 16:
            raise ConfigError(f"need at least 16 nodes per axis, got {N}")
        if L <= 0:
            raise ConfigError("period L must be positive")
        if order not in (2, 4):
            raise ConfigError(f"stencil order must be 2 or 4, got {order}")
        self.n = int(n)
        self.N = int(N)
        self.L = float(L)
        self.order = int(order)
        self.dx = self.L / self.N
        self.shape = (self.N,) * self.n
        self.size = self.N ** self.n
        self._ops = {}
        self._coloring = None

    def __repr__(self):
        return (f"TorusGrid(n={self.n}, N={self.N}, L={self.L:.6g}, "
                f"order={self.order})")

    def axis_coords(self):
        return np.arange(self.N) * self.dx

    def coords(self):
        """Node coordinates, shape (n, N) or (n, N, N) (indexing 'ij')."""
        u = self.axis_coords()
        if self.n == 1:
            return u[None, :]
        X, Y = np.meshgrid(u, u, indexing="ij")
        return np.stack([X, Y])

    # -- dense (roll-based) derivative application --------------------------

    def _apply(self, weights, values, axis, scale):
        out = np.zeros_like(values)
        for off, w in weights.items():
            if off == 0:
                out += w * values
            else:
                out += w * np.roll(values, -off, axis=axis)
        return out * scale

    def d1(self, values, axis=0):
        """Periodic centered first derivative along an axis."""
        return self._apply(_W1[self.order], values, axis, 1.0 / self.dx)

    def d2(self, values, axis=0):
        """Periodic centered second derivative along an axis."""
        return self._apply(_W2[self.order], values, axis, 1.0 / self.dx ** 2)

    def gradient(self, values):
        return np.stack([self.d1(values, d) for d in range(self.n)])

    def hessian(self, values):
        """Per-node symmetric Hessian, shape (n, n) + grid shape.

        The cross term is computed once (d1 along axis 0 then axis 1), so
        the result is exactly symmetric.
        """
        H = np.empty((self.n, self.n) + self.shape)
        for d in range(self.n):
            H[d, d] = self.d2(values, d)
        if self.n == 2:
            cross = self.d1(self.d1(values, 0), 1)
            H[0, 1] = cross
            H[1, 0] = cross
        return H

    # -- sparse operators (same weights as the roll path) --------------------

    def _circulant(self, weights, scale):
        N = self.N
        rows, cols, data = [], [], []
        idx = np.arange(N)
        for off, w in weights.items():
            rows.append(idx)
            cols.append((idx + off) % N)
            data.append(np.full(N, w * scale))
        return sp.csr_matrix(
            (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
            shape=(N, N))

    def _kron(self, mat, axis):
        # flat index = i0 + N*i1 (axis 0 fastest): axis-0 ops are the inner
        # kron factor, axis-1 ops the outer one
        if self.n == 1:
            return mat
        eye = sp.identity(self.N, format="csr")
        return sp.kron(eye, mat, "csr") if axis == 0 else sp.kron(mat, eye, "csr")

    def d1_matrix(self, axis=0):
        key = ("d1", axis)
        if key not in self._ops:
            c = self._circulant(_W1[self.order], 1.0 / self.dx)
            self._ops[key] = self._kron(c, axis)
        return self._ops[key]

    def d2_matrix(self, axis=0):
        key = ("d2", axis)
        if key not in self._ops:
            c = self._circulant(_W2[self.order], 1.0 / self.dx ** 2)
            self._ops[key] = self._kron(c, axis)
        return self._ops[key]

    def d11_matrix(self):
        """Mixed second derivative (n = 2 only)."""
        if self.n != 2:
            raise ConfigError("mixed derivative needs n = 2")
        key = ("d11",)
        if key not in self._ops:
            c = self._circulant(_W1[self.order], 1.0 / self.dx)
            self._ops[key] = sp.kron(c, c, "csr")
        return self._ops[key]

    # -- flattening, footprint, coloring -------------------------------------

    def flatten(self, values):
        return np.asarray(values).ravel(order="F")

    def unflatten(self, flat):
        return np.asarray(flat).reshape(self.shape, order="F")

    def stencil_footprint(self):
        """Offsets (tuples) of nodes the residual at a node depends on."""
        d1_offs = sorted(_W1[self.order])
        d2_offs = sorted(_W2[self.order])
        offs = set()
        if self.n == 1:
            offs.update((o,) for o in d1_offs + d2_offs + [0])
        else:
            offs.add((0, 0))
            for o in d1_offs + d2_offs:
                offs.add((o, 0))
                offs.add((0, o))
            for a in d1_offs:
                for b in d1_offs:
                    offs.add((a, b))
        return sorted(offs)

    def coloring(self):
        """Greedy column coloring for finite-difference Jacobians.

        Two columns may share a color only if no residual row depends on
        both, i.e. their offset difference (mod N per axis) is outside the
        footprint difference set.  Returns (colors flat array, count).
        """
        if self._coloring is not None:
            return self._coloring
        foot = self.stencil_footprint()
        conflicts = set()
        for a in foot:
            for b in foot:
                d = tuple((ai - bi) % self.N for ai, bi in zip(a, b))
                conflicts.add(d)
        conflicts.discard((0,) * self.n)
        colors = -np.ones(self.size, dtype=int)
        # enumerate nodes in flat (F) order: axis 0 fastest
        if self.n == 1:
            nodes = [(i,) for i in range(self.N)]
        else:
            nodes = [(i0, i1) for i1 in range(self.N) for i0 in range(self.N)]
        for flat, node in enumerate(nodes):
            used = set()
            for d in conflicts:
                nb = tuple((ni + di) % self.N for ni, di in zip(node, d))
                nb_flat = nb[0] if self.n == 1 else nb[0] + self.N * nb[1]
                c = colors[nb_flat]
                if c >= 0:
                    used.add(c)
            c = 0
            while c in used:
                c += 1
            colors[flat] = c
        self._coloring = (colors, int(colors.max()) + 1)
        return self._coloring


def make_grid(n, N, L=2.0 * np.pi, order=2):
    """Construct a TorusGrid, validating all preconditions."""
    return TorusGrid(n, N, L, order)


@dataclass
class NodeField:
    """One real value per grid node (the discrete height field z)."""

    values: np.ndarray
    grid: TorusGrid = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ShapeError(
                f"field shape {self.values.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ShapeError("field contains non-finite values")

    def copy(self):
        return NodeField(self.values.copy(), self.grid)

    @classmethod
    def constant(cls, grid, value):
        return cls(np.full(grid.shape, float(value)), grid)


def derivatives(fld: NodeField):
    """Periodic gradient and exactly-symmetric Hessian of a node field."""
    return fld.grid.gradient(fld.values), fld.grid.hessian(fld.values)


def reduce(fld: NodeField, mode):
    """Reduce a field: max, min, linf, or volume-weighted l2."""
    v = fld.values
    if mode == "max":
        return float(v.max())
    if mode == "min":
        return float(v.min())
    if mode == "linf":
        return float(np.abs(v).max())
    if mode == "l2":
        return float(np.sqrt(np.sum(v * v) * fld.grid.dx ** fld.grid.n))
    raise ConfigError(f"unknown reduction mode {mode!r}")


def random_smooth(grid, rng, amplitude=1.0, max_freq=2):
    """Random trigonometric field, normalized to sup-norm = amplitude."""
    X = grid.coords() * (2.0 * np.pi / grid.L)
    out = np.zeros(grid.shape)
    for k in itertools.product(range(max_freq + 1), repeat=grid.n):
        if all(ki == 0 for ki in k):
            continue
        phase = rng.uniform(0.0, 2.0 * np.pi)
        coef = rng.normal()
        arg = sum(ki * X[d] for d, ki in enumerate(k)) + phase
        out += coef * np.cos(arg)
    peak = np.abs(out).max()
    if peak == 0.0:
        return out
    return out * (amplitude / peak)


def save_field(fld: NodeField, path):
    """Dump as flat little-endian float64 in node order (axis 0 fastest)."""
    data = fld.grid.flatten(fld.values).astype("<f8").tobytes()
    with open(path, "wb") as f:
        f.write(data)


def load_field(path, grid: TorusGrid):
    with open(path, "rb") as f:
        flat = np.frombuffer(f.read(), dtype="<f8")
    if flat.size != grid.size:
        raise ShapeError(f"file holds {flat.size} values, grid has {grid.size}")
    return NodeField(grid.unflatten(flat.astype(float)), grid)
