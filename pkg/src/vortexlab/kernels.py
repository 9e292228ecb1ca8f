"""Biot-Savart kernel, blob regularization, and induced-velocity evaluation
by direct summation or a Barnes-Hut quadtree.

The free-space kernel is K(z) = z_perp / (2 pi |z|^2) with z_perp = (-z2, z1),
the rotated gradient of the logarithmic potential.  The blob variant divides
by (|z|^2 + delta_b^2) instead, which keeps exact antisymmetry K(-z) = -K(z)
and exact tangency K(z) . z = 0 while removing the singularity.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import _backend
from .errors import CoincidentPointError

if _backend.USE_NUMBA:
    from . import _accel_numba as _accel
else:
    from . import _accel_numpy as _accel

TWO_PI = 2.0 * np.pi


def _as_xy(points):
    xy = np.ascontiguousarray(np.atleast_2d(np.asarray(points, dtype=np.float64)))
    if xy.ndim != 2 or xy.shape[1] != 2:
        raise ValueError("points must have shape (n, 2)")
    if not np.isfinite(xy).all():
        raise ValueError("points contain non-finite values")
    return xy


def biot_savart(z):
    """Velocity kernel K(z); raises on z = 0 where it is singular."""
    z = np.asarray(z, dtype=np.float64)
    r2 = z[0] * z[0] + z[1] * z[1]
    if r2 == 0.0:
        raise CoincidentPointError("Biot-Savart kernel is singular at z = 0")
    w = 1.0 / (TWO_PI * r2)
    return np.array([-z[1] * w, z[0] * w])


def newtonian_potential(z):
    """Logarithmic potential G(z) = -log|z| / (2 pi)."""
    z = np.asarray(z, dtype=np.float64)
    r2 = z[0] * z[0] + z[1] * z[1]
    if r2 == 0.0:
        raise CoincidentPointError("potential is singular at z = 0")
    return -np.log(r2) / (2.0 * TWO_PI)


def blob_kernel(z, blob_radius):
    """Algebraically desingularized kernel z_perp / (2 pi (|z|^2 + d^2)).

    Reduces to the exact kernel for blob_radius = 0 (then z = 0 is an error);
    for blob_radius > 0 it is defined everywhere and vanishes at z = 0.
    """
    if blob_radius < 0.0:
        raise ValueError("blob_radius must be nonnegative")
    z = np.asarray(z, dtype=np.float64)
    r2 = z[0] * z[0] + z[1] * z[1] + blob_radius * blob_radius
    if r2 == 0.0:
        raise CoincidentPointError("unregularized kernel evaluated at z = 0")
    w = 1.0 / (TWO_PI * r2)
    return np.array([-z[1] * w, z[0] * w])


@dataclass(frozen=True)
class KernelParams:
    """Knobs for induced-velocity evaluation.

    blob_radius: regularization length delta_b >= 0.
    opening_angle: Barnes-Hut acceptance ratio theta in [0, 1); 0 opens every
        node, reproducing the direct sum.
    deterministic: fix the direct sum's source order to the canonical Morton
        order used by the tree traversal, which makes the fully opened tree
        (theta = 0) reproduce the direct sum bitwise; when off, the direct
        sum runs in caller index order.  Either way repeated evaluation of
        the same input gives identical bits.
    direct_crossover: below this source count, induced_velocity uses the
        direct sum instead of building a tree.
    leaf_size: tree leaf capacity.
    """

    blob_radius: float = 0.0
    opening_angle: float = 0.5
    deterministic: bool = True
    direct_crossover: int = 2000
    leaf_size: int = 16

    def __post_init__(self):
        if self.blob_radius < 0.0:
            raise ValueError("blob_radius must be nonnegative")
        if not 0.0 <= self.opening_angle < 1.0:
            raise ValueError("opening_angle must lie in [0, 1)")
        if self.leaf_size < 1:
            raise ValueError("leaf_size must be positive")

    def with_blob(self, blob_radius):
        return replace(self, blob_radius=float(blob_radius))


def _morton_order(x, y):
    """Canonical Morton permutation plus sorted codes and the root square.

    Shared by the tree build and the deterministic direct sum so both paths
    agree on the source order bitwise.
    """
    n = x.shape[0]
    xmin, xmax = float(x.min()), float(x.max())
    ymin, ymax = float(y.min()), float(y.max())
    side = max(xmax - xmin, ymax - ymin)
    if side == 0.0:
        side = 1.0
    side *= 1.0 + 1e-12
    inv = (1 << _accel.MAX_DEPTH) / side

    codes = np.empty(n, dtype=np.uint64)
    _accel.morton_codes(x, y, xmin, ymin, inv, codes)
    perm = np.ascontiguousarray(np.argsort(codes, kind="stable")
                                .astype(np.int64))
    root = (xmin + side / 2.0, ymin + side / 2.0, side / 2.0)
    return perm, np.ascontiguousarray(codes[perm]), root


class QuadTree:
    """Immutable quadtree over weighted particles (flat-array storage).

    Nodes carry their bounding square, total circulation, and the
    circulation-weighted centroid (the geometric center when the total
    vanishes).  Particles live in Morton order; each appears in exactly one
    leaf range.
    """

    __slots__ = ("n_nodes", "cx", "cy", "half", "gsum", "wx", "wy", "child",
                 "start", "count", "depth", "xs", "ys", "gs", "orig")

    def __init__(self, positions, circulations, leaf_size=16):
        xy = _as_xy(positions)
        gam = np.ascontiguousarray(np.asarray(circulations, dtype=np.float64))
        if gam.shape != (xy.shape[0],):
            raise ValueError("circulations must match positions")
        n = xy.shape[0]
        if n == 0:
            raise ValueError("cannot build a tree over zero particles")

        x = xy[:, 0]
        y = xy[:, 1]
        perm, codes, (root_cx, root_cy, root_half) = _morton_order(x, y)
        self.orig = perm
        self.xs = np.ascontiguousarray(x[perm])
        self.ys = np.ascontiguousarray(y[perm])
        self.gs = np.ascontiguousarray(gam[perm])

        cap = 4 * n + 64
        for _ in range(4):
            cx = np.empty(cap)
            cy = np.empty(cap)
            half = np.empty(cap)
            gsum = np.empty(cap)
            wx = np.empty(cap)
            wy = np.empty(cap)
            child = np.empty((cap, 4), dtype=np.int64)
            start = np.empty(cap, dtype=np.int64)
            count = np.empty(cap, dtype=np.int64)
            depth = np.empty(cap, dtype=np.int64)
            n_nodes = _accel.build_tree(
                codes, self.xs, self.ys, self.gs,
                root_cx, root_cy, root_half,
                leaf_size, cx, cy, half, gsum, wx, wy, child, start, count,
                depth)
            if n_nodes > 0:
                break
            cap *= 4
        else:
            raise RuntimeError("quadtree capacity exhausted")

        self.n_nodes = n_nodes
        self.cx = cx[:n_nodes]
        self.cy = cy[:n_nodes]
        self.half = half[:n_nodes]
        self.gsum = gsum[:n_nodes]
        self.wx = wx[:n_nodes]
        self.wy = wy[:n_nodes]
        self.child = np.ascontiguousarray(child[:n_nodes])
        self.start = start[:n_nodes]
        self.count = count[:n_nodes]
        self.depth = depth[:n_nodes]

    @property
    def n_particles(self):
        return self.xs.shape[0]

    def is_leaf(self, node):
        return bool((self.child[node] < 0).all())


def _self_indices(n_targets, self_interaction):
    if self_interaction:
        return np.arange(n_targets, dtype=np.int64)
    return np.full(n_targets, -1, dtype=np.int64)


def direct_velocity(positions, circulations, targets, params=None,
                    self_interaction=False):
    """Sum blob-kernel contributions of every source at every target.

    With ``self_interaction`` the targets are the sources themselves and the
    k = target term is omitted.  A coincident unskipped pair with
    blob_radius = 0 raises CoincidentPointError.  In deterministic mode the
    per-target sum runs in canonical Morton source order (the tree's
    traversal order); otherwise in index order.
    """
    params = params or KernelParams()
    src = _as_xy(positions)
    gam = np.ascontiguousarray(np.asarray(circulations, dtype=np.float64))
    if gam.shape != (src.shape[0],):
        raise ValueError("circulations must match positions")
    tgt = src if self_interaction else _as_xy(targets)
    d2 = params.blob_radius * params.blob_radius

    x = np.ascontiguousarray(src[:, 0])
    y = np.ascontiguousarray(src[:, 1])
    if params.deterministic:
        orig, _, _ = _morton_order(x, y)
        x = np.ascontiguousarray(x[orig])
        y = np.ascontiguousarray(y[orig])
        gam_o = np.ascontiguousarray(gam[orig])
    else:
        orig = np.arange(src.shape[0], dtype=np.int64)
        gam_o = gam

    out = np.empty((tgt.shape[0], 2))
    err = np.zeros(1, dtype=np.int64)
    _accel.direct_velocity(
        x, y, gam_o, orig,
        np.ascontiguousarray(tgt[:, 0]), np.ascontiguousarray(tgt[:, 1]),
        d2, self_interaction, out, err)
    if err[0]:
        raise CoincidentPointError(
            "coincident source/target with blob_radius = 0")
    return out


def tree_velocity(positions, circulations, targets, params=None,
                  self_interaction=False, tree=None):
    """Barnes-Hut evaluation; approximates a node by its circulation monopole
    when node_size / distance < opening_angle, so theta -> 0 recovers the
    direct sum (bitwise, in deterministic mode)."""
    params = params or KernelParams()
    src = _as_xy(positions)
    gam = np.ascontiguousarray(np.asarray(circulations, dtype=np.float64))
    if gam.shape != (src.shape[0],):
        raise ValueError("circulations must match positions")
    tgt = src if self_interaction else _as_xy(targets)
    if tree is None:
        tree = QuadTree(src, gam, leaf_size=params.leaf_size)
    d2 = params.blob_radius * params.blob_radius

    m = tgt.shape[0]
    out = np.empty((m, 2))
    err = np.zeros(1, dtype=np.int64)
    _accel.tree_velocity(
        tree.cx, tree.cy, tree.half, tree.gsum, tree.wx, tree.wy,
        tree.child, tree.start, tree.count,
        tree.xs, tree.ys, tree.gs, tree.orig,
        np.ascontiguousarray(tgt[:, 0]), np.ascontiguousarray(tgt[:, 1]),
        params.opening_angle, d2, _self_indices(m, self_interaction),
        4 * _accel.MAX_DEPTH + 64, out, err)
    if err[0]:
        raise CoincidentPointError(
            "coincident source/target with blob_radius = 0")
    return out


def induced_velocity(positions, circulations, targets=None, params=None,
                     self_interaction=False):
    """Direct sum below the crossover size, treecode above it."""
    params = params or KernelParams()
    src = _as_xy(positions)
    if self_interaction:
        targets = src
    if src.shape[0] <= params.direct_crossover:
        return direct_velocity(src, circulations, targets, params,
                               self_interaction)
    return tree_velocity(src, circulations, targets, params,
                         self_interaction)


def split_velocity(cloud, component, x, params=None):
    """Velocity at x split into the part induced by one component (u_i) and
    the far field from everything else (F_i); u_i + F_i recombines to the
    total up to summation rounding.

    A source particle sitting exactly at x is skipped (the self-interaction
    convention); with a positive blob radius its contribution is zero anyway.
    """
    params = params or KernelParams()
    tags = cloud.tag
    if not (tags == component).any():
        raise ValueError(f"component {component} not present")
    tgt = _as_xy(x)

    def _partial(mask):
        if tgt.shape[0] == 1:
            coincident = (cloud.xy[:, 0] == tgt[0, 0]) & \
                         (cloud.xy[:, 1] == tgt[0, 1])
            mask = mask & ~coincident
        if not mask.any():
            return np.zeros((tgt.shape[0], 2))
        return direct_velocity(cloud.xy[mask], cloud.gamma[mask], tgt,
                               params)

    u_near = _partial(tags == component)
    u_far = _partial(tags != component)
    if tgt.shape[0] == 1:
        return u_near[0], u_far[0]
    return u_near, u_far


def min_pairwise_distance(positions):
    xy = _as_xy(positions)
    if xy.shape[0] < 2:
        return np.inf
    return float(np.sqrt(_accel.min_pairwise_distance2(
        np.ascontiguousarray(xy[:, 0]), np.ascontiguousarray(xy[:, 1]))))


def min_cross_distance(positions_a, positions_b):
    a = _as_xy(positions_a)
    b = _as_xy(positions_b)
    return float(np.sqrt(_accel.min_cross_distance2(
        np.ascontiguousarray(a[:, 0]), np.ascontiguousarray(a[:, 1]),
        np.ascontiguousarray(b[:, 0]), np.ascontiguousarray(b[:, 1]))))
