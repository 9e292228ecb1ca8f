"""Independent oracles used across the test suite.

These deliberately avoid the production code paths: velocity sums are plain
double loops, optimal transport is exhaustive DP over unit-mass expansions,
derivatives come from central differences.
"""

import numpy as np

TWO_PI = 2.0 * np.pi


def double_loop_velocity(src_xy, gam, tgt_xy, blob_radius, self_skip=False):
    """Scalar reference summation in source index order."""
    d2 = blob_radius * blob_radius
    out = np.zeros((len(tgt_xy), 2))
    for t, (tx, ty) in enumerate(tgt_xy):
        for k, ((sx, sy), g) in enumerate(zip(src_xy, gam)):
            if self_skip and k == t:
                continue
            dx, dy = tx - sx, ty - sy
            r2 = dx * dx + dy * dy + d2
            w = g / (TWO_PI * r2)
            out[t, 0] += -dy * w
            out[t, 1] += dx * w
    return out


def brute_force_w1_units(axy, a_units, bxy, b_units, denom):
    """Exact 1-Wasserstein cost for rational masses k/denom by exhaustive
    bitmask DP over the unit-mass expansion (an assignment problem)."""
    src = [tuple(axy[i]) for i in range(len(a_units))
           for _ in range(a_units[i])]
    tgt = [tuple(bxy[j]) for j in range(len(b_units))
           for _ in range(b_units[j])]
    n_units = len(src)
    assert len(tgt) == n_units
    dist = [[float(np.hypot(sx - tx, sy - ty)) for (tx, ty) in tgt]
            for (sx, sy) in src]
    full = (1 << n_units) - 1
    inf = float("inf")
    table = [inf] * (full + 1)
    table[0] = 0.0
    for mask in range(full):
        base = table[mask]
        if base == inf:
            continue
        u = bin(mask).count("1")
        row = dist[u]
        for v in range(n_units):
            bit = 1 << v
            if mask & bit:
                continue
            cand = base + row[v]
            nxt = mask | bit
            if cand < table[nxt]:
                table[nxt] = cand
    return table[full] / denom


def random_rational_measure_pair(rng, max_atoms=8, max_units=12):
    """Two atom lists with masses k/denominator and equal unit totals."""
    m = int(rng.integers(1, max_atoms + 1))
    n = int(rng.integers(1, max_atoms + 1))
    total = int(rng.integers(max(m, n), max_units + 1))

    def units(k):
        u = np.ones(k, dtype=int)
        for _ in range(total - k):
            u[int(rng.integers(0, k))] += 1
        return u

    denom = 8.0
    return (rng.uniform(-1, 1, (m, 2)), units(m),
            rng.uniform(-1, 1, (n, 2)), units(n), denom)


def finite_difference_gradient(f, x, h=1e-6):
    """Central differences of a scalar function of a flat array."""
    x = np.asarray(x, dtype=np.float64)
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e.flat[i] = h
        g.flat[i] = (f(x + e) - f(x - e)) / (2.0 * h)
    return g


def random_single_sign_cloud(rng, n_components=1, n_per=30, spread=1.0,
                             sep=4.0):
    """Random positive-circulation cloud fixtures for metric identities."""
    from vortexlab.cloud import ParticleCloud

    xy = []
    gam = []
    tag = []
    for i in range(n_components):
        center = np.array([sep * i, 0.0])
        xy.append(center + rng.normal(0.0, spread, (n_per, 2)))
        gam.append(rng.uniform(0.05, 1.0, n_per))
        tag.append(np.full(n_per, i))
    return ParticleCloud(np.vstack(xy), np.concatenate(gam),
                         np.concatenate(tag), pitch=None, blob_radius=0.0)
