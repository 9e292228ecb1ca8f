"""numba-compiled inner loops: pairwise velocity sums, quadtree build and
traversal, and pairwise-distance scans.

Accumulation discipline: every per-target sum runs sequentially in a fixed
order.  The tree traversal visits children in ascending quadrant order, so
its interaction sequence follows the Morton-sorted particle order; the
direct kernel receives sources in whatever order the caller fixed (Morton
order in deterministic mode, which makes the fully opened tree reproduce the
direct sum bitwise).  Parallelism is only over targets, each of which owns
its output slot, so results are reproducible bit for bit.  fastmath stays
off everywhere; the antisymmetry and tangency guarantees of the kernel rely
on strict IEEE arithmetic.
"""

import numpy as np
from numba import njit, prange

TWO_PI = 2.0 * np.pi

MAX_DEPTH = 21  # Morton codes carry 21 bits per axis


@njit(inline="always")
def _term(dx, dy, g, r2):
    w = g / (TWO_PI * r2)
    return -dy * w, dx * w


@njit(cache=True, parallel=True)
def direct_velocity(src_x, src_y, gam, orig, tgt_x, tgt_y, d2, self_mode,
                    out, err):
    n = src_x.shape[0]
    m = tgt_x.shape[0]
    for t in prange(m):
        ux = 0.0
        uy = 0.0
        for k in range(n):
            if self_mode and orig[k] == t:
                continue
            dx = tgt_x[t] - src_x[k]
            dy = tgt_y[t] - src_y[k]
            r2 = dx * dx + dy * dy + d2
            if r2 == 0.0:
                err[0] = 1
                continue
            wx, wy = _term(dx, dy, gam[k], r2)
            ux = ux + wx
            uy = uy + wy
        out[t, 0] = ux
        out[t, 1] = uy


@njit(cache=True)
def morton_codes(x, y, xmin, ymin, inv, out):
    """21-bit-per-axis Morton codes; ties (identical cells) are fine."""
    n = x.shape[0]
    top = np.uint64((1 << MAX_DEPTH) - 1)
    for i in range(n):
        ix = np.uint64((x[i] - xmin) * inv)
        iy = np.uint64((y[i] - ymin) * inv)
        if ix > top:
            ix = top
        if iy > top:
            iy = top
        out[i] = _spread(ix) | (_spread(iy) << np.uint64(1))


@njit(inline="always")
def _spread(v):
    v = (v | (v << np.uint64(16))) & np.uint64(0x0000FFFF0000FFFF)
    v = (v | (v << np.uint64(8))) & np.uint64(0x00FF00FF00FF00FF)
    v = (v | (v << np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    v = (v | (v << np.uint64(2))) & np.uint64(0x3333333333333333)
    v = (v | (v << np.uint64(1))) & np.uint64(0x5555555555555555)
    return v


@njit(cache=True)
def build_tree(codes, xs, ys, gs, root_cx, root_cy, root_half, leaf_size,
               cx, cy, half, gsum, wx, wy, child, start, count, depth):
    """Build a quadtree over Morton-sorted particles.

    Every node covers a contiguous code range; children are located by binary
    search on the 2-bit quadrant field of the node's depth.  Returns the node
    count, or -1 if the preallocated arrays are too small.
    """
    n = codes.shape[0]
    cap = cx.shape[0]
    n_nodes = 1
    cx[0] = root_cx
    cy[0] = root_cy
    half[0] = root_half
    start[0] = 0
    count[0] = n
    depth[0] = 0

    stack = np.empty(cap, np.int64)
    stack[0] = 0
    top = 1
    while top > 0:
        top -= 1
        node = stack[top]
        s = start[node]
        e = s + count[node]
        d = depth[node]

        g = 0.0
        gx = 0.0
        gy = 0.0
        for p in range(s, e):
            g += gs[p]
            gx += gs[p] * xs[p]
            gy += gs[p] * ys[p]
        gsum[node] = g
        if g != 0.0:
            wx[node] = gx / g
            wy[node] = gy / g
        else:
            wx[node] = cx[node]
            wy[node] = cy[node]

        for q in range(4):
            child[node, q] = -1

        if count[node] <= leaf_size or d >= MAX_DEPTH:
            continue

        shift = 2 * (MAX_DEPTH - 1 - d)
        prefix = (codes[s] >> np.uint64(shift + 2)) << np.uint64(shift + 2)
        # quadrant boundaries inside [s, e)
        bounds = np.empty(5, np.int64)
        bounds[0] = s
        bounds[4] = e
        for q in range(1, 4):
            v = prefix | (np.uint64(q) << np.uint64(shift))
            lo = s
            hi = e
            while lo < hi:
                mid = (lo + hi) >> 1
                if codes[mid] < v:
                    lo = mid + 1
                else:
                    hi = mid
            bounds[q] = lo

        h2 = half[node] * 0.5
        for q in range(4):
            cs = bounds[q]
            ce = bounds[q + 1]
            if ce == cs:
                continue
            if n_nodes >= cap:
                return -1
            idx = n_nodes
            n_nodes += 1
            child[node, q] = idx
            cx[idx] = cx[node] + (h2 if (q & 1) else -h2)
            cy[idx] = cy[node] + (h2 if (q >> 1) else -h2)
            half[idx] = h2
            start[idx] = cs
            count[idx] = ce - cs
            depth[idx] = d + 1
            stack[top] = idx
            top += 1
    return n_nodes


@njit(cache=True, parallel=True)
def tree_velocity(cx, cy, half, gsum, wx, wy, child, start, count,
                  xs, ys, gs, orig, tgt_x, tgt_y, theta, d2, self_idx,
                  stack_cap, out, err):
    """Barnes-Hut traversal with monopole acceptance size/dist < theta.

    The node size is measured conservatively from the expansion center: box
    diagonal (with a 1.25 safety margin for the neglected quadrupole) plus
    the offset of the circulation-weighted centroid from the box center.  A
    node is approximated only when the target lies outside its box, the
    centroid is inside it, and size < theta * dist; otherwise it is opened.
    theta = 0 therefore opens everything, and because children are visited
    in ascending quadrant order the per-particle terms accumulate in Morton
    order, matching the deterministic direct sum bitwise.
    """
    m = tgt_x.shape[0]
    diag = 1.25 * np.sqrt(2.0)
    for t in prange(m):
        stack = np.empty(stack_cap, np.int64)
        tx = tgt_x[t]
        ty = tgt_y[t]
        skip = self_idx[t]

        ux = 0.0
        uy = 0.0
        stack[0] = 0
        top = 1
        while top > 0:
            top -= 1
            node = stack[top]
            dxw = tx - wx[node]
            dyw = ty - wy[node]
            dist2 = dxw * dxw + dyw * dyw
            ox = wx[node] - cx[node]
            oy = wy[node] - cy[node]
            size = diag * 2.0 * half[node] + np.sqrt(ox * ox + oy * oy)
            inside = (abs(tx - cx[node]) <= half[node]) and \
                     (abs(ty - cy[node]) <= half[node])
            centered = (abs(ox) <= half[node]) and (abs(oy) <= half[node])
            if (not inside) and centered and gsum[node] != 0.0 and \
                    size * size < theta * theta * dist2:
                r2 = dist2 + d2
                vx, vy = _term(dxw, dyw, gsum[node], r2)
                ux = ux + vx
                uy = uy + vy
                continue
            if child[node, 0] < 0 and child[node, 1] < 0 and \
                    child[node, 2] < 0 and child[node, 3] < 0:
                s = start[node]
                e = s + count[node]
                for p in range(s, e):
                    if orig[p] == skip:
                        continue
                    dx = tx - xs[p]
                    dy = ty - ys[p]
                    r2 = dx * dx + dy * dy + d2
                    if r2 == 0.0:
                        err[0] = 1
                        continue
                    vx, vy = _term(dx, dy, gs[p], r2)
                    ux = ux + vx
                    uy = uy + vy
                continue
            # push children in reverse so traversal visits quadrant 0 first
            for q in range(3, -1, -1):
                c = child[node, q]
                if c >= 0:
                    stack[top] = c
                    top += 1

        out[t, 0] = ux
        out[t, 1] = uy


@njit(cache=True)
def min_pairwise_distance2(x, y):
    n = x.shape[0]
    best = np.inf
    for i in range(n):
        for j in range(i + 1, n):
            dx = x[i] - x[j]
            dy = y[i] - y[j]
            d = dx * dx + dy * dy
            if d < best:
                best = d
    return best


@njit(cache=True)
def min_cross_distance2(xa, ya, xb, yb):
    best = np.inf
    for i in range(xa.shape[0]):
        for j in range(xb.shape[0]):
            dx = xa[i] - xb[j]
            dy = ya[i] - yb[j]
            d = dx * dx + dy * dy
            if d < best:
                best = d
    return best
