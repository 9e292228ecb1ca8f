"""Pure-numpy fallback for the hot kernels.

Matches the numba backend's contracts (including bitwise reproducibility and
the deterministic-mode guarantee that the tree at theta=0 equals the direct
sum bitwise *within this backend*).  Direct sums are vectorized per target;
the tree traversal walks nodes in Python and vectorizes the leaf arithmetic,
which is fine for the fallback's test/benchmark role.  Per-target sums use
np.sum over term sequences in the caller-fixed source order, and the tree
gathers its terms in traversal (Morton) order, so both paths reduce
identically ordered identical values.
"""

import numpy as np

TWO_PI = 2.0 * np.pi

MAX_DEPTH = 21


def _term_arrays(dx, dy, g, r2):
    w = g / (TWO_PI * r2)
    return -dy * w, dx * w


def direct_velocity(src_x, src_y, gam, orig, tgt_x, tgt_y, d2, self_mode,
                    out, err):
    for t in range(tgt_x.shape[0]):
        dx = tgt_x[t] - src_x
        dy = tgt_y[t] - src_y
        r2 = dx * dx + dy * dy + d2
        zero = r2 == 0.0
        keep = orig != t if self_mode else None
        if zero.any():
            offending = zero if keep is None else (zero & keep)
            if offending.any():
                err[0] = 1
            r2 = np.where(zero, 1.0, r2)
        vx, vy = _term_arrays(dx, dy, gam, r2)
        if keep is not None:
            vx = vx[keep]
            vy = vy[keep]
        out[t, 0] = np.sum(vx)
        out[t, 1] = np.sum(vy)


def morton_codes(x, y, xmin, ymin, inv, out):
    top = np.uint64((1 << MAX_DEPTH) - 1)
    ix = np.minimum(((x - xmin) * inv).astype(np.uint64), top)
    iy = np.minimum(((y - ymin) * inv).astype(np.uint64), top)
    out[:] = _spread(ix) | (_spread(iy) << np.uint64(1))


def _spread(v):
    v = (v | (v << np.uint64(16))) & np.uint64(0x0000FFFF0000FFFF)
    v = (v | (v << np.uint64(8))) & np.uint64(0x00FF00FF00FF00FF)
    v = (v | (v << np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    v = (v | (v << np.uint64(2))) & np.uint64(0x3333333333333333)
    v = (v | (v << np.uint64(1))) & np.uint64(0x5555555555555555)
    return v


def build_tree(codes, xs, ys, gs, root_cx, root_cy, root_half, leaf_size,
               cx, cy, half, gsum, wx, wy, child, start, count, depth):
    """Same node layout contract as the numba builder; returns the node
    count or -1 when the preallocated arrays are too small."""
    n = codes.shape[0]
    cap = cx.shape[0]
    n_nodes = 1
    cx[0], cy[0], half[0] = root_cx, root_cy, root_half
    start[0], count[0], depth[0] = 0, n, 0

    stack = [0]
    while stack:
        node = stack.pop()
        s = start[node]
        e = s + count[node]
        d = depth[node]

        gseg = gs[s:e]
        g = float(np.sum(gseg))
        gsum[node] = g
        if g != 0.0:
            wx[node] = float(np.sum(gseg * xs[s:e])) / g
            wy[node] = float(np.sum(gseg * ys[s:e])) / g
        else:
            wx[node] = cx[node]
            wy[node] = cy[node]

        child[node, :] = -1
        if count[node] <= leaf_size or d >= MAX_DEPTH:
            continue

        shift = 2 * (MAX_DEPTH - 1 - d)
        sh2 = np.uint64(shift + 2)
        prefix = (codes[s] >> sh2) << sh2
        cuts = [s]
        for q in (1, 2, 3):
            v = prefix | (np.uint64(q) << np.uint64(shift))
            cuts.append(s + int(np.searchsorted(codes[s:e], v, side="left")))
        cuts.append(e)

        h2 = half[node] * 0.5
        for q in range(4):
            cs, ce = cuts[q], cuts[q + 1]
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
            stack.append(idx)
    return n_nodes


def tree_velocity(cx, cy, half, gsum, wx, wy, child, start, count,
                  xs, ys, gs, orig, tgt_x, tgt_y, theta, d2, self_idx,
                  stack_cap, out, err):
    diag = 1.25 * np.sqrt(2.0)
    has_child = child[:, 0] >= 0
    for q in range(1, 4):
        has_child = has_child | (child[:, q] >= 0)

    for t in range(tgt_x.shape[0]):
        tx = tgt_x[t]
        ty = tgt_y[t]
        skip = self_idx[t]
        vx_chunks = []
        vy_chunks = []
        stack = [0]
        while stack:
            node = stack.pop()
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
                vx, vy = _term_arrays(dxw, dyw, gsum[node], r2)
                vx_chunks.append(np.array([vx]))
                vy_chunks.append(np.array([vy]))
                continue
            if not has_child[node]:
                s = start[node]
                e = s + count[node]
                dx = tx - xs[s:e]
                dy = ty - ys[s:e]
                r2 = dx * dx + dy * dy + d2
                keep = orig[s:e] != skip
                zero = r2 == 0.0
                if zero.any():
                    if (zero & keep).any():
                        err[0] = 1
                    r2 = np.where(zero, 1.0, r2)
                vx, vy = _term_arrays(dx, dy, gs[s:e], r2)
                vx_chunks.append(vx[keep])
                vy_chunks.append(vy[keep])
                continue
            for q in range(3, -1, -1):
                c = child[node, q]
                if c >= 0:
                    stack.append(c)

        if vx_chunks:
            out[t, 0] = np.sum(np.concatenate(vx_chunks))
            out[t, 1] = np.sum(np.concatenate(vy_chunks))
        else:
            out[t, 0] = 0.0
            out[t, 1] = 0.0


def min_pairwise_distance2(x, y):
    n = x.shape[0]
    best = np.inf
    for i in range(n - 1):
        dx = x[i] - x[i + 1:]
        dy = y[i] - y[i + 1:]
        d = float(np.min(dx * dx + dy * dy))
        if d < best:
            best = d
    return best


def min_cross_distance2(xa, ya, xb, yb):
    best = np.inf
    for i in range(xa.shape[0]):
        dx = xa[i] - xb
        dy = ya[i] - yb
        d = float(np.min(dx * dx + dy * dy))
        if d < best:
            best = d
    return best
