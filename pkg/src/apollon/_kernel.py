"""Dijkstra on an implicit lattice graph (numba)."""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _less(ka, va, kb, vb):
    return ka < kb or (ka == kb and va < vb)


@njit(cache=True, nogil=True)
def _push(keys, vals, size, k, v):
    if size == keys.size:
        nk = np.empty(2 * keys.size, keys.dtype)
        nv = np.empty(2 * vals.size, vals.dtype)
        nk[:size] = keys[:size]
        nv[:size] = vals[:size]
        keys, vals = nk, nv
    i = size
    keys[i] = k
    vals[i] = v
    while i > 0:
        p = (i - 1) >> 1
        if _less(keys[i], vals[i], keys[p], vals[p]):
            keys[i], keys[p] = keys[p], keys[i]
            vals[i], vals[p] = vals[p], vals[i]
            i = p
        else:
            break
    return keys, vals, size + 1


@njit(cache=True, nogil=True)
def _pop(keys, vals, size):
    k, v = keys[0], vals[0]
    size -= 1
    keys[0] = keys[size]
    vals[0] = vals[size]
    i = 0
    while True:
        l = 2 * i + 1
        if l >= size:
            break
        c = l
        r = l + 1
        if r < size and _less(keys[r], vals[r], keys[l], vals[l]):
            c = r
        if _less(keys[c], vals[c], keys[i], vals[i]):
            keys[i], keys[c] = keys[c], keys[i]
            vals[i], vals[c] = vals[c], vals[i]
            i = c
        else:
            break
    return k, v, size


@njit(cache=True, nogil=True)
def lattice_dijkstra(shape, dist_b, valid, h, offsets, src_nodes, src_w, tgt_w, stop_early):
    """Shortest paths for the length element |dx| / d(x) on a lattice.

    Edges join valid nodes u, v = u + offset with d(u) + d(v) > |u - v| (so
    the segment stays inside the domain) and carry the trapezoid weight
    |u - v| * (1/d(u) + 1/d(v)) / 2. Sources start at ``src_w``. With
    ``stop_early`` the search ends once no target (finite ``tgt_w``) can be
    improved. Ties pop in node-index order.
    """
    ndim = shape.size
    n = dist_b.size
    strides = np.empty(ndim, np.int64)
    s = 1
    for a in range(ndim - 1, -1, -1):
        strides[a] = s
        s *= shape[a]
    K = offsets.shape[0]
    lens = np.empty(K)
    for k in range(K):
        acc = 0.0
        for a in range(ndim):
            acc += offsets[k, a] * offsets[k, a]
        lens[k] = np.sqrt(acc) * h

    dist = np.full(n, np.inf)
    pred = np.full(n, -1, np.int64)
    done = np.zeros(n, np.bool_)
    keys = np.empty(max(1024, 4 * src_nodes.size), np.float64)
    vals = np.empty(keys.size, np.int64)
    size = 0
    for i in range(src_nodes.size):
        u = src_nodes[i]
        if src_w[i] < dist[u]:
            dist[u] = src_w[i]
            keys, vals, size = _push(keys, vals, size, src_w[i], u)

    best = np.inf
    coord = np.empty(ndim, np.int64)
    while size > 0:
        k, u, size = _pop(keys, vals, size)
        if done[u] or k > dist[u]:
            continue
        if stop_early and k >= best:
            break
        done[u] = True
        if tgt_w[u] < np.inf and k + tgt_w[u] < best:
            best = k + tgt_w[u]
        rem = u
        for a in range(ndim):
            coord[a] = rem // strides[a]
            rem -= coord[a] * strides[a]
        du = dist_b[u]
        for j in range(K):
            v = 0
            ok = True
            for a in range(ndim):
                c = coord[a] + offsets[j, a]
                if c < 0 or c >= shape[a]:
                    ok = False
                    break
                v += c * strides[a]
            if not ok or not valid[v] or done[v]:
                continue
            dv = dist_b[v]
            L = lens[j]
            if du + dv <= L:
                continue
            nd = k + 0.5 * L * (1.0 / du + 1.0 / dv)
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = u
                keys, vals, size = _push(keys, vals, size, nd, v)
    return dist, pred
