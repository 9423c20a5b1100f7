"""Compiled inner loops (numba). Array code only, no Python objects.

Each kernel returns a status flag instead of raising; wrappers translate
flags into the package's exception types.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def gibbs_sweeps(
    u,
    order_by_right,
    order_by_left,
    pos_in_right,
    pos_in_left,
    pred_count,
    succ_start,
    uniforms,
    n_burn,
    out,
):
    """Run full coordinate sweeps, storing every post-burn-in state in out.

    u is updated in place. uniforms has one row per sweep, consumed in
    coordinate order, so the draws match a sequential per-coordinate stream.
    Returns 0, or -1 if an empty conditional interval is ever seen.
    """
    n_sweeps = uniforms.shape[0]
    n = u.shape[0]
    u_right = np.empty(n, dtype=np.float64)
    u_left = np.empty(n, dtype=np.float64)
    for k in range(n):
        u_right[k] = u[order_by_right[k]]
        u_left[k] = u[order_by_left[k]]
    kept = 0
    for s in range(n_sweeps):
        for i in range(n):
            a = 0.0
            for k in range(pred_count[i]):
                v = u_right[k]
                if v > a:
                    a = v
            b = 1.0
            for k in range(succ_start[i], n):
                v = u_left[k]
                if v < b:
                    b = v
            if a >= b:
                return -1
            x = a + (b - a) * uniforms[s, i]
            u[i] = x
            u_right[pos_in_right[i]] = x
            u_left[pos_in_left[i]] = x
        if s >= n_burn:
            for i in range(n):
                out[kept, i] = u[i]
            kept += 1
    return 0


@njit(cache=True)
def solve_chain_qp(lo, hi, left, right, max_iter):
    """Minimize the sum of squared successive differences inside a tube.

    Variables x_1..x_m sit between fixed anchors ``left`` and ``right`` and
    inside [lo_k, hi_k]. Primal active-set iteration: between pinned
    coordinates the unconstrained optimum is the straight line, so each
    round fills lines, steps to the first blocking wall, and finally
    releases the worst mis-signed multiplier. Status 0 on optimality,
    1 if the iteration cap was reached.
    """
    m = lo.shape[0]
    x = np.empty(m, dtype=np.float64)
    target = np.empty(m, dtype=np.float64)
    state = np.zeros(m, dtype=np.int8)  # 0 free, 1 upper, -1 lower, 2 fixed

    for k in range(m):
        t = left + (right - left) * (k + 1.0) / (m + 1.0)
        if hi[k] <= lo[k]:
            x[k] = lo[k]
            state[k] = 2
        elif t >= hi[k]:
            x[k] = hi[k]
            state[k] = 1
        elif t <= lo[k]:
            x[k] = lo[k]
            state[k] = -1
        else:
            x[k] = t

    for _ in range(max_iter):
        k = 0
        while k < m:
            if state[k] != 0:
                target[k] = x[k]
                k += 1
                continue
            end = k
            while end + 1 < m and state[end + 1] == 0:
                end += 1
            vl = left if k == 0 else x[k - 1]
            vr = right if end == m - 1 else x[end + 1]
            span = (end - k) + 2.0
            for j in range(k, end + 1):
                target[j] = vl + (vr - vl) * ((j - k + 1.0) / span)
            k = end + 1

        alpha = 1.0
        block = -1
        bside = 0
        for k in range(m):
            if state[k] != 0:
                continue
            d = target[k] - x[k]
            if d > 0.0 and target[k] > hi[k]:
                a = (hi[k] - x[k]) / d
                if a < alpha:
                    alpha = a
                    block = k
                    bside = 1
            elif d < 0.0 and target[k] < lo[k]:
                a = (lo[k] - x[k]) / d
                if a < alpha:
                    alpha = a
                    block = k
                    bside = -1

        if block >= 0:
            for k in range(m):
                if state[k] == 0:
                    x[k] += alpha * (target[k] - x[k])
            x[block] = hi[block] if bside == 1 else lo[block]
            state[block] = bside
            continue

        for k in range(m):
            if state[k] == 0:
                x[k] = target[k]

        worst = 1e-12
        drop = -1
        for k in range(m):
            if state[k] == 1 or state[k] == -1:
                xl = left if k == 0 else x[k - 1]
                xr = right if k == m - 1 else x[k + 1]
                g = 2.0 * (2.0 * x[k] - xl - xr)
                v = g if state[k] == 1 else -g
                if v > worst:
                    worst = v
                    drop = k
        if drop < 0:
            return x, 0
        state[drop] = 0

    return x, 1


@njit(cache=True)
def project_gradient_chain_qp(lo, hi, left, right, x0, tol, max_iter):
    """Projected gradient fallback for the chain QP, step 1/8 (Lipschitz 8).

    Runs until the KKT residual drops below tol. Status 0 on success, 1 if
    the cap was hit first.
    """
    m = lo.shape[0]
    x = x0.copy()
    g = np.empty(m, dtype=np.float64)
    for it in range(1, max_iter + 1):
        for k in range(m):
            xl = left if k == 0 else x[k - 1]
            xr = right if k == m - 1 else x[k + 1]
            g[k] = 2.0 * (2.0 * x[k] - xl - xr)
        res = 0.0
        for k in range(m):
            if x[k] <= lo[k] + 1e-14:
                v = -g[k]
                if v < 0.0:
                    v = 0.0
            elif x[k] >= hi[k] - 1e-14:
                v = g[k]
                if v < 0.0:
                    v = 0.0
            else:
                v = abs(g[k])
            if v > res:
                res = v
        if res <= tol:
            return x, it, 0
        for k in range(m):
            nx = x[k] - 0.125 * g[k]
            if nx < lo[k]:
                nx = lo[k]
            elif nx > hi[k]:
                nx = hi[k]
            x[k] = nx
    return x, max_iter, 1


@njit(cache=True)
def em_masses(first, last, weight, n_int, tol, max_iter):
    """Self-consistency EM for interval masses.

    Containment ranges are contiguous (interval starts and ends both
    increase), so group g covers maximal intersection intervals
    first[g]..last[g] and stands for weight[g] identical observations;
    prefix sums make one sweep O(groups + intervals). Stops when the
    max-norm mass change drops below tol. Status: 0 converged, 1 cap
    reached, 2 the log-likelihood decreased (numerical fault; checked
    every iteration).
    """
    groups = first.shape[0]
    n = 0.0
    for g in range(groups):
        n += weight[g]
    w = np.full(n_int, 1.0 / n_int)
    cum = np.empty(n_int + 1, dtype=np.float64)
    score = np.empty(n_int + 1, dtype=np.float64)
    prev_ll = -np.inf
    it = 0
    for it in range(1, max_iter + 1):
        cum[0] = 0.0
        for j in range(n_int):
            cum[j + 1] = cum[j] + w[j]
        for j in range(n_int + 1):
            score[j] = 0.0
        ll = 0.0
        for g in range(groups):
            d = cum[last[g] + 1] - cum[first[g]]
            ll += weight[g] * np.log(d)
            inv = weight[g] / d
            score[first[g]] += inv
            score[last[g] + 1] -= inv
        if ll < prev_ll - 1e-9 * (1.0 + abs(prev_ll)):
            return w, it, 2
        prev_ll = ll
        delta = 0.0
        acc = 0.0
        for j in range(n_int):
            acc += score[j]
            nw = w[j] * acc / n
            diff = abs(nw - w[j])
            if diff > delta:
                delta = diff
            w[j] = nw
        if delta < tol:
            return w, it, 0
    return w, it, 1
