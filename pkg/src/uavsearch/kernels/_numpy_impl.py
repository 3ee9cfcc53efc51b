"""Pure-numpy fallback for the population fitness kernel.

Kinematics and the collision term are vectorized across the population;
footprint accounting (which carries a sequential in-horizon dependency)
loops per candidate with vectorized per-step gathers.  Results match the
JIT kernel up to floating-point summation order.
"""

import numpy as np


def rollout_cells(pop, start_xg, start_yg, start_n, j, inc_x, inc_y, cells_x, cells_y, denied):
    """Vectorized kinematic rollout of a whole population.

    Returns (cells (P, m, 2) int64, slot_idx (P, m) int64, bad_step (P, m)
    bool, violations (P,) int32).  Cells on violating steps may lie outside
    the grid.
    """
    n_pop, m = pop.shape
    four_j = 4 * j
    span = 8 * j
    n = np.full(n_pop, start_n, dtype=np.int64)
    xg = np.full(n_pop, start_xg, dtype=np.int64)
    yg = np.full(n_pop, start_yg, dtype=np.int64)
    cells = np.empty((n_pop, m, 2), dtype=np.int64)
    slot_idx = np.empty((n_pop, m), dtype=np.int64)
    bad_step = np.zeros((n_pop, m), dtype=bool)
    for q in range(m):
        n = n + pop[:, q]
        n = np.where(n > four_j, n - span, n)
        n = np.where(n <= -four_j, n + span, n)
        idx = n + four_j - 1
        slot_idx[:, q] = idx
        xg = xg + inc_x[idx]
        yg = yg + inc_y[idx]
        oob = (xg < 1) | (xg > cells_x) | (yg < 1) | (yg > cells_y)
        blocked = np.zeros(n_pop, dtype=bool)
        ok = ~oob
        if np.any(ok):
            blocked[ok] = denied[xg[ok] - 1, yg[ok] - 1] != 0
        bad_step[:, q] = oob | blocked
        cells[:, q, 0] = xg
        cells[:, q, 1] = yg
    violations = bad_step.sum(axis=1).astype(np.int32)
    return cells, slot_idx, bad_step, violations


def evaluate_sequences(
    pop,
    start_xg,
    start_yg,
    start_n,
    j,
    inc_x,
    inc_y,
    offs_x,
    offs_y,
    offs_ptr,
    pw,
    chi,
    denied,
    peers,
    rep_k,
    rep_mu,
    rep_dmax,
    zero_ux,
    zero_uy,
    r,
    w_prob,
    w_unc,
    w_col,
    pow_half,
    cov,
    touched,
):
    n_pop, m = pop.shape
    cells_x, cells_y = pw.shape
    cells, slot_idx, _, violations = rollout_cells(
        pop, start_xg, start_yg, start_n, j, inc_x, inc_y, cells_x, cells_y, denied
    )

    fitness = np.empty(n_pop, dtype=np.float64)
    feasible = violations == 0
    fitness[~feasible] = -(1.0 + violations[~feasible])
    if not np.any(feasible):
        return fitness, violations

    # Collision term for feasible candidates, vectorized over (P, m, peers).
    x = r * (cells[:, :, 0] - 0.5)
    y = r * (cells[:, :, 1] - 0.5)
    if len(peers):
        dx = x[:, :, None] - peers[None, None, :, 0]
        dy = y[:, :, None] - peers[None, None, :, 1]
        d = np.sqrt(dx * dx + dy * dy)
        near_zero = d < 1e-9
        in_range = d <= rep_dmax
        safe_d = np.where(near_zero, 1.0, d)
        w = np.where(in_range & ~near_zero, rep_k * np.exp(-rep_mu * d) / safe_d, 0.0)
        fx = (w * dx).sum(axis=2) + (near_zero & in_range).sum(axis=2) * rep_k * zero_ux
        fy = (w * dy).sum(axis=2) + (near_zero & in_range).sum(axis=2) * rep_k * zero_uy
        jc = 1.0 - np.sqrt(fx * fx + fy * fy)
    else:
        jc = np.ones((n_pop, m))

    pw_flat = pw.ravel()
    chi_flat = chi.ravel()
    for c in np.nonzero(feasible)[0]:
        total = 0.0
        touched_parts = []
        for q in range(m):
            idx = slot_idx[c, q]
            sl = slice(offs_ptr[idx], offs_ptr[idx + 1])
            cx = cells[c, q, 0] + offs_x[sl]
            cy = cells[c, q, 1] + offs_y[sl]
            ok = (cx >= 1) & (cx <= cells_x) & (cy >= 1) & (cy <= cells_y)
            flat = (cx[ok] - 1) * cells_y + (cy[ok] - 1)
            cnt = cov[flat]
            jp = pw_flat[flat[cnt == 0]].sum()
            je = (chi_flat[flat] * pow_half[cnt]).sum()
            cov[flat] = cnt + 1
            touched_parts.append(flat)
            total += w_prob * jp + w_unc * je + w_col * jc[c, q]
        for flat in touched_parts:
            cov[flat] = 0
        fitness[c] = total
    return fitness, violations
