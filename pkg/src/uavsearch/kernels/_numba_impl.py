"""JIT-compiled population fitness kernel.

One call scores every genome of a GA generation: it rolls each action
sequence through the jump grid, accumulates the weighted footprint revenue
with in-horizon uncertainty decay, and reports constraint violations.
Layout of the lookup tables is documented in kernels.__init__.
"""

import numpy as np
from numba import njit


@njit(cache=True)
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
    four_j = 4 * j
    span = 8 * j
    fitness = np.empty(n_pop, dtype=np.float64)
    violations = np.zeros(n_pop, dtype=np.int32)

    for c in range(n_pop):
        xg = start_xg
        yg = start_yg
        n = start_n
        total = 0.0
        viol = 0
        n_touched = 0
        for q in range(m):
            n += pop[c, q]
            if n > four_j:
                n -= span
            elif n <= -four_j:
                n += span
            idx = n + four_j - 1
            xg += inc_x[idx]
            yg += inc_y[idx]
            bad = xg < 1 or xg > cells_x or yg < 1 or yg > cells_y
            if not bad:
                bad = denied[xg - 1, yg - 1] != 0
            if bad:
                viol += 1
                continue
            if viol > 0:
                continue  # sequence already infeasible; only count violations

            jp = 0.0
            je = 0.0
            for k in range(offs_ptr[idx], offs_ptr[idx + 1]):
                cx = xg + offs_x[k]
                cy = yg + offs_y[k]
                if cx < 1 or cx > cells_x or cy < 1 or cy > cells_y:
                    continue
                flat = (cx - 1) * cells_y + (cy - 1)
                cnt = cov[flat]
                if cnt == 0:
                    jp += pw[cx - 1, cy - 1]
                je += chi[cx - 1, cy - 1] * pow_half[cnt]
                cov[flat] = cnt + 1
                touched[n_touched] = flat
                n_touched += 1

            x = r * (xg - 0.5)
            y = r * (yg - 0.5)
            fx = 0.0
            fy = 0.0
            for pi in range(peers.shape[0]):
                dx = x - peers[pi, 0]
                dy = y - peers[pi, 1]
                d = np.sqrt(dx * dx + dy * dy)
                if d <= rep_dmax:
                    if d < 1e-9:
                        fx += rep_k * zero_ux
                        fy += rep_k * zero_uy
                    else:
                        w = rep_k * np.exp(-rep_mu * d) / d
                        fx += w * dx
                        fy += w * dy
            jc = 1.0 - np.sqrt(fx * fx + fy * fy)
            total += w_prob * jp + w_unc * je + w_col * jc

        for k in range(n_touched):
            cov[touched[k]] = 0
        if viol > 0:
            fitness[c] = -(1.0 + viol)
        else:
            fitness[c] = total
        violations[c] = viol

    return fitness, violations
