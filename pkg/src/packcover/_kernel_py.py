"""Pure-Python dual-averaging loop, used when the compiled kernel is absent.

Performs the same floating-point operations in the same order as
``_kernel.pyx`` so both backends produce the same iterates. Keep the two in
lockstep when editing either.
"""

from math import exp, expm1, isfinite, log, log1p

OK = 0
NONFINITE = 2
DOMAIN = 3
ZFLOOR = 4
STEPRATIO = 5
POSITIVITY = 6


def _neumaier(total, comp, term):
    t = total + term
    if abs(total) >= abs(term):
        comp += (total - t) + term
    else:
        comp += (term - t) + total
    return t, comp


def run(
    row_ptr,
    row_cols,
    row_vals,
    col_ptr,
    col_rows,
    col_vals,
    alpha,
    eta,
    gamma,
    eps,
    cap,
    z,
    x,
    y_acc,
    y_comp,
    istate,
    fstate,
    viol,
    extremes,
    trace,
    max_steps,
    stop_at_eta,
    finalize,
    stride,
    debug,
):
    m = len(row_ptr) - 1
    n = len(col_ptr) - 1
    # plain lists are several times faster than numpy scalar indexing
    row_ptr_l = row_ptr.tolist()
    row_cols_l = row_cols.tolist()
    row_vals_l = row_vals.tolist()
    col_ptr_l = col_ptr.tolist()
    col_rows_l = col_rows.tolist()
    col_vals_l = col_vals.tolist()
    zl = z.tolist()
    xl = x.tolist()
    yl = y_acc.tolist()
    ycl = y_comp.tolist()
    rows = [list(zip(row_cols_l[row_ptr_l[i]:row_ptr_l[i + 1]], row_vals_l[row_ptr_l[i]:row_ptr_l[i + 1]])) for i in range(m)]
    cols = [list(zip(col_rows_l[col_ptr_l[j]:col_ptr_l[j + 1]], col_vals_l[col_ptr_l[j]:col_ptr_l[j + 1]])) for j in range(n)]
    rp = [0.0] * m

    k = int(istate[0])
    n_trace = int(istate[1])
    saturation = int(istate[2])
    has_prev = istate[3] != 0
    lin_sum = float(fstate[0])
    lin_comp = float(fstate[1])
    prev_gap = float(fstate[2])
    ext = extremes.tolist()
    vio = viol.tolist()

    inv_alpha = 1.0 / alpha
    log_cap = log(cap)
    barrier_w = alpha / (1.0 + alpha)
    lin_w = -1.0 / (1.0 + alpha)
    psi_w = -(eta * alpha / (1.0 - alpha))
    z_floor = -eps * eta / 2.0
    c_lo = 1.0 / 16.0 - 1e-9
    c_hi = 1.0 / (4.0 * (1.0 - eps)) + 1e-9
    capacity = trace.shape[0]

    steps = 0
    last = False
    status = OK

    while True:
        if not (steps < max_steps and (not stop_at_eta or 1.0 + k * gamma <= eta)):
            if finalize and stop_at_eta and 1.0 + k * gamma > eta:
                last = True
            else:
                break

        record_due = stride > 0 and (k % stride == 0 or last)
        need_gap = debug or record_due

        psi_acc = 0.0
        max_ratio = 0.0
        min_z = zl[0]
        for j in range(n):
            zj = zl[j]
            r = zj / eta
            if not (r > -1.0):
                status = DOMAIN
                break
            t = -log1p(r) * inv_alpha
            xn = cap if t >= log_cap else exp(t)
            if need_gap:
                psi_acc += xn * (1.0 + r)
                if xl[j] > 0.0 and xn / xl[j] > max_ratio:
                    max_ratio = xn / xl[j]
                if zj < min_z:
                    min_z = zj
            if debug and not (xn > 0.0):
                status = POSITIVITY
            xl[j] = xn
        if status != OK:
            break

        bsum = 0.0
        for i in range(m):
            s = 0.0
            for c, v in rows[i]:
                s += v * xl[c]
            if s > 0.0:
                t = log(s) * inv_alpha
                if t >= log_cap:
                    rpi = cap
                    saturation += 1
                else:
                    rpi = exp(t)
            else:
                rpi = 0.0
            rp[i] = rpi
            bsum += s * rpi
        sumx = 0.0
        for j in range(n):
            sumx += xl[j]
        f = -sumx + barrier_w * bsum
        if not isfinite(f):
            status = NONFINITE
            break

        if need_gap:
            a_k = 1.0 + k * gamma
            psistar = psi_w * psi_acc
            gap_w = a_k * f - (lin_sum + lin_comp) - psistar
            lower = ((lin_sum + lin_comp) + psistar) / a_k
            if debug:
                if f < lower:
                    vio[3] += 1
                if f - lower < ext[3]:
                    ext[3] = f - lower
                if has_prev:
                    if gap_w > prev_gap + 1e-9 * (1.0 + abs(gap_w)):
                        vio[4] += 1
                    if gap_w - prev_gap > ext[4]:
                        ext[4] = gap_w - prev_gap
                prev_gap = gap_w
                has_prev = True
            if record_due and n_trace < capacity:
                trace[n_trace] = (k, f, lower, gap_w, min_z, max_ratio)
                n_trace += 1

        if last:
            for i in range(m):
                yl[i], ycl[i] = _neumaier(yl[i], ycl[i], gamma * rp[i])
            istate[4] = 1
            break

        for j in range(n):
            g = -1.0
            gcomp = 0.0
            for r_i, v in cols[j]:
                g, gcomp = _neumaier(g, gcomp, v * rp[r_i])
            g = g + gcomp
            if not isfinite(g):
                status = NONFINITE
                break
            tj = g if g < 1.0 else 1.0
            zj = zl[j]
            if debug:
                if g < -1.0:
                    vio[2] += 1
                if tj != 0.0:
                    cj = -expm1(-log1p(gamma * tj / (eta + zj)) * inv_alpha) / (alpha * tj)
                    if cj < ext[1]:
                        ext[1] = cj
                    if cj > ext[2]:
                        ext[2] = cj
                    if not (c_lo <= cj <= c_hi):
                        vio[1] += 1
                        status = STEPRATIO
            zj = zj + gamma * tj
            zl[j] = zj
            if debug:
                if zj < ext[0]:
                    ext[0] = zj
                if zj < z_floor:
                    vio[0] += 1
                    status = ZFLOOR
        if status == NONFINITE:
            break

        for i in range(m):
            yl[i], ycl[i] = _neumaier(yl[i], ycl[i], gamma * rp[i])
        lin_sum, lin_comp = _neumaier(lin_sum, lin_comp, gamma * (lin_w * bsum))
        k += 1
        steps += 1
        if status != OK:
            break

    z[:] = zl
    x[:] = xl
    y_acc[:] = yl
    y_comp[:] = ycl
    extremes[:] = ext
    viol[:] = vio
    istate[0] = k
    istate[1] = n_trace
    istate[2] = saturation
    istate[3] = 1 if has_prev else 0
    fstate[0] = lin_sum
    fstate[1] = lin_comp
    fstate[2] = prev_gap
    return status
