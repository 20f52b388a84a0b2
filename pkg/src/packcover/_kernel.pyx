# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled dual-averaging loop. Mirrors ``_kernel_py`` operation for operation."""

from libc.math cimport exp, expm1, fabs, isfinite, log, log1p

import numpy as np

# status codes, shared with _kernel_py
cdef enum:
    OK = 0
    NONFINITE = 2
    DOMAIN = 3
    ZFLOOR = 4
    STEPRATIO = 5
    POSITIVITY = 6


cdef inline void neumaier(double* total, double* comp, double term) nogil:
    cdef double t = total[0] + term
    if fabs(total[0]) >= fabs(term):
        comp[0] += (total[0] - t) + term
    else:
        comp[0] += (term - t) + total[0]
    total[0] = t


def run(
    const Py_ssize_t[::1] row_ptr,
    const Py_ssize_t[::1] row_cols,
    const double[::1] row_vals,
    const Py_ssize_t[::1] col_ptr,
    const Py_ssize_t[::1] col_rows,
    const double[::1] col_vals,
    double alpha,
    double eta,
    double gamma,
    double eps,
    double cap,
    double[::1] z,
    double[::1] x,
    double[::1] y_acc,
    double[::1] y_comp,
    long long[::1] istate,
    double[::1] fstate,
    long long[::1] viol,
    double[::1] extremes,
    double[:, ::1] trace,
    long long max_steps,
    bint stop_at_eta,
    bint finalize,
    long long stride,
    bint debug,
):
    cdef Py_ssize_t m = row_ptr.shape[0] - 1
    cdef Py_ssize_t n = col_ptr.shape[0] - 1
    cdef Py_ssize_t i, j, p
    cdef double[::1] ax = np.empty(m)
    cdef double[::1] rp = np.empty(m)

    cdef long long k = istate[0]
    cdef long long n_trace = istate[1]
    cdef long long saturation = istate[2]
    cdef bint has_prev = istate[3] != 0
    cdef double lin_sum = fstate[0]
    cdef double lin_comp = fstate[1]
    cdef double prev_gap = fstate[2]

    cdef double inv_alpha = 1.0 / alpha
    cdef double log_cap = log(cap)
    cdef double barrier_w = alpha / (1.0 + alpha)
    cdef double lin_w = -1.0 / (1.0 + alpha)
    cdef double psi_w = -(eta * alpha / (1.0 - alpha))
    cdef double z_floor = -eps * eta / 2.0
    cdef double c_lo = 1.0 / 16.0 - 1e-9
    cdef double c_hi = 1.0 / (4.0 * (1.0 - eps)) + 1e-9
    cdef long long capacity = trace.shape[0]

    cdef long long steps = 0
    cdef bint last = False
    cdef bint record_due, need_gap
    cdef double r, t, xn, psi_acc, max_ratio, min_z, s, sumx, bsum, f
    cdef double a_k, psistar, gap_w, lower, g, gcomp, tj, cj
    cdef int status = OK

    while True:
        if not (steps < max_steps and (not stop_at_eta or 1.0 + k * gamma <= eta)):
            if finalize and stop_at_eta and 1.0 + k * gamma > eta:
                last = True
            else:
                break

        record_due = stride > 0 and (k % stride == 0 or last)
        need_gap = debug or record_due

        # x <- grad psi*(z)
        psi_acc = 0.0
        max_ratio = 0.0
        min_z = z[0]
        for j in range(n):
            r = z[j] / eta
            if not (r > -1.0):
                status = DOMAIN
                break
            t = -log1p(r) * inv_alpha
            if t >= log_cap:
                xn = cap
            else:
                xn = exp(t)
            if need_gap:
                psi_acc += xn * (1.0 + r)
                if x[j] > 0.0 and xn / x[j] > max_ratio:
                    max_ratio = xn / x[j]
                if z[j] < min_z:
                    min_z = z[j]
            if debug and not (xn > 0.0):
                status = POSITIVITY
            x[j] = xn
        if status != OK:
            break

        # row sums and row powers (Ax)_i^(1/alpha)
        bsum = 0.0
        for i in range(m):
            s = 0.0
            for p in range(row_ptr[i], row_ptr[i + 1]):
                s += row_vals[p] * x[row_cols[p]]
            ax[i] = s
            if s > 0.0:
                t = log(s) * inv_alpha
                if t >= log_cap:
                    rp[i] = cap
                    saturation += 1
                else:
                    rp[i] = exp(t)
            else:
                rp[i] = 0.0
            bsum += s * rp[i]
        sumx = 0.0
        for j in range(n):
            sumx += x[j]
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
                    viol[3] += 1
                if f - lower < extremes[3]:
                    extremes[3] = f - lower
                if has_prev:
                    if gap_w > prev_gap + 1e-9 * (1.0 + fabs(gap_w)):
                        viol[4] += 1
                    if gap_w - prev_gap > extremes[4]:
                        extremes[4] = gap_w - prev_gap
                prev_gap = gap_w
                has_prev = True
            if record_due and n_trace < capacity:
                trace[n_trace, 0] = k
                trace[n_trace, 1] = f
                trace[n_trace, 2] = lower
                trace[n_trace, 3] = gap_w
                trace[n_trace, 4] = min_z
                trace[n_trace, 5] = max_ratio
                n_trace += 1

        if last:
            for i in range(m):
                neumaier(&y_acc[i], &y_comp[i], gamma * rp[i])
            istate[4] = 1
            break

        # truncated gradient and the dual-averaging update
        for j in range(n):
            g = -1.0
            gcomp = 0.0
            for p in range(col_ptr[j], col_ptr[j + 1]):
                neumaier(&g, &gcomp, col_vals[p] * rp[col_rows[p]])
            g = g + gcomp
            if not isfinite(g):
                status = NONFINITE
                break
            tj = g if g < 1.0 else 1.0
            if debug:
                if g < -1.0:
                    viol[2] += 1
                if tj != 0.0:
                    cj = -expm1(-log1p(gamma * tj / (eta + z[j])) * inv_alpha) / (alpha * tj)
                    if cj < extremes[1]:
                        extremes[1] = cj
                    if cj > extremes[2]:
                        extremes[2] = cj
                    if not (c_lo <= cj <= c_hi):
                        viol[1] += 1
                        status = STEPRATIO
            z[j] = z[j] + gamma * tj
            if debug:
                if z[j] < extremes[0]:
                    extremes[0] = z[j]
                if z[j] < z_floor:
                    viol[0] += 1
                    status = ZFLOOR
        if status == NONFINITE:
            break

        for i in range(m):
            neumaier(&y_acc[i], &y_comp[i], gamma * rp[i])
        neumaier(&lin_sum, &lin_comp, gamma * (lin_w * bsum))
        k += 1
        steps += 1
        if status != OK:
            break

    istate[0] = k
    istate[1] = n_trace
    istate[2] = saturation
    istate[3] = 1 if has_prev else 0
    fstate[0] = lin_sum
    fstate[1] = lin_comp
    fstate[2] = prev_gap
    return status
