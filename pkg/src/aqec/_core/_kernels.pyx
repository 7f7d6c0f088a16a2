# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical kernels.

Same interface and semantics as _py_kernels; the loops are hand-written
because the matrices are small (at most 64x64) and per-call overhead, not
FLOPs, dominates the pure NumPy route on the hot paths (RK4 stepping,
Kraus application, eigenvalues inside the negativity).
"""

from libc.math cimport fabs, sqrt

import numpy as np

BACKEND_NAME = "cython"


cdef inline double cabs2(double complex z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef void _mul_nn(double complex[:, ::1] a, double complex[:, ::1] b,
                  double complex[:, ::1] out) noexcept nogil:
    # out = a @ b, accumulated row-wise so the inner loop runs contiguously
    cdef Py_ssize_t n = a.shape[0], i, j, k
    cdef double complex aik
    for i in range(n):
        for j in range(n):
            out[i, j] = 0
        for k in range(n):
            aik = a[i, k]
            if aik == 0:
                continue
            for j in range(n):
                out[i, j] = out[i, j] + aik * b[k, j]


cdef void _add_mul_nh(double complex[:, ::1] a, double complex[:, ::1] b,
                      double complex[:, ::1] out, double factor,
                      double complex[:, ::1] scratch) noexcept nogil:
    # out += factor * (a @ b^dagger); scratch holds b^dagger so the
    # accumulation loop runs contiguously
    cdef Py_ssize_t n = a.shape[0], i, j, k
    cdef double complex aik
    for k in range(n):
        for j in range(n):
            scratch[k, j] = b[j, k].conjugate()
    for i in range(n):
        for k in range(n):
            aik = factor * a[i, k]
            if aik == 0:
                continue
            for j in range(n):
                out[i, j] = out[i, j] + aik * scratch[k, j]


def kraus_apply(rho, kraus):
    """Sum_i K_i rho K_i^dagger for a stack of Kraus operators (N, d, d)."""
    rho_arr = np.ascontiguousarray(rho, dtype=np.complex128)
    kraus_arr = np.ascontiguousarray(kraus, dtype=np.complex128)
    cdef double complex[:, ::1] r = rho_arr
    cdef double complex[:, :, ::1] ks = kraus_arr
    cdef Py_ssize_t n = r.shape[0], nk = ks.shape[0], q
    out_arr = np.zeros((n, n), dtype=np.complex128)
    tmp_arr = np.empty((n, n), dtype=np.complex128)
    scr_arr = np.empty((n, n), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef double complex[:, ::1] tmp = tmp_arr
    cdef double complex[:, ::1] scr = scr_arr
    with nogil:
        for q in range(nk):
            _mul_nn(ks[q], r, tmp)
            _add_mul_nh(tmp, ks[q], out, 1.0, scr)
    return out_arr


cdef void _lindblad_rhs(double complex[:, ::1] r, double complex[:, :, ::1] jumps,
                        double complex[:, ::1] gram, double complex[:, ::1] tmp,
                        double complex[:, ::1] scr,
                        double complex[:, ::1] out) noexcept nogil:
    # out = -(gram r + r gram) + sum_q 2 L_q r L_q^dagger
    cdef Py_ssize_t m = jumps.shape[0], n = r.shape[0], q, i, j, k
    cdef double complex gik, rik
    for i in range(n):
        for j in range(n):
            out[i, j] = 0
        for k in range(n):
            gik = gram[i, k]
            rik = r[i, k]
            for j in range(n):
                out[i, j] = out[i, j] - gik * r[k, j] - rik * gram[k, j]
    for q in range(m):
        _mul_nn(jumps[q], r, tmp)
        _add_mul_nh(tmp, jumps[q], out, 2.0, scr)


cdef void _rk4_step(double complex[:, ::1] rho, double complex[:, :, ::1] jumps,
                    double complex[:, ::1] gram, double h,
                    double complex[:, ::1] k1, double complex[:, ::1] k2,
                    double complex[:, ::1] k3, double complex[:, ::1] k4,
                    double complex[:, ::1] stage, double complex[:, ::1] tmp,
                    double complex[:, ::1] scr) noexcept nogil:
    cdef Py_ssize_t n = rho.shape[0], i, j
    _lindblad_rhs(rho, jumps, gram, tmp, scr, k1)
    for i in range(n):
        for j in range(n):
            stage[i, j] = rho[i, j] + 0.5 * h * k1[i, j]
    _lindblad_rhs(stage, jumps, gram, tmp, scr, k2)
    for i in range(n):
        for j in range(n):
            stage[i, j] = rho[i, j] + 0.5 * h * k2[i, j]
    _lindblad_rhs(stage, jumps, gram, tmp, scr, k3)
    for i in range(n):
        for j in range(n):
            stage[i, j] = rho[i, j] + h * k3[i, j]
    _lindblad_rhs(stage, jumps, gram, tmp, scr, k4)
    for i in range(n):
        for j in range(n):
            rho[i, j] = rho[i, j] + (h / 6.0) * (
                k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j]
            )


def lindblad_rk4(rho0, jumps, double t, double dt):
    """Integrate drho/dt = sum_j [2 L rho L^dag - {L^dag L, rho}] to time t.

    Fixed-step classical RK4 with a final fractional step, matching the
    fallback implementation step for step.
    """
    rho_arr = np.array(rho0, dtype=np.complex128, order="C")
    jumps_arr = np.ascontiguousarray(jumps, dtype=np.complex128)
    if t == 0.0 or jumps_arr.shape[0] == 0:
        return rho_arr
    gram_arr = np.zeros_like(rho_arr)
    for lop in jumps_arr:
        gram_arr += lop.conj().T @ lop
    cdef double complex[:, ::1] rho = rho_arr
    cdef double complex[:, :, ::1] jmp = jumps_arr
    cdef double complex[:, ::1] gram = gram_arr
    cdef Py_ssize_t n = rho.shape[0]
    bufs = [np.empty((n, n), dtype=np.complex128) for _ in range(7)]
    cdef double complex[:, ::1] k1 = bufs[0]
    cdef double complex[:, ::1] k2 = bufs[1]
    cdef double complex[:, ::1] k3 = bufs[2]
    cdef double complex[:, ::1] k4 = bufs[3]
    cdef double complex[:, ::1] stage = bufs[4]
    cdef double complex[:, ::1] tmp = bufs[5]
    cdef double complex[:, ::1] scr = bufs[6]
    cdef Py_ssize_t nsteps = <Py_ssize_t>(t / dt)
    cdef double rem = t - nsteps * dt
    cdef double cutoff = 1e-13 * (1.0 if t < 1.0 else t)
    cdef Py_ssize_t step
    with nogil:
        for step in range(nsteps):
            _rk4_step(rho, jmp, gram, dt, k1, k2, k3, k4, stage, tmp, scr)
        if rem > cutoff:
            _rk4_step(rho, jmp, gram, rem, k1, k2, k3, k4, stage, tmp, scr)
    return rho_arr


def eigvalsh_herm(a):
    """Ascending real eigenvalues of a Hermitian matrix, by cyclic Jacobi.

    Rotations zero one off-diagonal element at a time; quadratic
    convergence makes a handful of sweeps enough at these sizes. Only the
    eigenvalues are accumulated.
    """
    m_arr = np.array(a, dtype=np.complex128, order="C")
    cdef double complex[:, ::1] m = m_arr
    cdef Py_ssize_t n = m.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t p, q, k, sweep, i, j
    cdef double off2, scale2, app, aqq, r2, r, tau, tt, c, s, signt, v
    cdef double complex apq, phi, phibar, mkp, mkq, nkp, nkq
    cdef bint converged = 0

    with nogil:
        scale2 = 0.0
        for i in range(n):
            for j in range(n):
                scale2 += cabs2(m[i, j])
        if scale2 > 0.0:
            for sweep in range(60):
                off2 = 0.0
                for i in range(n):
                    for j in range(i + 1, n):
                        off2 += cabs2(m[i, j])
                if off2 <= 1e-28 * scale2:
                    converged = 1
                    break
                for p in range(n - 1):
                    for q in range(p + 1, n):
                        r2 = cabs2(m[p, q])
                        if r2 == 0.0:
                            continue
                        r = sqrt(r2)
                        apq = m[p, q]
                        phi = apq / r
                        phibar = phi.conjugate()
                        app = m[p, p].real
                        aqq = m[q, q].real
                        tau = (app - aqq) / (2.0 * r)
                        signt = 1.0 if tau >= 0.0 else -1.0
                        tt = signt / (fabs(tau) + sqrt(1.0 + tau * tau))
                        c = 1.0 / sqrt(1.0 + tt * tt)
                        s = tt * c
                        for k in range(n):
                            if k == p or k == q:
                                continue
                            mkp = m[k, p]
                            mkq = m[k, q]
                            nkp = c * mkp + s * phibar * mkq
                            nkq = -s * phi * mkp + c * mkq
                            m[k, p] = nkp
                            m[p, k] = nkp.conjugate()
                            m[k, q] = nkq
                            m[q, k] = nkq.conjugate()
                        m[p, p] = c * c * app + 2.0 * c * s * r + s * s * aqq
                        m[q, q] = s * s * app - 2.0 * c * s * r + c * c * aqq
                        m[p, q] = 0
                        m[q, p] = 0
        # insertion sort of the diagonal, ascending
        for i in range(n):
            out[i] = m[i, i].real
        for i in range(1, n):
            v = out[i]
            j = i - 1
            while j >= 0 and out[j] > v:
                out[j + 1] = out[j]
                j -= 1
            out[j + 1] = v
    if scale2 > 0.0 and not converged:
        # one final off-diagonal audit; Jacobi converging this slowly means bad input
        off = np.max(np.abs(np.triu(m_arr, 1)))
        if off > 1e-10 * sqrt(scale2):
            raise RuntimeError("Jacobi eigensolver did not converge")
    return out_arr


def deviation_terms(m, kraus):
    """Per-pair deviation data for a state m and Kraus stack (N, d, d).

    Returns (alpha, lam2) with alpha[i, j] = Tr(m K_i^dag K_j m) / Tr(m)
    and lam2[i, j] = ||m K_i^dag K_j m - alpha[i, j] m||_F^2. m must be
    Hermitian (so m K_i^dag K_j m = (K_i m)^dag (K_j m)).
    """
    m_arr = np.ascontiguousarray(m, dtype=np.complex128)
    kraus_arr = np.ascontiguousarray(kraus, dtype=np.complex128)
    cdef double complex[:, ::1] mm = m_arr
    cdef double complex[:, :, ::1] ks = kraus_arr
    cdef Py_ssize_t nk = ks.shape[0], n = mm.shape[0], q, i, j, a, b, k
    y_arr = np.empty((nk, n, n), dtype=np.complex128)
    alpha_arr = np.empty((nk, nk), dtype=np.complex128)
    lam2_arr = np.empty((nk, nk), dtype=np.float64)
    g_arr = np.empty((n, n), dtype=np.complex128)
    cdef double complex[:, :, ::1] y = y_arr
    cdef double complex[:, ::1] g = g_arr
    cdef double complex[:, ::1] alpha = alpha_arr
    cdef double[:, ::1] lam2 = lam2_arr
    cdef double complex acc, aij
    cdef double tr_m, norm2
    with nogil:
        tr_m = 0.0
        for i in range(n):
            tr_m += mm[i, i].real
        for q in range(nk):
            _mul_nn(ks[q], mm, y[q])
        for i in range(nk):
            for j in range(nk):
                # g = y_i^dagger y_j
                for a in range(n):
                    for b in range(n):
                        g[a, b] = 0
                for k in range(n):
                    for a in range(n):
                        acc = y[i, k, a].conjugate()
                        if acc == 0:
                            continue
                        for b in range(n):
                            g[a, b] = g[a, b] + acc * y[j, k, b]
                aij = 0
                for a in range(n):
                    aij = aij + g[a, a]
                aij = aij / tr_m
                alpha[i, j] = aij
                norm2 = 0.0
                for a in range(n):
                    for b in range(n):
                        norm2 += cabs2(g[a, b] - aij * mm[a, b])
                lam2[i, j] = norm2
    return alpha_arr, lam2_arr
