# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled RK4 phase kernel (see ``_kernel_py`` for the reference version)."""

import numpy as np
cimport numpy as cnp
from libc.math cimport rint, fmod, sqrt, isfinite
from libc.stdlib cimport malloc, free

cnp.import_array()

BACKEND = "cython"

cdef double HALF_PI = np.pi / 2
cdef double TWO_PI = 2 * np.pi


cdef inline void _sincos(double x, double* s, double* c) noexcept nogil:
    # quadrant reduction then Taylor polynomials on |r| <= pi/4 (error < 1e-16)
    cdef double u = x / HALF_PI
    cdef double q = rint(u)
    cdef double r = (u - q) * HALF_PI
    cdef double r2 = r * r
    cdef double s0 = r + r * r2 * (-1.0 / 6.0 + r2 * (1.0 / 120.0 + r2 * (-1.0 / 5040.0
        + r2 * (1.0 / 362880.0 + r2 * (-1.0 / 39916800.0 + r2 * (1.0 / 6227020800.0
        + r2 * (-1.0 / 1307674368000.0 + r2 * (1.0 / 355687428096000.0))))))))
    cdef double c0 = 1.0 + r2 * (-0.5 + r2 * (1.0 / 24.0 + r2 * (-1.0 / 720.0
        + r2 * (1.0 / 40320.0 + r2 * (-1.0 / 3628800.0 + r2 * (1.0 / 479001600.0
        + r2 * (-1.0 / 87178291200.0 + r2 * (1.0 / 20922789888000.0))))))))
    cdef long qm = (<long> q) & 3
    if qm == 0:
        s[0] = s0
        c[0] = c0
    elif qm == 1:
        s[0] = c0
        c[0] = -s0
    elif qm == 2:
        s[0] = -s0
        c[0] = -c0
    else:
        s[0] = -c0
        c[0] = s0


cdef inline double _wrap(double x) noexcept nogil:
    x = fmod(x, TWO_PI)
    if x < 0:
        x += TWO_PI
    if x >= TWO_PI:
        x = 0.0
    return x


cdef struct System:
    int n
    int k
    const long* indptr
    const long* indices
    const double* data
    const double* omega
    const long* src_of
    const double* rate
    const double* phase0
    const double* gain
    double* s
    double* c
    double* ts
    double* tc
    double ramp


cdef void _field(System* sy, const double* phi, double t, double* out, bint have_trig) noexcept nogil:
    cdef int i, p, src
    cdef double acc_c, acc_s, s2, c2, si, ci, rf = 1.0
    cdef double* s = sy.s
    cdef double* c = sy.c
    if not have_trig:
        for i in range(sy.n):
            _sincos(phi[i], &s[i], &c[i])
    if sy.ramp > 0 and t < sy.ramp:
        rf = t / sy.ramp
    for i in range(sy.k):
        _sincos(sy.rate[i] * t + sy.phase0[i], &sy.ts[i], &sy.tc[i])
    for i in range(sy.n):
        acc_c = 0.0
        acc_s = 0.0
        for p in range(sy.indptr[i], sy.indptr[i + 1]):
            acc_c += sy.data[p] * c[sy.indices[p]]
            acc_s += sy.data[p] * s[sy.indices[p]]
        si = s[i]
        ci = c[i]
        s2 = 2.0 * si * ci
        c2 = ci * ci - si * si
        src = sy.src_of[i]
        out[i] = sy.omega[i] - (si * acc_c - ci * acc_s) \
            - rf * sy.gain[src] * (s2 * sy.tc[src] - c2 * sy.ts[src])


cdef bint _inband(System* sy, double cos_band2) noexcept nogil:
    cdef int i
    cdef double zx = 0.0, zy = 0.0, s2, c2, norm
    for i in range(sy.n):
        zx += sy.c[i] * sy.c[i] - sy.s[i] * sy.s[i]
        zy += 2.0 * sy.s[i] * sy.c[i]
    norm = sqrt(zx * zx + zy * zy)
    if norm == 0.0:
        return False
    for i in range(sy.n):
        c2 = sy.c[i] * sy.c[i] - sy.s[i] * sy.s[i]
        s2 = 2.0 * sy.s[i] * sy.c[i]
        if c2 * zx + s2 * zy < cos_band2 * norm:
            return False
    return True


def integrate_chunk(double[::1] phi, long step0, long nsteps, double dt,
                    indptr, indices, data, omega, src_of,
                    src_rate, src_phase0, src_gain, noise,
                    double cos_band2, cnp.uint8_t[::1] inband_out, double ramp=0.0):
    cdef const long[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const long[::1] ix = np.ascontiguousarray(indices, dtype=np.int64)
    cdef const double[::1] dv = np.ascontiguousarray(data, dtype=np.float64)
    cdef const double[::1] om = np.ascontiguousarray(omega, dtype=np.float64)
    cdef const long[::1] so = np.ascontiguousarray(src_of, dtype=np.int64)
    cdef const double[::1] sr = np.ascontiguousarray(src_rate, dtype=np.float64)
    cdef const double[::1] sp0 = np.ascontiguousarray(src_phase0, dtype=np.float64)
    cdef const double[::1] sg = np.ascontiguousarray(src_gain, dtype=np.float64)
    cdef int n = phi.shape[0]
    cdef int k = sr.shape[0]
    cdef bint use_noise = noise is not None and len(noise) > 0
    cdef const double[:, ::1] nz
    if use_noise:
        nz = np.ascontiguousarray(noise, dtype=np.float64)
    cdef double[::1] ptr = np.zeros(1)
    # per-node phases are read via pointers below; empty systems are handled by the caller
    cdef double* buf = <double*> malloc(sizeof(double) * (7 * n + 2 * k + 1))
    if buf == NULL:
        raise MemoryError()
    cdef System sy
    sy.n = n
    sy.k = k
    sy.ramp = ramp
    sy.indptr = &ip[0]
    sy.indices = &ix[0] if ix.shape[0] > 0 else <long*> &ip[0]
    sy.data = &dv[0] if dv.shape[0] > 0 else &ptr[0]
    sy.omega = &om[0]
    sy.src_of = &so[0]
    sy.rate = &sr[0]
    sy.phase0 = &sp0[0]
    sy.gain = &sg[0]
    sy.s = buf
    sy.c = buf + n
    cdef double* k1 = buf + 2 * n
    cdef double* k2 = buf + 3 * n
    cdef double* k3 = buf + 4 * n
    cdef double* k4 = buf + 5 * n
    cdef double* y = buf + 6 * n
    sy.ts = buf + 7 * n
    sy.tc = buf + 7 * n + k
    cdef double* x = &phi[0]
    cdef long step, i
    cdef double t, h2 = 0.5 * dt, h6 = dt / 6.0
    cdef long failed = -1
    with nogil:
        for i in range(n):
            _sincos(x[i], &sy.s[i], &sy.c[i])
        for step in range(nsteps):
            t = (step0 + step) * dt
            _field(&sy, x, t, k1, True)
            for i in range(n):
                y[i] = x[i] + h2 * k1[i]
            _field(&sy, y, t + h2, k2, False)
            for i in range(n):
                y[i] = x[i] + h2 * k2[i]
            _field(&sy, y, t + h2, k3, False)
            for i in range(n):
                y[i] = x[i] + dt * k3[i]
            _field(&sy, y, t + dt, k4, False)
            for i in range(n):
                x[i] = x[i] + h6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            if use_noise:
                for i in range(n):
                    x[i] = x[i] + nz[step, i]
            for i in range(n):
                if not isfinite(x[i]):
                    failed = step
                    break
            if failed >= 0:
                break
            for i in range(n):
                x[i] = _wrap(x[i])
                _sincos(x[i], &sy.s[i], &sy.c[i])
            inband_out[step] = _inband(&sy, cos_band2)
    free(buf)
    return failed
