# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hierarchy propagation kernel.

Same contract as the numpy fallback (``_heom_numpy.propagate``): fixed-step
RK4 over the dense (depth+1)^2 family of auxiliary 4x4 matrices, driven
Hamiltonian evaluated analytically at substage times, physical-matrix
snapshots at requested step indices.

The state is kept in split real/imaginary form so the hot loops are plain
real arithmetic the compiler can keep in vector registers. The coupling
operator must be real-valued (true for the dipolar and dephasing forms);
the wrapper routes complex-valued couplings to the numpy fallback.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, isfinite

cnp.import_array()

KERNEL_NAME = "cython"
REAL_COUPLING_ONLY = True


cdef void _rhs(int d, double *yr, double *yi, double *outr, double *outi,
               double w1, double w2, double jh, bint has_j,
               double *dampr, double *dampi,
               int nv, int *vi, int *vk, double *vvr,
               double g0, bint has_g0) noexcept nogil:
    cdef double hd[4]
    cdef double cdi[16]
    cdef double sr[16]
    cdef double si[16]
    cdef double fl1[16]
    cdef double cr, ci, c, g2
    cdef int i1, i2, a, b, m, base, rowd, ia, ka
    cdef bint have_up
    hd[0] = w1 + w2
    hd[1] = w1
    hd[2] = w2
    hd[3] = 0.0
    for a in range(4):
        for b in range(4):
            cdi[4 * a + b] = hd[a] - hd[b]
    rowd = 16 * d
    for i1 in range(d):
        if has_g0 and i1 > 0:
            for m in range(nv):
                fl1[m] = g0 * i1 * vvr[m]
        for i2 in range(d):
            base = (i1 * d + i2) * 16
            # (-i [H_diag, .] - n.nu) rho_n : entrywise complex coefficient
            cr = -dampr[i1 * d + i2]
            ci = -dampi[i1 * d + i2]
            for m in range(16):
                outr[base + m] = cr * yr[base + m] - (ci - cdi[m]) * yi[base + m]
                outi[base + m] = cr * yi[base + m] + (ci - cdi[m]) * yr[base + m]
            # -i J/2 exchange part of the commutator
            if has_j:
                for b in range(4):
                    outr[base + 4 + b] += jh * yi[base + 8 + b]
                    outi[base + 4 + b] -= jh * yr[base + 8 + b]
                    outr[base + 8 + b] += jh * yi[base + 4 + b]
                    outi[base + 8 + b] -= jh * yr[base + 4 + b]
                for a in range(4):
                    outr[base + 4 * a + 1] -= jh * yi[base + 4 * a + 2]
                    outi[base + 4 * a + 1] += jh * yr[base + 4 * a + 2]
                    outr[base + 4 * a + 2] -= jh * yi[base + 4 * a + 1]
                    outi[base + 4 * a + 2] += jh * yr[base + 4 * a + 1]
            # -i [V, rho_{n+e1} + rho_{n+e2}], neighbours beyond the cutoff dropped
            have_up = True
            if i1 + 1 < d and i2 + 1 < d:
                for m in range(16):
                    sr[m] = yr[base + rowd + m] + yr[base + 16 + m]
                    si[m] = yi[base + rowd + m] + yi[base + 16 + m]
            elif i1 + 1 < d:
                for m in range(16):
                    sr[m] = yr[base + rowd + m]
                    si[m] = yi[base + rowd + m]
            elif i2 + 1 < d:
                for m in range(16):
                    sr[m] = yr[base + 16 + m]
                    si[m] = yi[base + 16 + m]
            else:
                have_up = False
            if have_up:
                for m in range(nv):
                    ia = 4 * vi[m]
                    ka = 4 * vk[m]
                    c = vvr[m]
                    # -i c (V S): rows
                    outr[base + ia + 0] += c * si[ka + 0]
                    outr[base + ia + 1] += c * si[ka + 1]
                    outr[base + ia + 2] += c * si[ka + 2]
                    outr[base + ia + 3] += c * si[ka + 3]
                    outi[base + ia + 0] -= c * sr[ka + 0]
                    outi[base + ia + 1] -= c * sr[ka + 1]
                    outi[base + ia + 2] -= c * sr[ka + 2]
                    outi[base + ia + 3] -= c * sr[ka + 3]
                    # +i c (S V): columns
                    ia = vi[m]
                    ka = vk[m]
                    outr[base + 0 + ka] -= c * si[0 + ia]
                    outr[base + 4 + ka] -= c * si[4 + ia]
                    outr[base + 8 + ka] -= c * si[8 + ia]
                    outr[base + 12 + ka] -= c * si[12 + ia]
                    outi[base + 0 + ka] += c * sr[0 + ia]
                    outi[base + 4 + ka] += c * sr[4 + ia]
                    outi[base + 8 + ka] += c * sr[8 + ia]
                    outi[base + 12 + ka] += c * sr[12 + ia]
            if has_g0:
                # +i g0 n1 rho_{n-e1} V : columns
                if i1 > 0:
                    for m in range(nv):
                        ia = vi[m]
                        ka = vk[m]
                        c = fl1[m]
                        outr[base + 0 + ka] -= c * yi[base - rowd + 0 + ia]
                        outr[base + 4 + ka] -= c * yi[base - rowd + 4 + ia]
                        outr[base + 8 + ka] -= c * yi[base - rowd + 8 + ia]
                        outr[base + 12 + ka] -= c * yi[base - rowd + 12 + ia]
                        outi[base + 0 + ka] += c * yr[base - rowd + 0 + ia]
                        outi[base + 4 + ka] += c * yr[base - rowd + 4 + ia]
                        outi[base + 8 + ka] += c * yr[base - rowd + 8 + ia]
                        outi[base + 12 + ka] += c * yr[base - rowd + 12 + ia]
                # -i g0 n2 V rho_{n-e2} : rows
                if i2 > 0:
                    g2 = g0 * i2
                    for m in range(nv):
                        ia = 4 * vi[m]
                        ka = 4 * vk[m]
                        c = g2 * vvr[m]
                        outr[base + ia + 0] += c * yi[base - 16 + ka + 0]
                        outr[base + ia + 1] += c * yi[base - 16 + ka + 1]
                        outr[base + ia + 2] += c * yi[base - 16 + ka + 2]
                        outr[base + ia + 3] += c * yi[base - 16 + ka + 3]
                        outi[base + ia + 0] -= c * yr[base - 16 + ka + 0]
                        outi[base + ia + 1] -= c * yr[base - 16 + ka + 1]
                        outi[base + ia + 2] -= c * yr[base - 16 + ka + 2]
                        outi[base + ia + 3] -= c * yr[base - 16 + ka + 3]


cdef void _step(int d, long n, double *yr, double *yi,
                double *kr, double *ki, double *str_, double *sti,
                double *accr, double *acci,
                double tau, double h,
                double o1, double d1, double wd1, double p1,
                double o2, double d2, double wd2, double p2,
                double jh, bint has_j, double *dampr, double *dampi,
                int nv, int *vi, int *vk, double *vvr,
                double g0, bint has_g0) noexcept nogil:
    cdef long i
    cdef double w1, w2
    cdef double h2 = 0.5 * h, h6 = h / 6.0, h3 = h / 3.0

    w1 = o1 + d1 * cos(wd1 * tau + p1)
    w2 = o2 + d2 * cos(wd2 * tau + p2)
    _rhs(d, yr, yi, kr, ki, w1, w2, jh, has_j, dampr, dampi, nv, vi, vk, vvr, g0, has_g0)
    for i in range(n):
        accr[i] = yr[i] + h6 * kr[i]
        str_[i] = yr[i] + h2 * kr[i]
    for i in range(n):
        acci[i] = yi[i] + h6 * ki[i]
        sti[i] = yi[i] + h2 * ki[i]

    w1 = o1 + d1 * cos(wd1 * (tau + h2) + p1)
    w2 = o2 + d2 * cos(wd2 * (tau + h2) + p2)
    _rhs(d, str_, sti, kr, ki, w1, w2, jh, has_j, dampr, dampi, nv, vi, vk, vvr, g0, has_g0)
    for i in range(n):
        accr[i] += h3 * kr[i]
        str_[i] = yr[i] + h2 * kr[i]
    for i in range(n):
        acci[i] += h3 * ki[i]
        sti[i] = yi[i] + h2 * ki[i]

    _rhs(d, str_, sti, kr, ki, w1, w2, jh, has_j, dampr, dampi, nv, vi, vk, vvr, g0, has_g0)
    for i in range(n):
        accr[i] += h3 * kr[i]
        str_[i] = yr[i] + h * kr[i]
    for i in range(n):
        acci[i] += h3 * ki[i]
        sti[i] = yi[i] + h * ki[i]

    w1 = o1 + d1 * cos(wd1 * (tau + h) + p1)
    w2 = o2 + d2 * cos(wd2 * (tau + h) + p2)
    _rhs(d, str_, sti, kr, ki, w1, w2, jh, has_j, dampr, dampi, nv, vi, vk, vvr, g0, has_g0)
    for i in range(n):
        yr[i] = accr[i] + h6 * kr[i]
    for i in range(n):
        yi[i] = acci[i] + h6 * ki[i]


def propagate(double complex[:, :, :, ::1] mats, double tau0, double dt,
              long n_full, double last_dt, cnp.int64_t[:] snap_steps,
              drive, double gamma0, double complex nu1, double complex[:, ::1] v):
    """Advance the hierarchy in place; see ``_heom_numpy.propagate``."""
    cdef int d = mats.shape[0]
    cdef long n = <long>d * d * 16
    cdef double o1, d1, wd1, p1, o2, d2, wd2, p2, jh
    o1, d1, wd1, p1, o2, d2, wd2, p2, jh = drive
    cdef bint has_j = jh != 0.0
    cdef bint has_g0 = gamma0 != 0.0

    mats_np = np.asarray(mats)
    yr_arr = np.ascontiguousarray(mats_np.real, dtype=float).reshape(n)
    yi_arr = np.ascontiguousarray(mats_np.imag, dtype=float).reshape(n)
    idx = np.arange(d, dtype=float)
    damp = idx[:, None] * nu1 + idx[None, :] * np.conj(nu1)
    dampr_arr = np.ascontiguousarray(damp.real).reshape(d * d)
    dampi_arr = np.ascontiguousarray(damp.imag).reshape(d * d)

    cdef int vi[16]
    cdef int vk[16]
    cdef double vvr[16]
    cdef int nv = 0
    cdef int a, b
    for a in range(4):
        for b in range(4):
            if v[a, b] != 0:
                if v[a, b].imag != 0.0:
                    raise ValueError("compiled kernel requires a real coupling operator")
                vi[nv] = a
                vk[nv] = b
                vvr[nv] = v[a, b].real
                nv += 1

    kr_arr = np.empty(n)
    ki_arr = np.empty(n)
    str_arr = np.empty(n)
    sti_arr = np.empty(n)
    accr_arr = np.empty(n)
    acci_arr = np.empty(n)
    cdef double[::1] yr = yr_arr, yi = yi_arr
    cdef double[::1] kr = kr_arr, ki = ki_arr
    cdef double[::1] st_r = str_arr, st_i = sti_arr
    cdef double[::1] accr = accr_arr, acci = acci_arr
    cdef double[::1] dampr = dampr_arr, dampi = dampi_arr

    cdef long n_total = n_full + (1 if last_dt > 0.0 else 0)
    cdef long n_snaps = snap_steps.shape[0]
    snaps = np.zeros((n_snaps, 4, 4), dtype=complex)
    cdef double complex[:, :, ::1] snaps_mv = snaps

    cdef double *pyr = &yr[0]
    cdef double *pyi = &yi[0]
    cdef long pos = 0, step = 0, fail_step = -1
    cdef double tau = tau0, h, re, im
    cdef int m
    cdef bint bad

    if pos < n_snaps and snap_steps[pos] == 0:
        for m in range(16):
            snaps_mv[pos, m // 4, m % 4] = pyr[m] + 1.0j * pyi[m]
        pos += 1

    for step in range(1, n_total + 1):
        h = dt if step <= n_full else last_dt
        with nogil:
            _step(d, n, pyr, pyi, &kr[0], &ki[0], &st_r[0], &st_i[0],
                  &accr[0], &acci[0], tau, h,
                  o1, d1, wd1, p1, o2, d2, wd2, p2,
                  jh, has_j, &dampr[0], &dampi[0], nv, vi, vk, vvr,
                  gamma0, has_g0)
        tau += h
        if pos < n_snaps and snap_steps[pos] == step:
            bad = False
            for m in range(16):
                re = pyr[m]
                im = pyi[m]
                if not (isfinite(re) and isfinite(im)):
                    bad = True
                    break
            if bad:
                fail_step = step
                break
            for m in range(16):
                snaps_mv[pos, m // 4, m % 4] = pyr[m] + 1.0j * pyi[m]
            pos += 1

    out = np.asarray(mats)
    out.real = yr_arr.reshape(d, d, 4, 4)
    out.imag = yi_arr.reshape(d, d, 4, 4)
    return np.asarray(snaps), tau, fail_step
