# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels. See ``_kernels_py`` for the reference semantics."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, exp, M_PI
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef extern from "complex.h" nogil:
    double complex conj(double complex)
    double creal(double complex)
    double cimag(double complex)


def beam_splitter_apply(c, double t, Py_ssize_t out_cutoff):
    cdef const double complex[:, ::1] cin = np.ascontiguousarray(c, dtype=np.complex128)
    cdef Py_ssize_t n_in = cin.shape[0] - 1
    out_arr = np.zeros((out_cutoff + 1, out_cutoff + 1), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr

    cdef Py_ssize_t i, j, k, n, n_max = -1
    for i in range(n_in + 1):
        for j in range(n_in + 1):
            if cin[i, j] != 0 and i + j > n_max:
                n_max = i + j
    if n_max < 0:
        return out_arr

    cdef double st = sqrt(t)
    cdef double sr = sqrt(1.0 - t) if t < 1.0 else 0.0
    cdef Py_ssize_t stride = n_max + 1
    cdef double *prev = <double *> malloc(stride * stride * sizeof(double))
    cdef double *cur = <double *> malloc(stride * stride * sizeof(double))
    cdef double *c1 = <double *> malloc(stride * sizeof(double))
    cdef double *c2 = <double *> malloc(stride * sizeof(double))
    cdef double *tmp
    cdef double v, a, b
    cdef double complex acc
    cdef Py_ssize_t j_lo, j_hi, k_lo, k_hi
    if prev == NULL or cur == NULL or c1 == NULL or c2 == NULL:
        free(prev)
        free(cur)
        free(c1)
        free(c2)
        raise MemoryError()

    with nogil:
        # block[k, j] stored at k * stride + j; k output and j input photons in mode 1
        cur[0] = 1.0
        for n in range(n_max + 1):
            if n > 0:
                tmp = prev
                prev = cur
                cur = tmp
                for k in range(n + 1):
                    c1[k] = sqrt(<double> k / n)
                    c2[k] = sqrt(<double> (n - k) / n)
                for k in range(n + 1):
                    for j in range(n + 1):
                        v = 0.0
                        if k > 0:
                            a = c1[k]
                            if j > 0:
                                v += a * c1[j] * st * prev[(k - 1) * stride + j - 1]
                            if j < n:
                                v += a * c2[j] * sr * prev[(k - 1) * stride + j]
                        if k < n:
                            b = c2[k]
                            if j > 0:
                                v -= b * c1[j] * sr * prev[k * stride + j - 1]
                            if j < n:
                                v += b * c2[j] * st * prev[k * stride + j]
                        cur[k * stride + j] = v

            j_lo = n - n_in if n > n_in else 0
            j_hi = n if n < n_in else n_in
            k_lo = n - out_cutoff if n > out_cutoff else 0
            k_hi = n if n < out_cutoff else out_cutoff
            for k in range(k_lo, k_hi + 1):
                acc = 0
                for j in range(j_lo, j_hi + 1):
                    acc = acc + cur[k * stride + j] * cin[j, n - j]
                out[k, n - k] = acc

    free(prev)
    free(cur)
    free(c1)
    free(c2)
    return out_arr


def displaced_parity(vectors, betas, Py_ssize_t m_max):
    cdef const double complex[:, ::1] vec = np.ascontiguousarray(
        np.atleast_2d(vectors), dtype=np.complex128)
    cdef const double complex[::1] bet = np.ascontiguousarray(
        np.atleast_1d(betas), dtype=np.complex128)
    cdef Py_ssize_t n_rank = vec.shape[0]
    cdef Py_ssize_t n_vec = vec.shape[1] - 1
    cdef Py_ssize_t n_pts = bet.shape[0]
    if m_max < n_vec:
        raise ValueError("m_max must be at least the vector cutoff")

    w_arr = np.zeros(n_pts)
    mass_arr = np.zeros(n_pts)
    cdef double[::1] w = w_arr
    cdef double[::1] mass = mass_arr

    cdef Py_ssize_t width = m_max + 1
    cdef double *d = <double *> malloc(width * sizeof(double))
    cdef double *d_prev = <double *> malloc(width * sizeof(double))
    cdef double *tmp
    cdef double complex *ph = <double complex *> malloc(width * sizeof(double complex))
    cdef double complex *phi = <double complex *> malloc(n_rank * width * sizeof(double complex))
    # recurrence coefficients depend only on (k, a): precompute once per call
    cdef double *c_cur = <double *> malloc((n_vec + 1) * width * sizeof(double))
    cdef double *c_prev = <double *> malloc((n_vec + 1) * width * sizeof(double))
    cdef double *inv_sqrt = <double *> malloc(width * sizeof(double))
    cdef double complex gam, val, ck, step
    cdef double x, rad, p, sw, sm, sgn, nxt, scale
    cdef Py_ssize_t i, a, n, r, k, top
    if (d == NULL or d_prev == NULL or ph == NULL or phi == NULL
            or c_cur == NULL or c_prev == NULL or inv_sqrt == NULL):
        free(d)
        free(d_prev)
        free(ph)
        free(phi)
        free(c_cur)
        free(c_prev)
        free(inv_sqrt)
        raise MemoryError()

    with nogil:
        for a in range(width):
            inv_sqrt[a] = 1.0 / sqrt(<double> a) if a > 0 else 0.0
        for k in range(n_vec):
            for a in range(width):
                scale = 1.0 / sqrt(<double> ((k + 1) * (k + 1 + a)))
                c_cur[k * width + a] = scale
                c_prev[k * width + a] = sqrt(<double> (k * (k + a))) * scale
        for i in range(n_pts):
            gam = -bet[i]
            x = creal(gam) * creal(gam) + cimag(gam) * cimag(gam)
            rad = sqrt(x)
            step = gam / rad if rad > 0 else 1.0
            d[0] = exp(-0.5 * x)
            d_prev[0] = 0.0
            ph[0] = 1.0
            for a in range(1, width):
                d[a] = d[a - 1] * rad * inv_sqrt[a]
                d_prev[a] = 0.0
                ph[a] = ph[a - 1] * step
            for r in range(n_rank * width):
                phi[r] = 0.0

            for n in range(n_vec + 1):
                if n > 0:
                    k = n - 1
                    # only diagonals a < width - n are read from here on
                    top = width - n
                    for a in range(top):
                        nxt = ((2 * k + 1 + a - x) * d[a] * c_cur[k * width + a]
                               - c_prev[k * width + a] * d_prev[a])
                        d_prev[a] = nxt
                    tmp = d
                    d = d_prev
                    d_prev = tmp
                for r in range(n_rank):
                    ck = vec[r, n]
                    if ck != 0:
                        for a in range(width - n):
                            phi[r * width + n + a] += ck * d[a] * ph[a]
                    val = 0.0
                    sgn = -1.0
                    for a in range(1, n_vec - n + 1):
                        val = val + sgn * d[a] * conj(ph[a]) * vec[r, n + a]
                        sgn = -sgn
                    phi[r * width + n] += val

            sw = 0.0
            sm = 0.0
            for r in range(n_rank):
                sgn = 1.0
                for a in range(width):
                    p = creal(phi[r * width + a]) ** 2 + cimag(phi[r * width + a]) ** 2
                    sw += sgn * p
                    sm += p
                    sgn = -sgn
            w[i] = sw / M_PI
            mass[i] = sm

    free(d)
    free(d_prev)
    free(ph)
    free(phi)
    free(c_cur)
    free(c_prev)
    free(inv_sqrt)
    return w_arr, mass_arr
