# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: integer-point Riemann sums and the linear sieve.

Every sum is accumulated into Shewchuk partials (an exact representation of
the running sum); callers finish with ``math.fsum`` so the result is the
correctly rounded exact sum, independent of order or chunking.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, fabs, sqrt, floor

cnp.import_array()

cdef enum:
    MAXDIM = 16
    MAXPART = 128

cdef enum:
    SET_ALL = 0
    SET_NONZERO = 1
    SET_PRIM = 2
    SET_PRIM_STAR = 3
    SET_ODD_PRIM = 4
    SET_ODD = 5

cdef enum:
    F_BOX = 0
    F_BALL = 1
    F_SECTOR = 2
    F_BUMP = 3


cdef struct Acc:
    double re[MAXPART]
    double im[MAXPART]
    int nre
    int nim
    long count
    int overflow


cdef struct Walk:
    int dim
    int set_code
    int f_code
    const double* fp
    double step
    double offset
    double scale
    const long* lo
    const long* hi
    double radius2
    const long* tnum
    long tden
    const double* ctab
    const double* stab
    long z[MAXDIM]
    double x[MAXDIM]


cdef inline int _grow(double* p, int n, double x) noexcept nogil:
    cdef int i, j = 0
    cdef double y, t, hi, lo
    for i in range(n):
        y = p[i]
        if fabs(x) < fabs(y):
            t = x
            x = y
            y = t
        hi = x + y
        lo = y - (hi - x)
        if lo != 0.0:
            p[j] = lo
            j += 1
        x = hi
    p[j] = x
    return j + 1


cdef inline long _gcd(long a, long b) noexcept nogil:
    cdef long t
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        t = a % b
        a = b
        b = t
    return a


cdef inline double _feval(Walk* w) noexcept nogil:
    cdef int i, d = w.dim
    cdef double s, t, xx, yy
    cdef const double* fp = w.fp
    if w.f_code == F_BOX:
        for i in range(d):
            if w.x[i] < fp[i] or w.x[i] > fp[d + i]:
                return 0.0
        return 1.0
    elif w.f_code == F_BALL:
        s = 0.0
        for i in range(d):
            t = w.x[i] - fp[i]
            s = s + t * t
        return 1.0 if s <= fp[d] else 0.0
    elif w.f_code == F_SECTOR:
        xx = w.x[0]
        yy = w.x[1]
        if xx <= 0.0 or yy <= 0.0:
            return 0.0
        if fp[0] * xx > yy or yy > fp[1] * xx:
            return 0.0
        return 1.0 if xx * xx + yy * yy <= fp[2] else 0.0
    else:
        s = 0.0
        for i in range(d):
            t = w.x[i] - fp[i]
            s = s + t * t
        t = s / fp[d]
        if t < 1.0:
            return exp(-1.0 / (1.0 - t))
        return 0.0


cdef inline bint _member(Walk* w, long g) noexcept nogil:
    cdef int i
    cdef int sc = w.set_code
    if sc == SET_ALL:
        return True
    if sc == SET_NONZERO:
        return g != 0
    if sc == SET_PRIM:
        return g == 1
    if sc == SET_PRIM_STAR:
        return g == 1 and ((w.z[0] - w.z[1]) & 1) != 0
    if sc == SET_ODD_PRIM:
        return g == 1 and (w.z[0] & 1) != 0 and (w.z[1] & 1) != 0
    # SET_ODD
    for i in range(w.dim):
        if (w.z[i] & 1) == 0:
            return False
    return True


cdef void _leaf(Walk* w, Acc* acc, long g) noexcept nogil:
    cdef double fv, v
    cdef long r
    cdef int i
    if not _member(w, g):
        return
    fv = _feval(w)
    if fv == 0.0:
        return
    v = w.scale * fv
    acc.count += 1
    if w.tden > 0:
        r = 0
        for i in range(w.dim):
            r = (r + (w.tnum[i] * w.z[i]) % w.tden) % w.tden
        if r < 0:
            r += w.tden
        acc.nre = _grow(acc.re, acc.nre, v * w.ctab[r])
        acc.nim = _grow(acc.im, acc.nim, v * w.stab[r])
    else:
        acc.nre = _grow(acc.re, acc.nre, v)
    if acc.nre >= MAXPART - 2 or acc.nim >= MAXPART - 2:
        acc.overflow = 1


cdef void _walk(Walk* w, Acc* acc, int level, double used, long g) noexcept nogil:
    cdef long a, b, zi, bound, gg
    cdef double rem
    cdef bint need_gcd = w.set_code >= SET_NONZERO and w.set_code <= SET_ODD_PRIM
    a = w.lo[level]
    b = w.hi[level]
    if w.radius2 >= 0.0:
        rem = w.radius2 - used
        if rem < 0.0:
            return
        bound = <long>floor(sqrt(rem))
        while <double>(bound + 1) * <double>(bound + 1) <= rem:
            bound += 1
        while bound > 0 and <double>bound * <double>bound > rem:
            bound -= 1
        if a < -bound:
            a = -bound
        if b > bound:
            b = bound
    zi = a
    while zi <= b:
        w.z[level] = zi
        w.x[level] = w.step * (<double>zi + w.offset)
        gg = _gcd(g, zi) if need_gcd else 0
        if level + 1 == w.dim:
            _leaf(w, acc, gg)
        else:
            _walk(w, acc, level + 1, used + <double>zi * <double>zi, gg)
        zi += 1


def integer_sum(int dim, int set_code, int f_code, double[::1] fparams,
                double step, double offset, double scale,
                long[::1] lo, long[::1] hi, double radius2,
                long[::1] twist_num, long twist_den,
                double[::1] cos_tab, double[::1] sin_tab):
    """Sum ``scale * f(step*(z+offset)) * w(z)`` over member points ``z``.

    Points range over the integer box ``[lo, hi]``; when ``radius2 >= 0``
    they are further restricted to ``|z|^2 <= radius2``. Returns
    ``(re_partials, im_partials, count)``.
    """
    cdef Walk w
    cdef Acc acc
    if dim < 1 or dim > MAXDIM:
        raise ValueError("dimension out of range for compiled kernel")
    if twist_den > 0 and (twist_num.shape[0] != dim or cos_tab.shape[0] != twist_den):
        raise ValueError("twist tables do not match dimension/denominator")
    w.dim = dim
    w.set_code = set_code
    w.f_code = f_code
    w.fp = &fparams[0]
    w.step = step
    w.offset = offset
    w.scale = scale
    w.lo = &lo[0]
    w.hi = &hi[0]
    w.radius2 = radius2
    w.tden = twist_den
    if twist_den > 0:
        w.tnum = &twist_num[0]
        w.ctab = &cos_tab[0]
        w.stab = &sin_tab[0]
    acc.nre = 0
    acc.nim = 0
    acc.count = 0
    acc.overflow = 0
    with nogil:
        _walk(&w, &acc, 0, 0.0, 0)
    if acc.overflow:
        raise OverflowError("partials buffer exhausted")
    re = [acc.re[i] for i in range(acc.nre)]
    im = [acc.im[i] for i in range(acc.nim)]
    return re, im, acc.count


def linear_sieve(long K):
    """Return ``(mu, phi)`` arrays of length ``K + 1`` (index 0 unused)."""
    cdef cnp.ndarray[cnp.int8_t, ndim=1] mu = np.zeros(K + 1, dtype=np.int8)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] phi = np.zeros(K + 1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] primes = np.zeros(K + 1, dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] composite = np.zeros(K + 1, dtype=np.uint8)
    cdef long i, j, p, np_ = 0, ip
    if K >= 1:
        mu[1] = 1
        phi[1] = 1
    with nogil:
        for i in range(2, K + 1):
            if not composite[i]:
                primes[np_] = i
                np_ += 1
                mu[i] = -1
                phi[i] = i - 1
            for j in range(np_):
                p = primes[j]
                ip = i * p
                if ip > K:
                    break
                composite[ip] = 1
                if i % p == 0:
                    mu[ip] = 0
                    phi[ip] = phi[i] * p
                    break
                mu[ip] = -mu[i]
                phi[ip] = phi[i] * (p - 1)
    return mu, phi
