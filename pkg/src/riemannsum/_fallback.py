"""Pure-Python (numpy) versions of the compiled kernels.

The arithmetic mirrors ``_kernels.pyx`` operation for operation so that both
produce the same individual terms; combined with exact summation this makes
the two backends agree bit for bit on indicator test functions.
"""

import math

import numpy as np

SET_ALL, SET_NONZERO, SET_PRIM, SET_PRIM_STAR, SET_ODD_PRIM, SET_ODD = range(6)
F_BOX, F_BALL, F_SECTOR, F_BUMP = range(4)


def exact_parts(terms):
    """Doubles whose exact sum equals the exact sum of ``terms``.

    Repeated ``fsum`` peels off one correctly rounded component at a time;
    the residual shrinks by at least 53 bits per pass, so this terminates.
    """
    terms = list(terms)
    parts = []
    while True:
        s = math.fsum(terms + [-p for p in parts])
        if s == 0.0:
            return parts
        parts.append(s)


def _ball_bound(rem):
    """Largest integer b >= 0 with b*b <= rem (floating compare), or -1."""
    if rem < 0.0:
        return -1
    b = int(math.floor(math.sqrt(rem)))
    while float(b + 1) * float(b + 1) <= rem:
        b += 1
    while b > 0 and float(b) * float(b) > rem:
        b -= 1
    return b


def _points(dim, lo, hi, radius2):
    """Integer points of the box (optionally cut by a ball), lexicographic."""
    prefixes = np.zeros((1, 0), dtype=np.int64)
    used = np.zeros(1)
    for level in range(dim):
        chunks, new_used = [], []
        for row, u in zip(prefixes, used):
            a, b = int(lo[level]), int(hi[level])
            if radius2 >= 0.0:
                bound = _ball_bound(radius2 - u)
                if bound < 0:
                    continue
                a, b = max(a, -bound), min(b, bound)
            if a > b:
                continue
            col = np.arange(a, b + 1, dtype=np.int64)
            block = np.empty((col.size, level + 1), dtype=np.int64)
            block[:, :level] = row
            block[:, level] = col
            chunks.append(block)
            new_used.append(u + col.astype(float) * col.astype(float))
        if not chunks:
            return np.zeros((0, dim), dtype=np.int64)
        prefixes = np.concatenate(chunks)
        used = np.concatenate(new_used)
    return prefixes


def _member_mask(z, set_code):
    if set_code == SET_ALL:
        return np.ones(len(z), dtype=bool)
    if set_code == SET_ODD:
        return np.all(z & 1 == 1, axis=1)
    g = np.gcd.reduce(np.abs(z), axis=1)
    if set_code == SET_NONZERO:
        return g != 0
    mask = g == 1
    if set_code == SET_PRIM_STAR:
        mask &= ((z[:, 0] - z[:, 1]) & 1) != 0
    elif set_code == SET_ODD_PRIM:
        mask &= ((z[:, 0] & 1) != 0) & ((z[:, 1] & 1) != 0)
    return mask


def _feval(x, f_code, fp):
    d = x.shape[1]
    if f_code == F_BOX:
        ok = np.ones(len(x), dtype=bool)
        for i in range(d):
            ok &= (x[:, i] >= fp[i]) & (x[:, i] <= fp[d + i])
        return ok.astype(float)
    if f_code == F_SECTOR:
        xx, yy = x[:, 0], x[:, 1]
        ok = (xx > 0.0) & (yy > 0.0)
        ok &= (fp[0] * xx <= yy) & (yy <= fp[1] * xx)
        ok &= xx * xx + yy * yy <= fp[2]
        return ok.astype(float)
    s = np.zeros(len(x))
    for i in range(d):
        t = x[:, i] - fp[i]
        s = s + t * t
    if f_code == F_BALL:
        return (s <= fp[d]).astype(float)
    t = s / fp[d]
    out = np.zeros(len(x))
    inside = t < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - t[inside]))
    return out


def integer_sum(dim, set_code, f_code, fparams, step, offset, scale,
                lo, hi, radius2, twist_num, twist_den, cos_tab, sin_tab,
                max_points=1 << 21):
    """Same contract as ``_kernels.integer_sum``."""
    re_parts, im_parts, count = [], [], 0
    lo = np.asarray(lo, dtype=np.int64)
    hi = np.asarray(hi, dtype=np.int64)
    # slab over the outermost coordinate to bound memory
    inner = 1
    for a, b in zip(lo[1:], hi[1:]):
        inner *= max(int(b) - int(a) + 1, 1)
    slab = max(1, max_points // inner)
    for start in range(int(lo[0]), int(hi[0]) + 1, slab):
        sub_lo, sub_hi = lo.copy(), hi.copy()
        sub_lo[0], sub_hi[0] = start, min(start + slab - 1, int(hi[0]))
        z = _points(dim, sub_lo, sub_hi, radius2)
        if len(z) == 0:
            continue
        z = z[_member_mask(z, set_code)]
        x = step * (z.astype(float) + offset)
        fv = _feval(x, f_code, fparams)
        keep = fv != 0.0
        z, v = z[keep], scale * fv[keep]
        count += len(v)
        if twist_den > 0:
            r = np.zeros(len(z), dtype=np.int64)
            for i in range(dim):
                r = np.fmod(r + np.fmod(twist_num[i] * z[:, i], twist_den), twist_den)
            r[r < 0] += twist_den
            re_parts.extend(exact_parts((v * np.asarray(cos_tab)[r]).tolist()))
            im_parts.extend(exact_parts((v * np.asarray(sin_tab)[r]).tolist()))
        else:
            re_parts.extend(exact_parts(v.tolist()))
    return exact_parts(re_parts), exact_parts(im_parts), count


def linear_sieve(K):
    """Return ``(mu, phi)`` arrays of length ``K + 1`` (index 0 unused)."""
    mu = [0] * (K + 1)
    phi = [0] * (K + 1)
    composite = bytearray(K + 1)
    primes = []
    if K >= 1:
        mu[1] = phi[1] = 1
    for i in range(2, K + 1):
        if not composite[i]:
            primes.append(i)
            mu[i] = -1
            phi[i] = i - 1
        for p in primes:
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
    return np.array(mu, dtype=np.int8), np.array(phi, dtype=np.int64)
