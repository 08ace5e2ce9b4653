"""numba implementations of the hot loops (one trajectory / one word at a time)."""

import math

import numpy as np
from numba import njit

from ._common import (
    A21, A31, A32, A41, A42, A43, A51, A52, A53, A54, A61, A62, A63, A64, A65,
    B1, B3, B4, B5, B6, BISECT_TOL, C2, C3, C4, C5, E1, E3, E4, E5, E6, E7,
    FAC_MAX, FAC_MIN, OCT_COS, OCT_SIN, SAFETY, SEG_E, SEG_NONE, SEG_U, SEG_V,
    SEG_W, ST_DONE, ST_ESCAPE, ST_EXITED, ST_LEFT_WATCH, ST_MAXSTEPS,
    ST_NONFINITE,
)


# --- symbolic kernels -------------------------------------------------------

@njit(cache=True)
def advance_sets(starts, words, lengths, trans):
    """Vertex sets (bitmasks) reached after reading each padded word."""
    out = np.empty(starts.shape[0], dtype=np.uint64)
    nv = trans.shape[0]
    for b in range(starts.shape[0]):
        cur = starts[b]
        for j in range(lengths[b]):
            a = words[b, j]
            nxt = np.uint64(0)
            for v in range(nv):
                if (cur >> np.uint64(v)) & np.uint64(1):
                    nxt |= trans[v, a]
            cur = nxt
            if cur == 0:
                break
        out[b] = cur
    return out


@njit(cache=True)
def first_diff_distances(x, y, n):
    """d_i = 2**-(j - i), j the first index >= i where x and y differ."""
    m = min(x.shape[0], y.shape[0])
    out = np.zeros(n, dtype=np.float64)
    nxt = -1
    for i in range(m - 1, -1, -1):
        if x[i] != y[i]:
            nxt = i
        if i < n:
            out[i] = 0.0 if nxt < 0 else 2.0 ** (-(nxt - i))
    return out


# --- segment geometry -------------------------------------------------------

@njit(cache=True)
def _octagon(x, y, s):
    best = -1e300
    face = 0
    for k in range(8):
        e = x * OCT_COS[k] + y * OCT_SIN[k] - s
        if e > best:
            best = e
            face = k
    return best, face


@njit(cache=True)
def _profile(t, r, rr, delta, period):
    tt = t % period
    if tt <= delta:
        return rr - (rr - r) / delta * tt
    if tt >= period - delta:
        return rr - (rr - r) / delta * (period - tt)
    return r


@njit(cache=True)
def seg_excess(kind, p, t, z):
    """Signed excess over the segment boundary (<= 0 inside) and the active face."""
    x = z.real
    y = z.imag
    if kind == SEG_W:
        phi = (t % p[2]) * p[0] / 4.0
        c = math.cos(phi)
        s = math.sin(phi)
        return _octagon(x * c + y * s, -x * s + y * c, p[1])
    if kind == SEG_U:
        return _octagon(x, y, _profile(t, p[0], p[1], p[2], p[3]))
    if kind == SEG_V:
        return _octagon(x, y, p[0])
    # SEG_E: local coordinates w = P (z - M P)
    pr = p[0]
    pi_ = p[1]
    dx = x - p[3] * pr
    dy = y - p[3] * pi_
    wx = pr * dx - pi_ * dy
    wy = pr * dy + pi_ * dx
    ax = abs(wx)
    ay = abs(wy)
    if ax >= ay:
        return ax - p[2], (0 if wx >= 0 else 2)
    return ay - p[2], (1 if wy >= 0 else 3)


# --- integrator -------------------------------------------------------------

@njit(cache=True)
def vfield(t, z, kappa, n_param):
    zc = z.conjugate()
    c3 = zc * zc * zc
    r2 = z.real * z.real + z.imag * z.imag
    e = complex(math.cos(kappa * t), math.sin(kappa * t))
    return (1.0 + e * r2) * c3 - n_param


@njit(cache=True)
def _dp_step(t, z, h, k1, kappa, n_param):
    k2 = vfield(t + C2 * h, z + h * (A21 * k1), kappa, n_param)
    k3 = vfield(t + C3 * h, z + h * (A31 * k1 + A32 * k2), kappa, n_param)
    k4 = vfield(t + C4 * h, z + h * (A41 * k1 + A42 * k2 + A43 * k3), kappa, n_param)
    k5 = vfield(t + C5 * h, z + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4), kappa, n_param)
    k6 = vfield(t + h, z + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5), kappa, n_param)
    z5 = z + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6)
    k7 = vfield(t + h, z5, kappa, n_param)
    errv = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)
    return z5, abs(errv), k7


@njit(cache=True)
def _track_one(z0, t0, t1, h0, node_dt, seg_kind, seg_p, watch_kind, watch_p,
               stop_on_exit, kappa, n_param, tol, hmax, bailout, max_steps):
    z = z0
    t = t0
    h = min(h0, hmax)
    n_exits = 0
    t_exit = np.nan
    z_exit = complex(np.nan, np.nan)
    face_exit = -1
    steps = 0

    if watch_kind != SEG_NONE:
        ex, _ = seg_excess(watch_kind, watch_p, t, z)
        if ex > 0.0:
            return z, t, h, ST_LEFT_WATCH, n_exits, t_exit, z_exit, face_exit, steps
    inside = True
    if seg_kind != SEG_NONE:
        ex, fc = seg_excess(seg_kind, seg_p, t, z)
        if ex > 0.0:
            inside = False
            n_exits = 1
            t_exit = t
            z_exit = z
            face_exit = fc
            if stop_on_exit:
                return z, t, h, ST_EXITED, n_exits, t_exit, z_exit, face_exit, steps

    j_next = 1
    k1 = vfield(t, z, kappa, n_param)
    while t < t1:
        if node_dt > 0.0:
            target = min(t0 + j_next * node_dt, t1)
        else:
            target = t1
        hit = False
        htry = h
        if htry >= target - t:
            htry = target - t
            hit = True
        z5, err, k7 = _dp_step(t, z, htry, k1, kappa, n_param)
        steps += 1
        if steps > max_steps:
            return z, t, h, ST_MAXSTEPS, n_exits, t_exit, z_exit, face_exit, steps
        if not (math.isfinite(z5.real) and math.isfinite(z5.imag) and math.isfinite(err)):
            if htry < 1e-14:
                return z, t, h, ST_NONFINITE, n_exits, t_exit, z_exit, face_exit, steps
            h = htry * FAC_MIN
            continue
        scale = tol * (1.0 + max(abs(z), abs(z5)))
        ratio = err / (scale * htry)
        if ratio > 1.0:
            h = htry * max(FAC_MIN, SAFETY * ratio ** -0.25)
            if h < 1e-14:
                return z, t, h, ST_NONFINITE, n_exits, t_exit, z_exit, face_exit, steps
            continue
        # accepted
        tprev = t
        zprev = z
        k1prev = k1
        if hit:
            t = target
            if node_dt > 0.0 and target < t1:
                j_next += 1
        else:
            t = t + htry
        z = z5
        k1 = k7
        if ratio > 0.0:
            h = min(hmax, htry * min(FAC_MAX, max(FAC_MIN, SAFETY * ratio ** -0.25)))
        else:
            h = min(hmax, htry * FAC_MAX)

        if seg_kind != SEG_NONE:
            ex, fc = seg_excess(seg_kind, seg_p, t, z)
            now_inside = ex <= 0.0
            if inside and not now_inside:
                n_exits += 1
                if n_exits == 1:
                    lo = 0.0
                    hi = t - tprev
                    while hi - lo > BISECT_TOL:
                        mid = 0.5 * (lo + hi)
                        zm, _, _ = _dp_step(tprev, zprev, mid, k1prev, kappa, n_param)
                        exm, _ = seg_excess(seg_kind, seg_p, tprev + mid, zm)
                        if exm <= 0.0:
                            lo = mid
                        else:
                            hi = mid
                    zx, _, _ = _dp_step(tprev, zprev, hi, k1prev, kappa, n_param)
                    _, fx = seg_excess(seg_kind, seg_p, tprev + hi, zx)
                    t_exit = tprev + hi
                    z_exit = zx
                    face_exit = fx
                if stop_on_exit:
                    return z, t, h, ST_EXITED, n_exits, t_exit, z_exit, face_exit, steps
            inside = now_inside
        if abs(z) > bailout:
            return z, t, h, ST_ESCAPE, n_exits, t_exit, z_exit, face_exit, steps
        if watch_kind != SEG_NONE:
            ex, _ = seg_excess(watch_kind, watch_p, t, z)
            if ex > 0.0:
                return z, t, h, ST_LEFT_WATCH, n_exits, t_exit, z_exit, face_exit, steps
    return z, t, h, ST_DONE, n_exits, t_exit, z_exit, face_exit, steps


@njit(cache=True)
def track(z0, t0, t1, h0, node_dt, seg_kind, seg_p, watch_kind, watch_p,
          stop_on_exit, kappa, n_param, tol, hmax, bailout, max_steps):
    """Batch driver: integrate each (z0[i], t0[i]) to t1[i], watching segments."""
    n = z0.shape[0]
    z_out = np.empty(n, dtype=np.complex128)
    t_out = np.empty(n, dtype=np.float64)
    h_out = np.empty(n, dtype=np.float64)
    status = np.empty(n, dtype=np.int64)
    n_exits = np.empty(n, dtype=np.int64)
    t_exit = np.empty(n, dtype=np.float64)
    z_exit = np.empty(n, dtype=np.complex128)
    face_exit = np.empty(n, dtype=np.int64)
    steps = np.empty(n, dtype=np.int64)
    for i in range(n):
        r = _track_one(z0[i], t0[i], t1[i], h0[i], node_dt, seg_kind, seg_p,
                       watch_kind, watch_p, stop_on_exit, kappa, n_param, tol,
                       hmax, bailout, max_steps)
        z_out[i] = r[0]
        t_out[i] = r[1]
        h_out[i] = r[2]
        status[i] = r[3]
        n_exits[i] = r[4]
        t_exit[i] = r[5]
        z_exit[i] = r[6]
        face_exit[i] = r[7]
        steps[i] = r[8]
    return z_out, t_out, h_out, status, n_exits, t_exit, z_exit, face_exit, steps
