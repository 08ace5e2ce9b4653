"""Vectorised numpy reference implementations.

Same contracts as ``_numba_impl``; batches advance in lockstep with masks.
"""

import numpy as np

from ._common import (
    A21, A31, A32, A41, A42, A43, A51, A52, A53, A54, A61, A62, A63, A64, A65,
    B1, B3, B4, B5, B6, BISECT_TOL, C2, C3, C4, C5, E1, E3, E4, E5, E6, E7,
    FAC_MAX, FAC_MIN, OCT_COS, OCT_SIN, SAFETY, SEG_NONE, SEG_U, SEG_V,
    SEG_W, ST_DONE, ST_ESCAPE, ST_EXITED, ST_LEFT_WATCH, ST_MAXSTEPS,
    ST_NONFINITE,
)


def advance_sets(starts, words, lengths, trans):
    nv = trans.shape[0]
    cur = np.asarray(starts, dtype=np.uint64).copy()
    words = np.asarray(words)
    lengths = np.asarray(lengths)
    bits = np.uint64(1) << np.arange(nv, dtype=np.uint64)
    for j in range(words.shape[1] if words.ndim == 2 else 0):
        live = lengths > j
        if not live.any():
            break
        a = words[live, j]
        has = (cur[live, None] & bits[None, :]) != 0           # [b, nv]
        contrib = np.where(has, trans[np.arange(nv)[None, :], a[:, None]], np.uint64(0))
        cur[live] = np.bitwise_or.reduce(contrib, axis=1)
    return cur


def first_diff_distances(x, y, n):
    m = min(len(x), len(y))
    out = np.zeros(n, dtype=np.float64)
    diff = np.flatnonzero(np.asarray(x[:m]) != np.asarray(y[:m]))
    if diff.size == 0:
        return out
    idx = np.arange(min(n, m))
    pos = np.searchsorted(diff, idx)
    found = pos < diff.size
    k = np.where(found, diff[np.minimum(pos, diff.size - 1)] - idx, 0)
    out[: idx.size] = np.where(found, np.exp2(-k.astype(np.float64)), 0.0)
    return out


def _octagon(x, y, s):
    e = x[..., None] * OCT_COS + y[..., None] * OCT_SIN - np.asarray(s)[..., None]
    face = np.argmax(e, axis=-1)
    return np.take_along_axis(e, face[..., None], axis=-1)[..., 0], face


def _profile(t, r, rr, delta, period):
    tt = np.mod(t, period)
    w = (rr - r) / delta
    return np.where(tt <= delta, rr - w * tt,
                    np.where(tt >= period - delta, rr - w * (period - tt), r))


def seg_excess(kind, p, t, z):
    t = np.asarray(t, dtype=np.float64)
    z = np.asarray(z, dtype=np.complex128)
    x, y = z.real, z.imag
    if kind == SEG_W:
        phi = np.mod(t, p[2]) * p[0] / 4.0
        c, s = np.cos(phi), np.sin(phi)
        return _octagon(x * c + y * s, -x * s + y * c, np.full(t.shape, p[1]))
    if kind == SEG_U:
        return _octagon(x, y, _profile(t, p[0], p[1], p[2], p[3]))
    if kind == SEG_V:
        return _octagon(x, y, np.full(np.broadcast(t, z).shape, p[0]))
    pr, pi_ = p[0], p[1]
    dx = x - p[3] * pr
    dy = y - p[3] * pi_
    wx = pr * dx - pi_ * dy
    wy = pr * dy + pi_ * dx
    ax, ay = np.abs(wx), np.abs(wy)
    use_x = ax >= ay
    ex = np.where(use_x, ax, ay) - p[2]
    face = np.where(use_x, np.where(wx >= 0, 0, 2), np.where(wy >= 0, 1, 3))
    return ex, face


def vfield(t, z, kappa, n_param):
    zc = np.conj(z)
    c3 = zc * zc * zc
    r2 = z.real * z.real + z.imag * z.imag
    e = np.cos(kappa * t) + 1j * np.sin(kappa * t)
    return (1.0 + e * r2) * c3 - n_param


def _dp_step(t, z, h, k1, kappa, n_param):
    k2 = vfield(t + C2 * h, z + h * (A21 * k1), kappa, n_param)
    k3 = vfield(t + C3 * h, z + h * (A31 * k1 + A32 * k2), kappa, n_param)
    k4 = vfield(t + C4 * h, z + h * (A41 * k1 + A42 * k2 + A43 * k3), kappa, n_param)
    k5 = vfield(t + C5 * h, z + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4), kappa, n_param)
    k6 = vfield(t + h, z + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5), kappa, n_param)
    z5 = z + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6)
    k7 = vfield(t + h, z5, kappa, n_param)
    errv = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)
    return z5, np.abs(errv), k7


def track(z0, t0, t1, h0, node_dt, seg_kind, seg_p, watch_kind, watch_p,
          stop_on_exit, kappa, n_param, tol, hmax, bailout, max_steps):
    n = len(z0)
    z = np.array(z0, dtype=np.complex128)
    t = np.array(t0, dtype=np.float64)
    t0 = t.copy()
    t1 = np.asarray(t1, dtype=np.float64)
    h = np.minimum(np.asarray(h0, dtype=np.float64), hmax)
    status = np.full(n, ST_DONE, dtype=np.int64)
    n_exits = np.zeros(n, dtype=np.int64)
    t_exit = np.full(n, np.nan)
    z_exit = np.full(n, complex(np.nan, np.nan))
    face_exit = np.full(n, -1, dtype=np.int64)
    steps = np.zeros(n, dtype=np.int64)
    j_next = np.ones(n, dtype=np.int64)
    active = np.ones(n, dtype=bool)
    inside = np.ones(n, dtype=bool)

    if watch_kind != SEG_NONE:
        ex, _ = seg_excess(watch_kind, watch_p, t, z)
        out = ex > 0.0
        status[out] = ST_LEFT_WATCH
        active &= ~out
    if seg_kind != SEG_NONE:
        ex, fc = seg_excess(seg_kind, seg_p, t, z)
        out = active & (ex > 0.0)
        inside[out] = False
        n_exits[out] = 1
        t_exit[out] = t[out]
        z_exit[out] = z[out]
        face_exit[out] = fc[out]
        if stop_on_exit:
            status[out] = ST_EXITED
            active &= ~out

    k1 = vfield(t, z, kappa, n_param)
    while True:
        active &= t < t1
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        ti, zi, k1i = t[idx], z[idx], k1[idx]
        if node_dt > 0.0:
            target = np.minimum(t0[idx] + j_next[idx] * node_dt, t1[idx])
        else:
            target = t1[idx]
        htry = h[idx].copy()
        hit = htry >= target - ti
        htry[hit] = (target - ti)[hit]
        z5, err, k7 = _dp_step(ti, zi, htry, k1i, kappa, n_param)
        steps[idx] += 1

        over = steps[idx] > max_steps
        status[idx[over]] = ST_MAXSTEPS
        active[idx[over]] = False

        bad = ~over & ~(np.isfinite(z5.real) & np.isfinite(z5.imag) & np.isfinite(err))
        dead = bad & (htry < 1e-14)
        status[idx[dead]] = ST_NONFINITE
        active[idx[dead]] = False
        shrink = bad & ~dead
        h[idx[shrink]] = htry[shrink] * FAC_MIN

        ok = ~over & ~bad
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            scale = tol * (1.0 + np.maximum(np.abs(zi), np.abs(z5)))
            ratio = np.where(ok, err / (scale * htry), 0.0)
            fac = np.where(ratio > 0.0, SAFETY * ratio ** -0.25, FAC_MAX)
        rej = ok & (ratio > 1.0)
        hrej = htry * np.maximum(FAC_MIN, fac)
        h[idx[rej]] = hrej[rej]
        tiny = rej & (hrej < 1e-14)
        status[idx[tiny]] = ST_NONFINITE
        active[idx[tiny]] = False

        acc = ok & ~rej
        if not acc.any():
            continue
        a = idx[acc]
        tprev, zprev, k1prev = ti[acc], zi[acc], k1i[acc]
        hit_a = hit[acc]
        tnew = np.where(hit_a, target[acc], tprev + htry[acc])
        if node_dt > 0.0:
            j_next[a] += (hit_a & (target[acc] < t1[a])).astype(np.int64)
        t[a] = tnew
        z[a] = z5[acc]
        k1[a] = k7[acc]
        h[a] = np.minimum(hmax, htry[acc] * np.minimum(FAC_MAX, np.maximum(FAC_MIN, fac[acc])))

        if seg_kind != SEG_NONE:
            ex, fc = seg_excess(seg_kind, seg_p, tnew, z[a])
            now_in = ex <= 0.0
            crossed = inside[a] & ~now_in
            n_exits[a[crossed]] += 1
            first = crossed & (n_exits[a] == 1)
            if first.any():
                tp, zp, kp = tprev[first], zprev[first], k1prev[first]
                lo = np.zeros(tp.size)
                hi = tnew[first] - tp
                live = hi - lo > BISECT_TOL
                while live.any():
                    mid = 0.5 * (lo + hi)
                    zm, _, _ = _dp_step(tp, zp, mid, kp, kappa, n_param)
                    exm, _ = seg_excess(seg_kind, seg_p, tp + mid, zm)
                    go_lo = live & (exm <= 0.0)
                    go_hi = live & ~(exm <= 0.0)
                    lo = np.where(go_lo, mid, lo)
                    hi = np.where(go_hi, mid, hi)
                    live = hi - lo > BISECT_TOL
                zx, _, _ = _dp_step(tp, zp, hi, kp, kappa, n_param)
                _, fx = seg_excess(seg_kind, seg_p, tp + hi, zx)
                af = a[first]
                t_exit[af] = tp + hi
                z_exit[af] = zx
                face_exit[af] = fx
            if stop_on_exit:
                status[a[crossed]] = ST_EXITED
                active[a[crossed]] = False
            inside[a] = now_in
        live_a = active[a]
        esc = live_a & (np.abs(z[a]) > bailout)
        status[a[esc]] = ST_ESCAPE
        active[a[esc]] = False
        if watch_kind != SEG_NONE:
            live_a = active[a]
            ex, _ = seg_excess(watch_kind, watch_p, t[a], z[a])
            lw = live_a & (ex > 0.0)
            status[a[lw]] = ST_LEFT_WATCH
            active[a[lw]] = False
    return z, t, h, status, n_exits, t_exit, z_exit, face_exit, steps
