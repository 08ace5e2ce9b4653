"""Hot kernels, dispatched to numba or numpy according to ``DISTCHAOS_BACKEND``."""

import numpy as np

from .._accel import BACKEND
from . import _numpy_impl
from ._common import (  # noqa: F401
    PARAM_LEN, SEG_E, SEG_NONE, SEG_U, SEG_V, SEG_W, STATUS_NAMES, ST_DONE,
    ST_ESCAPE, ST_EXITED, ST_LEFT_WATCH, ST_MAXSTEPS, ST_NONFINITE,
)

if BACKEND == "numba":
    from . import _numba_impl as _impl
else:
    _impl = _numpy_impl

__all__ = ["BACKEND", "advance_sets", "first_diff_distances", "seg_excess", "vfield", "track",
           "TrackResult"]


def advance_sets(starts, words, lengths, trans):
    """Forward vertex-set bitmasks after reading each row of a padded word matrix."""
    return _impl.advance_sets(
        np.ascontiguousarray(starts, dtype=np.uint64),
        np.ascontiguousarray(words, dtype=np.int64),
        np.ascontiguousarray(lengths, dtype=np.int64),
        np.ascontiguousarray(trans, dtype=np.uint64),
    )


def first_diff_distances(x, y, n):
    return _impl.first_diff_distances(
        np.ascontiguousarray(x, dtype=np.int64), np.ascontiguousarray(y, dtype=np.int64), int(n)
    )


def seg_excess(kind, params, t, z):
    """Vectorised segment excess; always evaluated with numpy (cheap, not hot)."""
    return _numpy_impl.seg_excess(kind, np.asarray(params, dtype=np.float64), t, z)


def vfield(t, z, kappa, n_param):
    return _numpy_impl.vfield(np.asarray(t, dtype=np.float64), np.asarray(z, dtype=np.complex128),
                              kappa, n_param)


class TrackResult:
    """Arrays returned by :func:`track`, one entry per trajectory."""

    __slots__ = ("z", "t", "h", "status", "n_exits", "t_exit", "z_exit", "face_exit", "steps")

    def __init__(self, *arrays):
        for name, arr in zip(self.__slots__, arrays):
            setattr(self, name, arr)


def _params(p):
    out = np.zeros(PARAM_LEN, dtype=np.float64)
    if p is not None:
        p = np.asarray(p, dtype=np.float64)
        out[: p.size] = p
    return out


def track(z0, t0, t1, *, kappa, n_param, tol, hmax, h0=None, node_dt=0.0,
          seg=(SEG_NONE, None), watch=(SEG_NONE, None), stop_on_exit=False,
          bailout=10.0, max_steps=10_000_000):
    """Integrate a batch of states from t0 to t1, monitoring one segment.

    ``seg`` and ``watch`` are (kind, params) pairs.  Crossings of ``seg``
    are counted and the first one is located by bisection; leaving
    ``watch`` stops the trajectory.
    """
    z0 = np.atleast_1d(np.asarray(z0, dtype=np.complex128))
    n = z0.size
    t0 = np.broadcast_to(np.asarray(t0, dtype=np.float64), (n,)).copy()
    t1 = np.broadcast_to(np.asarray(t1, dtype=np.float64), (n,)).copy()
    if h0 is None:
        h0 = min(hmax, 1e-2)
    h0 = np.broadcast_to(np.asarray(h0, dtype=np.float64), (n,)).copy()
    res = _impl.track(
        z0, t0, t1, h0, float(node_dt),
        int(seg[0]), _params(seg[1]), int(watch[0]), _params(watch[1]),
        bool(stop_on_exit), float(kappa), float(n_param), float(tol), float(hmax),
        float(bailout), int(max_steps),
    )
    return TrackResult(*res)
