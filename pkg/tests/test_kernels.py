"""Parity between the numba kernels and the numpy fallback."""

import os
import subprocess
import sys

import numpy as np
import pytest

from distchaos import kernels
from distchaos.kernels import _numpy_impl
from distchaos.ode import ProcessParams
from distchaos.segments import segment_u, segment_w
from distchaos.shift import all_words, build_pi_shift

nb = pytest.importorskip("distchaos.kernels._numba_impl")

P1 = ProcessParams(0.037, 0.001)


def _track_args(z0, t1, seg=None, watch=None, node_dt=0.0, stop=False):
    n = z0.size
    sk, sp = seg.kernel_spec if seg else (kernels.SEG_NONE, None)
    wk, wp = watch.kernel_spec if watch else (kernels.SEG_NONE, None)
    return (z0, np.zeros(n), np.full(n, t1), np.full(n, 1e-2), node_dt,
            int(sk), kernels._params(sp), int(wk), kernels._params(wp), stop,
            P1.kappa, P1.n_param, 1e-9, P1.hmax, 10.0, 10_000_000)


def test_advance_sets_parity():
    pi = build_pi_shift()
    mat = all_words(5, 6)
    lengths = np.random.default_rng(0).integers(0, 7, mat.shape[0])
    starts = np.full(mat.shape[0], pi.all_vertices, dtype=np.uint64)
    a = nb.advance_sets(starts, mat, lengths, pi.trans)
    b = _numpy_impl.advance_sets(starts, mat, lengths, pi.trans)
    assert np.array_equal(a, b)


def test_first_diff_parity():
    rng = np.random.default_rng(1)
    x = rng.integers(0, 2, 3000)
    y = x.copy()
    y[rng.integers(0, 3000, 40)] ^= 1
    assert np.array_equal(nb.first_diff_distances(x, y, 2500),
                          _numpy_impl.first_diff_distances(x, y, 2500))


def test_seg_excess_parity():
    rng = np.random.default_rng(2)
    z = rng.uniform(-2, 2, 200) + 1j * rng.uniform(-2, 2, 200)
    t = rng.uniform(0, 170, 200)
    for seg in (segment_w(P1), segment_u(P1)):
        k, p = seg.kernel_spec
        prm = kernels._params(p)
        ex_np, f_np = _numpy_impl.seg_excess(k, prm, t, z)
        for i in range(0, 200, 17):
            ex, f = nb.seg_excess(k, prm, t[i], z[i])
            assert ex == pytest.approx(ex_np[i], abs=1e-14) and f == f_np[i]


def test_track_parity_plain():
    z0 = np.array([0.1 + 0.05j, -0.12 + 0.02j, 0.05 - 0.1j])
    a = nb.track(*_track_args(z0, 20.0))
    b = _numpy_impl.track(*_track_args(z0, 20.0))
    assert np.array_equal(a[3], b[3])
    assert np.allclose(a[0], b[0], atol=1e-12)


def test_track_parity_segments():
    rng = np.random.default_rng(3)
    z0 = 0.9 * (rng.uniform(-1, 1, 30) + 1j * rng.uniform(-1, 1, 30))
    args = _track_args(z0, P1.period, segment_u(P1), segment_w(P1), P1.period / 1000)
    a = nb.track(*args)
    b = _numpy_impl.track(*args)
    assert np.array_equal(a[3], b[3])                  # status
    assert np.array_equal(a[4] > 0, b[4] > 0)          # exited at all
    both = (a[4] > 0) & (b[4] > 0)
    assert np.array_equal(a[7][both], b[7][both])      # exit face
    assert np.allclose(a[5][both], b[5][both], atol=1e-6)


def test_env_flag_selects_numpy():
    code = "from distchaos import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, DISTCHAOS_BACKEND="numpy")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "numpy"
    env["DISTCHAOS_BACKEND"] = "bogus"
    bad = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert bad.returncode != 0
