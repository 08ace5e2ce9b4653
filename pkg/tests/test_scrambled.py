import math

import numpy as np
import pytest

from distchaos.errors import ParameterError, StructureError
from distchaos.scrambled import (TraceSpec, build_distal_family, build_dc1_pair,
                                 build_invariant_sample, build_q_witness, build_z_n,
                                 check_q_conditions, distal_point, periodic_separation,
                                 trace_spec_point, write_stream)
from distchaos.shift import (Presentation, SoficShift, SymbolStream, build_pi_shift,
                             constant_stream, full_shift, specification_gap, stream_allowed,
                             word_allowed)
from distchaos.stats import classify_dc1, default_schedule, dyadic_thresholds, stream_distances

FULL = full_shift(2)
PI = build_pi_shift()


def _min_lag_distance(window, lag):
    """Brute-force min_i d(sigma^i z, sigma^(i+lag) z) over one window."""
    w = np.asarray(window)
    best = math.inf
    n = w.size - lag
    for i in range(n // 2):
        diff = np.flatnonzero(w[i:n] != w[i + lag:n + lag])
        best = min(best, 0.0 if diff.size == 0 else 2.0 ** -int(diff[0]))
    return best


class TestTrace:
    def test_full_shift_blocks(self):
        s = trace_spec_point(FULL, TraceSpec((("11", 0), ("00", 3)), 1), 8)
        assert str(s)[:2] == "11" and str(s)[3:5] == "00"

    def test_pi_blocks(self):
        g = specification_gap(PI)
        s = trace_spec_point(PI, TraceSpec((("1", 0), ("3", g + 1)), g), 30)
        assert str(s)[0] == "1" and str(s)[g + 1] == "3"
        assert stream_allowed(PI, s)

    def test_gap_too_small(self):
        with pytest.raises(ParameterError):
            trace_spec_point(PI, TraceSpec((("1", 0), ("3", 2)), 1), 10)

    def test_overlapping_blocks(self):
        with pytest.raises(ParameterError):
            TraceSpec((("111", 0), ("0", 3)), 1)


class TestDistal:
    def test_full_shift_n1(self):
        d = distal_point(FULL, 1)
        z = d.materialize(2, 400)
        assert str(z).startswith("0" * d.block_length + "1" * d.block_length)
        assert _min_lag_distance(z.window, 1) >= 2.0 ** -d.block_length
        assert d.separation == _min_lag_distance(z.window, 1)

    def test_divisible_block(self):
        g = specification_gap(PI)
        assert distal_point(PI, g).block_length == g

    @pytest.mark.parametrize("n", range(1, 9))
    def test_pi_family_allowed_and_distal(self, n):
        d = distal_point(PI, n)
        z = d.materialize(5, 600)
        assert stream_allowed(PI, z)
        assert d.block_length % n == 0
        assert d.separation > 0
        assert d.separation == _min_lag_distance(z.window, n)

    def test_p_equals_q(self):
        with pytest.raises(ParameterError):
            build_z_n(FULL, (0,), (0,), 1, 100)

    def test_family_eps(self):
        fam = build_distal_family(FULL, 8, 2 ** 14)
        n_big = max(d.block_length for d in fam.details.values())
        assert fam.eps >= 2.0 ** -(n_big + 1)
        assert fam.eps == min(_min_lag_distance(z.window[:2000], n) for n, z in fam.points.items())

    def test_separation_oracle(self):
        w = np.array([0, 0, 1, 1])
        assert periodic_separation(w, [1]) == _min_lag_distance(np.resize(w, 64), 1)
        assert periodic_separation(w, [4]) == 0.0

    def test_no_zero_loop(self):
        s = SoficShift(Presentation(1, ((0, 0, 1), (0, 0, 2))), 3)
        with pytest.raises(StructureError):
            build_dc1_pair(s, 5000)


class TestQWitness:
    def test_fixed_point_trace(self):
        x = constant_stream(1, 2, 64)
        y = SymbolStream(2, np.tile([0, 1], 32))
        w = build_q_witness(FULL, None, x, y, m=1, n=0, horizon=2 ** 10)
        assert w.l == w.s
        assert check_q_conditions(w, [0], 0, 1)
        assert np.all(w.x.window[w.l:w.l + (1 << w.l)] == 0)

    def test_x_equals_y(self):
        fam = build_distal_family(FULL, 1, 2 ** 12)
        x = constant_stream(0, 2, 64)
        w = build_q_witness(FULL, fam, x, x, m=2, n=1, horizon=2 ** 16)
        assert w.x != w.y
        assert check_q_conditions(w, fam.details[1].period_word, 1, 2)
        assert stream_allowed(FULL, w.x) and stream_allowed(FULL, w.y)

    def test_pi_witness(self):
        # with n > 0 the second stretch has length 2^s, s > 2^l: keep n = 0 here
        x = SymbolStream(5, "1122")
        y = SymbolStream(5, "0033")
        w = build_q_witness(PI, None, x, y, m=2, n=0, horizon=2 ** 9, prefix_len=4)
        assert str(w.x).startswith("1122") and str(w.y).startswith("0033")
        assert check_q_conditions(w, [0], 0, 2)
        assert stream_allowed(PI, w.x) and stream_allowed(PI, w.y)

    def test_horizon_too_small(self):
        x = constant_stream(0, 2, 64)
        with pytest.raises(ParameterError, match="need at least"):
            build_q_witness(FULL, None, x, x, m=4, n=0, horizon=30)


class TestDC1:
    thr = dyadic_thresholds()

    @pytest.mark.parametrize("shift", [FULL, PI], ids=["full2", "pi"])
    def test_pair_is_dc1(self, shift):
        x, y, eps = build_dc1_pair(shift)
        assert stream_allowed(shift, x) and stream_allowed(shift, y)
        v = classify_dc1(x, y, eps, self.thr, default_schedule(18), 0.05)
        assert v.is_dc1_empirical
        # separated through the last separation phase, up to its closing bridge
        n = default_schedule(18)[-1]
        d = stream_distances(x, y, n)
        assert (d[n - 300:n - 8] >= eps).all()
        # agreement up to the first boundary at 11
        assert all(d[i] <= 2.0 ** -(11 - i) for i in range(11))

    def test_full_eps(self):
        assert build_dc1_pair(FULL)[2] == 0.5

    def test_invariant_sample_small(self):
        sample = build_invariant_sample(FULL, 5, 2 ** 14, shifts=3)
        clo = sample.closure()
        h = min(s.horizon for s in clo.values())
        sched = default_schedule(13)
        keys = sorted(clo)
        for a in range(len(keys)):
            for b in range(a + 1, len(keys)):
                v = classify_dc1(clo[keys[a]].truncated(h), clo[keys[b]].truncated(h),
                                 sample.epsilon, self.thr, sched, 0.05)
                assert v.is_dc1_empirical, (keys[a], keys[b])
        assert all(word_allowed(FULL, s.window) for s in sample.points)

    def test_certificate_file(self, tmp_path):
        sample = build_invariant_sample(FULL, 2, 2 ** 12, shifts=0)
        write_stream(sample.points[0], tmp_path / "p.txt", sample.certificate())
        meta = dict(line.split("=", 1) for line in
                    (tmp_path / "p.txt.meta").read_text().splitlines())
        assert float(meta["epsilon"]) == sample.epsilon
        assert (tmp_path / "p.txt").read_text().strip() == str(sample.points[0])

    def test_bad_count(self):
        with pytest.raises(ParameterError):
            build_invariant_sample(FULL, 1)


def test_deterministic():
    a = build_invariant_sample(PI, 3, 2 ** 12, shifts=1)
    b = build_invariant_sample(PI, 3, 2 ** 12, shifts=1)
    assert a.points == b.points and a.certificate() == b.certificate()
    assert all(stream_allowed(PI, s) for s in a.points)
