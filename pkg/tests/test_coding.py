import csv

import numpy as np
import pytest

from distchaos.coding import (census_g_inverse_zero, itineraries, itinerary, sample_w0,
                              surviving_seeds, verify_semiconjugacy)
from distchaos.errors import ParameterError
from distchaos.ode import ProcessParams, centers, find_periodic_solutions
from distchaos.segments import R_OUTER, contains, escape_time, segment_u, segment_w
from distchaos.shift import build_pi_shift, pi_rules_allow

P1 = ProcessParams(0.037, 0.001)
P0 = ProcessParams(0.037, 0.0)


@pytest.fixture(scope="module")
def psi():
    return find_periodic_solutions(P1)


class TestItinerary:
    def test_fixed_points_zero(self, psi):
        for s in psi:
            it = itinerary(s.z, 4, P1)
            assert it.word == "0000" and it.terminated_by == "completed"

    def test_origin_n0(self):
        it = itinerary(0j, 6, P0)
        assert str(it) == "000000:completed"

    @pytest.mark.parametrize("z,k", [(R_OUTER - 1e-6, 1), (1j * (R_OUTER - 1e-6), 2),
                                     (-(R_OUTER - 1e-6), 3)])
    def test_exit_face_start(self, z, k):
        it = itinerary(z, 2, P1)
        assert it.symbols[0] == k
        # escape-time oracle: the orbit leaves U at once through the same component
        r = escape_time(z, segment_u(P1), P1, 1.0)
        assert r.time < 1e-3 and r.face.component == k

    def test_outside_w0(self):
        with pytest.raises(ParameterError):
            itinerary(2.0 + 0j, 1, P1)

    def test_partial_period(self):
        it = itinerary(centers(P1)[0], 3, P1)
        assert it.terminated_by == "left_W"
        assert it.periods_covered == 1 and it.word == "01"

    def test_at_most_one_exit_per_period(self):
        rng = np.random.default_rng(7)
        zs = sample_w0(400, P0, rng)
        for it in itineraries(zs, 2, P0):
            assert all(n <= 1 for n in it.exits)


class TestSemiconjugacy:
    def test_psi(self, psi):
        rep = verify_semiconjugacy(psi[0].z, 4, P1)
        assert rep.ok and rep.word_pz == "0000"

    def test_needs_completed(self, psi):
        with pytest.raises(ParameterError):
            verify_semiconjugacy(psi[0].z, 12, P1)

    def test_survivors_n0(self):
        seeds, drawn = surviving_seeds(3, 3, P0, seed=11, pool=20000)
        assert seeds.size == 3
        pi = build_pi_shift()
        for z in seeds:
            rep = verify_semiconjugacy(z, 2, P0, shift=pi)
            assert rep.ok, rep
            assert pi_rules_allow(rep.word_z)


@pytest.fixture(scope="module")
def small():
    return census_g_inverse_zero(P0, grid_resolution=120, n_periods=3, shell_samples=200, seed=3)


class TestCensus:
    def test_n0_single_cluster(self, small):
        assert small.cluster_count == 1
        assert small.clusters[0]["distance"] < 0.02
        assert small.shell_all_left

    def test_grid_inside_v(self, small):
        X, Y = np.meshgrid(small.re, small.im)
        assert not (small.survived & ~small.inside).any()
        assert small.inside[len(small.im) // 2, len(small.re) // 2]
        assert np.array_equal(small.inside, small.inside[::-1, ::-1])
        assert (np.abs(X + 1j * Y)[small.survived] < 0.3).all()

    def test_csv(self, small, tmp_path):
        small.write_csv(tmp_path / "c.csv")
        rows = list(csv.reader(open(tmp_path / "c.csv")))
        assert rows[0] == ["re", "im", "survived", "exit_period", "exit_component"]
        assert len(rows) - 1 == int(small.inside.sum())

    def test_bad_periods(self):
        with pytest.raises(ParameterError):
            census_g_inverse_zero(P1, 10, n_periods=2)

    @pytest.mark.slow
    def test_n1_stray_survivors_are_transient(self):
        rep = census_g_inverse_zero(P1, 400, 3, 200, seed=0)
        assert rep.cluster_count <= 3
        ys, xs = np.nonzero(rep.survived)
        z = rep.re[xs] + 1j * rep.im[ys]
        far = np.array([np.abs(centers(P1) - w).min() > 0.02 for w in z], dtype=bool)
        # survivors away from the centers leave U within one more period
        if far.any():
            its = itineraries(z[far], 4, P1)
            assert all(it.terminated_by != "completed" or "0000" != it.word for it in its)


def test_sample_w0_inside():
    z = sample_w0(500, P1, np.random.default_rng(0))
    assert z.size == 500 and contains(segment_w(P1), 0.0, z).all()
