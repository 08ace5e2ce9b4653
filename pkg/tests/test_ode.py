import csv

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from distchaos.errors import EscapeError, ParameterError
from distchaos.ode import (ProcessParams, center_bound, centers, composition_defect, cube_roots,
                          find_periodic_solutions, flow, orbit_center_distance, poincare,
                          trajectory, vector_field, write_fixed_points_csv)

P1 = ProcessParams(0.037, 0.001)
P0 = ProcessParams(0.037, 0.0)


def _field(t, z, p):
    return (1 + np.exp(1j * p.kappa * t) * abs(z) ** 2) * np.conj(z) ** 3 - p.n_param


def _reference(sigma, t, z, p):
    def rhs(s, y):
        v = _field(s, y[0] + 1j * y[1], p)
        return [v.real, v.imag]
    sol = solve_ivp(rhs, (sigma, sigma + t), [z.real, z.imag], method="DOP853",
                    rtol=1e-12, atol=1e-14)
    return sol.y[0, -1] + 1j * sol.y[1, -1]


@pytest.fixture(scope="module")
def fixed_points():
    return find_periodic_solutions(P1)


class TestParams:
    def test_period(self):
        assert P1.period == pytest.approx(2 * np.pi / 0.037)
        assert P1.m_scale == pytest.approx(0.1)

    def test_range(self):
        with pytest.raises(ParameterError):
            ProcessParams(0.3, 0.0)
        with pytest.raises(ParameterError):
            ProcessParams(0.037, -1e-4)
        assert ProcessParams(0.3, 0.0, allow_outside=True).kappa == 0.3

    def test_cube_roots(self):
        assert np.allclose(cube_roots() ** 3, 1)
        assert np.allclose(centers(P1) ** 3, 0.001)


class TestField:
    def test_formula(self):
        rng = np.random.default_rng(0)
        z = rng.normal(size=50) + 1j * rng.normal(size=50)
        t = rng.uniform(0, 200, 50)
        assert np.allclose(vector_field(t, z, P1), _field(t, z, P1), rtol=1e-14, atol=1e-15)

    def test_equilibria_n0(self):
        assert vector_field(3.0, 0j, P0) == 0


class TestFlow:
    @pytest.mark.parametrize("z", [0.15 + 0.1j, -0.2 + 0.05j, 0.03 - 0.18j])
    def test_against_solve_ivp(self, z):
        got = flow(1.5, 10.0, z, P1, tol=1e-11)
        assert abs(got - _reference(1.5, 10.0, z, P1)) < 1e-8

    def test_identity(self):
        assert flow(0.0, 0.0, 0.2 + 0.1j, P1) == 0.2 + 0.1j

    def test_backward_rejected(self):
        with pytest.raises(ParameterError):
            flow(0.0, -1.0, 0.1, P1)

    def test_escape(self):
        with pytest.raises(EscapeError) as info:
            flow(0.0, 100.0, 1.4 + 0j, P1)
        assert info.value.time < 100.0

    def test_quarter_turn_symmetry(self):
        # with N = 0, v(t, iz) = i v(t, z)
        z = 0.16 + 0.12j
        assert abs(flow(0.0, 10.0, 1j * z, P0) - 1j * flow(0.0, 10.0, z, P0)) < 1e-9

    def test_periodicity(self):
        z = 0.15 - 0.1j
        a = flow(2.0, 10.0, z, P1, tol=1e-11)
        b = flow(2.0 + P1.period, 10.0, z, P1, tol=1e-11)
        assert abs(a - b) < 1e-9

    def test_composition(self):
        rng = np.random.default_rng(1)
        z = 0.15 * (rng.uniform(-1, 1, 20) + 1j * rng.uniform(-1, 1, 20))
        d = composition_defect(rng.uniform(0, 50, 20), 4.0, 6.0, z, P1, tol=1e-10)
        d = d[np.isfinite(d)]
        assert d.size > 10 and d.max() < 1e-7

    def test_trajectory_endpoints(self):
        ts, zs = trajectory(0.1 + 0.1j, P1, 0.0, 30.0, samples=31)
        assert ts[-1] == 30.0
        assert abs(zs[-1] - flow(0.0, 30.0, 0.1 + 0.1j, P1)) < 1e-8


class TestPeriodic:
    def test_three_points(self, fixed_points):
        assert len(fixed_points) == 3
        assert sorted(s.k for s in fixed_points) == [0, 1, 2]
        for s in fixed_points:
            assert abs(poincare(s.z, P1, 1e-11) - s.z) <= 1e-9
            assert s.residual <= 1e-9
        zs = [s.z for s in fixed_points]
        assert min(abs(a - b) for i, a in enumerate(zs) for b in zs[i + 1:]) > 0.05

    def test_near_centers(self, fixed_points):
        cs = centers(P1)
        bound = center_bound(P1)
        for s in fixed_points:
            assert abs(s.z - cs[s.k]) < bound
            assert s.max_center_distance <= bound
            assert orbit_center_distance(s.z, cs[s.k], P1) == pytest.approx(
                s.max_center_distance, rel=1e-3)

    def test_n0(self):
        sols = find_periodic_solutions(P0)
        assert len(sols) == 1
        assert abs(sols[0].z) <= 1e-8
        assert abs(poincare(0j, P0)) == 0.0

    def test_csv(self, fixed_points, tmp_path):
        write_fixed_points_csv(fixed_points, tmp_path / "f.csv")
        rows = list(csv.reader(open(tmp_path / "f.csv")))
        assert len(rows) == 4


class TestProcessAxioms:
    n = 1000

    @pytest.fixture
    def draws(self):
        rng = np.random.default_rng(12)
        n = self.n
        z = 0.25 * np.sqrt(rng.uniform(0, 1, n)) * np.exp(2j * np.pi * rng.uniform(0, 1, n))
        return rng.uniform(0, P1.period, n), rng.uniform(0, 5, n), rng.uniform(0, 5, n), z

    def test_composition_law(self, draws):
        sigma, s, t, z = draws
        d = composition_defect(sigma, s, t, z, P1, tol=1e-10)
        ok = np.isfinite(d)
        assert ok.sum() > 0.95 * self.n and np.nanmax(d) < 1e-7

    def test_periodicity(self, draws):
        from distchaos.ode import flow_batch
        sigma, s, _, z = draws
        a = flow_batch(sigma, s, z, P1, tol=1e-11)
        b = flow_batch(sigma + P1.period, s, z, P1, tol=1e-11)
        ok = (a.status == 0) & (b.status == 0)
        assert ok.sum() > 0.95 * self.n
        assert np.abs(a.z[ok] - b.z[ok]).max() < 1e-8

    def test_identity(self, draws):
        from distchaos.ode import flow_batch
        sigma, _, _, z = draws
        assert np.array_equal(flow_batch(sigma, np.zeros(self.n), z, P1).z, z)

    def test_cube_root_invariance(self):
        rng = np.random.default_rng(3)
        z = rng.normal(size=200) + 1j * rng.normal(size=200)
        t = rng.uniform(0, 300, 200)
        base = vector_field(t, z, P1)
        for c in cube_roots():
            assert np.allclose(vector_field(t, c * z, P1), base, rtol=1e-13, atol=1e-14)

    def test_fixed_points_separated(self, fixed_points):
        zs = [s.z for s in fixed_points]
        assert min(abs(a - b) for i, a in enumerate(zs) for b in zs[i + 1:]) >= P1.m_scale
