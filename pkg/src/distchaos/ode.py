"""The time-periodic planar field v(t, z) = (1 + e^{i kappa t}|z|^2) conj(z)^3 - N,
its local process, Poincare map and T-periodic solutions."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import EscapeError, NumericError, ParameterError, SearchError

KAPPA_MAX = 0.037
N_MAX = 0.001
DEFAULT_TOL = 1e-9
BAILOUT = 10.0
CENTER_BOUND = 0.004 * math.sqrt(2.0)


@dataclass(frozen=True)
class ProcessParams:
    kappa: float = KAPPA_MAX
    n_param: float = N_MAX
    allow_outside: bool = False

    def __post_init__(self):
        if not self.kappa > 0:
            raise ParameterError("kappa must be positive")
        if self.n_param < 0:
            raise ParameterError("N must be nonnegative")
        if not self.allow_outside and (self.kappa > KAPPA_MAX or self.n_param > N_MAX):
            raise ParameterError(
                f"(kappa, N) = ({self.kappa}, {self.n_param}) outside 0 < kappa <= {KAPPA_MAX}, "
                f"0 <= N <= {N_MAX}; set allow_outside to explore")

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.kappa

    @property
    def m_scale(self) -> float:
        return self.n_param ** (1.0 / 3.0)

    @property
    def hmax(self) -> float:
        return self.period / 100.0


def cube_roots() -> np.ndarray:
    """P<k> = e^{2 pi i k / 3}, k = 0, 1, 2."""
    return np.exp(2j * np.pi * np.arange(3) / 3)


def centers(p: ProcessParams) -> np.ndarray:
    return p.m_scale * cube_roots()


def vector_field(t, z, p: ProcessParams):
    out = kernels.vfield(t, z, p.kappa, p.n_param)
    return complex(out) if np.ndim(out) == 0 else out


def _raise_for(res, i=0):
    st = int(res.status[i])
    if st == kernels.ST_ESCAPE:
        raise EscapeError(f"orbit left |z| <= {BAILOUT} at t = {res.t[i]:.6g}",
                          time=float(res.t[i]), state=complex(res.z[i]))
    if st in (kernels.ST_NONFINITE, kernels.ST_MAXSTEPS):
        raise NumericError(f"integration failed ({kernels.STATUS_NAMES[st]}) at t = {res.t[i]:.6g}")


def flow_batch(sigma, t, z, p: ProcessParams, tol: float = DEFAULT_TOL, bailout: float = BAILOUT):
    """phi_(sigma, t)(z) for arrays; returns the raw tracker result (no raising)."""
    if tol <= 0:
        raise ParameterError("tol must be positive")
    t = np.asarray(t, dtype=np.float64)
    if (t < 0).any():
        raise ParameterError("the process is evaluated forward in time only")
    sigma = np.asarray(sigma, dtype=np.float64)
    return kernels.track(z, sigma, sigma + t, kappa=p.kappa, n_param=p.n_param, tol=tol,
                         hmax=p.hmax, bailout=bailout)


def flow(sigma: float, t: float, z, p: ProcessParams, tol: float = DEFAULT_TOL,
         bailout: float = BAILOUT):
    """State at time sigma + t of the solution through z at time sigma."""
    scalar = np.ndim(z) == 0
    res = flow_batch(sigma, t, np.atleast_1d(z), p, tol, bailout)
    for i in range(res.status.size):
        _raise_for(res, i)
    return complex(res.z[0]) if scalar else res.z


def poincare(z, p: ProcessParams, tol: float = DEFAULT_TOL):
    return flow(0.0, p.period, z, p, tol)


def trajectory(z, p: ProcessParams, t0: float = 0.0, t1: float | None = None,
               samples: int = 1001, tol: float = DEFAULT_TOL):
    """Sample the solution through (t0, z) at ``samples`` equally spaced times."""
    t1 = t0 + p.period if t1 is None else t1
    ts = np.linspace(t0, t1, samples)
    zs = np.empty(samples, dtype=np.complex128)
    zs[0] = z
    cur = complex(z)
    h = min(p.hmax, 1e-2)
    for i in range(1, samples):
        res = kernels.track(cur, ts[i - 1], ts[i], kappa=p.kappa, n_param=p.n_param, tol=tol,
                            hmax=p.hmax, h0=h, bailout=BAILOUT)
        _raise_for(res)
        cur = complex(res.z[0])
        h = float(res.h[0])
        zs[i] = cur
    return ts, zs


def write_trajectory_csv(ts, zs, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "re", "im"])
        for t, z in zip(ts, zs):
            w.writerow([repr(float(t)), repr(float(z.real)), repr(float(z.imag))])


def composition_defect(sigma, s, t, z, p: ProcessParams, tol: float = DEFAULT_TOL):
    """|phi(sigma, s+t, z) - phi(sigma+s, t, phi(sigma, s, z))| for arrays."""
    sigma, s, t = (np.asarray(a, dtype=np.float64) for a in (sigma, s, t))
    whole = flow_batch(sigma, s + t, z, p, tol)
    mid = flow_batch(sigma, s, z, p, tol)
    two = flow_batch(sigma + s, t, mid.z, p, tol)
    ok = (whole.status == 0) & (mid.status == 0) & (two.status == 0)
    return np.where(ok, np.abs(whole.z - two.z), np.nan)


@dataclass(frozen=True)
class PeriodicSolution:
    k: int                      # sector: nearest M P<k>
    z: complex                  # initial value at t = 0
    residual: float             # |P_T(z) - z|
    max_center_distance: float  # max_t |psi(t) - M P<k>|
    iterations: int


def _newton(z0: complex, p: ProcessParams, tol: float, max_iter: int, target: float):
    def F(z):
        w = poincare(z, p, tol) - z
        return np.array([w.real, w.imag])

    z = complex(z0)
    f = F(z)
    for it in range(max_iter):
        nf = float(np.hypot(*f))
        if nf <= target:
            return z, nf, it
        h = 1e-7 * max(1.0, abs(z))
        J = np.empty((2, 2))
        J[:, 0] = (F(z + h) - f) / h
        J[:, 1] = (F(z + 1j * h) - f) / h
        try:
            dx = np.linalg.solve(J, -f)
        except np.linalg.LinAlgError as exc:
            raise SearchError(f"singular Jacobian at seed {z0}") from exc
        step = complex(dx[0], dx[1])
        lam = 1.0
        while lam > 1e-4:
            zn = z + lam * step
            try:
                fn = F(zn)
            except (EscapeError, NumericError):
                fn = None
            if fn is not None and np.hypot(*fn) < nf:
                break
            lam *= 0.5
        else:
            raise SearchError(f"damped Newton stalled from seed {z0} at residual {nf:.3g}")
        z, f = zn, fn
    nf = float(np.hypot(*f))
    if nf <= target:
        return z, nf, max_iter
    raise SearchError(f"no convergence from seed {z0} after {max_iter} iterations (residual {nf:.3g})")


def orbit_center_distance(z: complex, center: complex, p: ProcessParams, samples: int = 2001,
                          tol: float = DEFAULT_TOL) -> float:
    _, zs = trajectory(z, p, samples=samples, tol=tol)
    return float(np.abs(zs - center).max())


def find_periodic_solutions(p: ProcessParams, tol: float = 1e-11, max_iter: int = 40,
                            residual_target: float = 1e-10) -> list[PeriodicSolution]:
    """Fixed points of the Poincare map seeded at M P<k> (one at 0 when N = 0)."""
    cs = centers(p)
    seeds = [0j] if p.n_param == 0 else list(cs)
    found: list[PeriodicSolution] = []
    for seed in seeds:
        if p.n_param == 0:
            z, res, it = 0j, abs(poincare(0j, p, tol)), 0
        else:
            z, res, it = _newton(seed, p, tol, max_iter, residual_target)
        k = int(np.argmin(np.abs(cs - z)))
        if any(abs(z - s.z) < 1e-6 for s in found):
            continue
        dist = orbit_center_distance(z, cs[k], p, tol=tol)
        found.append(PeriodicSolution(k, z, res, dist, it))
    return found


def center_bound(p: ProcessParams) -> float:
    """0.004 sqrt(2) M (1 + 1e-3): the center-distance bound for the periodic orbits."""
    return CENTER_BOUND * p.m_scale * (1 + 1e-3)


def write_fixed_points_csv(sols, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "re", "im", "residual", "max_center_distance"])
        for s in sols:
            w.writerow([s.k, repr(s.z.real), repr(s.z.imag), repr(s.residual),
                        repr(s.max_center_distance)])
