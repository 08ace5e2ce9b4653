"""Finite-horizon distributional-chaos statistics.

phi_n(t) is the fraction of the first n orbit distances below t.  The
liminf/limsup over n are estimated by the min/max over a horizon schedule.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DimensionError, ParameterError
from .shift import SymbolStream

DEFAULT_TOL = 0.05


def default_schedule(l_max: int = 18, l_min: int = 1) -> np.ndarray:
    """Horizons n_l = l + 2**l."""
    ls = np.arange(l_min, l_max + 1)
    return ls + (1 << ls)


def dyadic_thresholds(k_max: int = 10) -> np.ndarray:
    """{2^-k : k = 0..k_max}, increasing."""
    return np.exp2(-np.arange(k_max, -1, -1, dtype=np.float64))


def ode_thresholds(diameter: float, count: int = 12, t_min: float = 1e-3) -> np.ndarray:
    return np.geomspace(t_min, diameter, count)


def _as_series(series) -> np.ndarray:
    d = np.asarray(series, dtype=np.float64)
    if d.ndim != 1 or d.size == 0:
        raise DimensionError("distance series must be a nonempty 1-D sequence")
    if not np.isfinite(d).all() or (d < 0).any():
        raise ParameterError("distances must be finite and nonnegative")
    return d


def stream_distances(x: SymbolStream, y: SymbolStream, n: int | None = None) -> np.ndarray:
    """d_i = rho(sigma^i x, sigma^i y) for i < n on the common window.

    The distance at index i only sees the window tail from i on, so values
    near the end of the window are lower bounds of the true distances.
    """
    if x.alphabet_size != y.alphabet_size:
        raise DimensionError("streams over different alphabets")
    m = min(x.horizon, y.horizon)
    n = m if n is None else int(n)
    if n > m:
        raise DimensionError(f"horizon {n} exceeds window length {m}")
    return kernels.first_diff_distances(x.window[:m], y.window[:m], n)


def lagged_distances(x: SymbolStream, lag: int, n: int) -> np.ndarray:
    """d_i = rho(sigma^i x, sigma^(i+lag) x) for i < n."""
    if n + lag > x.horizon:
        raise DimensionError("lagged scan runs past the window")
    w = x.window
    return kernels.first_diff_distances(w[: x.horizon - lag], w[lag:], n)


def orbit_distances(xs, ys) -> np.ndarray:
    """Euclidean distances between two sampled orbits in the plane."""
    xs = np.asarray(xs)
    ys = np.asarray(ys)
    if xs.shape != ys.shape:
        raise DimensionError("orbits of different lengths")
    return np.abs(xs - ys).astype(np.float64)


def phi_n(series, t: float) -> float:
    d = _as_series(series)
    if not t > 0:
        raise ParameterError("threshold must be positive")
    return float(np.count_nonzero(d < t)) / d.size


def _prefix_frequencies(indicator: np.ndarray, schedule) -> np.ndarray:
    schedule = np.asarray(schedule, dtype=np.int64)
    if schedule.size == 0:
        raise DimensionError("empty schedule")
    if schedule.min() < 1 or schedule.max() > indicator.size:
        raise DimensionError(
            f"schedule reaches {int(schedule.max())} but sequence has {indicator.size} entries")
    c = np.cumsum(indicator, dtype=np.int64)
    return c[schedule - 1] / schedule


def upper_density(indicator, schedule) -> float:
    ind = np.asarray(indicator, dtype=bool)
    if ind.size == 0:
        raise DimensionError("empty sequence")
    return float(_prefix_frequencies(ind, schedule).max())


def lower_density(indicator, schedule) -> float:
    ind = np.asarray(indicator, dtype=bool)
    if ind.size == 0:
        raise DimensionError("empty sequence")
    return float(_prefix_frequencies(ind, schedule).min())


@dataclass(frozen=True)
class DCProfile:
    thresholds: np.ndarray      # increasing
    schedule: np.ndarray        # increasing
    phi_at: np.ndarray          # [threshold, horizon]
    phi_lower_est: np.ndarray
    phi_upper_est: np.ndarray

    def rows(self):
        for i, t in enumerate(self.thresholds):
            for j, n in enumerate(self.schedule):
                yield float(t), int(n), float(self.phi_at[i, j])

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["threshold", "horizon", "phi_n"])
            for t, n, v in self.rows():
                w.writerow([repr(t), n, repr(v)])


def profile(series, thresholds=None, schedule=None) -> DCProfile:
    d = _as_series(series)
    thresholds = dyadic_thresholds() if thresholds is None else thresholds
    thr = np.unique(np.asarray(thresholds, dtype=np.float64))
    if (thr <= 0).any():
        raise ParameterError("thresholds must be positive")
    sched = np.unique(np.asarray(default_schedule() if schedule is None else schedule,
                                 dtype=np.int64))
    if sched.max() > d.size:
        raise DimensionError(f"schedule reaches {int(sched.max())} but series has {d.size} entries")
    table = np.empty((thr.size, sched.size))
    for i, t in enumerate(thr):
        table[i] = _prefix_frequencies(d < t, sched)
    return DCProfile(thr, sched, table, table.min(axis=1), table.max(axis=1))


@dataclass(frozen=True)
class DC1Verdict:
    epsilon: float
    is_dc1_empirical: bool
    upper_witness: tuple     # (t, n, value): the threshold whose best phi is lowest
    lower_witness: tuple     # (epsilon, n, value): smallest phi at epsilon
    tol: float

    @property
    def evidence(self):
        return self.upper_witness, self.lower_witness

    def rows(self):
        for t, n, v in self.evidence:
            yield self.epsilon, self.is_dc1_empirical, t, n, v

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["epsilon", "is_dc1", "witness_t", "witness_n", "value"])
            for e, ok, t, n, v in self.rows():
                w.writerow([repr(e), int(ok), repr(t), n, repr(v)])


def classify_series(series, epsilon: float, thresholds=None, schedule=None,
                    tol: float = DEFAULT_TOL) -> DC1Verdict:
    if not 0 < tol < 0.5:
        raise ParameterError(f"tol must lie in (0, 0.5), got {tol}")
    prof = profile(series, thresholds, schedule)
    hits = np.flatnonzero(np.isclose(prof.thresholds, epsilon, rtol=1e-12, atol=0))
    if hits.size == 0:
        raise ParameterError(f"epsilon {epsilon} is not on the threshold grid")
    ie = int(hits[0])
    best = prof.phi_at.max(axis=1)
    iw = int(np.argmin(best))
    jw = int(np.argmax(prof.phi_at[iw]))
    je = int(np.argmin(prof.phi_at[ie]))
    upper = (float(prof.thresholds[iw]), int(prof.schedule[jw]), float(prof.phi_at[iw, jw]))
    lower = (float(prof.thresholds[ie]), int(prof.schedule[je]), float(prof.phi_at[ie, je]))
    ok = bool(best.min() >= 1 - tol and lower[2] <= tol)
    return DC1Verdict(float(prof.thresholds[ie]), ok, upper, lower, tol)


def classify_dc1(x, y, epsilon: float, thresholds=None, schedule=None,
                 tol: float = DEFAULT_TOL) -> DC1Verdict:
    """Empirical DC1 test of an orbit pair.

    ``x`` and ``y`` are SymbolStreams (shift metric) or equal-length arrays
    of planar states (Euclidean metric).
    """
    sched = np.asarray(default_schedule() if schedule is None else schedule)
    n = int(sched.max())
    if isinstance(x, SymbolStream) and isinstance(y, SymbolStream):
        if x.horizon != y.horizon:
            raise DimensionError("orbits of different lengths")
        d = stream_distances(x, y, n)
    else:
        d = orbit_distances(x, y)
        if d.size < n:
            raise DimensionError(f"orbit length {d.size} below schedule maximum {n}")
    return classify_series(d, epsilon, thresholds, sched, tol)

