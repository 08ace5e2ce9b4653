"""Symbolic coding of orbits by exits from U, and survivor censuses.

Per period l the symbol is 0 if the orbit stays in U throughout, or k if its
first exit from U goes through the component E[k] (exit face 2(k-1)).  An
orbit that leaves W is no longer coded.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from . import kernels
from .errors import ParameterError
from .ode import BAILOUT, DEFAULT_TOL, ProcessParams, centers, poincare
from .segments import R_INNER, SEC8, contains, segment_u, segment_v, segment_w
from .shift import build_pi_shift, word_allowed, word_str

NODES_PER_PERIOD = 1000


@dataclass(frozen=True)
class Itinerary:
    symbols: tuple              # may end with the exit symbol of an unfinished period
    periods_covered: int        # fully completed periods
    terminated_by: str          # "completed", "left_W" or "escape"
    exits: tuple = ()           # U-crossings counted in each covered period

    @property
    def word(self) -> str:
        return word_str(self.symbols)

    def __str__(self) -> str:
        return f"{self.word}:{self.terminated_by}"


def itineraries(zs, n_periods: int, p: ProcessParams, tol: float = DEFAULT_TOL,
                stop_on_first_exit: bool = False) -> list[Itinerary]:
    """Code a batch of initial states at t = 0 over n_periods periods."""
    if n_periods < 0:
        raise ParameterError("n_periods must be >= 0")
    zs = np.atleast_1d(np.asarray(zs, dtype=np.complex128))
    W = segment_w(p)
    U = segment_u(p)
    if not np.all(contains(W, 0.0, zs)):
        raise ParameterError("initial states must lie in W_0")
    T = p.period
    wk, wp = W.kernel_spec
    uk, up = U.kernel_spec
    n = zs.size
    z = zs.copy()
    h = np.full(n, min(p.hmax, 1e-2))
    alive = np.ones(n, dtype=bool)
    symbols = [[] for _ in range(n)]
    exits = [[] for _ in range(n)]
    ends = ["completed"] * n
    for l in range(n_periods):
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        res = kernels.track(z[idx], l * T, (l + 1) * T, kappa=p.kappa, n_param=p.n_param,
                            tol=tol, hmax=p.hmax, h0=h[idx], node_dt=T / NODES_PER_PERIOD,
                            seg=(uk, up), watch=(wk, wp), bailout=BAILOUT)
        z[idx] = res.z
        h[idx] = res.h
        for j, i in enumerate(idx):
            st = int(res.status[j])
            if st == kernels.ST_DONE:
                ne = int(res.n_exits[j])
                symbols[i].append(0 if ne == 0 else int(res.face_exit[j]) // 2 + 1)
                exits[i].append(ne)
                if stop_on_first_exit and ne:
                    alive[i] = False
            else:
                alive[i] = False
                ends[i] = "left_W" if st == kernels.ST_LEFT_WATCH else "escape"
                if int(res.n_exits[j]):
                    # the U-exit of the unfinished period is still recorded
                    symbols[i].append(int(res.face_exit[j]) // 2 + 1)
    return [Itinerary(tuple(s), len(x), e, tuple(x)) for s, e, x in zip(symbols, ends, exits)]


def itinerary(z, n_periods: int, p: ProcessParams, tol: float = DEFAULT_TOL) -> Itinerary:
    return itineraries([z], n_periods, p, tol)[0]


@dataclass(frozen=True)
class SemiconjugacyReport:
    ok: bool
    word_z: str                 # g-word of z over n + 1 periods
    word_pz: str                # g-word of P_T z over n periods
    allowed: bool
    mismatch_at: int | None     # first period index where sigma g(z) and g(P_T z) differ


def verify_semiconjugacy(z, n_periods: int, p: ProcessParams, tol: float = DEFAULT_TOL,
                         shift=None) -> SemiconjugacyReport:
    """Check g(P_T z) = sigma g(z) symbol by symbol and Pi-allowedness."""
    shift = build_pi_shift() if shift is None else shift
    gz = itinerary(z, n_periods + 1, p, tol)
    if gz.terminated_by != "completed":
        raise ParameterError(f"itinerary of z ends early ({gz.terminated_by}) after "
                             f"{gz.periods_covered} periods")
    gpz = itinerary(poincare(z, p, tol), n_periods, p, tol)
    a, b = gz.symbols[1:], gpz.symbols
    mism = next((i for i, (u, v) in enumerate(zip(a, b)) if u != v), None)
    if mism is None and len(a) != len(b):
        mism = min(len(a), len(b))
    allowed = word_allowed(shift, gz.symbols) and word_allowed(shift, gpz.symbols)
    return SemiconjugacyReport(mism is None and allowed, gz.word, gpz.word, allowed, mism)


def sample_w0(count: int, p: ProcessParams, rng: np.random.Generator) -> np.ndarray:
    """Uniform samples from W_0 = B(R) by rejection from its bounding square."""
    W = segment_w(p)
    half = W.R * SEC8
    out = np.empty(0, dtype=np.complex128)
    while out.size < count:
        z = rng.uniform(-half, half, 2 * count) + 1j * rng.uniform(-half, half, 2 * count)
        out = np.concatenate([out, z[contains(W, 0.0, z)]])
    return out[:count]


def surviving_seeds(count: int, n_periods: int, p: ProcessParams, seed: int,
                    pool: int = 20000, max_pool: int = 5_000_000, tol: float = DEFAULT_TOL):
    """Rejection-sample W_0 seeds whose itinerary completes n_periods periods.

    Returns (seeds, candidates_drawn)."""
    rng = np.random.default_rng(seed)
    found = []
    drawn = 0
    while len(found) < count and drawn < max_pool:
        zs = sample_w0(pool, p, rng)
        drawn += zs.size
        its = itineraries(zs, n_periods, p, tol)
        found.extend(z for z, it in zip(zs, its) if it.terminated_by == "completed")
    return np.array(found[:count]), drawn


# --- census -------------------------------------------------------------------

@dataclass
class CensusReport:
    re: np.ndarray                  # cell centres (1-D axes)
    im: np.ndarray
    inside: np.ndarray              # cell centre in V(r)_0
    survived: np.ndarray
    exit_period: np.ndarray         # 1-based, 0 if survived or outside
    exit_component: np.ndarray      # 1..4, 0 if none
    clusters: list                  # dicts: size, centroid, nearest_center, distance
    n_periods: int
    shell_total: int = 0
    shell_left: int = 0
    evidence_note: str = field(default="finite-horizon survivors; evidence, not proof")

    @property
    def cluster_count(self) -> int:
        return len(self.clusters)

    @property
    def shell_all_left(self) -> bool:
        return self.shell_left == self.shell_total

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["re", "im", "survived", "exit_period", "exit_component"])
            for j, y in enumerate(self.im):
                for i, x in enumerate(self.re):
                    if self.inside[j, i]:
                        w.writerow([repr(float(x)), repr(float(y)), int(self.survived[j, i]),
                                    int(self.exit_period[j, i]), int(self.exit_component[j, i])])


def _track_exits(zs, n_periods: int, p: ProcessParams, tol: float):
    """First U-exit (period, component) within n_periods, or (0, 0) if none."""
    U = segment_u(p)
    uk, up = U.kernel_spec
    T = p.period
    res = kernels.track(zs, 0.0, n_periods * T, kappa=p.kappa, n_param=p.n_param, tol=tol,
                        hmax=p.hmax, node_dt=T / NODES_PER_PERIOD, seg=(uk, up),
                        stop_on_exit=True, bailout=BAILOUT)
    exited = res.n_exits > 0
    # orbits failing numerically before an exit count as having left
    failed = ~exited & (res.status != kernels.ST_DONE)
    period = np.where(exited, np.floor(np.nan_to_num(res.t_exit) / T).astype(np.int64) + 1, 0)
    comp = np.where(exited, res.face_exit // 2 + 1, 0)
    return ~(exited | failed), period, comp


def census_g_inverse_zero(p: ProcessParams, grid_resolution: int = 400, n_periods: int = 3,
                          shell_samples: int = 1000, seed: int = 0,
                          tol: float = DEFAULT_TOL) -> CensusReport:
    """Grid census over V(r)_0 of orbits that stay in U for n_periods periods."""
    if n_periods < 3:
        raise ParameterError("n_periods must be >= 3")
    if grid_resolution < 2:
        raise ParameterError("grid_resolution must be >= 2")
    r = R_INNER
    V = segment_v(r, p)
    edges = np.linspace(-r * SEC8, r * SEC8, grid_resolution + 1)
    ax = 0.5 * (edges[1:] + edges[:-1])
    X, Y = np.meshgrid(ax, ax)
    Z = X + 1j * Y
    inside = contains(V, 0.0, Z)
    surv = np.zeros(Z.shape, dtype=bool)
    per = np.zeros(Z.shape, dtype=np.int64)
    comp = np.zeros(Z.shape, dtype=np.int64)
    s, pe, co = _track_exits(Z[inside], n_periods, p, tol)
    surv[inside], per[inside], comp[inside] = s, pe, co

    labels, count = ndimage.label(surv, structure=np.ones((3, 3), dtype=int))
    cs = centers(p)
    clusters = []
    for lab in range(1, count + 1):
        cells = Z[labels == lab]
        cen = complex(cells.mean())
        d = np.abs(cs - cen)
        k = int(np.argmin(d))
        clusters.append({"size": int(cells.size), "centroid": cen, "nearest_center": k,
                         "distance": float(d[k])})

    # (U \ V(r))_0 shell: every start must leave U
    U = segment_u(p)
    rng = np.random.default_rng(seed)
    half = U.profile.R * SEC8
    shell = np.empty(0, dtype=np.complex128)
    while shell.size < shell_samples:
        z = rng.uniform(-half, half, 4 * shell_samples) + 1j * rng.uniform(-half, half, 4 * shell_samples)
        keep = contains(U, 0.0, z) & ~contains(V, 0.0, z)
        shell = np.concatenate([shell, z[keep]])
    shell = shell[:shell_samples]
    s_shell, _, _ = _track_exits(shell, n_periods, p, tol)
    return CensusReport(ax, ax.copy(), inside, surv, per, comp, clusters, n_periods,
                        int(shell.size), int((~s_shell).sum()))
