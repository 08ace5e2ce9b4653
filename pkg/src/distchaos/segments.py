"""Periodic isolating segments built from octagons and squares.

B(s) = {z : Re(e^{-ik pi/4} z) <= s, k = 0..7}.  Faces with even k are exit
faces, odd k entrance faces.  W rotates B(R) at rate kappa/4; U shrinks
B(R) to B(r) and back; V(xi) = B(xi); E<k>(eta) is a square of half-width
eta around M P<k> in the local frame w = P<k>(z - M P<k>).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from . import kernels
from .errors import EscapeError, NumericError, ParameterError
from .ode import BAILOUT, DEFAULT_TOL, ProcessParams, cube_roots, vector_field

R_OUTER = 1.5
R_INNER = 0.568
DELTA = 10.6
TAN8 = math.tan(math.pi / 8)
SEC8 = 1.0 / math.cos(math.pi / 8)
OCT_NORMALS = np.exp(1j * np.pi * np.arange(8) / 4)
SQ_NORMALS = np.array([1, 1j, -1, -1j])


@dataclass(frozen=True)
class SProfile:
    """s(t): R - omega t on [0, delta], r on the plateau, R - omega (T - t) at the end."""

    period: float
    r: float = R_INNER
    R: float = R_OUTER
    delta: float = DELTA

    def __post_init__(self):
        if not 0 < self.r < self.R:
            raise ParameterError("need 0 < r < R")
        if not 0 < self.delta < self.period / 2:
            raise ParameterError(
                f"delta = {self.delta} must lie in (0, T/2) with T = {self.period:.6g}")

    @property
    def omega(self) -> float:
        return (self.R - self.r) / self.delta

    def s(self, t):
        tt = np.mod(t, self.period)
        out = np.where(tt <= self.delta, self.R - self.omega * tt,
                       np.where(tt >= self.period - self.delta,
                                self.R - self.omega * (self.period - tt), self.r))
        return float(out) if np.ndim(out) == 0 else out

    def ds(self, t):
        """Boundary normal speed s'(t) (one-sided values at the kinks are not sampled)."""
        tt = np.mod(t, self.period)
        out = np.where(tt < self.delta, -self.omega,
                       np.where(tt > self.period - self.delta, self.omega, 0.0))
        return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class Segment:
    kind: str                   # "W", "U", "V" or "E"
    period: float
    kappa: float = 0.0
    R: float = R_OUTER
    profile: SProfile | None = None
    xi: float = 0.0
    k: int = 0
    eta: float = 0.0
    m_scale: float = 0.0
    name: str = field(default="", compare=False)

    @property
    def kernel_spec(self):
        if self.kind == "W":
            return kernels.SEG_W, [self.kappa, self.R, self.period]
        if self.kind == "U":
            pr = self.profile
            return kernels.SEG_U, [pr.r, pr.R, pr.delta, pr.period]
        if self.kind == "V":
            return kernels.SEG_V, [self.xi]
        c = cube_roots()[self.k]
        return kernels.SEG_E, [c.real, c.imag, self.eta, self.m_scale]

    @property
    def n_faces(self) -> int:
        return 4 if self.kind == "E" else 8

    @property
    def center(self) -> complex:
        return self.m_scale * cube_roots()[self.k] if self.kind == "E" else 0j


def segment_w(p: ProcessParams, R: float = R_OUTER) -> Segment:
    return Segment("W", p.period, kappa=p.kappa, R=R, name="W")


def segment_u(p: ProcessParams, r: float = R_INNER, R: float = R_OUTER,
              delta: float = DELTA) -> Segment:
    return Segment("U", p.period, profile=SProfile(p.period, r, R, delta), name="U")


def segment_v(xi: float, p: ProcessParams) -> Segment:
    if xi <= 0:
        raise ParameterError("xi must be positive")
    return Segment("V", p.period, xi=xi, name=f"V({xi:.6g})")


def segment_e(k: int, eta: float, p: ProcessParams) -> Segment:
    if k not in (0, 1, 2):
        raise ParameterError("k must be 0, 1 or 2")
    if eta <= 0 or p.n_param <= 0:
        raise ParameterError("E<k>(eta) needs eta > 0 and N > 0")
    return Segment("E", p.period, k=k, eta=eta, m_scale=p.m_scale, name=f"E<{k}>({eta:.6g})")


# --- membership and faces ---------------------------------------------------

def _frame(seg: Segment, t, z):
    """Coordinates in which the section is a fixed octagon or square."""
    z = np.asarray(z, dtype=np.complex128)
    if seg.kind == "W":
        return z * np.exp(-1j * np.mod(t, seg.period) * seg.kappa / 4)
    if seg.kind == "E":
        c = cube_roots()[seg.k]
        return c * (z - seg.m_scale * c)
    return z


def _size(seg: Segment, t):
    if seg.kind == "W":
        return np.full(np.shape(t), seg.R)
    if seg.kind == "U":
        return np.asarray(seg.profile.s(t), dtype=np.float64)
    if seg.kind == "V":
        return np.full(np.shape(t), seg.xi)
    return np.full(np.shape(t), seg.eta)


def face_values(seg: Segment, t, z):
    """Per-face support values minus the section size: [..., n_faces]."""
    w = _frame(seg, t, z)
    normals = SQ_NORMALS if seg.kind == "E" else OCT_NORMALS
    s = np.broadcast_to(_size(seg, t), w.shape)
    return (w[..., None] * np.conj(normals)).real - s[..., None]


def excess(seg: Segment, t, z):
    kind, prm = seg.kernel_spec
    return kernels.seg_excess(kind, prm, t, z)


def contains(seg: Segment, t, z):
    ex, _ = excess(seg, t, z)
    return bool(ex <= 0) if np.ndim(ex) == 0 else ex <= 0


def is_exit_face(face) -> bool:
    return face % 2 == 0


@dataclass(frozen=True)
class FaceClass:
    faces: tuple            # one face, or two at a corner
    cls: str                # "exit", "entrance" or "corner"
    component: int | None   # exit component 1..4 for octagonal segments

    @property
    def corner(self) -> bool:
        return len(self.faces) > 1


def classify_boundary(seg: Segment, t: float, z: complex, tol: float = 1e-12):
    """'interior', 'outside' or the FaceClass of a boundary point."""
    vals = face_values(seg, t, z)
    top = float(vals.max())
    if top < -tol:
        return "interior"
    if top > tol:
        return "outside"
    active = tuple(int(f) for f in np.flatnonzero(vals >= top - 2 * tol))
    if len(active) > 1:
        return FaceClass(active, "corner", None)
    f = active[0]
    comp = f // 2 + 1 if is_exit_face(f) and seg.kind != "E" else None
    return FaceClass((f,), "exit" if is_exit_face(f) else "entrance", comp)


def outward_normal(seg: Segment, t, face):
    face = np.asarray(face)
    if seg.kind == "E":
        return np.conj(cube_roots()[seg.k]) * SQ_NORMALS[face]
    n = OCT_NORMALS[face]
    if seg.kind == "W":
        n = n * np.exp(1j * np.mod(t, seg.period) * seg.kappa / 4)
    return n


def boundary_normal_speed(seg: Segment, t, z, face):
    """<u_b, n>: normal speed of the moving boundary itself."""
    if seg.kind == "W":
        ub = 1j * seg.kappa / 4 * np.asarray(z)
        return (ub * np.conj(outward_normal(seg, t, face))).real
    if seg.kind == "U":
        return seg.profile.ds(t) * np.ones(np.shape(z))
    return np.zeros(np.shape(z))


def margins(seg: Segment, p: ProcessParams, t, z, face):
    """Signed transversality margin; positive means the face is crossed the right way."""
    v = vector_field(t, z, p)
    n = outward_normal(seg, t, face)
    rel = (v * np.conj(n)).real - boundary_normal_speed(seg, t, z, face)
    return np.where(np.asarray(face) % 2 == 0, rel, -rel)


def boundary_points(seg: Segment, t, face, tau):
    """Point at parameter tau in (0, 1) along the given face at time t."""
    t = np.asarray(t, dtype=np.float64)
    face = np.asarray(face)
    tau = np.asarray(tau, dtype=np.float64)
    s = _size(seg, t)
    if seg.kind == "E":
        nw = SQ_NORMALS[face]
        w = s * (nw + (2 * tau - 1) * 1j * nw)
        c = cube_roots()[seg.k]
        return np.conj(c) * w + seg.m_scale * c
    nw = OCT_NORMALS[face]
    w = s * nw * (1 + (2 * tau - 1) * TAN8 * 1j)
    if seg.kind == "W":
        w = w * np.exp(1j * np.mod(t, seg.period) * seg.kappa / 4)
    return w


def octagon_vertices(s) -> np.ndarray:
    return s * SEC8 * np.exp(1j * np.pi * (2 * np.arange(8) + 1) / 8)


def corner_point(seg: Segment, t: float, j: int) -> complex:
    """Vertex between faces j and j+1 (mod the face count)."""
    if seg.kind == "E":
        c = cube_roots()[seg.k]
        w = seg.eta * (1 + 1j) * 1j ** j
        return complex(np.conj(c) * w + seg.m_scale * c)
    v = octagon_vertices(float(_size(seg, t)))[j]
    if seg.kind == "W":
        v *= np.exp(1j * (t % seg.period) * seg.kappa / 4)
    return complex(v)


# --- transversality -----------------------------------------------------------

@dataclass
class TransversalityReport:
    segment: str
    face: np.ndarray
    t: np.ndarray
    z: np.ndarray
    margin: np.ndarray

    @property
    def violations(self) -> np.ndarray:
        return np.flatnonzero(~(self.margin > 0))

    @property
    def violation_count(self) -> int:
        return int(self.violations.size)

    @property
    def min_margin(self) -> float:
        return float(self.margin.min())

    def min_margin_per_face(self) -> dict:
        return {int(f): float(self.margin[self.face == f].min()) for f in np.unique(self.face)}

    def rows(self):
        for f, t, z, m in zip(self.face, self.t, self.z, self.margin):
            yield self.segment, int(f), float(t), float(z.real), float(z.imag), float(m)

    def write_csv(self, path, append: bool = False) -> None:
        with open(path, "a" if append else "w", newline="") as fh:
            w = csv.writer(fh)
            if not append:
                w.writerow(["segment", "face", "t", "re", "im", "margin"])
            for seg, f, t, re_, im_, m in self.rows():
                w.writerow([seg, f, repr(t), repr(re_), repr(im_), repr(m)])


def sample_boundary(seg: Segment, samples: int, seed: int):
    """Low-discrepancy (t, face, tau) samples; corners and ramp kinks excluded."""
    if samples < 1:
        raise ParameterError("samples must be >= 1")
    u = qmc.Halton(d=3, scramble=True, seed=seed).random(samples)
    t = u[:, 0] * seg.period
    face = np.minimum((u[:, 1] * seg.n_faces).astype(np.int64), seg.n_faces - 1)
    tau = np.clip(u[:, 2], 1e-9, 1 - 1e-9)
    return t, face, tau


def transversality_report(seg: Segment, p: ProcessParams, samples: int, seed: int = 0):
    t, face, tau = sample_boundary(seg, samples, seed)
    z = boundary_points(seg, t, face, tau)
    return TransversalityReport(seg.name or seg.kind, face, t, z, margins(seg, p, t, z, face))


def margin_infimum(seg: Segment, p: ProcessParams, t_grid: int = 2001, tau_grid: int = 2001):
    """Minimum margin per face on a tensor grid in (t, tau) that includes the
    face ends; the minima sit at the corners, which sampling never reaches."""
    ts = np.linspace(0.0, seg.period, t_grid)
    taus = np.linspace(0.0, 1.0, tau_grid)[None, :]
    out = {}
    for f in range(seg.n_faces):
        best = np.inf
        for chunk in np.array_split(ts, max(1, t_grid // 200)):
            t = chunk[:, None]
            z = boundary_points(seg, t, f, taus)
            best = min(best, float(margins(seg, p, t, z, np.full(z.shape, f)).min()))
        out[f] = best
    return out


# --- escape time ----------------------------------------------------------------

@dataclass(frozen=True)
class EscapeResult:
    stayed: bool
    time: float | None          # elapsed time until the first exit
    face: FaceClass | None
    status: str


def escape_time(z, seg: Segment, p: ProcessParams, t_max: float, t0: float = 0.0,
                tol: float = DEFAULT_TOL) -> EscapeResult:
    """First boundary crossing of the orbit through (t0, z), located by bisection."""
    kind, prm = seg.kernel_spec
    res = kernels.track(complex(z), t0, t0 + t_max, kappa=p.kappa, n_param=p.n_param, tol=tol,
                        hmax=p.hmax, seg=(kind, prm), stop_on_exit=True, bailout=BAILOUT)
    st = kernels.STATUS_NAMES[int(res.status[0])]
    if int(res.n_exits[0]) == 0:
        if st != "done":
            cls = EscapeError if st == "escape" else NumericError
            raise cls(f"orbit failed ({st}) before leaving {seg.name}")
        return EscapeResult(True, None, None, st)
    te = float(res.t_exit[0])
    f = int(res.face_exit[0])
    comp = f // 2 + 1 if is_exit_face(f) and seg.kind != "E" else None
    fc = FaceClass((f,), "exit" if is_exit_face(f) else "entrance", comp)
    return EscapeResult(False, te - t0, fc, st)


# --- G conditions ---------------------------------------------------------------

def _polygon_distance(seg: Segment, t, z):
    """Euclidean distance from z to the section seg_t (0 inside)."""
    w = _frame(seg, t, z)
    s = _size(seg, t)
    if seg.kind == "E":
        dx = np.maximum(np.abs(w.real) - s, 0.0)
        dy = np.maximum(np.abs(w.imag) - s, 0.0)
        return np.hypot(dx, dy)
    verts = s[..., None] * SEC8 * np.exp(1j * np.pi * (2 * np.arange(8) + 1) / 8)
    a = np.roll(verts, 1, axis=-1)          # edge k runs from vertex k-1 to vertex k
    b = verts
    ab = b - a
    wz = w[..., None]
    u = np.clip(((wz - a) * np.conj(ab)).real / np.abs(ab) ** 2, 0.0, 1.0)
    d = np.abs(wz - (a + u * ab)).min(axis=-1)
    inside = (w[..., None] * np.conj(OCT_NORMALS)).real.max(axis=-1) <= s
    return np.where(inside, 0.0, d)


def spacetime_distance(seg: Segment, t, z, window: float = 1.0, grid: int = 41):
    """rho((t, z), seg) in R x C, minimising over section times near t."""
    t = np.asarray(t, dtype=np.float64)
    z = np.asarray(z, dtype=np.complex128)
    dts = np.linspace(-window, window, grid)
    best = _polygon_distance(seg, t, z)
    for dt in dts:
        best = np.minimum(best, np.hypot(dt, _polygon_distance(seg, t + dt, z)))
    return best


@dataclass
class GReport:
    g1_pass: bool
    g1_worst_excess: float          # max over grid of W-excess of U's vertices (<= 0 passes)
    sections_equal_at_0: bool
    eta: float
    eta_w: float
    eta_u: float
    g2_samples: int
    g2_failures: int                # samples that never separated from the segment

    @property
    def passed(self) -> bool:
        return self.g1_pass and self.sections_equal_at_0 and self.eta > 0


def _g2_eta(seg: Segment, p: ProcessParams, samples: int, seed: int, tau_max: float,
            steps: int, tol: float):
    t, face, tau = sample_boundary(seg, 4 * samples, seed)
    keep = face % 2 == 0
    t, face, tau = t[keep][:samples], face[keep][:samples], tau[keep][:samples]
    z = boundary_points(seg, t, face, tau)
    best = np.zeros(z.size)
    alive = np.ones(z.size, dtype=bool)
    cur_t = t.copy()
    cur_z = z.copy()
    dt = tau_max / steps
    h = np.full(z.size, min(p.hmax, 1e-2))
    for _ in range(steps):
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        res = kernels.track(cur_z[idx], cur_t[idx], cur_t[idx] + dt, kappa=p.kappa,
                            n_param=p.n_param, tol=tol, hmax=p.hmax, h0=h[idx], bailout=BAILOUT)
        ok = res.status == kernels.ST_DONE
        valid = ok | (res.status == kernels.ST_ESCAPE)
        cur_t[idx] = res.t
        cur_z[idx] = res.z
        h[idx] = res.h
        # an orbit that re-enters before separating stops counting
        back = contains(seg, res.t, res.z) & valid
        zs = np.where(valid, res.z, 0)
        rho = np.where(valid & ~back, spacetime_distance(seg, res.t, zs), 0.0)
        best[idx] = np.maximum(best[idx], rho)
        alive[idx[~ok | back]] = False
    return best


def check_g_conditions(W: Segment, U: Segment, p: ProcessParams, grid: int = 2001,
                       samples: int = 500, seed: int = 0, tau_max: float = 2.0,
                       steps: int = 40, tol: float = DEFAULT_TOL) -> GReport:
    """(G1): U_t inside W_t on a time grid and U_0 = W_0.  (G2): orbits from
    exit points separate from the segment by a uniform eta."""
    if W.kind != "W" or U.kind != "U":
        raise ParameterError("check_g_conditions expects a W and a U segment")
    pr = U.profile
    ts = np.unique(np.concatenate([np.linspace(0, W.period, grid),
                                   [pr.delta, W.period - pr.delta]]))
    verts = octagon_vertices(np.asarray(pr.s(ts))[:, None])
    ex, _ = excess(W, np.repeat(ts, 8), verts.ravel())
    worst = float(ex.max())
    g1 = worst <= 1e-12
    # time-0 sections and their face classes coincide
    rng = np.random.default_rng(seed)
    zs = rng.uniform(-2, 2, 4000) + 1j * rng.uniform(-2, 2, 4000)
    same = bool(np.array_equal(contains(W, 0.0, zs), contains(U, 0.0, zs)))
    _, fw = excess(W, 0.0, zs)
    _, fu = excess(U, 0.0, zs)
    same = same and bool(np.array_equal(fw % 2, fu % 2))
    eta_w = _g2_eta(W, p, samples, seed, tau_max, steps, tol)
    eta_u = _g2_eta(U, p, samples, seed + 1, tau_max, steps, tol)
    fails = int((eta_w <= 0).sum() + (eta_u <= 0).sum())
    ew, eu = float(eta_w.min()), float(eta_u.min())
    return GReport(g1, worst, same, min(ew, eu), ew, eu, eta_w.size + eta_u.size, fails)
