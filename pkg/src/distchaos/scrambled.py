"""Constructive distal points, dense-relation witnesses and DC1 pairs on
shifts with the specification property.

On a shift, tracing a point to accuracy 2^-L for a stretch of length B is
copying B + L symbols verbatim; bridges of the specification gap glue the
copied blocks together.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimensionError, ParameterError, StructureError
from .shift import (
    SoficShift, SymbolStream, as_word, bridge_between_sets, is_mixing,
    specification_gap, stream_allowed, word_allowed, word_str,
)
from .stats import lagged_distances

# phase boundaries of the DC1 construction sit at n_l = l + 2^l for these l
DC1_FIRST_LEVEL = 3
DC1_LEVEL_STEP = 5
DC1_MAX_LEVEL = 18
DC1_PAD = 64


def level_horizon(l: int) -> int:
    return l + (1 << l)


# --- tracing ----------------------------------------------------------------

@dataclass(frozen=True)
class TraceSpec:
    """Target words with start indices; consecutive blocks at least min_gap apart."""

    blocks: tuple
    min_gap: int

    def __post_init__(self):
        blocks = tuple((as_word(w), int(s)) for w, s in self.blocks)
        prev_end = None
        for w, s in blocks:
            if s < 0:
                raise ParameterError("block start must be >= 0")
            if prev_end is not None and s - prev_end < self.min_gap:
                raise ParameterError(
                    f"block at {s} starts {s - prev_end} after the previous one; need {self.min_gap}")
            prev_end = s + w.size
        object.__setattr__(self, "blocks", blocks)


def _extend_greedy(shift: SoficShift, mask: int, n: int):
    """Least continuation of length n from a vertex set."""
    out = np.empty(n, dtype=np.uint8)
    i = 0
    while i < n:
        for a in range(shift.alphabet_size):
            nxt = shift.step(mask, a)
            if nxt:
                break
        else:  # pragma: no cover - irreducible graphs have no sinks
            raise StructureError("dead end while extending a word")
        if nxt == mask:
            out[i:] = a
            return out, mask
        out[i] = a
        mask = nxt
        i += 1
    return out, mask


def trace_spec_point(shift: SoficShift, spec: TraceSpec, horizon: int) -> SymbolStream:
    """A stream containing each target verbatim at its start, bridged in between."""
    gap = specification_gap(shift)
    if spec.min_gap < gap:
        raise ParameterError(f"min_gap {spec.min_gap} is below the specification gap {gap}")
    out = np.empty(horizon, dtype=np.uint8)
    mask = shift.all_vertices
    pos = 0
    for w, start in spec.blocks:
        if start >= horizon:
            break
        w = as_word(w, shift.alphabet_size)
        target = shift.readable_from(w)
        if not target:
            raise StructureError(f"target word starting {word_str(w[:20])}... is not allowed")
        bridge, mask = bridge_between_sets(shift, mask, target, start - pos)
        out[pos:start] = bridge
        end = min(start + w.size, horizon)
        out[start:end] = w[: end - start]
        mask = shift.follow(mask, w[: end - start])
        if not mask:
            raise StructureError("bridged word is not allowed")  # pragma: no cover
        pos = end
    if pos < horizon:
        out[pos:], mask = _extend_greedy(shift, mask, horizon - pos)
    return SymbolStream(shift.alphabet_size, out, f"trace({len(spec.blocks)} blocks)")


# --- distal points ----------------------------------------------------------

def _default_pq(shift: SoficShift):
    loops = {c for a, b, c in shift.presentation.edges if a == b}
    if 0 not in loops:
        raise StructureError("no self-loop labelled 0: the fixed point 0^inf is missing")
    nonzero = sorted(c for c in loops if c != 0)
    if not nonzero:
        raise StructureError("no nonzero self-loop; pass q explicitly")
    return (0,), (nonzero[0],)


def _periodic_allowed(shift: SoficShift, word) -> bool:
    reps = np.tile(as_word(word), shift.vertex_count + 1)
    return word_allowed(shift, reps)


def _prefix(src, length: int) -> np.ndarray:
    """First ``length`` symbols of a stream or of a periodic word."""
    if isinstance(src, SymbolStream):
        if src.horizon < length:
            raise DimensionError(f"window of length {src.horizon} shorter than block {length}")
        return src.window[:length].astype(np.int64)
    return np.resize(as_word(src), length)


@dataclass(frozen=True)
class DistalPoint:
    """z_n as a periodic word together with its block data."""

    n: int
    period_word: np.ndarray
    block_length: int
    separation: float           # min_i d(sigma^i z, sigma^(i+n) z), exact

    def materialize(self, alphabet_size: int, horizon: int) -> SymbolStream:
        return SymbolStream(alphabet_size, np.resize(self.period_word, horizon),
                            f"z_{self.n}(N={self.block_length})")


def periodic_separation(word, lags) -> float:
    """min over i and lag of d(sigma^i z, sigma^(i+lag) z) for z = word^inf."""
    word = np.asarray(word, dtype=np.int64)
    p = word.size
    lags = np.atleast_1d(lags)
    big = np.resize(word, 3 * p + int(lags.max()))
    stream = SymbolStream(int(big.max()) + 1, big)
    sep = math.inf
    for lag in lags:
        if lag % p == 0:
            return 0.0
        sep = min(sep, float(lagged_distances(stream, int(lag), p).min()))
    return sep


def distal_point(shift: SoficShift, n: int, p=None, q=None) -> DistalPoint:
    """Alternate p- and q-blocks of length N (a multiple of n) periodically."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    if not is_mixing(shift):
        raise StructureError("shift is not mixing")
    dp, dq = _default_pq(shift) if p is None or q is None else (None, None)
    p = dp if p is None else p
    q = dq if q is None else q
    gap = specification_gap(shift)
    probe = max(64, gap + 1)
    pw, qw = _prefix(p, probe), _prefix(q, probe)
    diff = np.flatnonzero(pw != qw)
    if diff.size == 0:
        raise ParameterError("p and q agree on their windows; need d(p, q) > 0")
    l_sep = int(diff[0]) + 1
    nb = n * math.ceil(max(gap, l_sep) / n)
    word = np.concatenate([_prefix(p, nb), _prefix(q, nb)])
    if not _periodic_allowed(shift, word):
        # explicit cycle: copy blocks of length nb - gap, bridge back to the start vertex
        nb = n * math.ceil((gap + l_sep) / n)
        body = nb - gap
        pb, qb = _prefix(p, body), _prefix(q, body)
        start = shift.readable_from(pb)
        if not start:
            raise StructureError("p prefix is not allowed")
        v0 = start & -start
        m = shift.follow(v0, pb)
        b1, m = bridge_between_sets(shift, m, shift.readable_from(qb), gap)
        m = shift.follow(m, qb)
        b2, _ = bridge_between_sets(shift, m, v0, gap)
        word = np.concatenate([pb, b1, qb, b2])
    sep = periodic_separation(word, [n])
    if sep == 0:
        raise StructureError(f"z_{n} is n-periodic; choose other p, q")
    return DistalPoint(n, word.astype(np.int64), int(nb), sep)


def build_z_n(shift: SoficShift, p, q, n: int, horizon: int) -> SymbolStream:
    """z_n on the window [0, horizon); p, q default to 0^inf and a second fixed point."""
    return distal_point(shift, n, p, q).materialize(shift.alphabet_size, horizon)


@dataclass(frozen=True)
class DistalFamily:
    eps: float
    points: dict
    horizon: int
    details: dict = field(repr=False, default_factory=dict)


def build_distal_family(shift: SoficShift, n_max: int, horizon: int, p=None, q=None) -> DistalFamily:
    if shift.alphabet_size < 2:
        raise StructureError("need at least two symbols")
    details = {n: distal_point(shift, n, p, q) for n in range(1, n_max + 1)}
    eps = min(d.separation for d in details.values())
    points = {n: d.materialize(shift.alphabet_size, horizon) for n, d in details.items()}
    return DistalFamily(eps, points, horizon, details)


# --- dense-relation witnesses -------------------------------------------------

@dataclass(frozen=True)
class QWitness:
    x: SymbolStream
    y: SymbolStream
    l: int
    s: int
    agreement: int          # K: copied blocks agree this far beyond their end
    prefix_len: int


def build_q_witness(shift: SoficShift, family: DistalFamily | None, x: SymbolStream,
                    y: SymbolStream, m: int, n: int, horizon: int,
                    prefix_len: int | None = None) -> QWitness:
    """(x', y') near (x, y) realising both trace conditions for p = q = z_n.

    z_0 is the fixed point 0^inf.  Agreement on K = floor(log2 m) + 1
    symbols gives distance below 1/m.
    """
    if m < 1 or n < 0:
        raise ParameterError("need m >= 1 and n >= 0")
    for w in (x, y):
        if not stream_allowed(shift, w):
            raise StructureError("input point is not allowed")
    if n == 0:
        _default_pq(shift)
        pword = np.zeros(1, dtype=np.int64)
    else:
        if family is None or n not in family.details:
            raise ParameterError(f"family does not contain z_{n}")
        pword = family.details[n].period_word
    gap = specification_gap(shift)
    k = int(math.floor(math.log2(m))) + 1
    plen = m if prefix_len is None else int(prefix_len)
    if plen > min(x.horizon, y.horizon):
        raise DimensionError("prefix longer than the input windows")
    l = max(m + 1, plen + gap)
    len_l = (1 << l) + k
    s = l if n == 0 else l + n + len_l + gap
    len_s = (1 << s) + k
    need = max(l + n + len_l, s + n + len_s)
    if horizon < need:
        raise ParameterError(f"horizon {horizon} too small; need at least {need}")

    def p_seg(a, length):
        return np.resize(np.roll(pword, -(a % pword.size)), length)

    xb = [(x.window[:plen], 0), (p_seg(l, len_l), l + n)]
    yb = [(y.window[:plen], 0), (p_seg(l, len_l), l)]
    if n > 0:
        xb.append((p_seg(s, len_s), s))
        yb.append((p_seg(s, len_s), s + n))
    xs = trace_spec_point(shift, TraceSpec(tuple(xb), gap), horizon)
    ys = trace_spec_point(shift, TraceSpec(tuple(yb), gap), horizon)
    return QWitness(xs, ys, l, s, k, plen)


def check_q_conditions(w: QWitness, pword, n: int, m: int) -> bool:
    """Independent scan of both trace conditions at the certified l and s."""
    pword = np.asarray(pword, dtype=np.int64)

    def close(a, b):
        # d(a, b) < 1/m on the shift metric
        diff = np.flatnonzero(a != b)
        return diff.size == 0 or 2.0 ** -int(diff[0]) < 1.0 / m

    def p_at(i, length):
        return np.resize(np.roll(pword, -(i % pword.size)), length)

    x = w.x.window.astype(np.int64)
    y = w.y.window.astype(np.int64)
    look = int(math.floor(math.log2(m))) + 1
    for i in range(0, (1 << w.l) + 1):
        a = w.l + i
        if not close(x[a + n: a + n + look], p_at(a, look)):
            return False
        if not close(y[a: a + look], p_at(a, look)):
            return False
    for i in range(0, (1 << w.s) + 1):
        a = w.s + i
        if not close(x[a: a + look], p_at(a, look)):
            return False
        if not close(y[a + n: a + n + look], p_at(a, look)):
            return False
    return True


# --- DC1 pairs and invariant samples ------------------------------------------

@dataclass(frozen=True)
class InvariantSample:
    points: tuple
    epsilon: float
    separation: float
    boundaries: tuple       # phase boundaries (agree phases are even-indexed)
    offsets: tuple          # c_i: point i copies sigma^(c_i) u on separation phases
    base: DistalPoint
    shifts: int             # J

    def closure(self):
        """{sigma^j s : s in points, j <= J} keyed by (i, j)."""
        return {(i, j): s.shifted(j) for i, s in enumerate(self.points)
                for j in range(self.shifts + 1)}

    def certificate(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "separation": self.separation,
            "boundaries": ",".join(map(str, self.boundaries)),
            "offsets": ",".join(map(str, self.offsets)),
            "base_period": word_str(self.base.period_word),
            "shifts": self.shifts,
        }


def _phase_boundaries(horizon: int) -> list[int]:
    out = []
    l = DC1_FIRST_LEVEL
    while l <= DC1_MAX_LEVEL and level_horizon(l) + DC1_PAD <= horizon:
        out.append(level_horizon(l))
        l += DC1_LEVEL_STEP
    return out


def build_invariant_sample(shift: SoficShift, count: int, horizon: int | None = None,
                           shifts: int = 3) -> InvariantSample:
    """Points whose pairs, including sigma^a/sigma^b shifted pairs with
    a, b <= shifts, all alternate between agreeing near 0^inf and staying
    separated.  Phase boundaries sit on the horizon schedule."""
    if count < 2:
        raise ParameterError("count must be >= 2")
    if shifts < 0:
        raise ParameterError("shifts must be >= 0")
    if horizon is None:
        horizon = level_horizon(DC1_MAX_LEVEL) + DC1_PAD
    if horizon < 1 << 10:
        raise ParameterError("horizon must be >= 2^10")
    if not is_mixing(shift):
        raise StructureError("shift is not mixing")
    _default_pq(shift)
    gap = specification_gap(shift)
    bounds = _phase_boundaries(horizon)
    if len(bounds) < 2:
        raise ParameterError("horizon too small for an agree and a separate phase")
    span = count * (shifts + 1)
    base = distal_point(shift, math.ceil(span / 2))
    lags = np.arange(1, span)
    sep = periodic_separation(base.period_word, lags)
    if sep == 0:
        raise StructureError("base point does not separate all lags")  # pragma: no cover
    eps = sep / 2
    offsets = tuple(i * (shifts + 1) for i in range(count))
    edges = [0] + bounds + [horizon]
    points = []
    for c in offsets:
        blocks = []
        for ph in range(len(edges) - 1):
            start = edges[ph] + (gap if ph else 0)
            length = edges[ph + 1] - start
            if ph % 2 == 0:
                word = np.zeros(length, dtype=np.int64)
            else:
                word = np.resize(np.roll(base.period_word, -((start + c) % base.period_word.size)),
                                 length)
            blocks.append((word, start))
        s = trace_spec_point(shift, TraceSpec(tuple(blocks), gap), horizon)
        points.append(SymbolStream(shift.alphabet_size, s.window, f"dc1(offset={c})"))
    return InvariantSample(tuple(points), eps, sep, tuple(bounds), offsets, base, shifts)


def build_dc1_pair(shift: SoficShift, horizon: int | None = None):
    """(x, y, epsilon): x copies z_1 and y copies sigma z_1 on separation phases."""
    sample = build_invariant_sample(shift, 2, horizon, shifts=0)
    return sample.points[0], sample.points[1], sample.epsilon


def write_stream(stream: SymbolStream, path, certificate: dict | None = None) -> None:
    """Digit string plus a key=value sidecar."""
    path = Path(path)
    path.write_text(str(stream) + "\n")
    side = {"alphabet": stream.alphabet_size, "horizon": stream.horizon,
            "generator": stream.generator_tag, **(certificate or {})}
    path.with_suffix(path.suffix + ".meta").write_text(
        "".join(f"{k}={v}\n" for k, v in side.items()))
