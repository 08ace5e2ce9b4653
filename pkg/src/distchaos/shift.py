"""Shift spaces over finite alphabets given by labelled-graph presentations.

Points are represented by forward windows ``x[0:H]``.  Language membership
of finite words is path existence in the presentation, evaluated with
forward vertex-set bitmasks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import DimensionError, ParameterError, StructureError, SymbolError

MAX_VERTICES = 64  # bitmask width


# --- words and streams ------------------------------------------------------

def as_word(w, alphabet_size: int | None = None) -> np.ndarray:
    """Coerce a digit string or integer sequence to a validated int array."""
    if isinstance(w, str):
        if w and not w.isdigit():
            raise SymbolError(f"word {w!r} is not a digit string")
        arr = np.fromiter((ord(c) - 48 for c in w), dtype=np.int64, count=len(w))
    else:
        arr = np.asarray(w, dtype=np.int64).ravel()
    if arr.size and arr.min() < 0:
        raise SymbolError("negative symbol in word")
    if alphabet_size is not None and arr.size and arr.max() >= alphabet_size:
        raise SymbolError(f"symbol {int(arr.max())} outside alphabet of size {alphabet_size}")
    return arr


def word_str(w) -> str:
    """Digit-string form of a word (alphabets up to 10 symbols)."""
    arr = np.asarray(w, dtype=np.int64)
    if arr.size and arr.max() > 9:
        raise SymbolError("digit-string output needs symbols < 10")
    return (arr.astype(np.uint8) + 48).tobytes().decode("ascii")


@dataclass(frozen=True)
class SymbolStream:
    """A one-sided point materialised on ``window = x[0:horizon]``."""

    alphabet_size: int
    window: np.ndarray
    generator_tag: str = ""

    def __post_init__(self):
        win = as_word(self.window, self.alphabet_size).astype(np.uint8)
        if win.size < 1:
            raise DimensionError("stream horizon must be >= 1")
        win.setflags(write=False)
        object.__setattr__(self, "window", win)

    @property
    def horizon(self) -> int:
        return int(self.window.size)

    def shifted(self, j: int) -> "SymbolStream":
        """sigma^j of the stream; the window shrinks by j."""
        if not 0 <= j < self.horizon:
            raise DimensionError(f"cannot shift by {j} a window of length {self.horizon}")
        return SymbolStream(self.alphabet_size, self.window[j:], f"sigma^{j}({self.generator_tag})")

    def truncated(self, horizon: int) -> "SymbolStream":
        if horizon > self.horizon:
            raise DimensionError("cannot extend a window by truncation")
        return SymbolStream(self.alphabet_size, self.window[:horizon], self.generator_tag)

    def __str__(self) -> str:
        return word_str(self.window)

    def __eq__(self, other):
        if not isinstance(other, SymbolStream):
            return NotImplemented
        return (self.alphabet_size == other.alphabet_size
                and np.array_equal(self.window, other.window))

    def __hash__(self):
        return hash((self.alphabet_size, self.window.tobytes()))


def constant_stream(symbol: int, alphabet_size: int, horizon: int) -> SymbolStream:
    return SymbolStream(alphabet_size, np.full(horizon, symbol, dtype=np.uint8),
                        f"const({symbol})")


def shift_metric(x: SymbolStream, y: SymbolStream) -> float:
    """2^-k where k is the first index at which the windows differ; 0 if none."""
    if x.alphabet_size != y.alphabet_size:
        raise DimensionError("streams over different alphabets")
    if x.horizon != y.horizon:
        raise DimensionError(f"horizons differ: {x.horizon} vs {y.horizon}")
    diff = np.flatnonzero(x.window != y.window)
    return 0.0 if diff.size == 0 else 2.0 ** -int(diff[0])


# --- presentations ----------------------------------------------------------

@dataclass(frozen=True)
class Presentation:
    vertex_count: int
    edges: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        edges = tuple(sorted({(int(a), int(b), int(c)) for a, b, c in self.edges}))
        if len(edges) != len(self.edges):
            raise StructureError("duplicate edges in presentation")
        if not edges:
            raise StructureError("presentation needs at least one edge")
        if not 1 <= self.vertex_count <= MAX_VERTICES:
            raise ParameterError(f"vertex_count must be in 1..{MAX_VERTICES}")
        for a, b, c in edges:
            if not (0 <= a < self.vertex_count and 0 <= b < self.vertex_count):
                raise StructureError(f"edge {(a, b, c)} references a missing vertex")
            if c < 0:
                raise SymbolError(f"negative label on edge {(a, b, c)}")
        object.__setattr__(self, "edges", edges)


@dataclass(frozen=True)
class SoficShift:
    presentation: Presentation
    alphabet_size: int
    name: str = field(default="", compare=False)

    def __post_init__(self):
        top = max(c for _, _, c in self.presentation.edges)
        if top >= self.alphabet_size:
            raise SymbolError(f"label {top} outside alphabet of size {self.alphabet_size}")

    @property
    def vertex_count(self) -> int:
        return self.presentation.vertex_count

    @cached_property
    def trans(self) -> np.ndarray:
        """trans[v, a] = bitmask of heads of a-labelled edges leaving v."""
        t = np.zeros((self.vertex_count, self.alphabet_size), dtype=np.uint64)
        for a, b, c in self.presentation.edges:
            t[a, c] |= np.uint64(1) << np.uint64(b)
        return t

    @cached_property
    def adjacency(self) -> np.ndarray:
        m = np.zeros((self.vertex_count, self.vertex_count), dtype=bool)
        for a, b, _ in self.presentation.edges:
            m[a, b] = True
        return m

    @property
    def all_vertices(self) -> int:
        return (1 << self.vertex_count) - 1

    def step(self, mask: int, symbol: int) -> int:
        out = 0
        for v in range(self.vertex_count):
            if mask >> v & 1:
                out |= int(self.trans[v, symbol])
        return out

    def follow(self, mask: int, word) -> int:
        w = as_word(word, self.alphabet_size)
        if w.size > 32:
            out = kernels.advance_sets(np.array([mask], dtype=np.uint64), w[None, :],
                                       np.array([w.size]), self.trans)
            return int(out[0])
        for a in w:
            mask = self.step(mask, int(a))
            if not mask:
                break
        return mask

    def readable_from(self, word) -> int:
        """Mask of vertices from which some path carries ``word``."""
        out = 0
        for v in range(self.vertex_count):
            if self.follow(1 << v, word):
                out |= 1 << v
        return out


def full_shift(alphabet_size: int = 2) -> SoficShift:
    edges = tuple((0, 0, a) for a in range(alphabet_size))
    return SoficShift(Presentation(1, edges), alphabet_size, f"full{alphabet_size}")


def build_pi_shift() -> SoficShift:
    """The strictly sofic shift over {0,..,4}: after a nonzero k (and any
    zeros) only 0, k or k mod 4 + 1 may follow.  Vertex k-1 remembers k."""
    edges = []
    for k in range(1, 5):
        nxt = k % 4 + 1
        edges += [(k - 1, k - 1, 0), (k - 1, k - 1, k), (k - 1, nxt - 1, nxt)]
    return SoficShift(Presentation(4, tuple(edges)), 5, "Pi")


def pi_rules_allow(w) -> bool:
    """Literal rule check for Pi, independent of any graph.

    The last nonzero symbol k seen so far (zeros in between are ignored)
    restricts the next symbol to {0, k, k mod 4 + 1}; before any nonzero
    symbol everything is permitted."""
    last = 0
    for c in (int(ch) for ch in (w if isinstance(w, str) else list(w))):
        if not 0 <= c <= 4:
            raise SymbolError(f"symbol {c} outside 0..4")
        if c and last and c not in (last, last % 4 + 1):
            return False
        if c:
            last = c
    return True


def word_allowed(shift: SoficShift, w) -> bool:
    w = as_word(w, shift.alphabet_size)
    return shift.follow(shift.all_vertices, w) != 0


def words_allowed(shift: SoficShift, words: Sequence) -> np.ndarray:
    """Batch membership for many words (digit strings or int sequences)."""
    arrs = [as_word(w, shift.alphabet_size) for w in words]
    if not arrs:
        return np.zeros(0, dtype=bool)
    lengths = np.array([a.size for a in arrs], dtype=np.int64)
    mat = np.zeros((len(arrs), max(1, int(lengths.max()))), dtype=np.int64)
    for i, a in enumerate(arrs):
        mat[i, : a.size] = a
    return words_matrix_allowed(shift, mat, lengths)


def words_matrix_allowed(shift: SoficShift, mat, lengths=None) -> np.ndarray:
    mat = np.asarray(mat, dtype=np.int64)
    if mat.ndim != 2:
        raise DimensionError("word matrix must be 2-D")
    if mat.size and (mat.min() < 0 or mat.max() >= shift.alphabet_size):
        raise SymbolError("symbol outside alphabet")
    if lengths is None:
        lengths = np.full(mat.shape[0], mat.shape[1], dtype=np.int64)
    starts = np.full(mat.shape[0], shift.all_vertices, dtype=np.uint64)
    return kernels.advance_sets(starts, mat, lengths, shift.trans) != 0


def stream_allowed(shift: SoficShift, x: SymbolStream) -> bool:
    if x.alphabet_size != shift.alphabet_size:
        raise DimensionError("stream alphabet differs from shift alphabet")
    out = kernels.advance_sets(np.array([shift.all_vertices], dtype=np.uint64),
                               x.window[None, :], np.array([x.horizon]), shift.trans)
    return bool(out[0] != 0)


# --- structure --------------------------------------------------------------

def _strongly_connected(adj: np.ndarray) -> bool:
    n = adj.shape[0]
    reach = adj | np.eye(n, dtype=bool)
    for _ in range(max(1, int(np.ceil(np.log2(max(n, 2)))) + 1)):
        reach = reach | ((reach.astype(np.int64) @ reach.astype(np.int64)) > 0)
    return bool(reach.all())


def is_mixing(shift: SoficShift) -> bool:
    """Strongly connected and aperiodic (gcd of cycle lengths 1)."""
    adj = shift.adjacency
    if not _strongly_connected(adj):
        return False
    n = adj.shape[0]
    # period via BFS levels: gcd of level[u] + 1 - level[v] over edges u->v
    level = np.full(n, -1)
    level[0] = 0
    frontier = [0]
    while frontier:
        nxt = []
        for u in frontier:
            for v in np.flatnonzero(adj[u]):
                if level[v] < 0:
                    level[v] = level[u] + 1
                    nxt.append(int(v))
        frontier = nxt
    g = 0
    for u, v in zip(*np.nonzero(adj)):
        g = int(np.gcd(g, abs(int(level[u]) + 1 - int(level[v]))))
    return g == 1


def specification_gap(shift: SoficShift) -> int:
    """Least n with a length-n path between every ordered pair of vertices."""
    if not is_mixing(shift):
        raise StructureError(f"shift {shift.name or '?'} is not mixing")
    a = shift.adjacency.astype(np.int64)
    cap = shift.vertex_count ** 2 + shift.alphabet_size
    p = a.copy()
    for n in range(1, cap + 1):
        if (p > 0).all():
            return n
        p = ((p @ a) > 0).astype(np.int64)
    raise StructureError("no specification gap below the search cap")  # pragma: no cover


def _backward_levels(shift: SoficShift, target: int, depth: int) -> list[int]:
    """levels[k] = vertices with a length-k path into ``target``."""
    adj = shift.adjacency
    levels = [target]
    for _ in range(depth):
        prev = levels[-1]
        cur = 0
        for v in range(shift.vertex_count):
            if any(prev >> int(u) & 1 for u in np.flatnonzero(adj[v])):
                cur |= 1 << v
        levels.append(cur)
    return levels


def bridge_between_sets(shift: SoficShift, from_mask: int, target_mask: int, gap: int):
    """Least word of length ``gap`` leading from ``from_mask`` into ``target_mask``.

    Returns (word, mask) where mask is the set of reachable vertices inside
    the target after reading the word.
    """
    if gap < 0:
        raise ParameterError("gap must be >= 0")
    levels = _backward_levels(shift, target_mask, gap)
    cur = from_mask
    if not cur & levels[gap]:
        raise StructureError(f"no bridge of length {gap} between the given vertex sets")
    out = np.empty(gap, dtype=np.int64)
    for i in range(gap):
        need = levels[gap - i - 1]
        for a in range(shift.alphabet_size):
            nxt = shift.step(cur, a)
            if nxt & need:
                out[i] = a
                cur = nxt
                break
    return out, cur & target_mask


def bridge_word(shift: SoficShift, u, v, gap: int) -> np.ndarray:
    """Lexicographically least w with |w| = gap and u w v allowed."""
    if gap < 0:
        raise ParameterError("gap must be >= 0")
    u = as_word(u, shift.alphabet_size)
    v = as_word(v, shift.alphabet_size)
    cur = shift.follow(shift.all_vertices, u)
    if not cur:
        raise StructureError(f"left word {word_str(u)} is not allowed")
    target = shift.readable_from(v)
    if not target:
        raise StructureError(f"right word {word_str(v)} is not allowed")
    try:
        w, _ = bridge_between_sets(shift, cur, target, gap)
    except StructureError:
        raise StructureError(
            f"no bridge of length {gap} from {word_str(u)} to {word_str(v)}") from None
    return w


def find_non_sft_witness(shift: SoficShift, memory: int):
    """Search (u, v, w) with |v| = memory, uv and vw allowed, uvw forbidden.

    u and w range over single symbols; v over allowed words of length
    ``memory``.  Returns None if no witness exists at this memory.
    """
    syms = range(shift.alphabet_size)
    for v in itertools.product(syms, repeat=memory):
        if not word_allowed(shift, v):
            continue
        for a in syms:
            if not word_allowed(shift, (a, *v)):
                continue
            for b in syms:
                if word_allowed(shift, (*v, b)) and not word_allowed(shift, (a, *v, b)):
                    return (np.array([a]), np.array(v, dtype=np.int64), np.array([b]))
    return None


# --- presentation files -----------------------------------------------------

def read_presentation(path) -> SoficShift:
    """Parse ``vertices=<n> alphabet=<m>`` followed by ``from to label`` lines."""
    lines = [ln.split("#", 1)[0].strip() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise StructureError(f"{path}: empty presentation file")
    header = dict(tok.split("=", 1) for tok in lines[0].split())
    try:
        nv, na = int(header["vertices"]), int(header["alphabet"])
    except (KeyError, ValueError) as exc:
        raise StructureError(f"{path}: bad header {lines[0]!r}") from exc
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 3:
            raise StructureError(f"{path}: bad edge line {ln!r}")
        edges.append(tuple(int(p) for p in parts))
    return SoficShift(Presentation(nv, tuple(edges)), na, Path(path).stem)


def write_presentation(shift: SoficShift, path) -> None:
    rows = [f"vertices={shift.vertex_count} alphabet={shift.alphabet_size}"]
    rows += [f"{a} {b} {c}" for a, b, c in shift.presentation.edges]
    Path(path).write_text("\n".join(rows) + "\n")


def all_words(alphabet_size: int, length: int) -> np.ndarray:
    """Every word of the given length as rows of a matrix (lexicographic)."""
    if length == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices((alphabet_size,) * length).reshape(length, -1).T
    return np.ascontiguousarray(grids, dtype=np.int64)


def iter_allowed_words(shift: SoficShift, max_len: int) -> Iterable[np.ndarray]:
    for n in range(max_len + 1):
        mat = all_words(shift.alphabet_size, n)
        ok = words_matrix_allowed(shift, mat) if n else np.array([True])
        for row in mat[ok]:
            yield row
