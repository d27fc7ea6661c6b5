"""Bipartite hypergraph incidence structure and its on-disk formats.

A :class:`Hypergraph` stores both sides of the incidence relation in
CSR form: ``vertex_offsets``/``vertex_adjacency`` list the hyperedges of each
vertex, ``hyperedge_offsets``/``hyperedge_adjacency`` list the vertices of
each hyperedge. Offsets always carry the closing sentinel, so
``degree(i) == offsets[i + 1] - offsets[i]``.

Two file formats are supported:

* the ``AdjacencyHypergraph`` text format (Hygra/PPoPP benchmark layout):
  header line, the four counts ``n_v, m_v, n_h, m_h``, then vertex offsets,
  vertex adjacency, hyperedge offsets and hyperedge adjacency, one decimal
  integer per line. The files omit the sentinel offset.
* a binary mirror: magic ``HGB1``, the same four counts as little-endian
  uint64, then the four arrays as little-endian uint32.
"""

import enum
import io
import struct
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    ConsistencyError,
    FormatError,
    GenerationError,
    RangeError,
    StructureError,
)

TEXT_HEADER = "AdjacencyHypergraph"
BINARY_MAGIC = b"HGB1"
_BINARY_COUNTS = struct.Struct("<4s4Q")


class Side(enum.IntEnum):
    """One side of the bipartition."""

    VERTICES = 0
    HYPEREDGES = 1

    @property
    def other(self):
        return Side(1 - self)


def _as_index_array(values):
    arr = np.asarray(values, dtype=np.int64)
    if arr.ndim != 1:
        raise StructureError(f"expected a 1-d array, got shape {arr.shape}")
    return arr


def _check_csr(offsets, adjacency, n_rows, n_cols, label):
    if len(offsets) != n_rows + 1:
        raise StructureError(
            f"{label} offsets: expected {n_rows + 1} entries, got {len(offsets)}"
        )
    if offsets[0] != 0:
        raise StructureError(f"{label} offsets must start at 0, got {offsets[0]}")
    steps = np.diff(offsets)
    if len(steps) and steps.min() < 0:
        bad = int(np.argmax(steps < 0))
        raise StructureError(
            f"{label} offsets decrease at index {bad + 1} "
            f"({offsets[bad]} -> {offsets[bad + 1]})"
        )
    if offsets[-1] != len(adjacency):
        raise StructureError(
            f"{label} offsets end at {offsets[-1]} but adjacency has "
            f"{len(adjacency)} entries"
        )
    if len(adjacency):
        lo, hi = adjacency.min(), adjacency.max()
        if lo < 0 or hi >= n_cols:
            bad = int(np.argmax((adjacency < 0) | (adjacency >= n_cols)))
            raise RangeError(
                f"{label} adjacency entry {bad} = {adjacency[bad]} "
                f"outside [0, {n_cols})"
            )


@dataclass(frozen=True, eq=False)
class Hypergraph:
    """Immutable dual-CSR hypergraph."""

    num_vertices: int
    num_hyperedges: int
    vertex_offsets: np.ndarray
    vertex_adjacency: np.ndarray
    hyperedge_offsets: np.ndarray
    hyperedge_adjacency: np.ndarray

    def __post_init__(self):
        for name in (
            "vertex_offsets",
            "vertex_adjacency",
            "hyperedge_offsets",
            "hyperedge_adjacency",
        ):
            arr = _as_index_array(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "num_vertices", int(self.num_vertices))
        object.__setattr__(self, "num_hyperedges", int(self.num_hyperedges))
        if self.num_vertices < 0 or self.num_hyperedges < 0:
            raise StructureError("entity counts must be non-negative")
        _check_csr(
            self.vertex_offsets,
            self.vertex_adjacency,
            self.num_vertices,
            self.num_hyperedges,
            "vertex",
        )
        _check_csr(
            self.hyperedge_offsets,
            self.hyperedge_adjacency,
            self.num_hyperedges,
            self.num_vertices,
            "hyperedge",
        )
        if len(self.vertex_adjacency) != len(self.hyperedge_adjacency):
            raise ConsistencyError(
                f"vertex side has {len(self.vertex_adjacency)} incidences, "
                f"hyperedge side has {len(self.hyperedge_adjacency)}"
            )

    @property
    def num_incidences(self):
        return len(self.vertex_adjacency)

    def __eq__(self, other):
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (
            self.num_vertices == other.num_vertices
            and self.num_hyperedges == other.num_hyperedges
            and np.array_equal(self.vertex_offsets, other.vertex_offsets)
            and np.array_equal(self.vertex_adjacency, other.vertex_adjacency)
            and np.array_equal(self.hyperedge_offsets, other.hyperedge_offsets)
            and np.array_equal(self.hyperedge_adjacency, other.hyperedge_adjacency)
        )

    __hash__ = None

    def __repr__(self):
        return (
            f"Hypergraph(num_vertices={self.num_vertices}, "
            f"num_hyperedges={self.num_hyperedges}, "
            f"num_incidences={self.num_incidences})"
        )

    def side(self, side):
        """Return ``(offsets, adjacency)`` for the given side."""
        if Side(side) is Side.VERTICES:
            return self.vertex_offsets, self.vertex_adjacency
        return self.hyperedge_offsets, self.hyperedge_adjacency

    def count(self, side):
        return self.num_vertices if Side(side) is Side.VERTICES else self.num_hyperedges

    def vertex_degrees(self):
        return np.diff(self.vertex_offsets)

    def hyperedge_degrees(self):
        return np.diff(self.hyperedge_offsets)

    def vertex_neighbors(self, v):
        return self.vertex_adjacency[self.vertex_offsets[v] : self.vertex_offsets[v + 1]]

    def hyperedge_neighbors(self, h):
        return self.hyperedge_adjacency[
            self.hyperedge_offsets[h] : self.hyperedge_offsets[h + 1]
        ]

    def check_duality(self):
        """Raise :class:`ConsistencyError` unless both sides list the same incidences.

        Sort-merge comparison, O(N log N).
        """
        v_src = np.repeat(np.arange(self.num_vertices), self.vertex_degrees())
        h_src = np.repeat(np.arange(self.num_hyperedges), self.hyperedge_degrees())
        left = np.lexsort((self.vertex_adjacency, v_src))
        right = np.lexsort((h_src, self.hyperedge_adjacency))
        same_v = np.array_equal(v_src[left], self.hyperedge_adjacency[right])
        same_h = np.array_equal(self.vertex_adjacency[left], h_src[right])
        if not (same_v and same_h):
            raise ConsistencyError("vertex and hyperedge sides disagree")

    def canonical(self):
        """Copy with every adjacency list sorted ascending."""
        return Hypergraph(
            self.num_vertices,
            self.num_hyperedges,
            self.vertex_offsets,
            _sort_segments(self.vertex_offsets, self.vertex_adjacency),
            self.hyperedge_offsets,
            _sort_segments(self.hyperedge_offsets, self.hyperedge_adjacency),
        )


def _sort_segments(offsets, adjacency):
    if len(adjacency) == 0:
        return adjacency.copy()
    rows = np.repeat(np.arange(len(offsets) - 1, dtype=np.int64), np.diff(offsets))
    key = rows * (int(adjacency.max()) + 1) + adjacency
    return adjacency[np.argsort(key, kind="stable")]


def offsets_from_degrees(degrees):
    offsets = np.zeros(len(degrees) + 1, dtype=np.int64)
    np.cumsum(degrees, out=offsets[1:])
    return offsets


def invert_csr(offsets, adjacency, n_targets):
    """Invert a CSR relation. Rebuilt lists are ordered by source ID."""
    offsets = _as_index_array(offsets)
    adjacency = _as_index_array(adjacency)
    if len(adjacency) and (adjacency.min() < 0 or adjacency.max() >= n_targets):
        raise RangeError(f"adjacency IDs must lie in [0, {n_targets})")
    sources = np.repeat(np.arange(len(offsets) - 1, dtype=np.int64), np.diff(offsets))
    order = np.argsort(adjacency, kind="stable")
    dual_offsets = offsets_from_degrees(np.bincount(adjacency, minlength=n_targets))
    return dual_offsets, sources[order]


def rebuild_dual(offsets, adjacency, side, num_vertices, num_hyperedges):
    """Build a full :class:`Hypergraph` from one complete side.

    ``side`` names the side that ``offsets``/``adjacency`` describe.
    """
    side = Side(side)
    n_targets = num_hyperedges if side is Side.VERTICES else num_vertices
    offsets = _as_index_array(offsets)
    adjacency = _as_index_array(adjacency)
    dual_offsets, dual_adjacency = invert_csr(offsets, adjacency, n_targets)
    if side is Side.VERTICES:
        return Hypergraph(
            num_vertices, num_hyperedges, offsets, adjacency, dual_offsets, dual_adjacency
        )
    return Hypergraph(
        num_vertices, num_hyperedges, dual_offsets, dual_adjacency, offsets, adjacency
    )


def from_hyperedges(edges, num_vertices=None):
    """Convenience constructor from a list of vertex lists."""
    edges = [list(e) for e in edges]
    flat = np.fromiter((v for e in edges for v in e), dtype=np.int64)
    if num_vertices is None:
        num_vertices = int(flat.max()) + 1 if len(flat) else 0
    offsets = offsets_from_degrees([len(e) for e in edges])
    return rebuild_dual(offsets, flat, Side.HYPEREDGES, num_vertices, len(edges))


# -- text format -------------------------------------------------------------


def _locate_bad_token(lines, start):
    for lineno in range(start, len(lines)):
        for token in lines[lineno].split():
            try:
                int(token)
            except ValueError:
                return lineno + 1, token
    return None, None


def parse_adjacency_hypergraph(text, strict=False):
    """Parse ``AdjacencyHypergraph`` text (``str`` or ``bytes``).

    ``strict`` additionally runs the O(N log N) duality check.
    """
    if isinstance(text, (bytes, bytearray, memoryview)):
        try:
            text = bytes(text).decode("ascii")
        except UnicodeDecodeError as exc:
            raise FormatError(f"non-ASCII byte at offset {exc.start}") from None
    lines = text.split("\n")
    first = 0
    while first < len(lines) and not lines[first].strip():
        first += 1
    if first == len(lines) or lines[first].strip() != TEXT_HEADER:
        found = lines[first].strip()[:40] if first < len(lines) else "<empty>"
        raise FormatError(f"line {first + 1}: expected header {TEXT_HEADER!r}, got {found!r}")
    body = "\n".join(lines[first + 1 :])
    try:
        tokens = np.array(body.split(), dtype=np.int64)
    except (ValueError, OverflowError):
        lineno, token = _locate_bad_token(lines, first + 1)
        raise FormatError(f"line {lineno}: not an integer: {token!r}") from None
    if len(tokens) < 4:
        raise FormatError(f"expected 4 counts after the header, found {len(tokens)}")
    n_v, m_v, n_h, m_h = (int(t) for t in tokens[:4])
    if min(n_v, m_v, n_h, m_h) < 0:
        raise FormatError(f"negative count in header: {n_v} {m_v} {n_h} {m_h}")
    expected = 4 + n_v + m_v + n_h + m_h
    if len(tokens) != expected:
        raise FormatError(
            f"counts {n_v} {m_v} {n_h} {m_h} require {expected} integers, "
            f"found {len(tokens)}"
        )
    pos = 4
    parts = []
    for size in (n_v, m_v, n_h, m_h):
        parts.append(tokens[pos : pos + size])
        pos += size
    v_off = np.append(parts[0], m_v)
    h_off = np.append(parts[2], m_h)
    h = Hypergraph(n_v, n_h, v_off, parts[1], h_off, parts[3])
    if strict:
        h.check_duality()
    return h


def serialize_adjacency_hypergraph(h):
    """Deterministic ``AdjacencyHypergraph`` text as ``bytes``."""
    arrays = (
        [h.num_vertices, len(h.vertex_adjacency), h.num_hyperedges, len(h.hyperedge_adjacency)],
        h.vertex_offsets[:-1].tolist(),
        h.vertex_adjacency.tolist(),
        h.hyperedge_offsets[:-1].tolist(),
        h.hyperedge_adjacency.tolist(),
    )
    buf = io.StringIO()
    buf.write(TEXT_HEADER)
    buf.write("\n")
    for arr in arrays:
        if arr:
            buf.write("\n".join(map(str, arr)))
            buf.write("\n")
    return buf.getvalue().encode("ascii")


# -- binary mirror -----------------------------------------------------------


def serialize_binary(h):
    counts = _BINARY_COUNTS.pack(
        BINARY_MAGIC,
        h.num_vertices,
        len(h.vertex_adjacency),
        h.num_hyperedges,
        len(h.hyperedge_adjacency),
    )
    limit = 1 << 32
    chunks = [counts]
    for arr in (
        h.vertex_offsets[:-1],
        h.vertex_adjacency,
        h.hyperedge_offsets[:-1],
        h.hyperedge_adjacency,
    ):
        if len(arr) and arr.max() >= limit:
            raise RangeError("binary format stores 32-bit values only")
        chunks.append(arr.astype("<u4").tobytes())
    return b"".join(chunks)


def parse_binary(data, strict=False):
    data = bytes(data)
    if len(data) < _BINARY_COUNTS.size or data[:4] != BINARY_MAGIC:
        raise FormatError(f"missing {BINARY_MAGIC!r} magic")
    _, n_v, m_v, n_h, m_h = _BINARY_COUNTS.unpack_from(data)
    need = _BINARY_COUNTS.size + 4 * (n_v + m_v + n_h + m_h)
    if len(data) != need:
        raise FormatError(f"binary hypergraph: expected {need} bytes, got {len(data)}")
    values = np.frombuffer(data, dtype="<u4", offset=_BINARY_COUNTS.size).astype(np.int64)
    a, b, c = n_v, n_v + m_v, n_v + m_v + n_h
    h = Hypergraph(
        n_v,
        n_h,
        np.append(values[:a], m_v),
        values[a:b],
        np.append(values[b:c], m_h),
        values[c:],
    )
    if strict:
        h.check_duality()
    return h


def load_hypergraph(path, strict=False):
    """Read a text or binary hypergraph file, dispatching on the magic bytes."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] == BINARY_MAGIC:
        return parse_binary(data, strict=strict)
    return parse_adjacency_hypergraph(data, strict=strict)


def save_hypergraph(h, path, binary=False):
    payload = serialize_binary(h) if binary else serialize_adjacency_hypergraph(h)
    with open(path, "wb") as fh:
        fh.write(payload)
    return len(payload)


# -- synthetic data ------------------------------------------------------------


def zipf_weights(k, z):
    """Probabilities ``i**-z / H_k(z)`` for ranks ``i = 1..k``."""
    ranks = np.arange(1, k + 1, dtype=np.float64)
    w = ranks ** (-float(z))
    return w / w.sum()


def _hyperedge_sizes(rng, n_v, n_h, total):
    sizes = 1 + rng.multinomial(total - n_h, np.full(n_h, 1.0 / n_h))
    excess = int(np.clip(sizes - n_v, 0, None).sum())
    if excess:
        sizes = np.minimum(sizes, n_v)
        for j in range(n_h):
            room = n_v - sizes[j]
            take = min(room, excess)
            sizes[j] += take
            excess -= take
            if not excess:
                break
    return sizes


def generate_zipfian_hypergraph(num_vertices, num_hyperedges, num_incidences, z, seed=0):
    """Random hypergraph whose vertex occurrences follow a Zipf law.

    Vertex ``i`` (0-based) is drawn with weight ``(i + 1) ** -z``. Each
    hyperedge is a set: duplicate draws inside one hyperedge are rejected,
    which is sampled exactly as weighted sampling without replacement
    (Gumbel top-k). Hyperedge lists keep draw order.
    """
    n_v, n_h, total = int(num_vertices), int(num_hyperedges), int(num_incidences)
    if z <= 0:
        raise GenerationError(f"skew exponent must be positive, got {z}")
    if min(n_v, n_h, total) < 0:
        raise GenerationError("counts must be non-negative")
    if total < n_h:
        raise GenerationError(
            f"{total} incidences cannot give {n_h} non-empty hyperedges"
        )
    if total > n_v * n_h:
        raise GenerationError(
            f"{total} incidences exceed {n_v} x {n_h} distinct pairs"
        )
    rng = np.random.default_rng(seed)
    if n_h == 0:
        return rebuild_dual(np.zeros(1, dtype=np.int64), [], Side.HYPEREDGES, n_v, 0)
    sizes = _hyperedge_sizes(rng, n_v, n_h, total)
    log_w = -float(z) * np.log(np.arange(1, n_v + 1, dtype=np.float64))
    adjacency = np.empty(total, dtype=np.int64)
    pos = 0
    for size in sizes.tolist():
        keys = log_w + rng.gumbel(size=n_v)
        if size < n_v:
            chosen = np.argpartition(-keys, size - 1)[:size]
        else:
            chosen = np.arange(n_v)
        chosen = chosen[np.argsort(-keys[chosen], kind="stable")]
        adjacency[pos : pos + size] = chosen
        pos += size
    return rebuild_dual(offsets_from_degrees(sizes), adjacency, Side.HYPEREDGES, n_v, n_h)


def generate_random_hypergraph(rng, max_vertices=1000, max_hyperedges=1000, max_incidences=10**5):
    """Random small instance for property tests; may contain empty lists."""
    n_v = int(rng.integers(0, max_vertices + 1))
    n_h = int(rng.integers(0, max_hyperedges + 1))
    if n_v == 0 or n_h == 0:
        return rebuild_dual(np.zeros(n_h + 1, dtype=np.int64), [], Side.HYPEREDGES, n_v, n_h)
    cap = min(max_incidences, n_v * n_h)
    total = int(rng.integers(0, cap + 1))
    pairs = rng.choice(n_v * n_h, size=total, replace=False) if total else np.zeros(0, np.int64)
    edge_of, vertex_of = np.divmod(pairs, n_v)
    order = np.argsort(edge_of, kind="stable")
    degrees = np.bincount(edge_of, minlength=n_h)
    return rebuild_dual(
        offsets_from_degrees(degrees), vertex_of[order], Side.HYPEREDGES, n_v, n_h
    )
