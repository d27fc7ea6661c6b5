"""Hybrid encode/decode and the ``HYBH`` archive container.

Only one side of the bipartition is stored. Each adjacency list of that side
is split into the neighbours covered by the Huffman book (written to the
Huffman stream) and the remaining ones (fixed-width, written to the bitwise
stream). Per-entity degree and Huffman-count arrays let the decoder split the
two streams again; the other side is rebuilt by inversion.

Byte layout, all integers little-endian::

    magic "HYBH" | version u8 | side u8 | flags u8 | pad u8
    n_v n_h N K m bitwise_width symbol_width meta_width      (8 x u64)
    5 x (byte_length u64, bit_length u64, crc32 u32)         segment table
    tree | degree metadata | count metadata | Huffman stream | bitwise stream

Segments are byte-aligned and zero-padded.
"""

import struct
import zlib
from dataclasses import dataclass, fields, replace

import numpy as np

from .bitio import BitReader, BitStream, bitwidth_for, pack, unpack
from .exceptions import CorruptArchiveError, DecodeError, DomainError, RangeError
from .frequency import build_frequency_profile, huffman_domain_size
from .huffman import (
    build_huffman,
    decode_symbol,
    decode_symbols,
    deserialize_tree,
    encode_symbols,
    serialize_tree,
    tree_bit_length,
    weighted_code_length,
)
from .hypergraph import Side, _sort_segments, offsets_from_degrees, rebuild_dual

MAGIC = b"HYBH"
VERSION = 1
FLAG_CANONICAL = 0x01

_PREAMBLE = struct.Struct("<4sBBBx")
_COUNTS = struct.Struct("<8Q")
_SEGMENT = struct.Struct("<QQI")
SEGMENT_NAMES = (
    "tree",
    "degree_metadata",
    "huffman_count_metadata",
    "huffman_stream",
    "bitwise_stream",
)
HEADER_SIZE = _PREAMBLE.size + _COUNTS.size + len(SEGMENT_NAMES) * _SEGMENT.size

_EMPTY = BitStream(b"", 0)


@dataclass(frozen=True, eq=False)
class HybridArchive:
    side: Side
    num_vertices: int
    num_hyperedges: int
    num_incidences: int
    num_symbols: int
    domain_size: int
    bitwise_width: int
    symbol_width: int
    meta_width: int
    canonical: bool
    tree: BitStream
    degree_metadata: BitStream
    huffman_count_metadata: BitStream
    huffman_stream: BitStream
    bitwise_stream: BitStream

    @property
    def num_entities(self):
        return self.num_vertices if self.side is Side.VERTICES else self.num_hyperedges

    @property
    def num_targets(self):
        return self.num_hyperedges if self.side is Side.VERTICES else self.num_vertices

    @property
    def rho(self):
        return self.domain_size / self.num_symbols if self.num_symbols else 0.0

    def segments(self):
        return tuple(getattr(self, name) for name in SEGMENT_NAMES)

    @property
    def payload_bits(self):
        """Bits in the two symbol streams (excludes tree and metadata)."""
        return self.huffman_stream.bit_length + self.bitwise_stream.bit_length

    @property
    def coded_bits(self):
        """Payload plus the serialised tree: the quantities the cost model covers."""
        return self.payload_bits + self.tree.bit_length

    @property
    def metadata_bits(self):
        return self.degree_metadata.bit_length + self.huffman_count_metadata.bit_length

    def degrees(self):
        return unpack(self.degree_metadata, self.meta_width, self.num_entities)

    def huffman_counts(self):
        return unpack(self.huffman_count_metadata, self.meta_width, self.num_entities)

    def to_bytes(self):
        out = [
            _PREAMBLE.pack(
                MAGIC, VERSION, int(self.side), FLAG_CANONICAL if self.canonical else 0
            ),
            _COUNTS.pack(
                self.num_vertices,
                self.num_hyperedges,
                self.num_incidences,
                self.num_symbols,
                self.domain_size,
                self.bitwise_width,
                self.symbol_width,
                self.meta_width,
            ),
        ]
        for seg in self.segments():
            out.append(_SEGMENT.pack(seg.nbytes, seg.bit_length, zlib.crc32(seg.data)))
        out.extend(seg.data for seg in self.segments())
        return b"".join(out)

    @classmethod
    def from_bytes(cls, data):
        data = bytes(data)
        if len(data) < HEADER_SIZE:
            raise CorruptArchiveError(
                f"{len(data)} bytes is shorter than the {HEADER_SIZE}-byte header",
                segment="header",
            )
        magic, version, side, flags = _PREAMBLE.unpack_from(data)
        if magic != MAGIC:
            raise CorruptArchiveError(f"bad magic {magic!r}", segment="header")
        if version != VERSION:
            raise CorruptArchiveError(f"unsupported version {version}", segment="header")
        if side not in (0, 1):
            raise CorruptArchiveError(f"bad side flag {side}", segment="header")
        counts = _COUNTS.unpack_from(data, _PREAMBLE.size)
        pos = _PREAMBLE.size + _COUNTS.size
        table = []
        for _ in SEGMENT_NAMES:
            table.append(_SEGMENT.unpack_from(data, pos))
            pos += _SEGMENT.size
        declared = sum(nbytes for nbytes, _, _ in table)
        if HEADER_SIZE + declared != len(data):
            raise CorruptArchiveError(
                f"segment table declares {declared} bytes, body has "
                f"{len(data) - HEADER_SIZE}",
                segment="header",
            )
        streams = []
        for name, (nbytes, nbits, crc) in zip(SEGMENT_NAMES, table):
            chunk = data[pos : pos + nbytes]
            pos += nbytes
            if zlib.crc32(chunk) != crc:
                raise CorruptArchiveError("checksum mismatch", segment=name)
            try:
                streams.append(BitStream(chunk, nbits))
            except ValueError as exc:
                raise CorruptArchiveError(str(exc), segment=name) from None
        return cls(Side(side), *counts, bool(flags & FLAG_CANONICAL), *streams)

    def describe(self):
        info = {f.name: getattr(self, f.name) for f in fields(self) if f.type is not BitStream}
        info["side"] = self.side.name.lower()
        for name, seg in zip(SEGMENT_NAMES, self.segments()):
            info[f"{name}_bits"] = seg.bit_length
        return info


def select_side(h):
    """Pick the side to compress: hyperedges when ``n_v > n_h``, else vertices.

    Returns ``(side, offsets, adjacency)`` of the chosen side.
    """
    side = Side.HYPEREDGES if h.num_vertices > h.num_hyperedges else Side.VERTICES
    offsets, adjacency = h.side(side)
    return side, offsets, adjacency


def encode(h, rho=None, *, domain_size=None, canonical=False):
    """Compress ``h`` with the ``floor(rho * K)`` most frequent symbols Huffman-coded."""
    if (rho is None) == (domain_size is None):
        raise TypeError("pass exactly one of rho or domain_size")
    side, offsets, adjacency = select_side(h)
    if canonical:
        adjacency = _sort_segments(offsets, adjacency)
    profile = build_frequency_profile(adjacency)
    k = profile.num_symbols
    if domain_size is None:
        m = huffman_domain_size(rho, k)
    else:
        m = int(domain_size)
        if not 0 <= m <= k:
            raise DomainError(f"domain size {m} outside [0, {k}]")
    return encode_with_profile(h, side, offsets, adjacency, profile, m, canonical)


def encode_with_profile(h, side, offsets, adjacency, profile, m, canonical=False, book=None):
    if book is None:
        book = build_huffman(profile, domain_size=m)
    elif book.size != m:
        raise DomainError(f"book covers {book.size} symbols, domain size is {m}")
    in_domain = np.isin(adjacency, profile.ranked_symbols[:m])
    degrees = np.diff(offsets)
    cum = np.zeros(len(adjacency) + 1, dtype=np.int64)
    np.cumsum(in_domain, out=cum[1:])
    huffman_counts = cum[offsets[1:]] - cum[offsets[:-1]]

    high = adjacency[in_domain]
    low = adjacency[~in_domain]
    width = bitwidth_for(int(low.max())) if len(low) else 0
    meta_width = bitwidth_for(int(degrees.max()) if len(degrees) else 0)
    symbol_width = book.symbol_width()
    return HybridArchive(
        side=side,
        num_vertices=h.num_vertices,
        num_hyperedges=h.num_hyperedges,
        num_incidences=len(adjacency),
        num_symbols=profile.num_symbols,
        domain_size=m,
        bitwise_width=width,
        symbol_width=symbol_width,
        meta_width=meta_width,
        canonical=bool(canonical),
        tree=serialize_tree(book.tree, symbol_width),
        degree_metadata=pack(degrees, meta_width),
        huffman_count_metadata=pack(huffman_counts, meta_width),
        huffman_stream=encode_symbols(high, book),
        bitwise_stream=pack(low, width) if len(low) else _EMPTY,
    )


def _read_tree(archive):
    if archive.domain_size == 0:
        if archive.tree.bit_length:
            raise CorruptArchiveError("tree present for an empty domain", segment="tree")
        return deserialize_tree(archive.tree, 0)
    reader = BitReader(archive.tree)
    tree = deserialize_tree(archive.tree, archive.symbol_width, reader=reader)
    if not reader.exhausted():
        raise CorruptArchiveError(
            f"{reader.remaining} trailing bits after the tree", segment="tree"
        )
    if tree.num_leaves != archive.domain_size:
        raise CorruptArchiveError(
            f"tree has {tree.num_leaves} leaves, header says {archive.domain_size}",
            segment="tree",
        )
    return tree


def _read_metadata(archive):
    n = archive.num_entities
    w = archive.meta_width
    for name in ("degree_metadata", "huffman_count_metadata"):
        if getattr(archive, name).bit_length != n * w:
            raise CorruptArchiveError(
                f"expected {n} x {w} bits, found {getattr(archive, name).bit_length}",
                segment=name,
            )
    degrees = archive.degrees()
    counts = archive.huffman_counts()
    if int(degrees.sum()) != archive.num_incidences:
        raise CorruptArchiveError(
            f"degrees sum to {int(degrees.sum())}, header says {archive.num_incidences}",
            segment="degree_metadata",
        )
    if np.any(counts > degrees):
        bad = int(np.argmax(counts > degrees))
        raise CorruptArchiveError(
            f"entity {bad}: Huffman count {counts[bad]} exceeds degree {degrees[bad]}",
            segment="huffman_count_metadata",
        )
    return degrees, counts


def _check_stream_lengths(archive, num_low):
    expected = archive.bitwise_width * num_low
    if archive.bitwise_stream.bit_length != expected:
        raise CorruptArchiveError(
            f"expected {expected} bits, found {archive.bitwise_stream.bit_length}",
            segment="bitwise_stream",
        )
    if num_low and archive.bitwise_width == 0:
        raise CorruptArchiveError("zero bitwise width with a non-empty tail", segment="header")


def decode_side(archive):
    """Decode the stored side to ``(offsets, adjacency)``.

    Both stream cursors must end exactly on their stream ends.
    """
    degrees, counts = _read_metadata(archive)
    tree = _read_tree(archive)
    num_high = int(counts.sum())
    num_low = archive.num_incidences - num_high
    _check_stream_lengths(archive, num_low)
    try:
        high, end = decode_symbols(archive.huffman_stream, tree, num_high)
    except DecodeError as exc:
        raise DecodeError(str(exc), segment="huffman_stream") from None
    if end != archive.huffman_stream.bit_length:
        raise CorruptArchiveError(
            f"Huffman cursor stopped at bit {end} of {archive.huffman_stream.bit_length}",
            segment="huffman_stream",
        )
    low = unpack(archive.bitwise_stream, archive.bitwise_width, num_low)

    offsets = offsets_from_degrees(degrees)
    slot = np.arange(archive.num_incidences) - np.repeat(offsets[:-1], degrees)
    is_high = slot < np.repeat(counts, degrees)
    adjacency = np.empty(archive.num_incidences, dtype=np.int64)
    adjacency[is_high] = high
    adjacency[~is_high] = low
    if archive.canonical:
        adjacency = _sort_segments(offsets, adjacency)
    return offsets, adjacency


def decode(archive):
    """Rebuild the full hypergraph from an archive."""
    offsets, adjacency = decode_side(archive)
    try:
        return rebuild_dual(
            offsets, adjacency, archive.side, archive.num_vertices, archive.num_hyperedges
        )
    except RangeError as exc:
        raise CorruptArchiveError(str(exc), segment="symbols") from None


class CompressedAdjacency:
    """Lazily decoded adjacency lists of the stored side.

    Iteration yields one list per entity, in ID order: its Huffman-coded
    neighbours followed by its fixed-width ones. Each iteration owns fresh
    cursors, so the object can be iterated repeatedly or concurrently.
    """

    def __init__(self, archive):
        self.archive = archive
        self.degrees, self.counts = _read_metadata(archive)
        self.tree = _read_tree(archive)
        _check_stream_lengths(archive, archive.num_incidences - int(self.counts.sum()))

    def __len__(self):
        return self.archive.num_entities

    def __iter__(self):
        archive = self.archive
        high = BitReader(archive.huffman_stream)
        low = BitReader(archive.bitwise_stream)
        width = archive.bitwise_width
        tree = self.tree
        for d, k in zip(self.degrees.tolist(), self.counts.tolist()):
            neighbors = [0] * d
            for j in range(k):
                neighbors[j] = decode_symbol(high, tree)
            for j in range(k, d):
                neighbors[j] = low.read(width)
            if archive.canonical:
                neighbors.sort()
            yield neighbors
        if not high.exhausted():
            raise CorruptArchiveError("unread Huffman bits", segment="huffman_stream")
        if not low.exhausted():
            raise CorruptArchiveError("unread bitwise bits", segment="bitwise_stream")


def adjacency_iterator(archive):
    return CompressedAdjacency(archive)


def compressed_size(archive):
    return len(archive.to_bytes())


def compression_rate(original_bytes, compressed_bytes):
    """Relative size reduction in percent."""
    if original_bytes <= 0:
        raise DomainError("original size must be positive")
    return (1.0 - compressed_bytes / original_bytes) * 100.0


def coded_bits_for(profile, m):
    """Exact ``(payload_bits, tree_bits)`` that :func:`encode` produces at domain size ``m``.

    Derived from the profile alone: Huffman stream length is the optimal
    weighted code length of the top ``m`` counts.
    """
    k = profile.num_symbols
    if not 0 <= m <= k:
        raise DomainError(f"domain size {m} outside [0, {k}]")
    counts = profile.ranked_counts[:m][::-1].tolist()
    high_bits = weighted_code_length(counts, presorted=True)
    tail = profile.total - int(profile.prefix_count[m])
    payload = high_bits + profile.tail_bitwidth(m) * tail
    width = bitwidth_for(int(profile.ranked_symbols[:m].max())) if m else 0
    return payload, tree_bit_length(m, width)


def coded_bits_curve(profile):
    """:func:`coded_bits_for` at every ``m`` in ``0..K`` as two arrays."""
    k = profile.num_symbols
    payload = np.zeros(k + 1, dtype=np.int64)
    tree = np.zeros(k + 1, dtype=np.int64)
    for m in range(k + 1):
        payload[m], tree[m] = coded_bits_for(profile, m)
    return payload, tree


def with_segment(archive, name, stream):
    """Copy of ``archive`` with one segment replaced (used by tests and verify)."""
    return replace(archive, **{name: stream})
