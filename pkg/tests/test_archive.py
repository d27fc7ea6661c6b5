from collections import Counter

import numpy as np
import pytest

from hybhuff.archive import (
    HEADER_SIZE,
    HybridArchive,
    adjacency_iterator,
    coded_bits_curve,
    coded_bits_for,
    compressed_size,
    compression_rate,
    decode,
    decode_side,
    encode,
    select_side,
    with_segment,
)
from hybhuff.bitio import BitStream, bitwidth_for
from hybhuff.exceptions import CorruptArchiveError, DecodeError, DomainError
from hybhuff.frequency import build_frequency_profile
from hybhuff.hypergraph import Side, from_hyperedges, generate_zipfian_hypergraph

from conftest import random_instances

RHOS = (0.0, 0.05, 0.25, 0.5, 1.0)


def entity_lists(offsets, adjacency):
    return [adjacency[a:b].tolist() for a, b in zip(offsets[:-1], offsets[1:])]


def assert_multiset_equal(h, g):
    assert (h.num_vertices, h.num_hyperedges) == (g.num_vertices, g.num_hyperedges)
    for side in Side:
        mine = entity_lists(*h.side(side))
        theirs = entity_lists(*g.side(side))
        assert [Counter(x) for x in mine] == [Counter(x) for x in theirs]


@pytest.mark.parametrize(
    "n_v, n_h, side",
    [(5, 3, Side.HYPEREDGES), (3, 5, Side.VERTICES), (4, 4, Side.VERTICES)],
)
def test_select_side(n_v, n_h, side):
    edges = [[e % n_v, (e + 1) % n_v] for e in range(n_h)]
    h = from_hyperedges(edges, num_vertices=n_v)
    chosen, offsets, adjacency = select_side(h)
    assert chosen is side
    want = h.hyperedge_adjacency if side is Side.HYPEREDGES else h.vertex_adjacency
    assert np.array_equal(adjacency, want)


def test_rho_zero_endpoint(toy):
    a = encode(toy, 0.0)
    assert a.huffman_stream.bit_length == 0
    assert a.huffman_counts().tolist() == [0] * a.num_entities
    width = bitwidth_for(int(select_side(toy)[2].max()))
    assert a.bitwise_width == width
    assert a.payload_bits == toy.num_incidences * width


def test_rho_one_endpoint():
    h = generate_zipfian_hypergraph(300, 40, 2000, 1.3, seed=2)
    a = encode(h, 1.0)
    assert a.bitwise_stream.bit_length == 0
    assert np.array_equal(a.huffman_counts(), a.degrees())


def test_toy_roundtrip(toy):
    for rho in (0.0, 1.0):
        assert_multiset_equal(toy, decode(encode(toy, rho)))


def test_empty_roundtrip():
    h = from_hyperedges([], 0)
    a = encode(h, 0.5)
    assert a.num_incidences == 0 and a.payload_bits == 0
    assert decode(HybridArchive.from_bytes(a.to_bytes())) == h
    assert list(adjacency_iterator(a)) == []


def test_isolated_entities_roundtrip():
    h = from_hyperedges([[], [0, 3], [], [3]], num_vertices=6)
    for rho in RHOS:
        assert_multiset_equal(h, decode(HybridArchive.from_bytes(encode(h, rho).to_bytes())))


def test_random_roundtrips():
    for h in random_instances(31, 40, max_vertices=200, max_hyperedges=200, max_incidences=5000):
        for rho in RHOS:
            a = HybridArchive.from_bytes(encode(h, rho).to_bytes())
            assert_multiset_equal(h, decode(a))


def test_stable_partition_order():
    # symbol 1 dominates and is the only Huffman symbol at m = 1
    h = from_hyperedges([[3, 1, 2], [1, 0]], num_vertices=4)
    assert select_side(h)[0] is Side.HYPEREDGES
    offsets, adjacency = decode_side(encode(h, domain_size=1))
    assert entity_lists(offsets, adjacency) == [[1, 3, 2], [1, 0]]


def test_canonical_mode_byte_identical():
    h = generate_zipfian_hypergraph(400, 60, 3000, 1.4, seed=6)
    for rho in RHOS:
        a = encode(h, rho, canonical=True)
        assert a.canonical
        assert decode(a) == h.canonical()


def test_deterministic_bytes():
    h = generate_zipfian_hypergraph(400, 60, 3000, 1.4, seed=6)
    assert encode(h, 0.3).to_bytes() == encode(h, 0.3).to_bytes()


def test_header_and_segment_sizes():
    h = generate_zipfian_hypergraph(400, 60, 3000, 1.4, seed=6)
    a = encode(h, 0.25)
    data = a.to_bytes()
    assert data[:4] == b"HYBH" and data[4] == 1
    assert len(data) == HEADER_SIZE + sum(s.nbytes for s in a.segments())
    for seg in a.segments():
        assert seg.nbytes == -(-seg.bit_length // 8)
    assert a.bitwise_stream.bit_length == a.bitwise_width * int((a.degrees() - a.huffman_counts()).sum())
    assert compressed_size(a) == len(data)


def test_coded_bits_prediction_matches_encoder():
    h = generate_zipfian_hypergraph(2000, 300, 20000, 1.5, seed=8)
    _, _, adjacency = select_side(h)
    p = build_frequency_profile(adjacency)
    payload, tree = coded_bits_curve(p)
    for m in sorted({0, 1, 2, 7, 50, p.num_symbols // 2, p.num_symbols}):
        a = encode(h, domain_size=m)
        assert (a.payload_bits, a.tree.bit_length) == coded_bits_for(p, m)
        assert (payload[m], tree[m]) == coded_bits_for(p, m)


def test_u_shape_small_zipf():
    h = generate_zipfian_hypergraph(10**4, 2000, 10**5, 1.5, seed=3)
    _, _, adjacency = select_side(h)
    p = build_frequency_profile(adjacency)
    payload, tree = coded_bits_curve(p)
    total = payload + tree
    best = int(np.argmin(total))
    assert 0 < best < p.num_symbols
    assert total[best] < total[0] and total[best] < total[-1]
    assert encode(h, domain_size=best).coded_bits == total[best]


# -- corruption diagnostics ------------------------------------------------------


def corrupt(data, name):
    archive = HybridArchive.from_bytes(data)
    index = ("tree", "degree_metadata", "huffman_count_metadata", "huffman_stream", "bitwise_stream").index(name)
    start = HEADER_SIZE + sum(s.nbytes for s in archive.segments()[:index])
    buf = bytearray(data)
    buf[start] ^= 0x80
    return bytes(buf)


@pytest.mark.parametrize(
    "segment",
    ["tree", "degree_metadata", "huffman_count_metadata", "huffman_stream", "bitwise_stream"],
)
def test_corrupted_byte_names_segment(segment):
    h = generate_zipfian_hypergraph(400, 60, 3000, 1.4, seed=6)
    data = encode(h, 0.25).to_bytes()
    with pytest.raises(CorruptArchiveError) as info:
        HybridArchive.from_bytes(corrupt(data, segment))
    assert info.value.segment == segment
    assert segment in str(info.value)


def test_bad_magic_and_truncation():
    h = generate_zipfian_hypergraph(400, 60, 3000, 1.4, seed=6)
    data = encode(h, 0.25).to_bytes()
    with pytest.raises(CorruptArchiveError) as info:
        HybridArchive.from_bytes(b"XXXX" + data[4:])
    assert info.value.segment == "header"
    with pytest.raises(DecodeError):
        HybridArchive.from_bytes(data[:-5])


def test_semantic_corruption_detected():
    h = generate_zipfian_hypergraph(400, 60, 3000, 1.4, seed=6)
    a = encode(h, 0.25)
    hs = a.huffman_stream
    short = BitStream(hs.data[: (hs.bit_length - 1 + 7) // 8], hs.bit_length - 1)
    with pytest.raises(DecodeError) as info:
        decode(with_segment(a, "huffman_stream", short))
    assert info.value.segment == "huffman_stream"
    padded = BitStream(hs.data + b"\x00", hs.bit_length + 8)
    with pytest.raises(CorruptArchiveError):
        decode(with_segment(a, "huffman_stream", padded))


# -- lazy iterator -----------------------------------------------------------------


def test_iterator_matches_decode():
    h = generate_zipfian_hypergraph(500, 80, 4000, 1.2, seed=12)
    a = encode(h, 0.1)
    offsets, adjacency = decode_side(a)
    it = adjacency_iterator(a)
    first = list(it)
    assert first == entity_lists(offsets, adjacency)
    assert list(it) == first
    assert sum(len(x) for x in first) == a.num_incidences
    assert len(it) == a.num_entities


def test_compression_rate():
    assert compression_rate(100, 100) == 0.0
    assert compression_rate(400, 100) == 75.0
    with pytest.raises(DomainError):
        compression_rate(0, 10)
