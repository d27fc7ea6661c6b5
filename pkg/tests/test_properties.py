"""Property-based checks on small generated inputs."""

import math

from hypothesis import given, settings
from hypothesis import strategies as st

from hybhuff.archive import HybridArchive, decode, encode
from hybhuff.bitio import BitWriter, pack, unpack
from hybhuff.frequency import build_frequency_profile
from hybhuff.huffman import build_huffman, check_prefix_free
from hybhuff.hypergraph import from_hyperedges


@st.composite
def width_and_values(draw):
    width = draw(st.integers(1, 64))
    values = draw(st.lists(st.integers(0, 2**width - 1), max_size=80))
    return width, values


@given(width_and_values())
def test_pack_unpack_roundtrip(case):
    width, values = case
    stream = pack(values, width)
    assert stream.bit_length == width * len(values)
    assert stream.nbytes == math.ceil(stream.bit_length / 8)
    assert [int(v) for v in unpack(stream, width, len(values))] == values


@given(width_and_values())
def test_pack_matches_register_writer(case):
    width, values = case
    writer = BitWriter()
    for v in values:
        writer.write(v, width)
    assert writer.getstream() == pack(values, width)


@given(st.lists(st.integers(0, 200), min_size=1, max_size=300), st.floats(0, 1))
def test_huffman_code_is_prefix_free_and_kraft(symbols, rho):
    book = build_huffman(build_frequency_profile(symbols), rho=rho)
    check_prefix_free(book.codes)
    assert sum(2.0 ** -length for _, length in book.codes.values()) <= 1.0


hyperedges = st.lists(st.lists(st.integers(0, 30), min_size=1, max_size=8, unique=True), max_size=25)


@settings(max_examples=60)
@given(hyperedges, st.sampled_from([0.0, 0.05, 0.25, 0.5, 1.0]), st.booleans())
def test_archive_roundtrip(edges, rho, canonical):
    h = from_hyperedges(edges, num_vertices=31)
    archive = HybridArchive.from_bytes(encode(h, rho, canonical=canonical).to_bytes())
    assert decode(archive).canonical() == h.canonical()
