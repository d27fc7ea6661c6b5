from collections import Counter

import numpy as np
import pytest

from hybhuff.exceptions import (
    ConsistencyError,
    FormatError,
    GenerationError,
    RangeError,
    StructureError,
)
from hybhuff.hypergraph import (
    Hypergraph,
    Side,
    from_hyperedges,
    generate_random_hypergraph,
    generate_zipfian_hypergraph,
    load_hypergraph,
    parse_adjacency_hypergraph,
    parse_binary,
    rebuild_dual,
    save_hypergraph,
    serialize_adjacency_hypergraph,
    serialize_binary,
)

TOY_TEXT = b"AdjacencyHypergraph\n2\n2\n1\n2\n0\n1\n0\n0\n0\n0\n1\n"
EMPTY_TEXT = b"AdjacencyHypergraph\n0\n0\n0\n0\n"


def lists(offsets, adjacency):
    return [adjacency[a:b].tolist() for a, b in zip(offsets[:-1], offsets[1:])]


def test_parse_toy():
    h = parse_adjacency_hypergraph(TOY_TEXT, strict=True)
    assert (h.num_vertices, h.num_hyperedges, h.num_incidences) == (2, 1, 2)
    assert lists(h.vertex_offsets, h.vertex_adjacency) == [[0], [0]]
    assert lists(h.hyperedge_offsets, h.hyperedge_adjacency) == [[0, 1]]
    assert h.vertex_offsets.tolist() == [0, 1, 2]  # sentinel appended


def test_parse_empty():
    h = parse_adjacency_hypergraph(EMPTY_TEXT)
    assert h.num_incidences == 0 and h.num_vertices == 0 and h.num_hyperedges == 0


def test_serialize_toy_and_empty_exact():
    assert serialize_adjacency_hypergraph(from_hyperedges([[0, 1]], 2)) == TOY_TEXT
    assert serialize_adjacency_hypergraph(from_hyperedges([], 0)) == EMPTY_TEXT


def test_parse_tolerates_whitespace():
    text = "\n  AdjacencyHypergraph \n2 2 1 2\n0 1\n0 0\n0\n0 1\n"
    assert parse_adjacency_hypergraph(text) == parse_adjacency_hypergraph(TOY_TEXT)


def test_small_random_roundtrip():
    h = generate_zipfian_hypergraph(10, 4, 20, 1.0, seed=3)
    text = serialize_adjacency_hypergraph(h)
    again = parse_adjacency_hypergraph(text, strict=True)
    assert again == h
    assert serialize_adjacency_hypergraph(again) == text


def test_roundtrip_1000_random():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        h = generate_random_hypergraph(rng, 30, 30, 300)
        text = serialize_adjacency_hypergraph(h)
        assert parse_adjacency_hypergraph(text) == h
        assert parse_binary(serialize_binary(h)) == h


@pytest.mark.parametrize(
    "text, error",
    [
        (b"Hypergraph\n0\n0\n0\n0\n", FormatError),
        (b"AdjacencyHypergraph\n2\n2\n1\n", FormatError),
        (b"AdjacencyHypergraph\n2\n2\n1\n2\n0\nx\n0\n0\n0\n0\n1\n", FormatError),
        (b"AdjacencyHypergraph\n2\n2\n1\n2\n1\n0\n0\n0\n0\n0\n1\n", StructureError),
        (b"AdjacencyHypergraph\n2\n2\n1\n2\n0\n1\n0\n3\n0\n0\n1\n", RangeError),
    ],
)
def test_parse_errors(text, error):
    with pytest.raises(error):
        parse_adjacency_hypergraph(text)


def test_format_error_names_line():
    bad = b"AdjacencyHypergraph\n2\n2\n1\n2\n0\nx\n0\n0\n0\n0\n1\n"
    with pytest.raises(FormatError, match="line 7"):
        parse_adjacency_hypergraph(bad)


def test_duality_check_is_optional():
    # vertex side says v1 is in h0, hyperedge side says only v0 and v0
    text = b"AdjacencyHypergraph\n2\n2\n1\n2\n0\n1\n0\n0\n0\n0\n0\n"
    parse_adjacency_hypergraph(text)
    with pytest.raises(ConsistencyError):
        parse_adjacency_hypergraph(text, strict=True)


def test_rebuild_dual_examples():
    h = rebuild_dual([0, 2], [0, 1], Side.HYPEREDGES, 2, 1)
    assert lists(h.vertex_offsets, h.vertex_adjacency) == [[0], [0]]
    h = rebuild_dual([0, 1, 2], [0, 0], Side.HYPEREDGES, 1, 2)
    assert lists(h.vertex_offsets, h.vertex_adjacency) == [[0, 1]]


def test_rebuild_dual_range_error():
    with pytest.raises(RangeError):
        rebuild_dual([0, 1], [5], Side.HYPEREDGES, 2, 1)


def test_double_inversion_preserves_multisets():
    rng = np.random.default_rng(7)
    for _ in range(50):
        h = generate_random_hypergraph(rng, 60, 60, 800)
        h.check_duality()
        once = rebuild_dual(
            h.vertex_offsets, h.vertex_adjacency, Side.VERTICES, h.num_vertices, h.num_hyperedges
        )
        once.check_duality()
        twice = rebuild_dual(
            once.hyperedge_offsets,
            once.hyperedge_adjacency,
            Side.HYPEREDGES,
            h.num_vertices,
            h.num_hyperedges,
        )
        for a, b in zip(
            lists(h.hyperedge_offsets, h.hyperedge_adjacency),
            lists(twice.hyperedge_offsets, twice.hyperedge_adjacency),
        ):
            assert Counter(a) == Counter(b)


def test_rebuilt_lists_sorted_by_source():
    h = rebuild_dual([0, 2, 3, 5], [1, 0, 1, 1, 0], Side.HYPEREDGES, 2, 3)
    assert lists(h.vertex_offsets, h.vertex_adjacency) == [[0, 2], [0, 1, 2]]


def test_binary_file_roundtrip(tmp_path):
    h = generate_zipfian_hypergraph(50, 20, 300, 1.2, seed=1)
    save_hypergraph(h, tmp_path / "g.hgb", binary=True)
    save_hypergraph(h, tmp_path / "g.txt")
    assert (tmp_path / "g.hgb").read_bytes()[:4] == b"HGB1"
    assert load_hypergraph(tmp_path / "g.hgb") == h
    assert load_hypergraph(tmp_path / "g.txt") == h


def test_hypergraph_invariants_enforced():
    with pytest.raises(StructureError):
        Hypergraph(1, 1, [0, 2], [0], [0, 1], [0])
    with pytest.raises(RangeError):
        Hypergraph(1, 1, [0, 1], [1], [0, 1], [0])


def test_generator_near_uniform_for_small_z():
    h = generate_zipfian_hypergraph(100, 1000, 10**5, 0.01, seed=5)
    freq = np.bincount(h.hyperedge_adjacency, minlength=100)
    assert freq.max() / freq.min() < 2


def test_generator_skew(zipf_fixture):
    freq = np.sort(np.bincount(zipf_fixture.hyperedge_adjacency))[::-1]
    top = freq[: zipf_fixture.num_vertices // 100].sum()
    assert top / zipf_fixture.num_incidences > 0.30


def test_generator_sets_and_invariants():
    h = generate_zipfian_hypergraph(40, 30, 600, 1.5, seed=11)
    h.check_duality()
    assert h.num_incidences == 600
    for edge in lists(h.hyperedge_offsets, h.hyperedge_adjacency):
        assert len(edge) == len(set(edge)) >= 1


def test_generator_deterministic():
    a = generate_zipfian_hypergraph(200, 50, 2000, 1.3, seed=9)
    b = generate_zipfian_hypergraph(200, 50, 2000, 1.3, seed=9)
    c = generate_zipfian_hypergraph(200, 50, 2000, 1.3, seed=10)
    assert a == b
    assert a != c


@pytest.mark.parametrize("args", [(5, 2, 11, 1.0), (5, 4, 3, 1.0), (5, 2, 4, 0.0)])
def test_generator_infeasible(args):
    with pytest.raises(GenerationError):
        generate_zipfian_hypergraph(*args, seed=0)
