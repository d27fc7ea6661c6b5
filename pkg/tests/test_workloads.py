import numpy as np
import pytest

from hybhuff.archive import encode
from hybhuff.exceptions import DomainError
from hybhuff.hypergraph import from_hyperedges, generate_zipfian_hypergraph
from hybhuff.workloads import (
    UNREACHED,
    ArchiveSource,
    RawSource,
    bfs,
    kcore_label_propagation,
    pagerank,
)

from conftest import random_instances


def test_bfs_single_hyperedge():
    h = from_hyperedges([[0, 1, 2]])
    assert bfs(h, 0).tolist() == [0, 1, 1]


def test_bfs_chain_and_disconnected():
    h = from_hyperedges([[0, 1], [1, 2], [2, 3]], num_vertices=5)
    assert bfs(h, 0).tolist() == [0, 1, 2, 3, UNREACHED]


def test_bfs_root_range():
    with pytest.raises(DomainError):
        bfs(from_hyperedges([[0, 1]]), 2)


def test_bfs_triangle_property():
    h = generate_zipfian_hypergraph(300, 100, 1200, 1.1, seed=3)
    level = bfs(h, 0)
    for e in range(h.num_hyperedges):
        members = level[h.hyperedge_neighbors(e)]
        reached = members[members != UNREACHED]
        if len(reached):
            assert len(reached) == len(members)
            assert reached.max() - reached.min() <= 1


def test_pagerank_zero_iterations_uniform():
    h = from_hyperedges([[0, 1], [1, 2, 3]])
    assert np.allclose(pagerank(h, iterations=0), 0.25)


def test_pagerank_symmetric_pair():
    rank = pagerank(from_hyperedges([[0, 1]]), iterations=30)
    assert rank[0] == rank[1] == pytest.approx(0.5)


def test_pagerank_mass_conserved_with_dangling():
    h = from_hyperedges([[0, 1], [1, 2, 3], [3]], num_vertices=7)
    for it in range(0, 15):
        assert abs(pagerank(h, iterations=it).sum() - 1.0) < 1e-9


def test_pagerank_argument_checks():
    h = from_hyperedges([[0, 1]])
    with pytest.raises(DomainError):
        pagerank(h, damping=1.0)
    with pytest.raises(DomainError):
        pagerank(h, iterations=-1)


def test_kcore_single_hyperedge_k1():
    assert kcore_label_propagation(from_hyperedges([[0, 1, 2]]), 1).tolist() == [1, 1, 1]


def test_kcore_k_above_max_degree():
    h = from_hyperedges([[0, 1], [1, 2], [0, 2]])
    assert kcore_label_propagation(h, 3).tolist() == [0, 0, 0]


def test_kcore_cascade():
    # triangle of pairwise hyperedges survives k=2; the pendant vertex 3 dies,
    # which kills hyperedge {2, 3} but not the triangle
    h = from_hyperedges([[0, 1], [1, 2], [0, 2], [2, 3]])
    assert kcore_label_propagation(h, 2).tolist() == [1, 1, 1, 0]


def test_kcore_bad_k():
    with pytest.raises(DomainError):
        kcore_label_propagation(from_hyperedges([[0, 1]]), 0)


def test_archive_source_matches_raw():
    h = generate_zipfian_hypergraph(200, 60, 1500, 1.3, seed=4)
    raw = RawSource(h)
    for rho in (0.0, 0.3, 1.0):
        src = ArchiveSource(encode(h, rho))
        for v in range(h.num_vertices):
            assert sorted(src.vertex_neighbors(v)) == sorted(raw.vertex_neighbors(v))
        for e in range(h.num_hyperedges):
            assert sorted(src.hyperedge_neighbors(e)) == sorted(raw.hyperedge_neighbors(e))


def test_backend_equivalence_random():
    for h in random_instances(5, 15, max_vertices=120, max_hyperedges=120, max_incidences=1500):
        if h.num_vertices == 0:
            continue
        for rho in (0.0, 0.25, 1.0):
            a = encode(h, rho)
            assert np.array_equal(bfs(h, 0), bfs(a, 0))
            assert np.array_equal(kcore_label_propagation(h, 2), kcore_label_propagation(a, 2))
            assert np.max(np.abs(pagerank(h) - pagerank(a))) <= 1e-12
