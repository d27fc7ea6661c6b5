import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from hybhuff import HybridHuffmanCompressor
from hybhuff.archive import HybridArchive
from hybhuff.exceptions import DomainError
from hybhuff.hypergraph import generate_zipfian_hypergraph, serialize_adjacency_hypergraph
from hybhuff.optimizer import coarse_to_fine_search


@pytest.fixture(scope="module")
def graph():
    return generate_zipfian_hypergraph(2000, 300, 20000, 1.5, seed=1)


def test_params_roundtrip():
    est = HybridHuffmanCompressor(rho=0.2, alpha=8.0, canonical=True)
    params = est.get_params()
    assert params == {
        "rho": 0.2,
        "alpha": 8.0,
        "search": "coarse_to_fine",
        "canonical": True,
        "strict": False,
    }
    est.set_params(rho="auto")
    assert est.rho == "auto"
    twin = clone(est)
    assert twin.get_params() == est.get_params() and twin is not est


def test_not_fitted(graph):
    with pytest.raises(NotFittedError):
        HybridHuffmanCompressor().transform(graph)


def test_fit_auto_matches_search(graph):
    est = HybridHuffmanCompressor(alpha=32.0).fit(graph)
    report = coarse_to_fine_search(est.profile_, 32.0)
    assert est.domain_size_ == report.best_m
    assert est.search_report_.best_m == report.best_m
    assert est.rho_ == est.domain_size_ / est.profile_.num_symbols
    assert est.book_.size == est.domain_size_


def test_fit_transform_inverse(graph):
    est = HybridHuffmanCompressor(rho=0.1, canonical=True)
    archive = est.fit_transform(graph)
    assert isinstance(archive, HybridArchive)
    assert archive.domain_size == est.domain_size_
    assert est.transform(graph).to_bytes() == archive.to_bytes()
    assert est.inverse_transform(archive) == graph.canonical()
    assert est.inverse_transform(archive.to_bytes()) == graph.canonical()
    assert est.search_report_ is None


def test_accepts_text_and_lists(graph):
    text = serialize_adjacency_hypergraph(graph)
    a = HybridHuffmanCompressor(rho=0.5).fit_transform(text)
    b = HybridHuffmanCompressor(rho=0.5).fit_transform(graph)
    assert a.to_bytes() == b.to_bytes()
    HybridHuffmanCompressor(rho=1.0).fit([[0, 1], [1, 2]])


def test_score_is_compression_rate(graph):
    est = HybridHuffmanCompressor(rho="auto").fit(graph)
    score = est.score(graph)
    assert 0 < score < 100


def test_exhaustive_search_mode(graph):
    est = HybridHuffmanCompressor(search="exhaustive").fit(graph)
    assert est.search_report_.mode == "exhaustive"


@pytest.mark.parametrize(
    "params, error",
    [({"rho": 1.5}, DomainError), ({"search": "random"}, ValueError), ({"alpha": -1.0}, DomainError)],
)
def test_parameter_validation(graph, params, error):
    with pytest.raises(error):
        HybridHuffmanCompressor(**params).fit(graph)


def test_alpha_env(graph, monkeypatch):
    monkeypatch.setenv("HYBHUFF_ALPHA", "100000")
    assert HybridHuffmanCompressor().fit(graph).domain_size_ == 0
