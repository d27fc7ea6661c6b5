"""Scikit-learn style front end to the hybrid coder."""

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .archive import compressed_size, compression_rate, decode, encode, select_side
from .frequency import build_frequency_profile, default_alpha, estimate_cost, huffman_domain_size
from .huffman import build_huffman
from .hypergraph import serialize_adjacency_hypergraph
from .optimizer import optimize
from .validation import check_alpha, check_archive, check_hypergraph, check_ratio


class HybridHuffmanCompressor(BaseEstimator):
    """Lossless hypergraph compressor mixing Huffman and fixed-width codes.

    Parameters
    ----------
    rho : float in [0, 1] or "auto"
        Fraction of distinct symbols (most frequent first) given Huffman
        codes. ``"auto"`` picks the domain size minimising the estimated cost.
    alpha : float or None
        Tree overhead per Huffman symbol in bits for the cost model. ``None``
        reads ``HYBHUFF_ALPHA`` or falls back to 32.
    search : {"coarse_to_fine", "exhaustive"}
        Optimiser used when ``rho="auto"``.
    canonical : bool
        Sort every adjacency list so decoding reproduces the input byte for byte
        (after the same sort).
    strict : bool
        Run the duality check on inputs.

    Attributes
    ----------
    side_ : Side
        Side of the bipartition that gets stored.
    profile_ : FrequencyProfile
    domain_size_ : int
        Number of symbols in the Huffman domain.
    rho_ : float
        ``domain_size_ / K``.
    book_ : HuffmanBook
    search_report_ : SearchReport or None
        Set only when ``rho="auto"``.
    estimated_bits_ : float
    """

    def __init__(self, rho="auto", alpha=None, search="coarse_to_fine", canonical=False, strict=False):
        self.rho = rho
        self.alpha = alpha
        self.search = search
        self.canonical = canonical
        self.strict = strict

    def _alpha(self):
        return default_alpha() if self.alpha is None else check_alpha(self.alpha)

    def fit(self, X, y=None):
        h = check_hypergraph(X, strict=self.strict)
        rho = check_ratio(self.rho)
        if self.search not in ("coarse_to_fine", "exhaustive"):
            raise ValueError(f"unknown search mode {self.search!r}")
        alpha = self._alpha()
        side, _, adjacency = select_side(h)
        profile = build_frequency_profile(adjacency)
        k = profile.num_symbols
        if rho == "auto":
            report = optimize(profile, alpha, exhaustive=self.search == "exhaustive")
            m = report.best_m
        else:
            report = None
            m = huffman_domain_size(rho, k)
        self.side_ = side
        self.profile_ = profile
        self.domain_size_ = m
        self.rho_ = m / k if k else 0.0
        self.book_ = build_huffman(profile, domain_size=m)
        self.search_report_ = report
        self.estimated_bits_ = estimate_cost(profile, m, alpha)
        return self

    def transform(self, X):
        """Encode ``X`` at the fitted ratio; returns a :class:`HybridArchive`."""
        check_is_fitted(self, "domain_size_")
        h = check_hypergraph(X, strict=self.strict)
        return encode(h, self.rho_, canonical=self.canonical)

    def fit_transform(self, X, y=None):
        h = check_hypergraph(X, strict=self.strict)
        self.fit(h)
        return encode(h, domain_size=self.domain_size_, canonical=self.canonical)

    def inverse_transform(self, archive):
        return decode(check_archive(archive))

    def score(self, X, y=None):
        """Compression rate in percent against the text serialisation of ``X``."""
        h = check_hypergraph(X, strict=self.strict)
        original = len(serialize_adjacency_hypergraph(h))
        return compression_rate(original, compressed_size(self.transform(h)))
