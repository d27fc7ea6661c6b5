"""Lossless hypergraph compression mixing Huffman and fixed-width codes."""

from .archive import (
    HybridArchive,
    adjacency_iterator,
    compressed_size,
    compression_rate,
    decode,
    encode,
    select_side,
)
from .bitio import BitStream, bitwidth_for, pack, unpack
from .estimator import HybridHuffmanCompressor
from .exceptions import HybHuffError
from .frequency import (
    asymptotic_cost_zipf,
    build_frequency_profile,
    estimate_cost,
    fit_size_curve,
)
from .huffman import build_huffman
from .hypergraph import (
    Hypergraph,
    Side,
    generate_zipfian_hypergraph,
    parse_adjacency_hypergraph,
    rebuild_dual,
    serialize_adjacency_hypergraph,
)
from .optimizer import coarse_to_fine_search, exhaustive_scan
from .workloads import bfs, kcore_label_propagation, pagerank

__version__ = "0.1.0"
