"""Input checks shared by the estimator and the CLI."""

import math
import numbers

from .archive import HybridArchive
from .exceptions import DomainError
from .hypergraph import (
    BINARY_MAGIC,
    Hypergraph,
    from_hyperedges,
    parse_adjacency_hypergraph,
    parse_binary,
)


def check_hypergraph(X, strict=False):
    """Coerce ``X`` to a :class:`Hypergraph`.

    Accepts a hypergraph, serialised text/binary bytes, or a sequence of
    hyperedge vertex lists.
    """
    if isinstance(X, Hypergraph):
        h = X
        if strict:
            h.check_duality()
        return h
    if isinstance(X, (bytes, bytearray)):
        if bytes(X[:4]) == BINARY_MAGIC:
            return parse_binary(X, strict=strict)
        return parse_adjacency_hypergraph(X, strict=strict)
    if isinstance(X, str):
        return parse_adjacency_hypergraph(X, strict=strict)
    try:
        return from_hyperedges(X)
    except TypeError:
        raise TypeError(
            f"expected a Hypergraph, serialised bytes or hyperedge lists, got {type(X).__name__}"
        ) from None


def check_archive(obj):
    if isinstance(obj, HybridArchive):
        return obj
    if isinstance(obj, (bytes, bytearray)):
        return HybridArchive.from_bytes(obj)
    raise TypeError(f"expected a HybridArchive or bytes, got {type(obj).__name__}")


def check_ratio(rho, allow_auto=True):
    if allow_auto and isinstance(rho, str) and rho == "auto":
        return rho
    if isinstance(rho, bool) or not isinstance(rho, numbers.Real):
        raise DomainError(f"ratio must be a number in [0, 1], got {rho!r}")
    rho = float(rho)
    if not 0.0 <= rho <= 1.0:
        raise DomainError(f"ratio must lie in [0, 1], got {rho}")
    return rho


def check_alpha(alpha):
    if isinstance(alpha, bool) or not isinstance(alpha, numbers.Real):
        raise DomainError(f"alpha must be a real number, got {alpha!r}")
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha < 0:
        raise DomainError(f"alpha must be finite and non-negative, got {alpha}")
    return alpha
