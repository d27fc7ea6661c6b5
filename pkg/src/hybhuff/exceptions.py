"""Exception hierarchy.

Every error raised by the library derives from :class:`HybHuffError`. The CLI
maps each subclass to its own exit code (see ``EXIT_CODES``).
"""


class HybHuffError(Exception):
    """Base class for all library errors."""


class FormatError(HybHuffError):
    """Malformed text or binary input (bad header, missing integers)."""


class StructureError(HybHuffError):
    """Offset arrays are not monotone or do not close on the adjacency length."""


class RangeError(HybHuffError, ValueError):
    """An ID or value lies outside its permitted range."""


class ConsistencyError(HybHuffError):
    """The two sides of a hypergraph disagree (incidence duality violated)."""


class GenerationError(HybHuffError):
    """Requested synthetic hypergraph is infeasible."""


class DomainError(HybHuffError, ValueError):
    """An argument lies outside the domain of a function."""


class ModelError(HybHuffError, ValueError):
    """The closed-form cost model is undefined for the given parameters."""


class FitError(HybHuffError):
    """Least-squares fit cannot be computed (too few points, singular design)."""


class DecodeError(HybHuffError):
    """A bitstream or archive could not be decoded."""

    def __init__(self, message, segment=None):
        super().__init__(message if segment is None else f"[{segment}] {message}")
        self.segment = segment


class TruncationError(DecodeError):
    """A reader ran out of bits."""


class CorruptArchiveError(DecodeError):
    """Archive metadata is inconsistent or a segment checksum does not match."""


class HuffmanInvariantError(HybHuffError):
    """A built code violates prefix-freeness or the length cap."""


EXIT_CODES = {
    FormatError: 3,
    StructureError: 4,
    RangeError: 5,
    ConsistencyError: 6,
    GenerationError: 7,
    DomainError: 8,
    ModelError: 8,
    FitError: 9,
    CorruptArchiveError: 11,
    TruncationError: 12,
    DecodeError: 10,
    HuffmanInvariantError: 13,
}


def exit_code_for(exc):
    for cls in type(exc).__mro__:
        if cls in EXIT_CODES:
            return EXIT_CODES[cls]
    return 1
