"""Fixed-width bit packing and bit-level readers.

Layout is MSB-first everywhere: within a field the high bit is written
first, and within a byte the first bit occupies position 7. Streams are
zero-padded to a byte boundary.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import RangeError, TruncationError

REGISTER_BITS = 64


@dataclass(frozen=True)
class BitStream:
    """Byte buffer plus the number of meaningful bits in it."""

    data: bytes = b""
    bit_length: int = 0

    def __post_init__(self):
        nbytes = len(self.data)
        if not (self.bit_length <= 8 * nbytes < self.bit_length + 8):
            raise ValueError(
                f"bit_length {self.bit_length} inconsistent with {nbytes} bytes"
            )

    def __len__(self):
        return self.bit_length

    @property
    def nbytes(self):
        return len(self.data)

    def reader(self):
        return BitReader(self)

    def bits(self):
        """Return the valid bits as a list of 0/1 ints."""
        arr = np.unpackbits(np.frombuffer(self.data, dtype=np.uint8))
        return arr[: self.bit_length].tolist()


def bitwidth_for(max_value):
    """Smallest ``b`` with ``2**b > max_value``; never less than 1."""
    if max_value < 0:
        raise RangeError(f"max_value must be non-negative, got {max_value}")
    return max(1, int(max_value).bit_length())


class BitWriter:
    """Accumulates variable-width fields in a 64-bit register.

    Whenever the register holds at least 64 pending bits the high 64 are
    flushed to the output as eight bytes.
    """

    def __init__(self):
        self._out = bytearray()
        self._reg = 0
        self._pending = 0
        self._written = 0

    def write(self, value, width):
        if width <= 0:
            if width == 0 and value == 0:
                return
            raise RangeError(f"invalid field width {width}")
        if value < 0 or value >> width:
            raise RangeError(f"value {value} does not fit in {width} bits")
        self._reg = (self._reg << width) | value
        self._pending += width
        self._written += width
        if self._pending >= REGISTER_BITS:
            spill = self._pending - REGISTER_BITS
            self._out += (self._reg >> spill).to_bytes(8, "big")
            self._reg &= (1 << spill) - 1
            self._pending = spill

    def write_bits(self, bits):
        for bit in bits:
            self.write(bit, 1)

    def __len__(self):
        return self._written

    def getstream(self):
        """Return the padded stream; the writer remains usable."""
        out = bytearray(self._out)
        if self._pending:
            pad = -self._pending % 8
            nbytes = (self._pending + pad) // 8
            out += (self._reg << pad).to_bytes(nbytes, "big")
        return BitStream(bytes(out), self._written)


PACK_CHUNK = 1 << 16


def pack(values, width):
    """Pack non-negative integers into ``width``-bit MSB-first fields.

    Raises :class:`RangeError` for any value that needs more than ``width``
    bits; values are never masked. The output is byte-identical to writing
    each value through :class:`BitWriter`; the fields are expanded to bits
    in blocks with numpy instead of looping over a register in Python.
    """
    if width < 1 or width > 64:
        raise RangeError(f"width must be in [1, 64], got {width}")
    values = _as_uint64(values, width)
    count = len(values)
    shifts = np.arange(width - 1, -1, -1, dtype=np.uint64)
    chunks = []
    for start in range(0, count, PACK_CHUNK):
        block = values[start : start + PACK_CHUNK, None]
        chunks.append(((block >> shifts) & np.uint64(1)).astype(np.uint8).ravel())
    bits = np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.uint8)
    return BitStream(np.packbits(bits).tobytes(), count * width)


def _as_uint64(values, width):
    if isinstance(values, np.ndarray) and values.dtype.kind in "iu":
        arr = values.ravel()
        if arr.size and arr.dtype.kind == "i" and arr.min() < 0:
            raise RangeError(f"value {int(arr.min())} does not fit in {width} bits")
        arr = arr.astype(np.uint64)
    else:
        items = [int(x) for x in values]
        for x in items:
            if x < 0 or x.bit_length() > width:
                raise RangeError(f"value {x} does not fit in {width} bits")
        return np.asarray(items, dtype=np.uint64)
    if width < 64 and arr.size and int(arr.max()) >> width:
        raise RangeError(f"value {int(arr.max())} does not fit in {width} bits")
    return arr


def unpack(stream, width, count, offset=0):
    """Read ``count`` fields of ``width`` bits starting at bit ``offset``.

    Returns an ``int64`` array (``uint64`` when ``width == 64``).
    """
    if count < 0:
        raise RangeError(f"count must be non-negative, got {count}")
    if count == 0:
        return np.zeros(0, dtype=np.int64)
    if not 1 <= width <= 64:
        raise RangeError(f"width must be in [1, 64], got {width}")
    end = offset + count * width
    if end > stream.bit_length:
        raise TruncationError(
            f"need {count * width} bits at offset {offset}, "
            f"stream holds {stream.bit_length}"
        )
    first, last = offset >> 3, (end + 7) >> 3
    raw = np.frombuffer(stream.data, dtype=np.uint8, count=last - first, offset=first)
    skip = offset - 8 * first
    bits = np.unpackbits(raw)[skip : skip + count * width].reshape(count, width)
    weights = np.left_shift(np.uint64(1), np.arange(width - 1, -1, -1, dtype=np.uint64))
    values = bits.astype(np.uint64) @ weights
    return values if width == 64 else values.astype(np.int64)


class BitReader:
    """Forward-only cursor over a :class:`BitStream`."""

    def __init__(self, stream, position=0):
        self.stream = stream
        self._data = stream.data
        self._limit = stream.bit_length
        self.position = position

    @property
    def remaining(self):
        return self._limit - self.position

    def exhausted(self):
        return self.position == self._limit

    def read_bit(self):
        pos = self.position
        if pos >= self._limit:
            raise TruncationError("bitstream exhausted")
        self.position = pos + 1
        return (self._data[pos >> 3] >> (7 - (pos & 7))) & 1

    def read(self, width):
        if width == 0:
            return 0
        pos = self.position
        end = pos + width
        if end > self._limit:
            raise TruncationError(
                f"need {width} bits, {self._limit - pos} remain"
            )
        first, last = pos >> 3, (end + 7) >> 3
        chunk = int.from_bytes(self._data[first:last], "big")
        self.position = end
        return (chunk >> (8 * last - end)) & ((1 << width) - 1)
