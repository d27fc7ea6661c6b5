"""Huffman code over the top-ranked symbols of a frequency profile.

Trees are flat: node ``i`` has ``left[i]``, ``right[i]`` and ``symbol[i]``
(``-1`` for internal nodes). Codes follow left = 0, right = 1.

Serialised form is a pre-order walk, one marker bit per node (1 = leaf,
0 = internal), each leaf followed by its symbol in a fixed-width field.
"""

import heapq
from dataclasses import dataclass

import numpy as np

from .bitio import BitReader, BitStream, BitWriter, bitwidth_for
from .exceptions import DecodeError, HuffmanInvariantError, TruncationError
from .frequency import huffman_domain_size

DEFAULT_MAX_CODE_LEN = 64


@dataclass(frozen=True, eq=False)
class HuffmanTree:
    left: tuple
    right: tuple
    symbol: tuple
    root: int

    @property
    def num_nodes(self):
        return len(self.symbol)

    @property
    def num_leaves(self):
        return sum(1 for s in self.symbol if s >= 0)

    def is_empty(self):
        return self.root < 0

    def leaf_symbols(self):
        return [s for s in self.symbol if s >= 0]


EMPTY_TREE = HuffmanTree((), (), (), -1)


@dataclass(frozen=True, eq=False)
class HuffmanBook:
    """A built code: tree, codeword table and the symbols it covers."""

    tree: HuffmanTree
    codes: dict
    max_code_len: int = DEFAULT_MAX_CODE_LEN

    @property
    def symbols(self):
        return list(self.codes)

    @property
    def size(self):
        return len(self.codes)

    def __len__(self):
        return len(self.codes)

    def __contains__(self, symbol):
        return symbol in self.codes

    @property
    def lengths(self):
        return {s: length for s, (_, length) in self.codes.items()}

    def code_bits(self, symbol):
        code, length = self.codes[symbol]
        return tuple((code >> (length - 1 - i)) & 1 for i in range(length))

    def symbol_width(self):
        """Leaf field width used by :func:`serialize_tree`; 0 for an empty book."""
        if not self.codes:
            return 0
        return bitwidth_for(max(self.codes))


def build_tree(symbols, freqs):
    """Greedy min-heap merge; ties ordered by (frequency, smallest symbol ID)."""
    symbols = [int(s) for s in symbols]
    freqs = [int(f) for f in freqs]
    if not symbols:
        return EMPTY_TREE
    left = [-1] * len(symbols)
    right = [-1] * len(symbols)
    label = list(symbols)
    heap = [(f, s, i) for i, (s, f) in enumerate(zip(symbols, freqs))]
    heapq.heapify(heap)
    while len(heap) > 1:
        fu, su, u = heapq.heappop(heap)
        fv, sv, v = heapq.heappop(heap)
        w = len(label)
        left.append(u)
        right.append(v)
        label.append(-1)
        heapq.heappush(heap, (fu + fv, min(su, sv), w))
    return HuffmanTree(tuple(left), tuple(right), tuple(label), heap[0][2])


def assign_codes(tree, max_code_len=DEFAULT_MAX_CODE_LEN):
    """Map each leaf symbol to ``(code, length)``; a lone leaf gets the code ``0``."""
    if tree.is_empty():
        return {}
    if tree.symbol[tree.root] >= 0:
        return {tree.symbol[tree.root]: (0, 1)}
    codes = {}
    stack = [(tree.root, 0, 0)]
    while stack:
        node, code, depth = stack.pop()
        sym = tree.symbol[node]
        if sym >= 0:
            if sym in codes:
                raise HuffmanInvariantError(f"symbol {sym} appears on two leaves")
            codes[sym] = (code, depth)
            continue
        stack.append((tree.right[node], (code << 1) | 1, depth + 1))
        stack.append((tree.left[node], code << 1, depth + 1))
    longest = max(length for _, length in codes.values())
    if longest > max_code_len:
        raise HuffmanInvariantError(
            f"code length {longest} exceeds the {max_code_len}-bit cap"
        )
    check_prefix_free(codes)
    return codes


def check_prefix_free(codes):
    words = sorted(format(c, f"0{n}b") for c, n in codes.values())
    for a, b in zip(words, words[1:]):
        if b.startswith(a):
            raise HuffmanInvariantError(f"codeword {a} is a prefix of {b}")


def build_huffman(profile, rho=None, domain_size=None, max_code_len=DEFAULT_MAX_CODE_LEN):
    """Book over the ``floor(rho * K)`` (or ``domain_size``) top-ranked symbols.

    Frequencies are not normalised: scaling by a positive constant leaves
    the merge order, and hence the tree, unchanged.
    """
    if (rho is None) == (domain_size is None):
        raise TypeError("pass exactly one of rho or domain_size")
    k = profile.num_symbols
    m = huffman_domain_size(rho, k) if domain_size is None else int(domain_size)
    if not 0 <= m <= k:
        raise ValueError(f"domain size {m} outside [0, {k}]")
    tree = build_tree(profile.ranked_symbols[:m].tolist(), profile.ranked_counts[:m].tolist())
    return HuffmanBook(tree, assign_codes(tree, max_code_len), max_code_len)


def weighted_code_length(counts, presorted=False):
    """Total ``sum f_i * l_i`` of an optimal code for ``counts``.

    Two-queue merge in O(n) for ascending input. Any Huffman tree attains the
    same total, so this equals ``sum f * len`` for :func:`build_huffman`. A
    single symbol costs one bit per occurrence.
    """
    leaves = [int(c) for c in counts]
    if not presorted:
        leaves.sort()
    n = len(leaves)
    if n == 0:
        return 0
    if n == 1:
        return leaves[0]
    # sentinel-terminated queues avoid bounds checks in the loop
    inf = float("inf")
    leaves.append(inf)
    merged = [inf] * n
    i = j = tail = 0
    total = 0
    for _ in range(n - 1):
        if leaves[i] <= merged[j]:
            a = leaves[i]
            i += 1
        else:
            a = merged[j]
            j += 1
        if leaves[i] <= merged[j]:
            a += leaves[i]
            i += 1
        else:
            a += merged[j]
            j += 1
        merged[tail] = a
        tail += 1
        total += a
    return total


# -- serialisation -------------------------------------------------------------


def tree_bit_length(num_leaves, symbol_width):
    if num_leaves == 0:
        return 0
    return 2 * num_leaves - 1 + num_leaves * symbol_width


def serialize_tree(tree, symbol_width):
    if isinstance(tree, HuffmanBook):
        tree = tree.tree
    writer = BitWriter()
    if tree.is_empty():
        return writer.getstream()
    stack = [tree.root]
    while stack:
        node = stack.pop()
        sym = tree.symbol[node]
        if sym >= 0:
            writer.write(1, 1)
            writer.write(sym, symbol_width)
        else:
            writer.write(0, 1)
            stack.append(tree.right[node])
            stack.append(tree.left[node])
    return writer.getstream()


def deserialize_tree(stream, symbol_width, reader=None):
    """Rebuild a tree from its pre-order bitstring.

    An empty stream yields the empty tree. Nodes are numbered in pre-order.
    """
    if reader is None:
        if stream.bit_length == 0:
            return EMPTY_TREE
        reader = BitReader(stream)
    left, right, label = [], [], []

    def read_node():
        idx = len(label)
        if reader.read_bit():
            label.append(reader.read(symbol_width))
        else:
            label.append(-1)
        left.append(-1)
        right.append(-1)
        return idx

    try:
        root = read_node()
        pending = [] if label[root] >= 0 else [(root, right), (root, left)]
        while pending:
            parent, slot = pending.pop()
            child = read_node()
            slot[parent] = child
            if label[child] < 0:
                pending.append((child, right))
                pending.append((child, left))
    except TruncationError:
        raise TruncationError("tree bitstring ends mid-node", segment="tree") from None
    return HuffmanTree(tuple(left), tuple(right), tuple(label), root)


def book_from_tree(tree, max_code_len=DEFAULT_MAX_CODE_LEN):
    return HuffmanBook(tree, assign_codes(tree, max_code_len), max_code_len)


# -- coding --------------------------------------------------------------------


def decode_symbol(reader, tree):
    """Walk from the root one bit at a time until a leaf; return its symbol."""
    if tree.is_empty():
        raise DecodeError("cannot decode with an empty tree")
    node = tree.root
    if tree.symbol[node] >= 0:
        if reader.read_bit() != 0:
            raise DecodeError("single-symbol code expects bit 0")
        return tree.symbol[node]
    left, right, label = tree.left, tree.right, tree.symbol
    while label[node] < 0:
        node = right[node] if reader.read_bit() else left[node]
    return label[node]


TABLE_BITS = 16


def _code_table(codes, width):
    """Lookup tables indexed by the next ``width`` bits: symbol and code length.

    Windows whose code is longer than ``width`` keep length 0.
    """
    sym_t = np.zeros(1 << width, dtype=np.int64)
    len_t = np.zeros(1 << width, dtype=np.int64)
    for sym, (code, length) in codes.items():
        if length <= width:
            lo = code << (width - length)
            hi = (code + 1) << (width - length)
            sym_t[lo:hi] = sym
            len_t[lo:hi] = length
    return sym_t, len_t


def decode_symbols(stream, tree, count, offset=0):
    """Decode ``count`` codewords from ``stream`` starting at bit ``offset``.

    Returns ``(symbols, end_offset)``. Every bit position is decoded at once:
    the next few bits are looked up in a code table (codewords longer than
    the table are walked down the tree, one depth level per step), which
    gives each position the start of the following codeword. The codeword
    starts reachable from ``offset`` are then collected by pointer doubling.
    """
    if count == 0:
        return np.zeros(0, dtype=np.int64), offset
    if tree.is_empty():
        raise DecodeError("cannot decode with an empty tree")
    total = stream.bit_length
    bits = np.unpackbits(np.frombuffer(stream.data, dtype=np.uint8))[offset:total]
    n = bits.size
    label = np.asarray(tree.symbol, dtype=np.int64)
    if label[tree.root] >= 0:
        if count > n:
            raise TruncationError("Huffman stream ends mid-codeword")
        if bits[:count].any():
            raise DecodeError("single-symbol code expects bit 0")
        return np.full(count, label[tree.root], dtype=np.int64), offset + count

    codes = assign_codes(tree)
    max_len = max(length for _, length in codes.values())
    width = min(TABLE_BITS, max_len)
    sym_t, len_t = _code_table(codes, width)
    padded = np.concatenate([bits, np.zeros(max_len, dtype=np.uint8)]).astype(np.int64)
    window = np.zeros(n, dtype=np.int64)
    for i in range(width):
        window = (window << 1) | padded[i : i + n]
    step = len_t[window]
    sym = sym_t[window]
    long_pos = np.flatnonzero(step == 0)
    if long_pos.size:
        step[long_pos], sym[long_pos] = _walk_many(tree, padded, long_pos, max_len)

    # ``n`` marks the exact end of the stream; ``n + 1`` marks an overrun
    nxt = np.empty(n + 2, dtype=np.int64)
    nxt[:n] = np.minimum(np.arange(n) + step, n + 1)
    nxt[n] = n
    nxt[n + 1] = n + 1
    chain = np.zeros(1, dtype=np.int64)
    jump = nxt
    while chain.size < count:
        chain = np.concatenate([chain, jump[chain]])
        jump = jump[jump]
    chain = chain[:count]
    end = int(nxt[chain[-1]])
    if end > n or chain[-1] >= n:
        raise TruncationError("Huffman stream ends mid-codeword")
    return sym[chain], offset + end


def _walk_many(tree, padded, positions, max_len):
    """Tree walk from the root at each of ``positions`` in parallel.

    Returns ``(lengths, symbols)``.
    """
    left = np.asarray(tree.left, dtype=np.int64)
    right = np.asarray(tree.right, dtype=np.int64)
    label = np.asarray(tree.symbol, dtype=np.int64)
    node = np.full(positions.size, tree.root, dtype=np.int64)
    length = np.zeros(positions.size, dtype=np.int64)
    for depth in range(max_len):
        active = label[node] < 0
        if not active.any():
            break
        b = padded[positions[active] + depth]
        node[active] = np.where(b == 1, right[node[active]], left[node[active]])
        length[active] += 1
    return length, label[node]


ENCODE_CHUNK = 1 << 15


def encode_symbols(symbols, book):
    """Concatenate the codewords of ``symbols`` into one MSB-first stream."""
    symbols = np.asarray(symbols, dtype=np.int64).ravel()
    if symbols.size == 0:
        return BitStream(b"", 0)
    codes = book.codes
    domain = np.fromiter(codes, dtype=np.int64, count=len(codes))
    order = np.argsort(domain)
    domain = domain[order]
    code_arr = np.array([codes[s][0] for s in domain.tolist()], dtype=np.uint64)
    len_arr = np.array([codes[s][1] for s in domain.tolist()], dtype=np.int64)
    idx = np.searchsorted(domain, symbols)
    idx[idx == len(domain)] = 0
    missing = domain[idx] != symbols
    if missing.any():
        raise KeyError(int(symbols[missing][0]))
    width = int(len_arr.max())
    cols = np.arange(width, dtype=np.int64)
    chunks = []
    for start in range(0, symbols.size, ENCODE_CHUNK):
        sel = idx[start : start + ENCODE_CHUNK]
        lengths = len_arr[sel][:, None]
        shift = lengths - 1 - cols
        valid = shift >= 0
        word = code_arr[sel][:, None] >> np.where(valid, shift, 0).astype(np.uint64)
        chunks.append((word & np.uint64(1)).astype(np.uint8)[valid])
    bits = np.concatenate(chunks)
    return BitStream(np.packbits(bits).tobytes(), int(bits.size))
