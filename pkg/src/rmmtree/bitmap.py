"""Compressed dynamic bitmap built from (width, popcount, offset) chunk codes.

The bitmap is cut into chunks of at most ``b_max`` bits.  A chunk of width
``b`` holding ``c`` ones is stored as the code ``b | c << 7 | o << 14`` where
``o`` is the rank of its bit pattern among all ``b``-bit patterns with ``c``
ones, taking ``ceil(log2 C(b, c))`` bits.  Chunks live in a
:class:`~rmmtree.partial_sums.CodeSequence` with two weights, the width and
the popcount, so navigation to the chunk holding bit ``i`` (or the ``q``-th
one) is a prefix-sum search.

Edits keep every pair of neighbouring chunks wider than ``b_max`` in total:
an overflowing chunk splits in two halves, and a chunk that becomes narrow
merges with its left neighbour if they fit, else with its right one.
"""
from __future__ import annotations

import math
import struct
from typing import Iterable, Optional, Union

import numpy as np

from .partial_sums import Codec, CodeSequence

B_MAX = 64
FIELD_BITS = 7
DEFAULT_LEAF_BITS = 8192

# BINOM[b][c] for 0 <= b, c <= 64; WIDTH[b][c] = bits of an offset
# (rows are padded with zeros so BINOM[b][c] == 0 for c > b)
BINOM = [[math.comb(b, c) for c in range(B_MAX + 1)] for b in range(B_MAX + 1)]
WIDTH = [[max(x - 1, 0).bit_length() for x in row] for row in BINOM]


def _as_int(bits: Union[str, int], b: int) -> int:
    if isinstance(bits, str):
        if len(bits) != b or set(bits) - {"0", "1"}:
            raise ValueError(f"expected a {b}-character 0/1 string, got {bits!r}")
        return sum(1 << p for p, ch in enumerate(bits) if ch == "1")
    if bits < 0 or bits >> b:
        raise ValueError(f"{bits} does not fit in {b} bits")
    return bits


def encode_offset(bits: Union[str, int], b: int, c: int) -> int:
    """Lexicographic rank of a ``b``-bit pattern among those with ``c`` ones.

    Patterns are compared as strings read from position 0, so for ``b=4, c=2``
    the order is 0011, 0101, 0110, 1001, 1010, 1100.  ``bits`` is either such
    a string or an int whose bit ``p`` is position ``p``.
    """
    if not 0 <= c <= b <= B_MAX:
        raise ValueError(f"need 0 <= c <= b <= {B_MAX}, got b={b}, c={c}")
    x = _as_int(bits, b)
    if x.bit_count() != c:
        raise ValueError(f"pattern has {x.bit_count()} ones, expected {c}")
    o, k = 0, c
    while x:
        low = x & -x
        p = low.bit_length() - 1
        o += BINOM[b - p - 1][k]
        k -= 1
        x ^= low
    return o


def decode_offset(o: int, b: int, c: int) -> int:
    """Inverse of :func:`encode_offset`; returns the pattern as an int."""
    if not 0 <= c <= b <= B_MAX:
        raise ValueError(f"need 0 <= c <= b <= {B_MAX}, got b={b}, c={c}")
    if not 0 <= o < BINOM[b][c]:
        raise ValueError(f"offset {o} out of range [0, {BINOM[b][c]})")
    x, k = 0, c
    for p in range(b):
        if not k:
            break
        rest = b - p - 1
        if rest < k:
            # the remaining positions must all be ones
            x |= ((1 << (b - p)) - 1) << p
            break
        t = BINOM[rest][k]
        if o >= t:
            o -= t
            x |= 1 << p
            k -= 1
    return x


def pattern_string(x: int, b: int) -> str:
    return "".join("1" if (x >> p) & 1 else "0" for p in range(b))


class TripleCodec(Codec):
    """Code for a ``(b, c, o)`` triple: two 7-bit fields then the offset."""

    name = "triple"

    def __init__(self, b_max: int = B_MAX):
        if not 1 <= b_max <= B_MAX:
            raise ValueError(f"b_max must be in [1, {B_MAX}], got {b_max}")
        self.b_max = b_max
        self.max_code_bits = 2 * FIELD_BITS + max(WIDTH[b_max])

    def encode(self, value) -> tuple[int, int]:
        b, c, o = value
        if not 1 <= b <= self.b_max or not 0 <= c <= b or not 0 <= o < BINOM[b][c]:
            raise ValueError(f"invalid chunk triple {value!r}")
        return b | (c << FIELD_BITS) | (o << (2 * FIELD_BITS)), 2 * FIELD_BITS + WIDTH[b][c]

    def decode(self, x: int, off: int = 0) -> tuple[tuple, int]:
        y = x >> off
        b = y & 0x7F
        c = (y >> FIELD_BITS) & 0x7F
        w = WIDTH[b][c]
        return (b, c, (y >> (2 * FIELD_BITS)) & ((1 << w) - 1)), 2 * FIELD_BITS + w

    def __repr__(self) -> str:
        return f"TripleCodec({self.b_max})"


def _fb(v) -> int:
    return v[0]


def _fc(v) -> int:
    return v[1]


def _key_b(s) -> int:
    return s[0]


def _key_c(s) -> int:
    return s[1]


def _key_z(s) -> int:
    return s[0] - s[1]


def _triple(x: int, b: int) -> tuple[int, int, int]:
    c = x.bit_count()
    return b, c, encode_offset(x, b, c)


def entropy_bits(n: int, ones: int) -> float:
    """``n * H0`` for a bitmap of length ``n`` with ``ones`` set bits."""
    if n == 0 or ones in (0, n):
        return 0.0
    p = ones / n
    return -n * (p * math.log2(p) + (1 - p) * math.log2(1 - p))


class CompressedDynBitmap:
    """Entropy-compressed bitmap with access, rank, select, insert and delete."""

    def __init__(self, bits: Optional[Iterable[int]] = None, b_max: int = B_MAX,
                 leaf_bits: int = DEFAULT_LEAF_BITS):
        self.b_max = b_max
        self.codec = TripleCodec(b_max)
        triples = self._chunk(bits) if bits is not None else []
        self._seq = CodeSequence(self.codec, weights=(_fb, _fc), leaf_bits=leaf_bits, values=triples)

    def _chunk(self, bits) -> list:
        if isinstance(bits, np.ndarray) and bits.dtype == np.bool_:
            arr = bits.astype(np.uint8)
        else:
            arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits, dtype=np.uint8)
        if arr.size and arr.max() > 1:
            raise ValueError("bitmap entries must be 0 or 1")
        n = int(arr.size)
        raw = np.packbits(arr, bitorder="little").tobytes()
        x = int.from_bytes(raw, "little")
        out, bm = [], self.b_max
        mask = (1 << bm) - 1
        for start in range(0, n, bm):
            w = min(bm, n - start)
            out.append(_triple((x >> start) & mask if w == bm else (x >> start) & ((1 << w) - 1), w))
        return out

    @classmethod
    def from_int(cls, x: int, n: int, **kw) -> "CompressedDynBitmap":
        self = cls(**kw)
        bm = self.b_max
        triples = [_triple((x >> s) & ((1 << min(bm, n - s)) - 1), min(bm, n - s)) for s in range(0, n, bm)]
        self._seq = CodeSequence(self.codec, weights=(_fb, _fc), leaf_bits=self._seq.L, values=triples)
        return self

    # -- basic -------------------------------------------------------------
    def __len__(self) -> int:
        return self._seq.total(0)

    def count1(self) -> int:
        return self._seq.total(1)

    def __repr__(self) -> str:
        return f"CompressedDynBitmap(n={len(self)}, ones={self.count1()}, chunks={len(self._seq)})"

    def chunks(self) -> list:
        return self._seq.to_list()

    def to_int(self) -> int:
        x, off = 0, 0
        for b, c, o in self._seq:
            x |= decode_offset(o, b, c) << off
            off += b
        return x

    def to_list(self) -> list:
        x = self.to_int()
        return [(x >> i) & 1 for i in range(len(self))]

    def _check(self, i: int) -> None:
        n = len(self)
        if not 0 <= i < n:
            raise IndexError(f"position {i} out of range [0, {n})")

    def _chunk_at(self, i: int):
        idx, (b, c, o), before = self._seq.locate(i, _key_b)
        return idx, b, c, decode_offset(o, b, c), before

    # -- queries -----------------------------------------------------------
    def access(self, i: int) -> int:
        self._check(i)
        _, _, _, x, before = self._chunk_at(i)
        return (x >> (i - before[0])) & 1

    def __getitem__(self, i: int) -> int:
        return self.access(i)

    def rank1(self, i: int) -> int:
        """Ones in ``B[0..i]``."""
        self._check(i)
        _, _, _, x, before = self._chunk_at(i)
        k = i - before[0] + 1
        return before[1] + (x & ((1 << k) - 1)).bit_count()

    def rank0(self, i: int) -> int:
        return i + 1 - self.rank1(i)

    def select1(self, q: int) -> int:
        total = self.count1()
        if not 1 <= q <= total:
            raise ValueError(f"select1({q}) out of range [1, {total}]")
        _, (b, c, o), before = self._seq.locate(q - 1, _key_c)
        x = decode_offset(o, b, c)
        for _ in range(q - 1 - before[1]):
            x &= x - 1
        return before[0] + (x & -x).bit_length() - 1

    def select0(self, q: int) -> int:
        total = len(self) - self.count1()
        if not 1 <= q <= total:
            raise ValueError(f"select0({q}) out of range [1, {total}]")
        _, (b, c, o), before = self._seq.locate(q - 1, _key_z)
        x = ~decode_offset(o, b, c) & ((1 << b) - 1)
        for _ in range(q - 1 - (before[0] - before[1])):
            x &= x - 1
        return before[0] + (x & -x).bit_length() - 1

    # -- edits -------------------------------------------------------------
    def _get(self, k: int) -> tuple[int, int]:
        """Pattern and width of chunk ``k`` (1-based)."""
        b, c, o = self._seq.access(k)[0]
        return decode_offset(o, b, c), b

    def _try_merge(self, k: int) -> bool:
        """Merge chunks ``k`` and ``k+1`` (1-based) if their widths fit."""
        if k < 1 or k + 1 > len(self._seq):
            return False
        xa, ba = self._get(k)
        xb, bb = self._get(k + 1)
        if ba + bb > self.b_max:
            return False
        self._seq.update(k, _triple(xa | (xb << ba), ba + bb))
        self._seq.delete(k + 1)
        return True

    def insert(self, i: int, bit: int) -> None:
        """Insert ``bit`` so that it lands at position ``i``."""
        n = len(self)
        if not 0 <= i <= n:
            raise IndexError(f"insert position {i} out of range [0, {n}]")
        bit = 1 if bit else 0
        if n == 0:
            self._seq.insert(1, (1, bit, 0))
            return
        if i == n:
            k = len(self._seq)
            x, b = self._get(k)
            off = b
        else:
            idx, b, _, x, before = self._chunk_at(i)
            k, off = idx + 1, i - before[0]
        x = (x & ((1 << off) - 1)) | (bit << off) | ((x >> off) << (off + 1))
        b += 1
        if b <= self.b_max:
            self._seq.update(k, _triple(x, b))
            return
        h = b // 2
        self._seq.update(k, _triple(x & ((1 << h) - 1), h))
        self._seq.insert(k + 1, _triple(x >> h, b - h))
        # the halves may now fit with their outer neighbours
        if self._try_merge(k - 1):
            k -= 1
        self._try_merge(k + 1)

    def delete(self, i: int) -> int:
        """Remove and return the bit at position ``i``."""
        self._check(i)
        idx, b, _, x, before = self._chunk_at(i)
        k, off = idx + 1, i - before[0]
        bit = (x >> off) & 1
        x = (x & ((1 << off) - 1)) | ((x >> (off + 1)) << off)
        b -= 1
        if b == 0:
            self._seq.delete(k)
            self._try_merge(k - 1)
            return bit
        self._seq.update(k, _triple(x, b))
        if self._try_merge(k - 1):
            k -= 1
        self._try_merge(k)
        return bit

    # -- accounting --------------------------------------------------------
    def space_report(self) -> tuple[int, int, float]:
        """``(payload_bits, overhead_bits, n * H0)``."""
        sp = self._seq.space_bits()
        return sp["payload_bits"], sp["overhead_bits"], entropy_bits(len(self), self.count1())

    def audit(self) -> Optional[str]:
        msg = self._seq.audit()
        if msg:
            return msg
        prev = None
        for k, (b, c, o) in enumerate(self._seq, 1):
            if not 1 <= b <= self.b_max:
                return f"chunk {k}: width {b} outside [1, {self.b_max}]"
            if decode_offset(o, b, c).bit_count() != c:
                return f"chunk {k}: popcount mismatch"
            if prev is not None and prev + b <= self.b_max:
                return f"chunks {k - 1},{k}: widths {prev}+{b} <= {self.b_max}"
            prev = b
        return None

    # -- raw import / export -------------------------------------------------
    def to_bytes(self) -> bytes:
        n = len(self)
        nbytes = ((n + 63) // 64) * 8
        return struct.pack("<Q", n) + self.to_int().to_bytes(nbytes, "little")

    @classmethod
    def from_bytes(cls, data: bytes, **kw) -> "CompressedDynBitmap":
        if len(data) < 8:
            raise ValueError("truncated bitmap header")
        (n,) = struct.unpack_from("<Q", data)
        need = ((n + 63) // 64) * 8
        if len(data) - 8 < need:
            raise ValueError(f"bitmap payload has {len(data) - 8} bytes, expected {need}")
        x = int.from_bytes(data[8:8 + need], "little") & ((1 << n) - 1)
        return cls.from_int(x, n, **kw)

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path, **kw) -> "CompressedDynBitmap":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read(), **kw)
