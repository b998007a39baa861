"""Packed parentheses bit vectors and the byte-level scanning kernels.

Bit ``i`` of a sequence lives in byte ``i >> 3`` at bit ``i & 7`` (LSB-first),
which is the same layout as LSB-first little-endian 64-bit words.  An opening
parenthesis is 1 and a closing one is 0.

Every scan in the package bottoms out in the functions of this module.  They
walk a ``bytes`` buffer over a half-open bit range ``[lo, hi)``, handling the
unaligned head and tail bit by bit and whole bytes through 256-entry tables.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import ContractError

WORD_BITS = 64

# ---------------------------------------------------------------------------
# byte tables
# ---------------------------------------------------------------------------
# TOT[b]      excess delta over the byte
# MINP/MAXP   min/max prefix excess over prefixes of length 1..8
# MINC        occurrences of MINP among the 8 prefixes
# ARGMIN/ARGMAX  first bit position attaining MINP/MAXP
# FIRST/LAST  [b*17 + d + 8] -> first/last position whose prefix excess is d
# MINSEL      [b*8 + q - 1] -> position of the q-th prefix attaining MINP
# SEL1/SEL0   [b*8 + q - 1] -> position of the q-th one/zero
TOT = [0] * 256
MINP = [0] * 256
MAXP = [0] * 256
MINC = [0] * 256
ARGMIN = [0] * 256
ARGMAX = [0] * 256
POP = [0] * 256
FIRST = [-1] * (256 * 17)
LAST = [-1] * (256 * 17)
MINSEL = [-1] * (256 * 8)
SEL1 = [-1] * (256 * 8)
SEL0 = [-1] * (256 * 8)


def _build_tables() -> None:
    for b in range(256):
        cur = 0
        prefix = []
        for p in range(8):
            cur += 1 if (b >> p) & 1 else -1
            prefix.append(cur)
        lo = min(prefix)
        hi = max(prefix)
        TOT[b] = cur
        MINP[b] = lo
        MAXP[b] = hi
        MINC[b] = prefix.count(lo)
        ARGMIN[b] = prefix.index(lo)
        ARGMAX[b] = prefix.index(hi)
        POP[b] = bin(b).count("1")
        for p, v in enumerate(prefix):
            slot = b * 17 + v + 8
            if FIRST[slot] < 0:
                FIRST[slot] = p
            LAST[slot] = p
        q = 0
        for p, v in enumerate(prefix):
            if v == lo:
                MINSEL[b * 8 + q] = p
                q += 1
        ones = zeros = 0
        for p in range(8):
            if (b >> p) & 1:
                SEL1[b * 8 + ones] = p
                ones += 1
            else:
                SEL0[b * 8 + zeros] = p
                zeros += 1


_build_tables()


# ---------------------------------------------------------------------------
# range kernels over a bytes buffer
# ---------------------------------------------------------------------------
def fwd_scan(buf, lo: int, hi: int, cur: int, target: int) -> tuple[int, int]:
    """First ``p`` in ``[lo, hi)`` whose excess equals ``target``.

    ``cur`` is the excess just before ``lo``.  Returns ``(p, target)`` on a hit
    and ``(-1, excess at hi-1)`` otherwise.
    """
    p = lo
    while p < hi and p & 7:
        cur += 1 if (buf[p >> 3] >> (p & 7)) & 1 else -1
        if cur == target:
            return p, cur
        p += 1
    full = hi & ~7
    while p < full:
        b = buf[p >> 3]
        d = target - cur
        if MINP[b] <= d <= MAXP[b]:
            return p + FIRST[b * 17 + d + 8], target
        cur += TOT[b]
        p += 8
    while p < hi:
        cur += 1 if (buf[p >> 3] >> (p & 7)) & 1 else -1
        if cur == target:
            return p, cur
        p += 1
    return -1, cur


def bwd_scan(buf, lo: int, hi: int, cur: int, target: int) -> tuple[int, int]:
    """Last ``p`` in ``[lo, hi)`` whose excess equals ``target``.

    ``cur`` is the excess at ``hi - 1``.  Returns ``(p, target)`` on a hit and
    ``(-1, excess at lo-1)`` otherwise.
    """
    p = hi - 1
    while p >= lo and (p & 7) != 7:
        if cur == target:
            return p, cur
        cur -= 1 if (buf[p >> 3] >> (p & 7)) & 1 else -1
        p -= 1
    while p - 7 >= lo:
        b = buf[p >> 3]
        before = cur - TOT[b]
        d = target - before
        if MINP[b] <= d <= MAXP[b]:
            return (p - 7) + LAST[b * 17 + d + 8], target
        cur = before
        p -= 8
    while p >= lo:
        if cur == target:
            return p, cur
        cur -= 1 if (buf[p >> 3] >> (p & 7)) & 1 else -1
        p -= 1
    return -1, cur


def min_scan(buf, lo: int, hi: int, cur: int) -> tuple[int, int, int, int]:
    """Minimum excess over ``[lo, hi)``: ``(value, first argmin, count, end excess)``."""
    best = 1 << 62
    arg = -1
    cnt = 0
    p = lo
    while p < hi and p & 7:
        cur += 1 if (buf[p >> 3] >> (p & 7)) & 1 else -1
        if cur < best:
            best, arg, cnt = cur, p, 1
        elif cur == best:
            cnt += 1
        p += 1
    full = hi & ~7
    while p < full:
        b = buf[p >> 3]
        v = cur + MINP[b]
        if v < best:
            best, arg, cnt = v, p + ARGMIN[b], MINC[b]
        elif v == best:
            cnt += MINC[b]
        cur += TOT[b]
        p += 8
    while p < hi:
        cur += 1 if (buf[p >> 3] >> (p & 7)) & 1 else -1
        if cur < best:
            best, arg, cnt = cur, p, 1
        elif cur == best:
            cnt += 1
        p += 1
    return best, arg, cnt, cur


def max_scan(buf, lo: int, hi: int, cur: int) -> tuple[int, int, int]:
    """Maximum excess over ``[lo, hi)``: ``(value, first argmax, end excess)``."""
    best = -(1 << 62)
    arg = -1
    p = lo
    while p < hi and p & 7:
        cur += 1 if (buf[p >> 3] >> (p & 7)) & 1 else -1
        if cur > best:
            best, arg = cur, p
        p += 1
    full = hi & ~7
    while p < full:
        b = buf[p >> 3]
        v = cur + MAXP[b]
        if v > best:
            best, arg = v, p + ARGMAX[b]
        cur += TOT[b]
        p += 8
    while p < hi:
        cur += 1 if (buf[p >> 3] >> (p & 7)) & 1 else -1
        if cur > best:
            best, arg = cur, p
        p += 1
    return best, arg, cur


def minmax_scan(buf, lo: int, hi: int) -> tuple[int, int, int, int]:
    """``(min, min count, max, total)`` of the excess over ``[lo, hi)`` starting from 0."""
    cur = 0
    lo_v, cnt, hi_v = 1 << 62, 0, -(1 << 62)
    p = lo
    while p < hi and p & 7:
        cur += 1 if (buf[p >> 3] >> (p & 7)) & 1 else -1
        if cur < lo_v:
            lo_v, cnt = cur, 1
        elif cur == lo_v:
            cnt += 1
        if cur > hi_v:
            hi_v = cur
        p += 1
    full = hi & ~7
    while p < full:
        b = buf[p >> 3]
        v = cur + MINP[b]
        if v < lo_v:
            lo_v, cnt = v, MINC[b]
        elif v == lo_v:
            cnt += MINC[b]
        v = cur + MAXP[b]
        if v > hi_v:
            hi_v = v
        cur += TOT[b]
        p += 8
    while p < hi:
        cur += 1 if (buf[p >> 3] >> (p & 7)) & 1 else -1
        if cur < lo_v:
            lo_v, cnt = cur, 1
        elif cur == lo_v:
            cnt += 1
        if cur > hi_v:
            hi_v = cur
        p += 1
    return lo_v, cnt, hi_v, cur


def min_select_scan(buf, lo: int, hi: int, cur: int, target: int, q: int) -> tuple[int, int]:
    """Position of the ``q``-th occurrence of ``target`` in ``[lo, hi)``.

    ``target`` must not exceed any excess value in the range (it is the range
    minimum), which lets whole bytes be skipped by their minimum alone.
    Returns ``(p, 0)`` on a hit, else ``(-1, q minus occurrences seen)``.
    """
    p = lo
    while p < hi and p & 7:
        cur += 1 if (buf[p >> 3] >> (p & 7)) & 1 else -1
        if cur == target:
            q -= 1
            if q == 0:
                return p, 0
        p += 1
    full = hi & ~7
    while p < full:
        b = buf[p >> 3]
        if cur + MINP[b] == target:
            c = MINC[b]
            if q <= c:
                return p + MINSEL[b * 8 + q - 1], 0
            q -= c
        cur += TOT[b]
        p += 8
    while p < hi:
        cur += 1 if (buf[p >> 3] >> (p & 7)) & 1 else -1
        if cur == target:
            q -= 1
            if q == 0:
                return p, 0
        p += 1
    return -1, q


def bits_int(buf, lo: int, hi: int) -> int:
    """Bits ``[lo, hi)`` of ``buf`` as a Python int (bit ``lo`` becomes bit 0)."""
    if hi <= lo:
        return 0
    x = int.from_bytes(buf[lo >> 3:(hi + 7) >> 3], "little") >> (lo & 7)
    return x & ((1 << (hi - lo)) - 1)


def select_in_int(x: int, q: int) -> int:
    """Position of the ``q``-th (1-based) set bit of ``x``, or -1."""
    if q < 1:
        return -1
    base = 0
    for b in x.to_bytes((x.bit_length() + 7) >> 3, "little"):
        c = POP[b]
        if q <= c:
            return base + SEL1[b * 8 + q - 1]
        q -= c
        base += 8
    return -1


def select0_in_int(x: int, width: int, q: int) -> int:
    """Position of the ``q``-th zero among the low ``width`` bits of ``x``, or -1."""
    return select_in_int(~x & ((1 << width) - 1), q)


def pairs10(x: int, width: int) -> int:
    """Bit int marking positions ``p < width-1`` with bit p = 1 and bit p+1 = 0."""
    if width < 2:
        return 0
    return x & ~(x >> 1) & ((1 << (width - 1)) - 1)


def pairs01(x: int, width: int) -> int:
    """Bit int marking positions ``p < width-1`` with bit p = 0 and bit p+1 = 1."""
    if width < 2:
        return 0
    return ~x & (x >> 1) & ((1 << (width - 1)) - 1)


# ---------------------------------------------------------------------------
# word-level interface
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class ChunkStats:
    """Summary of a run of bits read as +1 (bit 1) / -1 (bit 0) steps."""

    total: int
    min_prefix: int
    max_prefix: int
    min_count: int
    ones: int
    pat10: int
    pat01: int
    first_bit: int
    last_bit: int

    @property
    def width(self) -> int:
        return 2 * self.ones - self.total


def _word_buf(word: int, width: int) -> bytes:
    word &= (1 << width) - 1
    return word.to_bytes((width + 7) >> 3, "little")


def chunk_stats(word: int, width: int) -> ChunkStats:
    """Excess and pattern statistics of the low ``width`` bits of ``word``."""
    if width < 1:
        raise ContractError("chunk width must be at least 1")
    word &= (1 << width) - 1
    buf = _word_buf(word, width)
    lo, _, cnt, total = min_scan(buf, 0, width, 0)
    hi, _, _ = max_scan(buf, 0, width, 0)
    return ChunkStats(
        total=total,
        min_prefix=lo,
        max_prefix=hi,
        min_count=cnt,
        ones=word.bit_count(),
        pat10=pairs10(word, width).bit_count(),
        pat01=pairs01(word, width).bit_count(),
        first_bit=word & 1,
        last_bit=(word >> (width - 1)) & 1,
    )


def combine_stats(a: ChunkStats, b: ChunkStats) -> ChunkStats:
    """Stats of the concatenation ``a`` followed by ``b``."""
    lo_b = a.total + b.min_prefix
    if a.min_prefix < lo_b:
        lo, cnt = a.min_prefix, a.min_count
    elif a.min_prefix > lo_b:
        lo, cnt = lo_b, b.min_count
    else:
        lo, cnt = lo_b, a.min_count + b.min_count
    return ChunkStats(
        total=a.total + b.total,
        min_prefix=lo,
        max_prefix=max(a.max_prefix, a.total + b.max_prefix),
        min_count=cnt,
        ones=a.ones + b.ones,
        pat10=a.pat10 + b.pat10 + (a.last_bit == 1 and b.first_bit == 0),
        pat01=a.pat01 + b.pat01 + (a.last_bit == 0 and b.first_bit == 1),
        first_bit=a.first_bit,
        last_bit=b.last_bit,
    )


def scan_chunk(word: int, width: int, direction: str, start_excess: int, d: int) -> Optional[int]:
    """In-chunk search step.

    ``fwd``: smallest ``p`` with ``start_excess + sum(bits[0..p]) == d``.
    ``bwd``: largest ``p`` with ``start_excess + sum(bits[p..width-1]) == d``.
    """
    if width < 1:
        raise ContractError("chunk width must be at least 1")
    buf = _word_buf(word, width)
    if direction == "fwd":
        p, _ = fwd_scan(buf, 0, width, start_excess, d)
        return p if p >= 0 else None
    if direction != "bwd":
        raise ValueError(f"direction must be 'fwd' or 'bwd', got {direction!r}")
    # sum(bits[p..w-1]) = E[w-1] - E[p-1] with E[-1] = 0
    total = min_scan(buf, 0, width, 0)[3]
    target = start_excess + total - d
    if width > 1:
        end = total - (1 if (word >> (width - 1)) & 1 else -1)
        p, _ = bwd_scan(buf, 0, width - 1, end, target)
        if p >= 0:
            return p + 1
    return 0 if target == 0 else None


# ---------------------------------------------------------------------------
# the bit vector
# ---------------------------------------------------------------------------
_CHARS = {"(": 1, ")": 0, "1": 1, "0": 0}


class ParenBitVector:
    """Immutable packed bit sequence; '(' is stored as 1 and ')' as 0.

    The backing buffer is padded with zero bytes to a multiple of 8 so it can
    be reinterpreted as little-endian 64-bit words without copying.
    """

    __slots__ = ("_buf", "_len")

    def __init__(self, data: "str | Iterable[int]" = ()):
        if isinstance(data, str):
            bits = []
            for pos, ch in enumerate(data):
                if ch.isspace():
                    continue
                try:
                    bits.append(_CHARS[ch])
                except KeyError:
                    raise ValueError(f"invalid character {ch!r} at position {pos}") from None
            data = bits
        arr = np.fromiter((1 if b else 0 for b in data), dtype=np.uint8)
        self._set(np.packbits(arr, bitorder="little").tobytes(), len(arr))

    def _set(self, raw: bytes, length: int) -> None:
        nbytes = ((length + 63) >> 6) << 3
        raw = bytes(raw[: (length + 7) >> 3])
        if length & 7 and raw:
            raw = raw[:-1] + bytes([raw[-1] & ((1 << (length & 7)) - 1)])
        self._buf = raw + bytes(nbytes - len(raw))
        self._len = length

    @classmethod
    def from_bytes(cls, raw: bytes, length: int) -> "ParenBitVector":
        if length < 0 or len(raw) * 8 < length:
            raise ValueError("buffer too short for the requested length")
        self = cls.__new__(cls)
        self._set(raw, length)
        return self

    @classmethod
    def from_numpy(cls, bits: np.ndarray) -> "ParenBitVector":
        bits = np.asarray(bits).astype(np.uint8, copy=False)
        return cls.from_bytes(np.packbits(bits, bitorder="little").tobytes(), len(bits))

    @classmethod
    def from_words(cls, words: np.ndarray, length: int) -> "ParenBitVector":
        return cls.from_bytes(np.asarray(words, dtype="<u8").tobytes(), length)

    @classmethod
    def from_int(cls, value: int, length: int) -> "ParenBitVector":
        return cls.from_bytes(value.to_bytes((length + 7) >> 3, "little"), length)

    @property
    def buf(self) -> bytes:
        return self._buf

    @property
    def nbytes(self) -> int:
        return len(self._buf)

    def __len__(self) -> int:
        return self._len

    def bit_at(self, i: int) -> int:
        if not 0 <= i < self._len:
            raise IndexError(f"bit index {i} out of range [0, {self._len})")
        return (self._buf[i >> 3] >> (i & 7)) & 1

    def __getitem__(self, i: int) -> int:
        if i < 0:
            i += self._len
        return self.bit_at(i)

    def __iter__(self):
        buf = self._buf
        for i in range(self._len):
            yield (buf[i >> 3] >> (i & 7)) & 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, ParenBitVector):
            return NotImplemented
        return self._len == other._len and self._buf == other._buf

    def __hash__(self) -> int:
        return hash((self._len, self._buf))

    def __repr__(self) -> str:
        text = self.to_string()
        if len(text) > 40:
            text = text[:37] + "..."
        return f"ParenBitVector({text!r}, len={self._len})"

    def to_string(self) -> str:
        return "".join("(" if b else ")" for b in self)

    def to_int(self) -> int:
        return int.from_bytes(self._buf, "little")

    def to_numpy(self) -> np.ndarray:
        return np.unpackbits(np.frombuffer(self._buf, dtype=np.uint8), count=self._len, bitorder="little")

    def words(self) -> np.ndarray:
        return np.frombuffer(self._buf, dtype="<u8")

    def excess_profile(self) -> tuple[int, int]:
        """``(final excess, first position with negative excess or -1)``."""
        if self._len == 0:
            return 0, -1
        e = np.cumsum(self.to_numpy().astype(np.int64) * 2 - 1)
        neg = np.flatnonzero(e < 0)
        return int(e[-1]), int(neg[0]) if len(neg) else -1

    def is_balanced(self) -> bool:
        total, neg = self.excess_profile()
        return total == 0 and neg < 0
