"""Immutable range min-max tree over a parentheses bit vector.

The sequence is cut into chunks of ``chunk_bits`` bits.  Above the chunks sits
a complete ``arity``-ary tree stored level by level; node ``x`` of level ``h``
has children ``x*k .. x*k+k-1`` on level ``h-1`` (the last group may be short).
Each node keeps, for the bits it covers:

* ``e``   excess at its right boundary (global, i.e. from position 0),
* ``m``/``M`` minimum/maximum excess inside it (global),
* ``n``   how many positions attain ``m``,
* ``ones`` popcount,
* ``p1``/``p2`` number of ``10``/``01`` patterns whose first bit it covers,
  reading a virtual 0 after the last bit.

Queries take O(k log_k(n/s) + s/8) table steps.
"""
from __future__ import annotations

import struct
from array import array
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .bits import (
    ParenBitVector,
    bits_int,
    bwd_scan,
    fwd_scan,
    max_scan,
    min_scan,
    min_select_scan,
    pairs01,
    pairs10,
    select0_in_int,
    select_in_int,
)
from .errors import ContractError

MAGIC = b"RMMT"
VERSION = 1
_HEADER = struct.Struct("<4sBQII")


def _is_pow2(x: int) -> bool:
    return x > 0 and x & (x - 1) == 0


@dataclass(frozen=True)
class StaticRmmConfig:
    chunk_bits: int = 512
    arity: int = 32

    def __post_init__(self):
        if not _is_pow2(self.chunk_bits) or self.chunk_bits < 64:
            raise ContractError(f"chunk_bits must be a power of two >= 64, got {self.chunk_bits}")
        if not _is_pow2(self.arity) or self.arity < 2:
            raise ContractError(f"arity must be a power of two >= 2, got {self.arity}")


class StaticRmm:
    """Range min-max tree supporting the excess-search primitives in O(log n)."""

    def __init__(self, bits: Union[ParenBitVector, str], config: Optional[StaticRmmConfig] = None):
        if not isinstance(bits, ParenBitVector):
            bits = ParenBitVector(bits)
        if len(bits) == 0:
            raise ContractError("cannot build a range min-max tree over an empty sequence")
        self.config = config or StaticRmmConfig()
        self._bits = bits
        self._buf = bits.buf
        self._n = len(bits)
        self._s = self.config.chunk_bits
        self._sh = self._s.bit_length() - 1
        self._k = self.config.arity
        self._build()

    # -- construction ------------------------------------------------------
    def _build(self) -> None:
        n, s, k = self._n, self._s, self._k
        code = "i" if n < 2**31 - 1 else "q"
        dtype = np.int32 if code == "i" else np.int64
        bits = self._bits.to_numpy()
        nc = -(-n // s)
        starts = np.arange(nc, dtype=np.int64) * s
        ends = np.minimum(starts + s, n)

        excess = np.cumsum(bits.astype(np.int8) * 2 - 1, dtype=np.int64)
        padded = np.empty(nc * s, dtype=np.int64)
        big = np.int64(1) << 62
        padded[:n] = excess
        padded[n:] = big
        grid = padded.reshape(nc, s)
        m = grid.min(axis=1)
        cnt = (grid == m[:, None]).sum(axis=1)
        padded[n:] = -big
        M = grid.max(axis=1)
        del padded, grid
        e = excess[ends - 1]
        del excess

        nxt = np.empty_like(bits)
        nxt[:-1] = bits[1:]
        nxt[-1] = 0
        ones = np.add.reduceat(bits.astype(np.int64), starts)
        p1 = np.add.reduceat((bits & (1 - nxt)).astype(np.int64), starts)
        p2 = np.add.reduceat(((1 - bits) & nxt).astype(np.int64), starts)
        del bits, nxt

        level = [e, m, M, cnt, ones, p1, p2]
        levels = [level]
        while len(level[0]) > 1:
            size = len(level[0])
            groups = -(-size // k)
            pad = groups * k - size
            ce, cm, cM, cn, co, c1, c2 = level

            def grid_of(a, fill):
                return np.concatenate([a, np.full(pad, fill, dtype=np.int64)]).reshape(groups, k)

            gm = grid_of(cm, big)
            pm = gm.min(axis=1)
            pn = (grid_of(cn, 0) * (gm == pm[:, None])).sum(axis=1)
            pM = grid_of(cM, -big).max(axis=1)
            pe = ce[np.minimum((np.arange(groups) + 1) * k, size) - 1]
            level = [pe, pm, pM, pn,
                     grid_of(co, 0).sum(axis=1), grid_of(c1, 0).sum(axis=1), grid_of(c2, 0).sum(axis=1)]
            levels.append(level)

        def pack(a):
            return array(code, np.asarray(a, dtype=dtype).tobytes())

        self._e = [pack(lv[0]) for lv in levels]
        self._m = [pack(lv[1]) for lv in levels]
        self._M = [pack(lv[2]) for lv in levels]
        self._cnt = [pack(lv[3]) for lv in levels]
        self._ones = [pack(lv[4]) for lv in levels]
        self._p1 = [pack(lv[5]) for lv in levels]
        self._p2 = [pack(lv[6]) for lv in levels]
        self._sizes = [len(a) for a in self._e]
        self._top = len(self._sizes) - 1

    # -- basic accessors ---------------------------------------------------
    @property
    def bits(self) -> ParenBitVector:
        return self._bits

    def __len__(self) -> int:
        return self._n

    def __repr__(self) -> str:
        return f"StaticRmm(len={self._n}, chunk_bits={self._s}, arity={self._k}, levels={self._top + 1})"

    def bit_at(self, i: int) -> int:
        if not 0 <= i < self._n:
            raise IndexError(f"position {i} out of range [0, {self._n})")
        return (self._buf[i >> 3] >> (i & 7)) & 1

    def root_summary(self) -> dict:
        t = self._top
        return {"e": self._e[t][0], "m": self._m[t][0], "M": self._M[t][0], "n": self._cnt[t][0],
                "ones": self._ones[t][0], "p1": self._p1[t][0], "p2": self._p2[t][0]}

    def _check(self, i: int) -> None:
        if not 0 <= i < self._n:
            raise IndexError(f"position {i} out of range [0, {self._n})")

    def _check_range(self, i: int, j: int) -> None:
        if not 0 <= i <= j < self._n:
            raise IndexError(f"range [{i}, {j}] invalid for length {self._n}")

    def _chunk_end(self, c: int) -> int:
        return min((c + 1) << self._sh, self._n)

    def _span(self, h: int, x: int) -> tuple[int, int]:
        width = self._s * self._k ** h
        return x * width, min((x + 1) * width, self._n)

    def _children(self, h: int, x: int) -> range:
        k = self._k
        return range(x * k, min(x * k + k, self._sizes[h - 1]))

    def _before(self, h: int, x: int) -> int:
        """Excess just before node ``x`` of level ``h``."""
        return self._e[h][x - 1] if x else 0

    # -- sum / excess ------------------------------------------------------
    def excess(self, i: int) -> int:
        self._check(i)
        return self._excess(i)

    def _excess(self, i: int) -> int:
        if i < 0:
            return 0
        c = i >> self._sh
        cs = c << self._sh
        ones = bits_int(self._buf, cs, i + 1).bit_count()
        return (self._e[0][c - 1] if c else 0) + 2 * ones - (i + 1 - cs)

    def sum(self, i: int, j: int) -> int:
        self._check_range(i, j)
        return self._excess(j) - self._excess(i - 1)

    # -- searches ----------------------------------------------------------
    def fwd_search(self, i: int, d: int) -> Optional[int]:
        """Smallest ``j >= i`` with ``sum(i, j) == d``, or None."""
        self._check(i)
        base = self._excess(i - 1)
        t = base + d
        c = i >> self._sh
        p, _ = fwd_scan(self._buf, i, self._chunk_end(c), base, t)
        if p >= 0:
            return p
        k = self._k
        x = c
        for h in range(self._top):
            m, M = self._m[h], self._M[h]
            for y in range(x + 1, min((x // k + 1) * k, self._sizes[h])):
                if m[y] <= t <= M[y]:
                    return self._descend_fwd(h, y, t)
            x //= k
        return None

    def _descend_fwd(self, h: int, y: int, t: int) -> int:
        while h:
            m, M = self._m[h - 1], self._M[h - 1]
            for z in self._children(h, y):
                if m[z] <= t <= M[z]:
                    y = z
                    break
            h -= 1
        p, _ = fwd_scan(self._buf, y << self._sh, self._chunk_end(y), self._before(0, y), t)
        return p

    def bwd_search(self, i: int, d: int) -> Optional[int]:
        """Largest ``j <= i`` with ``sum(j, i) == d``, or None."""
        self._check(i)
        cur = self._excess(i)
        t = cur - d
        # the answer is p + 1 for the largest p in [-1, i-1] with E[p] == t
        c = i >> self._sh
        cs = c << self._sh
        if i > cs:
            prev = cur - (1 if (self._buf[i >> 3] >> (i & 7)) & 1 else -1)
            p, _ = bwd_scan(self._buf, cs, i, prev, t)
            if p >= 0:
                return p + 1
        k = self._k
        x = c
        for h in range(self._top):
            m, M = self._m[h], self._M[h]
            for y in range(x - 1, (x // k) * k - 1, -1):
                if m[y] <= t <= M[y]:
                    return self._descend_bwd(h, y, t) + 1
            x //= k
        return 0 if t == 0 else None

    def _descend_bwd(self, h: int, y: int, t: int) -> int:
        while h:
            m, M = self._m[h - 1], self._M[h - 1]
            for z in reversed(self._children(h, y)):
                if m[z] <= t <= M[z]:
                    y = z
                    break
            h -= 1
        p, _ = bwd_scan(self._buf, y << self._sh, self._chunk_end(y), self._e[0][y], t)
        return p

    # -- range covering ----------------------------------------------------
    def _cover(self, i: int, j: int) -> list:
        """Split ``[i, j]`` into partial chunks ``(-1, lo, hi)`` and nodes ``(h, x, 0)``."""
        sh = self._sh
        ci, cj = i >> sh, j >> sh
        if ci == cj:
            return [(-1, i, j + 1)]
        left = [(-1, i, self._chunk_end(ci))]
        right = [(-1, cj << sh, j + 1)]
        a, b, h, k = ci + 1, cj - 1, 0, self._k
        while a <= b:
            size = self._sizes[h]
            if h == self._top:
                left.append((h, a, 0))
                break
            if a % k:
                left.append((h, a, 0))
                a += 1
            elif b % k != k - 1 and b != size - 1:
                right.append((h, b, 0))
                b -= 1
            else:
                a //= k
                b //= k
                h += 1
        left.extend(reversed(right))
        return left

    def _piece_base(self, piece) -> int:
        h, a, b = piece
        if h < 0:
            return self._excess(a - 1)
        return self._before(h, a)

    def rmqi(self, i: int, j: int) -> tuple[int, int]:
        """Leftmost position of the minimum excess in ``[i, j]`` and that minimum."""
        self._check_range(i, j)
        best, where = 1 << 62, None
        for piece in self._cover(i, j):
            h, a, b = piece
            if h < 0:
                v, arg, _, _ = min_scan(self._buf, a, b, self._excess(a - 1))
                if v < best:
                    best, where = v, arg
            elif self._m[h][a] < best:
                best, where = self._m[h][a], piece
        if isinstance(where, tuple):
            h, y, _ = where
            while h:
                m = self._m[h - 1]
                for z in self._children(h, y):
                    if m[z] == best:
                        y = z
                        break
                h -= 1
            where, _ = fwd_scan(self._buf, y << self._sh, self._chunk_end(y), self._before(0, y), best)
        return where, best

    def RMQi(self, i: int, j: int) -> tuple[int, int]:
        """Leftmost position of the maximum excess in ``[i, j]`` and that maximum."""
        self._check_range(i, j)
        best, where = -(1 << 62), None
        for piece in self._cover(i, j):
            h, a, b = piece
            if h < 0:
                v, arg, _ = max_scan(self._buf, a, b, self._excess(a - 1))
                if v > best:
                    best, where = v, arg
            elif self._M[h][a] > best:
                best, where = self._M[h][a], piece
        if isinstance(where, tuple):
            h, y, _ = where
            while h:
                M = self._M[h - 1]
                for z in self._children(h, y):
                    if M[z] == best:
                        y = z
                        break
                h -= 1
            where, _ = fwd_scan(self._buf, y << self._sh, self._chunk_end(y), self._before(0, y), best)
        return where, best

    def _min_pieces(self, i: int, j: int):
        stats = []
        best = 1 << 62
        for piece in self._cover(i, j):
            h, a, b = piece
            if h < 0:
                base = self._excess(a - 1)
                v, _, c, _ = min_scan(self._buf, a, b, base)
                stats.append((piece, v, c, base))
            else:
                v = self._m[h][a]
                stats.append((piece, v, self._cnt[h][a], 0))
            if v < best:
                best = v
        return best, stats

    def min_count(self, i: int, j: int) -> int:
        """How many positions of ``[i, j]`` attain the minimum excess of the range."""
        self._check_range(i, j)
        best, stats = self._min_pieces(i, j)
        return sum(c for _, v, c, _ in stats if v == best)

    def min_select(self, i: int, j: int, q: int) -> int:
        """Position of the ``q``-th (1-based) occurrence of the range minimum."""
        self._check_range(i, j)
        best, stats = self._min_pieces(i, j)
        if q < 1:
            raise ValueError(f"q must be >= 1, got {q}")
        for piece, v, c, base in stats:
            if v != best:
                continue
            if q > c:
                q -= c
                continue
            h, y, b = piece
            if h < 0:
                return min_select_scan(self._buf, y, b, base, best, q)[0]
            while h:
                m, cnt = self._m[h - 1], self._cnt[h - 1]
                for z in self._children(h, y):
                    if m[z] == best:
                        if q <= cnt[z]:
                            y = z
                            break
                        q -= cnt[z]
                h -= 1
            return min_select_scan(self._buf, y << self._sh, self._chunk_end(y),
                                   self._before(0, y), best, q)[0]
        raise ValueError("q exceeds the number of minima in the range")

    # -- rank / select over P ----------------------------------------------
    def rank1(self, i: int) -> int:
        """Ones in ``P[0..i]``; derived from the excess, no popcount directory."""
        self._check(i)
        return (i + 1 + self._excess(i)) >> 1

    def rank0(self, i: int) -> int:
        self._check(i)
        return (i + 1 - self._excess(i)) >> 1

    def _select_desc(self, q: int, counts, zeros: bool) -> tuple[int, int]:
        h, y = self._top, 0
        while h:
            level = counts[h - 1]
            for z in self._children(h, y):
                c = level[z]
                if zeros:
                    lo, hi = self._span(h - 1, z)
                    c = hi - lo - c
                if q <= c:
                    y = z
                    break
                q -= c
            h -= 1
        return y, q

    def select1(self, q: int) -> int:
        total = self._ones[self._top][0]
        if not 1 <= q <= total:
            raise ValueError(f"select1({q}) out of range [1, {total}]")
        y, q = self._select_desc(q, self._ones, False)
        cs = y << self._sh
        return cs + select_in_int(bits_int(self._buf, cs, self._chunk_end(y)), q)

    def select0(self, q: int) -> int:
        total = self._n - self._ones[self._top][0]
        if not 1 <= q <= total:
            raise ValueError(f"select0({q}) out of range [1, {total}]")
        y, q = self._select_desc(q, self._ones, True)
        cs, ce = y << self._sh, self._chunk_end(y)
        return cs + select0_in_int(bits_int(self._buf, cs, ce), ce - cs, q)

    # -- rank / select over the virtual P1 ("10") and P2 ("01") bitmaps ------
    def _prefix(self, counts, c: int) -> int:
        total, k = 0, self._k
        for h in range(self._top + 1):
            if c <= 0:
                break
            g = (c // k) * k
            total += sum(counts[h][g:c])
            c //= k
        return total

    def _pattern_rank(self, i: int, counts, pairs) -> int:
        self._check(i)
        c = i >> self._sh
        cs = c << self._sh
        local = pairs(bits_int(self._buf, cs, i + 2), i + 2 - cs).bit_count()
        return self._prefix(counts, c) + local

    def _pattern_select(self, q: int, counts, pairs) -> int:
        total = counts[self._top][0]
        if not 1 <= q <= total:
            raise ValueError(f"select({q}) out of range [1, {total}]")
        y, q = self._select_desc(q, counts, False)
        cs, ce = y << self._sh, self._chunk_end(y)
        return cs + select_in_int(pairs(bits_int(self._buf, cs, ce + 1), ce + 1 - cs), q)

    def rank_p1(self, i: int) -> int:
        return self._pattern_rank(i, self._p1, pairs10)

    def select_p1(self, q: int) -> int:
        return self._pattern_select(q, self._p1, pairs10)

    def rank_p2(self, i: int) -> int:
        return self._pattern_rank(i, self._p2, pairs01)

    def select_p2(self, q: int) -> int:
        return self._pattern_select(q, self._p2, pairs01)

    def count_p1(self) -> int:
        return self._p1[self._top][0]

    def count_p2(self) -> int:
        return self._p2[self._top][0]

    def count1(self) -> int:
        return self._ones[self._top][0]

    # -- audit / space -----------------------------------------------------
    def audit(self) -> Optional[str]:
        """Recheck every stored summary against a rebuild; None when consistent."""
        fresh = StaticRmm(self._bits, self.config)
        for name in ("_e", "_m", "_M", "_cnt", "_ones", "_p1", "_p2"):
            mine, ref = getattr(self, name), getattr(fresh, name)
            for h, (a, b) in enumerate(zip(mine, ref)):
                if a != b:
                    x = next(x for x in range(len(a)) if a[x] != b[x])
                    return f"level {h} node {x}: {name[1:]}={a[x]} expected {b[x]}"
        return None

    def space_bits(self) -> dict:
        summary = sum(a.itemsize * len(a) * 8
                      for arrs in (self._e, self._m, self._M, self._cnt, self._ones, self._p1, self._p2)
                      for a in arrs)
        payload = self._bits.nbytes * 8
        return {"payload_bits": payload, "summary_bits": summary, "total_bits": payload + summary}

    # -- serialization -----------------------------------------------------
    def to_bytes(self) -> bytes:
        return dump_bits(self._bits, self.config)

    @classmethod
    def from_bytes(cls, data: bytes) -> "StaticRmm":
        bits, config = load_bits(data)
        return cls(bits, config)

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> "StaticRmm":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())


def dump_bits(bits: ParenBitVector, config: Optional[StaticRmmConfig] = None) -> bytes:
    """RMMT image: header then the bits as little-endian 64-bit words."""
    config = config or StaticRmmConfig()
    header = _HEADER.pack(MAGIC, VERSION, len(bits), config.chunk_bits, config.arity)
    return header + bits.buf


def load_bits(data: bytes) -> tuple[ParenBitVector, StaticRmmConfig]:
    if len(data) < _HEADER.size:
        raise ValueError("truncated RMMT header")
    magic, version, length, s, k = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ValueError("not an RMMT file (bad magic)")
    if version != VERSION:
        raise ValueError(f"unsupported RMMT version {version}")
    nwords = (length + 63) >> 6
    payload = data[_HEADER.size:]
    if len(payload) != nwords * 8:
        raise ValueError(f"RMMT payload has {len(payload)} bytes, expected {nwords * 8}")
    return ParenBitVector.from_bytes(payload, length), StaticRmmConfig(s, k)


def is_rmmt(data: bytes) -> bool:
    return data[:4] == MAGIC
