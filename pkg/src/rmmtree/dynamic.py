"""Dynamic range min-max tree.

The bit sequence is cut into leaf segments of ``L`` to ``2L`` bits (a sole
leaf may be shorter) hanging under a height-balanced (AVL) binary tree.
Every node caches, for its own segment of bits and relative to its own start:

    size, e (total excess), m / M (min / max prefix excess), n (how many
    prefixes attain m), ones, p1 / p2 ("10" / "01" pairs fully inside),
    first / last bit, height

so that a parent is a constant-time combination of its two children.  Queries
turn those local values into global ones by carrying the excess before each
subtree while descending.  Edits touch one root-to-leaf path; attach and
detach are split + join with a repair pass over the short leaves they create.
"""
from __future__ import annotations

from typing import Iterator, Optional, Union

from .bits import (
    ParenBitVector,
    bwd_scan,
    fwd_scan,
    max_scan,
    min_scan,
    min_select_scan,
    minmax_scan,
    pairs01,
    pairs10,
    select0_in_int,
    select_in_int,
)
from .errors import BalanceError, ContractError

DEFAULT_LEAF_BITS = 1024
_INF = 1 << 62


class _Node:
    __slots__ = ("left", "right", "bits", "buf", "size", "e", "m", "M", "n",
                 "ones", "p1", "p2", "first", "last", "height")

    def __init__(self, bits: int = 0, size: int = 0):
        self.left: Optional[_Node] = None
        self.right: Optional[_Node] = None
        self.bits = bits
        self.size = size
        self.refresh()

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def refresh(self) -> None:
        """Recompute a leaf's summary from its bits."""
        size, x = self.size, self.bits
        self.height = 1
        self.buf = x.to_bytes((size + 7) >> 3, "little")
        if size == 0:
            self.e, self.m, self.M, self.n = 0, _INF, -_INF, 0
            self.ones = self.p1 = self.p2 = 0
            self.first = self.last = -1
            return
        self.m, self.n, self.M, self.e = minmax_scan(self.buf, 0, size)
        self.ones = x.bit_count()
        self.p1 = pairs10(x, size).bit_count()
        self.p2 = pairs01(x, size).bit_count()
        self.first = x & 1
        self.last = (x >> (size - 1)) & 1

    def pull(self) -> None:
        """Recompute an internal node from its children."""
        l, r = self.left, self.right
        le = l.e
        self.size = l.size + r.size
        self.e = le + r.e
        rm = le + r.m
        if l.m < rm:
            self.m, self.n = l.m, l.n
        elif l.m > rm:
            self.m, self.n = rm, r.n
        else:
            self.m, self.n = rm, l.n + r.n
        rM = le + r.M
        self.M = l.M if l.M >= rM else rM
        self.ones = l.ones + r.ones
        self.p1 = l.p1 + r.p1 + (l.last == 1 and r.first == 0)
        self.p2 = l.p2 + r.p2 + (l.last == 0 and r.first == 1)
        self.first = l.first
        self.last = r.last
        self.height = 1 + (l.height if l.height > r.height else r.height)

    def make_inner(self, left: "_Node", right: "_Node") -> None:
        self.left, self.right = left, right
        self.bits = 0
        self.buf = b""
        self.pull()


# ---------------------------------------------------------------------------
# AVL plumbing (all functions return the new subtree root)
# ---------------------------------------------------------------------------
def _inner(left: _Node, right: _Node) -> _Node:
    node = _Node.__new__(_Node)
    node.make_inner(left, right)
    return node


def _rot_right(y: _Node) -> _Node:
    x = y.left
    y.left = x.right
    x.right = y
    y.pull()
    x.pull()
    return x


def _rot_left(x: _Node) -> _Node:
    y = x.right
    x.right = y.left
    y.left = x
    x.pull()
    y.pull()
    return y


def _rebalance(node: _Node) -> _Node:
    node.pull()
    l, r = node.left, node.right
    bf = l.height - r.height
    if bf > 1:
        if l.left.height < l.right.height:
            node.left = _rot_left(l)
        return _rot_right(node)
    if bf < -1:
        if r.right.height < r.left.height:
            node.right = _rot_right(r)
        return _rot_left(node)
    return node


def _join(a: Optional[_Node], b: Optional[_Node]) -> Optional[_Node]:
    """Concatenate two trees, keeping the AVL shape."""
    if a is None or a.size == 0:
        return b
    if b is None or b.size == 0:
        return a
    if a.height > b.height + 1:
        a.right = _join(a.right, b)
        return _rebalance(a)
    if b.height > a.height + 1:
        b.left = _join(a, b.left)
        return _rebalance(b)
    return _inner(a, b)


def _split(node: _Node, pos: int) -> tuple[Optional[_Node], Optional[_Node]]:
    """Cut a tree into the first ``pos`` bits and the rest."""
    if pos <= 0:
        return None, node
    if pos >= node.size:
        return node, None
    if node.is_leaf:
        x = node.bits
        return (_Node(x & ((1 << pos) - 1), pos),
                _Node(x >> pos, node.size - pos))
    l, r = node.left, node.right
    if pos <= l.size:
        a, b = _split(l, pos)
        return a, _join(b, r)
    a, b = _split(r, pos - l.size)
    return _join(l, a), b


def _remove_leaf(node: _Node, pos: int) -> _Node:
    """Drop the leaf covering ``pos`` (node must be internal)."""
    l = node.left
    if pos < l.size:
        if l.is_leaf:
            return node.right
        node.left = _remove_leaf(l, pos)
    else:
        r = node.right
        if r.is_leaf:
            return l
        node.right = _remove_leaf(r, pos - l.size)
    return _rebalance(node)


def _fix_path(node: _Node, start: int) -> _Node:
    """Re-pull and rebalance the path to the leaf starting at ``start``.

    Navigation uses the cached (pre-edit) sizes, which is correct because the
    edit only changed the leaf itself.
    """
    if node.is_leaf:
        return node
    if start < node.left.size:
        node.left = _fix_path(node.left, start)
    else:
        node.right = _fix_path(node.right, start - node.left.size)
    return _rebalance(node)


def _build(leaves: list, lo: int, hi: int) -> _Node:
    if hi - lo == 1:
        return leaves[lo]
    mid = (lo + hi) >> 1
    return _inner(_build(leaves, lo, mid), _build(leaves, mid, hi))


class DynamicRmm:
    """Editable parentheses sequence with the same query contract as
    :class:`~rmmtree.static.StaticRmm`.

    ``leaf_bits`` is the segment parameter ``L``.
    """

    def __init__(self, bits: Union[ParenBitVector, str, None] = None, leaf_bits: int = DEFAULT_LEAF_BITS):
        if leaf_bits < 1:
            raise ContractError(f"leaf_bits must be >= 1, got {leaf_bits}")
        self.L = leaf_bits
        if bits is None:
            bits = ParenBitVector("")
        elif isinstance(bits, str):
            bits = ParenBitVector(bits)
        self._root = self._build_from(bits)

    def _build_from(self, bits: ParenBitVector) -> _Node:
        n, L = len(bits), self.L
        if n < L:
            return _Node(bits.to_int(), n)
        c = -(-n * 2 // (3 * L))
        if n // c < L:
            c -= 1
        buf = bits.buf
        leaves, start = [], 0
        for t in range(c):
            size = n // c + (t < n % c)
            x = int.from_bytes(buf[start >> 3:(start + size + 7) >> 3], "little") >> (start & 7)
            leaves.append(_Node(x & ((1 << size) - 1), size))
            start += size
        return _build(leaves, 0, c)

    @classmethod
    def _from_root(cls, root: Optional[_Node], leaf_bits: int) -> "DynamicRmm":
        self = cls.__new__(cls)
        self.L = leaf_bits
        self._root = root if root is not None else _Node()
        return self

    # -- basic access ------------------------------------------------------
    def __len__(self) -> int:
        return self._root.size

    def __repr__(self) -> str:
        return f"DynamicRmm(len={len(self)}, leaves={self.leaf_count()}, height={self.height()})"

    def height(self) -> int:
        return self._root.height

    def leaf_count(self) -> int:
        return sum(1 for _ in self._leaves())

    def _leaves(self) -> Iterator[_Node]:
        stack = [self._root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                if node.size or node is self._root:
                    yield node
            else:
                stack.append(node.right)
                stack.append(node.left)

    def to_bits(self) -> ParenBitVector:
        x, off = 0, 0
        for leaf in self._leaves():
            x |= leaf.bits << off
            off += leaf.size
        return ParenBitVector.from_int(x, off)

    def to_string(self) -> str:
        return self.to_bits().to_string()

    def _check(self, i: int) -> None:
        if not 0 <= i < self._root.size:
            raise IndexError(f"position {i} out of range [0, {self._root.size})")

    def _check_range(self, i: int, j: int) -> None:
        if not 0 <= i <= j < self._root.size:
            raise IndexError(f"range [{i}, {j}] invalid for length {self._root.size}")

    def _leaf_at(self, pos: int) -> tuple[_Node, int, int]:
        """Leaf covering ``pos`` (the last leaf when ``pos == len``), its start and
        the excess before it."""
        node, start, base = self._root, 0, 0
        while node.left is not None:
            l = node.left
            if pos < l.size:
                node = l
            else:
                start += l.size
                base += l.e
                pos -= l.size
                node = node.right
        return node, start, base

    def bit_at(self, i: int) -> int:
        self._check(i)
        leaf, start, _ = self._leaf_at(i)
        return (leaf.bits >> (i - start)) & 1

    def __getitem__(self, i: int) -> int:
        return self.bit_at(i)

    def root_summary(self) -> dict:
        r = self._root
        return {"e": r.e, "m": r.m, "M": r.M, "n": r.n, "ones": r.ones,
                "p1": self.count_p1(), "p2": r.p2}

    # -- excess ------------------------------------------------------------
    def _excess(self, i: int) -> int:
        if i < 0:
            return 0
        leaf, start, base = self._leaf_at(i)
        k = i - start + 1
        return base + 2 * (leaf.bits & ((1 << k) - 1)).bit_count() - k

    def excess(self, i: int) -> int:
        self._check(i)
        return self._excess(i)

    def sum(self, i: int, j: int) -> int:
        self._check_range(i, j)
        return self._excess(j) - self._excess(i - 1)

    # -- searches ----------------------------------------------------------
    def fwd_search(self, i: int, d: int) -> Optional[int]:
        """Smallest ``j >= i`` with ``sum(i, j) == d``, or None."""
        self._check(i)
        t = self._excess(i - 1) + d
        r = self._fwd(self._root, 0, 0, i, t)
        return None if r < 0 else r

    def _fwd(self, node: _Node, start: int, base: int, i: int, t: int) -> int:
        if start + node.size <= i:
            return -1
        if start >= i and not (base + node.m <= t <= base + node.M):
            return -1
        if node.is_leaf:
            lo = i - start if i > start else 0
            cur = base + 2 * (node.bits & ((1 << lo) - 1)).bit_count() - lo
            p, _ = fwd_scan(node.buf, lo, node.size, cur, t)
            return -1 if p < 0 else start + p
        l = node.left
        r = self._fwd(l, start, base, i, t)
        if r >= 0:
            return r
        return self._fwd(node.right, start + l.size, base + l.e, i, t)

    def bwd_search(self, i: int, d: int) -> Optional[int]:
        """Largest ``j <= i`` with ``sum(j, i) == d``, or None."""
        self._check(i)
        t = self._excess(i) - d
        # answer is p + 1 for the largest p in [-1, i-1] with E[p] == t
        p = self._bwd(self._root, 0, 0, i - 1, t) if i > 0 else -1
        if p >= 0:
            return p + 1
        return 0 if t == 0 else None

    def _bwd(self, node: _Node, start: int, base: int, lim: int, t: int) -> int:
        if start > lim:
            return -1
        end = start + node.size - 1
        if end <= lim and not (base + node.m <= t <= base + node.M):
            return -1
        if node.is_leaf:
            hi = (lim - start + 1) if end > lim else node.size
            cur = base + 2 * (node.bits & ((1 << hi) - 1)).bit_count() - hi
            p, _ = bwd_scan(node.buf, 0, hi, cur, t)
            return -1 if p < 0 else start + p
        l = node.left
        r = self._bwd(node.right, start + l.size, base + l.e, lim, t)
        if r >= 0:
            return r
        return self._bwd(l, start, base, lim, t)

    # -- range minimum / maximum --------------------------------------------
    def _cover(self, i: int, j: int) -> list:
        """Pieces of ``[i, j]``: ``(node, start, base, lo, hi)``; lo/hi are leaf
        offsets for partial leaves and ``None`` for whole subtrees."""
        out: list = []
        stack = [(self._root, 0, 0)]
        while stack:
            node, start, base = stack.pop()
            end = start + node.size - 1
            if end < i or start > j:
                continue
            if i <= start and end <= j:
                out.append((node, start, base, None, None))
            elif node.is_leaf:
                lo = max(i, start) - start
                hi = min(j, end) - start + 1
                cur = base + 2 * (node.bits & ((1 << lo) - 1)).bit_count() - lo
                out.append((node, start, cur, lo, hi))
            else:
                l = node.left
                stack.append((node.right, start + l.size, base + l.e))
                stack.append((l, start, base))
        return out

    @staticmethod
    def _descend_first(node: _Node, start: int, base: int, t: int, use_max: bool) -> int:
        """First position inside ``node`` whose excess is ``t`` (known to be its
        min or max)."""
        while node.left is not None:
            l = node.left
            v = l.M if use_max else l.m
            if base + v == t:
                node = l
            else:
                start += l.size
                base += l.e
                node = node.right
        p, _ = fwd_scan(node.buf, 0, node.size, base, t)
        return start + p

    def rmqi(self, i: int, j: int) -> tuple[int, int]:
        """Leftmost position of the minimum excess in ``[i, j]`` and that minimum."""
        self._check_range(i, j)
        best, where = _INF, None
        for node, start, base, lo, hi in self._cover(i, j):
            if lo is None:
                if base + node.m < best:
                    best, where = base + node.m, (node, start, base)
            else:
                v, arg, _, _ = min_scan(node.buf, lo, hi, base)
                if v < best:
                    best, where = v, start + arg
        if isinstance(where, tuple):
            where = self._descend_first(*where, best, False)
        return where, best

    def RMQi(self, i: int, j: int) -> tuple[int, int]:
        """Leftmost position of the maximum excess in ``[i, j]`` and that maximum."""
        self._check_range(i, j)
        best, where = -_INF, None
        for node, start, base, lo, hi in self._cover(i, j):
            if lo is None:
                if base + node.M > best:
                    best, where = base + node.M, (node, start, base)
            else:
                v, arg, _ = max_scan(node.buf, lo, hi, base)
                if v > best:
                    best, where = v, start + arg
        if isinstance(where, tuple):
            where = self._descend_first(*where, best, True)
        return where, best

    def _min_pieces(self, i: int, j: int):
        stats = []
        best = _INF
        for piece in self._cover(i, j):
            node, start, base, lo, hi = piece
            if lo is None:
                v, c = base + node.m, node.n
            else:
                v, _, c, _ = min_scan(node.buf, lo, hi, base)
            stats.append((piece, v, c))
            if v < best:
                best = v
        return best, stats

    def min_count(self, i: int, j: int) -> int:
        self._check_range(i, j)
        best, stats = self._min_pieces(i, j)
        return sum(c for _, v, c in stats if v == best)

    def min_select(self, i: int, j: int, q: int) -> int:
        self._check_range(i, j)
        best, stats = self._min_pieces(i, j)
        if q < 1:
            raise ValueError(f"q must be >= 1, got {q}")
        for (node, start, base, lo, hi), v, c in stats:
            if v != best:
                continue
            if q > c:
                q -= c
                continue
            if lo is not None:
                return start + min_select_scan(node.buf, lo, hi, base, best, q)[0]
            while node.left is not None:
                l = node.left
                if base + l.m == best:
                    if q <= l.n:
                        node = l
                        continue
                    q -= l.n
                start += l.size
                base += l.e
                node = node.right
            return start + min_select_scan(node.buf, 0, node.size, base, best, q)[0]
        raise ValueError("q exceeds the number of minima in the range")

    # -- rank / select over P ----------------------------------------------
    def rank1(self, i: int) -> int:
        self._check(i)
        return (i + 1 + self._excess(i)) >> 1

    def rank0(self, i: int) -> int:
        self._check(i)
        return (i + 1 - self._excess(i)) >> 1

    def count1(self) -> int:
        return self._root.ones

    def select1(self, q: int) -> int:
        total = self._root.ones
        if not 1 <= q <= total:
            raise ValueError(f"select1({q}) out of range [1, {total}]")
        node, start = self._root, 0
        while node.left is not None:
            l = node.left
            if q <= l.ones:
                node = l
            else:
                q -= l.ones
                start += l.size
                node = node.right
        return start + select_in_int(node.bits, q)

    def select0(self, q: int) -> int:
        total = self._root.size - self._root.ones
        if not 1 <= q <= total:
            raise ValueError(f"select0({q}) out of range [1, {total}]")
        node, start = self._root, 0
        while node.left is not None:
            l = node.left
            z = l.size - l.ones
            if q <= z:
                node = l
            else:
                q -= z
                start += l.size
                node = node.right
        return start + select0_in_int(node.bits, node.size, q)

    # -- rank / select over the virtual P1 ("10") and P2 ("01") bitmaps ------
    def _pairs_prefix(self, k: int, want10: bool) -> int:
        """Pairs lying entirely inside the first ``k`` bits."""
        node, acc = self._root, 0
        pairs = pairs10 if want10 else pairs01
        while node.left is not None:
            l = node.left
            if k <= l.size:
                node = l
                continue
            r = node.right
            if want10:
                acc += l.p1 + (l.last == 1 and r.first == 0)
            else:
                acc += l.p2 + (l.last == 0 and r.first == 1)
            k -= l.size
            node = r
        return acc + pairs(node.bits & ((1 << k) - 1), k).bit_count()

    def rank_p1(self, i: int) -> int:
        """``10`` pairs starting at or before ``i`` (a virtual 0 follows the end)."""
        self._check(i)
        n = self._root.size
        if i + 2 <= n:
            return self._pairs_prefix(i + 2, True)
        return self._root.p1 + (self._root.last == 1)

    def rank_p2(self, i: int) -> int:
        self._check(i)
        return self._pairs_prefix(min(i + 2, self._root.size), False)

    def count_p1(self) -> int:
        return self._root.p1 + (self._root.last == 1)

    def count_p2(self) -> int:
        return self._root.p2

    def _pairs_select(self, q: int, want10: bool) -> int:
        node, start = self._root, 0
        while node.left is not None:
            l, r = node.left, node.right
            inside = l.p1 if want10 else l.p2
            if q <= inside:
                node = l
                continue
            cross = (l.last == 1 and r.first == 0) if want10 else (l.last == 0 and r.first == 1)
            if cross and q == inside + 1:
                return start + l.size - 1
            q -= inside + cross
            start += l.size
            node = r
        pairs = pairs10 if want10 else pairs01
        return start + select_in_int(pairs(node.bits, node.size), q)

    def select_p1(self, q: int) -> int:
        total = self.count_p1()
        if not 1 <= q <= total:
            raise ValueError(f"select({q}) out of range [1, {total}]")
        if q > self._root.p1:
            return self._root.size - 1
        return self._pairs_select(q, True)

    def select_p2(self, q: int) -> int:
        total = self._root.p2
        if not 1 <= q <= total:
            raise ValueError(f"select({q}) out of range [1, {total}]")
        return self._pairs_select(q, False)

    # -- single-bit edits --------------------------------------------------
    def insert_bit(self, i: int, bit: int) -> None:
        """Insert ``bit`` so that it ends up at position ``i``."""
        n = self._root.size
        if not 0 <= i <= n:
            raise IndexError(f"insert position {i} out of range [0, {n}]")
        leaf, start, _ = self._leaf_at(i)
        off = i - start
        x = leaf.bits
        low = x & ((1 << off) - 1)
        leaf.bits = low | ((1 if bit else 0) << off) | ((x >> off) << (off + 1))
        leaf.size += 1
        if leaf.size > 2 * self.L:
            half = leaf.size >> 1
            x = leaf.bits
            leaf.make_inner(_Node(x & ((1 << half) - 1), half), _Node(x >> half, leaf.size - half))
        else:
            leaf.refresh()
        self._root = _fix_path(self._root, start)

    def delete_bit(self, i: int) -> int:
        """Remove and return the bit at position ``i``."""
        self._check(i)
        leaf, start, _ = self._leaf_at(i)
        off = i - start
        x = leaf.bits
        bit = (x >> off) & 1
        if leaf.size == 1 and not self._root.is_leaf:
            # only reachable with L = 1; an empty leaf would confuse navigation
            self._root = _remove_leaf(self._root, i)
            return bit
        leaf.bits = (x & ((1 << off) - 1)) | ((x >> (off + 1)) << off)
        leaf.size -= 1
        leaf.refresh()
        self._root = _fix_path(self._root, start)
        if leaf.size < self.L and not self._root.is_leaf:
            self._underflow(leaf, start)
        return bit

    def _underflow(self, leaf: _Node, start: int) -> None:
        """Merge with a neighbour of length L, otherwise borrow one bit from it."""
        L = self.L
        end = start + leaf.size
        if end < self._root.size:
            nb, nstart, _ = self._leaf_at(end)
            if nb.size <= L:
                self._root = _remove_leaf(self._root, nstart)
                leaf.bits |= nb.bits << leaf.size
                leaf.size += nb.size
                leaf.refresh()
                self._root = _fix_path(self._root, start)
            else:
                b = nb.bits & 1
                nb.bits >>= 1
                nb.size -= 1
                nb.refresh()
                self._root = _fix_path(self._root, nstart)
                leaf.bits |= b << leaf.size
                leaf.size += 1
                leaf.refresh()
                self._root = _fix_path(self._root, start)
        else:
            nb, nstart, _ = self._leaf_at(start - 1)
            if nb.size <= L:
                self._root = _remove_leaf(self._root, start)
                nb.bits |= leaf.bits << nb.size
                nb.size += leaf.size
                nb.refresh()
                self._root = _fix_path(self._root, nstart)
            else:
                b = (nb.bits >> (nb.size - 1)) & 1
                nb.size -= 1
                nb.bits &= (1 << nb.size) - 1
                nb.refresh()
                self._root = _fix_path(self._root, nstart)
                leaf.bits = (leaf.bits << 1) | b
                leaf.size += 1
                leaf.refresh()
                self._root = _fix_path(self._root, start - 1)

    def _repair(self, pos: int) -> None:
        """Bring the leaves touching ``pos`` back into ``[L, 2L]`` after a split/join."""
        L = self.L
        for p in (pos - 1, pos):
            while not self._root.is_leaf:
                n = self._root.size
                q = min(max(p, 0), n - 1)
                leaf, start, _ = self._leaf_at(q)
                if leaf.size >= L:
                    break
                end = start + leaf.size
                if end < n:
                    nb, nstart, _ = self._leaf_at(end)
                    self._root = _remove_leaf(self._root, nstart)
                    keep, kstart = leaf, start
                    keep.bits |= nb.bits << keep.size
                    keep.size += nb.size
                else:
                    nb, nstart, _ = self._leaf_at(start - 1)
                    self._root = _remove_leaf(self._root, start)
                    keep, kstart = nb, nstart
                    keep.bits |= leaf.bits << keep.size
                    keep.size += leaf.size
                if keep.size > 2 * L:
                    half = keep.size >> 1
                    x = keep.bits
                    keep.make_inner(_Node(x & ((1 << half) - 1), half), _Node(x >> half, keep.size - half))
                else:
                    keep.refresh()
                self._root = _fix_path(self._root, kstart)

    # -- tree edits --------------------------------------------------------
    def insert_pair(self, i: int, j: int) -> None:
        """Insert ``(`` before position ``i`` and ``)`` before position ``j``.

        The new node opens at ``i`` and closes at ``j + 1``; the bits it wraps,
        ``P[i..j-1]``, must themselves be balanced.
        """
        n = self._root.size
        if not 0 <= i <= j <= n:
            raise IndexError(f"pair ({i}, {j}) out of range for length {n}")
        if i < j:
            base = self._excess(i - 1)
            if self._excess(j - 1) != base or self.rmqi(i, j - 1)[1] < base:
                raise BalanceError(f"P[{i}..{j - 1}] is not balanced; pair ({i}, {j}) would not match")
        self.insert_bit(j, 0)
        self.insert_bit(i, 1)

    def _close_of(self, v: int) -> int:
        self._check(v)
        if not self.bit_at(v):
            raise ValueError(f"position {v} is not an opening parenthesis")
        c = self.fwd_search(v, 0)
        if c is None:
            raise BalanceError(f"opening parenthesis at {v} has no match")
        return c

    def delete_node(self, v: int) -> None:
        """Remove node ``v``; its children move up to its parent."""
        c = self._close_of(v)
        self.delete_bit(c)
        self.delete_bit(v)

    def attach(self, p: int, sub: "DynamicRmm") -> None:
        """Splice the balanced sequence ``sub`` in before position ``p``; ``sub``
        is emptied."""
        n = self._root.size
        if not 0 <= p <= n:
            raise IndexError(f"attach position {p} out of range [0, {n}]")
        r = sub._root
        if r.size == 0:
            return
        if r.e != 0 or r.m < 0:
            raise BalanceError("attached sequence is not balanced")
        size = r.size
        a, b = _split(self._root, p)
        self._root = _join(_join(a, r), b)
        sub._root = _Node()
        self._repair(p)
        self._repair(p + size)

    def detach(self, v: int) -> "DynamicRmm":
        """Cut out the subtree of ``v`` and return it as a new structure."""
        c = self._close_of(v)
        a, rest = _split(self._root, v)
        d, b = _split(rest, c - v + 1)
        root = _join(a, b)
        self._root = root if root is not None else _Node()
        self._repair(v)
        out = DynamicRmm._from_root(d, self.L)
        out._repair(0)
        out._repair(len(out))
        return out

    # -- audit -------------------------------------------------------------
    def audit(self) -> Optional[str]:
        """Recompute every cached field bottom-up; None when all agree."""
        fields = ("size", "e", "m", "M", "n", "ones", "p1", "p2", "first", "last", "height")
        L, sole = self.L, self._root.is_leaf
        # iterative post-order so deep trees cannot hit the recursion limit
        stack = [(self._root, "root", False)]
        while stack:
            node, path, done = stack.pop()
            if node.is_leaf:
                if not sole and not L <= node.size <= 2 * L:
                    return f"leaf at {path}: size {node.size} outside [{L}, {2 * L}]"
                if node.bits >> node.size:
                    return f"leaf at {path}: bits set beyond size"
                ref = _Node(node.bits, node.size)
            elif not done:
                stack.append((node, path, True))
                stack.append((node.right, path + ".R", False))
                stack.append((node.left, path + ".L", False))
                continue
            else:
                if abs(node.left.height - node.right.height) > 1:
                    return f"node {path}: unbalanced (heights {node.left.height}, {node.right.height})"
                ref = _Node.__new__(_Node)
                ref.left, ref.right = node.left, node.right
                ref.pull()
            for f in fields:
                got, want = getattr(node, f), getattr(ref, f)
                if got != want:
                    return f"node {path}: {f}={got} expected {want}"
        return None

    def space_bits(self) -> dict:
        """Leaf capacity plus a 64-bit word per cached field and pointer."""
        leaves = self.leaf_count()
        inner = max(leaves - 1, 0)
        payload = leaves * 2 * self.L
        record = 64 * 13
        return {"payload_bits": payload, "summary_bits": (leaves + inner) * record,
                "total_bits": payload + (leaves + inner) * record}

    # -- serialization -----------------------------------------------------
    def to_bytes(self) -> bytes:
        from .static import dump_bits

        return dump_bits(self.to_bits())

    @classmethod
    def from_bytes(cls, data: bytes, leaf_bits: int = DEFAULT_LEAF_BITS) -> "DynamicRmm":
        from .static import load_bits

        bits, _ = load_bits(data)
        return cls(bits, leaf_bits)


def attach(tree: DynamicRmm, p: int, sub: DynamicRmm) -> DynamicRmm:
    """Functional-style wrapper: splices ``sub`` into ``tree`` and returns it."""
    tree.attach(p, sub)
    return tree


def detach(tree: DynamicRmm, v: int) -> tuple[DynamicRmm, DynamicRmm]:
    """Returns ``(remaining, detached)``; ``tree`` itself becomes the remainder."""
    sub = tree.detach(v)
    return tree, sub
