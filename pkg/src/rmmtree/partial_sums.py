"""Searchable partial sums over a dynamic sequence of self-delimiting codes.

Codes are packed LSB-first into leaf segments of at most ``2L`` bits; a code
never straddles two leaves.  Leaves hang under an AVL tree whose nodes keep
the number of codes, the number of bits and, for every weight function
``f``, the sum of ``f`` over the codes below.  Indices in the public API are
1-based, as in ``sum(i) = f(x_1) + ... + f(x_i)``.
"""
from __future__ import annotations

from typing import Any, Callable, Iterable, Optional, Sequence

from .errors import ContractError

DEFAULT_LEAF_BITS = 2048


# ---------------------------------------------------------------------------
# codecs
# ---------------------------------------------------------------------------
class Codec:
    """Self-delimiting code: ``encode(v) -> (bits, length)`` and
    ``decode(x, off) -> (v, length)`` reading LSB-first from bit ``off`` of ``x``."""

    name = "codec"
    max_code_bits = 64

    def encode(self, value) -> tuple[int, int]:
        raise NotImplementedError

    def decode(self, x: int, off: int = 0) -> tuple[Any, int]:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"


class FixedCodec(Codec):
    """Plain ``k``-bit binary."""

    def __init__(self, k: int):
        if not 1 <= k <= 64:
            raise ContractError(f"fixed width must be in [1, 64], got {k}")
        self.k = k
        self.max_code_bits = k
        self.name = f"fixed{k}"
        self._mask = (1 << k) - 1

    def encode(self, value: int) -> tuple[int, int]:
        if not 0 <= value <= self._mask:
            raise ValueError(f"{value} does not fit in {self.k} bits")
        return value, self.k

    def decode(self, x: int, off: int = 0) -> tuple[int, int]:
        return (x >> off) & self._mask, self.k

    def __repr__(self) -> str:
        return f"FixedCodec({self.k})"


def _ctz(y: int) -> int:
    return (y & -y).bit_length() - 1


class GammaCodec(Codec):
    """Elias gamma for values >= 1: ``N`` zeros, a one, then the low ``N`` bits."""

    name = "gamma"
    max_code_bits = 63

    def encode(self, value: int) -> tuple[int, int]:
        if value < 1 or value >= 1 << 32:
            raise ValueError(f"gamma codes cover [1, 2^32), got {value}")
        nb = value.bit_length() - 1
        return (1 << nb) | ((value & ((1 << nb) - 1)) << (nb + 1)), 2 * nb + 1

    def decode(self, x: int, off: int = 0) -> tuple[int, int]:
        y = x >> off
        if not y:
            raise ValueError("truncated gamma code")
        nb = _ctz(y)
        return (1 << nb) | ((y >> (nb + 1)) & ((1 << nb) - 1)), 2 * nb + 1


class DeltaCodec(Codec):
    """Elias delta for values >= 1: gamma of the bit length, then the low bits."""

    name = "delta"
    max_code_bits = 64
    _gamma = GammaCodec()

    def encode(self, value: int) -> tuple[int, int]:
        if value < 1:
            raise ValueError(f"delta codes cover values >= 1, got {value}")
        nb = value.bit_length() - 1
        head, hl = self._gamma.encode(nb + 1)
        if hl + nb > self.max_code_bits:
            raise ValueError(f"{value} needs a {hl + nb}-bit delta code (cap {self.max_code_bits})")
        return head | ((value & ((1 << nb) - 1)) << hl), hl + nb

    def decode(self, x: int, off: int = 0) -> tuple[int, int]:
        n1, hl = self._gamma.decode(x, off)
        nb = n1 - 1
        return (1 << nb) | ((x >> (off + hl)) & ((1 << nb) - 1)), hl + nb


CODECS = {"gamma": GammaCodec, "delta": DeltaCodec}


def make_codec(name: str) -> Codec:
    """``"gamma"``, ``"delta"`` or ``"fixedK"``."""
    if name.startswith("fixed"):
        return FixedCodec(int(name[5:]))
    try:
        return CODECS[name]()
    except KeyError:
        raise ValueError(f"unknown codec {name!r}") from None


def _identity(v):
    return v


# ---------------------------------------------------------------------------
# the tree
# ---------------------------------------------------------------------------
class _Node:
    __slots__ = ("left", "right", "height", "count", "nbits", "sums", "bits")

    def pull(self) -> None:
        l, r = self.left, self.right
        self.count = l.count + r.count
        self.nbits = l.nbits + r.nbits
        self.sums = tuple(a + b for a, b in zip(l.sums, r.sums))
        self.height = 1 + max(l.height, r.height)


def _inner(l: _Node, r: _Node) -> _Node:
    node = _Node()
    node.left, node.right, node.bits = l, r, 0
    node.pull()
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


def _fix_path(node: _Node, idx: int) -> _Node:
    """Re-pull the path to the leaf whose first code has index ``idx``."""
    if node.left is None:
        return node
    if idx < node.left.count:
        node.left = _fix_path(node.left, idx)
    else:
        node.right = _fix_path(node.right, idx - node.left.count)
    return _rebalance(node)


def _remove_leaf(node: _Node, idx: int) -> _Node:
    l = node.left
    if idx < l.count:
        if l.left is None:
            return node.right
        node.left = _remove_leaf(l, idx)
    else:
        r = node.right
        if r.left is None:
            return l
        node.right = _remove_leaf(r, idx - l.count)
    return _rebalance(node)


def _build(leaves: list, lo: int, hi: int) -> _Node:
    if hi - lo == 1:
        return leaves[lo]
    mid = (lo + hi) >> 1
    return _inner(_build(leaves, lo, mid), _build(leaves, mid, hi))


class CodeSequence:
    """Dynamic sequence of coded values with prefix sums and search.

    ``weights`` is a tuple of nonnegative integer functions of a value; each
    gets its own sum.  Queries take ``w``, the index of the weight to use.
    """

    def __init__(self, codec: Codec, weights: Sequence[Callable[[Any], int]] = (_identity,),
                 leaf_bits: int = DEFAULT_LEAF_BITS, values: Iterable = ()):
        if leaf_bits < codec.max_code_bits:
            raise ContractError(f"leaf_bits ({leaf_bits}) must be at least the longest code ({codec.max_code_bits})")
        if not weights:
            raise ContractError("at least one weight function is required")
        self.codec = codec
        self.weights = tuple(weights)
        self.L = leaf_bits
        self._root = self._build(list(values))

    @classmethod
    def from_values(cls, values: Iterable, codec: Codec, **kw) -> "CodeSequence":
        return cls(codec, values=values, **kw)

    # -- leaves ------------------------------------------------------------
    def _leaf(self, vals: list) -> _Node:
        node = _Node()
        node.left = node.right = None
        node.height = 1
        self._fill(node, vals)
        return node

    def _fill(self, node: _Node, vals: list) -> None:
        x, off = 0, 0
        enc = self.codec.encode
        for v in vals:
            c, ln = enc(v)
            x |= c << off
            off += ln
        node.bits = x
        node.nbits = off
        node.count = len(vals)
        node.sums = tuple(sum(f(v) for v in vals) for f in self.weights)

    def _decode(self, node: _Node) -> list:
        out = []
        x, off, end = node.bits, 0, node.nbits
        dec = self.codec.decode
        while off < end:
            v, ln = dec(x, off)
            out.append(v)
            off += ln
        return out

    def _encoded(self, vals: list) -> list:
        out = []
        for v in vals:
            c, ln = self.codec.encode(v)
            if ln > self.codec.max_code_bits:
                raise ValueError(f"code for {v!r} is longer than {self.codec.max_code_bits} bits")
            out.append((c, ln))
        return out

    def _build(self, vals: list) -> _Node:
        if not vals:
            return self._leaf([])
        lens = [ln for _, ln in self._encoded(vals)]
        target = (3 * self.L) // 2
        leaves, cur, acc = [], [], 0
        for v, ln in zip(vals, lens):
            if acc + ln > target and cur:
                leaves.append(self._leaf(cur))
                cur, acc = [], 0
            cur.append(v)
            acc += ln
        leaves.append(self._leaf(cur))
        return _build(leaves, 0, len(leaves))

    def _find(self, idx: int) -> tuple[_Node, int, tuple]:
        """Leaf holding 0-based code ``idx`` (the last leaf when idx == count),
        its first index and the sums before it."""
        node, start = self._root, 0
        before = [0] * len(self.weights)
        while node.left is not None:
            l = node.left
            if idx < l.count:
                node = l
            else:
                idx -= l.count
                start += l.count
                for k, s in enumerate(l.sums):
                    before[k] += s
                node = node.right
        return node, start, tuple(before)

    def _store(self, leaf: _Node, start: int, vals: list) -> None:
        """Write ``vals`` back into ``leaf`` and fix the tree, splitting on overflow."""
        self._fill(leaf, vals)
        if leaf.nbits > 2 * self.L and len(vals) > 1:
            lens = [ln for _, ln in self._encoded(vals)]
            half, acc, cut = leaf.nbits / 2, 0, 1
            best = None
            for k in range(1, len(vals)):
                acc += lens[k - 1]
                if best is None or abs(acc - half) < best:
                    best, cut = abs(acc - half), k
            a, b = self._leaf(vals[:cut]), self._leaf(vals[cut:])
            leaf.left, leaf.right, leaf.bits = a, b, 0
            leaf.pull()
        self._root = _fix_path(self._root, start)

    # -- public API --------------------------------------------------------
    def __len__(self) -> int:
        return self._root.count

    def __iter__(self):
        stack = [self._root]
        while stack:
            node = stack.pop()
            if node.left is None:
                yield from self._decode(node)
            else:
                stack.append(node.right)
                stack.append(node.left)

    def to_list(self) -> list:
        return list(self)

    def __repr__(self) -> str:
        return f"CodeSequence(codec={self.codec!r}, len={len(self)}, bits={self._root.nbits})"

    def _check(self, i: int) -> None:
        n = self._root.count
        if not 1 <= i <= n:
            raise IndexError(f"index {i} out of range [1, {n}]")

    def access(self, i: int, j: Optional[int] = None) -> list:
        """Values ``x_i .. x_j`` (1-based, inclusive); ``j`` defaults to ``i``."""
        j = i if j is None else j
        self._check(i)
        self._check(j)
        if j < i:
            raise ValueError(f"empty range {i}..{j}")
        out: list = []
        k = i - 1
        while k < j:
            leaf, start, _ = self._find(k)
            vals = self._decode(leaf)
            take = vals[k - start:j - start]
            out.extend(take)
            k += len(take)
        return out

    def __getitem__(self, i: int):
        return self.access(i + 1)[0]

    def update(self, i: int, value) -> None:
        self._check(i)
        leaf, start, _ = self._find(i - 1)
        vals = self._decode(leaf)
        vals[i - 1 - start] = value
        self._encoded([value])
        self._store(leaf, start, vals)

    def insert(self, i: int, value) -> None:
        """Insert so that ``value`` becomes ``x_i`` (``1 <= i <= len + 1``)."""
        n = self._root.count
        if not 1 <= i <= n + 1:
            raise IndexError(f"insert index {i} out of range [1, {n + 1}]")
        self._encoded([value])
        leaf, start, _ = self._find(i - 1)
        vals = self._decode(leaf)
        vals.insert(i - 1 - start, value)
        if leaf.count == 0:
            # empty sole leaf: no path to fix
            self._fill(leaf, vals)
            return
        self._store(leaf, start, vals)

    def delete(self, i: int):
        """Remove and return ``x_i``."""
        self._check(i)
        leaf, start, _ = self._find(i - 1)
        vals = self._decode(leaf)
        v = vals.pop(i - 1 - start)
        if not vals and self._root.left is not None:
            self._root = _remove_leaf(self._root, start)
            return v
        self._store(leaf, start, vals)
        if leaf.nbits < self.L // 2 and self._root.left is not None:
            self._merge_small(leaf, start)
        return v

    def _merge_small(self, leaf: _Node, start: int) -> None:
        n = self._root.count
        end = start + leaf.count
        if end < n:
            nb, nstart, _ = self._find(end)
            if leaf.nbits + nb.nbits > 2 * self.L:
                return
            vals = self._decode(nb)
            self._root = _remove_leaf(self._root, nstart)
            self._store(leaf, start, self._decode(leaf) + vals)
        else:
            nb, nstart, _ = self._find(start - 1)
            if leaf.nbits + nb.nbits > 2 * self.L:
                return
            vals = self._decode(leaf)
            self._root = _remove_leaf(self._root, start)
            self._store(nb, nstart, self._decode(nb) + vals)

    def sum(self, i: int, w: int = 0) -> int:
        """``f_w(x_1) + ... + f_w(x_i)``; ``sum(0) == 0``."""
        n = self._root.count
        if not 0 <= i <= n:
            raise IndexError(f"prefix length {i} out of range [0, {n}]")
        if i == 0:
            return 0
        leaf, start, before = self._find(i - 1)
        f = self.weights[w]
        return before[w] + sum(f(v) for v in self._decode(leaf)[:i - start])

    def total(self, w: int = 0) -> int:
        return self._root.sums[w]

    def search(self, s: int, w: int = 0) -> int:
        """Largest ``i`` with ``sum(i) <= s`` (0 if even ``x_1`` is too heavy)."""
        if s < 0:
            raise ValueError(f"search target must be >= 0, got {s}")
        node, idx, acc = self._root, 0, 0
        while node.left is not None:
            l = node.left
            if acc + l.sums[w] <= s:
                acc += l.sums[w]
                idx += l.count
                node = node.right
            else:
                node = l
        f = self.weights[w]
        for v in self._decode(node):
            acc += f(v)
            if acc > s:
                break
            idx += 1
        return idx

    def locate(self, s: int, key: Callable[[tuple], int]) -> tuple[int, Any, tuple]:
        """First code whose running ``key(sums)`` exceeds ``s``.

        ``key`` maps a tuple of weight sums to a nonnegative integer (so it
        can combine weights, e.g. width minus popcount).  Returns the 0-based
        index, the value, and the weight sums of all codes before it.
        """
        node, idx = self._root, 0
        before = [0] * len(self.weights)
        while node.left is not None:
            l = node.left
            k = key(l.sums)
            if k <= s:
                s -= k
                idx += l.count
                for t, x in enumerate(l.sums):
                    before[t] += x
                node = node.right
            else:
                node = l
        ws = self.weights
        for v in self._decode(node):
            sv = tuple(f(v) for f in ws)
            k = key(sv)
            if k > s:
                return idx, v, tuple(before)
            s -= k
            idx += 1
            for t, x in enumerate(sv):
                before[t] += x
        raise IndexError("target beyond the total weight")

    # -- accounting --------------------------------------------------------
    def node_count(self) -> int:
        c, stack = 0, [self._root]
        while stack:
            node = stack.pop()
            c += 1
            if node.left is not None:
                stack.extend((node.left, node.right))
        return c

    def record_bits(self) -> int:
        """Model of one node record: height, count, nbits, one word per weight,
        and two pointers, 64 bits each."""
        return 64 * (5 + len(self.weights))

    def space_bits(self) -> dict:
        payload = self._root.nbits
        overhead = self.node_count() * self.record_bits()
        return {"payload_bits": payload, "overhead_bits": overhead, "total_bits": payload + overhead}

    def audit(self) -> Optional[str]:
        """Recheck cached counts, sums, heights and leaf sizes; None if clean."""
        stack = [(self._root, "root", False)]
        sole = self._root.left is None
        while stack:
            node, path, done = stack.pop()
            if node.left is None:
                vals = self._decode(node)
                ref = self._leaf(vals)
                if node.nbits > 2 * self.L:
                    return f"leaf {path}: {node.nbits} bits exceeds {2 * self.L}"
                if not vals and not sole:
                    return f"leaf {path}: empty"
                ref.height = 1
            elif not done:
                stack.append((node, path, True))
                stack.append((node.right, path + ".R", False))
                stack.append((node.left, path + ".L", False))
                continue
            else:
                if abs(node.left.height - node.right.height) > 1:
                    return f"node {path}: unbalanced"
                ref = _Node()
                ref.left, ref.right = node.left, node.right
                ref.pull()
            for f in ("count", "nbits", "sums", "height"):
                if getattr(node, f) != getattr(ref, f):
                    return f"node {path}: {f}={getattr(node, f)} expected {getattr(ref, f)}"
        return None
