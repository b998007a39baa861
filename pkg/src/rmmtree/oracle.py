"""Brute-force reference answers and random balanced sequences.

Nothing here is clever on purpose: primitives are literal linear scans and the
tree operations read an explicit pointer tree, plus a few per-node tables that
one traversal of it fills in.  The error behaviour mirrors the
fast structures so tests can compare exceptions as well as values.
"""
from __future__ import annotations

from bisect import bisect_right
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .bits import ParenBitVector
from .errors import NoParentError


def _bits(P) -> list[int]:
    if isinstance(P, str):
        P = ParenBitVector(P)
    return list(P)


def _excess(bits: Sequence[int]) -> list[int]:
    out, cur = [], 0
    for b in bits:
        cur += 1 if b else -1
        out.append(cur)
    return out


def _check(bits, i):
    if not 0 <= i < len(bits):
        raise IndexError(f"position {i} out of range")


def _check_range(bits, i, j):
    if not 0 <= i <= j < len(bits):
        raise IndexError(f"range [{i}, {j}] invalid")


def _sum(bits, i, j):
    return sum(1 if bits[k] else -1 for k in range(i, j + 1))


def _fwd_search(bits, i, d):
    _check(bits, i)
    s = 0
    for j in range(i, len(bits)):
        s += 1 if bits[j] else -1
        if s == d:
            return j
    return None


def _bwd_search(bits, i, d):
    _check(bits, i)
    s = 0
    for j in range(i, -1, -1):
        s += 1 if bits[j] else -1
        if s == d:
            return j
    return None


def _range_excess(bits, i, j):
    _check_range(bits, i, j)
    return _excess(bits)[i:j + 1]


def _rmqi(bits, i, j):
    vals = _range_excess(bits, i, j)
    v = min(vals)
    return i + vals.index(v), v


def _RMQi(bits, i, j):
    vals = _range_excess(bits, i, j)
    v = max(vals)
    return i + vals.index(v), v


def _min_count(bits, i, j):
    vals = _range_excess(bits, i, j)
    return vals.count(min(vals))


def _min_select(bits, i, j, q):
    vals = _range_excess(bits, i, j)
    lo = min(vals)
    hits = [i + k for k, v in enumerate(vals) if v == lo]
    if not 1 <= q <= len(hits):
        raise ValueError("q out of range")
    return hits[q - 1]


def _marks(bits, kind):
    nxt = list(bits[1:]) + [0]
    if kind == "p1":
        return [1 if b == 1 and c == 0 else 0 for b, c in zip(bits, nxt)]
    if kind == "p2":
        return [1 if b == 0 and c == 1 else 0 for b, c in zip(bits, nxt)]
    if kind == "0":
        return [1 - b for b in bits]
    return list(bits)


def _rank(bits, i, kind):
    _check(bits, i)
    return sum(_marks(bits, kind)[:i + 1])


def _select(bits, q, kind):
    hits = [k for k, b in enumerate(_marks(bits, kind)) if b]
    if not 1 <= q <= len(hits):
        raise ValueError("select argument out of range")
    return hits[q - 1]


PRIMITIVES = {
    "bit_at": lambda b, i: (_check(b, i), b[i])[1],
    "excess": lambda b, i: (_check(b, i), _sum(b, 0, i))[1],
    "sum": lambda b, i, j: (_check_range(b, i, j), _sum(b, i, j))[1],
    "fwd_search": _fwd_search,
    "bwd_search": _bwd_search,
    "rmqi": _rmqi,
    "RMQi": _RMQi,
    "min_count": _min_count,
    "min_select": _min_select,
    "rank1": lambda b, i: _rank(b, i, "1"),
    "rank0": lambda b, i: _rank(b, i, "0"),
    "select1": lambda b, q: _select(b, q, "1"),
    "select0": lambda b, q: _select(b, q, "0"),
    "rank_p1": lambda b, i: _rank(b, i, "p1"),
    "select_p1": lambda b, q: _select(b, q, "p1"),
    "rank_p2": lambda b, i: _rank(b, i, "p2"),
    "select_p2": lambda b, q: _select(b, q, "p2"),
}


def naive_primitive(name: str, P, *args):
    """Evaluate primitive ``name`` on ``P`` by direct scanning."""
    return PRIMITIVES[name](_bits(P), *args)


class NaiveTree:
    """Explicit pointer tree (or forest) decoded from a balanced sequence."""

    def __init__(self, P):
        bits = _bits(P)
        self.bits = bits
        self.close: dict[int, int] = {}
        self.open_of: dict[int, int] = {}
        self.parent: dict[int, Optional[int]] = {}
        self.children: dict[int, list[int]] = {}
        self.depth: dict[int, int] = {}
        self.roots: list[int] = []
        stack: list[int] = []
        for pos, b in enumerate(bits):
            if b:
                par = stack[-1] if stack else None
                self.parent[pos] = par
                self.children[pos] = []
                self.depth[pos] = len(stack) + 1
                (self.children[par] if par is not None else self.roots).append(pos)
                stack.append(pos)
            else:
                if not stack:
                    raise ValueError(f"unbalanced at position {pos}")
                o = stack.pop()
                self.close[o] = pos
                self.open_of[pos] = o
        if stack:
            raise ValueError("unbalanced: unclosed parentheses")
        self.preorder: list[int] = sorted(self.close)
        self.postorder: list[int] = sorted(self.close, key=self.close.get)
        self.leaves: list[int] = [v for v in self.preorder if not self.children[v]]
        self.levels: dict[int, list[int]] = {}
        for v in self.preorder:
            self.levels.setdefault(self.depth[v], []).append(v)
        self.inorders: dict[int, list[int]] = {v: [] for v in self.preorder}
        counter = 0
        # iterative DFS assigning inorder numbers between consecutive children
        for root in self.roots:
            todo = [(root, 0)]
            while todo:
                v, idx = todo.pop()
                kids = self.children[v]
                if idx > 0 and idx < len(kids):
                    counter += 1
                    self.inorders[v].append(counter)
                if idx < len(kids):
                    todo.append((v, idx + 1))
                    todo.append((kids[idx], 0))
        self.inorder_owner = {q: v for v, qs in self.inorders.items() for q in qs}

    def to_bits(self) -> list[int]:
        out = [0] * (2 * len(self.close))
        for v in self.close:
            out[v] = 1
        return out

    @property
    def size(self) -> int:
        return len(self.close)

    def _node(self, v):
        if not 0 <= v < len(self.bits):
            raise IndexError(f"position {v} out of range")
        if v not in self.close:
            raise ValueError(f"position {v} is not an opening parenthesis")
        return v

    def ancestors(self, v) -> list[int]:
        out = []
        while v is not None:
            out.append(v)
            v = self.parent[v]
        return out

    def subtree(self, v) -> list[int]:
        c = self.close[v]
        return [u for u in self.preorder if v <= u <= c]

    def siblings(self, v) -> list[int]:
        par = self.parent[v]
        return self.roots if par is None else self.children[par]

    # per-node tables, filled on first use by one pass over the pointer tree
    @cached_property
    def _index(self) -> dict:
        t = {"pre": {v: k for k, v in enumerate(self.preorder)},
             "post": {v: k for k, v in enumerate(self.postorder)},
             "sib": {}, "lvl": {}, "size": {}, "deep": {}, "lleaf": {}, "rleaf": {}}
        for v in self.preorder:
            for k, c in enumerate(self.children[v]):
                t["sib"][c] = k
        for k, v in enumerate(self.roots):
            t["sib"][v] = k
        for row in self.levels.values():
            for k, v in enumerate(row):
                t["lvl"][v] = k
        for v in self.postorder:
            kids = self.children[v]
            if not kids:
                t["size"][v], t["deep"][v] = 1, v
                t["lleaf"][v] = t["rleaf"][v] = v
                continue
            t["size"][v] = 1 + sum(t["size"][c] for c in kids)
            best = None
            for c in kids:
                d = t["deep"][c]
                if best is None or self.depth[d] > self.depth[best]:
                    best = d
            t["deep"][v] = best
            t["lleaf"][v] = t["lleaf"][kids[0]]
            t["rleaf"][v] = t["rleaf"][kids[-1]]
        return t

    # -- operations, named as in the public API ---------------------------
    def inspect(self, i):
        if not 0 <= i < len(self.bits):
            raise IndexError(f"position {i} out of range")
        return self.bits[i]

    def find_close(self, v):
        return self.close[self._node(v)]

    def find_open(self, c):
        if not 0 <= c < len(self.bits):
            raise IndexError(f"position {c} out of range")
        if c not in self.open_of:
            raise ValueError(f"position {c} is not a closing parenthesis")
        return self.open_of[c]

    def enclose(self, v):
        par = self.parent[self._node(v)]
        if par is None:
            raise NoParentError(f"node {v} has no parent")
        return par

    def parent_of(self, v):
        return self.parent[self._node(v)]

    def depth_of(self, v):
        return self.depth[self._node(v)]

    def subtree_size(self, v):
        return self._index["size"][self._node(v)]

    def isleaf(self, v):
        return not self.children[self._node(v)]

    def isancestor(self, u, v):
        self._node(u)
        return u in self.ancestors(self._node(v))

    def first_child(self, v):
        kids = self.children[self._node(v)]
        return kids[0] if kids else None

    def last_child(self, v):
        kids = self.children[self._node(v)]
        return kids[-1] if kids else None

    def next_sibling(self, v):
        sib = self.siblings(self._node(v))
        k = self._index["sib"][v]
        return sib[k + 1] if k + 1 < len(sib) else None

    def prev_sibling(self, v):
        sib = self.siblings(self._node(v))
        k = self._index["sib"][v]
        return sib[k - 1] if k > 0 else None

    def pre_rank(self, v):
        return self._index["pre"][self._node(v)] + 1

    def pre_select(self, q):
        if not 1 <= q <= self.size:
            raise ValueError("preorder rank out of range")
        return self.preorder[q - 1]

    def post_rank(self, v):
        return self._index["post"][self._node(v)] + 1

    def post_select(self, q):
        if not 1 <= q <= self.size:
            raise ValueError("postorder rank out of range")
        return self.postorder[q - 1]

    def level_ancestor(self, v, d):
        self._node(v)
        if d < 0:
            raise ValueError("distance must be non-negative")
        anc = self.ancestors(v)
        return anc[d] if d < len(anc) else None

    def level_next(self, v):
        row = self.levels[self.depth[self._node(v)]]
        k = self._index["lvl"][v]
        return row[k + 1] if k + 1 < len(row) else None

    def level_prev(self, v):
        row = self.levels[self.depth[self._node(v)]]
        k = self._index["lvl"][v]
        return row[k - 1] if k > 0 else None

    def level_lmost(self, d):
        if d < 1:
            raise ValueError("depth must be >= 1")
        row = self.levels.get(d)
        return row[0] if row else None

    def level_rmost(self, d):
        if d < 1:
            raise ValueError("depth must be >= 1")
        row = self.levels.get(d)
        return row[-1] if row else None

    def lca(self, u, v):
        self._node(u)
        common = set(self.ancestors(u))
        for a in self.ancestors(self._node(v)):
            if a in common:
                return a
        return None

    def deepest_node(self, v):
        return self._index["deep"][self._node(v)]

    def height(self, v):
        return self.depth[self.deepest_node(v)] - self.depth[v]

    def degree(self, v):
        return len(self.children[self._node(v)])

    def child(self, v, q):
        kids = self.children[self._node(v)]
        if not 1 <= q <= len(kids):
            raise ValueError("child index out of range")
        return kids[q - 1]

    def child_rank(self, v):
        if self.parent[self._node(v)] is None:
            return None
        return self._index["sib"][v] + 1

    def leaf_rank(self, v):
        return bisect_right(self.leaves, self._node(v))

    def leaf_select(self, q):
        if not 1 <= q <= len(self.leaves):
            raise ValueError("leaf rank out of range")
        return self.leaves[q - 1]

    def lmost_leaf(self, v):
        return self._index["lleaf"][self._node(v)]

    def rmost_leaf(self, v):
        return self._index["rleaf"][self._node(v)]

    def in_rank(self, v):
        qs = self.inorders[self._node(v)]
        return qs[0] if qs else None

    def in_select(self, q):
        if q not in self.inorder_owner:
            raise ValueError("inorder rank out of range")
        return self.inorder_owner[q]


_TREE_ALIASES = {"parent": "parent_of", "depth": "depth_of"}


def naive_tree_op(name: str, P, *args):
    """Evaluate tree operation ``name`` on the pointer tree decoded from ``P``."""
    tree = P if isinstance(P, NaiveTree) else NaiveTree(P)
    return getattr(tree, _TREE_ALIASES.get(name, name))(*args)


def gen_balanced(n_nodes: int, seed=None, rooted: bool = True) -> ParenBitVector:
    """Uniformly random balanced sequence with ``n_nodes`` parenthesis pairs.

    ``rooted`` wraps a random forest of ``n_nodes - 1`` nodes in a root, giving
    a uniformly random ordinal tree; otherwise the forest itself is returned.
    Uses the cycle lemma: shuffle ``m`` up-steps and ``m + 1`` down-steps, rotate
    to start just after the first prefix minimum, and drop the final down-step.
    """
    if n_nodes < 1:
        raise ValueError("n_nodes must be >= 1")
    rng = np.random.default_rng(seed)
    m = n_nodes - 1 if rooted else n_nodes
    steps = np.zeros(2 * m + 1, dtype=np.int8)
    steps[:m] = 1
    rng.shuffle(steps)
    prefix = np.cumsum(steps.astype(np.int64) * 2 - 1)
    t = int(np.argmin(prefix))
    word = np.concatenate([steps[t + 1:], steps[:t + 1]])[:-1]
    if rooted:
        word = np.concatenate([[1], word, [0]]).astype(np.uint8)
    return ParenBitVector.from_numpy(word)
