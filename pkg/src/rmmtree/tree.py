"""Ordinal-tree navigation on top of the excess-search primitives.

A node is the position of its opening parenthesis.  Depth counts the root as
1, and ``isancestor`` is reflexive.  Relatives that do not exist (the parent
of a root, the next sibling of a last child, ...) come back as ``None``;
passing a position that is not an opening parenthesis raises ``ValueError``.
"""
from __future__ import annotations

from typing import Optional, Protocol, Union

from .bits import ParenBitVector
from .errors import ContractError, NoParentError


class Primitives(Protocol):
    """What the navigation layer needs from a range min-max tree."""

    def __len__(self) -> int: ...
    def bit_at(self, i: int) -> int: ...
    def excess(self, i: int) -> int: ...
    def fwd_search(self, i: int, d: int) -> Optional[int]: ...
    def bwd_search(self, i: int, d: int) -> Optional[int]: ...
    def rmqi(self, i: int, j: int) -> tuple[int, int]: ...
    def RMQi(self, i: int, j: int) -> tuple[int, int]: ...
    def min_count(self, i: int, j: int) -> int: ...
    def min_select(self, i: int, j: int, q: int) -> int: ...
    def rank1(self, i: int) -> int: ...
    def rank0(self, i: int) -> int: ...
    def select1(self, q: int) -> int: ...
    def select0(self, q: int) -> int: ...
    def rank_p1(self, i: int) -> int: ...
    def select_p1(self, q: int) -> int: ...
    def rank_p2(self, i: int) -> int: ...
    def select_p2(self, q: int) -> int: ...


class OrdinalTree:
    """Table-1 style tree operations over a balanced parentheses sequence.

    ``prim`` is a :class:`~rmmtree.static.StaticRmm`,
    :class:`~rmmtree.dynamic.DynamicRmm`, or anything else with the same
    primitive methods.  A string or :class:`ParenBitVector` builds a static tree.
    """

    def __init__(self, prim: Union[Primitives, str, ParenBitVector], check: bool = True):
        if isinstance(prim, (str, ParenBitVector)):
            from .static import StaticRmm

            prim = StaticRmm(prim)
        self.prim = prim
        if check and len(prim) and (prim.excess(len(prim) - 1) != 0 or prim.rmqi(0, len(prim) - 1)[1] < 0):
            raise ContractError("sequence is not balanced")

    def __len__(self) -> int:
        return len(self.prim)

    @property
    def node_count(self) -> int:
        return len(self.prim) // 2

    def _open(self, v: int) -> int:
        if not 0 <= v < len(self.prim):
            raise IndexError(f"position {v} out of range [0, {len(self.prim)})")
        if not self.prim.bit_at(v):
            raise ValueError(f"position {v} is not an opening parenthesis")
        return v

    def _is_open(self, i: int) -> bool:
        return 0 <= i < len(self.prim) and self.prim.bit_at(i) == 1

    # -- parentheses -------------------------------------------------------
    def inspect(self, i: int) -> int:
        return self.prim.bit_at(i)

    def find_close(self, v: int) -> int:
        return self.prim.fwd_search(self._open(v), 0)

    def find_open(self, c: int) -> int:
        if not 0 <= c < len(self.prim):
            raise IndexError(f"position {c} out of range [0, {len(self.prim)})")
        if self.prim.bit_at(c):
            raise ValueError(f"position {c} is not a closing parenthesis")
        return self.prim.bwd_search(c, 0)

    def enclose(self, v: int) -> int:
        p = self.prim.bwd_search(self._open(v), 2)
        if p is None:
            raise NoParentError(f"node {v} has no parent")
        return p

    # -- structure ---------------------------------------------------------
    def depth(self, v: int) -> int:
        return self.prim.excess(self._open(v))

    def parent(self, v: int) -> Optional[int]:
        return self.prim.bwd_search(self._open(v), 2)

    def subtree_size(self, v: int) -> int:
        return (self.find_close(v) - v + 1) // 2

    def isleaf(self, v: int) -> bool:
        return not self._is_open(self._open(v) + 1)

    def isancestor(self, u: int, v: int) -> bool:
        c = self.find_close(u)
        self._open(v)
        return u <= v <= c

    def first_child(self, v: int) -> Optional[int]:
        return v + 1 if self._is_open(self._open(v) + 1) else None

    def last_child(self, v: int) -> Optional[int]:
        if not self._is_open(self._open(v) + 1):
            return None
        return self.prim.bwd_search(self.find_close(v) - 1, 0)

    def next_sibling(self, v: int) -> Optional[int]:
        c = self.find_close(v)
        return c + 1 if self._is_open(c + 1) else None

    def prev_sibling(self, v: int) -> Optional[int]:
        self._open(v)
        if v == 0 or self.prim.bit_at(v - 1):
            return None
        return self.prim.bwd_search(v - 1, 0)

    # -- orders ------------------------------------------------------------
    def pre_rank(self, v: int) -> int:
        return self.prim.rank1(self._open(v))

    def pre_select(self, q: int) -> int:
        return self.prim.select1(q)

    def post_rank(self, v: int) -> int:
        return self.prim.rank0(self.find_close(v))

    def post_select(self, q: int) -> int:
        return self.prim.bwd_search(self.prim.select0(q), 0)

    # -- levels ------------------------------------------------------------
    def level_ancestor(self, v: int, d: int) -> Optional[int]:
        """Ancestor ``d`` levels above ``v`` (``d = 0`` is ``v`` itself)."""
        self._open(v)
        if d < 0:
            raise ValueError(f"distance must be non-negative, got {d}")
        return self.prim.bwd_search(v, d + 1)

    def level_next(self, v: int) -> Optional[int]:
        r = self.prim.fwd_search(self.find_close(v), 0)
        return r if r is not None and self.prim.bit_at(r) else None

    def level_prev(self, v: int) -> Optional[int]:
        r = self.prim.bwd_search(self._open(v), 0)
        if r is None or self.prim.bit_at(r):
            return None
        return self.prim.bwd_search(r, 0)

    def level_lmost(self, d: int) -> Optional[int]:
        if d < 1:
            raise ValueError(f"depth must be >= 1, got {d}")
        r = self.prim.fwd_search(0, d)
        return r if r is not None and self.prim.bit_at(r) else None

    def level_rmost(self, d: int) -> Optional[int]:
        if d < 1:
            raise ValueError(f"depth must be >= 1, got {d}")
        r = self.prim.bwd_search(len(self.prim) - 1, -d)
        if r is None or self.prim.bit_at(r):
            return None
        return self.prim.bwd_search(r, 0)

    # -- lca and depth extremes --------------------------------------------
    def lca(self, u: int, v: int) -> Optional[int]:
        self._open(u)
        self._open(v)
        if u > v:
            u, v = v, u
        if v <= self.prim.fwd_search(u, 0):
            return u
        return self.parent(self.prim.rmqi(u, v)[0] + 1)

    def deepest_node(self, v: int) -> int:
        return self.prim.RMQi(v, self.find_close(v))[0]

    def height(self, v: int) -> int:
        c = self.find_close(v)
        return self.prim.RMQi(v, c)[1] - self.prim.excess(v)

    # -- children ----------------------------------------------------------
    def degree(self, v: int) -> int:
        c = self.find_close(v)
        if c == v + 1:
            return 0
        return self.prim.min_count(v + 1, c - 1)

    def child(self, v: int, q: int) -> int:
        c = self.find_close(v)
        if c == v + 1 or q < 1:
            raise ValueError(f"node {v} has no child number {q}")
        if q == 1:
            return v + 1
        try:
            r = self.prim.min_select(v + 1, c - 1, q - 1) + 1
        except ValueError:
            r = c
        if r >= c:
            raise ValueError(f"node {v} has no child number {q}")
        return r

    def child_rank(self, v: int) -> Optional[int]:
        p = self.parent(v)
        if p is None:
            return None
        return self.prim.min_count(p, v - 1)

    # -- leaves ------------------------------------------------------------
    def leaf_rank(self, v: int) -> int:
        return self.prim.rank_p1(self._open(v))

    def leaf_select(self, q: int) -> int:
        return self.prim.select_p1(q)

    def lmost_leaf(self, v: int) -> int:
        before = self.prim.rank_p1(v - 1) if self._open(v) else 0
        return self.prim.select_p1(before + 1)

    def rmost_leaf(self, v: int) -> int:
        return self.prim.select_p1(self.prim.rank_p1(self.find_close(v)))

    # -- inorder -----------------------------------------------------------
    def in_rank(self, v: int) -> Optional[int]:
        """Smallest inorder number of ``v``; None unless ``v`` has 2+ children."""
        if not self._is_open(self._open(v) + 1):
            return None
        c = self.prim.fwd_search(v + 1, 0)
        if not self._is_open(c + 1):
            return None
        return self.prim.rank_p2(c)

    def in_select(self, q: int) -> int:
        """Node owning inorder number ``q``.  On a forest the gap between two
        consecutive roots also takes a number (it has no owner to return)."""
        return self.enclose(self.prim.select_p2(q) + 1)
