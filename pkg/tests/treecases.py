"""Argument enumeration for comparing OrdinalTree against the pointer-tree oracle."""
from rmmtree.oracle import NaiveTree

NODE_OPS = [
    "find_close", "enclose", "depth", "parent", "subtree_size", "isleaf", "first_child",
    "last_child", "next_sibling", "prev_sibling", "pre_rank", "post_rank", "level_next",
    "level_prev", "deepest_node", "height", "degree", "child_rank", "leaf_rank", "lmost_leaf",
    "rmost_leaf", "in_rank",
]
ALIASES = {"parent": "parent_of", "depth": "depth_of"}


def outcome(f, *args):
    try:
        return f(*args)
    except Exception as exc:
        return type(exc)


def all_cases(N: NaiveTree):
    """Every valid argument combination of every operation."""
    opens = N.preorder
    n = len(N.bits)
    for op in NODE_OPS:
        for v in opens:
            yield op, (v,)
    for i in range(n):
        yield "inspect", (i,)
    for c in N.open_of:
        yield "find_open", (c,)
    for q in range(1, N.size + 1):
        yield "pre_select", (q,)
        yield "post_select", (q,)
    for q in range(1, len(N.leaves) + 1):
        yield "leaf_select", (q,)
    for q in range(1, len(N.inorder_owner) + 1):
        yield "in_select", (q,)
    for v in opens:
        for d in range(N.depth[v] + 1):
            yield "level_ancestor", (v, d)
        for q in range(1, len(N.children[v]) + 1):
            yield "child", (v, q)
    for d in range(1, max(N.depth.values()) + 1):
        yield "level_lmost", (d,)
        yield "level_rmost", (d,)
    for u in opens:
        for v in opens:
            yield "lca", (u, v)
            yield "isancestor", (u, v)


def sample_cases(N: NaiveTree, rnd, per_op: int):
    """``per_op`` random valid argument tuples for every operation."""
    opens = N.preorder
    closes = list(N.open_of)
    n, size = len(N.bits), N.size
    node = lambda: rnd.choice(opens)
    for op in NODE_OPS:
        for _ in range(per_op):
            yield op, (node(),)
    maxd = max(N.depth.values())
    for _ in range(per_op):
        yield "inspect", (rnd.randrange(n),)
        yield "find_open", (rnd.choice(closes),)
        yield "pre_select", (rnd.randint(1, size),)
        yield "post_select", (rnd.randint(1, size),)
        yield "leaf_select", (rnd.randint(1, len(N.leaves)),)
        if N.inorder_owner:
            yield "in_select", (rnd.randint(1, len(N.inorder_owner)),)
        v = node()
        yield "level_ancestor", (v, rnd.randint(0, N.depth[v]))
        v = node()
        if N.children[v]:
            yield "child", (v, rnd.randint(1, len(N.children[v])))
        yield "level_lmost", (rnd.randint(1, maxd),)
        yield "level_rmost", (rnd.randint(1, maxd),)
        yield "lca", (node(), node())
        u = node()
        # half the ancestor checks use a true descendant
        sub = [x for x in (u, N.close[u] - 1) if x in N.close]
        yield "isancestor", (u, rnd.choice(sub) if rnd.random() < 0.5 else node())


def mismatches(T, N: NaiveTree, cases, limit: int = 5) -> list:
    bad = []
    for op, args in cases:
        got = outcome(getattr(T, op), *args)
        want = outcome(getattr(N, ALIASES.get(op, op)), *args)
        if got != want:
            bad.append((op, args, got, want))
            if len(bad) >= limit:
                break
    return bad
