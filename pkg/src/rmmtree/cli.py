"""Command-line front end: ``rmmtree validate|build|query|bench``.

Positions are 0-based bit positions; ranks and select arguments are 1-based.
Exit codes: 0 ok, 1 usage, 2 validation failure, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
import time
from typing import Callable, Optional, Sequence

import numpy as np

from .bits import ParenBitVector
from .dynamic import DynamicRmm
from .oracle import gen_balanced
from .static import StaticRmm, StaticRmmConfig, dump_bits, is_rmmt, load_bits
from .tree import OrdinalTree

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_IO = 0, 1, 2, 3

# script name -> (method, argument count); method names starting with "prim."
# go straight to the primitive layer
TREE_OPS = {
    "inspect": ("inspect", 1),
    "findclose": ("find_close", 1),
    "findopen": ("find_open", 1),
    "enclose": ("enclose", 1),
    "depth": ("depth", 1),
    "parent": ("parent", 1),
    "subtree_size": ("subtree_size", 1),
    "isleaf": ("isleaf", 1),
    "isancestor": ("isancestor", 2),
    "first_child": ("first_child", 1),
    "last_child": ("last_child", 1),
    "next_sibling": ("next_sibling", 1),
    "prev_sibling": ("prev_sibling", 1),
    "pre_rank": ("pre_rank", 1),
    "pre_select": ("pre_select", 1),
    "post_rank": ("post_rank", 1),
    "post_select": ("post_select", 1),
    "level_ancestor": ("level_ancestor", 2),
    "level_next": ("level_next", 1),
    "level_prev": ("level_prev", 1),
    "level_lmost": ("level_lmost", 1),
    "level_rmost": ("level_rmost", 1),
    "lca": ("lca", 2),
    "deepest_node": ("deepest_node", 1),
    "height": ("height", 1),
    "degree": ("degree", 1),
    "child": ("child", 2),
    "child_rank": ("child_rank", 1),
    "leaf_rank": ("leaf_rank", 1),
    "leaf_select": ("leaf_select", 1),
    "lmost_leaf": ("lmost_leaf", 1),
    "rmost_leaf": ("rmost_leaf", 1),
    "in_rank": ("in_rank", 1),
    "in_select": ("in_select", 1),
}
for _name in ("find_close", "find_open"):
    TREE_OPS[_name] = (_name, 1)

PRIM_OPS = {
    "excess": 1, "sum": 2, "fwd_search": 2, "bwd_search": 2, "rmqi": 2, "RMQi": 2,
    "min_count": 2, "min_select": 3, "rank1": 1, "rank0": 1, "select1": 1, "select0": 1,
    "rank_p1": 1, "select_p1": 1, "rank_p2": 1, "select_p2": 1,
}
EDIT_OPS = {"insert_pair": 2, "delete_node": 1, "detach": 1, "attach": 2}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# ---------------------------------------------------------------------------
# input
# ---------------------------------------------------------------------------
class InputError(Exception):
    """Raised for unreadable input; ``code`` is the exit status to use."""

    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def read_bits(path: str) -> tuple[ParenBitVector, Optional[StaticRmmConfig]]:
    """Load a text or RMMT file.  The config is None for text input."""
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}", EXIT_IO) from None
    if is_rmmt(data):
        try:
            return load_bits(data)
        except ValueError as exc:
            raise InputError(f"{path}: {exc}", EXIT_INVALID) from None
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError as exc:
        raise InputError(f"{path}: parse error at byte {exc.start}: not ASCII text", EXIT_INVALID) from None
    try:
        bits = ParenBitVector(text)
    except ValueError as exc:
        raise InputError(f"{path}: parse error: {exc}", EXIT_INVALID) from None
    if len(bits) == 0:
        raise InputError(f"{path}: parse error: no parentheses found", EXIT_INVALID)
    return bits, None


def balance_report(bits: ParenBitVector) -> dict:
    total, neg = bits.excess_profile()
    rep = {"length": len(bits), "balanced": total == 0 and neg < 0}
    if rep["balanced"]:
        e = np.cumsum(bits.to_numpy().astype(np.int64) * 2 - 1)
        rep["max_depth"] = int(e.max())
        rep["nodes"] = len(bits) // 2
    elif neg >= 0:
        rep["violation"] = neg
        rep["reason"] = "closing parenthesis without a match"
    else:
        rep["violation"] = len(bits)
        rep["reason"] = f"{total} parentheses left open at the end"
    return rep


# ---------------------------------------------------------------------------
# query scripts
# ---------------------------------------------------------------------------
def parse_script(text: str) -> list[tuple[int, str, list]]:
    """``(line number, op, args)`` per command; blank lines and ``#`` comments
    are skipped.  Unknown operations fail the whole script."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        op, *rest = line.split()
        if op in TREE_OPS:
            want = TREE_OPS[op][1]
        elif op in PRIM_OPS:
            want = PRIM_OPS[op]
        elif op in EDIT_OPS:
            want = EDIT_OPS[op]
        else:
            raise ValueError(f"line {lineno}: unknown operation {op!r}")
        if len(rest) != want:
            raise ValueError(f"line {lineno}: {op} takes {want} argument(s), got {len(rest)}")
        args: list = []
        for k, a in enumerate(rest):
            if op == "attach" and k == 1:
                args.append(a)
                continue
            try:
                args.append(int(a))
            except ValueError:
                raise ValueError(f"line {lineno}: argument {a!r} is not an integer") from None
        out.append((lineno, op, args))
    return out


def format_result(op: str, value) -> str:
    if value is None:
        return "ERR no " + op.replace("_", " ")
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return " ".join(str(v) for v in value)
    return str(value)


def run_query(tree: OrdinalTree, op: str, args: list) -> str:
    prim = tree.prim
    try:
        if op in TREE_OPS:
            return format_result(op, getattr(tree, TREE_OPS[op][0])(*args))
        if op in PRIM_OPS:
            return format_result(op, getattr(prim, op)(*args))
        if not isinstance(prim, DynamicRmm):
            return f"ERR {op} needs --dynamic"
        if op == "insert_pair":
            prim.insert_pair(*args)
        elif op == "delete_node":
            prim.delete_node(*args)
        elif op == "detach":
            return prim.detach(*args).to_string()
        else:
            p, text = args
            prim.attach(p, DynamicRmm(text, prim.L))
        return "ok"
    except Exception as exc:  # every failure becomes an ERR line
        msg = str(exc) or type(exc).__name__
        if "has no parent" in msg:
            msg = "no parent"
        return f"ERR {msg}"


# ---------------------------------------------------------------------------
# benchmarks
# ---------------------------------------------------------------------------
def _arg_makers(tree: OrdinalTree, rnd: random.Random) -> dict[str, Callable[[], tuple]]:
    prim = tree.prim

    def nodes():
        return len(prim) // 2

    def node():
        return (prim.select1(rnd.randint(1, nodes())),)

    def pos():
        return (rnd.randrange(len(prim)),)

    def two_nodes():
        return node() + node()

    def rng():
        i, j = sorted((rnd.randrange(len(prim)), rnd.randrange(len(prim))))
        return (i, j)

    return {
        "findclose": node, "find_close": node, "enclose": node, "parent": node,
        "depth": node, "subtree_size": node, "degree": node, "level_next": node,
        "deepest_node": node, "height": node, "pre_rank": node, "post_rank": node,
        "leaf_rank": node, "lmost_leaf": node, "rmost_leaf": node, "next_sibling": node,
        "lca": two_nodes, "isancestor": two_nodes,
        "excess": pos, "rank1": pos, "rank_p1": pos,
        "rmqi": rng, "RMQi": rng, "min_count": rng,
        "fwd_search": lambda: (node()[0], 0), "bwd_search": lambda: (pos()[0], 0),
        "pre_select": lambda: (rnd.randint(1, nodes()),),
        "select1": lambda: (rnd.randint(1, nodes()),),
    }


def bench_rows(tree: OrdinalTree, ops: Sequence[str], samples: int, seed: int = 0,
               dynamic: bool = False) -> list[dict]:
    """Time each op ``samples`` times on random valid arguments."""
    rnd = random.Random(seed)
    makers = _arg_makers(tree, rnd)
    rows = []
    for op in ops:
        if op not in makers:
            raise ValueError(f"cannot benchmark {op!r}; choose from {', '.join(sorted(makers))}")
        fn = getattr(tree, TREE_OPS[op][0]) if op in TREE_OPS else getattr(tree.prim, op)
        times = []
        clock = time.perf_counter_ns
        for _ in range(samples):
            if dynamic and rnd.random() < 0.5:
                _random_edit(tree.prim, rnd)
            args = makers[op]()
            t0 = clock()
            fn(*args)
            times.append(clock() - t0)
        arr = np.array(times, dtype=np.int64)
        rows.append({"op": op, "n": len(tree.prim) // 2, "samples": samples,
                     "p50_ns": int(np.percentile(arr, 50)), "p99_ns": int(np.percentile(arr, 99))})
    return rows


def _random_edit(prim: DynamicRmm, rnd: random.Random) -> None:
    """Insert a leaf or delete a non-root leaf, keeping the size roughly stable."""
    n = len(prim)
    if rnd.random() < 0.5 or n <= 2:
        v = prim.select1(rnd.randint(1, n // 2))
        prim.insert_pair(v + 1, v + 1)
    else:
        q = rnd.randint(1, prim.count_p1())
        leaf = prim.select_p1(q)
        if leaf != 0:
            prim.delete_node(leaf)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------
def cmd_validate(ns) -> int:
    bits, _ = read_bits(ns.file)
    rep = balance_report(bits)
    print(json.dumps(rep))
    if not rep["balanced"]:
        print(f"error: unbalanced at position {rep['violation']}: {rep['reason']}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def cmd_build(ns) -> int:
    bits, _ = read_bits(ns.input)
    rep = balance_report(bits)
    if not rep["balanced"]:
        print(f"error: unbalanced at position {rep['violation']}: {rep['reason']}", file=sys.stderr)
        return EXIT_INVALID
    try:
        cfg = StaticRmmConfig(ns.chunk_bits, ns.arity)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rmm = StaticRmm(bits, cfg)
    try:
        with open(ns.output, "wb") as fh:
            fh.write(dump_bits(bits, cfg))
    except OSError as exc:
        print(f"error: cannot write {ns.output}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    sp = rmm.space_bits()
    nodes = len(bits) // 2
    print(json.dumps({
        "length": len(bits), "nodes": nodes, "chunk_bits": cfg.chunk_bits, "arity": cfg.arity,
        "total_bits": sp["total_bits"], "bits_per_node": round(sp["total_bits"] / nodes, 4),
        "overhead_fraction": round(sp["summary_bits"] / sp["total_bits"], 4),
    }))
    return EXIT_OK


def _load_tree(path: str, dynamic: bool) -> OrdinalTree:
    bits, cfg = read_bits(path)
    rep = balance_report(bits)
    if not rep["balanced"]:
        raise InputError(f"{path}: unbalanced at position {rep['violation']}", EXIT_INVALID)
    prim = DynamicRmm(bits) if dynamic else StaticRmm(bits, cfg)
    return OrdinalTree(prim, check=False)


def cmd_query(ns) -> int:
    try:
        with open(ns.script, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read {ns.script}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    try:
        script = parse_script(text)
    except ValueError as exc:
        print(f"error: {ns.script}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    tree = _load_tree(ns.structure, ns.dynamic)
    for _, op, args in script:
        print(run_query(tree, op, args))
    return EXIT_OK


def cmd_bench(ns) -> int:
    if ns.structure is None and ns.random_nodes is None:
        raise UsageError("bench needs a structure file or --random-nodes")
    if ns.structure is not None:
        tree = _load_tree(ns.structure, ns.dynamic)
    else:
        bits = gen_balanced(ns.random_nodes, ns.seed)
        tree = OrdinalTree(DynamicRmm(bits) if ns.dynamic else StaticRmm(bits), check=False)
    ops = [o for o in ns.ops.split(",") if o]
    try:
        rows = bench_rows(tree, ops, ns.samples, ns.seed, ns.dynamic)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print("op,n,samples,p50_ns,p99_ns")
    for r in rows:
        print(f"{r['op']},{r['n']},{r['samples']},{r['p50_ns']},{r['p99_ns']}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="rmmtree",
        description="Succinct ordinal trees over balanced parentheses. Positions are 0-based "
                    "bit positions; ranks and select arguments are 1-based.",
    )
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    v = sub.add_parser("validate", help="check that a parentheses file is balanced")
    v.add_argument("file")
    v.set_defaults(func=cmd_validate)

    b = sub.add_parser("build", help="serialize a sequence to the RMMT format")
    b.add_argument("input")
    b.add_argument("-o", "--output", required=True)
    b.add_argument("--chunk-bits", type=int, default=512)
    b.add_argument("--arity", type=int, default=32)
    b.set_defaults(func=cmd_build)

    q = sub.add_parser("query", help="run a line-oriented query script")
    q.add_argument("structure")
    q.add_argument("script")
    q.add_argument("--dynamic", action="store_true",
                   help="load into the editable structure (enables insert_pair, delete_node, attach, detach)")
    q.set_defaults(func=cmd_query)

    bn = sub.add_parser("bench", help="time operations; CSV on stdout")
    bn.add_argument("structure", nargs="?")
    bn.add_argument("--ops", default="findclose,lca")
    bn.add_argument("--samples", type=int, default=1000)
    bn.add_argument("--dynamic", action="store_true", help="interleave random edits on the editable structure")
    bn.add_argument("--random-nodes", type=int, help="benchmark a random tree of this many nodes instead of a file")
    bn.add_argument("--seed", type=int, default=0)
    bn.set_defaults(func=cmd_bench)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        return ns.func(ns)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
