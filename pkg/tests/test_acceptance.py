"""The eight acceptance criteria, one test each.

Each test records a PASS/FAIL line that the run prints in an "acceptance
criteria" section at the end.  ``python tests/test_acceptance.py`` runs just
this file.
"""
import bisect
import random
import sys
import time
from itertools import accumulate

import numpy as np
import pytest

from rmmtree import (
    CodeSequence, CompressedDynBitmap, DynamicRmm, GammaCodec, NaiveTree, OrdinalTree, ParenBitVector,
    Pm1Array, StaticRmm, StaticRmmConfig, gen_balanced,
)
from rmmtree.cli import bench_rows
from rmmtree.oracle import PRIMITIVES
from treecases import all_cases, mismatches, outcome, sample_cases


# ---------------------------------------------------------------------------
# 1. tree operations against the pointer-tree oracle
# ---------------------------------------------------------------------------
def test_criterion_1_static_oracle(report):
    t0 = time.perf_counter()
    bad, cases = [], 0
    for seed in range(1000):
        n = random.Random(seed).randint(1, 128)
        P = gen_balanced(n, seed)
        N = NaiveTree(P)
        todo = list(all_cases(N))
        cases += len(todo)
        bad += mismatches(OrdinalTree(StaticRmm(P, StaticRmmConfig(64, 2))), N, todo)
    t_small = time.perf_counter() - t0
    for seed in range(100):
        P = gen_balanced(10_000, 10_000 + seed)
        N = NaiveTree(P)
        todo = list(sample_cases(N, random.Random(seed), 1000))
        cases += len(todo)
        bad += mismatches(OrdinalTree(StaticRmm(P)), N, todo)
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed <= 120
    report(1, ok, f"{cases} cases, {len(bad)} mismatches, {elapsed:.0f}s "
                  f"(exhaustive part {t_small:.0f}s, budget 120s)")
    assert not bad, bad[:5]
    assert elapsed <= 120


# ---------------------------------------------------------------------------
# 2. primitives against naive scans
# ---------------------------------------------------------------------------
def balanced_words(max_len: int):
    """Every nonempty balanced 0/1 word up to ``max_len`` bits."""
    out = []

    def grow(w, depth):
        if len(w) + depth > max_len:
            return
        if depth == 0 and w:
            out.append(tuple(w))
        if len(w) + depth + 2 <= max_len:
            w.append(1)
            grow(w, depth + 1)
            w.pop()
        if depth:
            w.append(0)
            grow(w, depth - 1)
            w.pop()

    grow([], 0)
    return out


def _marks(bits):
    nxt = list(bits[1:]) + [0]
    return {
        "1": list(bits), "0": [1 - b for b in bits],
        "p1": [int(b == 1 and c == 0) for b, c in zip(bits, nxt)],
        "p2": [int(b == 0 and c == 1) for b, c in zip(bits, nxt)],
    }


_RANK = {"1": ("rank1", "select1"), "0": ("rank0", "select0"),
         "p1": ("rank_p1", "select_p1"), "p2": ("rank_p2", "select_p2")}


def expected_calls(bits):
    """``(name, args, answer)`` for every argument combination of every
    primitive, filled in a few linear passes.  Exceptions appear as their
    class.  Search targets cover every reachable value plus one on each side."""
    n = len(bits)
    ex = list(accumulate(1 if b else -1 for b in bits))
    prev = [0] + ex[:-1]
    calls = []
    for i in range(n):
        calls.append(("bit_at", (i,), bits[i]))
        calls.append(("excess", (i,), ex[i]))
        seen = {}
        for j in range(i, n):
            seen.setdefault(ex[j] - prev[i], j)
        for d in range(min(seen) - 1, max(seen) + 2):
            calls.append(("fwd_search", (i, d), seen.get(d)))
        seen = {}
        for j in range(i, -1, -1):
            seen.setdefault(ex[i] - prev[j], j)
        for d in range(min(seen) - 1, max(seen) + 2):
            calls.append(("bwd_search", (i, d), seen.get(d)))
        lo = hi = None
        for j in range(i, n):
            v = ex[j]
            if lo is None or v < lo:
                lo, lo_at = v, [j]
            elif v == lo:
                lo_at.append(j)
            if hi is None or v > hi:
                hi, hi_at = v, j
            calls.append(("sum", (i, j), ex[j] - prev[i]))
            calls.append(("rmqi", (i, j), (lo_at[0], lo)))
            calls.append(("RMQi", (i, j), (hi_at, hi)))
            calls.append(("min_count", (i, j), len(lo_at)))
            for q, p in enumerate(lo_at, 1):
                calls.append(("min_select", (i, j, q), p))
            calls.append(("min_select", (i, j, len(lo_at) + 1), ValueError))
    for kind, marks in _marks(bits).items():
        rank, select = _RANK[kind]
        acc = list(accumulate(marks))
        for i in range(n):
            calls.append((rank, (i,), acc[i]))
        hits = [k for k, m in enumerate(marks) if m]
        for q, p in enumerate(hits, 1):
            calls.append((select, (q,), p))
        calls.append((select, (0,), ValueError))
        calls.append((select, (len(hits) + 1,), ValueError))
    for name in ("excess", "fwd_search", "rank1"):
        args = (n,) if name != "fwd_search" else (n, 0)
        calls.append((name, args, IndexError))
    calls.append(("rmqi", (1, 0) if n > 1 else (0, 1), IndexError))
    return calls


def _compare(struct, calls):
    bad = []
    for name, args, want in calls:
        f = getattr(struct, name)
        if isinstance(want, type):
            got = outcome(f, *args)
        else:
            got = f(*args)
        if got != want:
            bad.append((name, args, got, want))
    return bad


class NumpyRef:
    """Naive answers over a long sequence, one vectorised scan per call."""

    def __init__(self, bits):
        self.b = np.asarray(bits, dtype=np.int64)
        self.ex = np.cumsum(2 * self.b - 1)
        self.prev = np.concatenate(([0], self.ex[:-1]))
        nxt = np.concatenate((self.b[1:], [0]))
        self.marks = {"1": self.b, "0": 1 - self.b,
                      "p1": (self.b == 1) & (nxt == 0), "p2": (self.b == 0) & (nxt == 1)}
        self.acc = {k: np.cumsum(m) for k, m in self.marks.items()}
        self.pos = {k: np.flatnonzero(m) for k, m in self.marks.items()}

    def __call__(self, name, *a):
        ex, prev = self.ex, self.prev
        if name == "excess":
            return int(ex[a[0]])
        if name == "fwd_search":
            i, d = a
            hit = np.flatnonzero(ex[i:] == prev[i] + d)
            return int(i + hit[0]) if hit.size else None
        if name == "bwd_search":
            i, d = a
            hit = np.flatnonzero(prev[:i + 1] == ex[i] - d)
            return int(hit[-1]) if hit.size else None
        i, j = a[0], a[1] if len(a) > 1 else None
        if name in ("rmqi", "RMQi", "min_count", "min_select"):
            seg = ex[i:j + 1]
            if name == "rmqi":
                k = int(seg.argmin())
                return i + k, int(seg[k])
            if name == "RMQi":
                k = int(seg.argmax())
                return i + k, int(seg[k])
            at = np.flatnonzero(seg == seg.min())
            if name == "min_count":
                return int(at.size)
            q = a[2]
            if not 1 <= q <= at.size:
                return ValueError
            return int(i + at[q - 1])
        for kind, (rank, select) in _RANK.items():
            if name == rank:
                return int(self.acc[kind][i])
            if name == select:
                hits = self.pos[kind]
                return int(hits[i - 1]) if 1 <= i <= hits.size else ValueError
        raise KeyError(name)


def sampled_calls(ref: NumpyRef, rnd: random.Random, per: int):
    n = len(ref.b)
    for _ in range(per):
        i, j = sorted((rnd.randrange(n), rnd.randrange(n)))
        # targets that exist, plus arbitrary small ones
        d = int(ref.ex[j] - ref.prev[i]) if rnd.random() < 0.7 else rnd.randint(-6, 6)
        yield "fwd_search", (i, d)
        d = int(ref.ex[j] - ref.prev[i]) if rnd.random() < 0.7 else rnd.randint(-6, 6)
        yield "bwd_search", (j, d)
        yield "excess", (i,)
        if rnd.random() < 0.5:
            j = min(n - 1, i + rnd.randint(0, 300))
        yield "rmqi", (i, j)
        yield "RMQi", (i, j)
        yield "min_count", (i, j)
        yield "min_select", (i, j, rnd.randint(1, 4))
        for kind, (rank, select) in _RANK.items():
            yield rank, (rnd.randrange(n),)
            yield select, (rnd.randint(1, ref.pos[kind].size + 1),)


def test_criterion_2_primitives(report):
    t0 = time.perf_counter()
    # the single-pass answer tables agree with the literal scans
    for w in balanced_words(12):
        for name, args, want in expected_calls(w):
            assert outcome(PRIMITIVES[name], list(w), *args) == want, (w, name, args)
    words = balanced_words(20)
    bad, checked = [], 0
    for w in words:
        calls = expected_calls(w)
        checked += len(calls)
        P = ParenBitVector(w)
        bad += _compare(StaticRmm(P), calls)
        if len(w) <= 16:
            # tiny leaves push every query through the balanced tree
            checked += len(calls)
            bad += _compare(DynamicRmm(P, leaf_bits=2), calls)
        if len(bad) > 20:
            break
    t_ex = time.perf_counter() - t0

    rnd = random.Random(2)
    configs = [StaticRmmConfig(), StaticRmmConfig(64, 2), StaticRmmConfig(128, 4)]
    sampled = 0
    for trial in range(24):
        nodes = rnd.choice([rnd.randint(1, 200), rnd.randint(200, 1 << 15), 1 << 15])
        bits = list(gen_balanced(nodes, trial))
        ref = NumpyRef(bits)
        P = ParenBitVector(bits)
        structs = [StaticRmm(P, configs[trial % 3])]
        if trial % 4 == 0:
            structs.append(DynamicRmm(P, leaf_bits=64 if trial % 8 else 1024))
        for name, args in sampled_calls(ref, rnd, 60):
            want = ref(name, *args)
            for S in structs:
                sampled += 1
                got = outcome(getattr(S, name), *args)
                if got != want:
                    bad.append((len(bits), name, args, got, want))
    ok = not bad
    report(2, ok, f"{len(words)} balanced words (len <= 20), {checked} exhaustive calls in {t_ex:.0f}s; "
                  f"{sampled} sampled calls up to len 2^16; {len(bad)} mismatches")
    assert not bad, bad[:5]


# ---------------------------------------------------------------------------
# 3. dynamic churn
# ---------------------------------------------------------------------------
QUERY_PRIMS = ["excess", "fwd_search", "bwd_search", "rmqi", "RMQi", "min_count", "min_select",
               "rank1", "rank0", "select1", "select0", "rank_p1", "select_p1", "rank_p2", "select_p2"]


def random_query(n: int, rnd: random.Random):
    name = rnd.choice(QUERY_PRIMS)
    i, j = sorted((rnd.randrange(n), rnd.randrange(n)))
    if name in ("fwd_search", "bwd_search"):
        return name, (i, rnd.randint(-4, 2))
    if name in ("rmqi", "RMQi", "min_count"):
        return name, (i, j)
    if name == "min_select":
        return name, (i, j, rnd.randint(1, 3))
    if name.startswith("select"):
        return name, (rnd.randint(1, n // 2 + 1),)
    return name, (i,)


def test_criterion_3_dynamic_churn(report):
    rnd = random.Random(3)
    # small leaves so the balanced tree above them is many levels deep
    L = 64
    T = DynamicRmm("()", leaf_bits=L)
    t0 = time.perf_counter()
    bad, audits, peak = [], 0, 0
    counts = dict.fromkeys(("insert", "delete", "query", "move"), 0)
    for step in range(1, 100_001):
        n = len(T)
        r = rnd.random()
        if r < 0.4 or n == 0:
            counts["insert"] += 1
            if n == 0 or rnd.random() < 0.5:
                p = rnd.randint(0, n)
                T.insert_pair(p, p)  # new leaf
            else:
                # wrap a run of consecutive siblings in a new parent
                v = T.select1(rnd.randint(1, n // 2))
                end = T.fwd_search(v, 0) + 1
                while end < n and T.bit_at(end) == 1 and rnd.random() < 0.5:
                    end = T.fwd_search(end, 0) + 1
                T.insert_pair(v, end)
        elif r < 0.6:
            counts["delete"] += 1
            T.delete_node(T.select1(rnd.randint(1, n // 2)))
        elif r < 0.9:
            counts["query"] += 1
            name, args = random_query(n, rnd)
            outcome(getattr(T, name), *args)
        else:
            counts["move"] += 1
            v = T.select1(rnd.randint(1, n // 2))
            sub = T.detach(v)
            m = len(T)
            k = rnd.random()
            if k < 0.6:
                T.attach(rnd.randint(0, m), sub)  # move the subtree
            elif k < 0.8:
                piece = gen_balanced(rnd.randint(1, 30), step)
                T.attach(rnd.randint(0, m), DynamicRmm(piece, leaf_bits=L))
                T.attach(rnd.randint(0, len(T)), sub)
            # otherwise the detached subtree is dropped
        peak = max(peak, len(T))
        if step % 100 == 0:
            audits += 1
            err = T.audit()
            if err is not None:
                bad.append((step, "audit", err))
                break
            if len(T) == 0:
                continue
            S = StaticRmm(T.to_bits())
            for _ in range(50):
                name, args = random_query(len(T), rnd)
                got, want = outcome(getattr(T, name), *args), outcome(getattr(S, name), *args)
                if got != want:
                    bad.append((step, name, args, got, want))
            if len(bad) > 10:
                break
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed <= 300
    report(3, ok, f"{step} ops {counts}, {audits} audits, peak {peak} bits, height {T.height()}, "
                  f"{len(bad)} mismatches, {elapsed:.0f}s (budget 300s)")
    assert not bad, bad[:5]
    assert elapsed <= 300


# ---------------------------------------------------------------------------
# 4. static space
# ---------------------------------------------------------------------------
def test_criterion_4_static_space(report):
    n = 10**6
    T = StaticRmm(gen_balanced(n, 4))
    sp = T.space_bits()
    bpn = sp["total_bits"] / n
    ok = bpn <= 3.0
    report(4, ok, f"{bpn:.3f} bits/node at n=10^6 with s=512, k=32 (gate 3.0, reference 2.37)")
    assert ok


# ---------------------------------------------------------------------------
# 5. compressed bitmap
# ---------------------------------------------------------------------------
def test_criterion_5_bitmap(report):
    n = 10**6
    rng = np.random.default_rng(5)
    rnd = random.Random(5)
    parts, bad = [], []
    for p in (0.01, 0.05, 0.5):
        bits = (rng.random(n) < p).astype(np.uint8)
        B = CompressedDynBitmap(bits)
        payload, overhead, nh0 = B.space_report()
        total = payload + overhead
        budget = nh0 + 0.30 * n
        if total > budget:
            bad.append((p, "space", total, budget))
        ones, zeros = np.flatnonzero(bits), np.flatnonzero(bits == 0)
        acc = np.cumsum(bits)
        for _ in range(10**4 // 3 + 1):
            i = rnd.randrange(n)
            kind = rnd.randrange(5)
            if kind == 0:
                got, want = B.access(i), int(bits[i])
            elif kind == 1:
                got, want = B.rank1(i), int(acc[i])
            elif kind == 2:
                got, want = B.rank0(i), i + 1 - int(acc[i])
            elif kind == 3:
                q = rnd.randint(1, ones.size)
                got, want = B.select1(q), int(ones[q - 1])
            else:
                q = rnd.randint(1, zeros.size)
                got, want = B.select0(q), int(zeros[q - 1])
            if got != want:
                bad.append((p, kind, i, got, want))
        parts.append(f"p={p}: {total / n:.3f}n vs {budget / n:.3f}n")
    ok = not bad
    report(5, ok, "; ".join(parts) + f"; {3 * (10**4 // 3 + 1)} queries, {len(bad)} failures")
    assert not bad, bad[:5]


# ---------------------------------------------------------------------------
# 6. searchable partial sums
# ---------------------------------------------------------------------------
def test_criterion_6_partial_sums(report):
    rnd = random.Random(6)
    ref = [rnd.randint(1, 1000) for _ in range(2000)]
    cs = CodeSequence(GammaCodec(), values=ref)
    bad, laws = [], 0
    big = lambda: rnd.randint(1, 2**rnd.randint(1, 31) - 1) if rnd.random() < 0.2 else rnd.randint(1, 1000)
    for step in range(10**5):
        n, r = len(ref), rnd.random()
        if r < 0.25 or n == 0:
            i, v = rnd.randint(1, n + 1), big()
            cs.insert(i, v)
            ref.insert(i - 1, v)
        elif r < 0.5:
            i = rnd.randint(1, n)
            if cs.delete(i) != ref.pop(i - 1):
                bad.append((step, "delete", i))
        elif r < 0.6:
            i, v = rnd.randint(1, n), big()
            cs.update(i, v)
            ref[i - 1] = v
        elif r < 0.7:
            i = rnd.randint(1, n)
            j = min(n, i + rnd.randint(0, 20))
            if cs.access(i, j) != ref[i - 1:j]:
                bad.append((step, "access", i, j))
        elif r < 0.85:
            i = rnd.randint(0, n)
            if cs.sum(i) != sum(ref[:i]):
                bad.append((step, "sum", i))
        else:
            pre = [0, *accumulate(ref)]
            s = rnd.randrange(pre[-1] + 5)
            k = cs.search(s)
            want = bisect.bisect_right(pre, s) - 1
            if k != want:
                bad.append((step, "search", s, k, want))
            elif s < pre[-1]:
                laws += 1
                if not cs.sum(k) <= s < cs.sum(k + 1):
                    bad.append((step, "law", s, k))
        if step % 5000 == 0:
            err = cs.audit()
            if err is not None:
                bad.append((step, "audit", err))
        if len(bad) > 10:
            break
    if cs.to_list() != ref:
        bad.append(("final", "contents"))
    ok = not bad
    report(6, ok, f"10^5 steps, final length {len(ref)}, {laws} search-law checks, {len(bad)} mismatches")
    assert not bad, bad[:5]


# ---------------------------------------------------------------------------
# 7. +-1 range minimum
# ---------------------------------------------------------------------------
def test_criterion_7_pm1_rmq(report):
    rng = np.random.default_rng(7)
    bad, queries = [], 0
    for walk in range(5):
        vals = np.cumsum(rng.choice([-1, 1], 10**5)) + int(rng.integers(-50, 50))
        A = Pm1Array.from_values(vals.tolist())
        for _ in range(2000):
            i, j = sorted(int(x) for x in rng.integers(0, 10**5, 2))
            if rng.random() < 0.3:
                j = min(10**5 - 1, i + int(rng.integers(0, 100)))
            seg = vals[i:j + 1]
            queries += 1
            lo, hi = i + int(seg.argmin()), i + int(seg.argmax())
            got = (A.rmq(i, j), A.rMq(i, j), A.min_value(i, j), A.max_value(i, j))
            if got != (lo, hi, int(seg.min()), int(seg.max())):
                bad.append((walk, i, j, got))
    ok = not bad
    report(7, ok, f"{queries} ranges over 5 walks of length 10^5, {len(bad)} mismatches")
    assert not bad, bad[:5]


# ---------------------------------------------------------------------------
# 8. logarithmic scaling
# ---------------------------------------------------------------------------
def test_criterion_8_scaling(report):
    p50 = {}
    for e in (16, 22):
        tree = OrdinalTree(StaticRmm(gen_balanced(1 << e, 8)), check=False)
        bench_rows(tree, ["findclose", "lca"], 500, seed=1)  # warm up
        runs = [bench_rows(tree, ["findclose", "lca"], 3000, seed=s) for s in (2, 3, 4)]
        for op_i, op in enumerate(("findclose", "lca")):
            p50[op, e] = min(r[op_i]["p50_ns"] for r in runs)
    ratios = {op: p50[op, 22] / p50[op, 16] for op in ("findclose", "lca")}
    ok = all(r <= 3 for r in ratios.values())
    report(8, ok, ", ".join(f"{op} p50 {p50[op, 16]}ns -> {p50[op, 22]}ns (x{r:.2f})"
                            for op, r in ratios.items()) + " (gate x3)")
    assert ok, ratios


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
