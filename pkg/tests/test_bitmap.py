import itertools
import random

import numpy as np
import pytest

from rmmtree.bitmap import CompressedDynBitmap, decode_offset, encode_offset, entropy_bits, pattern_string


class TestOffsets:
    def test_examples(self):
        assert encode_offset("0101", 4, 2) == 1
        assert encode_offset("0000", 4, 0) == 0

    @pytest.mark.parametrize("b", range(1, 10))
    def test_lexicographic_order(self, b):
        for c in range(b + 1):
            pats = sorted({"".join(p) for p in itertools.permutations("1" * c + "0" * (b - c))})
            for k, p in enumerate(pats):
                assert encode_offset(p, b, c) == k
                assert pattern_string(decode_offset(k, b, c), b) == p

    def test_round_trip_all_bytes(self):
        for x in range(256):
            c = x.bit_count()
            assert decode_offset(encode_offset(x, 8, c), 8, c) == x

    def test_wide(self):
        rnd = random.Random(1)
        for _ in range(500):
            x = rnd.getrandbits(64)
            c = x.bit_count()
            assert decode_offset(encode_offset(x, 64, c), 64, c) == x

    def test_popcount_mismatch(self):
        with pytest.raises(ValueError):
            encode_offset("0111", 4, 2)


class TestBitmap:
    def test_examples(self):
        B = CompressedDynBitmap([0] * 10 + [1] + [0] * 5)
        assert B.rank1(10) == 1 and B.select1(1) == 10
        assert B.rank1(len(B) - 1) == B.count1()
        E = CompressedDynBitmap()
        E.insert(0, 1)
        assert len(E) == 1 and E.rank1(0) == 1

    def test_random_static_queries(self):
        rnd = np.random.default_rng(7)
        bits = (rnd.random(10_000) < 0.3).astype(np.uint8).tolist()
        B = CompressedDynBitmap(bits)
        ones = [i for i, b in enumerate(bits) if b]
        zeros = [i for i, b in enumerate(bits) if not b]
        pre = np.cumsum(bits)
        r = random.Random(7)
        for _ in range(2000):
            i = r.randrange(len(bits))
            assert B.access(i) == bits[i]
            assert B.rank1(i) == pre[i] and B.rank0(i) == i + 1 - pre[i]
            assert B.select1(r.randint(1, len(ones))) in ones
        for q in range(1, len(ones) + 1, 37):
            assert B.select1(q) == ones[q - 1]
        for q in range(1, len(zeros) + 1, 53):
            assert B.select0(q) == zeros[q - 1]

    def test_split_on_overflow(self):
        B = CompressedDynBitmap([1] * 64)
        B.insert(10, 0)
        widths = [b for b, _, _ in B.chunks()]
        assert widths == [32, 33] and B.audit() is None

    def test_insert_then_delete_in_reverse(self):
        r = random.Random(5)
        B = CompressedDynBitmap(b_max=16, leaf_bits=256)
        ref, log = [], []
        for _ in range(1000):
            i = r.randint(0, len(ref))
            v = r.randint(0, 1)
            B.insert(i, v)
            ref.insert(i, v)
            log.append(i)
            assert B.audit() is None
        assert B.to_list() == ref
        for i in reversed(log):
            assert B.delete(i) == ref.pop(i)
            assert B.audit() is None
        assert len(B) == 0

    @pytest.mark.parametrize("b_max", [3, 8, 64])
    def test_churn(self, b_max):
        r = random.Random(b_max)
        B = CompressedDynBitmap(b_max=b_max, leaf_bits=512)
        ref = []
        for step in range(3000):
            n = len(ref)
            x = r.random()
            if x < 0.45 or not n:
                i, v = r.randint(0, n), r.randint(0, 1)
                B.insert(i, v)
                ref.insert(i, v)
            elif x < 0.7:
                i = r.randrange(n)
                assert B.delete(i) == ref.pop(i)
            else:
                i = r.randrange(n)
                assert B.access(i) == ref[i] and B.rank1(i) == sum(ref[:i + 1])
            if step % 50 == 0:
                assert B.audit() is None
        assert B.to_list() == ref

    def test_raw_round_trip(self, tmp_path):
        bits = [random.Random(2).randint(0, 1) for _ in range(1000)]
        B = CompressedDynBitmap(bits)
        data = B.to_bytes()
        assert len(data) == 8 + 16 * 8
        assert CompressedDynBitmap.from_bytes(data).to_list() == bits
        B.save(tmp_path / "b.bin")
        assert CompressedDynBitmap.load(tmp_path / "b.bin").to_list() == bits

    def test_space(self):
        z = CompressedDynBitmap(np.zeros(100_000, dtype=np.uint8))
        pay, _, h = z.space_report()
        assert h == 0 and pay < 100_000 // 3
        rnd = np.random.default_rng(3)
        u = CompressedDynBitmap((rnd.random(100_000) < 0.5).astype(np.uint8))
        pay, _, h = u.space_report()
        assert pay >= h

    def test_entropy_sum_bound(self):
        import math

        rnd = np.random.default_rng(4)
        bits = (rnd.random(50_000) < 0.1).astype(np.uint8)
        B = CompressedDynBitmap(bits)
        chunks = B.chunks()
        offsets = sum(max(math.comb(b, c) - 1, 0).bit_length() for b, c, _ in chunks)
        whole = (math.comb(len(bits), int(bits.sum())) - 1).bit_length()
        assert offsets <= whole + len(chunks)
        assert abs(entropy_bits(len(bits), int(bits.sum())) - whole) < 0.001 * len(bits) + 64
