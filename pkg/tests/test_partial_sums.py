import bisect
import random

import pytest
from hypothesis import given, strategies as st

from rmmtree.errors import ContractError
from rmmtree.partial_sums import CodeSequence, DeltaCodec, FixedCodec, GammaCodec, make_codec


def seq(values, **kw):
    return CodeSequence(FixedCodec(4), values=values, **kw)


class TestExamples:
    def test_access_update_insert(self):
        s = seq([3, 1, 4, 1, 5])
        assert s.access(2, 4) == [1, 4, 1]
        s.update(2, 9)
        assert s.access(2, 2) == [9]
        s = seq([3, 1, 4, 1, 5])
        s.insert(1, 7)
        assert s.to_list() == [7, 3, 1, 4, 1, 5]

    def test_sum_search(self):
        s = seq([3, 1, 4, 1, 5])
        assert s.sum(0) == 0 and s.sum(3) == 8
        assert s.search(8) == 3 and s.search(7) == 2 and s.search(0) == 0

    def test_errors(self):
        s = seq([3, 1, 4])
        with pytest.raises(IndexError):
            s.access(0)
        with pytest.raises(IndexError):
            s.insert(5, 1)
        with pytest.raises(ValueError):
            s.update(1, 16)
        with pytest.raises(ContractError):
            CodeSequence(GammaCodec(), leaf_bits=16)


@pytest.mark.parametrize("codec", [GammaCodec(), DeltaCodec(), FixedCodec(17)], ids=repr)
@given(value=st.integers(1, 2**31))
def test_codec_round_trip(codec, value):
    value %= 1 << 17 if isinstance(codec, FixedCodec) else 1 << 32
    value = max(value, 1)
    bits, ln = codec.encode(value)
    assert ln <= codec.max_code_bits
    junk = 0b1011 << ln
    pre = 5
    assert codec.decode((bits << pre | junk << pre) | 0b10101, pre) == (value, ln)


def test_gamma_layout():
    # 5 = 101b: two zeros, a one, then the low bits 01 (LSB first)
    assert GammaCodec().encode(5) == (0b01100, 5)
    assert GammaCodec().encode(1) == (1, 1)
    with pytest.raises(ValueError):
        GammaCodec().encode(0)


def test_make_codec():
    assert isinstance(make_codec("gamma"), GammaCodec)
    assert make_codec("fixed12").k == 12
    with pytest.raises(ValueError):
        make_codec("zeta")


@pytest.mark.parametrize("codec,L", [(GammaCodec(), 64), (DeltaCodec(), 96), (GammaCodec(), 2048)])
def test_random_interleaving(codec, L):
    rnd = random.Random(L)
    ref = [rnd.randint(1, 2**16) for _ in range(rnd.randint(0, 200))]
    cs = CodeSequence(codec, leaf_bits=L, values=ref)
    for step in range(3000):
        n, r = len(ref), rnd.random()
        if r < 0.3 or not n:
            i, v = rnd.randint(1, n + 1), rnd.randint(1, 2**16)
            cs.insert(i, v)
            ref.insert(i - 1, v)
        elif r < 0.5:
            i = rnd.randint(1, n)
            assert cs.delete(i) == ref.pop(i - 1)
        elif r < 0.6:
            i, v = rnd.randint(1, n), rnd.randint(1, 2**16)
            cs.update(i, v)
            ref[i - 1] = v
        elif r < 0.7:
            i = rnd.randint(1, n)
            j = rnd.randint(i, n)
            assert cs.access(i, j) == ref[i - 1:j]
        elif r < 0.85:
            i = rnd.randint(0, n)
            assert cs.sum(i) == sum(ref[:i])
        else:
            pre = [0]
            for v in ref:
                pre.append(pre[-1] + v)
            s = rnd.randint(0, pre[-1] + 3)
            k = cs.search(s)
            assert k == bisect.bisect_right(pre, s) - 1
        if step % 100 == 0:
            assert cs.audit() is None
    assert cs.to_list() == ref


def test_multiple_weights_and_locate():
    vals = [(3, 1), (5, 2), (2, 0), (4, 4)]

    class PairCodec(FixedCodec):
        def encode(self, v):
            return v[0] | v[1] << 8, 16

        def decode(self, x, off=0):
            y = x >> off
            return (y & 255, (y >> 8) & 255), 16

    cs = CodeSequence(PairCodec(16), weights=(lambda v: v[0], lambda v: v[1]), values=vals)
    assert cs.total(0) == 14 and cs.total(1) == 7
    assert cs.sum(2, w=1) == 3
    assert cs.search(3, w=1) == 3
    idx, v, before = cs.locate(8, lambda s: s[0])
    assert (idx, v, before) == (2, (2, 0), (8, 3))


def test_space_report():
    cs = CodeSequence(GammaCodec(), values=range(1, 5000))
    sp = cs.space_bits()
    assert sp["payload_bits"] == sum(GammaCodec().encode(v)[1] for v in range(1, 5000))
    assert sp["overhead_bits"] > 0
