"""Mixed-radix queue operations and the streaming transcoder."""

import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from lamcode import reconciler
from lamcode.errors import RangeError
from lamcode.reconciler import (
    DecodeError,
    EncodedStream,
    FlushAmbiguity,
    MixedRadixQueue,
    QueueOverflow,
    RadixOracle,
    ReconcilerConfig,
    Underflow,
    constant_oracle,
    decode_stream,
    dequeue,
    encode_stream,
    enqueue,
)


def test_queue_invariant_enforced():
    MixedRadixQueue(b_q=0, n_q=1)
    with pytest.raises(RangeError):
        MixedRadixQueue(b_q=1, n_q=1)
    with pytest.raises(RangeError):
        MixedRadixQueue(b_q=-1, n_q=5)
    with pytest.raises(RangeError):
        MixedRadixQueue(b_q=0, n_q=0)


def test_enqueue_examples():
    q = enqueue(MixedRadixQueue(), 3, 10)
    assert (q.b_q, q.n_q, q.m) == (3, 10, 1)
    q = enqueue(q, 7, 10)
    assert (q.b_q, q.n_q, q.m) == (73, 100, 2)
    with pytest.raises(RangeError):
        enqueue(q, 10, 10)
    with pytest.raises(QueueOverflow):
        enqueue(q, 1, 10, queue_bound=500)


def test_dequeue_example():
    q = MixedRadixQueue(b_q=73, n_q=100)
    q, b_out = dequeue(q, 3)
    assert b_out == 1
    assert (q.b_q, q.n_q, q.n) == (24, 34, 1)


def test_dequeue_underflow():
    with pytest.raises(Underflow):
        dequeue(MixedRadixQueue(), 3)


def test_threshold_gate():
    q = MixedRadixQueue(b_q=0, n_q=3)
    assert reconciler.test(q, 3, k=1)
    assert not reconciler.test(q, 3, k=2)


def test_full_drain_renumbers():
    # pushing digits of a number and draining fully re-expresses it
    q = MixedRadixQueue()
    for digit in (3, 7, 2):
        q = enqueue(q, digit, 10)
    assert q.b_q == 3 + 7 * 10 + 2 * 100
    value = q.b_q
    digits = []
    while q.n_q > 1:
        q, b = dequeue(q, 7)
        digits.append(b)
    assert q.b_q == 0
    rebuilt = 0
    for d in reversed(digits):
        rebuilt = rebuilt * 7 + d
    assert rebuilt == value


def test_config_validation():
    with pytest.raises(RangeError):
        ReconcilerConfig(capacity_threshold=0)


def test_encode_empty():
    out = encode_stream([], constant_oracle(16, 3))
    assert out == EncodedStream(count=0, symbols=())
    assert decode_stream(out, constant_oracle(16, 3)) == []


def test_round_trip_small():
    oracle = constant_oracle(16, 3)
    config = ReconcilerConfig(capacity_threshold=4)
    data = [15, 0, 7, 7, 1, 9]
    encoded = encode_stream(data, oracle, config)
    assert encoded.count == len(data)
    assert all(0 <= s < 3 for s in encoded.symbols)
    assert decode_stream(encoded, oracle, config) == data


def test_round_trip_varying_radices():
    rng = random.Random(0xCAFE)
    in_radices = [rng.randrange(2, 33) for _ in range(4000)]
    out_radices = [rng.randrange(3, 30) for _ in range(200_000)]
    oracle = RadixOracle(
        input_radix=lambda m: in_radices[m],
        output_radix=lambda n: out_radices[n],
    )
    data = [rng.randrange(in_radices[m]) for m in range(len(in_radices))]
    for k in (1, 2, 64):
        config = ReconcilerConfig(capacity_threshold=k)
        encoded = encode_stream(data, oracle, config)
        assert decode_stream(encoded, oracle, config) == data


def test_trace_format_and_invariant():
    trace: list[str] = []
    oracle = constant_oracle(16, 3)
    encode_stream([5, 11, 2], oracle, ReconcilerConfig(capacity_threshold=2), trace)
    assert trace[0] == "init,0,1,"
    stages = {line.split(",")[0] for line in trace}
    assert stages <= {"init", "enqueue", "dequeue", "flush"}
    for line in trace:
        stage, b_q, n_q, _ = line.split(",")
        assert 0 <= int(b_q) < int(n_q)
    assert any(line.startswith("flush,") for line in trace)


def test_symbol_count_mismatch():
    oracle = constant_oracle(16, 3)
    encoded = encode_stream([5, 11, 2], oracle)
    clipped = EncodedStream(encoded.count, encoded.symbols[:-1])
    with pytest.raises(FlushAmbiguity):
        decode_stream(clipped, oracle)
    padded = EncodedStream(encoded.count, encoded.symbols + (0,))
    with pytest.raises(FlushAmbiguity):
        decode_stream(padded, oracle)


def test_corrupt_symbol_detected():
    oracle = constant_oracle(4, 3)
    data = [0, 0, 0, 0, 0, 0]
    encoded = encode_stream(data, oracle)
    symbols = list(encoded.symbols)
    symbols[0] = 2  # inflate the low digit beyond any radix-4 preimage
    corrupted = EncodedStream(encoded.count, tuple(symbols))
    try:
        recovered = decode_stream(corrupted, oracle)
        assert recovered != data
    except DecodeError:
        pass
    with pytest.raises(DecodeError):
        bad = EncodedStream(encoded.count, encoded.symbols[:-1] + (9,))
        decode_stream(bad, oracle)


def test_rate_at_small_radices():
    # steady-state rate: 16-ary in, ternary out, K=64
    rng = random.Random(1)
    data = [rng.randrange(16) for _ in range(20_000)]
    oracle = constant_oracle(16, 3)
    encoded = encode_stream(data, oracle, ReconcilerConfig(capacity_threshold=64))
    bits_per_output = len(data) * 4 / len(encoded.symbols)
    assert bits_per_output >= 0.95 * math.log2(3)
    assert decode_stream(encoded, oracle, ReconcilerConfig(capacity_threshold=64)) == data


def test_efficiency_monotone_in_k():
    rng = random.Random(2)
    data = [rng.randrange(16) for _ in range(5_000)]
    oracle = constant_oracle(16, 3)
    outputs = []
    for k in (1, 4, 16, 64, 256):
        encoded = encode_stream(data, oracle, ReconcilerConfig(capacity_threshold=k))
        outputs.append(len(encoded.symbols))
    assert outputs == sorted(outputs, reverse=True)


@settings(max_examples=200)
@given(
    st.lists(st.integers(min_value=0, max_value=15), max_size=60),
    st.integers(min_value=1, max_value=32),
    st.integers(min_value=3, max_value=9),
)
def test_round_trip_property(data, k, out_radix):
    oracle = constant_oracle(16, out_radix)
    config = ReconcilerConfig(capacity_threshold=k)
    assert decode_stream(encode_stream(data, oracle, config), oracle, config) == data


def test_queue_bound_respected_in_replay():
    oracle = constant_oracle(16, 3)
    config = ReconcilerConfig(capacity_threshold=1, queue_bound=10**6)
    data = [1] * 50
    encoded = encode_stream(data, oracle, config)
    assert decode_stream(encoded, oracle, config) == data
    tight = ReconcilerConfig(capacity_threshold=2**40, queue_bound=10**6)
    with pytest.raises(QueueOverflow):
        encode_stream(data, oracle, tight)
