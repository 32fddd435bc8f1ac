"""Streaming mixed-radix capacity reconciliation.

A FIFO of fractional capacity: input symbols of arbitrary radix are
positionally accumulated into an unbounded integer pair (B_q, N_q), and
output symbols of page-dependent radix are peeled off the bottom. The
capacity update after a dequeue rounds up, N_q <- ceil(N_q / $N), which
costs a sliver of capacity but keeps the state integral and the whole
schedule value-independent: both ends can replay when each queue
operation happened from the radix sequences alone.

Dequeues are gated by a threshold test N_q >= K * $N. Larger K wastes
less (the rounding loss per output symbol is at most log2(1 + 1/K)
bits) at the price of a larger resident value. When the encoder and
decoder both run the same gate, the emitted stream plus the input
symbol count is exactly decodable; the count rides in a fixed header.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Iterable, Sequence

from .errors import RangeError, WorkbenchError


class Underflow(WorkbenchError, ValueError):
    """Dequeue from a queue holding no information (N_q <= 1)."""


class QueueOverflow(WorkbenchError, ValueError):
    """Enqueue would push N_q beyond the configured bound."""


class FlushAmbiguity(WorkbenchError, ValueError):
    """Symbol count does not match the replayed schedule."""


class DecodeError(WorkbenchError, ValueError):
    """Symbol values are inconsistent with any input stream."""


@dataclass(frozen=True)
class MixedRadixQueue:
    """Queued value and capacity plus input/output step counters."""

    b_q: int = 0
    n_q: int = 1
    m: int = 0  # inputs consumed
    n: int = 0  # outputs produced

    def __post_init__(self) -> None:
        if self.n_q < 1 or not 0 <= self.b_q < self.n_q:
            raise RangeError(f"queue invariant violated: B_q={self.b_q}, N_q={self.n_q}")


@dataclass(frozen=True)
class RadixOracle:
    """Per-step radices, known to both ends of the link."""

    input_radix: Callable[[int], int]
    output_radix: Callable[[int], int]


def constant_oracle(n_in: int, n_out: int) -> RadixOracle:
    return RadixOracle(lambda m: n_in, lambda n: n_out)


@dataclass(frozen=True)
class ReconcilerConfig:
    capacity_threshold: int = 1  # K: dequeue only while N_q >= K * $N
    queue_bound: int | None = None
    efficiency_target: float | None = None

    def __post_init__(self) -> None:
        if self.capacity_threshold < 1:
            raise RangeError("capacity threshold K must be at least 1")


def enqueue(
    q: MixedRadixQueue, b_in: int, n_in: int, queue_bound: int | None = None
) -> MixedRadixQueue:
    """Push one radix-N_in symbol on top of the queued value."""
    if n_in < 2:
        raise RangeError("input radix must be at least 2")
    if not 0 <= b_in < n_in:
        raise RangeError(f"symbol {b_in} outside radix {n_in}")
    n_q = n_in * q.n_q
    if queue_bound is not None and n_q > queue_bound:
        raise QueueOverflow(f"queue capacity {n_q} exceeds bound {queue_bound}")
    return replace(q, b_q=b_in * q.n_q + q.b_q, n_q=n_q, m=q.m + 1)


def test(q: MixedRadixQueue, out_radix: int, k: int = 1) -> bool:
    """Gate for a mid-stream dequeue."""
    return q.n_q >= k * out_radix


def dequeue(q: MixedRadixQueue, out_radix: int) -> tuple[MixedRadixQueue, int]:
    """Peel the bottom radix-$N digit off the queued value.

    Valid whenever the queue holds anything at all; mid-stream the
    machine additionally gates on `test`, while the final flush drains
    without it. The capacity rounds up so the invariant B_q < N_q can
    never break on the way down.
    """
    if out_radix < 3:
        raise RangeError("output radix must be at least 3")
    if q.n_q <= 1:
        raise Underflow("queue holds no information")
    b_out = q.b_q % out_radix
    n_q = -(-q.n_q // out_radix)
    return replace(q, b_q=q.b_q // out_radix, n_q=n_q, n=q.n + 1), b_out


@dataclass(frozen=True)
class EncodedStream:
    """Wire container: consumed-input count header plus output symbols."""

    count: int
    symbols: tuple[int, ...]


def _trace(lines: list[str] | None, stage: str, q: MixedRadixQueue, symbol: int | None) -> None:
    if lines is not None:
        lines.append(f"{stage},{q.b_q},{q.n_q},{'' if symbol is None else symbol}")


def encode_stream(
    inputs: Iterable[int],
    oracle: RadixOracle,
    config: ReconcilerConfig = ReconcilerConfig(),
    trace: list[str] | None = None,
) -> EncodedStream:
    """Run the stage machine over a whole input stream, then flush.

    After each enqueue, dequeues take priority and repeat while the
    threshold test holds; termination drains every remaining digit.
    """
    k = config.capacity_threshold
    q = MixedRadixQueue()
    _trace(trace, "init", q, None)
    out: list[int] = []
    for b_in in inputs:
        q = enqueue(q, b_in, oracle.input_radix(q.m), config.queue_bound)
        _trace(trace, "enqueue", q, b_in)
        while test(q, oracle.output_radix(q.n), k):
            q, b_out = dequeue(q, oracle.output_radix(q.n))
            out.append(b_out)
            _trace(trace, "dequeue", q, b_out)
    while q.n_q > 1:
        q, b_out = dequeue(q, oracle.output_radix(q.n))
        out.append(b_out)
        _trace(trace, "flush", q, b_out)
    return EncodedStream(count=q.m, symbols=tuple(out))


def _replay_schedule(
    count: int, symbol_count: int, oracle: RadixOracle, config: ReconcilerConfig
) -> list[tuple[str, int, int]]:
    """Re-derive the op sequence from radices alone.

    Returns (op, radix, capacity-before) triples in forward order; the
    value-independence of the gate makes this exact.
    """
    k = config.capacity_threshold
    ops: list[tuple[str, int, int]] = []
    n_q = 1
    m = n = 0
    for _ in range(count):
        n_in = oracle.input_radix(m)
        if n_in < 2:
            raise RangeError("input radix must be at least 2")
        ops.append(("enqueue", n_in, n_q))
        n_q *= n_in
        if config.queue_bound is not None and n_q > config.queue_bound:
            raise QueueOverflow(f"queue capacity {n_q} exceeds bound {config.queue_bound}")
        m += 1
        while n_q >= k * oracle.output_radix(n):
            out_radix = oracle.output_radix(n)
            ops.append(("dequeue", out_radix, n_q))
            n_q = -(-n_q // out_radix)
            n += 1
    while n_q > 1:
        out_radix = oracle.output_radix(n)
        ops.append(("dequeue", out_radix, n_q))
        n_q = -(-n_q // out_radix)
        n += 1
    if n != symbol_count:
        raise FlushAmbiguity(f"schedule yields {n} symbols, stream carries {symbol_count}")
    return ops


def decode_stream(
    encoded: EncodedStream,
    oracle: RadixOracle,
    config: ReconcilerConfig = ReconcilerConfig(),
) -> list[int]:
    """Invert encode_stream: schedule replay forward, value replay backward.

    Walking the op list in reverse turns every dequeue into a positional
    push and every enqueue into a division by the capacity the queue had
    at that moment, recovering inputs last-to-first.
    """
    if encoded.count < 0:
        raise RangeError("negative input count")
    ops = _replay_schedule(encoded.count, len(encoded.symbols), oracle, config)
    value = 0
    inputs: list[int] = []
    symbols = list(encoded.symbols)
    for op, radix, n_q_before in reversed(ops):
        if op == "dequeue":
            symbol = symbols.pop()
            if not 0 <= symbol < radix:
                raise DecodeError(f"symbol {symbol} outside radix {radix}")
            value = value * radix + symbol
        else:
            b_in, value = divmod(value, n_q_before)
            if b_in >= radix:
                raise DecodeError("recovered symbol exceeds its radix")
            inputs.append(b_in)
    inputs.reverse()
    return inputs
