"""Jump-and-keep letter model of Manchester line signaling.

The line is observed in half-bit periods, one letter per period. A J
("jump") toggles the line level at its leading edge and a K ("keep")
holds the level. Every waveform a Manchester transmitter can emit maps
onto a letter stream with no two consecutive K letters, and the no-KK
rule is the only constraint a transport-legal stream must obey, which is
what makes the alphabet usable for block coding on top of the original
signaling.

Letter phase is shifted a quarter bit against the pulse train, so a J
period straddles its transition and contributes nothing to the DC
balance, while a K period sits at a constant level and contributes one
half-bit unit at the sign of that level. A narrow pulse corresponds to
the glued pair JJ and a wide pulse to JKJ, adjacent pulses sharing one J.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import WorkbenchError

J = "J"
K = "K"
LOW = "L"
HIGH = "H"

BIT_TIME_NS = 100
NARROW_PULSE_NS = BIT_TIME_NS // 2
WIDE_PULSE_NS = BIT_TIME_NS


class InvalidRun(WorkbenchError, ValueError):
    """A letter stream contains the forbidden KK run."""


class FramingError(WorkbenchError, ValueError):
    """A letter stream does not decompose into whole Manchester bit cells."""


def _check_level(level: str) -> None:
    if level not in (LOW, HIGH):
        raise ValueError(f"level must be {LOW!r} or {HIGH!r}, got {level!r}")


def other_level(level: str) -> str:
    _check_level(level)
    return HIGH if level == LOW else LOW


def check_letters(letters: str) -> None:
    """Validate a JK string; KK adjacency raises InvalidRun."""
    for ch in letters:
        if ch not in (J, K):
            raise ValueError(f"letter must be {J!r} or {K!r}, got {ch!r}")
    if K + K in letters:
        raise InvalidRun(f"KK run in {letters!r}")


def bits_to_letters(bits: Iterable[int], initial_level: str = LOW) -> str:
    """Encode data bits (0 or 1) as a JK letter stream, two letters per bit.

    A 0 cell drives the line high then low, a 1 cell low then high, so
    every cell carries a mid-cell transition and the encoding is total.
    The result never contains a KK run: K can only appear at a bit
    boundary, and the following mid-cell slot is always a J.
    """
    _check_level(initial_level)
    level = initial_level
    out: list[str] = []
    for bit in bits:
        if bit not in (0, 1):
            raise ValueError(f"bit must be 0 or 1, got {bit!r}")
        first = HIGH if bit == 0 else LOW
        for target in (first, other_level(first)):
            out.append(K if target == level else J)
            level = target
    return "".join(out)


def level_trace(letters: str, initial_level: str = LOW) -> str:
    """Per-letter line levels, each letter reported at its settled level."""
    _check_level(initial_level)
    level = initial_level
    out: list[str] = []
    for ch in letters:
        if ch == J:
            level = HIGH if level == LOW else LOW
        elif ch != K:
            raise ValueError(f"letter must be {J!r} or {K!r}, got {ch!r}")
        out.append(level)
    return "".join(out)


def letters_to_bits(letters: str, initial_level: str = LOW) -> list[int]:
    """Decode a letter stream back to data bits.

    Raises InvalidRun on a KK run and FramingError when the stream is
    not a whole number of bit cells or a cell lacks its mid transition
    (any K in an odd, mid-cell slot).
    """
    check_letters(letters)
    if len(letters) % 2:
        raise FramingError("odd letter count, stream truncated mid cell")
    trace = level_trace(letters, initial_level)
    bits: list[int] = []
    for i in range(0, len(trace), 2):
        if trace[i] == trace[i + 1]:
            raise FramingError(f"no mid-cell transition in bit cell {i // 2}")
        bits.append(0 if trace[i] == HIGH else 1)
    return bits


@dataclass(frozen=True)
class ImageMetrics:
    """Per-stream accounting in half-bit level units."""

    j_count: int
    k_count: int
    dc_bias: int
    peak_pos: int  # most positive running bias, 0 when never positive
    peak_neg: int  # most negative running bias, 0 when never negative
    final_level: str
    inverting: bool  # odd J count flips the line state for the successor
    transit_count: int
    head_run: int  # constant-level letters at the head of the trace
    tail_run: int

    @property
    def length(self) -> int:
        return self.j_count + self.k_count


def metrics(letters: str, initial_level: str = LOW) -> ImageMetrics:
    """Accumulate DC bias, peaks, and droop runs of a letter stream.

    The running bias changes only at K letters: +1 when the held level
    is H, -1 when it is L. J letters toggle the level and contribute 0.
    """
    check_letters(letters)
    _check_level(initial_level)
    level = initial_level
    bias = peak_pos = peak_neg = j_count = k_count = 0
    for ch in letters:
        if ch == J:
            level = HIGH if level == LOW else LOW
            j_count += 1
        else:
            k_count += 1
            bias += 1 if level == HIGH else -1
            if bias > peak_pos:
                peak_pos = bias
            elif bias < peak_neg:
                peak_neg = bias
    trace = level_trace(letters, initial_level)
    head = tail = 0
    if trace:
        while head < len(trace) and trace[head] == trace[0]:
            head += 1
        while tail < len(trace) and trace[-1 - tail] == trace[-1]:
            tail += 1
    return ImageMetrics(
        j_count=j_count,
        k_count=k_count,
        dc_bias=bias,
        peak_pos=peak_pos,
        peak_neg=peak_neg,
        final_level=level,
        inverting=bool(j_count % 2),
        transit_count=j_count,
        head_run=head,
        tail_run=tail,
    )


def letter_contributions(letters: str, initial_level: str = LOW) -> list[int]:
    """Per-letter DC contributions: 0 for J, +1/-1 for K at H/L."""
    check_letters(letters)
    _check_level(initial_level)
    level = initial_level
    out: list[int] = []
    for ch in letters:
        if ch == J:
            level = HIGH if level == LOW else LOW
            out.append(0)
        else:
            out.append(1 if level == HIGH else -1)
    return out


@dataclass(frozen=True)
class Pulse:
    """One MDI pulse: polarity '+' or '-', narrow (half bit) or wide (full bit)."""

    polarity: str
    wide: bool

    @property
    def duration_ns(self) -> int:
        return WIDE_PULSE_NS if self.wide else NARROW_PULSE_NS

    def __str__(self) -> str:
        return ("W" if self.wide else "N") + self.polarity


def pulse_train(bits: Sequence[int], initial_level: str = LOW) -> list[Pulse]:
    """Interior pulse run of a bit sequence.

    The train spans the window between the first and the last mid-cell
    transition, which every Manchester stream possesses, so the leading
    and trailing half cells fall outside it. Runs never exceed a full
    bit time: each pulse is narrow or wide.
    """
    _check_level(initial_level)
    levels: list[str] = []
    for bit in bits:
        if bit not in (0, 1):
            raise ValueError(f"bit must be 0 or 1, got {bit!r}")
        first = HIGH if bit == 0 else LOW
        levels.append(first)
        levels.append(other_level(first))
    window = levels[1:-1]
    train: list[Pulse] = []
    i = 0
    while i < len(window):
        run = 1
        while i + run < len(window) and window[i + run] == window[i]:
            run += 1
        if run > 2:
            raise FramingError("level run beyond one bit time")
        train.append(Pulse("+" if window[i] == HIGH else "-", wide=run == 2))
        i += run
    return train


def glue_pulses(train: Sequence[Pulse]) -> str:
    """Letters of a pulse train, narrow = JJ and wide = JKJ, glued on shared Js."""
    if not train:
        return ""
    parts = [J]
    for pulse in train:
        parts.append(K + J if pulse.wide else J)
    return "".join(parts)
