"""Echo multiplexing arithmetic for the PAM-3 transport.

Two disjoint sample pools share one code-point range: native echoes carry
an auxiliary bit plus six octal digits, forced echoes carry an event
position plus three octal digits.  Around them sit the super-group
placement rules, round-length planning, the single-word mocking round,
and an exhaustive census over the 3^12 serial-image space.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from . import scrambler
from .errors import RangeError, WorkbenchError

OCTAL = 8
NATIVE_DIGITS = 6
FORCED_DIGITS = 3
GROUP_WORDS = 12
HALF_WORDS = GROUP_WORDS // 2
NATIVE_POOL = 2 * OCTAL**NATIVE_DIGITS
FORCED_POOL = GROUP_WORDS * OCTAL**FORCED_DIGITS
POOL_TOTAL = NATIVE_POOL + FORCED_POOL
IMAGE_SYMBOLS = 12
IMAGE_SPACE = 3**IMAGE_SYMBOLS
MAX_TRANSITS = IMAGE_SYMBOLS - 1
WORD_NS = 30.0
NIBBLE_NS = 40.0
MII_POSITIONS = 9
FRAMINGS = ("preamble_sfd", "ifg", "frame")


class Infeasible(WorkbenchError, ArithmeticError):
    """The echo-capable radix cannot outrun the data radix."""


class Conflict(WorkbenchError, ValueError):
    """The odd half of the super group already carries a forced echo."""


@dataclass(frozen=True)
class NativeSample:
    """Auxiliary bit plus six octal digits, low digit first."""

    aux: int
    digits: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.aux not in (0, 1):
            raise RangeError("aux is a single bit")
        if len(self.digits) != NATIVE_DIGITS:
            raise RangeError(f"native sample carries {NATIVE_DIGITS} digits")
        if any(not 0 <= d < OCTAL for d in self.digits):
            raise RangeError("digits must be octal")


@dataclass(frozen=True)
class ForcedSample:
    """Event position within a super group plus three octal digits."""

    position: int
    digits: tuple[int, ...] = (0, 0, 0)

    def __post_init__(self) -> None:
        if not 0 <= self.position < GROUP_WORDS:
            raise RangeError(f"position must lie in [0, {GROUP_WORDS})")
        if len(self.digits) != FORCED_DIGITS:
            raise RangeError(f"forced sample carries {FORCED_DIGITS} digits")
        if any(not 0 <= d < OCTAL for d in self.digits):
            raise RangeError("digits must be octal")


def pool_arithmetic() -> dict[str, int]:
    """Report the pool sizes and their shared factorization."""
    return {
        "native": NATIVE_POOL,
        "forced": FORCED_POOL,
        "total": POOL_TOTAL,
        "n_q": scrambler.ROOT_BASE * scrambler.AFFIX_SPACE,
        "image_space": IMAGE_SPACE,
        "slack": IMAGE_SPACE - POOL_TOTAL,
    }


def pack_native(sample: NativeSample) -> scrambler.CodePoint:
    """Map a native sample into the low code-point range."""
    value = sample.aux * OCTAL**NATIVE_DIGITS
    for power, digit in enumerate(sample.digits):
        value += digit * OCTAL**power
    return scrambler.unpack_point(value)


def pack_forced(sample: ForcedSample) -> scrambler.CodePoint:
    """Map a forced sample into the high code-point range."""
    value = NATIVE_POOL + sample.position * OCTAL**FORCED_DIGITS
    for power, digit in enumerate(sample.digits):
        value += digit * OCTAL**power
    return scrambler.unpack_point(value)


def unpack_sample(point: scrambler.CodePoint | int) -> NativeSample | ForcedSample:
    """Recover the sample behind a code point, picking the pool by range."""
    value = point.value if isinstance(point, scrambler.CodePoint) else point
    if not 0 <= value < POOL_TOTAL:
        raise RangeError(f"code point must lie in [0, {POOL_TOTAL})")
    if value < NATIVE_POOL:
        aux, rest = divmod(value, OCTAL**NATIVE_DIGITS)
        return NativeSample(aux, _octal_digits(rest, NATIVE_DIGITS))
    offset = value - NATIVE_POOL
    position, rest = divmod(offset, OCTAL**FORCED_DIGITS)
    return ForcedSample(position, _octal_digits(rest, FORCED_DIGITS))


def _octal_digits(value: int, count: int) -> tuple[int, ...]:
    digits = []
    for _ in range(count):
        value, digit = divmod(value, OCTAL)
        digits.append(digit)
    return tuple(digits)


@dataclass(frozen=True)
class SuperGroup:
    """Twelve transport words: delimiters keep to the even half (slots 0-5),
    a forced echo keeps to the odd half (slots 6-11) as one round."""

    delimiters: frozenset[int] = frozenset()
    echo: ForcedSample | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "delimiters", frozenset(self.delimiters))
        if any(not 0 <= slot < HALF_WORDS for slot in self.delimiters):
            raise RangeError("delimiters may occupy only the even half")

    @property
    def words(self) -> tuple:
        even = tuple("delimiter" if s in self.delimiters else None for s in range(HALF_WORDS))
        odd = tuple(self.echo for _ in range(HALF_WORDS)) if self.echo else (None,) * HALF_WORDS
        return even + odd


def place_event(
    group: SuperGroup,
    position: int,
    digits: tuple[int, ...] = (0, 0, 0),
    mii: bool = False,
) -> SuperGroup:
    """Schedule a forced echo carrying the event position into the odd half."""
    limit = MII_POSITIONS if mii else GROUP_WORDS
    if not 0 <= position < limit:
        raise RangeError(f"position must lie in [0, {limit})")
    if group.echo is not None:
        raise Conflict("odd half already carries a forced echo")
    return replace(group, echo=ForcedSample(position, digits))


def event_resolution(mii: bool = False) -> tuple[float, float]:
    """Fixation resolution and uncertainty in nanoseconds."""
    period = NIBBLE_NS if mii else WORD_NS
    return (period, period / 2)


@dataclass(frozen=True)
class RoundPlan:
    """Multiplexing round sized so the echo factor cancels within it."""

    data_radix: int
    echo_radix: int
    echo_modulus: int
    cancellation: int
    word_count: int

    def __post_init__(self) -> None:
        if self.data_radix < 2 or self.echo_radix < 2:
            raise RangeError("radices must be at least 2")
        if not 1 < self.cancellation <= self.echo_modulus:
            raise RangeError("cancellation must lie in (1, echo_modulus]")
        if self.word_count < 1:
            raise RangeError("a round spans at least one word")
        lhs = self.cancellation * self.data_radix**self.word_count
        if lhs > self.echo_radix**self.word_count:
            raise RangeError("round too short to cancel the echo factor")


def schedule_round(data_radix: int, echo_radix: int, echo_modulus: int) -> int:
    """Smallest word count n with echo_modulus * data_radix**n <= echo_radix**n."""
    if data_radix < 2:
        raise RangeError("data radix must be at least 2")
    if echo_modulus < 2:
        raise RangeError("echo modulus must exceed 1")
    if echo_radix <= data_radix:
        raise Infeasible("echo-capable radix must exceed the data radix")
    count = 1
    while echo_modulus * data_radix**count > echo_radix**count:
        count += 1
    return count


def plan_round(data_radix: int, echo_radix: int, echo_modulus: int) -> RoundPlan:
    """Build the minimal-length plan cancelling the full echo modulus."""
    count = schedule_round(data_radix, echo_radix, echo_modulus)
    return RoundPlan(data_radix, echo_radix, echo_modulus, echo_modulus, count)


@dataclass(frozen=True)
class MockRound:
    """Round that is informationally a fixed stream delay in one word."""

    echo_modulus: int
    delay_bits: int
    word_count: int = 1


def mock_round(echo_modulus: int) -> MockRound:
    """Describe the power-of-two round equivalent to delaying the stream."""
    if echo_modulus < 1 or echo_modulus & (echo_modulus - 1):
        raise RangeError("echo modulus must be a power of two")
    return MockRound(echo_modulus, echo_modulus.bit_length() - 1)


def echo_area(framing: str) -> tuple[int, int]:
    """Gross and net bit-time budget an echo may borrow from the framing."""
    areas = {
        "preamble_sfd": (64, 48),
        "ifg": (96, 80),
    }
    areas["frame"] = tuple(a + b for a, b in zip(areas["preamble_sfd"], areas["ifg"]))
    if framing not in areas:
        raise RangeError(f"framing must be one of {FRAMINGS}")
    return areas[framing]


@dataclass(frozen=True)
class Pam3Image:
    """Twelve-symbol serial image with its filterable features."""

    symbols: tuple[int, ...]
    head_droop: int
    tail_droop: int
    dc_unbalance: int
    transits: int

    def __post_init__(self) -> None:
        if len(self.symbols) != IMAGE_SYMBOLS:
            raise RangeError(f"an image spans {IMAGE_SYMBOLS} symbols")
        if any(level not in (-1, 0, 1) for level in self.symbols):
            raise RangeError("symbols take levels -1, 0, +1")

    @property
    def index(self) -> int:
        value = 0
        for level in self.symbols:
            value = value * 3 + level + 1
        return value


def image_profile(index: int) -> Pam3Image:
    """Measure one image by its index, first symbol most significant."""
    if not 0 <= index < IMAGE_SPACE:
        raise RangeError(f"index must lie in [0, {IMAGE_SPACE})")
    levels = []
    rest = index
    for _ in range(IMAGE_SYMBOLS):
        rest, trit = divmod(rest, 3)
        levels.append(trit - 1)
    levels.reverse()
    head = 1
    while head < IMAGE_SYMBOLS and levels[head] == levels[0]:
        head += 1
    tail = 1
    while tail < IMAGE_SYMBOLS and levels[-1 - tail] == levels[-1]:
        tail += 1
    transits = sum(a != b for a, b in zip(levels, levels[1:]))
    return Pam3Image(tuple(levels), head, tail, sum(levels), transits)


@lru_cache(maxsize=1)
def image_features() -> dict[str, np.ndarray]:
    """Feature columns for every image, ordered by index."""
    rest = np.arange(IMAGE_SPACE)
    trits = np.empty((IMAGE_SPACE, IMAGE_SYMBOLS), dtype=np.int8)
    for pos in range(IMAGE_SYMBOLS - 1, -1, -1):
        trits[:, pos] = rest % 3
        rest //= 3
    jumps = trits[:, 1:] != trits[:, :-1]
    forward = np.cumsum(jumps, axis=1)
    backward = np.cumsum(jumps[:, ::-1], axis=1)
    return {
        "head": (1 + (forward == 0).sum(axis=1)).astype(np.int8),
        "tail": (1 + (backward == 0).sum(axis=1)).astype(np.int8),
        "dc": (trits.astype(np.int16) - 1).sum(axis=1, dtype=np.int16),
        "transits": jumps.sum(axis=1, dtype=np.int8),
    }


def image_filter_census(
    max_head_droop: int = IMAGE_SYMBOLS,
    max_tail_droop: int = IMAGE_SYMBOLS,
    dc_bound: int = IMAGE_SYMBOLS,
    min_transits: int = 0,
    dc_unit: int = 1,
    jobs: int = 1,
) -> int:
    """Count images passing every threshold, exhaustively over 3^12."""
    if dc_unit < 1:
        raise RangeError("dc unit scales the bound and must be positive")
    cols = image_features()
    bound = dc_bound * dc_unit

    def count(lo: int, hi: int) -> int:
        keep = cols["head"][lo:hi] <= max_head_droop
        keep &= cols["tail"][lo:hi] <= max_tail_droop
        keep &= np.abs(cols["dc"][lo:hi]) <= bound
        keep &= cols["transits"][lo:hi] >= min_transits
        return int(np.count_nonzero(keep))

    if jobs <= 1:
        return count(0, IMAGE_SPACE)
    # shard by leading word: nine contiguous blocks of equal size
    block = IMAGE_SPACE // 9
    spans = [(k * block, (k + 1) * block) for k in range(9)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return sum(pool.map(lambda span: count(*span), spans))


SELECTION_GRID = (
    {"max_head_droop": 7, "max_tail_droop": 7, "dc_bound": 7, "min_transits": 3},
    {"max_head_droop": 8, "max_tail_droop": 8, "dc_bound": 8, "min_transits": 2},
    {"max_head_droop": 12, "max_tail_droop": 12, "dc_bound": 12, "min_transits": 0},
)


def selection_sweep(dc_unit: int = 1, jobs: int = 1) -> list[dict]:
    """Census every selection-criteria row, noting pool-size matches."""
    rows = []
    for criteria in SELECTION_GRID:
        total = image_filter_census(**criteria, dc_unit=dc_unit, jobs=jobs)
        rows.append({**criteria, "count": total, "matches_pool": total == POOL_TOTAL})
    return rows
