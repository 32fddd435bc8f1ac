"""Valid serial images and switched page dictionaries.

A transport word is a fixed-length letter string with no KK run; words
anchored by K at both ends are excluded outright so that any word can
legally follow a J-ending word. The remaining three mask classes count
Fibonacci-style: F(M) words of mask J..J plus F(M-1) each of J..K and
K..J, F(1) = F(2) = 1.

Words are served from two equal-size pages switched by the boundary
letter of the previous word: page A holds the J-starting masks (legal
after anything, mandatory after K), page B holds the J-ending masks.
Both pages carry the same J..J interior, so a stream can always switch.
Bias filters narrow a page to its DC-safe subset before the stream
codec maps ordinal values onto words.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import RangeError, WorkbenchError
from .manchester import J, K, metrics

MAX_IMAGE_LENGTH = 24
MASKS = ("JJ", "JK", "KJ")
PATTERNS = ("balanced", "unit", "other")


class SizeLimit(WorkbenchError, ValueError):
    """Image length outside the supported desk-scale range."""


class EmptyPage(WorkbenchError, ValueError):
    """A filter admitted no words for one of the pages."""


class ValueOutOfRange(WorkbenchError, ValueError):
    """A data value exceeds the current page size."""


class DecodeError(WorkbenchError, ValueError):
    """A received word is not listed in the expected page."""


class Degenerate(WorkbenchError, ArithmeticError):
    """The page chain is reducible or periodic; no unique fixed point."""


def fibonacci(n: int) -> int:
    """F(1) = F(2) = 1 indexing; F(0) = 0."""
    if n < 0:
        raise RangeError("fibonacci index must be nonnegative")
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def mask_of(letters: str) -> str:
    if not letters:
        raise RangeError("empty image has no mask")
    return letters[0] + letters[-1]


def pattern_of(bias: int) -> str:
    if bias == 0:
        return "balanced"
    if abs(bias) == 1:
        return "unit"
    return "other"


@dataclass(frozen=True)
class ValidImage:
    """One transport word with its mask and bias classification."""

    letters: str
    mask: str
    bias: int  # at initial line level L
    pattern: str

    def __str__(self) -> str:
        return self.letters


def _check_length(m: int) -> None:
    if not 2 <= m <= MAX_IMAGE_LENGTH:
        raise SizeLimit(f"image length must lie in [2, {MAX_IMAGE_LENGTH}]")


def _image(letters: str) -> ValidImage:
    bias = metrics(letters).dc_bias
    return ValidImage(letters, mask_of(letters), bias, pattern_of(bias))


@lru_cache(maxsize=8)
def enumerate_valid(m: int) -> tuple[ValidImage, ...]:
    """All valid serial images of length m, lexicographic (J before K)."""
    _check_length(m)

    def grow(prefix: str):
        if len(prefix) == m:
            if not (prefix[0] == K and prefix[-1] == K):
                yield prefix
            return
        yield from grow(prefix + J)
        if not prefix.endswith(K):
            yield from grow(prefix + K)

    return tuple(_image(letters) for letters in grow(""))


def count_valid(m: int) -> int:
    _check_length(m)
    return fibonacci(m) + 2 * fibonacci(m - 1)


@dataclass(frozen=True)
class ImageFilter:
    """Word admission thresholds; every field loosens monotonically."""

    max_abs_bias: int | None = None
    balanced_only: bool = False
    min_transits: int = 0
    max_droop: int | None = None

    def admits(self, image: ValidImage) -> bool:
        if self.balanced_only and image.bias != 0:
            return False
        if self.max_abs_bias is not None and abs(image.bias) > self.max_abs_bias:
            return False
        if self.min_transits or self.max_droop is not None:
            m = metrics(image.letters)
            if m.transit_count < self.min_transits:
                return False
            if self.max_droop is not None and max(m.head_run, m.tail_run) > self.max_droop:
                return False
        return True


UNIT_BIAS = ImageFilter(max_abs_bias=1)
BALANCED = ImageFilter(balanced_only=True)


def filter_for_data_bits(m_bits: int) -> ImageFilter:
    """Applicability filter per payload width: |bias| <= 1, except
    balanced-only at the 8-bit (16-letter) point."""
    if m_bits < 1:
        raise RangeError("payload width must be positive")
    return BALANCED if m_bits == 8 else UNIT_BIAS


def census(m: int, image_filter: ImageFilter = ImageFilter()) -> dict[str, dict[str, int]]:
    """Per-mask, per-pattern counts of the admitted valid images."""
    counts = {mask: {pattern: 0 for pattern in PATTERNS} for mask in MASKS}
    for image in enumerate_valid(m):
        if image_filter.admits(image):
            counts[image.mask][image.pattern] += 1
    return counts


@dataclass(frozen=True)
class Page:
    """An ordered word list with ordinal lookup."""

    id: str
    words: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "_ordinals", {w: i for i, w in enumerate(self.words)})

    def __len__(self) -> int:
        return len(self.words)

    def __iter__(self):
        return iter(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self._ordinals

    def index_of(self, word: str) -> int:
        try:
            return self._ordinals[word]
        except KeyError:
            raise DecodeError(f"{word!r} is not in page {self.id}") from None


PAGE_A_MASKS = frozenset({"JJ", "JK"})  # J-starting: legal after any word
PAGE_B_MASKS = frozenset({"JJ", "KJ"})  # J-ending


def build_pages(m: int, image_filter: ImageFilter = UNIT_BIAS) -> tuple[Page, Page]:
    words_a = []
    words_b = []
    for image in enumerate_valid(m):
        if not image_filter.admits(image):
            continue
        if image.mask in PAGE_A_MASKS:
            words_a.append(image.letters)
        if image.mask in PAGE_B_MASKS:
            words_b.append(image.letters)
    if not words_a or not words_b:
        raise EmptyPage(f"filter admits no page words at length {m}")
    return Page("A", tuple(words_a)), Page("B", tuple(words_b))


def next_page(previous: str) -> str:
    """Page id for the word after `previous`.

    A K-ending word forces a J-starting successor, which is what page A
    serves; after a J-ending word the stream switches to page B.
    """
    if not previous:
        raise RangeError("previous word must be nonempty")
    return "A" if previous.endswith(K) else "B"


START_PAGE = "A"  # a stream opens as if its predecessor ended with K


def encode_stream(
    data: Iterable[int], m: int, image_filter: ImageFilter | None = None
) -> str:
    """Map ordinal values onto page words, switching pages per word."""
    if image_filter is None:
        image_filter = filter_for_data_bits(m // 2)
    pages = dict(zip("AB", build_pages(m, image_filter)))
    page = pages[START_PAGE]
    out: list[str] = []
    for value in data:
        if not 0 <= value < len(page):
            raise ValueOutOfRange(f"value {value} exceeds page {page.id} size {len(page)}")
        word = page.words[value]
        out.append(word)
        page = pages[next_page(word)]
    return "".join(out)


def decode_stream(
    letters: str, m: int, image_filter: ImageFilter | None = None
) -> list[int]:
    if image_filter is None:
        image_filter = filter_for_data_bits(m // 2)
    if len(letters) % m:
        raise DecodeError("stream length is not a whole number of words")
    pages = dict(zip("AB", build_pages(m, image_filter)))
    page = pages[START_PAGE]
    values: list[int] = []
    for start in range(0, len(letters), m):
        word = letters[start : start + m]
        values.append(page.index_of(word))
        page = pages[next_page(word)]
    return values


def multiplex_feasible(m_bits: int) -> bool:
    """Whether one page can carry 2^m data words plus a control word."""
    if not 1 <= m_bits <= 8:
        raise RangeError("payload width must lie in [1, 8]")
    page_a, _ = build_pages(2 * m_bits, filter_for_data_bits(m_bits))
    return len(page_a) >= (1 << m_bits) + 1


def stationary_two_page(p_j_given_a, p_j_given_b):
    """Fixed point of the two-page chain from per-page J-ending odds.

    Convention here follows the source's fixed-point equation: the next
    word is served from page A exactly when the previous word ends in J.
    (The structural `next_page` rule names pages the other way around;
    the equation is kept literal.) Exact inputs give exact outputs.
    """
    for p in (p_j_given_a, p_j_given_b):
        if not 0 <= p <= 1:
            raise RangeError("probabilities must lie in [0, 1]")
    pair = (p_j_given_a, p_j_given_b)
    if pair == (1, 0):
        raise Degenerate("both pages absorb; every split is stationary")
    if pair == (0, 1):
        raise Degenerate("period-two alternation; iteration does not settle")
    p_a = p_j_given_b / (1 - p_j_given_a + p_j_given_b)
    return p_a, 1 - p_a


def position_jump_probability(
    pages: Sequence[Page | Iterable[str]], i: int, mask: str | None = None
) -> Fraction:
    """Probability that letter i is J over the deduplicated page union."""
    union = sorted({word for page in pages for word in page})
    if mask is not None:
        union = [word for word in union if mask_of(word) == mask]
    if not union:
        raise EmptyPage("no words to sample")
    length = len(union[0])
    if not 0 <= i < length:
        raise RangeError(f"position must lie in [0, {length})")
    return Fraction(sum(word[i] == J for word in union), len(union))
