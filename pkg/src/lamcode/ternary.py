"""Paged PAM-3 transport dictionaries with delimiters and occupancy statistics.

Three-symbol words over the ternary line alphabet are grouped into pages
indexed by the running disparity.  Encoding a value at disparity S picks a
word from page S and moves the line to S plus the word sum, so the running
sum never leaves the defined band.  Two dictionary variants ship as data
files: a 16-word-per-page reference set keyed by nibbles and a broadened
16/18/18/16 set keyed by word indices with per-word representation counts.
Exact rational occupancy statistics (disparity, letter, and transition
profiles per letter phase) come from the induced Markov chain.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from .errors import RangeError, WorkbenchError
from .scrambler import bubble_map

SYMBOLS = "LzH"
SYMBOL_VALUES = {"L": -1, "z": 0, "H": 1}
WORD_LENGTH = 3
SIGMA_LEVELS = (1, 2, 3, 4)
START_SIGMA = 1
REFERENCE = "reference"
BROADENED = "broadened"
VARIANTS = (REFERENCE, BROADENED)
NIBBLE_SPACE = 16
KEY_SPACE = 32
IDLE_WORD = "zzz"
DELIMITER_KINDS = ("SSD", "ESD", "ESD_ERR")
DELIMITER_PERIODS = (1, 2, 3, 4)
EVENT_SLOTS = ("fade_in", "flag", "meta")

# Reserved broadened-page codes per event slot, keyed by disparity.
FADE_IN_PAIRS = {1: (1, 9), 2: (0, 11), 3: (0, 11), 4: (1, 9)}
FLAG_PAIRS = {2: (0, 17), 3: (0, 17)}

# Longest same-symbol run the bound search will tolerate before giving up.
RUN_CAP = 16


class PageMiss(WorkbenchError, ValueError):
    """Word absent from the page selected by the running disparity."""


class UndefinedCell(WorkbenchError, ValueError):
    """Delimiter slot with no word assigned."""


class Reducible(WorkbenchError, ArithmeticError):
    """Disparity chain splits into closed components."""


class SlotUnavailable(WorkbenchError, ValueError):
    """Event slot with no reserved words at the current disparity."""


def check_word(symbols: str) -> None:
    if len(symbols) != WORD_LENGTH:
        raise RangeError(f"word needs {WORD_LENGTH} symbols, got {symbols!r}")
    for ch in symbols:
        if ch not in SYMBOL_VALUES:
            raise ValueError(f"unknown symbol {ch!r}")


_FLIP = {"L": "H", "z": "z", "H": "L"}


def invert_word(symbols: str) -> str:
    check_word(symbols)
    return "".join(_FLIP[ch] for ch in symbols)


@dataclass(frozen=True)
class WordMetrics:
    """Disparity footprint of one word.

    Peaks are the extrema of the running sum against zero; a peak of 0
    means the sum never crossed to that side.
    """

    delta_dc: int
    peak_pos: int
    peak_neg: int
    transits: int

    @property
    def peaks(self) -> tuple[int, int]:
        return (self.peak_pos, self.peak_neg)


def word_metrics(symbols: str) -> WordMetrics:
    check_word(symbols)
    total = 0
    peak_pos = 0
    peak_neg = 0
    for ch in symbols:
        total += SYMBOL_VALUES[ch]
        peak_pos = max(peak_pos, total)
        peak_neg = min(peak_neg, total)
    transits = sum(1 for a, b in zip(symbols, symbols[1:]) if a != b)
    return WordMetrics(total, peak_pos, peak_neg, transits)


def partial_sum(symbols: str, count: int) -> int:
    """Running sum after the first `count` symbols of a word."""
    return sum(SYMBOL_VALUES[ch] for ch in symbols[:count])


@dataclass(frozen=True)
class TernaryWord:
    """A dictionary word and its stored footprint cells."""

    symbols: str
    delta_dc: int
    peak_pos: int
    peak_neg: int
    transits: int

    @classmethod
    def from_symbols(cls, symbols: str) -> "TernaryWord":
        m = word_metrics(symbols)
        return cls(symbols, m.delta_dc, m.peak_pos, m.peak_neg, m.transits)

    @property
    def peaks(self) -> tuple[int, int]:
        return (self.peak_pos, self.peak_neg)

    def __str__(self) -> str:
        return self.symbols


@dataclass(frozen=True)
class PageEntry:
    """One page slot: a word, its code, and its representation count."""

    word: TernaryWord
    code: int
    rep_count: int


@dataclass(frozen=True)
class TernaryPage:
    """Words legal at one disparity level, ordered by code."""

    sigma: int
    entries: tuple[PageEntry, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        codes = [entry.code for entry in self.entries]
        if codes != list(range(len(codes))):
            raise ValueError(f"page {self.sigma} codes must run 0..{len(codes) - 1}")
        object.__setattr__(self, "_index", {e.word.symbols: e for e in self.entries})

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __contains__(self, symbols: str) -> bool:
        return symbols in self._index

    def entry_of(self, symbols: str) -> PageEntry:
        entry = self._index.get(symbols)
        if entry is None:
            raise PageMiss(f"word {symbols!r} not in page {self.sigma}")
        return entry

    def entry_for(self, code: int) -> PageEntry:
        if not 0 <= code < len(self.entries):
            raise RangeError(f"code {code} outside page {self.sigma} of {len(self.entries)} words")
        return self.entries[code]


@dataclass(frozen=True)
class PagedTernaryDictionary:
    """Four disparity pages closed under their own encode moves."""

    variant: str
    pages: tuple[TernaryPage, ...]

    def page(self, sigma: int) -> TernaryPage:
        if sigma not in SIGMA_LEVELS:
            raise RangeError(f"disparity {sigma} outside {SIGMA_LEVELS}")
        return self.pages[sigma - 1]


def _data_rows(name: str) -> tuple[dict[str, str], ...]:
    text = (resources.files(__package__) / "data" / name).read_text(encoding="utf-8")
    return tuple(csv.DictReader(text.splitlines()))


@lru_cache(maxsize=None)
def reference_rows() -> tuple[dict[str, str], ...]:
    """Raw reference-table rows, one per word, metric cells included."""
    return _data_rows("t1l_reference_dictionary.csv")


@lru_cache(maxsize=None)
def broadened_rows() -> tuple[dict[str, str], ...]:
    """Raw broadened-table rows with per-page ids and representation counts."""
    return _data_rows("t1l_broadened_dictionary.csv")


def _stored_word(row: dict[str, str]) -> TernaryWord:
    return TernaryWord(
        symbols=row["image"],
        delta_dc=int(row["delta_dc"]),
        peak_pos=int(row["peak_pos"] or 0),
        peak_neg=int(row["peak_neg"] or 0),
        transits=int(row["transits"]),
    )


@lru_cache(maxsize=None)
def reference_dictionary() -> PagedTernaryDictionary:
    pages = []
    for sigma in SIGMA_LEVELS:
        entries = []
        for row in reference_rows():
            cell = row[f"nibble_s{sigma}"]
            if cell:
                entries.append(PageEntry(_stored_word(row), int(cell, 2), 2))
        entries.sort(key=lambda e: e.code)
        pages.append(TernaryPage(sigma, tuple(entries)))
    return PagedTernaryDictionary(REFERENCE, tuple(pages))


@lru_cache(maxsize=None)
def broadened_dictionary() -> PagedTernaryDictionary:
    pages = []
    for sigma in SIGMA_LEVELS:
        entries = []
        for row in broadened_rows():
            cell = row[f"s{sigma}_id"]
            if cell:
                word = TernaryWord.from_symbols(row["image"])
                entries.append(PageEntry(word, int(cell), int(row[f"s{sigma}_rn"])))
        entries.sort(key=lambda e: e.code)
        pages.append(TernaryPage(sigma, tuple(entries)))
    return PagedTernaryDictionary(BROADENED, tuple(pages))


def dictionary_for(variant: str) -> PagedTernaryDictionary:
    if variant == REFERENCE:
        return reference_dictionary()
    if variant == BROADENED:
        return broadened_dictionary()
    raise RangeError(f"variant must be one of {VARIANTS}, got {variant!r}")


def flag_rep_counts(sigma: int) -> dict[int, int]:
    """Alternate representation counts reserved for event-flag periods.

    Shipped as data only; the regular codec never consumes them.
    """
    if sigma not in SIGMA_LEVELS:
        raise RangeError(f"disparity {sigma} outside {SIGMA_LEVELS}")
    counts = {}
    for row in broadened_rows():
        code = row[f"s{sigma}_id"]
        rep = row[f"s{sigma}_rprev"]
        if code and rep:
            counts[int(code)] = int(rep)
    return counts


def encode_nibble(code: int, sigma: int, variant: str = REFERENCE) -> TernaryWord:
    """Word for a data value at the current disparity.

    The code is a nibble for the reference variant and a word index for the
    broadened one.  The caller advances the disparity by the returned word's
    delta_dc; page closure keeps the sum inside the band.
    """
    return dictionary_for(variant).page(sigma).entry_for(code).word


def decode_word(symbols: str, sigma: int, variant: str = REFERENCE) -> tuple[int, int]:
    """Inverse lookup: the code and the next disparity."""
    entry = dictionary_for(variant).page(sigma).entry_of(symbols)
    return entry.code, sigma + entry.word.delta_dc


def encode_stream(codes, variant: str = REFERENCE, start_sigma: int = START_SIGMA) -> str:
    sigma = start_sigma
    out = []
    for code in codes:
        word = encode_nibble(code, sigma, variant)
        out.append(word.symbols)
        sigma += word.delta_dc
    return "".join(out)


def decode_stream(symbols: str, variant: str = REFERENCE, start_sigma: int = START_SIGMA) -> list[int]:
    if len(symbols) % WORD_LENGTH:
        raise PageMiss("stream length must be a whole number of words")
    sigma = start_sigma
    codes = []
    for i in range(0, len(symbols), WORD_LENGTH):
        code, sigma = decode_word(symbols[i : i + WORD_LENGTH], sigma, variant)
        codes.append(code)
    return codes


@lru_cache(maxsize=None)
def representation_table(page: TernaryPage) -> tuple[int, ...]:
    """The 32 scrambler-key slots of a page; widths follow rep_count."""
    slots = []
    for entry in page.entries:
        slots.extend([entry.code] * entry.rep_count)
    if len(slots) != KEY_SPACE:
        raise RangeError(f"page {page.sigma} fills {len(slots)} of {KEY_SPACE} slots")
    return tuple(slots)


def scrambled_word(key: int, sigma: int, variant: str = BROADENED) -> TernaryWord:
    """Word selected by a 5-bit key; selection weight equals rep_count."""
    if not 0 <= key < KEY_SPACE:
        raise RangeError(f"key {key} outside [0, {KEY_SPACE})")
    page = dictionary_for(variant).page(sigma)
    return page.entry_for(representation_table(page)[key]).word


@lru_cache(maxsize=None)
def _delimiter_cells() -> dict[tuple[int, int, int, str], str]:
    cells = {}
    for row in _data_rows("t1l_delimiters.csv"):
        key = (int(row["s4"]), int(row["sigma"]), int(row["period"]), row["kind"])
        cells[key] = row["word"]
    return cells


def delimiter_word(s4: int, sigma: int, period: int, kind: str = "any") -> str:
    """One cell of the delimiting grid; blank cells raise UndefinedCell."""
    if s4 not in (0, 1):
        raise RangeError(f"scrambler bit must be 0 or 1, got {s4!r}")
    if sigma not in SIGMA_LEVELS:
        raise RangeError(f"disparity {sigma} outside {SIGMA_LEVELS}")
    if period not in DELIMITER_PERIODS:
        raise RangeError(f"period {period} outside {DELIMITER_PERIODS}")
    if kind != "any" and kind not in DELIMITER_KINDS:
        raise RangeError(f"kind must be 'any' or one of {DELIMITER_KINDS}, got {kind!r}")
    word = _delimiter_cells().get((s4, sigma, period, kind))
    if word is None:
        raise UndefinedCell(f"no word at s4={s4} sigma={sigma} period={period} kind={kind}")
    return word


def delimiter(kind: str, sigma: int, s4: int) -> tuple[str, str, str, str]:
    """Four-word delimiting run; only the closing word depends on the kind."""
    if kind not in DELIMITER_KINDS:
        raise RangeError(f"kind must be one of {DELIMITER_KINDS}, got {kind!r}")
    return (
        delimiter_word(s4, sigma, 1),
        delimiter_word(s4, sigma, 2),
        delimiter_word(s4, sigma, 3),
        delimiter_word(s4, sigma, 4, kind),
    )


def event_pattern(sigma: int, slot: str) -> tuple[int, ...]:
    """Reserved broadened-page codes for an event slot at this disparity."""
    if sigma not in SIGMA_LEVELS:
        raise RangeError(f"disparity {sigma} outside {SIGMA_LEVELS}")
    if slot == "fade_in":
        return FADE_IN_PAIRS[sigma]
    if slot == "flag":
        pair = FLAG_PAIRS.get(sigma)
        if pair is None:
            raise SlotUnavailable(f"no flag pair at disparity {sigma}")
        return pair
    if slot == "meta":
        return tuple(range(len(broadened_dictionary().page(sigma))))
    raise RangeError(f"slot must be one of {EVENT_SLOTS}, got {slot!r}")


def transition_matrix(dictionary: PagedTernaryDictionary) -> tuple[tuple[Fraction, ...], ...]:
    """Page-to-page chain under uniform codes weighted by rep_count."""
    rows = []
    for sigma in SIGMA_LEVELS:
        page = dictionary.page(sigma)
        total = sum(entry.rep_count for entry in page.entries)
        row = [Fraction(0)] * len(SIGMA_LEVELS)
        for entry in page.entries:
            target = sigma + entry.word.delta_dc
            if target not in SIGMA_LEVELS:
                raise PageMiss(f"word {entry.word.symbols!r} leaves the band from {sigma}")
            row[target - 1] += Fraction(entry.rep_count, total)
        rows.append(tuple(row))
    return tuple(rows)


def _components(matrix) -> list[tuple[int, ...]]:
    n = len(matrix)
    reach = []
    for i in range(n):
        seen = {i}
        frontier = [i]
        while frontier:
            at = frontier.pop()
            for j in range(n):
                if matrix[at][j] > 0 and j not in seen:
                    seen.add(j)
                    frontier.append(j)
        reach.append(seen)
    groups = []
    placed = set()
    for i in range(n):
        if i in placed:
            continue
        group = tuple(j for j in range(n) if j in reach[i] and i in reach[j])
        placed.update(group)
        groups.append(group)
    return groups


def stationary_distribution(matrix) -> tuple[Fraction, ...]:
    """Exact stationary row vector of an irreducible chain."""
    components = _components(matrix)
    if len(components) > 1:
        raise Reducible(f"chain splits into components {components}")
    n = len(matrix)
    rows = []
    for j in range(n - 1):
        row = [matrix[i][j] - (Fraction(1) if i == j else Fraction(0)) for i in range(n)]
        rows.append(row + [Fraction(0)])
    rows.append([Fraction(1)] * n + [Fraction(1)])
    for col in range(n):
        pivot = next(r for r in range(col, n) if rows[r][col] != 0)
        rows[col], rows[pivot] = rows[pivot], rows[col]
        head = rows[col][col]
        rows[col] = [v / head for v in rows[col]]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [v - factor * w for v, w in zip(rows[r], rows[col])]
    return tuple(rows[i][n] for i in range(n))


def run_bounds(dictionary: PagedTernaryDictionary) -> dict[str, int]:
    """Longest same-symbol run over every reachable word path, per symbol."""
    best = {ch: 0 for ch in SYMBOLS}
    seen = set()
    frontier = [(START_SIGMA, "", 0)]
    while frontier:
        state = frontier.pop()
        if state in seen:
            continue
        seen.add(state)
        sigma, tail, run = state
        for entry in dictionary.page(sigma).entries:
            if entry.rep_count == 0:
                continue
            current, length = tail, run
            for ch in entry.word.symbols:
                length = length + 1 if ch == current else 1
                current = ch
                if length > best[ch]:
                    if length > RUN_CAP:
                        raise RangeError(f"run of {ch!r} exceeds the cap of {RUN_CAP}")
                    best[ch] = length
            frontier.append((sigma + entry.word.delta_dc, current, length))
    return best


@dataclass(frozen=True)
class PortraitStats:
    """Exact letter-resolution statistics of the word-choice chain.

    Phase k covers the state right after the (k+1)-th symbol of a word;
    the last phase therefore coincides with the word boundary.
    """

    variant: str
    boundary: tuple[Fraction, ...]
    p_sigma_phase: tuple[dict[int, Fraction], ...]
    p_letter_phase: tuple[dict[str, Fraction], ...]
    p_transit: tuple[Fraction, ...]
    run_bounds: dict[str, int]

    @property
    def p_sigma(self) -> dict[int, Fraction]:
        levels = sorted(set().union(*self.p_sigma_phase))
        phases = len(self.p_sigma_phase)
        return {
            level: sum((ph.get(level, Fraction(0)) for ph in self.p_sigma_phase), Fraction(0)) / phases
            for level in levels
        }

    @property
    def p_letter(self) -> dict[str, Fraction]:
        phases = len(self.p_letter_phase)
        return {ch: sum((ph[ch] for ph in self.p_letter_phase), Fraction(0)) / phases for ch in SYMBOLS}


def portrait(dictionary: PagedTernaryDictionary) -> PortraitStats:
    """Exact occupancy statistics under uniform code flow."""
    matrix = transition_matrix(dictionary)
    boundary = stationary_distribution(matrix)
    totals = {}
    for sigma in SIGMA_LEVELS:
        totals[sigma] = sum(entry.rep_count for entry in dictionary.page(sigma).entries)

    def joint(sigma: int, entry: PageEntry) -> Fraction:
        return boundary[sigma - 1] * Fraction(entry.rep_count, totals[sigma])

    p_sigma_phase = []
    p_letter_phase = []
    for k in range(WORD_LENGTH):
        sigma_dist: dict[int, Fraction] = {}
        letter_dist = {ch: Fraction(0) for ch in SYMBOLS}
        for sigma in SIGMA_LEVELS:
            for entry in dictionary.page(sigma).entries:
                weight = joint(sigma, entry)
                level = sigma + partial_sum(entry.word.symbols, k + 1)
                sigma_dist[level] = sigma_dist.get(level, Fraction(0)) + weight
                letter_dist[entry.word.symbols[k]] += weight
        p_sigma_phase.append({level: sigma_dist[level] for level in sorted(sigma_dist)})
        p_letter_phase.append(letter_dist)

    first_symbol = {}
    for sigma in SIGMA_LEVELS:
        dist = {ch: Fraction(0) for ch in SYMBOLS}
        for entry in dictionary.page(sigma).entries:
            dist[entry.word.symbols[0]] += Fraction(entry.rep_count, totals[sigma])
        first_symbol[sigma] = dist

    p_transit = []
    for k in range(WORD_LENGTH):
        total = Fraction(0)
        for sigma in SIGMA_LEVELS:
            for entry in dictionary.page(sigma).entries:
                weight = joint(sigma, entry)
                word = entry.word.symbols
                if k < WORD_LENGTH - 1:
                    if word[k] != word[k + 1]:
                        total += weight
                else:
                    follow = first_symbol[sigma + entry.word.delta_dc]
                    total += weight * (1 - follow[word[-1]])
        p_transit.append(total)

    return PortraitStats(
        variant=dictionary.variant,
        boundary=tuple(boundary),
        p_sigma_phase=tuple(p_sigma_phase),
        p_letter_phase=tuple(p_letter_phase),
        p_transit=tuple(p_transit),
        run_bounds=run_bounds(dictionary),
    )
