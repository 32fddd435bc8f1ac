"""Side-stream randomness and quasi-uniform base conversion.

A 33-bit maximal-length LFSR supplies equiprobable r-bit draws. A draw
is folded onto a base-N digit through a bin map built from an exact
integer partition of the 2^r outcome space: m_even bins of an even size
x_even and m_odd bins of an odd size x_odd, with m_even + m_odd = N and
(x_even + x_odd) odd. Two solution families matter in practice: sizes
differing by one (quasi-uniform, |delta x| = 1) and bin-class counts
differing by one (|delta m| = 1, size gap minimized).

The module also packs transport values into composite code points
(base-259 root, 11-bit affix, 1-bit inversion), scrambles them with a
per-morpheme key, and prices the whole scheme in time: PRNG repetition
period against the observation time a given root width implies.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate

from .errors import RangeError, WorkbenchError

LFSR_WIDTH = 33
LFSR_TAP = 13  # x^33 + x^13 + 1, the Clause 40 master generator
LFSR_PERIOD = (1 << LFSR_WIDTH) - 1
_LFSR_MASK = (1 << LFSR_WIDTH) - 1

ROOT_BASE = 259
AFFIX_BITS = 11
AFFIX_SPACE = 1 << AFFIX_BITS
POINT_SPACE = ROOT_BASE * AFFIX_SPACE  # 530,432 = 524,288 + 6,144

WORD_NS = 30.0
ROUND_NS = 180.0  # six words per echo round
ROUND_BITS = 72
ROOT_MIN_BITS = 9  # ceil(log2 259)


class ZeroState(WorkbenchError, ValueError):
    """The all-zero LFSR state, which the recurrence can never leave."""


class NoSolution(WorkbenchError, ValueError):
    """No partition satisfies the requested constraints."""


def lfsr_next(state: int) -> tuple[int, int]:
    """Advance the register one half-bit tick; returns (state, output bit)."""
    if state == 0:
        raise ZeroState("LFSR state must be nonzero")
    if state != state & _LFSR_MASK:
        raise RangeError(f"state needs at most {LFSR_WIDTH} bits")
    out = state & 1
    feedback = (state ^ (state >> LFSR_TAP)) & 1
    return (state >> 1) | (feedback << (LFSR_WIDTH - 1)), out


def lfsr_advance_word(state: int) -> int:
    """Advance 33 ticks at once.

    The next 33 output bits of a Fibonacci register are exactly the
    current state, LSB first, so whole-state draws need only this step.
    """
    if state == 0:
        raise ZeroState("LFSR state must be nonzero")
    folded = state ^ (state >> LFSR_TAP)
    return (folded & 0xFFFFF) | ((((folded >> 20) ^ folded) & 0x1FFF) << 20)


def lfsr_values(state: int, nbits: int, count: int) -> tuple[int, list[int]]:
    """Draw `count` values of `nbits` each; first output bit lands in the LSB."""
    if nbits < 1:
        raise RangeError("nbits must be positive")
    if state == 0:
        raise ZeroState("LFSR state must be nonzero")
    out: list[int] = []
    buffer = 0
    filled = 0
    mask = (1 << nbits) - 1
    for _ in range(count):
        while filled < nbits:
            buffer |= state << filled
            filled += LFSR_WIDTH
            state = lfsr_advance_word(state)
        out.append(buffer & mask)
        buffer >>= nbits
        filled -= nbits
    return state, out


@dataclass(frozen=True)
class PartitionSolution:
    """One solution of m_even*x_even + m_odd*x_odd = 2^r, m_even + m_odd = N.

    The even/odd labels follow the parity of the x values, not of the
    counts. A class may be empty (m = 0) when 2^r divides evenly.
    """

    r: int
    n: int
    m_even: int
    m_odd: int
    x_even: int
    x_odd: int

    def __post_init__(self) -> None:
        if min(self.m_even, self.m_odd, self.x_even, self.x_odd) < 0:
            raise RangeError("all partition quantities must be nonnegative")
        if self.x_even % 2 or self.x_odd % 2 == 0:
            raise RangeError("x_even must be even and x_odd odd")
        if self.m_even + self.m_odd != self.n:
            raise RangeError("bin counts must sum to the base")
        if self.m_even * self.x_even + self.m_odd * self.x_odd != 1 << self.r:
            raise RangeError("bin sizes must partition the whole outcome space")

    @property
    def delta_m(self) -> int:
        return abs(self.m_even - self.m_odd)

    @property
    def delta_x(self) -> int:
        return abs(self.x_even - self.x_odd)

    @property
    def symmetric_e(self) -> bool:
        lo = min(self.m_even - 1, self.m_odd)
        hi = max(self.m_even - 1, self.m_odd)
        return lo > 0 and hi % lo == 0

    @property
    def symmetric_o(self) -> bool:
        lo = min(self.m_even, self.m_odd - 1)
        hi = max(self.m_even, self.m_odd - 1)
        return lo > 0 and hi % lo == 0


def _check_rn(r: int, n: int) -> None:
    if r < 1:
        raise RangeError("r must be at least 1")
    if n < 1:
        raise RangeError("base must be at least 1")
    if n > 1 << r:
        raise NoSolution(f"base {n} exceeds the 2^{r} outcome space")


def solve_dx1(r: int, n: int) -> PartitionSolution:
    """The quasi-uniform solution: bin sizes differ by at most one.

    With sizes floor(2^r/N) and one more, the size-parity constraint is
    automatic; when N divides 2^r the second class is left empty.
    """
    _check_rn(r, n)
    total = 1 << r
    low = total // n
    m_high = total - n * low
    if m_high == 0:
        # single size; the empty class takes the adjacent parity
        if low % 2 == 0:
            return PartitionSolution(r, n, m_even=n, m_odd=0, x_even=low, x_odd=low + 1)
        return PartitionSolution(r, n, m_even=0, m_odd=n, x_even=low + 1, x_odd=low)
    if low % 2 == 0:
        return PartitionSolution(
            r, n, m_even=n - m_high, m_odd=m_high, x_even=low, x_odd=low + 1
        )
    return PartitionSolution(
        r, n, m_even=m_high, m_odd=n - m_high, x_even=low + 1, x_odd=low
    )


def solve_dm1(r: int, n: int) -> list[PartitionSolution]:
    """Solutions with bin-class counts differing by one and minimal size gap.

    Only defined for odd N. Since 2^r is even and x_odd is odd, the odd
    size class must have an even count, which pins the count assignment;
    candidate sizes then live on one residue class, so the minimum of
    |x_even - x_odd| is found by inspecting the neighbours of 2^r/N.
    Returns every solution attaining the minimum (usually one).
    """
    _check_rn(r, n)
    if n % 2 == 0:
        raise NoSolution("count split of an even base cannot differ by one")
    total = 1 << r
    halves = (n // 2, n // 2 + 1)
    m_odd = halves[0] if halves[0] % 2 == 0 else halves[1]
    m_even = n - m_odd
    # x_odd must satisfy m_odd * x_odd = 2^r (mod m_even), gcd = 1
    x0 = total * pow(m_odd, -1, m_even) % m_even
    if x0 % 2 == 0:
        x0 += m_even  # m_even is odd, so this flips parity
    step = 2 * m_even
    x_max = total // m_odd
    if x0 > x_max:
        return []
    # |x_even - x_odd| is |total - n*x_odd| / m_even, minimized near total/n
    candidates = set()
    for anchor in (total // n, total // n + 1):
        k = (anchor - x0) // step
        for shift in (-1, 0, 1):
            x = x0 + (k + shift) * step
            if x0 <= x <= x_max:
                candidates.add(x)
    best: list[PartitionSolution] = []
    best_gap: int | None = None
    for x_odd in sorted(candidates):
        x_even = (total - m_odd * x_odd) // m_even
        gap = abs(x_even - x_odd)
        if best_gap is None or gap < best_gap:
            best_gap = gap
            best = []
        if gap == best_gap:
            best.append(
                PartitionSolution(r, n, m_even=m_even, m_odd=m_odd, x_even=x_even, x_odd=x_odd)
            )
    return best


def solve_partitions(r: int, n: int) -> list[PartitionSolution]:
    """Both targeted families: the |dx|<=1 solution, then |dm|=1 minima."""
    solutions = [solve_dx1(r, n)]
    if n % 2:
        for sol in solve_dm1(r, n):
            if sol not in solutions:
                solutions.append(sol)
    return solutions


def symmetric_solutions(r: int, n: int) -> list[PartitionSolution]:
    """Quasi-uniform solutions passing either symmetry criterion."""
    sol = solve_dx1(r, n)
    return [sol] if sol.symmetric_e or sol.symmetric_o else []


def unbalance(sol: PartitionSolution) -> tuple[Fraction, Fraction]:
    """Signed relative deviation (largest bin, smallest bin) from uniform.

    Classes with no bins are ignored; an exact-divisor partition is
    perfectly uniform and reports (0, 0).
    """
    total = 1 << sol.r
    sizes = [x for m, x in ((sol.m_even, sol.x_even), (sol.m_odd, sol.x_odd)) if m > 0]
    hi = Fraction(sol.n * max(sizes), total) - 1
    lo = Fraction(sol.n * min(sizes), total) - 1
    return hi, lo


def format_unbalance(value: Fraction) -> str:
    """Render a deviation with the unit its magnitude calls for.

    Percent down to 0.001%, then ppm down to 0.1 ppm, then ppB; two
    decimals for magnitudes of ten and above, else three.
    """
    magnitude = abs(value)
    for unit, scale in (("%", 100), ("ppm", 10**6), ("ppB", 10**9)):
        scaled = value * scale
        if magnitude >= Fraction(1, 10**5) or unit == "ppB":
            decimals = 2 if abs(scaled) >= 10 else 3
            text = f"{float(scaled):+.{decimals}f}"
            return f"{text}{unit}" if unit == "%" else f"{text} {unit}"
        if magnitude >= Fraction(1, 10**7) and unit == "ppm":
            decimals = 2 if abs(scaled) >= 10 else 3
            return f"{float(scaled):+.{decimals}f} ppm"
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class BinMap:
    """Contiguous partition of [0, 2^r) into N digit bins."""

    r: int
    n: int
    sizes: tuple[int, ...]  # per digit, left to right
    layout: tuple[int, int, int]  # leaf, core, leaf bin counts

    def __post_init__(self) -> None:
        if sum(self.sizes) != 1 << self.r or len(self.sizes) != self.n:
            raise RangeError("bin sizes must tile the outcome space")
        object.__setattr__(self, "_starts", tuple(accumulate((0,) + self.sizes[:-1])))

    def digit_of(self, value: int) -> int:
        if not 0 <= value < 1 << self.r:
            raise RangeError(f"value must lie in [0, 2^{self.r})")
        return bisect_right(self._starts, value) - 1


def build_bin_map(sol: PartitionSolution) -> BinMap:
    """Arrange the partition: minority bins flank the majority core.

    The class with fewer bins is split into a left and a right leaf
    group (odd remainder to the left); the other class forms the core.
    """
    classes = [
        (m, x) for m, x in ((sol.m_even, sol.x_even), (sol.m_odd, sol.x_odd)) if m > 0
    ]
    if len(classes) == 1:
        (m, x), = classes
        return BinMap(sol.r, sol.n, (x,) * m, (0, m, 0))
    (m_minor, x_minor), (m_major, x_major) = sorted(classes)
    left = (m_minor + 1) // 2
    right = m_minor - left
    sizes = (x_minor,) * left + (x_major,) * m_major + (x_minor,) * right
    return BinMap(sol.r, sol.n, sizes, (left, m_major, right))


def convert(value: int, bin_map: BinMap) -> int:
    """Fold one equiprobable r-bit draw onto a base-N digit."""
    return bin_map.digit_of(value)


def bubble_map(n: int, r: int = 5) -> BinMap:
    """Per-word cipher-point map for small paged dictionaries (N <= 2^r)."""
    if n > 1 << r:
        raise NoSolution(f"{n} words cannot share {1 << r} cipher points")
    return build_bin_map(solve_dx1(r, n))


@dataclass(frozen=True)
class CodePoint:
    """Composite transport value: base-259 root, 11-bit affix, inversion flag.

    The numeric value packs root and affix only; inversion rides outside
    as a separate morpheme selecting image inversion downstream.
    """

    root: int
    affix: int
    inversion: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.root < ROOT_BASE:
            raise RangeError(f"root must lie in [0, {ROOT_BASE})")
        if not 0 <= self.affix < AFFIX_SPACE:
            raise RangeError(f"affix must lie in [0, {AFFIX_SPACE})")
        if self.inversion not in (0, 1):
            raise RangeError("inversion is a single bit")

    @property
    def value(self) -> int:
        return self.root * AFFIX_SPACE + self.affix


def pack_point(root: int, affix: int, inversion: int = 0) -> CodePoint:
    return CodePoint(root, affix, inversion)


def unpack_point(value: int) -> CodePoint:
    if not 0 <= value < POINT_SPACE:
        raise RangeError(f"value must lie in [0, {POINT_SPACE})")
    return CodePoint(value // AFFIX_SPACE, value % AFFIX_SPACE)


def scramble_point(point: CodePoint, key: tuple[int, int, int]) -> CodePoint:
    """Additive root, XOR affix, XOR inversion; one sub-scrambler each."""
    s259, s11, s1 = key
    if not 0 <= s259 < ROOT_BASE:
        raise RangeError(f"root key must lie in [0, {ROOT_BASE})")
    return CodePoint(
        (point.root + s259) % ROOT_BASE,
        point.affix ^ (s11 & (AFFIX_SPACE - 1)),
        point.inversion ^ (s1 & 1),
    )


def descramble_point(point: CodePoint, key: tuple[int, int, int]) -> CodePoint:
    s259, s11, s1 = key
    if not 0 <= s259 < ROOT_BASE:
        raise RangeError(f"root key must lie in [0, {ROOT_BASE})")
    return CodePoint(
        (point.root - s259) % ROOT_BASE,
        point.affix ^ (s11 & (AFFIX_SPACE - 1)),
        point.inversion ^ (s1 & 1),
    )


def scramble_values(values, key: tuple[int, int, int]):
    """Vectorized scramble of packed numeric values (inversion excluded)."""
    import numpy as np  # bulk audit path only

    s259, s11, _ = key
    values = np.asarray(values, dtype=np.int64)
    root = (values >> AFFIX_BITS) + s259
    root %= ROOT_BASE
    affix = (values & (AFFIX_SPACE - 1)) ^ (s11 & (AFFIX_SPACE - 1))
    return (root << AFFIX_BITS) | affix


def repetition_period(t: int) -> float:
    """Seconds before the side stream repeats when t bits feed each round."""
    if not 1 <= t <= ROUND_BITS:
        raise RangeError(f"t must lie in [1, {ROUND_BITS}]")
    return LFSR_PERIOD * WORD_NS * 1e-9 * ROUND_BITS / t


def observation_time(r: int) -> float:
    """Seconds to watch all 2^r draws once at one draw per round."""
    return (2.0**r) * ROUND_NS * 1e-9


@dataclass(frozen=True)
class BudgetReport:
    t: int
    r: int
    repetition_period: float  # seconds
    observation_time: float  # seconds
    root_feasible: bool  # r wide enough for a base-259 root


def budget(t: int, with_inversion: bool = True) -> BudgetReport:
    """Time budget when t side-stream bits are demanded per echo round."""
    r = t - 12 if with_inversion else t - 11
    return BudgetReport(
        t=t,
        r=r,
        repetition_period=repetition_period(t),
        observation_time=observation_time(r),
        root_feasible=r >= ROOT_MIN_BITS,
    )
