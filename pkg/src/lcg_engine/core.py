"""The unbounded Life universe and its update rule.

Cells live on an unbounded signed-integer grid, represented sparsely as the
set of live coordinates. Two step engines are provided with identical
observable behaviour:

* ``step``      - the reference engine: count Moore neighbors of every live
                  cell, apply birth-on-3 / survive-on-2-or-3 directly.
* ``step_fast`` - a bit-parallel engine: each row becomes one big integer and
                  the neighbor sum is computed for a whole row at once with
                  full-adder bit tricks.

Both are pure functions; universes are immutable values.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

from .errors import PopulationLimitError

Coord = tuple[int, int]

# Default ceiling on the population a single step may produce. Enumeration
# and collision sweeps run unattended; a runaway pattern should fail loudly
# instead of eating the machine.
DEFAULT_POPULATION_LIMIT = 10_000_000

NEIGHBOR_OFFSETS: tuple[Coord, ...] = (
    (-1, -1), (0, -1), (1, -1),
    (-1, 0), (1, 0),
    (-1, 1), (0, 1), (1, 1),
)

# The 8 square symmetries as (a, b, c, d) matrices: (x, y) -> (ax+by, cx+dy).
# Order: identity, three rotations, two axis flips, two diagonal flips.
D8_MATRICES: tuple[tuple[int, int, int, int], ...] = (
    (1, 0, 0, 1),
    (0, -1, 1, 0),
    (-1, 0, 0, -1),
    (0, 1, -1, 0),
    (-1, 0, 0, 1),
    (1, 0, 0, -1),
    (0, 1, 1, 0),
    (0, -1, -1, 0),
)


@dataclass(frozen=True)
class Universe:
    """A finite set of live cells plus a generation counter.

    The step functions depend only on ``live``; the counter is bookkeeping.
    """

    live: frozenset[Coord] = field(default_factory=frozenset)
    generation: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.live, frozenset):
            object.__setattr__(self, "live", frozenset(self.live))

    @property
    def population(self) -> int:
        return len(self.live)

    @property
    def bounding_box(self) -> tuple[int, int, int, int] | None:
        """(xmin, ymin, xmax, ymax) of the live cells, or None when empty."""
        return bounding_box(self.live)


def neighbors(c: Coord) -> frozenset[Coord]:
    """The 8 cells at Chebyshev distance 1 from ``c``."""
    x, y = c
    return frozenset((x + dx, y + dy) for dx, dy in NEIGHBOR_OFFSETS)


def bounding_box(cells: Iterable[Coord]) -> tuple[int, int, int, int] | None:
    xs = [x for x, _ in cells]
    if not xs:
        return None
    ys = [y for _, y in cells]
    return min(xs), min(ys), max(xs), max(ys)


def translate(cells: Iterable[Coord], dx: int, dy: int) -> frozenset[Coord]:
    return frozenset((x + dx, y + dy) for x, y in cells)


def transform(cells: Iterable[Coord], matrix: tuple[int, int, int, int]) -> frozenset[Coord]:
    """Apply one of the D8_MATRICES to a cell set."""
    a, b, c, d = matrix
    return frozenset((a * x + b * y, c * x + d * y) for x, y in cells)


def _check_limit(cells: frozenset[Coord], limit: int | None) -> frozenset[Coord]:
    cap = DEFAULT_POPULATION_LIMIT if limit is None else limit
    if len(cells) > cap:
        raise PopulationLimitError(len(cells), cap)
    return cells


def step_cells(live: frozenset[Coord]) -> frozenset[Coord]:
    """One synchronous generation of the live-cell set (reference rule).

    A cell is live next generation iff it has exactly 3 live neighbors, or it
    is live now and has exactly 2.
    """
    counts = Counter(
        (x + dx, y + dy) for x, y in live for dx, dy in NEIGHBOR_OFFSETS
    )
    return frozenset(c for c, n in counts.items() if n == 3 or (n == 2 and c in live))


def step(u: Universe, *, limit: int | None = None) -> Universe:
    """The reference engine: one synchronous generation."""
    return Universe(_check_limit(step_cells(u.live), limit), u.generation + 1)


def _add3(x: int, y: int, z: int) -> tuple[int, int]:
    # Bitwise full adder: per-position sum (low bit) and carry of three bits.
    return x ^ y ^ z, (x & y) | ((x ^ y) & z)


def _next_row_bits(above: int, here: int, below: int) -> int:
    # Per-row 3x3 population count T (including the center cell itself);
    # next state is T == 3, or center alive and T == 4.
    la, ha = _add3(above << 1, above, above >> 1)
    lc, hc = _add3(here << 1, here, here >> 1)
    lb, hb = _add3(below << 1, below, below >> 1)
    t0, c0 = _add3(la, lc, lb)
    s1, c1 = _add3(ha, hc, hb)
    t1 = c0 ^ s1
    carry2 = c0 & s1
    t2 = c1 ^ carry2
    t3 = c1 & carry2
    is3 = t0 & t1 & ~t2 & ~t3
    is4 = ~t0 & ~t1 & t2 & ~t3
    return is3 | (here & is4)


def step_fast_cells(live: frozenset[Coord]) -> frozenset[Coord]:
    """One generation via bit-parallel row arithmetic. Same contract as step_cells."""
    if not live:
        return frozenset()
    xmin = min(x for x, _ in live)
    # Bit i of rows[y] holds cell (xmin + i - 1, y); bit 0 is kept clear so
    # births one column left of the current extent stay representable.
    rows: dict[int, int] = {}
    for x, y in live:
        rows[y] = rows.get(y, 0) | (1 << (x - xmin + 1))
    out = []
    for y in range(min(rows) - 1, max(rows) + 2):
        mask = _next_row_bits(rows.get(y - 1, 0), rows.get(y, 0), rows.get(y + 1, 0))
        while mask:
            low = mask & -mask
            out.append((low.bit_length() - 2 + xmin, y))
            mask ^= low
    return frozenset(out)


def step_fast(u: Universe, *, limit: int | None = None) -> Universe:
    """The optimized engine; observably identical to ``step``."""
    return Universe(_check_limit(step_fast_cells(u.live), limit), u.generation + 1)


StepFn = Callable[..., Universe]


def step_n(
    u: Universe,
    n: int,
    *,
    engine: StepFn = step,
    limit: int | None = None,
) -> Universe:
    """n-fold composition of the step function; ``n == 0`` is the identity."""
    if n < 0:
        raise ValueError(f"step count must be >= 0, got {n}")
    for _ in range(n):
        u = engine(u, limit=limit)
    return u


def iterate(u: Universe, *, engine: StepFn = step, limit: int | None = None) -> Iterator[Universe]:
    """Yield u, step(u), step(step(u)), ... indefinitely."""
    while True:
        yield u
        u = engine(u, limit=limit)
