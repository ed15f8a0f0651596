"""Orbit classification: what happens when a live cell group evolves alone.

Starting from a single group, the isolated successor sequence either dies
out (terminating), revisits an earlier state (repeating), splits into
several groups (branching), or exhausts the generation budget (unresolved).

State equality during the walk is controlled by ``mode``:

* ``"T"``      - states match modulo translation, so moving patterns repeat
                 and acquire a displacement per period.
* ``"strict"`` - states match only at identical absolute positions; a moving
                 pattern never repeats under this mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Union

from .core import Coord, step_cells, translate
from .errors import PopulationLimitError
from .groups import (
    MODE_T,
    MODE_TD8,
    CanonicalKey,
    LiveCellGroup,
    anchor,
    canonicalize,
    components,
)

MODE_STRICT = "strict"
DEFAULT_BUDGET = 4096


@dataclass(frozen=True)
class Terminating:
    """All live cells die; ``length`` is the first generation with no live cells."""

    length: int


@dataclass(frozen=True)
class Repeating:
    """A state recurs: ``transient`` generations lead into a cycle of ``period``
    generations that nets ``displacement`` cells of translation."""

    transient: int
    period: int
    displacement: Coord


@dataclass(frozen=True)
class Branching:
    """The step taken from generation ``at`` produces two or more groups."""

    at: int
    offspring: tuple[CanonicalKey, ...]


@dataclass(frozen=True)
class Unresolved:
    """No termination within ``budget`` generations."""

    budget: int


Classification = Union[Terminating, Repeating, Branching, Unresolved]


class TraceStep(NamedTuple):
    key: CanonicalKey  # mode-T canonical form of the generation's live set
    anchor: Coord  # absolute bounding-box corner of that live set


@dataclass(frozen=True)
class OrbitRecord:
    """The examined sequence plus its classification.

    ``trace`` holds one entry per generation examined, starting with the
    seed; a terminating orbit's trace stops at the last non-empty
    generation. ``velocity`` is displacement over period, defined only for
    repeating orbits.
    """

    seed: CanonicalKey  # mode T+D8: catalog identity of the starting state
    mode: str
    trace: tuple[TraceStep, ...]
    classification: Classification
    velocity: tuple[Fraction, Fraction] | None

    def cycle_steps(self) -> tuple[TraceStep, ...]:
        """The cycle's states (repeating orbits only): trace[transient:transient+period]."""
        c = self.classification
        if not isinstance(c, Repeating):
            raise ValueError("orbit has no cycle: classification is not repeating")
        return self.trace[c.transient : c.transient + c.period]


def _mode_state(key: CanonicalKey, anc: Coord, mode: str):
    return key if mode == MODE_T else (key, anc)


@lru_cache(maxsize=65536)
def _classify_cells(cells: frozenset[Coord], budget: int, mode: str, limit: int | None) -> OrbitRecord:
    # cells must be a single group; anchors in the returned trace are
    # absolute for this cell set, so callers may translate them freely.
    key0 = canonicalize(cells, MODE_T)
    anc0 = anchor(cells)
    trace = [TraceStep(key0, anc0)]
    seen = {_mode_state(key0, anc0, mode): 0}
    current = cells
    for gen in range(1, budget + 1):
        nxt = step_cells(current)
        if limit is not None and len(nxt) > limit:
            raise PopulationLimitError(len(nxt), limit)
        parts = components(nxt)
        if not parts:
            return OrbitRecord(
                seed=canonicalize(cells, MODE_TD8),
                mode=mode,
                trace=tuple(trace),
                classification=Terminating(length=gen),
                velocity=None,
            )
        if len(parts) > 1:
            offspring = tuple(
                sorted((canonicalize(p, MODE_TD8) for p in parts), key=lambda k: k.digest)
            )
            return OrbitRecord(
                seed=canonicalize(cells, MODE_TD8),
                mode=mode,
                trace=tuple(trace),
                classification=Branching(at=gen - 1, offspring=offspring),
                velocity=None,
            )
        current = parts[0]
        key = canonicalize(current, MODE_T)
        anc = anchor(current)
        trace.append(TraceStep(key, anc))
        state = _mode_state(key, anc, mode)
        if state in seen:
            j = seen[state]
            period = gen - j
            dx = anc[0] - trace[j].anchor[0]
            dy = anc[1] - trace[j].anchor[1]
            return OrbitRecord(
                seed=canonicalize(cells, MODE_TD8),
                mode=mode,
                trace=tuple(trace),
                classification=Repeating(transient=j, period=period, displacement=(dx, dy)),
                velocity=(Fraction(dx, period), Fraction(dy, period)),
            )
        seen[state] = gen
    return OrbitRecord(
        seed=canonicalize(cells, MODE_TD8),
        mode=mode,
        trace=tuple(trace),
        classification=Unresolved(budget=budget),
        velocity=None,
    )


def _shift_record(record: OrbitRecord, dx: int, dy: int) -> OrbitRecord:
    if dx == 0 and dy == 0:
        return record
    trace = tuple(TraceStep(s.key, (s.anchor[0] + dx, s.anchor[1] + dy)) for s in record.trace)
    return OrbitRecord(record.seed, record.mode, trace, record.classification, record.velocity)


def classify(
    seed: LiveCellGroup,
    budget: int = DEFAULT_BUDGET,
    mode: str = MODE_T,
    *,
    limit: int | None = None,
) -> OrbitRecord:
    """Walk the isolated successor sequence of ``seed`` until it terminates,
    repeats (modulo the mode's equality), branches, or runs out of budget."""
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    if mode not in (MODE_T, MODE_STRICT):
        raise ValueError(f"unknown classification mode {mode!r}")
    # Classify the translation-normalized cells (cacheable across positions),
    # then shift the trace anchors back to the seed's true location.
    ax, ay = seed.anchor
    normal = translate(seed.live, -ax, -ay)
    record = _classify_cells(normal, budget, mode, limit)
    return _shift_record(record, ax, ay)


def cycle_identity(record: OrbitRecord) -> CanonicalKey:
    """Catalog identity of a repeating orbit's cycle: the minimal T+D8 key
    over the cycle's states. Two orbits share it iff their cycles coincide
    modulo translation and square symmetry."""
    return min(
        (canonicalize(s.key.cells, MODE_TD8) for s in record.cycle_steps()),
        key=lambda k: k.digest,
    )


@dataclass(frozen=True)
class ReplayResult:
    """Outcome of re-simulating a record; falsy when any field failed to check out."""

    ok: bool
    generation: int | None = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


def replay(record: OrbitRecord, seed: LiveCellGroup) -> ReplayResult:
    """Re-simulate ``seed`` and confirm every field of ``record``.

    This deliberately re-walks the evolution with the raw step function
    rather than calling classify again, and reports the first divergence
    generation on mismatch.
    """

    def fail(gen: int | None, msg: str) -> ReplayResult:
        return ReplayResult(False, gen, msg)

    if canonicalize(seed.live, MODE_TD8) != record.seed:
        return fail(None, "seed key does not match the record")
    if not record.trace:
        return fail(None, "record has an empty trace")

    cells = seed.live
    states = []
    for i, expected in enumerate(record.trace):
        if i > 0:
            parts = components(step_cells(cells))
            if len(parts) != 1:
                return fail(i, f"expected a single group at generation {i}, found {len(parts)}")
            cells = parts[0]
        key = canonicalize(cells, MODE_T)
        anc = anchor(cells)
        if key != expected.key or anc != expected.anchor:
            return fail(i, f"trace diverges at generation {i}")
        states.append(_mode_state(key, anc, record.mode))

    last = len(record.trace) - 1
    c = record.classification
    if not isinstance(c, Repeating) and record.velocity is not None:
        return fail(None, "velocity defined for a non-repeating orbit")
    if isinstance(c, Terminating):
        if c.length != last + 1:
            return fail(last, "terminating length does not match trace extent")
        if step_cells(cells):
            return fail(c.length, f"live cells remain at generation {c.length}")
    elif isinstance(c, Repeating):
        if c.transient + c.period != last:
            return fail(last, "repeating window does not match trace extent")
        entry = record.trace[c.transient]
        if record.trace[last].key != entry.key:
            return fail(last, "cycle endpoints differ")
        dx = record.trace[last].anchor[0] - entry.anchor[0]
        dy = record.trace[last].anchor[1] - entry.anchor[1]
        if (dx, dy) != c.displacement:
            return fail(last, "displacement does not match cycle anchors")
        if states[last] != states[c.transient]:
            return fail(last, "cycle endpoints differ under the record's mode")
        if len(set(states[:last])) != last:
            return fail(last, "a state repeats before the recorded cycle entry")
        if record.velocity != (Fraction(dx, c.period), Fraction(dy, c.period)):
            return fail(last, "velocity does not match displacement/period")
    elif isinstance(c, Branching):
        if c.at != last:
            return fail(last, "branch generation does not match trace extent")
        parts = components(step_cells(cells))
        if len(parts) < 2:
            return fail(c.at, "no branch occurs after the final trace state")
        found = tuple(sorted((canonicalize(p, MODE_TD8) for p in parts), key=lambda k: k.digest))
        if found != c.offspring:
            return fail(c.at, "offspring keys do not match")
    elif isinstance(c, Unresolved):
        if c.budget != last:
            return fail(last, "unresolved budget does not match trace extent")
        if len(set(states)) != len(states):
            return fail(last, "a repetition exists within the examined window")
    else:
        return fail(None, f"unknown classification {type(c).__name__}")
    return ReplayResult(True)
