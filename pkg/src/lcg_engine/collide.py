"""Arranged two-pattern encounters and the pairwise interaction table.

An encounter places two repeating patterns at a relative offset and phase.
Until the groups come within chain range of each other the joint evolution
factorizes into the two independent cycles (no cell has live neighbors in
both groups), so the interaction onset is found geometrically on the two
cycle trajectories without simulating: it is the first generation at which
any two cells of the two patterns are within Chebyshev distance 2.

"Never interacts" is likewise decided exactly rather than by chasing: a pair
of periodic trajectories is interaction-free forever if either (a) their
relative drift per joint period is zero and one full joint period is
collision-free, or (b) some axis separates them by >= 3 at every phase of a
joint period and the relative drift does not shrink that axis gap.

After onset the joint universe is simulated until every group settles into a
repeating orbit and all pairs are provably interaction-free (``settle``).
Escaping spaceships therefore stop being chased the moment their recession
is provable.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import Iterator, NamedTuple

from .catalog import Catalog, CatalogEntry, entry_from_cells, merge_entries
from .core import Coord, StepFn, Universe, bounding_box, step, translate
from .errors import InvalidSpecError, PopulationLimitError
from .groups import (
    MODE_TD8,
    CanonicalKey,
    canonicalize,
    components,
    single_group,
)
from .orbits import OrbitRecord, Repeating, classify, cycle_identity

DEFAULT_SETTLE_BUDGET = 256


@dataclass(frozen=True)
class CollisionSpec:
    """One arranged encounter: entry ids, b's anchor offset relative to a's,
    cycle phases for both patterns, and the total generation horizon."""

    a: str
    b: str
    offset: Coord
    phase_a: int
    phase_b: int
    horizon: int


class CensusEntry(NamedTuple):
    key: CanonicalKey  # cycle identity (T+D8 over the cycle's states)
    anchor: Coord  # bounding-box corner at the recording generation
    phase: int  # index into the identity pattern's canonical cycle
    velocity: tuple[Fraction, Fraction]


STATUS_SETTLED = "settled"
STATUS_NO_INTERACTION = "no_interaction"
STATUS_UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class CollisionOutcome:
    spec: CollisionSpec
    onset: int | None
    status: str
    census: tuple[CensusEntry, ...]
    escaping: tuple[CensusEntry, ...]
    diagnostics: str | None = None


@dataclass(frozen=True)
class TableParameters:
    a: str
    b: str
    window: int
    horizon: int


@dataclass(frozen=True)
class CollisionTable:
    """All valid encounters of two patterns over an offset window, together
    with catalog entries for any pattern the sweep discovered."""

    parameters: TableParameters
    outcomes: tuple[CollisionOutcome, ...]
    novel_entries: tuple[CatalogEntry, ...]


@dataclass(frozen=True)
class SettleResult:
    status: str  # settled | unresolved
    generation: int | None
    census: tuple[CensusEntry, ...]
    diagnostics: str | None = None


# --------------------------------------------------------------------------
# cycle trajectories


@dataclass(frozen=True)
class _Traj:
    """A repeating pattern's future as a function of time: cycle states plus
    the affine anchor progression (one displacement per full period)."""

    normals: tuple[frozenset[Coord], ...]  # cycle states, each anchored at (0, 0)
    anchors: tuple[Coord, ...]  # absolute anchor of cycle index i on the first pass
    boxes: tuple[tuple[int, int, int, int], ...]  # bbox of each normal state
    period: int
    displacement: Coord
    start: int  # cycle index at local time 0

    def anchor_at(self, t: int) -> Coord:
        idx = self.start + t
        i = idx % self.period
        k = idx // self.period
        ax, ay = self.anchors[i]
        return ax + k * self.displacement[0], ay + k * self.displacement[1]

    def cells_at(self, t: int) -> frozenset[Coord]:
        ax, ay = self.anchor_at(t)
        return translate(self.normals[(self.start + t) % self.period], ax, ay)

    def box_at(self, t: int) -> tuple[int, int, int, int]:
        ax, ay = self.anchor_at(t)
        x0, y0, x1, y1 = self.boxes[(self.start + t) % self.period]
        return x0 + ax, y0 + ay, x1 + ax, y1 + ay


def _traj_from_record(record: OrbitRecord) -> _Traj:
    # The record's trace anchors are absolute, so the trajectory continues
    # the group from wherever classify saw it; requires transient == 0.
    c = record.classification
    if not isinstance(c, Repeating) or c.transient != 0:
        raise ValueError("trajectory requires a repeating orbit already on its cycle")
    steps = record.cycle_steps()
    normals = tuple(_origin_form(s.key.cells) for s in steps)
    return _Traj(
        normals=normals,
        anchors=tuple(s.anchor for s in steps),
        boxes=tuple(bounding_box(n) for n in normals),
        period=c.period,
        displacement=c.displacement,
        start=0,
    )


def _origin_form(cells: frozenset[Coord]) -> frozenset[Coord]:
    x0, y0, _, _ = bounding_box(cells)
    return translate(cells, -x0, -y0) if (x0, y0) != (0, 0) else cells


@lru_cache(maxsize=4096)
def _influence(cells: frozenset[Coord]) -> frozenset[Coord]:
    # Cells within Chebyshev distance 1; two sets are within chain range
    # (distance <= 2) iff their influence sets intersect.
    out = set(cells)
    for x, y in cells:
        out.update(
            ((x - 1, y - 1), (x, y - 1), (x + 1, y - 1), (x - 1, y),
             (x + 1, y), (x - 1, y + 1), (x, y + 1), (x + 1, y + 1))
        )
    return frozenset(out)


def _boxes_gap_ge_3(boxa, boxb) -> bool:
    ax0, ay0, ax1, ay1 = boxa
    bx0, by0, bx1, by1 = boxb
    return (bx0 - ax1 >= 3 or ax0 - bx1 >= 3 or by0 - ay1 >= 3 or ay0 - by1 >= 3)


def _interacting_at(ta: _Traj, tb: _Traj, t: int) -> bool:
    """Exact: some cell pair of the two patterns within Chebyshev distance 2."""
    if _boxes_gap_ge_3(ta.box_at(t), tb.box_at(t)):
        return False
    axa, aya = ta.anchor_at(t)
    axb, ayb = tb.anchor_at(t)
    ia = _influence(ta.normals[(ta.start + t) % ta.period])
    ib = _influence(tb.normals[(tb.start + t) % tb.period])
    return not ia.isdisjoint(translate(ib, axb - axa, ayb - aya))


def _drift_per(ta: _Traj, tb: _Traj, span: int) -> Coord:
    """How far b moves relative to a over ``span`` generations."""
    dax = ta.displacement[0] * span // ta.period
    day = ta.displacement[1] * span // ta.period
    dbx = tb.displacement[0] * span // tb.period
    dby = tb.displacement[1] * span // tb.period
    return dbx - dax, dby - day


def _pair_never_interacts(ta: _Traj, tb: _Traj, t0: int) -> bool:
    """Prove that trajectories a and b stay out of chain range for all t >= t0.

    Exact for zero relative drift (the joint geometry is periodic); for
    nonzero drift, a separating axis with non-shrinking gap over one joint
    period extends to all later periods by induction.
    """
    span = math.lcm(ta.period, tb.period)
    drift = _drift_per(ta, tb, span)
    window = range(t0, t0 + span)
    if drift == (0, 0):
        return not any(_interacting_at(ta, tb, t) for t in window)
    checks = []
    if drift[0] >= 0:
        checks.append(lambda t: tb.box_at(t)[0] - ta.box_at(t)[2] >= 3)
    if drift[0] <= 0:
        checks.append(lambda t: ta.box_at(t)[0] - tb.box_at(t)[2] >= 3)
    if drift[1] >= 0:
        checks.append(lambda t: tb.box_at(t)[1] - ta.box_at(t)[3] >= 3)
    if drift[1] <= 0:
        checks.append(lambda t: ta.box_at(t)[1] - tb.box_at(t)[3] >= 3)
    return any(all(check(t) for t in window) for check in checks)


# --------------------------------------------------------------------------
# arranging and onset


@lru_cache(maxsize=4096)
def _entry_cycle(entry: CatalogEntry) -> tuple[tuple[frozenset[Coord], ...], tuple[Coord, ...], Coord]:
    """(normal states, reference anchors with state 0 at origin, displacement)
    of a repeating entry's cycle, after running out its transient."""
    c = entry.classification
    if not isinstance(c, Repeating):
        raise InvalidSpecError(f"entry {entry.id.digest[:12]} is not repeating")
    record = classify(single_group(entry.cells), c.transient + c.period + 1)
    if record.classification != c:
        raise InvalidSpecError(
            f"entry {entry.id.digest[:12]} metadata does not match its cells "
            f"(stored {c}, derived {record.classification})"
        )
    steps = record.cycle_steps()
    base = steps[0].anchor
    normals = tuple(_origin_form(s.key.cells) for s in steps)
    anchors = tuple((s.anchor[0] - base[0], s.anchor[1] - base[1]) for s in steps)
    return normals, anchors, c.displacement


def _placed_traj(entry: CatalogEntry, phase: int, base: Coord) -> _Traj:
    normals, ref_anchors, displacement = _entry_cycle(entry)
    period = len(normals)
    if not 0 <= phase < period:
        raise InvalidSpecError(
            f"phase {phase} out of range for period {period} of entry {entry.id.digest[:12]}"
        )
    px, py = ref_anchors[phase]
    anchors = tuple(
        (base[0] + ax - px, base[1] + ay - py) for ax, ay in ref_anchors
    )
    return _Traj(
        normals=normals,
        anchors=anchors,
        boxes=tuple(bounding_box(n) for n in normals),
        period=period,
        displacement=displacement,
        start=phase,
    )


def _resolve(spec: CollisionSpec, catalog: Catalog) -> tuple[CatalogEntry, CatalogEntry]:
    ea = catalog.get(spec.a)
    eb = catalog.get(spec.b)
    if ea is None or eb is None:
        missing = spec.a if ea is None else spec.b
        raise InvalidSpecError(f"catalog has no entry with id {missing!r}")
    return ea, eb


def _spec_trajs(spec: CollisionSpec, catalog: Catalog) -> tuple[_Traj, _Traj]:
    ea, eb = _resolve(spec, catalog)
    if spec.horizon < 0:
        raise InvalidSpecError(f"horizon must be >= 0, got {spec.horizon}")
    ta = _placed_traj(ea, spec.phase_a, (0, 0))
    tb = _placed_traj(eb, spec.phase_b, spec.offset)
    cells_a = ta.cells_at(0)
    cells_b = tb.cells_at(0)
    if cells_a & cells_b:
        raise InvalidSpecError("patterns overlap at placement")
    if _interacting_at(ta, tb, 0):
        raise InvalidSpecError("patterns merge into one group at placement")
    return ta, tb


def arrange(spec: CollisionSpec, catalog: Catalog) -> Universe:
    """The generation-0 universe of an encounter: pattern a at the origin,
    pattern b displaced by the spec offset, each at its requested phase.
    Raises InvalidSpecError unless the placement forms two separate groups."""
    ta, tb = _spec_trajs(spec, catalog)
    return Universe(ta.cells_at(0) | tb.cells_at(0))


def interaction_onset(spec: CollisionSpec, catalog: Catalog) -> int | None:
    """First generation at which the joint partition differs from the two
    independently evolved patterns, or None if that never happens within the
    horizon.

    While the patterns stay out of chain range the joint evolution equals the
    disjoint union of the cycles, so the first divergence is exactly the
    first generation the trajectories come within Chebyshev distance 2.
    """
    ta, tb = _spec_trajs(spec, catalog)
    return _onset_of(ta, tb, spec.horizon)


def _onset_of(ta: _Traj, tb: _Traj, horizon: int) -> int | None:
    span = math.lcm(ta.period, tb.period)
    for t in range(horizon + 1):
        if t % span == 0 and _pair_never_interacts(ta, tb, t):
            return None
        if _interacting_at(ta, tb, t):
            return t
    return None


# --------------------------------------------------------------------------
# settling


def _census_entry(live: frozenset[Coord], record: OrbitRecord) -> CensusEntry:
    """Identify a settled group: cycle identity, canonical phase, position."""
    identity = cycle_identity(record)
    own = canonicalize(live, MODE_TD8)
    canonical = classify(single_group(identity.cells), len(record.cycle_steps()) + 1)
    for i, s in enumerate(canonical.cycle_steps()):
        if canonicalize(s.key.cells, MODE_TD8) == own:
            phase = i
            break
    else:
        # the identity's cycle is the group's cycle transformed by a square
        # symmetry, so a match must exist
        raise AssertionError(f"group state not found in its own cycle {identity.digest[:12]}")
    x0, y0, _, _ = bounding_box(live)
    return CensusEntry(identity, (x0, y0), phase, record.velocity)


def settle(
    u: Universe,
    *,
    horizon: int,
    budget: int = DEFAULT_SETTLE_BUDGET,
    engine: StepFn = step,
    limit: int | None = None,
) -> SettleResult:
    """Evolve a universe until its future is provably periodic.

    Settled means: every group classifies as repeating with no transient,
    and every pair of groups is provably out of chain range forever. The
    census records each group's cycle identity, anchor, and phase at the
    settling generation. ``horizon`` bounds the absolute generation counter.
    """
    seen_keys: set[str] = set()
    while True:
        parts = components(u.live)
        if not parts:
            return SettleResult(STATUS_SETTLED, u.generation, ())
        # Cheap gate: a group is worth classifying only once its state (mod
        # translation) has recurred; active regions churn fresh states.
        digests = [canonicalize(p).digest for p in parts]
        if all(d in seen_keys for d in digests):
            records = [classify(single_group(p), budget, limit=limit) for p in parts]
            if all(
                isinstance(r.classification, Repeating) and r.classification.transient == 0
                for r in records
            ):
                trajs = [_traj_from_record(r) for r in records]
                if all(
                    _pair_never_interacts(ta, tb, 0)
                    for ta, tb in combinations(trajs, 2)
                ):
                    census = tuple(
                        sorted(
                            (_census_entry(p, r) for p, r in zip(parts, records)),
                            key=lambda e: (e.key.digest, e.anchor, e.phase),
                        )
                    )
                    return SettleResult(STATUS_SETTLED, u.generation, census)
        seen_keys.update(digests)
        if u.generation >= horizon:
            return SettleResult(
                STATUS_UNRESOLVED, None, (), f"horizon {horizon} exhausted without settling"
            )
        try:
            u = engine(u, limit=limit)
        except PopulationLimitError as err:
            return SettleResult(
                STATUS_UNRESOLVED,
                None,
                (),
                f"population limit at generation {u.generation + 1}: {err}",
            )


# --------------------------------------------------------------------------
# full encounters and tables


def _escaping(census: tuple[CensusEntry, ...]) -> tuple[CensusEntry, ...]:
    return tuple(e for e in census if e.velocity != (0, 0))


def collide(
    spec: CollisionSpec,
    catalog: Catalog,
    *,
    budget: int = DEFAULT_SETTLE_BUDGET,
    engine: StepFn = step,
    limit: int | None = None,
) -> CollisionOutcome:
    """Simulate one encounter to its settled census (or lack of interaction).

    The pre-onset joint state is constructed from the two independent cycles
    rather than stepped, which is exact while the groups stay out of chain
    range; simulation starts at the onset generation.
    """
    ta, tb = _spec_trajs(spec, catalog)
    onset = _onset_of(ta, tb, spec.horizon)
    if onset is None:
        eff = max(budget, ta.period + 1, tb.period + 1)
        census = tuple(
            sorted(
                (
                    _census_entry(ta.cells_at(0), classify(single_group(ta.cells_at(0)), eff)),
                    _census_entry(tb.cells_at(0), classify(single_group(tb.cells_at(0)), eff)),
                ),
                key=lambda e: (e.key.digest, e.anchor, e.phase),
            )
        )
        return CollisionOutcome(spec, None, STATUS_NO_INTERACTION, census, _escaping(census))
    joint = Universe(ta.cells_at(onset) | tb.cells_at(onset), generation=onset)
    result = settle(joint, horizon=spec.horizon, budget=budget, engine=engine, limit=limit)
    if result.status == STATUS_SETTLED:
        return CollisionOutcome(
            spec, onset, STATUS_SETTLED, result.census, _escaping(result.census)
        )
    return CollisionOutcome(spec, onset, STATUS_UNRESOLVED, (), (), result.diagnostics)


def _window_offsets(window: int) -> Iterator[Coord]:
    # Chebyshev shells outward, so growing the window appends rows.
    for shell in range(window + 1):
        for dx in range(-shell, shell + 1):
            for dy in range(-shell, shell + 1):
                if max(abs(dx), abs(dy)) == shell:
                    yield dx, dy


_WORKER_STATE: dict = {}


def _worker_init(catalog: Catalog, budget: int, limit: int | None) -> None:
    _WORKER_STATE["catalog"] = catalog
    _WORKER_STATE["budget"] = budget
    _WORKER_STATE["limit"] = limit


def _worker_collide(spec: CollisionSpec) -> CollisionOutcome:
    return collide(
        spec,
        _WORKER_STATE["catalog"],
        budget=_WORKER_STATE["budget"],
        limit=_WORKER_STATE["limit"],
    )


def collision_table(
    a: CatalogEntry,
    b: CatalogEntry,
    window: int,
    horizon: int,
    catalog: Catalog,
    *,
    budget: int = DEFAULT_SETTLE_BUDGET,
    limit: int | None = None,
    jobs: int | None = None,
) -> CollisionTable:
    """Collide ``a`` against ``b`` at every offset with |dx|,|dy| <= window
    and every phase pair. Invalid placements (overlapping or already merged)
    are skipped. The result is deterministic for fixed inputs regardless of
    ``jobs``; novel patterns discovered by any census are returned as catalog
    entries (relative to the passed catalog)."""
    working = merge_entries(catalog, (a, b))
    specs = []
    for offset in _window_offsets(window):
        for pa, pb in product(range(_period_of(a)), range(_period_of(b))):
            spec = CollisionSpec(a.id.digest, b.id.digest, offset, pa, pb, horizon)
            try:
                _spec_trajs(spec, working)
            except InvalidSpecError:
                continue
            specs.append(spec)
    if jobs and jobs > 1:
        with ProcessPoolExecutor(
            max_workers=jobs,
            initializer=_worker_init,
            initargs=(working, budget, limit),
        ) as pool:
            outcomes = tuple(
                pool.map(_worker_collide, specs, chunksize=max(1, len(specs) // (jobs * 8)))
            )
    else:
        outcomes = tuple(collide(s, working, budget=budget, limit=limit) for s in specs)

    known = {e.id.digest for e in catalog.entries}
    novel: dict[str, CatalogEntry] = {}
    for entry in (a, b):
        if entry.id.digest not in known:
            novel[entry.id.digest] = entry
    for outcome in outcomes:
        for ce in outcome.census:
            if ce.key.digest not in known and ce.key.digest not in novel:
                novel[ce.key.digest] = entry_from_cells(ce.key.cells, budget, limit=limit)
    ordered_novel = tuple(
        sorted(novel.values(), key=lambda e: (e.population, e.id.digest))
    )
    return CollisionTable(
        TableParameters(a.id.digest, b.id.digest, window, horizon),
        outcomes,
        ordered_novel,
    )


def _period_of(entry: CatalogEntry) -> int:
    c = entry.classification
    if not isinstance(c, Repeating):
        raise InvalidSpecError(f"entry {entry.id.digest[:12]} is not repeating")
    return c.period
