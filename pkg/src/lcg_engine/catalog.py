"""Seed enumeration and the pattern catalog.

Seeds are generated one representative per symmetry class: every connected
live set of size n+1 contains a connected subset of size n, so each size
class grows from the previous one by adding a cell within chain range of an
existing cell, deduplicating modulo translation and square symmetry.

A catalog is the classified collection of all seeds up to a population
bound, optionally closed under branching offspring.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterator, NamedTuple

from .core import Coord
from .groups import MODE_TD8, CanonicalKey, LiveCellGroup, canonicalize, single_group
from .orbits import Branching, Classification, classify

DEFAULT_ENTRY_CAP = 10_000

# Positions whose addition keeps a live set a single group: within Chebyshev
# distance 2 of an existing cell.
_GROWTH_OFFSETS = tuple(
    (dx, dy) for dx in range(-2, 3) for dy in range(-2, 3) if (dx, dy) != (0, 0)
)


class Discovery(NamedTuple):
    """Where a closure entry came from: parent id digest and branch generation."""

    parent: str
    generation: int


@dataclass(frozen=True)
class CatalogEntry:
    """One canonical pattern with its classification metadata."""

    id: CanonicalKey  # T+D8 identity of the seed's normal form
    population: int
    classification: Classification
    velocity: tuple[Fraction, Fraction] | None
    discovered_from: Discovery | None = None

    @property
    def cells(self) -> frozenset[Coord]:
        return self.id.cells


@dataclass(frozen=True)
class CatalogParameters:
    max_cells: int
    budget: int
    closure: bool
    entry_cap: int = DEFAULT_ENTRY_CAP


@dataclass(frozen=True)
class Catalog:
    """Entries sorted by (population, id digest); ``complete`` is False when
    the closure pass hit the entry cap before reaching a fixed point."""

    entries: tuple[CatalogEntry, ...]
    parameters: CatalogParameters
    complete: bool = True

    def get(self, digest: str) -> CatalogEntry | None:
        for e in self.entries:
            if e.id.digest == digest:
                return e
        return None

    def find(self, prefix: str) -> CatalogEntry:
        """Entry whose id digest starts with ``prefix``; must be unique."""
        hits = [e for e in self.entries if e.id.digest.startswith(prefix)]
        if not hits:
            raise KeyError(f"no catalog entry matches id {prefix!r}")
        if len(hits) > 1:
            raise KeyError(f"id prefix {prefix!r} is ambiguous ({len(hits)} matches)")
        return hits[0]


def _entry_order(e: CatalogEntry) -> tuple[int, str]:
    return e.population, e.id.digest


def enumerate_seeds(max_cells: int) -> Iterator[LiveCellGroup]:
    """Yield one seed per T+D8 class of connected live sets, smallest first.

    Order is (population, canonical key digest) ascending; every yield is a
    single live cell group.
    """
    if max_cells < 1:
        raise ValueError(f"max_cells must be >= 1, got {max_cells}")
    generation: dict[str, CanonicalKey] = {}
    k = canonicalize(frozenset({(0, 0)}), MODE_TD8)
    generation[k.digest] = k
    for size in range(1, max_cells + 1):
        for digest in sorted(generation):
            yield single_group(generation[digest].cells)
        if size == max_cells:
            break
        grown: dict[str, CanonicalKey] = {}
        for key in generation.values():
            cells = key.cells
            candidates = {
                (x + dx, y + dy) for x, y in cells for dx, dy in _GROWTH_OFFSETS
            } - cells
            for c in candidates:
                k = canonicalize(cells | {c}, MODE_TD8)
                grown.setdefault(k.digest, k)
        generation = grown


def entry_from_cells(
    cells: frozenset[Coord],
    budget: int,
    *,
    discovered_from: Discovery | None = None,
    limit: int | None = None,
) -> CatalogEntry:
    """Classify a cell set (which must form a single group) into an entry.

    Classification runs on the T+D8 normal form, so entry metadata (most
    visibly a mover's displacement direction) is intrinsic to the id rather
    than to the orientation the cells arrived in.
    """
    normal = canonicalize(cells, MODE_TD8).cells
    record = classify(single_group(normal), budget, limit=limit)
    return CatalogEntry(
        id=record.seed,
        population=len(record.seed.cells),
        classification=record.classification,
        velocity=record.velocity,
        discovered_from=discovered_from,
    )


def build_catalog(
    max_cells: int,
    budget: int,
    closure: bool,
    *,
    entry_cap: int = DEFAULT_ENTRY_CAP,
    limit: int | None = None,
) -> Catalog:
    """Classify every enumerated seed; with ``closure``, also classify any
    branching offspring not yet present, to a fixed point or the entry cap."""
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    entries: dict[str, CatalogEntry] = {}
    queue: deque[tuple[CanonicalKey, Discovery]] = deque()

    def admit(entry: CatalogEntry) -> None:
        entries[entry.id.digest] = entry
        if closure and isinstance(entry.classification, Branching):
            for k in entry.classification.offspring:
                queue.append((k, Discovery(entry.id.digest, entry.classification.at)))

    for seed in enumerate_seeds(max_cells):
        admit(entry_from_cells(seed.live, budget, limit=limit))

    complete = True
    while queue:
        key, origin = queue.popleft()
        if key.digest in entries:
            continue
        if len(entries) >= entry_cap:
            complete = False
            break
        admit(entry_from_cells(key.cells, budget, discovered_from=origin, limit=limit))

    ordered = tuple(sorted(entries.values(), key=_entry_order))
    return Catalog(
        entries=ordered,
        parameters=CatalogParameters(max_cells, budget, closure, entry_cap),
        complete=complete,
    )


def merge_entries(catalog: Catalog, new_entries: tuple[CatalogEntry, ...]) -> Catalog:
    """Catalog with ``new_entries`` added (existing ids win); order preserved."""
    if not new_entries:
        return catalog
    merged = {e.id.digest: e for e in new_entries}
    merged.update({e.id.digest: e for e in catalog.entries})
    return replace(catalog, entries=tuple(sorted(merged.values(), key=_entry_order)))
