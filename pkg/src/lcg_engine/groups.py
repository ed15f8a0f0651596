"""Partitioning a universe into live cell groups, and canonical forms.

Two cells belong to the same group when they are joined by a chain of
neighboring cells in which every consecutive pair contains at least one live
cell. A chain can therefore pass through single dead cells but never through
two dead cells in a row, which gives an equivalent reformulation used here:
two live cells are grouped iff they are transitively within Chebyshev
distance 2 of each other. The group then consists of those live cells plus
the dead boundary cells adjacent to them.

Canonical forms make cell sets comparable modulo translation (mode "T") or
modulo translation plus the 8 square symmetries (mode "T+D8").
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

from .core import (
    Coord,
    D8_MATRICES,
    NEIGHBOR_OFFSETS,
    Universe,
    _check_limit,
    step_cells,
    transform,
)

# Offsets reachable by one chain hop between live cells: Chebyshev distance <= 2.
_CHAIN_OFFSETS: tuple[Coord, ...] = tuple(
    (dx, dy) for dx in range(-2, 3) for dy in range(-2, 3) if (dx, dy) != (0, 0)
)

MODE_T = "T"
MODE_TD8 = "T+D8"


@dataclass(frozen=True)
class CanonicalKey:
    """Normal form of a cell set under the chosen symmetry mode.

    ``cells`` is the set translated so its bounding-box corner sits at the
    origin, minimized over the mode's symmetries; ``digest`` is a
    collision-resistant fingerprint of that normal form. Equality compares
    the normal form itself, so digest collisions cannot conflate keys.
    """

    cells: frozenset[Coord]
    digest: str


def _normalize(cells: frozenset[Coord]) -> tuple[Coord, ...]:
    # Translate min corner to the origin; row-major (y, x) encoding.
    xmin = min(x for x, _ in cells)
    ymin = min(y for _, y in cells)
    return tuple(sorted(((x - xmin, y - ymin) for x, y in cells), key=lambda c: (c[1], c[0])))


def _digest(normal: tuple[Coord, ...]) -> str:
    body = "|".join(f"{x},{y}" for x, y in normal)
    return hashlib.sha256(body.encode("ascii")).hexdigest()


def canonicalize(cells: Iterable[Coord], mode: str = MODE_T) -> CanonicalKey:
    """Canonical key of a non-empty cell set under mode "T" or "T+D8"."""
    cells = frozenset(cells)
    if not cells:
        raise ValueError("cannot canonicalize an empty cell set")
    if mode == MODE_T:
        normal = _normalize(cells)
    elif mode == MODE_TD8:
        normal = min(_normalize(transform(cells, m)) for m in D8_MATRICES)
    else:
        raise ValueError(f"unknown canonicalization mode {mode!r}")
    return CanonicalKey(frozenset(normal), _digest(normal))


def anchor(cells: Iterable[Coord]) -> Coord:
    """Bounding-box minimum corner; the reference point for displacement."""
    xs, ys = zip(*cells)
    return min(xs), min(ys)


@dataclass(frozen=True)
class LiveCellGroup:
    """One connectedness class: its live interior plus its dead boundary."""

    live: frozenset[Coord]
    boundary: frozenset[Coord]

    @cached_property
    def id(self) -> CanonicalKey:
        """Canonical key of the live set under translation."""
        return canonicalize(self.live, MODE_T)

    @property
    def cells(self) -> frozenset[Coord]:
        return self.live | self.boundary

    @property
    def population(self) -> int:
        return len(self.live)

    @property
    def anchor(self) -> Coord:
        return anchor(self.live)


def _boundary_of(live: frozenset[Coord]) -> frozenset[Coord]:
    surface = set()
    for x, y in live:
        for dx, dy in NEIGHBOR_OFFSETS:
            surface.add((x + dx, y + dy))
    return frozenset(surface - live)


def group_cells(live: frozenset[Coord]) -> LiveCellGroup:
    """Wrap an already-connected live set together with its boundary."""
    return LiveCellGroup(live, _boundary_of(live))


def components(live: frozenset[Coord]) -> list[frozenset[Coord]]:
    """Connected live-cell components under the chain relation (no boundaries)."""
    remaining = set(live)
    out = []
    while remaining:
        start = remaining.pop()
        component = {start}
        frontier = [start]
        while frontier:
            x, y = frontier.pop()
            for dx, dy in _CHAIN_OFFSETS:
                c = (x + dx, y + dy)
                if c in remaining:
                    remaining.discard(c)
                    component.add(c)
                    frontier.append(c)
        out.append(frozenset(component))
    return out


def partition(u: Universe | Iterable[Coord]) -> frozenset[LiveCellGroup]:
    """Split a universe into its live cell groups.

    Every returned group is one equivalence class containing at least one
    live cell; dead-only singleton classes are dropped. Groups are pairwise
    disjoint in both live and boundary cells.
    """
    live = u.live if isinstance(u, Universe) else frozenset(u)
    return frozenset(group_cells(c) for c in components(live))


def single_group(cells: Iterable[Coord]) -> LiveCellGroup:
    """The unique group of a cell set; raises ValueError if it is not one group."""
    parts = partition(cells)
    if len(parts) != 1:
        raise ValueError(f"cell set forms {len(parts)} live cell groups, expected exactly 1")
    return next(iter(parts))


def lcg_successors(g: LiveCellGroup, *, limit: int | None = None) -> frozenset[LiveCellGroup]:
    """Apply the update rule to a group in isolation and partition the result.

    Because a group has no live neighbors outside itself, its next generation
    is fully determined by its own cells; the result may be empty, one group,
    or several.
    """
    return partition(_check_limit(step_cells(g.live), limit))


def sorted_groups(groups: Iterable[LiveCellGroup]) -> list[LiveCellGroup]:
    """Deterministic presentation order: by anchor (y, x), then live set."""
    return sorted(groups, key=lambda g: (g.anchor[1], g.anchor[0], sorted(g.live)))
