"""Shared fixtures and reference patterns for the test suite."""

from __future__ import annotations

import random

import pytest

# Canonical small patterns, written out by hand.
GLIDER = frozenset({(1, 0), (2, 1), (0, 2), (1, 2), (2, 2)})
BLOCK = frozenset({(0, 0), (1, 0), (0, 1), (1, 1)})
BLINKER_H = frozenset({(-1, 0), (0, 0), (1, 0)})
BLINKER_V = frozenset({(0, -1), (0, 0), (0, 1)})
L_TROMINO = frozenset({(0, 0), (1, 0), (0, 1)})
R_PENTOMINO = frozenset({(1, 0), (2, 0), (0, 1), (1, 1), (1, 2)})
B_HEPTOMINO = frozenset({(0, 0), (2, 0), (3, 0), (0, 1), (1, 1), (2, 1), (1, 2)})

GLIDER_RLE = "x = 3, y = 3\nbob$2bo$3o!"
R_PENTOMINO_RLE = "x = 3, y = 3\nb2o$2o$bo!"
B_HEPTOMINO_RLE = "x = 4, y = 3\nob2o$3o$bo!"


def random_cells(rng: random.Random, width: int, height: int, density: float) -> frozenset:
    return frozenset(
        (x, y)
        for x in range(width)
        for y in range(height)
        if rng.random() < density
    )


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xC0FFEE)


# --------------------------------------------------------------------------
# Independent seed-count oracle, written against the definitions only and
# sharing no code with the production enumerator: every subset of a
# (2K-1)x(2K-1) box, kept when it forms one group under the literal
# neighbor-chain relation, deduplicated with its own symmetry code.


def oracle_connected(cells: frozenset) -> bool:
    """One group, per the literal relation: chains of neighboring cells with
    at least one live cell per consecutive pair."""
    live = set(cells)
    start = next(iter(live))
    seen_live = {start}
    frontier = [start]
    visited_dead = set()
    while frontier:
        cx, cy = frontier.pop()
        here_live = (cx, cy) in live
        for nx in (cx - 1, cx, cx + 1):
            for ny in (cy - 1, cy, cy + 1):
                if (nx, ny) == (cx, cy):
                    continue
                n_live = (nx, ny) in live
                if not (here_live or n_live):
                    continue
                if n_live:
                    if (nx, ny) not in seen_live:
                        seen_live.add((nx, ny))
                        frontier.append((nx, ny))
                elif here_live and (nx, ny) not in visited_dead:
                    visited_dead.add((nx, ny))
                    frontier.append((nx, ny))
    return seen_live == live


ORACLE_SYMS = (
    lambda x, y: (x, y),
    lambda x, y: (-y, x),
    lambda x, y: (-x, -y),
    lambda x, y: (y, -x),
    lambda x, y: (-x, y),
    lambda x, y: (x, -y),
    lambda x, y: (y, x),
    lambda x, y: (-y, -x),
)


def oracle_canonical(cells) -> tuple:
    best = None
    for sym in ORACLE_SYMS:
        pts = [sym(x, y) for x, y in cells]
        mx = min(p[0] for p in pts)
        my = min(p[1] for p in pts)
        norm = tuple(sorted((x - mx, y - my) for x, y in pts))
        if best is None or norm < best:
            best = norm
    return best


def oracle_seed_counts(max_cells: int) -> dict[int, int]:
    from itertools import combinations

    side = 2 * max_cells - 1
    box = [(x, y) for x in range(side) for y in range(side)]
    counts = {}
    for k in range(1, max_cells + 1):
        reps = set()
        for combo in combinations(box, k):
            cells = frozenset(combo)
            if oracle_connected(cells):
                reps.add(oracle_canonical(cells))
        counts[k] = len(reps)
    return counts
