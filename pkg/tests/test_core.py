"""Universe and step-engine contract tests."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lcg_engine.core import (
    D8_MATRICES,
    Universe,
    bounding_box,
    neighbors,
    step,
    step_fast,
    step_n,
    transform,
    translate,
)
from lcg_engine.errors import PopulationLimitError

from conftest import BLINKER_H, BLINKER_V, GLIDER, random_cells

cell_sets = st.frozensets(
    st.tuples(st.integers(-8, 8), st.integers(-8, 8)), max_size=24
)


def test_neighbors_of_origin():
    assert neighbors((0, 0)) == {
        (-1, -1), (0, -1), (1, -1),
        (-1, 0), (1, 0),
        (-1, 1), (0, 1), (1, 1),
    }


def test_neighbors_translation():
    assert neighbors((5, 5)) == translate(neighbors((0, 0)), 5, 5)


@given(st.tuples(st.integers(-10**9, 10**9), st.integers(-10**9, 10**9)))
def test_neighbors_count_and_excludes_self(c):
    ns = neighbors(c)
    assert len(ns) == 8
    assert c not in ns


def test_step_empty():
    assert step(Universe(frozenset())).live == frozenset()


def test_step_single_cell_dies():
    assert step(Universe(frozenset({(0, 0)}))).live == frozenset()


def test_step_blinker_rotates():
    assert step(Universe(BLINKER_H)).live == BLINKER_V
    assert step(Universe(BLINKER_V)).live == BLINKER_H


def test_step_is_pure_and_counts_generations():
    u = Universe(BLINKER_H, generation=7)
    v = step(u)
    assert u.live == BLINKER_H and u.generation == 7
    assert v.generation == 8


def test_step_ignores_generation_counter():
    a = step(Universe(GLIDER, generation=0))
    b = step(Universe(GLIDER, generation=1000))
    assert a.live == b.live


def test_step_n_identity():
    u = Universe(GLIDER, generation=3)
    assert step_n(u, 0) is u


def test_step_n_negative_rejected():
    with pytest.raises(ValueError):
        step_n(Universe(GLIDER), -1)


def test_step_n_glider_translates():
    u4 = step_n(Universe(GLIDER), 4)
    assert u4.live == translate(GLIDER, 1, 1)
    assert u4.generation == 4


def test_step_n_blinker_period_two():
    assert step_n(Universe(BLINKER_H), 2).live == BLINKER_H


def test_population_limit():
    u = Universe(BLINKER_H)
    with pytest.raises(PopulationLimitError) as err:
        step(u, limit=2)
    assert err.value.limit == 2
    assert err.value.population == 3


@given(cell_sets, st.integers(-50, 50), st.integers(-50, 50))
@settings(max_examples=60)
def test_translation_equivariance(cells, dx, dy):
    moved = step(Universe(translate(cells, dx, dy))).live
    assert moved == translate(step(Universe(cells)).live, dx, dy)


@given(cell_sets, st.sampled_from(D8_MATRICES))
@settings(max_examples=60)
def test_symmetry_equivariance(cells, m):
    assert step(Universe(transform(cells, m))).live == transform(
        step(Universe(cells)).live, m
    )


@given(cell_sets, st.tuples(st.integers(-8, 8), st.integers(-8, 8)))
@settings(max_examples=60)
def test_locality(cells, c):
    """A cell's next state depends only on itself and its 8 neighbors."""
    nearby = frozenset(
        (x, y) for x, y in cells if max(abs(x - c[0]), abs(y - c[1])) <= 1
    )
    full = c in step(Universe(cells)).live
    masked = c in step(Universe(nearby)).live
    assert full == masked


@given(cell_sets)
@settings(max_examples=100)
def test_engine_equivalence_fuzz(cells):
    assert step_fast(Universe(cells)).live == step(Universe(cells)).live


def test_engine_equivalence_examples():
    for cells in (frozenset(), frozenset({(0, 0)}), BLINKER_H):
        assert step_fast(Universe(cells)).live == step(Universe(cells)).live


def test_engine_equivalence_glider_cycle():
    u = Universe(GLIDER)
    for _ in range(4):
        u = step_fast(u)
    assert u.live == translate(GLIDER, 1, 1)


def test_engines_agree_on_soups(rng):
    for _ in range(5):
        cells = random_cells(rng, 20, 20, 0.4)
        a = b = Universe(cells)
        for _ in range(64):
            a, b = step(a), step_fast(b)
            assert a.live == b.live


def test_step_n_with_fast_engine():
    assert step_n(Universe(GLIDER), 8, engine=step_fast).live == translate(GLIDER, 2, 2)


def test_bounding_box():
    assert bounding_box(frozenset()) is None
    assert bounding_box({(2, -1), (-3, 4)}) == (-3, -1, 2, 4)
    assert Universe(frozenset()).bounding_box is None


def test_universe_coerces_iterables():
    u = Universe({(0, 0), (1, 1)})
    assert isinstance(u.live, frozenset)
    assert u.population == 2


def test_huge_coordinates_are_exact():
    far = 2**80
    cells = translate(BLINKER_H, far, -far)
    assert step(Universe(cells)).live == translate(BLINKER_V, far, -far)
    assert step_fast(Universe(cells)).live == translate(BLINKER_V, far, -far)
