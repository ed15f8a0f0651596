"""Pattern file formats and catalog/table persistence.

Supports the community's run-length-encoded pattern files and plaintext
``.cells`` files, plus a versioned JSON document for catalogs and collision
tables. Parsers reject malformed input with a positioned error rather than
guessing; emitters are canonical so equal values serialize to equal bytes.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .catalog import Catalog, CatalogEntry, CatalogParameters, Discovery
from .collide import (
    CensusEntry,
    CollisionOutcome,
    CollisionSpec,
    CollisionTable,
    TableParameters,
)
from .core import Coord, bounding_box, translate
from .errors import CatalogSchemaError, CatalogVersionError, ParseError
from .groups import MODE_TD8, canonicalize
from .orbits import Branching, Classification, Repeating, Terminating, Unresolved

CATALOG_VERSION = 1
TABLE_VERSION = 1

RLE_LINE_WIDTH = 70

_HEADER_RE = re.compile(
    r"^\s*x\s*=\s*(\d+)\s*,\s*y\s*=\s*(\d+)\s*(?:,\s*rule\s*=\s*(\S+)\s*)?$",
    re.IGNORECASE,
)
_ACCEPTED_RULES = {"b3/s23", "23/3"}


@dataclass(frozen=True)
class PatternFile:
    """A parsed pattern: comment lines, declared extent, and the cell set."""

    comments: tuple[str, ...]
    width: int
    height: int
    cells: frozenset[Coord]


def parse_rle(text: str) -> PatternFile:
    """Parse run-length-encoded pattern text.

    Grammar: optional ``#`` comment lines, a ``x = M, y = N[, rule = ...]``
    header, then a body of counted ``b``/``o``/``$`` tokens ended by ``!``.
    Only the B3/S23 rule (also written 23/3) is accepted. The declared box's
    top-left corner is cell (0, 0).
    """
    lines = text.splitlines()
    comments = []
    header = None
    body_start = 0
    for i, line in enumerate(lines):
        if line.startswith("#"):
            comments.append(line[1:])
            continue
        if not line.strip():
            continue
        m = _HEADER_RE.match(line)
        if m is None:
            raise ParseError("malformed header (expected 'x = M, y = N')", i + 1, 1)
        header = m
        body_start = i + 1
        break
    if header is None:
        raise ParseError("missing header line", len(lines) + 1, 1)
    width, height = int(header.group(1)), int(header.group(2))
    rule = header.group(3)
    if rule is not None and rule.lower() not in _ACCEPTED_RULES:
        raise ParseError(
            f"unsupported rule {rule!r} (only B3/S23 is accepted)",
            body_start,
            header.start(3) + 1,
        )
    cells, _ = _scan_rle_body(lines, body_start, extent=(width, height))
    return PatternFile(tuple(comments), width, height, frozenset(cells))


def _scan_rle_body(
    lines: list[str],
    start: int,
    extent: tuple[int, int] | None,
) -> tuple[set[Coord], tuple[int, int]]:
    """Token scan of RLE body lines; returns cells and the end position."""
    cells: set[Coord] = set()
    x = y = 0
    count: int | None = None
    count_col = 0
    for li in range(start, len(lines)):
        line = lines[li]
        for ci, ch in enumerate(line):
            if ch.isdigit():
                if count is None:
                    count = 0
                    count_col = ci
                count = count * 10 + int(ch)
                continue
            if ch in " \t":
                if count is not None:
                    raise ParseError("run count is not followed by a token", li + 1, ci + 1)
                continue
            if ch not in "bo$!":
                raise ParseError(f"unexpected character {ch!r}", li + 1, ci + 1)
            n = 1 if count is None else count
            if n < 1:
                raise ParseError("run count must be >= 1", li + 1, count_col + 1)
            count = None
            if ch == "b":
                x += n
            elif ch == "o":
                if extent is not None and (y >= extent[1] or x + n > extent[0]):
                    raise ParseError(
                        "live cells extend past the declared extent", li + 1, ci + 1
                    )
                for k in range(n):
                    cells.add((x + k, y))
                x += n
            elif ch == "$":
                y += n
                x = 0
            else:  # '!'
                return cells, (li + 1, ci + 1)
        if count is not None:
            raise ParseError("run count split across lines", li + 1, len(line) + 1)
    raise ParseError("missing '!' terminator", len(lines) + 1, 1)


def parse_rle_body(body: str) -> frozenset[Coord]:
    """Parse a bare RLE body (no header), as stored in catalog files."""
    cells, _ = _scan_rle_body(body.splitlines() or [""], 0, extent=None)
    return frozenset(cells)


def _rle_tokens(cells: frozenset[Coord]) -> list[str]:
    def tok(n: int, ch: str) -> str:
        return ch if n == 1 else f"{n}{ch}"

    rows: dict[int, list[int]] = {}
    for cx, cy in cells:
        rows.setdefault(cy, []).append(cx)
    tokens = []
    prev_y = 0
    for yy in sorted(rows):
        if yy > prev_y:
            tokens.append(tok(yy - prev_y, "$"))
        xs = sorted(rows[yy])
        x = 0
        i = 0
        while i < len(xs):
            run = 1
            while i + run < len(xs) and xs[i + run] == xs[i] + run:
                run += 1
            if xs[i] > x:
                tokens.append(tok(xs[i] - x, "b"))
            tokens.append(tok(run, "o"))
            x = xs[i] + run
            i += run
        prev_y = yy
    tokens.append("!")
    return tokens


def emit_rle_body(cells: frozenset[Coord]) -> str:
    """Canonical headerless RLE of a cell set translated to the origin."""
    if not cells:
        return "!"
    x0, y0, _, _ = bounding_box(cells)
    return "".join(_rle_tokens(translate(cells, -x0, -y0)))


def emit_rle(cells: frozenset[Coord]) -> str:
    """Canonical RLE document: header plus body wrapped at 70 characters.

    The minimum corner is translated to (0, 0); equal cell sets (modulo
    translation) produce byte-equal output.
    """
    if not cells:
        return "x = 0, y = 0\n!"
    x0, y0, x1, y1 = bounding_box(cells)
    header = f"x = {x1 - x0 + 1}, y = {y1 - y0 + 1}"
    body_lines = []
    line = ""
    for token in _rle_tokens(translate(cells, -x0, -y0)):
        if len(line) + len(token) > RLE_LINE_WIDTH:
            body_lines.append(line)
            line = ""
        line += token
    body_lines.append(line)
    return "\n".join([header, *body_lines])


def parse_plaintext(text: str) -> PatternFile:
    """Parse a plaintext pattern: ``!`` comment lines, ``.`` dead, ``O`` alive."""
    comments = []
    cells = set()
    y = 0
    width = 0
    for li, line in enumerate(text.splitlines()):
        if line.startswith("!"):
            comments.append(line[1:])
            continue
        for ci, ch in enumerate(line):
            if ch == "O":
                cells.add((ci, y))
            elif ch != ".":
                raise ParseError(f"unexpected character {ch!r}", li + 1, ci + 1)
        width = max(width, len(line))
        y += 1
    return PatternFile(tuple(comments), width, y, frozenset(cells))


def emit_plaintext(cells: frozenset[Coord]) -> str:
    """Canonical plaintext: full-width rows of ``.``/``O``, origin-normalized."""
    if not cells:
        return ""
    x0, y0, x1, y1 = bounding_box(cells)
    grid = translate(cells, -x0, -y0)
    w = x1 - x0 + 1
    return "\n".join(
        "".join("O" if (x, y) in grid else "." for x in range(w))
        for y in range(y1 - y0 + 1)
    )


# --------------------------------------------------------------------------
# catalog persistence


def _fraction_str(f: Fraction) -> str:
    return str(f)


def _classification_to_json(c: Classification) -> dict[str, Any]:
    if isinstance(c, Terminating):
        return {"kind": "terminating", "length": c.length}
    if isinstance(c, Repeating):
        return {
            "kind": "repeating",
            "transient": c.transient,
            "period": c.period,
            "displacement": list(c.displacement),
        }
    if isinstance(c, Branching):
        return {
            "kind": "branching",
            "at": c.at,
            "offspring": [
                {"id": k.digest, "cells": emit_rle_body(k.cells)} for k in c.offspring
            ],
        }
    if isinstance(c, Unresolved):
        return {"kind": "unresolved", "budget": c.budget}
    raise TypeError(f"unknown classification {type(c).__name__}")


def _entry_to_json(e: CatalogEntry) -> dict[str, Any]:
    return {
        "id": e.id.digest,
        "cells": emit_rle_body(e.cells),
        "population": e.population,
        "classification": _classification_to_json(e.classification),
        "velocity": None if e.velocity is None else [str(e.velocity[0]), str(e.velocity[1])],
        "discovered_from": None
        if e.discovered_from is None
        else {"parent": e.discovered_from.parent, "generation": e.discovered_from.generation},
    }


def dumps_catalog(c: Catalog) -> str:
    doc = {
        "version": CATALOG_VERSION,
        "parameters": {
            "max_cells": c.parameters.max_cells,
            "budget": c.parameters.budget,
            "closure": c.parameters.closure,
            "entry_cap": c.parameters.entry_cap,
        },
        "complete": c.complete,
        "entries": [_entry_to_json(e) for e in c.entries],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def save_catalog(c: Catalog, sink) -> None:
    """Write a catalog as deterministic JSON to a path or file object."""
    _write_text(sink, dumps_catalog(c))


class _Schema:
    """Tiny checked-access helper so schema errors carry a field path."""

    @staticmethod
    def get(obj: dict, key: str, kind, where: str):
        if not isinstance(obj, dict) or key not in obj:
            raise CatalogSchemaError(f"missing field {key!r} in {where}")
        val = obj[key]
        if kind is int and isinstance(val, bool):
            raise CatalogSchemaError(f"field {key!r} in {where} must be {kind.__name__}")
        if not isinstance(val, kind):
            raise CatalogSchemaError(f"field {key!r} in {where} must be {kind.__name__}")
        return val


def _key_from_cells_json(body: Any, declared_id: Any, where: str):
    if not isinstance(body, str):
        raise CatalogSchemaError(f"field 'cells' in {where} must be a string")
    try:
        cells = parse_rle_body(body)
    except ParseError as err:
        raise CatalogSchemaError(f"bad cells in {where}: {err}") from err
    if not cells:
        raise CatalogSchemaError(f"empty cell set in {where}")
    key = canonicalize(cells, MODE_TD8)
    if key.digest != declared_id:
        raise CatalogSchemaError(f"id does not match cells in {where}")
    return key


def _classification_from_json(obj: Any, where: str) -> Classification:
    kind = _Schema.get(obj, "kind", str, where)
    if kind == "terminating":
        return Terminating(_Schema.get(obj, "length", int, where))
    if kind == "repeating":
        disp = _Schema.get(obj, "displacement", list, where)
        if len(disp) != 2 or not all(isinstance(v, int) for v in disp):
            raise CatalogSchemaError(f"bad displacement in {where}")
        return Repeating(
            _Schema.get(obj, "transient", int, where),
            _Schema.get(obj, "period", int, where),
            (disp[0], disp[1]),
        )
    if kind == "branching":
        offspring = _Schema.get(obj, "offspring", list, where)
        keys = []
        for i, o in enumerate(offspring):
            keys.append(
                _key_from_cells_json(
                    _Schema.get(o, "cells", str, f"{where}.offspring[{i}]"),
                    _Schema.get(o, "id", str, f"{where}.offspring[{i}]"),
                    f"{where}.offspring[{i}]",
                )
            )
        return Branching(_Schema.get(obj, "at", int, where), tuple(keys))
    if kind == "unresolved":
        return Unresolved(_Schema.get(obj, "budget", int, where))
    raise CatalogSchemaError(f"unknown classification kind {kind!r} in {where}")


def _velocity_from_json(obj: Any, classification: Classification, where: str):
    if obj is None:
        if isinstance(classification, Repeating):
            raise CatalogSchemaError(f"repeating entry lacks velocity in {where}")
        return None
    if not isinstance(classification, Repeating):
        raise CatalogSchemaError(f"velocity on a non-repeating entry in {where}")
    if not isinstance(obj, list) or len(obj) != 2:
        raise CatalogSchemaError(f"bad velocity in {where}")
    try:
        vx, vy = Fraction(obj[0]), Fraction(obj[1])
    except (ValueError, ZeroDivisionError, TypeError) as err:
        raise CatalogSchemaError(f"bad velocity in {where}: {err}") from err
    expected = (
        Fraction(classification.displacement[0], classification.period),
        Fraction(classification.displacement[1], classification.period),
    )
    if (vx, vy) != expected:
        raise CatalogSchemaError(f"velocity does not match displacement/period in {where}")
    return vx, vy


def _entry_from_json(obj: Any, index: int) -> CatalogEntry:
    where = f"entries[{index}]"
    key = _key_from_cells_json(
        _Schema.get(obj, "cells", str, where), _Schema.get(obj, "id", str, where), where
    )
    population = _Schema.get(obj, "population", int, where)
    if population != len(key.cells):
        raise CatalogSchemaError(f"population does not match cells in {where}")
    classification = _classification_from_json(
        _Schema.get(obj, "classification", dict, where), f"{where}.classification"
    )
    velocity = _velocity_from_json(obj.get("velocity"), classification, where)
    raw_disc = obj.get("discovered_from")
    discovered = None
    if raw_disc is not None:
        discovered = Discovery(
            _Schema.get(raw_disc, "parent", str, f"{where}.discovered_from"),
            _Schema.get(raw_disc, "generation", int, f"{where}.discovered_from"),
        )
    return CatalogEntry(key, population, classification, velocity, discovered)


def loads_catalog(text: str) -> Catalog:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise CatalogSchemaError(f"not valid JSON: {err}") from err
    if not isinstance(doc, dict) or "version" not in doc:
        raise CatalogSchemaError("document has no version field")
    if doc["version"] != CATALOG_VERSION:
        raise CatalogVersionError(
            f"unsupported catalog version {doc['version']!r} (expected {CATALOG_VERSION})"
        )
    params = _Schema.get(doc, "parameters", dict, "document")
    parameters = CatalogParameters(
        max_cells=_Schema.get(params, "max_cells", int, "parameters"),
        budget=_Schema.get(params, "budget", int, "parameters"),
        closure=_Schema.get(params, "closure", bool, "parameters"),
        entry_cap=_Schema.get(params, "entry_cap", int, "parameters"),
    )
    complete = _Schema.get(doc, "complete", bool, "document")
    raw_entries = _Schema.get(doc, "entries", list, "document")
    entries = tuple(_entry_from_json(e, i) for i, e in enumerate(raw_entries))
    order = [(e.population, e.id.digest) for e in entries]
    if order != sorted(order):
        raise CatalogSchemaError("entries are not in (population, id) order")
    if len({e.id.digest for e in entries}) != len(entries):
        raise CatalogSchemaError("duplicate entry ids")
    return Catalog(entries, parameters, complete)


def load_catalog(source) -> Catalog:
    """Read a catalog from a path or file object; rejects unknown versions."""
    return loads_catalog(_read_text(source))


# --------------------------------------------------------------------------
# collision table persistence


def _census_to_json(e: CensusEntry) -> dict[str, Any]:
    # velocity is the group's own heading, which an identity lookup cannot
    # recover (a mirrored spaceship shares its entry but not its direction)
    return {
        "id": e.key.digest,
        "anchor": list(e.anchor),
        "phase": e.phase,
        "velocity": [str(e.velocity[0]), str(e.velocity[1])],
    }


def _outcome_to_json(o: CollisionOutcome) -> dict[str, Any]:
    return {
        "spec": {
            "a": o.spec.a,
            "b": o.spec.b,
            "offset": list(o.spec.offset),
            "phase_a": o.spec.phase_a,
            "phase_b": o.spec.phase_b,
            "horizon": o.spec.horizon,
        },
        "onset": o.onset,
        "status": o.status,
        "census": [_census_to_json(c) for c in o.census],
        "escaping": [_census_to_json(c) for c in o.escaping],
        "diagnostics": o.diagnostics,
    }


def dumps_table(t: CollisionTable) -> str:
    doc = {
        "version": TABLE_VERSION,
        "parameters": {
            "a": t.parameters.a,
            "b": t.parameters.b,
            "window": t.parameters.window,
            "horizon": t.parameters.horizon,
        },
        "outcomes": [_outcome_to_json(o) for o in t.outcomes],
        "novel_entries": [_entry_to_json(e) for e in t.novel_entries],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def save_table(t: CollisionTable, sink) -> None:
    """Write a collision table as deterministic JSON."""
    _write_text(sink, dumps_table(t))


def _census_from_json(obj: Any, resolve, where: str) -> CensusEntry:
    digest = _Schema.get(obj, "id", str, where)
    entry = resolve(digest)
    if entry is None:
        raise CatalogSchemaError(f"census id {digest!r} not resolvable in {where}")
    anc = _Schema.get(obj, "anchor", list, where)
    if len(anc) != 2 or not all(isinstance(v, int) for v in anc):
        raise CatalogSchemaError(f"bad anchor in {where}")
    c = entry.classification
    if not isinstance(c, Repeating):
        raise CatalogSchemaError(f"census id {digest!r} is not a repeating entry in {where}")
    vel = _Schema.get(obj, "velocity", list, where)
    if len(vel) != 2:
        raise CatalogSchemaError(f"bad velocity in {where}")
    try:
        velocity = (Fraction(vel[0]), Fraction(vel[1]))
    except (ValueError, ZeroDivisionError, TypeError) as err:
        raise CatalogSchemaError(f"bad velocity in {where}: {err}") from err
    return CensusEntry(
        entry.id, (anc[0], anc[1]), _Schema.get(obj, "phase", int, where), velocity
    )


def loads_table(text: str, catalog: Catalog | None = None) -> CollisionTable:
    """Parse a collision table; census ids resolve against the table's own
    novel entries plus the optionally supplied catalog."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise CatalogSchemaError(f"not valid JSON: {err}") from err
    if not isinstance(doc, dict) or "version" not in doc:
        raise CatalogSchemaError("document has no version field")
    if doc["version"] != TABLE_VERSION:
        raise CatalogVersionError(
            f"unsupported table version {doc['version']!r} (expected {TABLE_VERSION})"
        )
    params = _Schema.get(doc, "parameters", dict, "document")
    parameters = TableParameters(
        a=_Schema.get(params, "a", str, "parameters"),
        b=_Schema.get(params, "b", str, "parameters"),
        window=_Schema.get(params, "window", int, "parameters"),
        horizon=_Schema.get(params, "horizon", int, "parameters"),
    )
    novel = tuple(
        _entry_from_json(e, i)
        for i, e in enumerate(_Schema.get(doc, "novel_entries", list, "document"))
    )
    by_id = {e.id.digest: e for e in novel}
    if catalog is not None:
        for e in catalog.entries:
            by_id.setdefault(e.id.digest, e)

    outcomes = []
    for i, raw in enumerate(_Schema.get(doc, "outcomes", list, "document")):
        where = f"outcomes[{i}]"
        raw_spec = _Schema.get(raw, "spec", dict, where)
        offset = _Schema.get(raw_spec, "offset", list, f"{where}.spec")
        if len(offset) != 2 or not all(isinstance(v, int) for v in offset):
            raise CatalogSchemaError(f"bad offset in {where}.spec")
        spec = CollisionSpec(
            a=_Schema.get(raw_spec, "a", str, f"{where}.spec"),
            b=_Schema.get(raw_spec, "b", str, f"{where}.spec"),
            offset=(offset[0], offset[1]),
            phase_a=_Schema.get(raw_spec, "phase_a", int, f"{where}.spec"),
            phase_b=_Schema.get(raw_spec, "phase_b", int, f"{where}.spec"),
            horizon=_Schema.get(raw_spec, "horizon", int, f"{where}.spec"),
        )
        onset = raw.get("onset")
        if onset is not None and not isinstance(onset, int):
            raise CatalogSchemaError(f"bad onset in {where}")
        status = _Schema.get(raw, "status", str, where)
        census = tuple(
            _census_from_json(c, by_id.get, f"{where}.census[{j}]")
            for j, c in enumerate(_Schema.get(raw, "census", list, where))
        )
        escaping = tuple(
            _census_from_json(c, by_id.get, f"{where}.escaping[{j}]")
            for j, c in enumerate(_Schema.get(raw, "escaping", list, where))
        )
        diagnostics = raw.get("diagnostics")
        if diagnostics is not None and not isinstance(diagnostics, str):
            raise CatalogSchemaError(f"bad diagnostics in {where}")
        outcomes.append(
            CollisionOutcome(spec, onset, status, census, escaping, diagnostics)
        )
    return CollisionTable(parameters, tuple(outcomes), novel)


def load_table(source, catalog: Catalog | None = None) -> CollisionTable:
    return loads_table(_read_text(source), catalog)


# --------------------------------------------------------------------------
# io plumbing


def _write_text(sink, text: str) -> None:
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        with open(sink, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _read_text(source) -> str:
    if hasattr(source, "read"):
        return source.read()
    with open(source, "r", encoding="utf-8") as fh:
        return fh.read()
