"""Command-line front end.

Five subcommands: run (simulate a pattern file), classify (orbit-classify
each group in a file), enumerate (build a catalog), collide (sweep a
pairwise collision table), info (inspect a catalog entry).

Exit codes: 0 success, 2 usage or input errors, 3 resource limits and
partial results. Human-readable output goes to stdout, diagnostics to
stderr. A config file (``lcg-engine.toml`` in the working directory, or the
path in ``$LCG_ENGINE_CONFIG``) may set the keys ``budget``,
``population_limit``, and ``entry_cap``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ImportError:  # Python 3.10
    import tomli as tomllib

from . import formats
from .catalog import (
    DEFAULT_ENTRY_CAP,
    Catalog,
    CatalogParameters,
    build_catalog,
    entry_from_cells,
)
from .collide import collision_table
from .core import DEFAULT_POPULATION_LIMIT, Universe, step, step_fast, step_n
from .errors import (
    CatalogSchemaError,
    CatalogVersionError,
    EngineError,
    InvalidSpecError,
    ParseError,
    PopulationLimitError,
)
from .groups import partition, sorted_groups
from .orbits import (
    DEFAULT_BUDGET,
    MODE_STRICT,
    MODE_T,
    Branching,
    Repeating,
    Terminating,
    classify,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RESOURCE = 3

CONFIG_ENV = "LCG_ENGINE_CONFIG"
CONFIG_FILENAME = "lcg-engine.toml"
_CONFIG_KEYS = {"budget", "population_limit", "entry_cap"}

ENGINES = {"naive": step, "fast": step_fast}


@dataclass
class Config:
    budget: int = DEFAULT_BUDGET
    population_limit: int = DEFAULT_POPULATION_LIMIT
    entry_cap: int = DEFAULT_ENTRY_CAP


def load_config() -> Config:
    path = os.environ.get(CONFIG_ENV, CONFIG_FILENAME)
    cfg = Config()
    if not os.path.exists(path):
        return cfg
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    for key, value in doc.items():
        if key not in _CONFIG_KEYS:
            print(f"warning: ignoring unknown config key {key!r}", file=sys.stderr)
            continue
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise EngineError(f"config key {key!r} must be a positive integer")
        setattr(cfg, key, value)
    return cfg


def _sniff_format(path: str, override: str | None) -> str:
    if override:
        return override
    return "rle" if Path(path).suffix.lower() == ".rle" else "plaintext"


def read_pattern(path: str, fmt: str | None) -> formats.PatternFile:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except UnicodeDecodeError as err:
        raise ParseError(f"not valid UTF-8: {err.reason}", 1, 1) from err
    if _sniff_format(path, fmt) == "rle":
        return formats.parse_rle(text)
    return formats.parse_plaintext(text)


def _classification_fields(record) -> dict:
    c = record.classification
    if isinstance(c, Terminating):
        return {"kind": "terminating", "length": c.length}
    if isinstance(c, Repeating):
        return {
            "kind": "repeating",
            "transient": c.transient,
            "period": c.period,
            "displacement": list(c.displacement),
            "velocity": [str(record.velocity[0]), str(record.velocity[1])],
        }
    if isinstance(c, Branching):
        return {"kind": "branching", "at": c.at, "offspring": [k.digest for k in c.offspring]}
    return {"kind": "unresolved", "budget": c.budget}


def _classification_line(c, velocity) -> str:
    if isinstance(c, Terminating):
        return f"terminating length={c.length}"
    if isinstance(c, Repeating):
        vx, vy = velocity
        return (
            f"repeating transient={c.transient} period={c.period} "
            f"displacement=({c.displacement[0]},{c.displacement[1]}) "
            f"velocity=({vx},{vy})"
        )
    if isinstance(c, Branching):
        return f"branching at={c.at} offspring={len(c.offspring)}"
    return f"unresolved budget={c.budget}"


# --------------------------------------------------------------------------
# subcommands


def cmd_run(args: argparse.Namespace, cfg: Config) -> int:
    pattern = read_pattern(args.file, args.format)
    engine = ENGINES[args.engine]
    u = step_n(
        Universe(pattern.cells), args.steps, engine=engine, limit=cfg.population_limit
    )
    print(f"generation: {u.generation}")
    print(f"population: {u.population}")
    box = u.bounding_box
    if box is None:
        print("bounding box: none")
    else:
        print(f"bounding box: ({box[0]}, {box[1]})..({box[2]}, {box[3]})")
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(formats.emit_rle(u.live) + "\n")
    return EXIT_OK


def cmd_classify(args: argparse.Namespace, cfg: Config) -> int:
    pattern = read_pattern(args.file, args.format)
    budget = args.budget if args.budget is not None else cfg.budget
    mode = MODE_STRICT if args.mode == "strict" else MODE_T
    groups = sorted_groups(partition(pattern.cells))
    records = [
        classify(g, budget, mode, limit=cfg.population_limit) for g in groups
    ]
    if args.json:
        payload = [
            {
                "population": g.population,
                "anchor": list(g.anchor),
                "classification": _classification_fields(r),
            }
            for g, r in zip(groups, records)
        ]
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for record in records:
            print(_classification_line(record.classification, record.velocity))
    return EXIT_OK


def cmd_enumerate(args: argparse.Namespace, cfg: Config) -> int:
    budget = args.budget if args.budget is not None else cfg.budget
    cat = build_catalog(
        args.cells,
        budget,
        args.closure,
        entry_cap=cfg.entry_cap,
        limit=cfg.population_limit,
    )
    formats.save_catalog(cat, args.out)
    counts = {"terminating": 0, "repeating": 0, "branching": 0, "unresolved": 0}
    for e in cat.entries:
        counts[type(e.classification).__name__.lower()] += 1
    print(f"entries: {len(cat.entries)}")
    for kind in ("terminating", "repeating", "branching", "unresolved"):
        print(f"{kind}: {counts[kind]}")
    print(f"complete: {str(cat.complete).lower()}")
    if not cat.complete:
        print("warning: entry cap reached; catalog flagged incomplete", file=sys.stderr)
        return EXIT_RESOURCE
    return EXIT_OK


def _resolve_collider(value: str, cat: Catalog, budget: int, limit: int):
    """A collision input is a pattern file path or a catalog id prefix."""
    if os.path.exists(value):
        pattern = read_pattern(value, None)
        entry = entry_from_cells(
            frozenset(pattern.cells), budget, limit=limit
        )
    else:
        try:
            entry = cat.find(value)
        except KeyError as err:
            raise InvalidSpecError(str(err)) from err
    if not isinstance(entry.classification, Repeating):
        raise InvalidSpecError(
            f"collision input {value!r} is not a repeating pattern "
            f"({type(entry.classification).__name__.lower()})"
        )
    return entry


def cmd_collide(args: argparse.Namespace, cfg: Config) -> int:
    if args.catalog:
        cat = formats.load_catalog(args.catalog)
    else:
        cat = Catalog(
            (), CatalogParameters(0, cfg.budget, False, cfg.entry_cap)
        )
    entry_a = _resolve_collider(args.a, cat, cfg.budget, cfg.population_limit)
    entry_b = _resolve_collider(args.b, cat, cfg.budget, cfg.population_limit)
    table = collision_table(
        entry_a,
        entry_b,
        args.window,
        args.horizon,
        cat,
        limit=cfg.population_limit,
        jobs=args.jobs,
    )
    formats.save_table(table, args.out)
    histogram: dict[tuple[str, str], int] = {}
    for outcome in table.outcomes:
        sig = "+".join(c.key.digest[:12] for c in outcome.census) or "-"
        key = (outcome.status, sig)
        histogram[key] = histogram.get(key, 0) + 1
    print(f"specs: {len(table.outcomes)}")
    for (status, sig), count in sorted(histogram.items()):
        print(f"{status} [{sig}]: {count}")
    return EXIT_OK


def cmd_info(args: argparse.Namespace, cfg: Config) -> int:
    cat = formats.load_catalog(args.catalog)
    try:
        entry = cat.find(args.id)
    except KeyError as err:
        print(f"error: {err.args[0]}", file=sys.stderr)
        return EXIT_USAGE
    print(f"id: {entry.id.digest}")
    print(f"population: {entry.population}")
    print(f"classification: {_classification_line(entry.classification, entry.velocity)}")
    if entry.discovered_from is not None:
        print(
            f"discovered from: {entry.discovered_from.parent} "
            f"at generation {entry.discovered_from.generation}"
        )
    print()
    print(formats.emit_rle(entry.cells))
    return EXIT_OK


# --------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lcg-engine",
        description="Game of Life pattern engine: simulate, classify, catalog, collide.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate a pattern file")
    p.add_argument("file")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--engine", choices=sorted(ENGINES), default="naive")
    p.add_argument("--format", choices=["rle", "plaintext"])
    p.add_argument("--out", help="write the final universe as RLE")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("classify", help="classify each group in a pattern file")
    p.add_argument("file")
    p.add_argument("--budget", type=int)
    p.add_argument("--mode", choices=["T", "strict"], default="T")
    p.add_argument("--json", action="store_true")
    p.add_argument("--format", choices=["rle", "plaintext"])
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("enumerate", help="build a pattern catalog")
    p.add_argument("--cells", type=int, required=True)
    p.add_argument("--budget", type=int)
    p.add_argument("--closure", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_enumerate)

    p = sub.add_parser("collide", help="sweep a pairwise collision table")
    p.add_argument("--a", required=True, help="catalog id prefix or pattern file")
    p.add_argument("--b", required=True, help="catalog id prefix or pattern file")
    p.add_argument("--window", type=int, required=True)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--catalog")
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int)
    p.set_defaults(fn=cmd_collide)

    p = sub.add_parser("info", help="inspect one catalog entry")
    p.add_argument("catalog")
    p.add_argument("id")
    p.set_defaults(fn=cmd_info)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = load_config()
        return args.fn(args, cfg)
    except ParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidSpecError, CatalogVersionError, CatalogSchemaError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except PopulationLimitError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_RESOURCE
    except EngineError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


def console_main() -> None:
    sys.exit(main())
