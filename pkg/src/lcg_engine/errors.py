"""Exception types shared across the engine."""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all errors raised by this package."""


class PopulationLimitError(EngineError):
    """A simulation step produced more live cells than the safety limit allows."""

    def __init__(self, population: int, limit: int):
        self.population = population
        self.limit = limit
        super().__init__(f"population {population} exceeds safety limit {limit}")


class InvalidSpecError(EngineError, ValueError):
    """A collision spec cannot be realized (overlapping or merged placement, bad phase, ...)."""


class ParseError(EngineError, ValueError):
    """A pattern file failed to parse. Carries the 1-based line/column of the offending input."""

    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class CatalogVersionError(EngineError):
    """A catalog or table document declares a schema version this build does not understand."""


class CatalogSchemaError(EngineError):
    """A catalog or table document is structurally invalid."""
