"""Game of Life pattern engine.

Partitions sparse unbounded-universe states into live cell groups,
classifies each group's isolated orbit, enumerates small patterns into a
catalog, and records pairwise collision outcomes.
"""

from .core import (
    DEFAULT_POPULATION_LIMIT,
    Coord,
    Universe,
    bounding_box,
    neighbors,
    step,
    step_fast,
    step_n,
    translate,
)
from .errors import (
    CatalogSchemaError,
    CatalogVersionError,
    EngineError,
    InvalidSpecError,
    ParseError,
    PopulationLimitError,
)
from .groups import (
    MODE_T,
    MODE_TD8,
    CanonicalKey,
    LiveCellGroup,
    canonicalize,
    lcg_successors,
    partition,
    single_group,
)
from .orbits import (
    DEFAULT_BUDGET,
    MODE_STRICT,
    Branching,
    OrbitRecord,
    Repeating,
    ReplayResult,
    Terminating,
    Unresolved,
    classify,
    cycle_identity,
    replay,
)
from .catalog import (
    Catalog,
    CatalogEntry,
    CatalogParameters,
    build_catalog,
    entry_from_cells,
    enumerate_seeds,
)
from .collide import (
    DEFAULT_SETTLE_BUDGET,
    CensusEntry,
    CollisionOutcome,
    CollisionSpec,
    CollisionTable,
    SettleResult,
    arrange,
    collide,
    collision_table,
    interaction_onset,
    settle,
)
from .formats import (
    PatternFile,
    emit_plaintext,
    emit_rle,
    load_catalog,
    load_table,
    parse_plaintext,
    parse_rle,
    save_catalog,
    save_table,
)

__version__ = "0.1.0"
