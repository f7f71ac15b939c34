"""Two-weighted topic hypergraphs from assessment data.

Pipeline: parse the response and tag CSVs, build the hypergraph (topics as
vertices, exact tag sets as hyperedges weighted by coverage and
achievement), partition it into arity levels, filter, and render
deterministic SVG views — from the command line or over HTTP.
"""

from .errors import (
    DataFormatError,
    FilterError,
    GenerationError,
    InvariantError,
    ModelError,
    TopicmeshError,
)
from .hypergraph import (
    Contributor,
    Hyperedge,
    Tdm,
    TopicVertex,
    build_model,
    build_tdm,
    tdm_from_json,
    tdm_to_json,
)
from .ingest import (
    IndexMaps,
    ResponseRecord,
    TagRecord,
    WorkingMatrices,
    build_index_maps,
    build_matrices,
    parse_qt,
    parse_sqa,
)
from .levels import (
    FilterSpec,
    LevelPartition,
    ViewModel,
    compose_view,
    filter_level,
    partition_levels,
    spec_from_query,
    spec_to_query,
)
from .render import LayoutConfig, emit_level_strip, emit_svg, render_view_svg

__version__ = "0.1.0"

__all__ = [
    "Contributor",
    "DataFormatError",
    "FilterError",
    "FilterSpec",
    "GenerationError",
    "Hyperedge",
    "IndexMaps",
    "InvariantError",
    "LayoutConfig",
    "LevelPartition",
    "ModelError",
    "ResponseRecord",
    "TagRecord",
    "Tdm",
    "TopicVertex",
    "TopicmeshError",
    "ViewModel",
    "WorkingMatrices",
    "build_index_maps",
    "build_matrices",
    "build_model",
    "build_tdm",
    "compose_view",
    "emit_level_strip",
    "emit_svg",
    "filter_level",
    "parse_qt",
    "parse_sqa",
    "partition_levels",
    "render_view_svg",
    "spec_from_query",
    "spec_to_query",
    "tdm_from_json",
    "tdm_to_json",
    "__version__",
]
