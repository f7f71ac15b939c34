"""Arity levels, filter predicates, and cumulative/accumulative view composition.

Level_i holds the hyperedges connecting exactly i topics. Filters never
remove an edge from a view: edges failing a predicate are greyed out,
edges passing all present predicates are selected. An accumulative view
shows a single level; a cumulative view shows every level up to and
including the chosen one.
"""

from __future__ import annotations

import json
import urllib.parse
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .errors import FilterError
from .hypergraph import Hyperedge, Tdm

MODES = ("cumulative", "accumulative")
TOPIC_MODES = ("any", "all")
EXTREMA = ("level-min", "level-max")

SELECTED = "selected"
GREYED = "greyed"


@dataclass(frozen=True)
class FilterSpec:
    """Filter parameters for one view; every predicate is optional.

    Bounds are inclusive. ``achv_extremum``/``cov_extremum`` select the
    per-level extreme value instead of a range (ties all selected) and are
    mutually exclusive with the corresponding bounds. ``level=None`` means
    the deepest level.
    """

    topics: frozenset[str] | None = None
    topic_mode: str = "any"
    achv_min: Fraction | None = None
    achv_max: Fraction | None = None
    achv_extremum: str | None = None
    cov_min: int | None = None
    cov_max: int | None = None
    cov_extremum: str | None = None
    mode: str = "cumulative"
    level: int | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise FilterError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.topic_mode not in TOPIC_MODES:
            raise FilterError(
                f"topic_mode must be one of {TOPIC_MODES}, got {self.topic_mode!r}"
            )
        if self.topics is not None and not self.topics:
            raise FilterError("topic filter must name at least one topic")
        if self.topics is None and self.topic_mode != "any":
            raise FilterError("topic_mode requires a topic filter")
        for name, value in (("achv", self.achv_extremum), ("cov", self.cov_extremum)):
            if value is not None and value not in EXTREMA:
                raise FilterError(f"{name}_extremum must be one of {EXTREMA}")
        if self.achv_extremum and (self.achv_min is not None or self.achv_max is not None):
            raise FilterError("achievement bounds and extremum are mutually exclusive")
        if self.cov_extremum and (self.cov_min is not None or self.cov_max is not None):
            raise FilterError("coverage bounds and extremum are mutually exclusive")
        for name, value in (("achv_min", self.achv_min), ("achv_max", self.achv_max)):
            if value is not None and not 0 <= value <= 1:
                raise FilterError(f"{name} must lie in [0, 1], got {value}")
        for name, value in (("cov_min", self.cov_min), ("cov_max", self.cov_max)):
            if value is not None and value < 0:
                raise FilterError(f"{name} must be non-negative, got {value}")
        if (
            self.achv_min is not None
            and self.achv_max is not None
            and self.achv_min > self.achv_max
        ):
            raise FilterError("achv_min exceeds achv_max")
        if (
            self.cov_min is not None
            and self.cov_max is not None
            and self.cov_min > self.cov_max
        ):
            raise FilterError("cov_min exceeds cov_max")
        if self.level is not None and self.level < 1:
            raise FilterError(f"level must be >= 1, got {self.level}")


@dataclass(frozen=True)
class LevelPartition:
    """Edges grouped by arity; ``levels[i-1]`` is Level_i, empties explicit."""

    levels: tuple[tuple[Hyperedge, ...], ...]

    @property
    def depth(self) -> int:
        return len(self.levels)

    def level(self, index: int) -> tuple[Hyperedge, ...]:
        if not 1 <= index <= self.depth:
            raise FilterError(f"level {index} out of range 1..{self.depth}")
        return self.levels[index - 1]


@dataclass(frozen=True)
class LegendRanges:
    """Min/max weights among the view's visible edges (selected or greyed)."""

    cov_min: int
    cov_max: int
    achv_min: Fraction
    achv_max: Fraction


@dataclass(frozen=True)
class ViewModel:
    """A composed view: visible edges with selected/greyed statuses."""

    spec: FilterSpec
    level: int
    depth: int
    visible_levels: tuple[int, ...]
    edges: tuple[Hyperedge, ...]
    statuses: dict[str, str] = field(compare=False)
    legend: LegendRanges | None

    @property
    def selected_edges(self) -> tuple[Hyperedge, ...]:
        return tuple(e for e in self.edges if self.statuses[e.edge_id] == SELECTED)

    @property
    def greyed_edges(self) -> tuple[Hyperedge, ...]:
        return tuple(e for e in self.edges if self.statuses[e.edge_id] == GREYED)


def partition_levels(tdm: Tdm) -> LevelPartition:
    """Split the edge set by arity into levels 1..|V|, keeping canonical order."""
    buckets: list[list[Hyperedge]] = [[] for _ in range(tdm.depth)]
    for edge in tdm.hyperedges:
        buckets[edge.arity - 1].append(edge)
    return LevelPartition(tuple(tuple(b) for b in buckets))


def _passes_topics(edge: Hyperedge, spec: FilterSpec) -> bool:
    if spec.topics is None:
        return True
    if spec.topic_mode == "any":
        return bool(edge.topic_set & spec.topics)
    return spec.topics <= edge.topic_set


def _bound_predicate(candidates, spec: FilterSpec, weight, extremum, lo, hi):
    """Build the per-level pass predicate for one weight quantity.

    Extrema are taken over the topic-passing candidates of this level, with
    every tied edge passing.
    """
    if extremum is not None:
        if not candidates:
            return lambda edge: False
        values = [weight(e) for e in candidates]
        target = max(values) if extremum == "level-max" else min(values)
        return lambda edge: weight(edge) == target
    return lambda edge: (lo is None or weight(edge) >= lo) and (
        hi is None or weight(edge) <= hi
    )


def filter_level(
    level_edges: tuple[Hyperedge, ...], spec: FilterSpec
) -> tuple[tuple[Hyperedge, ...], tuple[Hyperedge, ...]]:
    """Split one level into (selected, greyed); nothing is ever dropped."""
    candidates = [e for e in level_edges if _passes_topics(e, spec)]
    achv_ok = _bound_predicate(
        candidates,
        spec,
        lambda e: e.achievement,
        spec.achv_extremum,
        spec.achv_min,
        spec.achv_max,
    )
    cov_ok = _bound_predicate(
        candidates,
        spec,
        lambda e: e.coverage,
        spec.cov_extremum,
        spec.cov_min,
        spec.cov_max,
    )
    selected = tuple(e for e in candidates if achv_ok(e) and cov_ok(e))
    selected_ids = {e.edge_id for e in selected}
    greyed = tuple(e for e in level_edges if e.edge_id not in selected_ids)
    return selected, greyed


def effective_level(spec: FilterSpec, depth: int) -> int:
    """Resolve ``level=None`` to the deepest level; validate the range."""
    if spec.level is None:
        return depth
    if spec.level > depth:
        raise FilterError(f"level {spec.level} out of range 1..{depth}")
    return spec.level


def compose_view(partition: LevelPartition, spec: FilterSpec) -> ViewModel:
    """Apply the filter level-by-level and compose per the view mode."""
    depth = partition.depth
    if depth == 0:
        if spec.level is not None:
            raise FilterError("level filter on an empty model")
        return ViewModel(spec, 0, 0, (), (), {}, None)
    level = effective_level(spec, depth)
    if spec.mode == "accumulative":
        visible = (level,)
    else:
        visible = tuple(range(1, level + 1))

    statuses: dict[str, str] = {}
    edges: list[Hyperedge] = []
    for index in visible:
        selected, greyed = filter_level(partition.level(index), spec)
        for edge in selected:
            statuses[edge.edge_id] = SELECTED
        for edge in greyed:
            statuses[edge.edge_id] = GREYED
        edges.extend(partition.level(index))

    legend = None
    if edges:
        legend = LegendRanges(
            cov_min=min(e.coverage for e in edges),
            cov_max=max(e.coverage for e in edges),
            achv_min=min(e.achievement for e in edges),
            achv_max=max(e.achievement for e in edges),
        )
    return ViewModel(spec, level, depth, visible, tuple(edges), statuses, legend)


def accumulative_at(spec: FilterSpec, level: int) -> FilterSpec:
    """The same predicates, pinned to a single level (used for strip panels)."""
    return replace(spec, mode="accumulative", level=level)


# --- URL query codec ------------------------------------------------------
#
# Key names are part of the wire contract shared with the HTTP service and
# the browser client:
#   topics=T1,T4&topic_mode=any&achv_min=0&achv_max=0.6&cov_min=1&level=3
#   &mode=cumulative (+ achv_extremum / cov_extremum / cov_max)


def fraction_to_param(value: Fraction) -> str:
    """Exact text form: terminating decimals as decimals, otherwise num/den."""
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{value.numerator}/{value.denominator}"
    places = max(twos, fives)
    scaled = value.numerator * 10**places // value.denominator
    text = str(scaled).rjust(places + 1, "0")
    if places:
        text = (text[:-places] + "." + text[-places:]).rstrip("0").rstrip(".")
    return text or "0"


def fraction_from_param(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise FilterError(f"not a number: {text!r}") from None

_SPEC_KEYS = (
    "topics",
    "topic_mode",
    "achv_min",
    "achv_max",
    "achv_extremum",
    "cov_min",
    "cov_max",
    "cov_extremum",
    "level",
    "mode",
)


def spec_to_params(spec: FilterSpec) -> dict[str, str]:
    """Encode as query parameters, in fixed key order, omitting unset fields."""
    params: dict[str, str] = {}
    if spec.topics is not None:
        params["topics"] = ",".join(sorted(spec.topics))
        params["topic_mode"] = spec.topic_mode
    if spec.achv_min is not None:
        params["achv_min"] = fraction_to_param(spec.achv_min)
    if spec.achv_max is not None:
        params["achv_max"] = fraction_to_param(spec.achv_max)
    if spec.achv_extremum is not None:
        params["achv_extremum"] = spec.achv_extremum
    if spec.cov_min is not None:
        params["cov_min"] = str(spec.cov_min)
    if spec.cov_max is not None:
        params["cov_max"] = str(spec.cov_max)
    if spec.cov_extremum is not None:
        params["cov_extremum"] = spec.cov_extremum
    if spec.level is not None:
        params["level"] = str(spec.level)
    params["mode"] = spec.mode
    return params


def spec_to_query(spec: FilterSpec) -> str:
    return urllib.parse.urlencode(spec_to_params(spec))


def spec_from_params(params: dict[str, str]) -> FilterSpec:
    """Decode query parameters; unknown keys and bad values raise FilterError."""
    unknown = set(params) - set(_SPEC_KEYS)
    if unknown:
        raise FilterError(f"unknown filter parameter(s): {', '.join(sorted(unknown))}")
    kwargs: dict[str, object] = {}
    if "topics" in params:
        labels = [t for t in params["topics"].split(",") if t]
        kwargs["topics"] = frozenset(labels)
    if "topic_mode" in params:
        if "topics" not in params:
            raise FilterError("topic_mode given without topics")
        kwargs["topic_mode"] = params["topic_mode"]
    for key in ("achv_min", "achv_max"):
        if key in params:
            kwargs[key] = fraction_from_param(params[key])
    for key in ("cov_min", "cov_max", "level"):
        if key in params:
            try:
                kwargs[key] = int(params[key])
            except ValueError:
                raise FilterError(f"{key} must be an integer, got {params[key]!r}") from None
    for key in ("achv_extremum", "cov_extremum"):
        if key in params:
            kwargs[key] = params[key]
    if "mode" in params:
        kwargs["mode"] = params["mode"]
    return FilterSpec(**kwargs)  # type: ignore[arg-type]


def spec_from_query(query: str) -> FilterSpec:
    pairs = urllib.parse.parse_qsl(query, keep_blank_values=True)
    params: dict[str, str] = {}
    for key, value in pairs:
        if key in params:
            raise FilterError(f"duplicate filter parameter {key!r}")
        params[key] = value
    return spec_from_params(params)


# --- Machine-readable view report ----------------------------------------


def _legend_payload(legend: LegendRanges | None):
    if legend is None:
        return None
    return {
        "coverage_min": legend.cov_min,
        "coverage_max": legend.cov_max,
        "achievement_min": [legend.achv_min.numerator, legend.achv_min.denominator],
        "achievement_max": [legend.achv_max.numerator, legend.achv_max.denominator],
    }


def view_report(
    partition: LevelPartition, spec: FilterSpec, strip: bool = False
) -> dict:
    """Selection report: per-level selected/greyed edge ids plus edge detail.

    For cumulative views (and for level strips, whose panels are the
    per-level accumulative views) the report covers levels 1..k; for a
    plain accumulative view it covers the single visible level.
    """
    view = compose_view(partition, spec)
    if strip or spec.mode == "cumulative":
        listed = tuple(range(1, view.level + 1)) if view.depth else ()
    else:
        listed = view.visible_levels

    levels_payload = []
    statuses: dict[str, str] = {}
    detail = []
    for index in listed:
        selected, greyed = filter_level(partition.level(index), spec)
        levels_payload.append(
            {
                "level": index,
                "selected": [e.edge_id for e in selected],
                "greyed": [e.edge_id for e in greyed],
            }
        )
        for edge in partition.level(index):
            status = SELECTED if edge in selected else GREYED
            statuses[edge.edge_id] = status
            detail.append(
                {
                    "id": edge.edge_id,
                    "topics": list(edge.topics),
                    "level": edge.arity,
                    "coverage": edge.coverage,
                    "achievement_num": edge.achievement.numerator,
                    "achievement_den": edge.achievement.denominator,
                    "achievement_display": edge.achievement_display(),
                    "status": status,
                }
            )

    listed_edges = [e for i in listed for e in partition.level(i)]
    legend = None
    if listed_edges:
        legend = LegendRanges(
            min(e.coverage for e in listed_edges),
            max(e.coverage for e in listed_edges),
            min(e.achievement for e in listed_edges),
            max(e.achievement for e in listed_edges),
        )
    return {
        "filter": spec_to_params(spec),
        "mode": spec.mode,
        "level": view.level,
        "depth": view.depth,
        "levels": levels_payload,
        "statuses": statuses,
        "edges": detail,
        "legend": _legend_payload(legend),
    }


def view_report_json(
    partition: LevelPartition, spec: FilterSpec, strip: bool = False
) -> str:
    return json.dumps(view_report(partition, spec, strip=strip), indent=2) + "\n"
