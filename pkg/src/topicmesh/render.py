"""Deterministic rendering: circular layout, hyperedge glyphs, SVG emission.

Visual encoding of the two edge weights: stroke/fill color follows the
achievement ramp (deep pink at 0, brown-pink at 0.5, dark green at 1) and
stroke width grows linearly with coverage, normalized over the edges
visible in the current view. Greyed (filtered-out) edges keep their width
but drop to a neutral grey at reduced opacity.

Rendering is a pure function of (model, view, config): identical inputs
produce byte-identical SVG. All coordinates are written with exactly three
decimal places.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from xml.sax.saxutils import escape, quoteattr

from .errors import FilterError, ModelError
from .hypergraph import Hyperedge, Tdm, format_achievement
from .levels import (
    GREYED,
    FilterSpec,
    LevelPartition,
    ViewModel,
    accumulative_at,
    compose_view,
    effective_level,
)

RAMP_LOW = (0xC2, 0x18, 0x5B)   # achievement 0: dark pink
RAMP_MID = (0xA1, 0x88, 0x7F)   # achievement 0.5: brown-pink
RAMP_HIGH = (0x1B, 0x5E, 0x20)  # achievement 1: dark green
GREY_COLOR = "#9E9E9E"
GREY_OPACITY = 0.4
HULL_FILL_OPACITY = 0.3


@dataclass(frozen=True)
class LayoutConfig:
    """Canvas and glyph sizing; every value in pixels."""

    width: float = 480.0
    height: float = 480.0
    vertex_radius: float = 14.0
    circle_margin: float = 72.0
    hull_margin: float = 26.0
    stroke_min: float = 2.0
    stroke_max: float = 10.0
    self_loop_offset: float = 16.0

    def __post_init__(self):
        for name in (
            "width",
            "height",
            "vertex_radius",
            "circle_margin",
            "hull_margin",
            "stroke_min",
            "stroke_max",
            "self_loop_offset",
        ):
            if getattr(self, name) <= 0:
                raise ModelError(f"layout config: {name} must be positive")
        if self.stroke_min >= self.stroke_max:
            raise ModelError("layout config: stroke_min must be below stroke_max")


@dataclass(frozen=True)
class VertexGlyph:
    index: int
    label: str
    x: float
    y: float
    radius: float
    label_x: float
    label_y: float
    label_anchor: str


@dataclass(frozen=True)
class EdgeGlyph:
    """One drawable hyperedge; ``kind`` decides how ``params``/``path`` read.

    loop: params = (cx, cy, r); segment: params = (x1, y1, x2, y2);
    hull: ``path`` holds the rounded outline path data.
    """

    edge_id: str
    kind: str
    params: tuple[float, ...]
    path: str | None
    color: str
    width: float
    opacity: float
    status: str
    topics: tuple[str, ...]
    coverage: int
    achievement: Fraction
    contributors: tuple[tuple[str, int, int], ...]

    @property
    def arity(self) -> int:
        return len(self.topics)


@dataclass(frozen=True)
class Legend:
    cov_min: int | None
    cov_max: int | None
    width_min: float
    width_max: float


@dataclass(frozen=True)
class SceneGraph:
    """Everything emit_svg needs, already z-ordered."""

    width: float
    height: float
    title: str | None
    vertices: tuple[VertexGlyph, ...]
    edges: tuple[EdgeGlyph, ...]
    legend: Legend


def fmt(value: float) -> str:
    """Fixed 3-decimal formatting; normalizes negative zero."""
    text = f"{value:.3f}"
    return "0.000" if text == "-0.000" else text


def achievement_color(value: Fraction | int) -> str:
    """Piecewise-linear sRGB ramp at the exact achievement parameter."""
    t = Fraction(value)
    if not 0 <= t <= 1:
        raise ModelError(f"achievement parameter outside [0, 1]: {t}")
    if t <= Fraction(1, 2):
        start, end, u = RAMP_LOW, RAMP_MID, t * 2
    else:
        start, end, u = RAMP_MID, RAMP_HIGH, (t - Fraction(1, 2)) * 2
    channels = (
        int(Fraction(a) + (Fraction(b) - Fraction(a)) * u + Fraction(1, 2))
        for a, b in zip(start, end)
    )
    return "#" + "".join(f"{c:02X}" for c in channels)


def layout_vertices(tdm: Tdm, config: LayoutConfig) -> tuple[tuple[float, float], ...]:
    """Place topics equally spaced on a circle, first topic at 12 o'clock,
    proceeding clockwise in canonical (label) order. A single vertex sits at
    the canvas center. Positions depend only on the model and config."""
    n = len(tdm.vertices)
    cx, cy = config.width / 2, config.height / 2
    if n == 0:
        return ()
    if n == 1:
        return ((cx, cy),)
    radius = min(config.width, config.height) / 2 - config.circle_margin
    positions = []
    for i in range(n):
        theta = math.radians(-90.0 + 360.0 * i / n)
        positions.append((cx + radius * math.cos(theta), cy + radius * math.sin(theta)))
    return tuple(positions)


def _radial_unit(
    point: tuple[float, float], config: LayoutConfig
) -> tuple[float, float]:
    cx, cy = config.width / 2, config.height / 2
    dx, dy = point[0] - cx, point[1] - cy
    norm = math.hypot(dx, dy)
    if norm == 0:
        return (0.0, -1.0)
    return (dx / norm, dy / norm)


def _convex_hull(points: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Monotone chain; collinear points collapse to the two extremes."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[tuple[float, float]] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[float, float]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _rounded_outline(points: list[tuple[float, float]], margin: float) -> str:
    """Closed path offset outward from a convex polygon by ``margin``.

    Straight runs parallel to each polygon edge, joined by circular arcs
    around each vertex. Two points yield a capsule; one point a disc.
    """
    if len(points) == 1:
        (x, y) = points[0]
        return (
            f"M {fmt(x + margin)} {fmt(y)} "
            f"A {fmt(margin)} {fmt(margin)} 0 1 1 {fmt(x - margin)} {fmt(y)} "
            f"A {fmt(margin)} {fmt(margin)} 0 1 1 {fmt(x + margin)} {fmt(y)} Z"
        )
    ring = points if len(points) >= 3 else [points[0], points[1]]
    n = len(ring)
    offsets = []
    for i in range(n):
        px, py = ring[i]
        qx, qy = ring[(i + 1) % n]
        length = math.hypot(qx - px, qy - py)
        nx, ny = (qy - py) / length, -(qx - px) / length
        offsets.append(((px + margin * nx, py + margin * ny), (qx + margin * nx, qy + margin * ny)))

    parts = [f"M {fmt(offsets[0][0][0])} {fmt(offsets[0][0][1])}"]
    for i in range(n):
        end = offsets[i][1]
        nxt = offsets[(i + 1) % n][0]
        parts.append(f"L {fmt(end[0])} {fmt(end[1])}")
        parts.append(f"A {fmt(margin)} {fmt(margin)} 0 0 1 {fmt(nxt[0])} {fmt(nxt[1])}")
    parts.append("Z")
    return " ".join(parts)


def edge_geometry(
    edge: Hyperedge,
    positions: dict[str, tuple[float, float]],
    config: LayoutConfig,
) -> tuple[str, tuple[float, ...], str | None]:
    """Geometry for one hyperedge: (kind, params, path).

    Arity 1 is a loop tangent to its vertex, pushed outward from the layout
    circle; arity 2 a straight segment; arity >= 3 a rounded hull outline
    enclosing the member vertices (collinear members degrade to a capsule).
    """
    member_positions = [positions[t] for t in edge.topics]
    if edge.arity == 1:
        (vx, vy) = member_positions[0]
        ux, uy = _radial_unit((vx, vy), config)
        r = config.self_loop_offset
        shift = config.vertex_radius + r
        return ("loop", (vx + ux * shift, vy + uy * shift, r), None)
    if edge.arity == 2:
        (x1, y1), (x2, y2) = member_positions
        return ("segment", (x1, y1, x2, y2), None)
    hull = _convex_hull(member_positions)
    return ("hull", (), _rounded_outline(hull, config.hull_margin))


def style_edge(
    edge: Hyperedge,
    status: str,
    cov_range: tuple[int, int],
    config: LayoutConfig,
) -> tuple[str, float, float]:
    """(color, stroke width, opacity) under the view's coverage range."""
    lo, hi = cov_range
    if hi == lo:
        width = (config.stroke_min + config.stroke_max) / 2
    else:
        width = config.stroke_min + (config.stroke_max - config.stroke_min) * (
            edge.coverage - lo
        ) / (hi - lo)
    if status == GREYED:
        return (GREY_COLOR, width, GREY_OPACITY)
    return (achievement_color(edge.achievement), width, 1.0)


def build_scene(
    tdm: Tdm,
    view: ViewModel,
    config: LayoutConfig,
    hide_greyed: bool = False,
    title: str | None = None,
) -> SceneGraph:
    """Assemble glyphs for one view. Z-order puts wider (higher-arity) hulls
    underneath and self-loops on top; vertices render above all edges."""
    positions = layout_vertices(tdm, config)
    by_label = {v.label: positions[v.index] for v in tdm.vertices}

    vertices = []
    for vertex in tdm.vertices:
        x, y = by_label[vertex.label]
        ux, uy = _radial_unit((x, y), config)
        lx = x + ux * (config.vertex_radius + 8)
        ly = y + uy * (config.vertex_radius + 8)
        if abs(ux) < 0.4:
            anchor = "middle"
        elif ux > 0:
            anchor = "start"
        else:
            anchor = "end"
        vertices.append(
            VertexGlyph(vertex.index, vertex.label, x, y, config.vertex_radius, lx, ly, anchor)
        )

    cov_range = (0, 0)
    if view.legend is not None:
        cov_range = (view.legend.cov_min, view.legend.cov_max)

    order = {e.edge_id: i for i, e in enumerate(tdm.hyperedges)}
    drawable = [e for e in view.edges if not (hide_greyed and view.statuses[e.edge_id] == GREYED)]
    drawable.sort(key=lambda e: (-e.arity, order[e.edge_id]))

    glyphs = []
    for edge in drawable:
        status = view.statuses[edge.edge_id]
        kind, params, path = edge_geometry(edge, by_label, config)
        color, width, opacity = style_edge(edge, status, cov_range, config)
        glyphs.append(
            EdgeGlyph(
                edge_id=edge.edge_id,
                kind=kind,
                params=params,
                path=path,
                color=color,
                width=width,
                opacity=opacity,
                status=status,
                topics=edge.topics,
                coverage=edge.coverage,
                achievement=edge.achievement,
                contributors=tuple(
                    (c.question_id, c.attempts, c.correct) for c in edge.contributors
                ),
            )
        )

    legend = Legend(
        cov_min=view.legend.cov_min if view.legend else None,
        cov_max=view.legend.cov_max if view.legend else None,
        width_min=config.stroke_min,
        width_max=config.stroke_max,
    )
    return SceneGraph(config.width, config.height, title, tuple(vertices), tuple(glyphs), legend)


# --- SVG emission ----------------------------------------------------------


def _edge_data_attrs(glyph: EdgeGlyph) -> str:
    contributors = ";".join(f"{q}:{a}:{c}" for q, a, c in glyph.contributors)
    pairs = (
        ("data-id", glyph.edge_id),
        ("data-topics", ",".join(glyph.topics)),
        ("data-coverage", str(glyph.coverage)),
        ("data-achievement", f"{glyph.achievement.numerator}/{glyph.achievement.denominator}"),
        ("data-achievement-display", format_achievement(glyph.achievement)),
        ("data-status", glyph.status),
        ("data-contributors", contributors),
    )
    return " ".join(f"{key}={quoteattr(value)}" for key, value in pairs)


def _emit_edge(glyph: EdgeGlyph) -> str:
    data = _edge_data_attrs(glyph)
    stroke = (
        f'stroke="{glyph.color}" stroke-width="{fmt(glyph.width)}" '
        f'stroke-opacity="{fmt(glyph.opacity)}"'
    )
    if glyph.kind == "loop":
        cx, cy, r = glyph.params
        return (
            f'<circle class="edge loop" cx="{fmt(cx)}" cy="{fmt(cy)}" r="{fmt(r)}" '
            f'fill="none" {stroke} {data}/>'
        )
    if glyph.kind == "segment":
        x1, y1, x2, y2 = glyph.params
        return (
            f'<line class="edge link" x1="{fmt(x1)}" y1="{fmt(y1)}" '
            f'x2="{fmt(x2)}" y2="{fmt(y2)}" stroke-linecap="round" {stroke} {data}/>'
        )
    fill_opacity = fmt(HULL_FILL_OPACITY * glyph.opacity)
    return (
        f'<path class="edge hull" d="{glyph.path}" fill="{glyph.color}" '
        f'fill-opacity="{fill_opacity}" {stroke} {data}/>'
    )


def _emit_legend(legend: Legend, width: float, height: float) -> list[str]:
    x0 = 12.0
    y0 = height - 34.0
    parts = ['<g class="legend" font-family="sans-serif" font-size="10">']
    parts.append(
        f'<rect x="{fmt(x0)}" y="{fmt(y0)}" width="96.000" height="10.000" '
        'fill="url(#achv-ramp)" stroke="#37474F" stroke-width="0.500"/>'
    )
    parts.append(
        f'<text x="{fmt(x0)}" y="{fmt(y0 - 4)}" fill="#37474F">achievement 0 to 1</text>'
    )
    lo = "-" if legend.cov_min is None else str(legend.cov_min)
    hi = "-" if legend.cov_max is None else str(legend.cov_max)
    yw = y0 + 22.0
    parts.append(
        f'<line x1="{fmt(x0)}" y1="{fmt(yw)}" x2="{fmt(x0 + 40)}" y2="{fmt(yw)}" '
        f'stroke="#37474F" stroke-width="{fmt(legend.width_min)}"/>'
    )
    parts.append(
        f'<line x1="{fmt(x0 + 48)}" y1="{fmt(yw)}" x2="{fmt(x0 + 88)}" y2="{fmt(yw)}" '
        f'stroke="#37474F" stroke-width="{fmt(legend.width_max)}"/>'
    )
    parts.append(
        f'<text x="{fmt(x0 + 96)}" y="{fmt(yw + 3)}" fill="#37474F">'
        f"coverage {escape(lo)} to {escape(hi)}</text>"
    )
    parts.append("</g>")
    return parts


def _ramp_defs() -> str:
    stops = (
        (0, achievement_color(0)),
        (50, achievement_color(Fraction(1, 2))),
        (100, achievement_color(1)),
    )
    body = "".join(f'<stop offset="{p}%" stop-color="{c}"/>' for p, c in stops)
    return f'<defs><linearGradient id="achv-ramp">{body}</linearGradient></defs>'


def _scene_body(scene: SceneGraph) -> list[str]:
    parts = []
    if scene.title is not None:
        parts.append(
            '<text class="title" x="12.000" y="18.000" font-family="sans-serif" '
            f'font-size="13" font-weight="bold" fill="#37474F">{escape(scene.title)}</text>'
        )
    parts.append('<g class="edges">')
    parts.extend(_emit_edge(glyph) for glyph in scene.edges)
    parts.append("</g>")
    parts.append('<g class="vertices">')
    for v in scene.vertices:
        parts.append(
            f'<circle class="vertex" cx="{fmt(v.x)}" cy="{fmt(v.y)}" r="{fmt(v.radius)}" '
            f'fill="#FFFFFF" stroke="#37474F" stroke-width="1.500" '
            f"data-topic={quoteattr(v.label)}/>"
        )
    parts.append("</g>")
    parts.append('<g class="labels" font-family="sans-serif" font-size="12">')
    for v in scene.vertices:
        parts.append(
            f'<text x="{fmt(v.label_x)}" y="{fmt(v.label_y + 4)}" '
            f'text-anchor="{v.label_anchor}" fill="#263238">{escape(v.label)}</text>'
        )
    parts.append("</g>")
    parts.extend(_emit_legend(scene.legend, scene.width, scene.height))
    return parts


def emit_svg(scene: SceneGraph) -> str:
    """Standalone SVG document; byte-identical across runs for equal scenes."""
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{fmt(scene.width)}" height="{fmt(scene.height)}" '
        f'viewBox="0 0 {fmt(scene.width)} {fmt(scene.height)}">',
        _ramp_defs(),
        f'<rect width="{fmt(scene.width)}" height="{fmt(scene.height)}" fill="#FFFFFF"/>',
    ]
    parts.extend(_scene_body(scene))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_view_svg(
    tdm: Tdm,
    view: ViewModel,
    config: LayoutConfig | None = None,
    hide_greyed: bool = False,
    title: str | None = None,
) -> str:
    config = config or LayoutConfig()
    return emit_svg(build_scene(tdm, view, config, hide_greyed=hide_greyed, title=title))


def emit_level_strip(
    tdm: Tdm,
    partition: LevelPartition,
    spec: FilterSpec,
    config: LayoutConfig | None = None,
    include_empty: bool = False,
    hide_greyed: bool = False,
) -> str:
    """Side-by-side panels, one per level from 1 up to the filter's level.

    Panels share vertex positions (layout never depends on the filter), so
    the same topic sits at the same spot in every panel. Empty levels are
    skipped unless ``include_empty`` is set.
    """
    config = config or LayoutConfig()
    top = effective_level(spec, partition.depth) if partition.depth else 0
    shown = [
        i for i in range(1, top + 1) if include_empty or partition.level(i)
    ]
    if not shown and top:
        shown = [top]

    panels = []
    for index in shown:
        view = compose_view(partition, accumulative_at(spec, index))
        panels.append(
            build_scene(tdm, view, config, hide_greyed=hide_greyed, title=f"Level {index}")
        )

    total_width = config.width * max(len(panels), 1)
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{fmt(total_width)}" height="{fmt(config.height)}" '
        f'viewBox="0 0 {fmt(total_width)} {fmt(config.height)}">',
        _ramp_defs(),
        f'<rect width="{fmt(total_width)}" height="{fmt(config.height)}" fill="#FFFFFF"/>',
    ]
    for i, scene in enumerate(panels):
        parts.append(f'<g class="panel" transform="translate({fmt(i * config.width)} 0)">')
        parts.extend(_scene_body(scene))
        parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# --- Alternate exports -----------------------------------------------------


def scene_to_json(scene: SceneGraph) -> str:
    """SceneGraph mirrored to JSON (stable order) for non-SVG consumers."""
    payload = {
        "width": scene.width,
        "height": scene.height,
        "title": scene.title,
        "vertices": [
            {
                "index": v.index,
                "label": v.label,
                "x": v.x,
                "y": v.y,
                "radius": v.radius,
            }
            for v in scene.vertices
        ],
        "edges": [
            {
                "id": g.edge_id,
                "kind": g.kind,
                "params": list(g.params),
                "path": g.path,
                "color": g.color,
                "width": g.width,
                "opacity": g.opacity,
                "status": g.status,
                "topics": list(g.topics),
                "coverage": g.coverage,
                "achievement_num": g.achievement.numerator,
                "achievement_den": g.achievement.denominator,
            }
            for g in scene.edges
        ],
        "legend": {
            "coverage_min": scene.legend.cov_min,
            "coverage_max": scene.legend.cov_max,
            "width_min": scene.legend.width_min,
            "width_max": scene.legend.width_max,
        },
    }
    return json.dumps(payload, indent=2) + "\n"


def emit_dot(tdm: Tdm, view: ViewModel, config: LayoutConfig | None = None) -> str:
    """Graphviz export. Hyperedges of arity >= 3 are expanded through an
    auxiliary point node (marked synthetic); loops and pairs map directly."""
    config = config or LayoutConfig()
    cov_range = (0, 0)
    if view.legend is not None:
        cov_range = (view.legend.cov_min, view.legend.cov_max)
    lines = ["graph topicmesh {", '  node [shape="circle"];']
    for vertex in tdm.vertices:
        lines.append(f'  "{vertex.label}";')
    for edge in view.edges:
        status = view.statuses[edge.edge_id]
        color, width, _ = style_edge(edge, status, cov_range, config)
        label = f"{edge.coverage} @ {edge.achievement_display()}"
        attrs = f'penwidth="{fmt(width)}", color="{color}", label="{label}"'
        if edge.arity == 1:
            t = edge.topics[0]
            lines.append(f'  "{t}" -- "{t}" [{attrs}];')
        elif edge.arity == 2:
            a, b = edge.topics
            lines.append(f'  "{a}" -- "{b}" [{attrs}];')
        else:
            hub = f"__{edge.edge_id}"
            lines.append(
                f'  "{hub}" [shape="point", width="0.08", synthetic="true"];'
            )
            for t in edge.topics:
                lines.append(f'  "{t}" -- "{hub}" [{attrs}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
