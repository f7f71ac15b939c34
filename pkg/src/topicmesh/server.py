"""HTTP service exposing datasets, models, levels, and filtered views.

Uploaded CSV pairs are built into models eagerly and held in an immutable
in-memory registry (optionally mirrored to a directory, one JSON file per
dataset). Dataset ids derive from the source digests, so re-posting the
same bytes always lands on the same id. View responses are produced by the
same rendering functions as the CLI and are byte-identical to its output.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .errors import DataFormatError, FilterError, ModelError
from .hypergraph import Tdm, build_model, tdm_from_json, tdm_to_json
from .levels import partition_levels, spec_from_params, view_report_json
from .render import LayoutConfig, emit_dot, emit_level_strip, render_view_svg
from .levels import compose_view

_VIEW_OPTION_KEYS = {"format", "strip", "include_empty", "hide_greyed"}
_TRUE_VALUES = {"1", "true", "yes"}
_FALSE_VALUES = {"0", "false", "no"}


class DatasetUpload(BaseModel):
    sqa: str
    qt: str


@dataclass(frozen=True)
class DatasetEntry:
    dataset_id: str
    sqa_text: str
    qt_text: str
    tdm: Tdm
    created_at: str


def dataset_id_for(sqa_text: str, qt_text: str) -> str:
    digest = hashlib.sha256()
    digest.update(b"sqa:")
    digest.update(sqa_text.encode("utf-8"))
    digest.update(b"\nqt:")
    digest.update(qt_text.encode("utf-8"))
    return digest.hexdigest()[:16]


class DatasetRegistry:
    """Insert-once store; safe for concurrent readers and writers."""

    def __init__(self, data_dir: Path | None = None):
        self._entries: dict[str, DatasetEntry] = {}
        self._lock = threading.Lock()
        self._data_dir = data_dir
        if data_dir is not None:
            data_dir.mkdir(parents=True, exist_ok=True)
            for path in sorted(data_dir.glob("*.json")):
                self._load_persisted(path)

    def _load_persisted(self, path: Path) -> None:
        payload = json.loads(path.read_text(encoding="utf-8"))
        entry = DatasetEntry(
            dataset_id=payload["dataset_id"],
            sqa_text=payload["sqa"],
            qt_text=payload["qt"],
            tdm=tdm_from_json(payload["model"]),
            created_at=payload["created_at"],
        )
        self._entries[entry.dataset_id] = entry

    def get(self, dataset_id: str) -> DatasetEntry:
        entry = self._entries.get(dataset_id)
        if entry is None:
            raise KeyError(dataset_id)
        return entry

    def ids(self) -> list[str]:
        return sorted(self._entries)

    def add(self, sqa_text: str, qt_text: str) -> tuple[DatasetEntry, bool]:
        """Build and insert; returns (entry, created). Identical bytes reuse
        the existing entry."""
        dataset_id = dataset_id_for(sqa_text, qt_text)
        with self._lock:
            existing = self._entries.get(dataset_id)
            if existing is not None:
                return existing, False
            tdm = build_model(sqa_text, qt_text)
            entry = DatasetEntry(
                dataset_id=dataset_id,
                sqa_text=sqa_text,
                qt_text=qt_text,
                tdm=tdm,
                created_at=datetime.now(timezone.utc).isoformat(),
            )
            self._entries[dataset_id] = entry
            self._persist(entry)
            return entry, True

    def _persist(self, entry: DatasetEntry) -> None:
        if self._data_dir is None:
            return
        payload = {
            "dataset_id": entry.dataset_id,
            "sqa": entry.sqa_text,
            "qt": entry.qt_text,
            "model": tdm_to_json(entry.tdm),
            "created_at": entry.created_at,
        }
        target = self._data_dir / f"{entry.dataset_id}.json"
        tmp = target.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(payload, indent=2), encoding="utf-8")
        tmp.replace(target)


def _parse_flag(params: dict[str, str], key: str) -> bool:
    raw = params.pop(key, None)
    if raw is None:
        return False
    value = raw.lower()
    if value in _TRUE_VALUES:
        return True
    if value in _FALSE_VALUES:
        return False
    raise FilterError(f"{key} must be a boolean flag, got {raw!r}")


def create_app(data_dir: str | Path | None = None) -> FastAPI:
    registry = DatasetRegistry(Path(data_dir) if data_dir else None)
    app = FastAPI(title="topicmesh", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.registry = registry

    def _entry_or_404(dataset_id: str) -> DatasetEntry:
        try:
            return registry.get(dataset_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown dataset {dataset_id!r}")

    @app.post("/datasets")
    def post_dataset(upload: DatasetUpload, response: Response):
        """Upload a CSV pair; builds the model eagerly, idempotent on bytes."""
        try:
            entry, created = registry.add(upload.sqa, upload.qt)
        except DataFormatError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        response.status_code = 201 if created else 200
        return {
            "dataset_id": entry.dataset_id,
            "vertices": len(entry.tdm.vertices),
            "hyperedges": len(entry.tdm.hyperedges),
            "zero_coverage_sets": len(entry.tdm.zero_coverage_sets),
        }

    @app.get("/datasets")
    def list_datasets():
        return {"dataset_ids": registry.ids()}

    @app.get("/datasets/{dataset_id}/model")
    def get_model(dataset_id: str):
        entry = _entry_or_404(dataset_id)
        return Response(
            content=tdm_to_json(entry.tdm),
            media_type="application/json",
            headers={"ETag": f'"{entry.dataset_id}"'},
        )

    @app.get("/datasets/{dataset_id}/levels")
    def get_levels(dataset_id: str):
        """Arity-indexed edge-id lists, explicit empties up to the vertex count."""
        entry = _entry_or_404(dataset_id)
        partition = partition_levels(entry.tdm)
        return {
            "dataset_id": entry.dataset_id,
            "depth": partition.depth,
            "levels": [
                {"level": i, "edges": [e.edge_id for e in partition.level(i)]}
                for i in range(1, partition.depth + 1)
            ],
        }

    @app.get("/datasets/{dataset_id}/view")
    def get_view(dataset_id: str, request: Request):
        """Filtered view; SVG bytes match the CLI output for the same spec."""
        entry = _entry_or_404(dataset_id)
        params = dict(request.query_params)
        if len(params) != len(request.query_params.multi_items()):
            raise HTTPException(status_code=400, detail="duplicate query parameter")
        try:
            fmt = params.pop("format", "svg")
            strip = _parse_flag(params, "strip")
            include_empty = _parse_flag(params, "include_empty")
            hide_greyed = _parse_flag(params, "hide_greyed")
            spec = spec_from_params(params)
            partition = partition_levels(entry.tdm)
            config = LayoutConfig()
            if fmt == "svg":
                if strip:
                    text = emit_level_strip(
                        entry.tdm,
                        partition,
                        spec,
                        config,
                        include_empty=include_empty,
                        hide_greyed=hide_greyed,
                    )
                else:
                    view = compose_view(partition, spec)
                    text = render_view_svg(
                        entry.tdm, view, config, hide_greyed=hide_greyed
                    )
                return Response(content=text, media_type="image/svg+xml")
            if fmt == "json":
                text = view_report_json(partition, spec, strip=strip)
                return Response(content=text, media_type="application/json")
            if fmt == "dot":
                view = compose_view(partition, spec)
                text = emit_dot(entry.tdm, view, config)
                return Response(content=text, media_type="text/vnd.graphviz")
            raise FilterError(f"unknown format {fmt!r}")
        except (FilterError, ModelError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    return app
