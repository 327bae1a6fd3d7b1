"""Interactive segmentation HTTP service.

Holds in-memory sessions (image + stroke set + last result) and exposes
the scribble-driven pipeline for iterative refinement. Request/response
bodies are JSON; image payloads are base64, label maps come back as
base64 indexed PNG bytes. Sessions do not survive a restart.
"""

from __future__ import annotations

import base64
import threading
import uuid
from dataclasses import asdict, dataclass, field, fields

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from texseg import imgio, pipeline
from texseg.likelihood import ScribbleConfigError
from texseg.pipeline import SegConfig
from texseg.solver import DivergenceError

DEFAULT_BRUSH = 13.0


class ConfigOverrides(BaseModel):
    """Subset of SegConfig a client may tune per session."""

    patch_side: int | None = None
    overcompleteness: float | None = None
    sigma_tex: float | None = None
    sigma_color: float | None = None
    alpha: float | None = None
    gamma: float | None = None
    lam: float | None = Field(default=None, alias="lambda")
    nu: float | None = None
    mask_std: float | None = None
    beta0: float | None = None
    max_iters: int | None = None
    tol: float | None = None
    seed: int | None = None
    max_scribble_samples: int | None = None

    model_config = {"populate_by_name": True}


class CreateSessionRequest(BaseModel):
    image: str
    config: ConfigOverrides | None = None


class Stroke(BaseModel):
    label: int
    points: list[tuple[float, float]]
    width: float = DEFAULT_BRUSH


class StrokesRequest(BaseModel):
    strokes: list[Stroke]


@dataclass
class Session:
    image: np.ndarray
    config: SegConfig
    strokes: list = field(default_factory=list)
    last_result: dict | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)
    run_lock: threading.Lock = field(default_factory=threading.Lock)


def _apply_overrides(overrides):
    cfg = SegConfig()
    if overrides is None:
        return cfg
    valid = {f.name for f in fields(SegConfig)}
    values = asdict(cfg)
    for name, value in overrides.model_dump(exclude_none=True).items():
        if name in valid:
            values[name] = value
    return SegConfig(**values)


def create_app(max_pixels=4_000_000, static_dir=None):
    app = FastAPI(title="texseg service")
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()
    app.state.sessions = sessions

    def get_session(sid):
        with registry_lock:
            sess = sessions.get(sid)
        if sess is None:
            raise HTTPException(status_code=404, detail=f"unknown session {sid}")
        return sess

    @app.post("/sessions")
    def create_session(req: CreateSessionRequest):
        try:
            raw = base64.b64decode(req.image, validate=True)
            image = imgio.load_image(raw)
        except Exception as exc:
            raise HTTPException(status_code=400, detail=f"image decode failed: {exc}") from exc
        h, w = image.shape[:2]
        if h * w > max_pixels:
            raise HTTPException(
                status_code=400, detail=f"image has {h * w} pixels, limit is {max_pixels}"
            )
        sid = uuid.uuid4().hex
        with registry_lock:
            sessions[sid] = Session(image=image, config=_apply_overrides(req.config))
        return {"id": sid, "width": w, "height": h}

    @app.put("/sessions/{sid}/strokes")
    def update_strokes(sid: str, req: StrokesRequest):
        sess = get_session(sid)
        labels = sorted({s.label for s in req.strokes})
        if labels and labels != list(range(1, len(labels) + 1)):
            raise HTTPException(
                status_code=400, detail=f"stroke labels must be contiguous from 1, got {labels}"
            )
        for s in req.strokes:
            if s.width <= 0:
                raise HTTPException(status_code=400, detail="stroke width must be positive")
            if not s.points:
                raise HTTPException(status_code=400, detail="stroke without points")
        with sess.lock:
            sess.strokes = [(s.label, [tuple(p) for p in s.points], s.width) for s in req.strokes]
        return {"accepted": True, "labels": len(labels)}

    @app.get("/sessions/{sid}/scribbles")
    def rasterized_scribbles(sid: str):
        sess = get_session(sid)
        with sess.lock:
            strokes = list(sess.strokes)
        mask = imgio.rasterize_strokes(strokes, sess.image.shape[:2], default_width=DEFAULT_BRUSH)
        return {"mask_png": base64.b64encode(imgio.label_png_bytes(mask)).decode("ascii")}

    @app.post("/sessions/{sid}/segment")
    def run_segmentation(sid: str):
        sess = get_session(sid)
        if not sess.run_lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="segmentation already running")
        try:
            with sess.lock:
                strokes = list(sess.strokes)
            labels_present = sorted({s[0] for s in strokes})
            if len(labels_present) < 2:
                raise HTTPException(
                    status_code=400,
                    detail=f"need strokes for at least 2 labels, got {len(labels_present)}",
                )
            mask = imgio.rasterize_strokes(strokes, sess.image.shape[:2], default_width=DEFAULT_BRUSH)
            try:
                seg, diag = pipeline.segment_supervised(sess.image, mask, config=sess.config)
            except ScribbleConfigError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from exc
            except DivergenceError as exc:
                raise HTTPException(status_code=500, detail=str(exc)) from exc
            result = {
                "labels_png": base64.b64encode(imgio.label_png_bytes(seg.labels)).decode("ascii"),
                "energy": diag.energy,
                "gap": diag.gap,
                "iterations": diag.iterations,
                "millis": diag.millis,
                "active_labels": diag.active_labels,
            }
            with sess.lock:
                sess.last_result = result
            return result
        finally:
            sess.run_lock.release()

    @app.get("/sessions/{sid}/result")
    def last_result(sid: str):
        sess = get_session(sid)
        with sess.lock:
            if sess.last_result is None:
                raise HTTPException(status_code=404, detail="no result yet")
            return sess.last_result

    @app.delete("/sessions/{sid}")
    def delete_session(sid: str):
        with registry_lock:
            if sessions.pop(sid, None) is None:
                raise HTTPException(status_code=404, detail=f"unknown session {sid}")
        return {"deleted": sid}

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app
