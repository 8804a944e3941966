"""HTTP service exposing the analysis pipeline.

The service holds at most one fitted model.  Uploading a new one swaps a
single reference, so requests in flight keep computing against the
snapshot they started with.  Every computation goes through the same
document builders as the CLI; responses are serialized with the same
canonical encoder, so the two paths emit identical bytes.
"""

from __future__ import annotations

import dataclasses
from typing import Any

from fastapi import Body, FastAPI, HTTPException, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from . import report
from .advice import RunConfig
from .dataset import parse_ema_csv
from .errors import ConfigError, VarpulseError
from .model import VarModel, fit_var, model_from_dict

_CONFIG_FIELDS = {
    "horizon": "int",
    "bootstrap": "bool",
    "iterations": "int",
    "confidence": "number",
    "seed": "int",
    "workers": "int",
    "theta": "number",
    "window": "number",
    "percent": "number",
    "interval_minutes": "number",
}


def _bad(field: str, message: str) -> HTTPException:
    return HTTPException(status_code=400, detail=[{"field": field, "message": message}])


def _typed(field: str, value: Any, kind: str) -> Any:
    if kind == "str":
        if not isinstance(value, str):
            raise _bad(field, "must be a string")
    elif kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise _bad(field, "must be an integer")
    elif kind == "number":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise _bad(field, "must be a number")
        value = float(value)
    elif kind == "bool":
        if not isinstance(value, bool):
            raise _bad(field, "must be a boolean")
    elif kind == "dict":
        if not isinstance(value, dict):
            raise _bad(field, "must be an object")
    elif kind == "list[str]":
        if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
            raise _bad(field, "must be a list of strings")
    return value


def _field(body: dict, name: str, kind: str, required: bool = False) -> Any:
    value = body.get(name)
    if value is None:
        if required:
            raise _bad(name, "is required")
        return None
    return _typed(name, value, kind)


def _reject_unknown(body: dict, allowed: set[str]) -> None:
    for name in body:
        if name not in allowed:
            raise _bad(name, "unknown field")


def _config_from_body(base: RunConfig, body: dict) -> RunConfig:
    overrides = {}
    for name, kind in _CONFIG_FIELDS.items():
        value = _field(body, name, kind)
        if value is not None:
            overrides[name] = value
    if not overrides:
        return base
    try:
        return dataclasses.replace(base, **overrides)
    except ConfigError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


def _canonical_response(doc: dict) -> Response:
    return Response(content=report.dumps_canonical(doc), media_type="application/json")


def create_app(
    model: VarModel | None = None,
    config: RunConfig | None = None,
    ui_dir: str | None = None,
) -> FastAPI:
    app = FastAPI(title="varpulse", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.model = model
    app.state.config = config if config is not None else RunConfig()

    def current_model(request: Request) -> VarModel:
        # single attribute read: the snapshot cannot change mid-request
        snapshot = request.app.state.model
        if snapshot is None:
            raise HTTPException(
                status_code=409, detail="no model loaded; POST /api/model first"
            )
        return snapshot

    def resolve(snapshot: VarModel, field: str, name: str) -> int:
        try:
            return snapshot.index_of(name)
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc.args[0])) from exc

    def guarded(fn):
        try:
            return fn()
        except HTTPException:
            raise
        except ConfigError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc.args[0])) from exc
        except VarpulseError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    @app.post("/api/model")
    def upload_model(request: Request, body: dict = Body(...)) -> Response:
        _reject_unknown(
            body, {"model", "csv", "lags", "interval_minutes", "polarity", "exogenous"}
        )
        if "model" in body:
            doc = _field(body, "model", "dict", required=True)
            new_model = guarded(lambda: model_from_dict(doc))
        elif "csv" in body:
            text = _field(body, "csv", "str", required=True)
            lags = _field(body, "lags", "int", required=True)
            interval = _field(body, "interval_minutes", "number", required=True)
            polarity = _field(body, "polarity", "dict") or {}
            for key, value in polarity.items():
                _typed(f"polarity.{key}", value, "str")
            exogenous = _field(body, "exogenous", "list[str]") or []

            def build() -> VarModel:
                data = parse_ema_csv(
                    text,
                    interval_minutes=interval,
                    polarity_map=polarity,
                    exogenous=exogenous,
                )
                return fit_var(data, lags=lags)

            new_model = guarded(build)
        else:
            raise _bad("", "provide either 'model' or 'csv'")
        request.app.state.model = new_model
        return _canonical_response(report.meta_document(new_model))

    @app.get("/api/model/meta")
    def model_meta(request: Request) -> Response:
        snapshot = current_model(request)
        return _canonical_response(guarded(lambda: report.meta_document(snapshot)))

    @app.post("/api/irf")
    def irf_endpoint(request: Request, body: dict = Body(...)) -> Response:
        _reject_unknown(
            body,
            {"impulse", "response", "orthogonalized", "ordering"} | set(_CONFIG_FIELDS),
        )
        snapshot = current_model(request)
        cfg = _config_from_body(request.app.state.config, body)
        impulse = resolve(snapshot, "impulse", _field(body, "impulse", "str", required=True))
        response = resolve(snapshot, "response", _field(body, "response", "str", required=True))
        orthogonalized = bool(_field(body, "orthogonalized", "bool"))
        ordering_names = _field(body, "ordering", "list[str]")
        ordering = None
        if ordering_names is not None:
            ordering = tuple(resolve(snapshot, "ordering", n) for n in ordering_names)
        doc = guarded(
            lambda: report.irf_document(snapshot, impulse, response, cfg, orthogonalized, ordering)
        )
        return _canonical_response(doc)

    @app.post("/api/influence")
    def influence_endpoint(request: Request, body: dict = Body(...)) -> Response:
        _reject_unknown(body, set(_CONFIG_FIELDS))
        snapshot = current_model(request)
        cfg = _config_from_body(request.app.state.config, body)
        return _canonical_response(guarded(lambda: report.influence_document(snapshot, cfg)))

    @app.post("/api/effect-length")
    def effect_length_endpoint(request: Request, body: dict = Body(...)) -> Response:
        _reject_unknown(body, {"impulse", "response"} | set(_CONFIG_FIELDS))
        snapshot = current_model(request)
        cfg = _config_from_body(request.app.state.config, body)
        impulse = resolve(snapshot, "impulse", _field(body, "impulse", "str", required=True))
        response = resolve(snapshot, "response", _field(body, "response", "str", required=True))
        doc = guarded(lambda: report.effect_length_document(snapshot, impulse, response, cfg))
        return _canonical_response(doc)

    @app.post("/api/whatif")
    def whatif_endpoint(request: Request, body: dict = Body(...)) -> Response:
        _reject_unknown(body, {"target"} | set(_CONFIG_FIELDS))
        snapshot = current_model(request)
        cfg = _config_from_body(request.app.state.config, body)
        target = resolve(snapshot, "target", _field(body, "target", "str", required=True))
        doc = guarded(lambda: report.whatif_document(snapshot, target, cfg))
        return _canonical_response(doc)

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
