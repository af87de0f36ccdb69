"""HTTP wrapper: one POST route per command plus a health probe."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .handlers import (
    InputError,
    run_analyze,
    run_check,
    run_cones,
    run_decompose,
    run_linear,
    run_regularize,
)
from .schemas import (
    AnalyzeRequest,
    CheckRequest,
    ConesRequest,
    DecomposeRequest,
    LinearRequest,
    RegularizeRequest,
    Report,
)

app = FastAPI(title="jetcones", version="0.1.0")


def _respond(report: dict) -> Report:
    return Report(**report)


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/analyze", response_model=Report)
def analyze(req: AnalyzeRequest) -> Report:
    try:
        report, _ = run_analyze(req)
    except InputError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return _respond(report)


@app.post("/cones", response_model=Report)
def cones(req: ConesRequest) -> Report:
    try:
        report, _ = run_cones(req)
    except InputError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return _respond(report)


@app.post("/check", response_model=Report)
def check(req: CheckRequest) -> Report:
    try:
        report, _ = run_check(req)
    except InputError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return _respond(report)


@app.post("/regularize", response_model=Report)
def regularize(req: RegularizeRequest) -> Report:
    try:
        report, _, _ = run_regularize(req)
    except InputError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return _respond(report)


@app.post("/linear", response_model=Report)
def linear(req: LinearRequest) -> Report:
    try:
        report, _ = run_linear(req)
    except InputError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return _respond(report)


@app.post("/decompose", response_model=Report)
def decompose(req: DecomposeRequest) -> Report:
    try:
        report, _ = run_decompose(req)
    except InputError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return _respond(report)
