"""FastAPI application exposing the batched scoring protocol.

POST /v1/score  {"task": <name>, "items": [...]} -> per-item results in
request order.  GET /v1/health -> 200 with model identifiers when every
configured model is loaded, 503 listing the missing ones otherwise.

Error codes: 400 unknown task or malformed request, 413 oversize batch,
503 model not loaded.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import __version__
from .config import ALL_TASKS, Settings
from .models import build_models

SUITE_MODEL_ID = f"stub-suite-v{__version__}"


class ScoreRequest(BaseModel):
    task: str
    items: list[dict]


def create_app(settings: Settings | None = None) -> FastAPI:
    settings = settings or Settings.from_env()
    loadable = tuple(
        t for t in settings.enabled_tasks if t not in settings.unavailable_tasks
    )
    models = build_models(loadable, settings.embed_dim)
    app = FastAPI(title="scorer-service", version=__version__)

    @app.exception_handler(RequestValidationError)
    async def malformed_request(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "malformed request"})

    def _error(status: int, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"error": message})

    @app.get("/v1/health")
    def health():
        missing = [t for t in settings.enabled_tasks if t not in models]
        payload = {
            "model": SUITE_MODEL_ID,
            "models": {task: model.model_id for task, model in sorted(models.items())},
            "tasks": sorted(models),
        }
        if missing:
            return _error(503, f"models not loaded: {sorted(missing)}")
        return payload

    @app.post("/v1/score")
    def score(request: ScoreRequest):
        if request.task not in ALL_TASKS:
            return _error(400, f"unknown task {request.task!r}")
        model = models.get(request.task)
        if model is None:
            return _error(503, f"model for task {request.task!r} not loaded")
        if len(request.items) > settings.max_batch:
            return _error(
                413, f"batch of {len(request.items)} exceeds max {settings.max_batch}"
            )
        try:
            results = [_score_item(request.task, model, item)
                       for item in request.items]
        except (KeyError, TypeError) as exc:
            return _error(400, f"malformed item for task {request.task!r}: {exc}")
        return {"model": model.model_id, "task": request.task, "results": results}

    return app


def _score_item(task: str, model, item: dict) -> dict:
    if task == "align":
        return {"p": model.score(item["x"], item["y"])}
    if task == "specificity":
        return {"score": model.score(item["text"])}
    if task == "sentiment":
        label, confidence = model.score(item["text"])
        return {"label": label, "confidence": confidence}
    if task == "embed":
        return {"vector": model.score(item["text"])}
    if task == "absa":
        return model.score(item["text"])
    if task == "entail":
        return {"p": model.score(item["x"], item["y"])}
    raise KeyError(task)


def main() -> None:
    import argparse

    import uvicorn

    parser = argparse.ArgumentParser(description="Run the scorer service")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8400)
    args = parser.parse_args()
    uvicorn.run(create_app(), host=args.host, port=args.port)


app = create_app()

if __name__ == "__main__":
    main()
