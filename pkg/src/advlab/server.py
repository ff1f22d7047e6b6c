"""REST API: model/dataset registration, attack and defense evaluation,
run retrieval.

Uploaded models and datasets are persisted into the run store and
re-registered on startup, so fixture files dropped there appear as
preloaded choices. All request bodies and responses are JSON; images inside
run records are base64 float32 blobs plus shape.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware

from .modelio import (
    FileFormatError,
    parse_dataset,
    parse_model,
    serialize_dataset,
    serialize_model,
)
from .service import (
    XaiConfig,
    attack_config_from_dict,
    defense_config_from_dict,
    evaluate_attack_run,
    evaluate_defense_run,
)
from .store import RunStore, resolve_store_dir


def _model_summary(loaded):
    return {
        "id": loaded.model_id,
        "class_count": loaded.network.class_count,
        "embedding_index": loaded.network.embedding_index,
        "input_shape": list(loaded.network.input_shape),
        "layers": [l.kind for l in loaded.network.layers],
    }


def _dataset_summary(loaded):
    header = {k: v for k, v in loaded.header.items() if k != "labels"}
    return {"id": loaded.dataset_id, **header}


def _xai_config_from(block):
    if block is None:
        return XaiConfig()
    if not isinstance(block, dict):
        raise ValueError("xai must be an object")
    allowed = {"layer_index", "tau", "k"}
    for key in block:
        if key not in allowed:
            raise ValueError(f"xai does not take a parameter named '{key}'")
    return XaiConfig(
        layer_index=block.get("layer_index"),
        tau=float(block.get("tau", 0.0)),
        k=int(block.get("k", 10)),
    )


def create_app(store_dir=None):
    store = RunStore(resolve_store_dir(store_dir))
    app = FastAPI(title="advlab", description="adversarial-robustness workbench API")
    # the browser console is served from a different local port
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    models = {}
    datasets = {}

    def _preload():
        for path in store.stored_model_files():
            try:
                loaded = parse_model(path.read_bytes(), base_dir=path.parent)
                models[loaded.model_id] = loaded
            except FileFormatError:
                continue
        for path in store.stored_dataset_files():
            try:
                loaded = parse_dataset(path.read_bytes(), base_dir=path.parent)
                datasets[loaded.dataset_id] = loaded
            except FileFormatError:
                continue

    _preload()

    def _get_model(model_id):
        if model_id not in models:
            raise HTTPException(status_code=404, detail=f"unknown model id {model_id!r}")
        return models[model_id]

    def _get_dataset(dataset_id):
        if dataset_id not in datasets:
            raise HTTPException(status_code=404, detail=f"unknown dataset id {dataset_id!r}")
        return datasets[dataset_id]

    @app.exception_handler(ValueError)
    async def _value_error(request, exc):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=400, content={"detail": str(exc)})

    async def _json_body(request):
        try:
            return json.loads(await request.body())
        except json.JSONDecodeError as exc:
            raise HTTPException(status_code=400, detail=f"request body is not valid JSON: {exc}")

    @app.post("/models")
    async def register_model(request: Request):
        body = await request.body()
        loaded = parse_model(body)
        models[loaded.model_id] = loaded
        data, _ = serialize_model(loaded.network)
        store.save_model_file(loaded.model_id, data)
        return _model_summary(loaded)

    @app.get("/models")
    def list_models():
        return [_model_summary(m) for m in models.values()]

    @app.get("/models/{model_id}")
    def get_model(model_id: str):
        loaded = _get_model(model_id)
        return {"id": loaded.model_id, "manifest": loaded.manifest}

    @app.post("/datasets")
    async def register_dataset(request: Request):
        body = await request.body()
        loaded = parse_dataset(body)
        datasets[loaded.dataset_id] = loaded
        data, _ = serialize_dataset(loaded.data, loaded.class_names)
        store.save_dataset_file(loaded.dataset_id, data)
        return _dataset_summary(loaded)

    @app.get("/datasets")
    def list_datasets():
        return [_dataset_summary(d) for d in datasets.values()]

    @app.get("/datasets/{dataset_id}")
    def get_dataset(dataset_id: str):
        loaded = _get_dataset(dataset_id)
        return {"id": loaded.dataset_id, "header": loaded.header}

    def _common_request_fields(body):
        allowed = {"model_id", "dataset_id", "attack", "defense", "sample_count",
                   "seed", "xai"}
        for key in body:
            if key not in allowed:
                raise ValueError(f"request does not take a field named '{key}'")
        model = _get_model(body.get("model_id"))
        dataset = _get_dataset(body.get("dataset_id"))
        attack_cfg = attack_config_from_dict(body.get("attack") or {})
        sample_count = body.get("sample_count")
        if not isinstance(sample_count, int) or isinstance(sample_count, bool):
            raise ValueError("request requires an integer 'sample_count'")
        seed = body.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise ValueError("'seed' must be an integer")
        xai_cfg = _xai_config_from(body.get("xai"))
        return model, dataset, attack_cfg, sample_count, seed, xai_cfg

    @app.post("/attacks")
    async def post_attack(request: Request):
        body = await _json_body(request)
        if "defense" in body:
            raise ValueError("attack requests do not take a 'defense' field")
        model, dataset, attack_cfg, sample_count, seed, xai_cfg = \
            _common_request_fields(body)
        record = evaluate_attack_run(model, dataset, attack_cfg, sample_count, seed,
                                     xai_cfg)
        store.save_run(record)
        return record

    @app.post("/defenses")
    async def post_defense(request: Request):
        body = await _json_body(request)
        if "defense" not in body:
            raise ValueError("defense requests require a 'defense' field")
        defense_cfg = defense_config_from_dict(body.get("defense"))
        model, dataset, attack_cfg, sample_count, seed, xai_cfg = \
            _common_request_fields(body)
        record = evaluate_defense_run(model, dataset, attack_cfg, defense_cfg,
                                      sample_count, seed, xai_cfg)
        store.save_run(record)
        return record

    @app.get("/runs")
    def list_runs():
        return store.list_runs()

    @app.get("/runs/{run_id}")
    def get_run(run_id: str):
        record = store.get_run(run_id)
        if record is None:
            raise HTTPException(status_code=404, detail=f"unknown run id {run_id!r}")
        return record

    @app.get("/runs/{run_id}/explain")
    def get_run_explain(run_id: str):
        record = store.get_run(run_id)
        if record is None:
            raise HTTPException(status_code=404, detail=f"unknown run id {run_id!r}")
        return record["explain"]

    return app


def serve(host="127.0.0.1", port=8000, store_dir=None):
    import uvicorn

    uvicorn.run(create_app(store_dir), host=host, port=port)
