"""HTTP routing service.

Endpoints:

* ``POST /route``   ``{"query_text": ..., "task_id"?: ...}`` → the chosen
  model id plus per-candidate scores.
* ``POST /models``  a model-card JSON body → integrates the model into the
  frozen pool (no router parameter change) and returns the new pool.
* ``GET /pool``     current pool ids, profile spec, and router checksum.
* ``GET /healthz``  liveness and version.

Routing is side-effect free; registration is serialized behind a lock and
persists the pool (plus the registered cards) to a JSON snapshot, which is
reloaded on startup for crash recovery.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import numpy as np

from . import __version__
from .config import AppConfig, make_providers
from .errors import (
    ColdRouteError,
    ConfigError,
    DuplicateId,
    ProviderTimeout,
    TransportError,
    UnknownTask,
)
from .graph import ModelCard, NodeKind, add_model_node, build_graph, load_cards
from .profiles import ProfileSpec, TrainGnnModel, load_templates, make_profiles, traingnn_fit
from .providers import encode_all
from .routers import (
    CandidatePool,
    SimRouter,
    graphrouter_fit,
    integrate_new_model,
    load_interactions,
    load_tasks,
    mlp_fit,
    router_checksum,
)

__all__ = ["RoutingService", "make_server", "serve"]


class RoutingService:
    """In-memory pipeline state behind the HTTP endpoints."""

    def __init__(self, cfg: AppConfig):
        self.cfg = cfg
        self.providers = make_providers(cfg)
        self.spec = ProfileSpec.parse(cfg.spec)
        self.templates = load_templates(cfg.templates_dir) if cfg.templates_dir else None
        cards = load_cards(cfg.cards_dir)
        self.graph = build_graph(
            cards.families, cards.models, cards.benchmarks, cards.domains, cards.queries, cfg.dim
        )
        encode_all(self.graph, self.providers.encoder)

        self.trained: TrainGnnModel | None = None
        if self.spec.learning == "trainable":
            if cfg.aggregator and Path(cfg.aggregator).exists():
                self.trained = TrainGnnModel.from_checkpoint(
                    json.loads(Path(cfg.aggregator).read_text())
                )
            else:
                self.trained = traingnn_fit(self.graph, self.spec, cfg.seed)

        pool_ids = cfg.pool or [n.id for n in self.graph.nodes_of_kind(NodeKind.MODEL)]
        profiles = make_profiles(
            self.graph, self.spec, pool_ids, self.providers,
            seed=cfg.seed, templates=self.templates, trained=self.trained,
        )
        self.pool = CandidatePool([profiles[m] for m in pool_ids])
        self._recover_state()
        self.tasks = load_tasks(cfg.tasks) if cfg.tasks else {}
        self.router = self._build_router()
        self._route_counter = 0
        self._write_lock = threading.Lock()

    def _build_router(self):
        kind = self.cfg.router
        if kind == "sim":
            return SimRouter(dim=self.pool.dim)
        if self.cfg.interactions is None:
            raise ConfigError(f"router {kind!r} needs an interactions file in the config")
        interactions = load_interactions(self.cfg.interactions)
        query_vecs = {
            qid: self.graph.node(qid).embedding
            for qid in sorted({r.query_id for r in interactions})
        }
        if kind == "mlp":
            return mlp_fit(
                interactions, query_vecs, self.pool, hidden=self.cfg.hidden, seed=self.cfg.seed
            )
        if kind == "graphrouter":
            train_tasks = {qid: self.tasks[qid] for qid in query_vecs if qid in self.tasks}
            return graphrouter_fit(
                train_tasks, query_vecs, interactions, self.pool,
                hidden=self.cfg.hidden, seed=self.cfg.seed,
            )
        raise ConfigError(f"unknown router kind {kind!r}")

    # -- persistence --

    def _recover_state(self) -> None:
        path = self.cfg.state_path
        if not path or not Path(path).exists():
            return
        state = json.loads(Path(path).read_text())
        for entry in state.get("registered_cards", []):
            card = ModelCard(
                id=entry["id"],
                family_id=entry["family_id"],
                description=entry["description"],
                scores={k: float(v) for k, v in entry.get("scores", {}).items()},
            )
            if card.id not in self.graph:
                add_model_node(self.graph, card)
        encode_all(self.graph, self.providers.encoder, only_missing=True)
        self.pool = CandidatePool.from_dict(state["pool"])
        self._registered = list(state.get("registered_cards", []))

    def _persist(self) -> None:
        if not self.cfg.state_path:
            return
        state = {
            "registered_cards": getattr(self, "_registered", []),
            "pool": self.pool.to_dict(),
        }
        Path(self.cfg.state_path).write_text(json.dumps(state, sort_keys=True))

    # -- operations --

    def checksum(self) -> str:
        return router_checksum(self.router)

    def route(self, query_text: str, task_id: str | None = None) -> dict:
        if not isinstance(query_text, str) or not query_text.strip():
            raise ConfigError("query_text must be a nonempty string")
        if self.cfg.router == "graphrouter" and task_id is None:
            raise UnknownTask("<missing task_id>")
        vec = np.asarray(self.providers.encoder.encode(query_text))
        self._route_counter += 1
        decision = self.router.route(
            vec, self.pool, query_id=f"srv_{self._route_counter:06d}", task_id=task_id
        )
        return {"model_id": decision.chosen, "scores": decision.to_dict()["scores"]}

    def register(self, entry: dict) -> dict:
        for key in ("id", "family_id", "description"):
            if key not in entry:
                raise ConfigError(f"model card is missing {key!r}")
        card = ModelCard(
            id=entry["id"],
            family_id=entry["family_id"],
            description=entry["description"],
            scores={k: float(v) for k, v in entry.get("scores", {}).items()},
        )
        with self._write_lock:
            if card.id in self.pool:
                raise DuplicateId(card.id)
            integrate_new_model(
                self.router, self.pool, self.graph, card, self.spec, self.providers,
                trained=self.trained, templates=self.templates,
            )
            if not hasattr(self, "_registered"):
                self._registered = []
            self._registered.append(entry)
            self._persist()
        return self.pool_info()

    def pool_info(self) -> dict:
        return {
            "models": self.pool.ids,
            "spec": self.spec.short(),
            "router": self.cfg.router,
            "checksum": self.checksum(),
        }


def _status_for(exc: Exception) -> int:
    seen: Exception | None = exc
    while seen is not None:
        if isinstance(seen, (TransportError, ProviderTimeout)):
            return 503
        if isinstance(seen, DuplicateId):
            return 409
        seen = seen.__cause__
    if isinstance(exc, ColdRouteError):
        return 400
    return 500


class _Handler(BaseHTTPRequestHandler):
    server_version = f"coldroute/{__version__}"

    def log_message(self, fmt, *args):  # quiet by default
        pass

    @property
    def service(self) -> RoutingService:
        return self.server.service  # type: ignore[attr-defined]

    def _reply(self, status: int, payload: dict) -> None:
        body = json.dumps(payload, sort_keys=True).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        try:
            payload = json.loads(raw.decode("utf-8") or "null")
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise ConfigError(f"request body is not valid JSON: {exc}") from exc
        if not isinstance(payload, dict):
            raise ConfigError("request body must be a JSON object")
        return payload

    def do_GET(self) -> None:  # noqa: N802 - http.server API
        try:
            if self.path == "/healthz":
                self._reply(200, {"status": "ok", "version": __version__})
            elif self.path == "/pool":
                self._reply(200, self.service.pool_info())
            else:
                self._reply(404, {"error": f"no such path: {self.path}"})
        except Exception as exc:  # noqa: BLE001 - boundary translation
            self._reply(_status_for(exc), {"error": str(exc)})

    def do_POST(self) -> None:  # noqa: N802 - http.server API
        try:
            if self.path == "/route":
                body = self._body()
                if "query_text" not in body:
                    raise ConfigError("route body needs query_text")
                result = self.service.route(body["query_text"], body.get("task_id"))
                self._reply(200, result)
            elif self.path == "/models":
                result = self.service.register(self._body())
                self._reply(200, result)
            else:
                self._reply(404, {"error": f"no such path: {self.path}"})
        except Exception as exc:  # noqa: BLE001 - boundary translation
            self._reply(_status_for(exc), {"error": str(exc)})


def make_server(cfg: AppConfig) -> ThreadingHTTPServer:
    """Bound server with the service attached; call ``serve_forever`` to run."""
    service = RoutingService(cfg)
    httpd = ThreadingHTTPServer((cfg.host, cfg.port), _Handler)
    httpd.service = service  # type: ignore[attr-defined]
    return httpd


def serve(cfg: AppConfig) -> None:
    httpd = make_server(cfg)
    host, port = httpd.server_address[:2]
    print(f"coldroute service on http://{host}:{port} (pool of {len(httpd.service.pool)})")
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        httpd.server_close()
