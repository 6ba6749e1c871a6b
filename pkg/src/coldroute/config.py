"""Application configuration shared by the CLI and the routing service.

One JSON document names the card directory, providers, profile spec,
router kind, data files, and output paths.  All paths are resolved
relative to the config file's own directory, so a config can travel with
its data.  Remote provider endpoints and the API key may come from the
environment (``RP_EMBED_URL``, ``RP_LLM_URL``, ``RP_API_KEY``); the
config path itself may come from ``RP_CONFIG``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .providers import (
    DeterministicEmbedder,
    EchoSummarizer,
    Providers,
    RemoteEmbedder,
    RemoteSummarizer,
)

__all__ = ["AppConfig", "load_config", "make_providers", "ENV_CONFIG"]

ENV_CONFIG = "RP_CONFIG"
ENV_EMBED_URL = "RP_EMBED_URL"
ENV_LLM_URL = "RP_LLM_URL"
ENV_API_KEY = "RP_API_KEY"


@dataclass
class AppConfig:
    base_dir: Path
    cards_dir: Path
    dim: int = 64
    encoder: dict = field(default_factory=lambda: {"kind": "deterministic", "seed": 0})
    summarizer: dict = field(default_factory=lambda: {"kind": "echo"})
    spec: str = "emb:2"
    router: str = "sim"
    pool: list[str] | None = None
    interactions: Path | None = None
    tasks: Path | None = None
    rewards: Path | None = None
    eval_queries: list[str] | None = None
    new_model_card: Path | None = None
    aggregator: Path | None = None
    seed: int = 0
    random_seeds: list[int] = field(default_factory=lambda: [0, 1, 2, 3, 4, 5])
    threshold: float = 1.0
    hidden: int = 64
    out: Path = Path("report")
    host: str = "127.0.0.1"
    port: int = 8777
    state_path: Path | None = None
    templates_dir: Path | None = None


def _resolve(base: Path, value: str | None) -> Path | None:
    if value is None:
        return None
    path = Path(value)
    return path if path.is_absolute() else (base / path)


def load_config(path: str | Path) -> AppConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if "cards_dir" not in raw:
        raise ConfigError("config must name a cards_dir")
    base = path.resolve().parent
    service = raw.get("service", {})
    cfg = AppConfig(
        base_dir=base,
        cards_dir=_resolve(base, raw["cards_dir"]),
        dim=int(raw.get("dim", 64)),
        encoder=dict(raw.get("encoder", {"kind": "deterministic", "seed": 0})),
        summarizer=dict(raw.get("summarizer", {"kind": "echo"})),
        spec=raw.get("spec", "emb:2"),
        router=raw.get("router", "sim"),
        pool=raw.get("pool"),
        interactions=_resolve(base, raw.get("interactions")),
        tasks=_resolve(base, raw.get("tasks")),
        rewards=_resolve(base, raw.get("rewards")),
        eval_queries=raw.get("eval_queries"),
        new_model_card=_resolve(base, raw.get("new_model_card")),
        aggregator=_resolve(base, raw.get("aggregator")),
        seed=int(raw.get("seed", 0)),
        random_seeds=list(raw.get("random_seeds", [0, 1, 2, 3, 4, 5])),
        threshold=float(raw.get("threshold", 1.0)),
        hidden=int(raw.get("hidden", 64)),
        out=_resolve(base, raw.get("out", "report")),
        host=service.get("host", "127.0.0.1"),
        port=int(service.get("port", 8777)),
        state_path=_resolve(base, service.get("state_path")),
        templates_dir=_resolve(base, raw.get("templates_dir")),
    )
    if not cfg.cards_dir.exists():
        raise ConfigError(f"cards_dir does not exist: {cfg.cards_dir}")
    return cfg


def make_providers(cfg: AppConfig) -> Providers:
    """Build the encoder/summarizer pair, letting the environment fill URLs."""
    enc_cfg = dict(cfg.encoder)
    kind = enc_cfg.pop("kind", "deterministic")
    if kind == "deterministic":
        encoder = DeterministicEmbedder(dim=cfg.dim, seed=int(enc_cfg.get("seed", 0)))
    elif kind == "remote":
        url = enc_cfg.pop("url", None) or os.environ.get(ENV_EMBED_URL)
        if not url:
            raise ConfigError(f"remote encoder needs a url (config or {ENV_EMBED_URL})")
        api_key = enc_cfg.pop("api_key", None) or os.environ.get(ENV_API_KEY)
        encoder = RemoteEmbedder(url, dim=cfg.dim, api_key=api_key, **enc_cfg)
    else:
        raise ConfigError(f"unknown encoder kind {kind!r}")

    sum_cfg = dict(cfg.summarizer)
    kind = sum_cfg.pop("kind", "echo")
    if kind == "echo":
        summarizer = EchoSummarizer()
    elif kind == "remote":
        url = sum_cfg.pop("url", None) or os.environ.get(ENV_LLM_URL)
        if not url:
            raise ConfigError(f"remote summarizer needs a url (config or {ENV_LLM_URL})")
        api_key = sum_cfg.pop("api_key", None) or os.environ.get(ENV_API_KEY)
        summarizer = RemoteSummarizer(url, api_key=api_key, **sum_cfg)
    else:
        raise ConfigError(f"unknown summarizer kind {kind!r}")
    return Providers(encoder, summarizer)
