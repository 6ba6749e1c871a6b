"""Text feature providers: encoders and summarizers.

Two families of backends share each contract:

* ``DeterministicEmbedder`` / ``EchoSummarizer`` run offline with no
  dependencies and are bitwise reproducible — the default for tests,
  fixtures, and any config that does not name an endpoint.
* ``RemoteEmbedder`` / ``RemoteSummarizer`` speak the common JSON-over-HTTP
  embeddings / chat shapes (``POST /v1/embeddings``, ``POST
  /v1/chat/completions`` at temperature 0) with retry, backoff, an
  in-flight cap, and an optional on-disk response cache.

Every encoder returns unit-norm vectors (zero vector for empty text) so
cosine scores and linear propagation mix features on a common scale.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyText,
    EncoderFailure,
    ProviderTimeout,
    SummarizerFailure,
    TransportError,
)
from .graph import EvidenceGraph, NodeKind

__all__ = [
    "TextEncoder",
    "Summarizer",
    "DeterministicEmbedder",
    "EchoSummarizer",
    "RemoteEmbedder",
    "RemoteSummarizer",
    "Providers",
    "encode_all",
    "tokenize",
]

# Inputs are capped at a byte length before encoding/summarizing; the cap is
# generous (model cards are short) and applied at a UTF-8 boundary.
DEFAULT_MAX_BYTES = 1 << 15


def _truncate_utf8(text: str, max_bytes: int) -> str:
    raw = text.encode("utf-8")
    if len(raw) <= max_bytes:
        return text
    return raw[:max_bytes].decode("utf-8", errors="ignore")


def tokenize(text: str) -> list[str]:
    """Lowercase word tokens; everything non-alphanumeric separates."""
    out: list[str] = []
    word: list[str] = []
    for ch in text.lower():
        if ch.isalnum():
            word.append(ch)
        elif word:
            out.append("".join(word))
            word = []
    if word:
        out.append("".join(word))
    return out


class TextEncoder:
    """Contract: ``encode(text)`` -> unit-norm float64 vector of size ``dim``."""

    dim: int

    def encode(self, text: str) -> np.ndarray:
        raise NotImplementedError

    def encode_batch(self, texts: list[str]) -> list[np.ndarray]:
        return [self.encode(t) for t in texts]


class Summarizer:
    """Contract: ``summarize(prompt)`` -> UTF-8 text, deterministic per prompt."""

    def summarize(self, prompt: str) -> str:
        raise NotImplementedError


# --- offline backends ------------------------------------------------------

class DeterministicEmbedder(TextEncoder):
    """Hash-seeded pseudorandom projection of token counts.

    Each token maps to a fixed Gaussian direction drawn from a generator
    seeded by blake2b(seed, token), so unseen texts — new model cards — get
    stable embeddings without any lookup table.  The bag-of-tokens sum is
    L2-normalized; empty text maps to the zero vector.
    """

    def __init__(self, dim: int = 64, seed: int = 0, max_bytes: int = DEFAULT_MAX_BYTES):
        self.dim = int(dim)
        self.seed = int(seed)
        self.max_bytes = int(max_bytes)
        self._token_cache: dict[str, np.ndarray] = {}
        self._lock = threading.Lock()

    def _token_vector(self, token: str) -> np.ndarray:
        with self._lock:
            vec = self._token_cache.get(token)
        if vec is not None:
            return vec
        digest = hashlib.blake2b(
            f"{self.seed}\x1f{token}".encode("utf-8"), digest_size=8
        ).digest()
        rng = np.random.default_rng(int.from_bytes(digest, "big"))
        vec = rng.standard_normal(self.dim)
        with self._lock:
            self._token_cache.setdefault(token, vec)
        return vec

    def encode(self, text: str) -> np.ndarray:
        counts = Counter(tokenize(_truncate_utf8(text, self.max_bytes)))
        acc = np.zeros(self.dim)
        for token, count in counts.items():
            acc += count * self._token_vector(token)
        norm = np.linalg.norm(acc)
        if norm == 0.0:
            return np.zeros(self.dim)
        return acc / norm


class EchoSummarizer(Summarizer):
    """Test double and offline default: returns the prompt verbatim.

    Useful because the rendered prompt already contains the self id, every
    neighbor id exactly once, and the neighbors' previous-hop texts — so
    repeated hops accumulate exactly the reachable ids, which the
    reachability checks inspect.
    """

    def summarize(self, prompt: str) -> str:
        return prompt


# --- remote backends -------------------------------------------------------

@dataclass
class _HttpJson:
    """Shared POST-JSON plumbing: retries, backoff, cap, optional disk cache."""

    api_key: str | None = None
    timeout: float = 30.0
    retries: int = 3
    backoff: float = 0.5
    max_in_flight: int = 4
    cache_dir: str | None = None
    _gate: threading.Semaphore = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._gate = threading.Semaphore(self.max_in_flight)

    def _cache_path(self, url: str, payload: dict) -> Path | None:
        if not self.cache_dir:
            return None
        key = hashlib.sha256(
            json.dumps({"url": url, "payload": payload}, sort_keys=True).encode()
        ).hexdigest()
        return Path(self.cache_dir) / f"{key}.json"

    def post(self, url: str, payload: dict) -> dict:
        cache = self._cache_path(url, payload)
        if cache is not None and cache.exists():
            return json.loads(cache.read_text())

        import requests

        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        last: Exception | None = None
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(self.backoff * (2 ** (attempt - 1)))
            try:
                with self._gate:
                    resp = requests.post(
                        url, json=payload, headers=headers, timeout=self.timeout
                    )
            except requests.Timeout as exc:
                last = ProviderTimeout(str(exc))
                continue
            except requests.RequestException as exc:
                last = TransportError(str(exc))
                continue
            if resp.status_code >= 500 or resp.status_code == 429:
                last = TransportError(f"status {resp.status_code}", resp.status_code)
                continue
            if resp.status_code != 200:
                raise TransportError(f"status {resp.status_code}", resp.status_code)
            body = resp.json()
            if cache is not None:
                cache.parent.mkdir(parents=True, exist_ok=True)
                cache.write_text(json.dumps(body, sort_keys=True))
            return body
        assert last is not None
        raise last


class RemoteEmbedder(TextEncoder):
    """OpenAI-style ``POST /v1/embeddings`` client, renormalized locally."""

    def __init__(
        self,
        url: str,
        dim: int,
        model: str = "default",
        api_key: str | None = None,
        batch_size: int = 64,
        max_bytes: int = DEFAULT_MAX_BYTES,
        **http_kwargs,
    ):
        self.url = url.rstrip("/")
        self.dim = int(dim)
        self.model = model
        self.max_bytes = int(max_bytes)
        self.batch_size = int(batch_size)
        self._http = _HttpJson(api_key=api_key, **http_kwargs)

    def encode(self, text: str) -> np.ndarray:
        return self.encode_batch([text])[0]

    def encode_batch(self, texts: list[str]) -> list[np.ndarray]:
        out: list[np.ndarray] = []
        for start in range(0, len(texts), self.batch_size):
            chunk = [_truncate_utf8(t, self.max_bytes) for t in texts[start : start + self.batch_size]]
            body = self._http.post(self.url, {"input": chunk, "model": self.model})
            rows = sorted(body["data"], key=lambda r: r["index"])
            if len(rows) != len(chunk):
                raise TransportError(
                    f"embeddings response has {len(rows)} rows for {len(chunk)} inputs"
                )
            for row in rows:
                vec = np.asarray(row["embedding"], dtype=np.float64)
                if vec.shape != (self.dim,):
                    raise DimensionMismatch(self.dim, vec.shape[0], "remote embedding")
                norm = np.linalg.norm(vec)
                out.append(vec / norm if norm > 0 else np.zeros(self.dim))
        return out


class RemoteSummarizer(Summarizer):
    """OpenAI-style ``POST /v1/chat/completions`` client at temperature 0."""

    def __init__(
        self,
        url: str,
        model: str = "default",
        api_key: str | None = None,
        max_bytes: int = DEFAULT_MAX_BYTES,
        **http_kwargs,
    ):
        self.url = url.rstrip("/")
        self.model = model
        self.max_bytes = int(max_bytes)
        self._http = _HttpJson(api_key=api_key, **http_kwargs)

    def summarize(self, prompt: str) -> str:
        payload = {
            "model": self.model,
            "temperature": 0,
            "messages": [{"role": "user", "content": _truncate_utf8(prompt, self.max_bytes)}],
        }
        body = self._http.post(self.url, payload)
        try:
            text = body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise SummarizerFailure("<remote>", f"malformed chat response: {exc}")
        if not isinstance(text, str):
            raise SummarizerFailure("<remote>", "chat response content is not text")
        return text


# --- bundle and graph encoding --------------------------------------------

@dataclass
class Providers:
    """The encoder + summarizer pair threaded through profile construction."""

    encoder: TextEncoder
    summarizer: Summarizer

    @classmethod
    def deterministic(cls, dim: int = 64, seed: int = 0) -> "Providers":
        return cls(DeterministicEmbedder(dim=dim, seed=seed), EchoSummarizer())


def encode_all(
    graph: EvidenceGraph, encoder: TextEncoder, only_missing: bool = False
) -> EvidenceGraph:
    """Set every node's embedding to ``encoder.encode(node.text)`` in place.

    Non-query nodes must carry text; query nodes use their raw query text
    as-is.  With ``only_missing`` nodes that already have an embedding are
    left alone (used when a node is added to an encoded graph).  Returns
    the same graph for chaining.
    """
    for node_id in graph.node_ids:
        node = graph.node(node_id)
        if only_missing and node.embedding is not None:
            continue
        if node.kind is not NodeKind.QUERY and not node.text.strip():
            raise EmptyText(node_id)
        try:
            vec = encoder.encode(node.text)
        except Exception as exc:  # noqa: BLE001 - boundary translation
            raise EncoderFailure(node_id, exc) from exc
        vec = np.asarray(vec, dtype=np.float64)
        if vec.shape != (graph.dim,):
            raise EncoderFailure(
                node_id, DimensionMismatch(graph.dim, int(vec.shape[0]), "encode_all")
            )
        node.embedding = vec
    graph.validate()
    return graph
