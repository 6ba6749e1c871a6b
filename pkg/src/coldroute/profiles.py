"""Model profiles over the evidence graph.

A profile spec fixes four choices: organizational form (flat vs
structured), representation space (text vs embedding), aggregation depth
K, and whether aggregation is learned.  The four shipped instantiations:

* ``flat``      — concatenate the model's own card signals into one text,
                  then encode it.  No graph structure, K = 0.
* ``text:K``    — message passing in text space: each round rewrites every
                  non-query node's text from a kind-specific prompt over
                  its neighbors' previous texts, via a summarizer.
* ``emb:K``     — parameter-free propagation of node embeddings with
                  symmetric normalization and edge-score weighting.
* ``train:K``   — the same propagation interleaved with trained affine
                  layers, fit by masked reconstruction of node features
                  and edge scores.

All four return a vector per model; text forms keep the text alongside.
"""

from __future__ import annotations

import json
import math
import string
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import nn
from .errors import (
    DimensionMismatch,
    InvalidSpec,
    NonFiniteLoss,
    QueryNodeUpdateAttempt,
    SummarizerFailure,
    UninitializedEmbedding,
    UnknownNode,
)
from .graph import EvidenceGraph, NodeKind, closed_neighborhood
from .providers import Providers, Summarizer, TextEncoder

__all__ = [
    "ProfileSpec",
    "Profile",
    "flat_profile",
    "embgnn_propagate",
    "PromptTemplate",
    "default_templates",
    "load_templates",
    "render_prompt",
    "textgnn_step",
    "textgnn_run",
    "textgnn_profile",
    "TrainGnnModel",
    "traingnn_fit",
    "traingnn_states",
    "traingnn_profile",
    "make_profiles",
    "save_profiles",
    "load_profiles",
]

MAX_DEPTH = 4


@dataclass(frozen=True)
class ProfileSpec:
    """The (form, representation, depth, learning) point being instantiated."""

    form: str  # "flat" | "structured"
    representation: str  # "text" | "embedding"
    depth: int
    learning: str  # "training_free" | "trainable"

    def __post_init__(self) -> None:
        if self.form not in ("flat", "structured"):
            raise InvalidSpec(f"unknown form {self.form!r}")
        if self.representation not in ("text", "embedding"):
            raise InvalidSpec(f"unknown representation {self.representation!r}")
        if self.learning not in ("training_free", "trainable"):
            raise InvalidSpec(f"unknown learning mode {self.learning!r}")
        if not (0 <= self.depth <= MAX_DEPTH):
            raise InvalidSpec(f"depth {self.depth} outside [0, {MAX_DEPTH}]")
        if self.form == "flat":
            if self.depth != 0 or self.learning != "training_free" or self.representation != "text":
                raise InvalidSpec("flat profiles are text-based, depth 0, training-free")
        else:
            if self.depth < 1:
                raise InvalidSpec("structured profiles need depth >= 1")
        if self.learning == "trainable" and (
            self.representation != "embedding" or self.form != "structured"
        ):
            raise InvalidSpec("trainable aggregation requires structured embedding profiles")

    @classmethod
    def parse(cls, short: str) -> "ProfileSpec":
        """Parse the compact form: ``flat``, ``text:K``, ``emb:K``, ``train:K``."""
        short = short.strip().lower()
        if short == "flat":
            return cls("flat", "text", 0, "training_free")
        head, sep, tail = short.partition(":")
        if not sep or not tail.isdigit():
            raise InvalidSpec(f"cannot parse profile spec {short!r}")
        depth = int(tail)
        if head == "text":
            return cls("structured", "text", depth, "training_free")
        if head == "emb":
            return cls("structured", "embedding", depth, "training_free")
        if head == "train":
            return cls("structured", "embedding", depth, "trainable")
        raise InvalidSpec(f"cannot parse profile spec {short!r}")

    def short(self) -> str:
        if self.form == "flat":
            return "flat"
        if self.representation == "text":
            return f"text:{self.depth}"
        if self.learning == "trainable":
            return f"train:{self.depth}"
        return f"emb:{self.depth}"


@dataclass
class Profile:
    model_id: str
    spec: ProfileSpec
    vector: np.ndarray
    text: str | None = None

    def __post_init__(self) -> None:
        self.vector = np.asarray(self.vector, dtype=np.float64)
        if not np.all(np.isfinite(self.vector)):
            raise InvalidSpec(f"profile for {self.model_id!r} has non-finite entries")

    def to_dict(self) -> dict:
        entry: dict = {
            "model_id": self.model_id,
            "spec": self.spec.short(),
            "vector": [float(x) for x in self.vector],
        }
        if self.text is not None:
            entry["text"] = self.text
        return entry

    @classmethod
    def from_dict(cls, entry: dict) -> "Profile":
        return cls(
            model_id=entry["model_id"],
            spec=ProfileSpec.parse(entry["spec"]),
            vector=np.asarray(entry["vector"], dtype=np.float64),
            text=entry.get("text"),
        )


def save_profiles(profiles: dict[str, Profile], path: str | Path) -> None:
    with Path(path).open("w") as fh:
        for model_id in sorted(profiles):
            fh.write(json.dumps(profiles[model_id].to_dict(), sort_keys=True) + "\n")


def load_profiles(path: str | Path) -> dict[str, Profile]:
    out: dict[str, Profile] = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if line:
            profile = Profile.from_dict(json.loads(line))
            out[profile.model_id] = profile
    return out


# --- flat ------------------------------------------------------------------

def flat_profile(graph: EvidenceGraph, model_id: str, encoder: TextEncoder) -> Profile:
    """Family description, model description, then one sorted line per score."""
    node = graph.node(model_id)
    if node.kind is not NodeKind.MODEL:
        raise UnknownNode(model_id)
    family_text = ""
    score_lines: list[tuple[str, str]] = []
    for nb in graph.neighbors(model_id):
        other = graph.node(nb)
        if other.kind is NodeKind.MODEL_FAMILY:
            family_text = other.text
        elif other.kind is NodeKind.BENCHMARK:
            edge = graph.edge_between(model_id, nb)
            domain_id = next(
                (d for d in graph.neighbors(nb) if graph.node(d).kind is NodeKind.DOMAIN),
                "",
            )
            score_lines.append((nb, f"{nb} - {domain_id} - {edge.weight:.3f}"))
    parts = [family_text, node.text]
    parts.extend(line for _, line in sorted(score_lines))
    text = "\n".join(p for p in parts if p)
    spec = ProfileSpec("flat", "text", 0, "training_free")
    return Profile(model_id, spec, encoder.encode(text), text)


# --- embedding propagation -------------------------------------------------

def embgnn_propagate(graph: EvidenceGraph, depth: int) -> dict[str, np.ndarray]:
    """Parameter-free propagation: K rounds of normalized weighted averaging.

    Each round every node (queries included) becomes the coefficient-weighted
    sum of its closed neighborhood's previous states.  The self term uses
    weight 1; scored edges use their score.
    """
    if depth < 1:
        raise InvalidSpec(f"propagation depth must be >= 1, got {depth}")
    states: dict[str, np.ndarray] = {}
    for nid in graph.node_ids:
        emb = graph.node(nid).embedding
        if emb is None:
            raise UninitializedEmbedding(nid)
        states[nid] = np.asarray(emb, dtype=np.float64)

    sizes = {nid: len(closed_neighborhood(graph, nid)) for nid in graph.node_ids}
    # (neighbor, coefficient) lists are hop-independent; build them once.
    terms: dict[str, list[tuple[str, float]]] = {}
    for v in graph.node_ids:
        acc = [(v, 1.0 / sizes[v])]
        for u in graph.neighbors(v):
            edge = graph.edge_between(v, u)
            w = 1.0 if edge.weight is None else float(edge.weight)
            acc.append((u, w / math.sqrt(sizes[v] * sizes[u])))
        terms[v] = acc

    for _ in range(depth):
        nxt: dict[str, np.ndarray] = {}
        for v in graph.node_ids:
            total = np.zeros(graph.dim)
            for u, coeff in terms[v]:
                total += coeff * states[u]
            nxt[v] = total
        states = nxt
    return states


# --- text propagation ------------------------------------------------------

_TEMPLATE_FIELDS = ("node_id", "kind", "hop", "sentence_range", "self_text", "neighbor_block")

_DEFAULT_BODY = """\
[input] Capability card refresh for ${node_id} (kind: ${kind}, round ${hop}).
Current summary of ${node_id}:
${self_text}
Evidence from directly connected graph neighbors:
${neighbor_block}
[instruction] Rewrite the summary of ${node_id} in ${sentence_range} sentences, \
merging the current summary with the neighbor evidence above. Keep concrete \
strengths, domains, and scores; drop repetition.
[output] The rewritten summary text only.
"""

_SENTENCE_RANGE = {
    NodeKind.MODEL: "3-5",
    NodeKind.MODEL_FAMILY: "2-4",
    NodeKind.BENCHMARK: "2-4",
    NodeKind.DOMAIN: "2-4",
}


@dataclass(frozen=True)
class PromptTemplate:
    kind: NodeKind
    body: str

    def render(self, **fields: str) -> str:
        return string.Template(self.body).substitute(**fields)


def default_templates() -> dict[NodeKind, PromptTemplate]:
    return {
        kind: PromptTemplate(kind, _DEFAULT_BODY)
        for kind in (NodeKind.MODEL, NodeKind.MODEL_FAMILY, NodeKind.BENCHMARK, NodeKind.DOMAIN)
    }


def load_templates(directory: str | Path) -> dict[NodeKind, PromptTemplate]:
    """Override built-ins with ``<kind>.txt`` files from a directory."""
    templates = default_templates()
    directory = Path(directory)
    for kind in list(templates):
        path = directory / f"{kind.value}.txt"
        if path.exists():
            templates[kind] = PromptTemplate(kind, path.read_text())
    return templates


def render_prompt(
    graph: EvidenceGraph,
    node_id: str,
    texts: dict[str, str],
    hop: int,
    templates: dict[NodeKind, PromptTemplate] | None = None,
) -> str:
    """Deterministic prompt: self text plus one line per neighbor, sorted by id."""
    node = graph.node(node_id)
    if node.kind is NodeKind.QUERY:
        raise QueryNodeUpdateAttempt(node_id)
    templates = templates or default_templates()
    lines = []
    for nb in graph.neighbors(node_id):
        other = graph.node(nb)
        edge = graph.edge_between(node_id, nb)
        score = "" if edge.weight is None else f", score {edge.weight:.3f}"
        lines.append(f"- {nb} ({other.kind.value}{score}): {texts[nb]}")
    neighbor_block = "\n".join(lines) if lines else "(no connected neighbors)"
    return templates[node.kind].render(
        node_id=node_id,
        kind=node.kind.value,
        hop=str(hop),
        sentence_range=_SENTENCE_RANGE[node.kind],
        self_text=texts[node_id],
        neighbor_block=neighbor_block,
    )


def textgnn_step(
    graph: EvidenceGraph,
    node_id: str,
    texts: dict[str, str],
    hop: int,
    summarizer: Summarizer,
    templates: dict[NodeKind, PromptTemplate] | None = None,
) -> str:
    prompt = render_prompt(graph, node_id, texts, hop, templates)
    try:
        out = summarizer.summarize(prompt)
    except SummarizerFailure:
        raise
    except Exception as exc:  # noqa: BLE001 - boundary translation
        raise SummarizerFailure(node_id, exc) from exc
    if not isinstance(out, str) or not out:
        raise SummarizerFailure(node_id, "summarizer returned empty output")
    return out


def textgnn_run(
    graph: EvidenceGraph,
    depth: int,
    summarizer: Summarizer,
    templates: dict[NodeKind, PromptTemplate] | None = None,
) -> dict[str, str]:
    """K synchronous text rounds; query nodes keep their raw text throughout."""
    if not (1 <= depth <= MAX_DEPTH):
        raise InvalidSpec(f"text propagation depth must be in [1, {MAX_DEPTH}], got {depth}")
    texts = {nid: graph.node(nid).text for nid in graph.node_ids}
    for hop in range(1, depth + 1):
        nxt: dict[str, str] = {}
        for nid in graph.node_ids:
            if graph.node(nid).kind is NodeKind.QUERY:
                nxt[nid] = texts[nid]
            else:
                nxt[nid] = textgnn_step(graph, nid, texts, hop, summarizer, templates)
        texts = nxt
    return texts


def textgnn_profile(
    graph: EvidenceGraph,
    model_id: str,
    depth: int,
    summarizer: Summarizer,
    encoder: TextEncoder,
    templates: dict[NodeKind, PromptTemplate] | None = None,
) -> Profile:
    if graph.node(model_id).kind is not NodeKind.MODEL:
        raise UnknownNode(model_id)
    texts = textgnn_run(graph, depth, summarizer, templates)
    spec = ProfileSpec("structured", "text", depth, "training_free")
    return Profile(model_id, spec, encoder.encode(texts[model_id]), texts[model_id])


# --- trained propagation ---------------------------------------------------

@dataclass
class _GraphTensors:
    ids: list[str]
    index: dict[str, int]
    features: np.ndarray  # (n, d) original node features
    sizes: np.ndarray  # (n,) closed-neighborhood counts
    edge_pairs: list[tuple[int, int]]  # all edges
    edge_weights: np.ndarray  # weight per edge (1.0 where unscored)
    scored_idx: np.ndarray  # positions in edge_pairs that carry a score


def _graph_tensors(graph: EvidenceGraph) -> _GraphTensors:
    ids = graph.node_ids
    index = {nid: i for i, nid in enumerate(ids)}
    rows = []
    for nid in ids:
        emb = graph.node(nid).embedding
        if emb is None:
            raise UninitializedEmbedding(nid)
        rows.append(np.asarray(emb, dtype=np.float64))
    features = np.stack(rows)
    sizes = np.asarray([len(closed_neighborhood(graph, nid)) for nid in ids], dtype=np.float64)
    pairs: list[tuple[int, int]] = []
    weights: list[float] = []
    scored: list[int] = []
    for pos, edge in enumerate(graph.edges):
        pairs.append((index[edge.src], index[edge.dst]))
        weights.append(1.0 if edge.weight is None else float(edge.weight))
        if edge.weight is not None:
            scored.append(pos)
    return _GraphTensors(
        ids, index, features, sizes, pairs, np.asarray(weights), np.asarray(scored, dtype=int)
    )


def _propagation_matrix(gt: _GraphTensors, edge_weights: np.ndarray) -> np.ndarray:
    n = len(gt.ids)
    s = np.zeros((n, n))
    inv_sqrt = 1.0 / np.sqrt(gt.sizes)
    s[np.arange(n), np.arange(n)] = inv_sqrt * inv_sqrt
    for (i, j), w in zip(gt.edge_pairs, edge_weights):
        coeff = w * inv_sqrt[i] * inv_sqrt[j]
        s[i, j] = coeff
        s[j, i] = coeff
    return s


@dataclass
class TrainGnnModel:
    """Trained aggregator: per-hop affine layers plus reconstruction heads."""

    depth: int
    dim: int
    hop_layers: list[nn.AffineLayer]
    node_head: nn.AffineLayer
    edge_head: nn.AffineLayer
    mask_ratio: float = 0.3
    loss_trace: list[float] = field(default_factory=list)

    @classmethod
    def create(cls, depth: int, dim: int, rng: np.random.Generator, mask_ratio: float = 0.3):
        if not (1 <= depth <= MAX_DEPTH):
            raise InvalidSpec(f"trainable depth must be in [1, {MAX_DEPTH}], got {depth}")
        if not (0.0 <= mask_ratio < 1.0):
            raise InvalidSpec(f"mask ratio must lie in [0, 1), got {mask_ratio}")
        return cls(
            depth=depth,
            dim=dim,
            hop_layers=[nn.AffineLayer.create(dim, dim, rng) for _ in range(depth)],
            node_head=nn.AffineLayer.create(dim, dim, rng),
            edge_head=nn.AffineLayer.create(1, 2 * dim, rng),
            mask_ratio=mask_ratio,
        )

    def layers(self) -> list[nn.AffineLayer]:
        return [*self.hop_layers, self.node_head, self.edge_head]

    def params(self) -> list[np.ndarray]:
        out: list[np.ndarray] = []
        for layer in self.layers():
            out.extend(layer.params())
        return out

    def grads(self) -> list[np.ndarray]:
        out: list[np.ndarray] = []
        for layer in self.layers():
            out.extend(layer.grads())
        return out

    def zero_grad(self) -> None:
        for layer in self.layers():
            layer.zero_grad()

    # -- forward / backward --

    def _forward(self, s: np.ndarray, x: np.ndarray):
        """Returns (final states, per-hop caches for backward)."""
        h = x
        caches = []
        for k, layer in enumerate(self.hop_layers):
            p = s @ h
            a = layer.forward(p)
            h = nn.relu(a) if k < self.depth - 1 else a
            caches.append(a)
        return h, caches

    def states(self, s: np.ndarray, x: np.ndarray) -> np.ndarray:
        if x.shape[1] != self.dim:
            raise DimensionMismatch(self.dim, x.shape[1], "trained aggregator input")
        h, _ = self._forward(s, x)
        return h

    def loss_and_grads(
        self,
        s: np.ndarray,
        x_masked: np.ndarray,
        x_orig: np.ndarray,
        node_batch: np.ndarray,
        edge_pairs: list[tuple[int, int]],
        edge_targets: np.ndarray,
    ) -> tuple[float, list[np.ndarray]]:
        """Masked-reconstruction loss and its exact gradients.

        ``node_batch`` indexes the masked nodes in this minibatch;
        ``edge_pairs``/``edge_targets`` are the masked scored edges with
        their pre-masking weights.  Total loss is the sum of the node and
        edge reconstruction terms.
        """
        self.zero_grad()
        h, caches = self._forward(s, x_masked)
        d_h = np.zeros_like(h)
        loss = 0.0

        if len(node_batch):
            pred = self.node_head.forward(h[node_batch])
            node_loss, d_pred = nn.mse(pred, x_orig[node_batch])
            loss += node_loss
            d_h[node_batch] += self.node_head.backward(d_pred)

        if len(edge_pairs):
            left = np.asarray([p[0] for p in edge_pairs])
            right = np.asarray([p[1] for p in edge_pairs])
            feats = np.concatenate([h[left], h[right]], axis=1)
            pred = self.edge_head.forward(feats).ravel()
            edge_loss, d_pred = nn.mse(pred, edge_targets)
            loss += edge_loss
            d_feats = self.edge_head.backward(d_pred.reshape(-1, 1))
            np.add.at(d_h, left, d_feats[:, : self.dim])
            np.add.at(d_h, right, d_feats[:, self.dim :])

        for k in range(self.depth - 1, -1, -1):
            d_a = d_h if k == self.depth - 1 else d_h * nn.relu_grad(caches[k])
            d_p = self.hop_layers[k].backward(d_a)
            d_h = s @ d_p  # s is symmetric, so this is the adjoint
        return loss, [g.copy() for g in self.grads()]

    # -- checkpointing --

    def to_checkpoint(self) -> dict:
        names = [f"hop_{k}" for k in range(self.depth)] + ["node_head", "edge_head"]
        params = {}
        for name, layer in zip(names, self.layers()):
            params[f"{name}.w"] = nn.array_to_payload(layer.W)
            params[f"{name}.b"] = nn.array_to_payload(layer.b)
        return {
            "kind": "traingnn",
            "depth": self.depth,
            "dim": self.dim,
            "mask_ratio": self.mask_ratio,
            "params": params,
        }

    @classmethod
    def from_checkpoint(cls, payload: dict) -> "TrainGnnModel":
        model = cls.create(
            payload["depth"],
            payload["dim"],
            np.random.default_rng(0),
            payload.get("mask_ratio", 0.3),
        )
        names = [f"hop_{k}" for k in range(model.depth)] + ["node_head", "edge_head"]
        for name, layer in zip(names, model.layers()):
            layer.W = nn.payload_to_array(payload["params"][f"{name}.w"])
            layer.b = nn.payload_to_array(payload["params"][f"{name}.b"])
        return model


def traingnn_fit(
    graph: EvidenceGraph,
    spec: ProfileSpec,
    seed: int = 0,
    *,
    mask_ratio: float = 0.3,
    epochs: int = 100,
    lr: float = 1e-3,
    batch_size: int = 64,
) -> TrainGnnModel:
    """Fit the trainable aggregator by masked reconstruction.

    Per epoch: sample masked nodes (features zeroed) and masked scored
    edges (weight replaced by the mean scored weight), then run Adam steps
    over minibatches of the masked nodes with full-graph propagation each
    step.  All masked edges contribute to every step of the epoch.
    """
    if spec.learning != "trainable":
        raise InvalidSpec(f"spec {spec.short()!r} is not trainable")
    gt = _graph_tensors(graph)
    if gt.features.shape[1] != graph.dim:
        raise DimensionMismatch(graph.dim, gt.features.shape[1], "graph features")
    rng = np.random.default_rng(seed)
    model = TrainGnnModel.create(spec.depth, graph.dim, rng, mask_ratio)
    adam = nn.AdamState.for_params(model.params(), lr=lr)

    n = len(gt.ids)
    n_scored = len(gt.scored_idx)
    mean_scored = float(gt.edge_weights[gt.scored_idx].mean()) if n_scored else 0.0
    n_mask_nodes = int(round(mask_ratio * n))
    n_mask_edges = int(round(mask_ratio * n_scored))

    for epoch in range(epochs):
        masked_nodes = np.sort(rng.choice(n, size=n_mask_nodes, replace=False))
        masked_edge_pos = np.sort(rng.choice(n_scored, size=n_mask_edges, replace=False)) if n_scored else np.asarray([], dtype=int)
        masked_edges = gt.scored_idx[masked_edge_pos] if n_mask_edges else np.asarray([], dtype=int)

        x_masked = gt.features.copy()
        x_masked[masked_nodes] = 0.0
        weights = gt.edge_weights.copy()
        weights[masked_edges] = mean_scored
        s = _propagation_matrix(gt, weights)
        edge_pairs = [gt.edge_pairs[pos] for pos in masked_edges]
        edge_targets = gt.edge_weights[masked_edges]

        order = rng.permutation(masked_nodes)
        batches = [order[i : i + batch_size] for i in range(0, len(order), batch_size)]
        if not batches and len(edge_pairs):
            batches = [np.asarray([], dtype=int)]
        losses = []
        for batch in batches:
            loss, grads = model.loss_and_grads(
                s, x_masked, gt.features, np.sort(batch), edge_pairs, edge_targets
            )
            if not np.isfinite(loss):
                raise NonFiniteLoss(f"epoch {epoch}")
            nn.adam_step(adam, model.params(), grads)
            losses.append(loss)
        model.loss_trace.append(float(np.mean(losses)) if losses else 0.0)
    return model


def traingnn_states(model: TrainGnnModel, graph: EvidenceGraph) -> dict[str, np.ndarray]:
    """Clean forward pass (no masking) over the current graph."""
    gt = _graph_tensors(graph)
    if gt.features.shape[1] != model.dim:
        raise DimensionMismatch(model.dim, gt.features.shape[1], "trained aggregator input")
    s = _propagation_matrix(gt, gt.edge_weights)
    h = model.states(s, gt.features)
    return {nid: h[i] for i, nid in enumerate(gt.ids)}


def traingnn_profile(model: TrainGnnModel, graph: EvidenceGraph, model_id: str) -> Profile:
    if graph.node(model_id).kind is not NodeKind.MODEL:
        raise UnknownNode(model_id)
    states = traingnn_states(model, graph)
    spec = ProfileSpec("structured", "embedding", model.depth, "trainable")
    return Profile(model_id, spec, states[model_id])


# --- dispatcher ------------------------------------------------------------

def make_profiles(
    graph: EvidenceGraph,
    spec: ProfileSpec,
    pool: list[str],
    providers: Providers,
    *,
    seed: int = 0,
    templates: dict[NodeKind, PromptTemplate] | None = None,
    trained: TrainGnnModel | None = None,
) -> dict[str, Profile]:
    """Dispatch to the four instantiations; output keyed by model id.

    For trainable specs a pre-fit aggregator can be passed in (the frozen
    path used when profiling a newly added model); otherwise one is fit
    here with the given seed.
    """
    for model_id in pool:
        if model_id not in graph or graph.node(model_id).kind is not NodeKind.MODEL:
            raise UnknownNode(model_id)

    if spec.form == "flat":
        return {m: flat_profile(graph, m, providers.encoder) for m in sorted(pool)}

    if spec.representation == "text":
        texts = textgnn_run(graph, spec.depth, providers.summarizer, templates)
        return {
            m: Profile(m, spec, providers.encoder.encode(texts[m]), texts[m])
            for m in sorted(pool)
        }

    if spec.learning == "training_free":
        states = embgnn_propagate(graph, spec.depth)
        return {m: Profile(m, spec, states[m]) for m in sorted(pool)}

    model = trained if trained is not None else traingnn_fit(graph, spec, seed)
    states = traingnn_states(model, graph)
    return {m: Profile(m, spec, states[m]) for m in sorted(pool)}
