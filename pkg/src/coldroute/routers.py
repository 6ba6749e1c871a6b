"""Routers over candidate pools, and frozen-router model integration.

Three routers with one calling convention (``route(query_vec, pool, ...)``):

* ``SimRouter``       — training-free cosine between query and profile.
* ``MlpRouter``       — two towers into a shared latent space; predicted
                        reward = sigmoid of the latent dot product; trained
                        by MSE against observed rewards.
* ``GraphRouterLite`` — a small heterogeneous graph of tasks, training
                        queries, and models; two propagation rounds with
                        affine+ReLU; a linear decoder reads the reward from
                        the (query, model) state pair.

Integration appends a new model to the pool using only its public-signal
profile; router parameters are never touched, which the checkpoint
checksum makes checkable.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import nn
from .errors import (
    ConfigError,
    DanglingReference,
    DimensionMismatch,
    DuplicateId,
    EmptyPool,
    InvalidSpec,
    NonFiniteLoss,
    UnassignedQuery,
    UnknownModelInInteractions,
    UnknownTask,
)
from .graph import EvidenceGraph, ModelCard
from .profiles import Profile, ProfileSpec, TrainGnnModel, make_profiles
from .providers import Providers

__all__ = [
    "InteractionRecord",
    "CandidatePool",
    "RoutingDecision",
    "SimRouter",
    "MlpRouter",
    "GraphRouterLite",
    "sim_route",
    "mlp_fit",
    "graphrouter_fit",
    "integrate_new_model",
    "router_checksum",
    "save_router",
    "load_router",
    "load_interactions",
    "save_interactions",
    "load_tasks",
    "save_tasks",
]


@dataclass(frozen=True)
class InteractionRecord:
    query_id: str
    model_id: str
    reward: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.reward <= 1.0):
            raise ConfigError(
                f"reward {self.reward!r} for ({self.query_id!r}, {self.model_id!r}) outside [0, 1]"
            )


def load_interactions(path: str | Path) -> list[InteractionRecord]:
    records = []
    seen: set[tuple[str, str]] = set()
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        entry = json.loads(line)
        rec = InteractionRecord(entry["query_id"], entry["model_id"], float(entry["reward"]))
        key = (rec.query_id, rec.model_id)
        if key in seen:
            raise ConfigError(f"duplicate interaction for {key!r}")
        seen.add(key)
        records.append(rec)
    return records


def save_interactions(records: list[InteractionRecord], path: str | Path) -> None:
    with Path(path).open("w") as fh:
        for rec in records:
            fh.write(
                json.dumps(
                    {"query_id": rec.query_id, "model_id": rec.model_id, "reward": rec.reward},
                    sort_keys=True,
                )
                + "\n"
            )


def load_tasks(path: str | Path) -> dict[str, str]:
    """Task assignment file: one ``{query_id, task_id}`` object per line."""
    out: dict[str, str] = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if line:
            entry = json.loads(line)
            out[entry["query_id"]] = entry["task_id"]
    return out


def save_tasks(assignment: dict[str, str], path: str | Path) -> None:
    with Path(path).open("w") as fh:
        for query_id in sorted(assignment):
            fh.write(
                json.dumps({"query_id": query_id, "task_id": assignment[query_id]}, sort_keys=True)
                + "\n"
            )


class CandidatePool:
    """Ordered model profiles sharing one dimension."""

    def __init__(self, profiles: list[Profile] | None = None):
        self._profiles: list[Profile] = []
        self._by_id: dict[str, Profile] = {}
        for profile in profiles or []:
            self.add(profile)

    def add(self, profile: Profile) -> None:
        if profile.model_id in self._by_id:
            raise DuplicateId(profile.model_id)
        if self._profiles and profile.vector.shape != self._profiles[0].vector.shape:
            raise DimensionMismatch(
                self._profiles[0].vector.shape[0], profile.vector.shape[0], "pool profile"
            )
        self._profiles.append(profile)
        self._by_id[profile.model_id] = profile

    @property
    def ids(self) -> list[str]:
        return [p.model_id for p in self._profiles]

    @property
    def dim(self) -> int:
        if not self._profiles:
            raise EmptyPool()
        return self._profiles[0].vector.shape[0]

    def __len__(self) -> int:
        return len(self._profiles)

    def __contains__(self, model_id: str) -> bool:
        return model_id in self._by_id

    def get(self, model_id: str) -> Profile:
        return self._by_id[model_id]

    def profiles(self) -> list[Profile]:
        return list(self._profiles)

    def matrix(self) -> np.ndarray:
        if not self._profiles:
            raise EmptyPool()
        return np.stack([p.vector for p in self._profiles])

    def to_dict(self) -> dict:
        return {"models": [p.to_dict() for p in self._profiles]}

    @classmethod
    def from_dict(cls, payload: dict) -> "CandidatePool":
        return cls([Profile.from_dict(entry) for entry in payload["models"]])

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), sort_keys=True))

    @classmethod
    def load(cls, path: str | Path) -> "CandidatePool":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass
class RoutingDecision:
    query_id: str
    chosen: str
    scores: dict[str, float]

    @classmethod
    def from_scores(cls, query_id: str, scores: dict[str, float]) -> "RoutingDecision":
        if not scores:
            raise EmptyPool()
        best = max(scores.values())
        chosen = min(mid for mid, s in scores.items() if s == best)
        return cls(query_id, chosen, scores)

    def to_dict(self) -> dict:
        return {
            "query_id": self.query_id,
            "chosen": self.chosen,
            "scores": {m: float(s) for m, s in sorted(self.scores.items())},
        }


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(a @ b / (na * nb))


def sim_route(query_vec: np.ndarray, pool: CandidatePool, query_id: str = "query") -> RoutingDecision:
    """Training-free cosine routing with smallest-id tie-break."""
    if len(pool) == 0:
        raise EmptyPool()
    query_vec = np.asarray(query_vec, dtype=np.float64)
    if query_vec.shape != (pool.dim,):
        raise DimensionMismatch(pool.dim, query_vec.shape[0], "query vector")
    scores = {p.model_id: _cosine(query_vec, p.vector) for p in pool.profiles()}
    return RoutingDecision.from_scores(query_id, scores)


@dataclass
class SimRouter:
    dim: int

    def route(
        self,
        query_vec: np.ndarray,
        pool: CandidatePool,
        query_id: str = "query",
        task_id: str | None = None,
    ) -> RoutingDecision:
        return sim_route(query_vec, pool, query_id)

    def to_checkpoint(self) -> dict:
        return {"kind": "sim", "dim": self.dim}

    @classmethod
    def from_checkpoint(cls, payload: dict) -> "SimRouter":
        return cls(dim=payload["dim"])


# --- two-tower router ------------------------------------------------------

class _Tower:
    """Affine -> ReLU -> affine; batch forward with cached pre-activations."""

    def __init__(self, first: nn.AffineLayer, second: nn.AffineLayer):
        self.first = first
        self.second = second
        self._a1: np.ndarray | None = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._a1 = self.first.forward(x)
        return self.second.forward(nn.relu(self._a1))

    def backward(self, d_out: np.ndarray) -> np.ndarray:
        d_h = self.second.backward(d_out)
        return self.first.backward(d_h * nn.relu_grad(self._a1))

    def layers(self) -> list[nn.AffineLayer]:
        return [self.first, self.second]


@dataclass
class MlpRouter:
    dim: int
    hidden: int
    query_tower: _Tower
    profile_tower: _Tower
    loss_trace: list[float] = field(default_factory=list)

    @classmethod
    def create(cls, dim: int, hidden: int, rng: np.random.Generator) -> "MlpRouter":
        def tower() -> _Tower:
            return _Tower(
                nn.AffineLayer.create(hidden, dim, rng), nn.AffineLayer.create(hidden, hidden, rng)
            )

        return cls(dim=dim, hidden=hidden, query_tower=tower(), profile_tower=tower())

    def layers(self) -> list[nn.AffineLayer]:
        return [*self.query_tower.layers(), *self.profile_tower.layers()]

    def params(self) -> list[np.ndarray]:
        return [p for layer in self.layers() for p in layer.params()]

    def grads(self) -> list[np.ndarray]:
        return [g for layer in self.layers() for g in layer.grads()]

    def zero_grad(self) -> None:
        for layer in self.layers():
            layer.zero_grad()

    def predict(self, query_vec: np.ndarray, profile_matrix: np.ndarray) -> np.ndarray:
        """Predicted reward for one query against each profile row."""
        zq = self.query_tower.forward(query_vec.reshape(1, -1))
        zp = self.profile_tower.forward(profile_matrix)
        return nn.sigmoid(zp @ zq.ravel())

    def route(
        self,
        query_vec: np.ndarray,
        pool: CandidatePool,
        query_id: str = "query",
        task_id: str | None = None,
    ) -> RoutingDecision:
        if len(pool) == 0:
            raise EmptyPool()
        query_vec = np.asarray(query_vec, dtype=np.float64)
        if query_vec.shape != (self.dim,):
            raise DimensionMismatch(self.dim, query_vec.shape[0], "query vector")
        preds = self.predict(query_vec, pool.matrix())
        scores = {mid: float(p) for mid, p in zip(pool.ids, preds)}
        return RoutingDecision.from_scores(query_id, scores)

    def to_checkpoint(self) -> dict:
        names = ["q1", "q2", "p1", "p2"]
        params = {}
        for name, layer in zip(names, self.layers()):
            params[f"{name}.w"] = nn.array_to_payload(layer.W)
            params[f"{name}.b"] = nn.array_to_payload(layer.b)
        return {"kind": "mlp", "dim": self.dim, "hidden": self.hidden, "params": params}

    @classmethod
    def from_checkpoint(cls, payload: dict) -> "MlpRouter":
        router = cls.create(payload["dim"], payload["hidden"], np.random.default_rng(0))
        for name, layer in zip(["q1", "q2", "p1", "p2"], router.layers()):
            layer.W = nn.payload_to_array(payload["params"][f"{name}.w"])
            layer.b = nn.payload_to_array(payload["params"][f"{name}.b"])
        return router


def mlp_fit(
    interactions: list[InteractionRecord],
    query_vecs: dict[str, np.ndarray],
    pool: CandidatePool,
    *,
    hidden: int = 64,
    epochs: int = 100,
    lr: float = 1e-3,
    batch_size: int = 64,
    seed: int = 0,
) -> MlpRouter:
    """Fit the two-tower reward regressor on observed interactions."""
    for rec in interactions:
        if rec.model_id not in pool:
            raise UnknownModelInInteractions(rec.model_id)
        if rec.query_id not in query_vecs:
            raise DanglingReference(rec.query_id, "interaction query")
    rng = np.random.default_rng(seed)
    router = MlpRouter.create(pool.dim, hidden, rng)
    if not interactions:
        return router

    q_mat = np.stack([np.asarray(query_vecs[r.query_id], dtype=np.float64) for r in interactions])
    p_mat = np.stack([pool.get(r.model_id).vector for r in interactions])
    rewards = np.asarray([r.reward for r in interactions])
    if q_mat.shape[1] != pool.dim:
        raise DimensionMismatch(pool.dim, q_mat.shape[1], "interaction query vector")

    adam = nn.AdamState.for_params(router.params(), lr=lr)
    n = len(interactions)
    for epoch in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            batch = order[start : start + batch_size]
            router.zero_grad()
            zq = router.query_tower.forward(q_mat[batch])
            zp = router.profile_tower.forward(p_mat[batch])
            s = np.sum(zq * zp, axis=1)
            pred = nn.sigmoid(s)
            loss, d_pred = nn.mse(pred, rewards[batch])
            if not np.isfinite(loss):
                raise NonFiniteLoss(f"epoch {epoch}")
            d_s = d_pred * pred * (1.0 - pred)
            router.query_tower.backward(d_s[:, None] * zp)
            router.profile_tower.backward(d_s[:, None] * zq)
            nn.adam_step(adam, router.params(), router.grads())
        # trace the full-dataset loss after the epoch's updates so the
        # curve reflects optimization progress, not minibatch shuffling
        zq_all = router.query_tower.forward(q_mat)
        zp_all = router.profile_tower.forward(p_mat)
        pred_all = nn.sigmoid(np.sum(zq_all * zp_all, axis=1))
        epoch_loss, _ = nn.mse(pred_all, rewards)
        router.loss_trace.append(float(epoch_loss))
    return router


# --- graph router ----------------------------------------------------------

@dataclass
class GraphRouterLite:
    """Frozen routing graph (tasks, training queries, reward edges) + GNN.

    Model nodes take their current pool profile as features at every call,
    so integrated models are scoreable with zero parameter updates; they
    simply have no reward edges.  Scoring is multiplicative: both nodes of
    a (query, model) pair pass through a shared bias-free read-out and a
    final ReLU, and the predicted reward is sigmoid(u_q . u_m).  Every
    layer on the path is bias-free, so an all-zero model profile maps to
    the all-zero state, its dot product with any query is exactly 0, and
    — because post-ReLU states are elementwise non-negative — 0 is the
    global floor of the score.  A model that brings no evidence can
    therefore never out-rank one that does.
    """

    dim: int
    hidden: int
    prop1: nn.AffineLayer
    prop2: nn.AffineLayer
    decoder: nn.AffineLayer
    tasks: dict[str, list[str]]  # task id -> member training query ids
    query_vecs: dict[str, np.ndarray]  # training query features
    interactions: list[InteractionRecord]
    loss_trace: list[float] = field(default_factory=list)

    @classmethod
    def create(
        cls,
        dim: int,
        hidden: int,
        rng: np.random.Generator,
        tasks: dict[str, list[str]],
        query_vecs: dict[str, np.ndarray],
        interactions: list[InteractionRecord],
    ) -> "GraphRouterLite":
        return cls(
            dim=dim,
            hidden=hidden,
            prop1=nn.AffineLayer.create(hidden, dim, rng),
            prop2=nn.AffineLayer.create(hidden, hidden, rng),
            decoder=nn.AffineLayer.create(hidden, hidden, rng),
            tasks={t: sorted(qs) for t, qs in sorted(tasks.items())},
            query_vecs=query_vecs,
            interactions=list(interactions),
        )

    def layers(self) -> list[nn.AffineLayer]:
        return [self.prop1, self.prop2, self.decoder]

    def params(self) -> list[np.ndarray]:
        # Biases are deliberately excluded: they stay zero so the zero
        # profile keeps its zero-state guarantee (see class docstring).
        return [layer.W for layer in self.layers()]

    def grads(self) -> list[np.ndarray]:
        return [layer.dW for layer in self.layers()]

    def zero_grad(self) -> None:
        for layer in self.layers():
            layer.zero_grad()

    # -- routing-graph assembly --

    def _assemble(
        self,
        pool: CandidatePool,
        extra_query: tuple[str, np.ndarray, str] | None = None,
    ):
        """Node order: tasks, training queries, pool models, then the routed query."""
        keys: list[tuple[str, str]] = []
        feats: list[np.ndarray] = []
        for tid in sorted(self.tasks):
            member_vecs = [self.query_vecs[q] for q in self.tasks[tid]]
            task_feat = np.mean(member_vecs, axis=0) if member_vecs else np.zeros(self.dim)
            keys.append(("t", tid))
            feats.append(task_feat)
        for qid in sorted(self.query_vecs):
            keys.append(("q", qid))
            feats.append(np.asarray(self.query_vecs[qid], dtype=np.float64))
        for profile in pool.profiles():
            keys.append(("m", profile.model_id))
            feats.append(profile.vector)
        edges: list[tuple[int, int, float]] = []
        index = {k: i for i, k in enumerate(keys)}
        for tid, members in self.tasks.items():
            for qid in members:
                edges.append((index[("q", qid)], index[("t", tid)], 1.0))
        for rec in self.interactions:
            if ("m", rec.model_id) in index:
                edges.append((index[("q", rec.query_id)], index[("m", rec.model_id)], rec.reward))
        if extra_query is not None:
            qid, vec, tid = extra_query
            if ("t", tid) not in index:
                raise UnknownTask(tid)
            keys.append(("x", qid))
            index[("x", qid)] = len(feats)
            feats.append(np.asarray(vec, dtype=np.float64))
            edges.append((index[("x", qid)], index[("t", tid)], 1.0))

        n = len(keys)
        x = np.stack(feats)
        if x.shape[1] != self.dim:
            raise DimensionMismatch(self.dim, x.shape[1], "routing graph features")
        degree = np.ones(n)  # closed-neighborhood counts start at the self term
        for i, j, _ in edges:
            degree[i] += 1
            degree[j] += 1
        inv_sqrt = 1.0 / np.sqrt(degree)
        s = np.zeros((n, n))
        s[np.arange(n), np.arange(n)] = inv_sqrt * inv_sqrt
        for i, j, w in edges:
            coeff = w * inv_sqrt[i] * inv_sqrt[j]
            s[i, j] += coeff
            s[j, i] += coeff
        return index, x, s

    def _forward(self, x: np.ndarray, s: np.ndarray):
        a1 = self.prop1.forward(s @ x)
        h1 = nn.relu(a1)
        a2 = self.prop2.forward(s @ h1)
        h2 = nn.relu(a2)
        a3 = self.decoder.forward(h2)
        u = nn.relu(a3)
        return u, (a1, a2, a3, s)

    def _pair_scores(self, u: np.ndarray, q_idx: np.ndarray, m_idx: np.ndarray):
        u_q, u_m = u[q_idx], u[m_idx]
        return nn.sigmoid(np.sum(u_q * u_m, axis=1)), u_q, u_m

    def route(
        self,
        query_vec: np.ndarray,
        pool: CandidatePool,
        query_id: str = "query",
        task_id: str | None = None,
    ) -> RoutingDecision:
        if len(pool) == 0:
            raise EmptyPool()
        if task_id is None:
            raise UnknownTask("<none>")
        index, x, s = self._assemble(pool, extra_query=(query_id, query_vec, task_id))
        u, _ = self._forward(x, s)
        q_idx = np.full(len(pool), index[("x", query_id)])
        m_idx = np.asarray([index[("m", mid)] for mid in pool.ids])
        preds, _, _ = self._pair_scores(u, q_idx, m_idx)
        scores = {mid: float(p) for mid, p in zip(pool.ids, preds)}
        return RoutingDecision.from_scores(query_id, scores)

    def to_checkpoint(self) -> dict:
        params = {}
        for name, layer in zip(["prop1", "prop2", "decoder"], self.layers()):
            params[f"{name}.w"] = nn.array_to_payload(layer.W)
        return {
            "kind": "graphrouter",
            "dim": self.dim,
            "hidden": self.hidden,
            "tasks": {t: list(qs) for t, qs in sorted(self.tasks.items())},
            "query_vecs": {
                q: nn.array_to_payload(np.asarray(v, dtype=np.float64))
                for q, v in sorted(self.query_vecs.items())
            },
            "interactions": [
                {"query_id": r.query_id, "model_id": r.model_id, "reward": r.reward}
                for r in self.interactions
            ],
            "params": params,
        }

    @classmethod
    def from_checkpoint(cls, payload: dict) -> "GraphRouterLite":
        router = cls.create(
            payload["dim"],
            payload["hidden"],
            np.random.default_rng(0),
            {t: list(qs) for t, qs in payload["tasks"].items()},
            {q: nn.payload_to_array(v) for q, v in payload["query_vecs"].items()},
            [
                InteractionRecord(e["query_id"], e["model_id"], e["reward"])
                for e in payload["interactions"]
            ],
        )
        for name, layer in zip(["prop1", "prop2", "decoder"], router.layers()):
            layer.W = nn.payload_to_array(payload["params"][f"{name}.w"])
        return router


def graphrouter_fit(
    tasks: dict[str, str],
    query_vecs: dict[str, np.ndarray],
    interactions: list[InteractionRecord],
    pool: CandidatePool,
    *,
    hidden: int = 64,
    epochs: int = 100,
    lr: float = 1e-4,
    batch_size: int = 64,
    seed: int = 0,
) -> GraphRouterLite:
    """Fit the graph router to regress observed rewards.

    ``tasks`` maps each training query id to its task id; every query in
    the interactions must be assigned.
    """
    seen_pairs: set[tuple[str, str]] = set()
    for rec in interactions:
        if rec.model_id not in pool:
            raise UnknownModelInInteractions(rec.model_id)
        if rec.query_id not in query_vecs:
            raise DanglingReference(rec.query_id, "interaction query")
        if rec.query_id not in tasks:
            raise UnassignedQuery(rec.query_id)
        key = (rec.query_id, rec.model_id)
        if key in seen_pairs:
            raise ConfigError(f"duplicate interaction for {key!r}")
        seen_pairs.add(key)
    members: dict[str, list[str]] = {}
    train_vecs = {}
    for qid in sorted(query_vecs):
        if qid not in tasks:
            raise UnassignedQuery(qid)
        members.setdefault(tasks[qid], []).append(qid)
        train_vecs[qid] = np.asarray(query_vecs[qid], dtype=np.float64)

    rng = np.random.default_rng(seed)
    router = GraphRouterLite.create(pool.dim, hidden, rng, members, train_vecs, interactions)
    if not interactions:
        return router

    index, x, s = router._assemble(pool)
    q_all = np.asarray([index[("q", r.query_id)] for r in interactions])
    m_all = np.asarray([index[("m", r.model_id)] for r in interactions])
    rewards = np.asarray([r.reward for r in interactions])

    adam = nn.AdamState.for_params(router.params(), lr=lr)
    n = len(interactions)
    for epoch in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            batch = order[start : start + batch_size]
            router.zero_grad()
            u, (a1, a2, a3, s_mat) = router._forward(x, s)
            preds, u_q, u_m = router._pair_scores(u, q_all[batch], m_all[batch])
            loss, d_pred = nn.mse(preds, rewards[batch])
            if not np.isfinite(loss):
                raise NonFiniteLoss(f"epoch {epoch}")
            d_dot = d_pred * preds * (1.0 - preds)
            d_u = np.zeros_like(u)
            np.add.at(d_u, q_all[batch], d_dot[:, None] * u_m)
            np.add.at(d_u, m_all[batch], d_dot[:, None] * u_q)
            d_a3 = d_u * nn.relu_grad(a3)
            d_h2 = router.decoder.backward(d_a3)
            d_a2 = d_h2 * nn.relu_grad(a2)
            d_sh1 = router.prop2.backward(d_a2)
            d_h1 = s_mat @ d_sh1
            d_a1 = d_h1 * nn.relu_grad(a1)
            router.prop1.backward(d_a1)
            nn.adam_step(adam, router.params(), router.grads())
        # trace the full-dataset loss after the epoch's updates so the
        # curve reflects optimization progress, not minibatch shuffling
        u, _ = router._forward(x, s)
        pred_all, _, _ = router._pair_scores(u, q_all, m_all)
        epoch_loss, _ = nn.mse(pred_all, rewards)
        router.loss_trace.append(float(epoch_loss))
    return router


# --- checkpoints and integration -------------------------------------------

_ROUTER_KINDS = {
    "sim": SimRouter,
    "mlp": MlpRouter,
    "graphrouter": GraphRouterLite,
}


def router_checksum(router) -> str:
    """SHA-256 over the canonical checkpoint JSON — the frozen contract."""
    blob = json.dumps(router.to_checkpoint(), sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def save_router(router, path: str | Path) -> None:
    Path(path).write_text(json.dumps(router.to_checkpoint(), sort_keys=True))


def load_router(path: str | Path):
    payload = json.loads(Path(path).read_text())
    kind = payload.get("kind")
    if kind not in _ROUTER_KINDS:
        raise ConfigError(f"unknown router kind {kind!r}")
    return _ROUTER_KINDS[kind].from_checkpoint(payload)


def integrate_new_model(
    router,
    pool: CandidatePool,
    graph: EvidenceGraph,
    card: ModelCard,
    spec: ProfileSpec,
    providers: Providers,
    *,
    trained: TrainGnnModel | None = None,
    templates=None,
) -> Profile:
    """Add a model to the evidence graph and the pool; router untouched.

    The new profile is computed on the expanded graph; existing pool
    profiles are never recomputed.  Trainable specs must pass the frozen
    aggregator that produced the existing profiles.
    """
    if card.id in pool:
        raise DuplicateId(card.id)
    if spec.learning == "trainable" and trained is None:
        raise InvalidSpec("integration under a trainable spec requires the frozen aggregator")
    from .graph import add_model_node
    from .providers import encode_all

    add_model_node(graph, card)
    encode_all(graph, providers.encoder, only_missing=True)
    profile = make_profiles(
        graph, spec, [card.id], providers, templates=templates, trained=trained
    )[card.id]
    pool.add(profile)
    return profile
