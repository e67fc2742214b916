"""Dense description ranking.

The built-in encoder hashes word unigrams and character trigrams into
2^15 buckets and mean-pools a learned linear projection of them, so the
same search / training / evaluation plumbing accepts an external neural
encoder (or a file of precomputed vectors) later.  Training uses online
contrastive loss on the mined pairs: paraphrases are pulled together,
confusing descriptions pushed below the margin.
"""

from __future__ import annotations

import json
import zlib
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .bm25 import ScoredHit
from .errors import EmptyPairSet, ZeroVector
from .tokenize import TokenizerConfig, index_tokenize

DEFAULT_DIM = 256
DEFAULT_BUCKETS = 1 << 15


def cosine_score(x, d) -> float:
    """Cosine similarity in [-1, 1]; raises ZeroVector on a zero input."""
    x = np.asarray(x, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    nx = float(np.linalg.norm(x))
    nd = float(np.linalg.norm(d))
    if nx == 0.0 or nd == 0.0:
        raise ZeroVector("cosine similarity is undefined for a zero vector")
    return float(x @ d) / (nx * nd)


@dataclass
class ContrastiveConfig:
    margin: float = 0.5
    max_negatives: int = 5  # per query per epoch
    epochs: int = 10
    learning_rate: float = 0.05
    seed: int = 0

    def validate(self) -> None:
        if not 0.0 < self.margin <= 1.0:
            raise ValueError("margin must be in (0, 1]")
        if self.max_negatives < 1:
            raise ValueError("max_negatives must be >= 1")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")


class HashedEmbeddingModel:
    """Hashed bag of word unigrams + char trigrams, linear projection,
    mean pooling.  Encoding is deterministic: equal strings embed equally."""

    def __init__(self, dim=DEFAULT_DIM, n_buckets=DEFAULT_BUCKETS, seed=0,
                 hash_seed=1, weights=None,
                 tokenizer_config: TokenizerConfig = TokenizerConfig()):
        self.dim = dim
        self.n_buckets = n_buckets
        self.seed = seed
        self.hash_seed = hash_seed
        self.tokenizer_config = tokenizer_config
        if weights is None:
            rng = np.random.default_rng(seed)
            weights = rng.standard_normal((dim, n_buckets)) / np.sqrt(dim)
        self.weights = np.ascontiguousarray(weights, dtype=np.float64)

    def copy(self) -> "HashedEmbeddingModel":
        return HashedEmbeddingModel(
            dim=self.dim, n_buckets=self.n_buckets, seed=self.seed,
            hash_seed=self.hash_seed, weights=self.weights.copy(),
            tokenizer_config=self.tokenizer_config,
        )

    def _bucket(self, feature: str) -> int:
        return zlib.crc32(feature.encode("utf-8"), self.hash_seed) % self.n_buckets

    def featurize(self, text: str) -> tuple[np.ndarray, np.ndarray]:
        """Bucket indices and mean-pooling weights for a text."""
        words = index_tokenize(text, self.tokenizer_config)
        joined = " ".join(words)
        feats = [f"w={w}" for w in words]
        feats += [f"3={joined[i:i + 3]}" for i in range(len(joined) - 2)]
        if not feats:
            return np.zeros(0, dtype=np.int64), np.zeros(0)
        counts: dict[int, float] = {}
        for f in feats:
            b = self._bucket(f)
            counts[b] = counts.get(b, 0.0) + 1.0
        idx = np.array(sorted(counts), dtype=np.int64)
        wgt = np.array([counts[b] for b in idx]) / float(len(feats))
        return idx, wgt

    def encode(self, text: str) -> np.ndarray:
        idx, wgt = self.featurize(text)
        if len(idx) == 0:
            return np.zeros(self.dim)
        return self.weights[:, idx] @ wgt

    def save(self, path) -> None:
        meta = {
            "dim": self.dim,
            "n_buckets": self.n_buckets,
            "seed": self.seed,
            "hash_seed": self.hash_seed,
        }
        np.savez(path, meta=json.dumps(meta), weights=self.weights)

    @classmethod
    def load(cls, path) -> "HashedEmbeddingModel":
        with np.load(path, allow_pickle=False) as data:
            meta = json.loads(str(data["meta"]))
            return cls(
                dim=meta["dim"], n_buckets=meta["n_buckets"], seed=meta["seed"],
                hash_seed=meta["hash_seed"], weights=data["weights"],
            )


class PrecomputedEmbeddings:
    """Record-id keyed vectors imported from an external encoder."""

    def __init__(self, vectors: dict[str, np.ndarray]):
        if not vectors:
            raise ValueError("no vectors")
        dims = {len(v) for v in vectors.values()}
        if len(dims) != 1:
            raise ValueError("inconsistent vector dimensions")
        self.dim = dims.pop()
        self.vectors = {k: np.asarray(v, dtype=np.float64) for k, v in vectors.items()}

    def vector_for(self, record_id: str) -> np.ndarray:
        if record_id not in self.vectors:
            raise KeyError(f"no imported vector for record {record_id!r}")
        return self.vectors[record_id]

    @classmethod
    def load(cls, path) -> "PrecomputedEmbeddings":
        """Parse "id<TAB>v1,v2,..." lines."""
        vectors = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rid, vec = line.split("\t")
                    vectors[rid] = np.array([float(x) for x in vec.split(",")])
                except ValueError as exc:
                    raise ValueError(f"{path}:{lineno}: {exc}") from exc
        return cls(vectors)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for rid, vec in self.vectors.items():
                fh.write(rid + "\t" + ",".join(repr(float(x)) for x in vec) + "\n")


def train_contrastive(
    paraphrase_pairs,
    confusing_pairs,
    texts_by_id: dict[str, str],
    config: ContrastiveConfig | None = None,
    base_model: HashedEmbeddingModel | None = None,
):
    """SGD over the mined pairs; returns (model, per-epoch mean loss).

    Negatives are down-sampled per query to config.max_negatives each
    epoch.  Fully deterministic for a fixed seed; epochs=0 returns the
    initialization untouched.
    """
    config = config or ContrastiveConfig()
    config.validate()
    if not paraphrase_pairs or not confusing_pairs:
        raise EmptyPairSet("need at least one paraphrase and one confusing pair")
    model = (base_model or HashedEmbeddingModel(seed=config.seed)).copy()

    feats: dict[str, tuple[np.ndarray, np.ndarray]] = {}

    def featurize(rid):
        if rid not in feats:
            feats[rid] = model.featurize(texts_by_id[rid])
        return feats[rid]

    negatives_by_query: dict[str, list] = {}
    for pair in confusing_pairs:
        negatives_by_query.setdefault(pair.query_id, []).append(pair)

    rng = np.random.default_rng(config.seed)
    trace: list[float] = []
    W = model.weights
    for _ in range(config.epochs):
        examples = [(p.i, p.j, True) for p in paraphrase_pairs]
        for query_id, negs in negatives_by_query.items():
            chosen = negs
            if len(negs) > config.max_negatives:
                pick = rng.choice(len(negs), size=config.max_negatives, replace=False)
                chosen = [negs[i] for i in sorted(pick)]
            examples.extend((p.i, p.j, False) for p in chosen)
        order = rng.permutation(len(examples))
        total = 0.0
        for n in order:
            a, b, positive = examples[n]
            idx_a, wgt_a = featurize(a)
            idx_b, wgt_b = featurize(b)
            total += _kernels.contrastive_update(
                W, idx_a, wgt_a, idx_b, wgt_b,
                config.learning_rate, config.margin, positive,
            )
        trace.append(total / max(len(examples), 1))
    return model, trace


class DenseIndex:
    """Precomputed, L2-normalized description embeddings for one model."""

    def __init__(self, records, model):
        self.ids = [r.record_id for r in records]
        self.model = model
        rows = []
        for r in records:
            if hasattr(model, "encode"):
                vec = model.encode(r.description_text)
            else:
                vec = model.vector_for(r.record_id)
            rows.append(vec)
        emb = np.array(rows) if rows else np.zeros((0, getattr(model, "dim", 1)))
        norms = np.linalg.norm(emb, axis=1)
        norms[norms == 0.0] = 1.0  # zero rows stay zero and score 0
        self.emb = np.ascontiguousarray(emb / norms[:, None])

    def query_vector(self, query) -> np.ndarray:
        if hasattr(self.model, "encode"):
            return self.model.encode(query)
        return self.model.vector_for(query)

    def search(self, query, k: int) -> list[ScoredHit]:
        """Top-k by cosine; `query` is text for encoders, a record id for
        precomputed vectors.  Ties break by record id ascending."""
        if k < 1:
            raise ValueError("k must be >= 1")
        if not self.ids:
            return []
        q = np.asarray(self.query_vector(query), dtype=np.float64)
        nq = float(np.linalg.norm(q))
        if nq == 0.0:
            return []
        scores = _kernels.dense_scores(self.emb, np.ascontiguousarray(q / nq))
        ranked = sorted(
            zip((float(s) for s in scores), self.ids),
            key=lambda pair: (-pair[0], pair[1]),
        )
        return [ScoredHit(rid, score) for score, rid in ranked[:k]]


def dense_search(query: str, records, model, k: int) -> list[ScoredHit]:
    return DenseIndex(records, model).search(query, k)
