"""Word embeddings: CBOW training, text-format loading, centroid query expansion."""

from __future__ import annotations

import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from numba import njit

from .corpus import Document
from .lexicon import ScoredLexicon

log = logging.getLogger(__name__)

# distances within this of the threshold count as inside it
_DIST_EPS = 1e-12


class EmbeddingError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class EmbeddingSpace:
    """Vectors for a vocabulary listed in frequency-rank order (rank 0 = most frequent)."""

    words: tuple[str, ...]
    vectors: np.ndarray

    def __post_init__(self):
        vecs = np.asarray(self.vectors, dtype=np.float64)
        if vecs.ndim != 2 or len(self.words) == 0:
            raise EmbeddingError("an embedding space needs a non-empty vocabulary")
        if vecs.shape[0] != len(self.words):
            raise EmbeddingError(f"{len(self.words)} words but {vecs.shape[0]} vectors")
        if len(set(self.words)) != len(self.words):
            raise EmbeddingError("duplicate words in embedding vocabulary")
        if not np.all(np.isfinite(vecs)):
            raise EmbeddingError("embedding vectors must be finite")
        vecs.setflags(write=False)
        object.__setattr__(self, "words", tuple(self.words))
        object.__setattr__(self, "vectors", vecs)

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]

    @cached_property
    def index(self) -> dict[str, int]:
        return {w: i for i, w in enumerate(self.words)}

    def frequency_rank(self, word: str) -> int:
        return self.index[word]

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def __len__(self) -> int:
        return len(self.words)

    def __getitem__(self, word: str) -> np.ndarray:
        return self.vectors[self.index[word]]

    def top(self, n: int) -> "EmbeddingSpace":
        """The ``n`` most frequent words."""
        if n >= len(self.words):
            return self
        return EmbeddingSpace(self.words[:n], self.vectors[:n])

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"{len(self.words)} {self.dimension}\n")
            for w, v in zip(self.words, self.vectors):
                fh.write(w + " " + " ".join(repr(float(x)) for x in v) + "\n")


def cosine_distance(u: np.ndarray, v: np.ndarray) -> float:
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise EmbeddingError("cosine distance is undefined for a zero vector")
    return float(1.0 - np.dot(u, v) / (nu * nv))


def load_embeddings(path: str | Path) -> EmbeddingSpace:
    """Read ``word v1 ... vd`` rows, with an optional ``<vocab_size> <dimension>`` header."""
    words, rows = [], []
    dim = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            if lineno == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
                continue
            word, values = parts[0], parts[1:]
            if dim is None:
                dim = len(values)
                if dim == 0:
                    raise EmbeddingError(f"{path}:{lineno}: row has no vector values")
            elif len(values) != dim:
                raise EmbeddingError(
                    f"{path}:{lineno}: expected {dim} values, found {len(values)}"
                )
            try:
                rows.append([float(x) for x in values])
            except ValueError:
                raise EmbeddingError(f"{path}:{lineno}: non-numeric vector value") from None
            words.append(word)
    if not words:
        raise EmbeddingError(f"{path}: no vectors")
    return EmbeddingSpace(tuple(words), np.array(rows))


def _context_matrix(encoded: list[np.ndarray], window: int) -> tuple[np.ndarray, np.ndarray]:
    """Centers and a (positions, 2*window) matrix of context ids, -1 where absent."""
    offsets = [o for o in range(-window, window + 1) if o != 0]
    centers, contexts = [], []
    for arr in encoded:
        n = len(arr)
        if n < 2:
            continue
        ctx = np.full((n, len(offsets)), -1, dtype=np.int64)
        for j, o in enumerate(offsets):
            if abs(o) >= n:
                continue
            if o < 0:
                ctx[-o:, j] = arr[:n + o]
            else:
                ctx[:n - o, j] = arr[o:]
        centers.append(arr)
        contexts.append(ctx)
    if not centers:
        return np.empty(0, dtype=np.int64), np.empty((0, len(offsets)), dtype=np.int64)
    return np.concatenate(centers), np.concatenate(contexts)


@njit(cache=True, nogil=True)
def _cbow_pass(order, centers, contexts, dist, shrink, negs, w_in, w_out, alpha, step0, total_steps, window):
    """Sequential CBOW / negative-sampling updates over ``order``; returns nothing."""
    dim = w_in.shape[1]
    n_ctx_slots = contexts.shape[1]
    h = np.empty(dim)
    neu = np.empty(dim)
    for p in range(order.shape[0]):
        i = order[p]
        lr = alpha * max(1.0 - (step0 + p) / total_steps, 1e-4)
        eff = window - shrink[p]
        for k in range(dim):
            h[k] = 0.0
            neu[k] = 0.0
        n = 0
        for j in range(n_ctx_slots):
            c = contexts[i, j]
            if c >= 0 and dist[j] <= eff:
                n += 1
                for k in range(dim):
                    h[k] += w_in[c, k]
        if n == 0:
            continue
        for k in range(dim):
            h[k] /= n
        center = centers[i]
        for s in range(negs.shape[1] + 1):
            if s == 0:
                t = center
                label = 1.0
            else:
                t = negs[p, s - 1]
                if t == center:
                    continue
                label = 0.0
            score = 0.0
            for k in range(dim):
                score += h[k] * w_out[t, k]
            if score > 30.0:
                score = 30.0
            elif score < -30.0:
                score = -30.0
            g = (label - 1.0 / (1.0 + np.exp(-score))) * lr
            for k in range(dim):
                neu[k] += g * w_out[t, k]
                w_out[t, k] += g * h[k]
        for j in range(n_ctx_slots):
            c = contexts[i, j]
            if c >= 0 and dist[j] <= eff:
                for k in range(dim):
                    w_in[c, k] += neu[k]


def train_cbow(
    docs: Iterable[Document | Sequence[str]],
    dimension: int = 200,
    window: int = 5,
    epochs: int = 5,
    seed: int = 0,
    negative: int = 5,
    min_count: int = 5,
    alpha: float = 0.025,
    workers: int = 1,
) -> EmbeddingSpace:
    """Continuous bag-of-words with negative sampling.

    The context vector is the mean of the in-window context embeddings; the
    effective window is shrunk at random per position and the learning rate
    decays linearly from ``alpha`` to ``alpha * 1e-4``, as in word2vec.

    With ``workers=1`` the result is a pure function of the inputs and seed.
    ``workers > 1`` shards each epoch across threads that update the shared
    weights without locking, so run-to-run results differ.
    """
    if dimension < 2:
        raise EmbeddingError(f"dimension must be at least 2, got {dimension}")
    if window < 1 or epochs < 1 or negative < 1 or workers < 1:
        raise EmbeddingError("window, epochs, negative and workers must be positive")

    sentences = [d.tokens if isinstance(d, Document) else tuple(d) for d in docs]
    counts = Counter(t for s in sentences for t in s)
    vocab = sorted((w for w, c in counts.items() if c >= min_count), key=lambda w: (-counts[w], w))
    if not vocab:
        raise EmbeddingError(f"no word occurs at least {min_count} times")
    index = {w: i for i, w in enumerate(vocab)}
    encoded = [np.array([index[t] for t in s if t in index], dtype=np.int64) for s in sentences]
    total = sum(len(a) for a in encoded)
    if total <= window:
        raise EmbeddingError(f"corpus of {total} in-vocabulary tokens is smaller than window {window}")

    centers, contexts = _context_matrix(encoded, window)
    n_pos = len(centers)
    if n_pos == 0:
        raise EmbeddingError("no position has any context word")
    dist = np.abs(np.array([o for o in range(-window, window + 1) if o != 0], dtype=np.int64))

    V = len(vocab)
    rng = np.random.default_rng(seed)
    w_in = (rng.random((V, dimension)) - 0.5) / dimension
    w_out = np.zeros((V, dimension))
    noise = np.array([counts[w] for w in vocab], dtype=np.float64) ** 0.75
    noise_cdf = np.cumsum(noise / noise.sum())
    noise_cdf[-1] = 1.0
    total_steps = float(epochs * n_pos)

    for epoch in range(epochs):
        order = rng.permutation(n_pos)
        shrink = rng.integers(0, window, size=n_pos)
        negs = np.searchsorted(noise_cdf, rng.random((n_pos, negative)), side="right")
        step0 = epoch * n_pos
        if workers == 1:
            _cbow_pass(order, centers, contexts, dist, shrink, negs, w_in, w_out,
                       alpha, step0, total_steps, window)
        else:
            bounds = np.linspace(0, n_pos, workers + 1).astype(np.int64)

            def run_shard(k: int) -> None:
                lo, hi = bounds[k], bounds[k + 1]
                _cbow_pass(order[lo:hi], centers, contexts, dist, shrink[lo:hi], negs[lo:hi],
                           w_in, w_out, alpha, step0 + lo, total_steps, window)

            with ThreadPoolExecutor(max_workers=workers) as pool:
                list(pool.map(run_shard, range(workers)))
        log.debug("cbow epoch %d/%d done", epoch + 1, epochs)

    return EmbeddingSpace(tuple(vocab), w_in)


@dataclass(frozen=True)
class ExpansionConfig:
    K: int = 500
    t: float = 0.4
    mode: str = "augment"
    vocab_cap: int = 50_000

    def __post_init__(self):
        if self.K < 1:
            raise ValueError(f"K must be at least 1, got {self.K}")
        if not 0.0 <= self.t <= 2.0:
            raise ValueError(f"t must lie in [0, 2], got {self.t}")
        if self.mode not in ("augment", "replace"):
            raise ValueError(f"mode must be 'augment' or 'replace', got {self.mode!r}")
        if self.vocab_cap < 1:
            raise ValueError(f"vocab_cap must be at least 1, got {self.vocab_cap}")


# monolingual runs add neighbours to the base lexicon; cross-lingual runs keep only neighbours
MONOLINGUAL = ExpansionConfig(K=500, t=0.4, mode="augment")
CROSS_LINGUAL = ExpansionConfig(K=1000, t=0.3, mode="replace")


def centroid(words: Iterable[str], space: EmbeddingSpace, mean: bool = False) -> np.ndarray:
    rows = [space.index[w] for w in words if w in space.index]
    if not rows:
        raise EmbeddingError("no word is in the embedding vocabulary")
    vecs = space.vectors[rows]
    return vecs.mean(axis=0) if mean else vecs.sum(axis=0)


def nearest_to(
    center: np.ndarray,
    space: EmbeddingSpace,
    k: int,
    max_distance: float = 2.0,
) -> list[tuple[str, float]]:
    """Up to ``k`` (word, cosine distance) pairs closest to ``center``, within ``max_distance``.

    Zero vectors are never candidates. Ties go to the more frequent word.
    """
    cnorm = np.linalg.norm(center)
    if cnorm == 0:
        raise EmbeddingError("centroid is the zero vector")
    norms = np.linalg.norm(space.vectors, axis=1)
    ok = norms > 0
    dist = np.full(len(space), np.inf)
    dist[ok] = 1.0 - (space.vectors[ok] @ center) / (norms[ok] * cnorm)
    order = np.argsort(dist, kind="stable")
    out = []
    for i in order:
        if len(out) >= k or dist[i] > max_distance + _DIST_EPS:
            break
        out.append((space.words[i], float(max(dist[i], 0.0))))
    return out


def expand_lexicon(lex: ScoredLexicon, space: EmbeddingSpace, cfg: ExpansionConfig) -> ScoredLexicon:
    """Grow (augment) or replace a lexicon with neighbours of its embedding centroid.

    The centroid is the sum of the vectors of lexicon words found among the
    ``cfg.vocab_cap`` most frequent words, which are also the only candidates.
    Output scores are cosine similarity to the centroid.
    """
    capped = space.top(cfg.vocab_cap)
    present = [w for w in lex.words if w in capped]
    if not present:
        raise EmbeddingError(f"no word of the {lex.frame!r} lexicon is in the embedding vocabulary")
    c = centroid(present, capped)
    neighbours = nearest_to(c, capped, cfg.K, cfg.t)
    scored = {w: 1.0 - d for w, d in neighbours}
    if cfg.mode == "augment":
        cnorm = np.linalg.norm(c)
        dropped = 0
        for w in lex.words:
            if w in scored:
                continue
            if w not in space:
                dropped += 1
                continue
            v = space[w]
            n = np.linalg.norm(v)
            scored[w] = float(v @ c / (n * cnorm)) if n > 0 else 0.0
        if dropped:
            log.warning("%s: %d lexicon words have no embedding and were dropped", lex.frame, dropped)
    return ScoredLexicon.from_scores(lex.frame, scored.items(), "expanded")
