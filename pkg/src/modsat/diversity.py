"""Diversity of generated code: normalize, embed, cluster, take the entropy."""
from __future__ import annotations

import hashlib
import math
import os
import re
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

EMBED_DIM = 256
MAX_LLOYD_ITERS = 100

_BLOCK_COMMENT = re.compile(r"/\*.*?\*/", re.DOTALL)
_LINE_COMMENT = re.compile(r"//[^\n]*")
_TOKEN = re.compile(r"[A-Za-z_][A-Za-z_0-9]*|\d+\.?\d*(?:[eE][+-]?\d+)?|&&|\|\||[<>=!+\-*/%]=|\+\+|--|\S")


def normalize_code(source: str, indent: str = "    ") -> str:
    """Strip comments and re-indent by brace depth.

    Trailing whitespace goes, runs of blank lines collapse to one and the
    token stream is left untouched.
    """
    text = _BLOCK_COMMENT.sub(" ", source)
    text = _LINE_COMMENT.sub("", text)
    out = []
    depth = 0
    blank = False
    for raw in text.splitlines():
        line = " ".join(raw.split()) if raw.strip() else ""
        if not line:
            blank = bool(out)
            continue
        if blank:
            out.append("")
            blank = False
        level = depth - 1 if line.startswith("}") else depth
        out.append(indent * max(level, 0) + line)
        depth = max(0, depth + line.count("{") - line.count("}"))
    return "\n".join(out) + ("\n" if out else "")


def tokens(source: str) -> list[str]:
    return _TOKEN.findall(normalize_code(source))


def _bucket(a: str, b: str, m: int) -> int:
    digest = hashlib.blake2b(f"{a}\x00{b}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little") % m


def hashed_bigram_embedding(source: str, m: int = EMBED_DIM) -> np.ndarray:
    """Token-bigram counts hashed into ``m`` buckets, L2-normalised."""
    toks = tokens(source)
    vec = np.zeros(m)
    if not toks:
        return vec
    seq = ["<s>", *toks, "</s>"]
    for a, b in zip(seq, seq[1:]):
        vec[_bucket(a, b, m)] += 1.0
    return vec / np.linalg.norm(vec)


class EmbeddingError(RuntimeError):
    pass


@dataclass
class RemoteEmbedder:
    """POSTs ``{"input": text}`` and reads ``{"embedding": [...]}``.

    Configured from ``MODSAT_EMBED_URL`` and ``MODSAT_EMBED_KEY`` when not given.
    """

    url: Optional[str] = None
    api_key: Optional[str] = None
    timeout: float = 30.0

    def __post_init__(self):
        self.url = self.url or os.environ.get("MODSAT_EMBED_URL")
        self.api_key = self.api_key or os.environ.get("MODSAT_EMBED_KEY")

    def __call__(self, source: str) -> np.ndarray:
        import requests

        if not self.url:
            raise EmbeddingError("no embedding endpoint configured (MODSAT_EMBED_URL)")
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        try:
            resp = requests.post(self.url, json={"input": normalize_code(source)},
                                 headers=headers, timeout=self.timeout)
            resp.raise_for_status()
            vec = np.asarray(resp.json()["embedding"], dtype=float)
        except (requests.RequestException, KeyError, ValueError) as exc:
            raise EmbeddingError(f"embedding provider failed: {exc}") from exc
        if vec.ndim != 1 or not np.all(np.isfinite(vec)):
            raise EmbeddingError("embedding provider returned a malformed vector")
        return vec


def embed(source: str, provider: Optional[Callable[[str], np.ndarray]] = None) -> np.ndarray:
    if provider is None:
        return hashed_bigram_embedding(source)
    return np.asarray(provider(source), dtype=float)


# -- clustering --------------------------------------------------------------

@dataclass
class ClusterModel:
    centroids: np.ndarray  # (K, m)
    labels: np.ndarray  # (N,)
    sse_trace: list  # within-cluster SSE after seeding and after every Lloyd step
    iterations: int

    @property
    def k(self) -> int:
        return len(self.centroids)

    @property
    def sizes(self) -> list[int]:
        return np.bincount(self.labels, minlength=self.k).tolist()

    @property
    def sse(self) -> float:
        return self.sse_trace[-1]


def _sq_dists(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centroids[None, :, :]
    return np.einsum("nkm,nkm->nk", diff, diff)


def _assign(points, centroids):
    d = _sq_dists(points, centroids)
    labels = np.argmin(d, axis=1)
    return labels, float(d[np.arange(len(points)), labels].sum())


def kmeans_pp_seed(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(points)
    chosen = [int(rng.integers(n))]
    closest = ((points - points[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = int(rng.choice(n, p=closest / total))
        else:  # every point coincides with a centroid; pick an unused index
            rest = [i for i in range(n) if i not in chosen]
            idx = int(rest[int(rng.integers(len(rest)))])
        chosen.append(idx)
        closest = np.minimum(closest, ((points - points[idx]) ** 2).sum(axis=1))
    return points[chosen].copy()


def kmeans_pp(points, k: int, seed: int = 0, max_iter: int = MAX_LLOYD_ITERS) -> ClusterModel:
    """K-Means++ seeding followed by Lloyd iterations."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    n = len(pts)
    if n == 0:
        raise ValueError("cannot cluster an empty point set")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= K <= N, got K={k}, N={n}")
    rng = np.random.default_rng(seed)
    centroids = kmeans_pp_seed(pts, k, rng)
    labels, sse = _assign(pts, centroids)
    trace = [sse]
    it = 0
    for it in range(1, max_iter + 1):
        new = centroids.copy()
        for j in range(k):
            members = pts[labels == j]
            if len(members):
                new[j] = members.mean(axis=0)
        # Reseed empty clusters at the point farthest from its centroid.
        counts = np.bincount(labels, minlength=k)
        for j in np.flatnonzero(counts == 0):
            d = ((pts - new[labels]) ** 2).sum(axis=1)
            far = int(np.argmax(d))
            new[j] = pts[far]
            labels = labels.copy()
            labels[far] = j
        new_labels, sse = _assign(pts, new)
        trace.append(sse)
        converged = np.array_equal(new_labels, labels) and np.allclose(new, centroids)
        centroids, labels = new, new_labels
        if converged:
            break
    return ClusterModel(centroids, labels, trace, it)


def entropy(model_or_sizes) -> float:
    """Natural-log Shannon entropy of cluster occupancy."""
    sizes = model_or_sizes.sizes if isinstance(model_or_sizes, ClusterModel) else list(model_or_sizes)
    n = sum(sizes)
    if n == 0:
        raise ValueError("entropy of an empty clustering")
    h = 0.0
    for c in sizes:
        if c > 0:
            p = c / n
            h -= p * math.log(p)
    return h


def default_k(n: int) -> int:
    return min(n, max(2, math.ceil(math.sqrt(n))))


def diversity_score(sources: Sequence[str], provider=None, k: int | None = None,
                    seed: int = 0) -> float:
    """Entropy of the K-Means++ clustering of the embedded ``sources``."""
    if not sources:
        raise ValueError("no sources to score")
    vecs = np.stack([embed(s, provider) for s in sources])
    k = default_k(len(sources)) if k is None else k
    return entropy(kmeans_pp(vecs, k, seed))
