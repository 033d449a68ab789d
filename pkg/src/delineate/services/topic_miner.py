"""Topic mining over core titles and abstracts.

Documents become TF-IDF vectors, are grouped with seeded spherical k-means and
each surviving cluster is described by its class-based TF-IDF terms. The
vectorize and cluster steps only exchange a VectorSpace and a doc -> topic
mapping, so an embedding-based variant can replace them.
"""

import logging
import math
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
from scipy import sparse
from sklearn.feature_extraction.text import CountVectorizer
from sklearn.preprocessing import normalize

from delineate.errors import ParameterError, VectorizationError
from delineate.models.records import BibRecord
from delineate.models.topics import OUTLIER, LABEL_TERMS, TokenizedDoc, TopicParams, TopicSummary, topic_label
from delineate.utils.text import normalize_text, words

logger = logging.getLogger(__name__)


def _identity(tokens: Sequence[str]) -> Sequence[str]:
    return tokens


def tokenize(record: BibRecord, stopwords: Mapping[str, frozenset[str]]) -> TokenizedDoc:
    """Title plus abstract as normalized tokens.

    Tokens shorter than two characters, numeric-only tokens and stopwords of the
    record's language are dropped.
    """
    text = normalize_text(f"{record.title} {record.abstract or ''}")
    stop = stopwords.get(record.language.value, frozenset())
    tokens = tuple(t for t in words(text) if len(t) >= 2 and not t.isdigit() and t not in stop)
    return TokenizedDoc(doc_id=record.doi, tokens=tokens)


@dataclass(frozen=True)
class VectorSpace:
    """L2-normalized TF-IDF rows for the non-empty documents."""

    doc_ids: tuple[str, ...]
    vocabulary: tuple[str, ...]
    idf: np.ndarray
    matrix: sparse.csr_matrix

    @property
    def empty_rows(self) -> np.ndarray:
        return np.diff(self.matrix.indptr) == 0

    @property
    def degenerate(self) -> bool:
        return not self.vocabulary or bool(self.empty_rows.any())

    def vector(self, i: int) -> dict[str, float]:
        row = self.matrix.getrow(i)
        return {self.vocabulary[j]: float(w) for j, w in zip(row.indices, row.data)}


def vectorize(docs: Sequence[TokenizedDoc]) -> VectorSpace:
    """TF-IDF vectors with idf = ln(N / df) over terms with df >= 2.

    Args:
        docs: Tokenized documents; empty ones are left out

    Returns:
        VectorSpace over the non-empty documents

    Raises:
        VectorizationError: Fewer than two non-empty documents
    """
    nonempty = [d for d in docs if d.tokens]
    if len(nonempty) < 2:
        raise VectorizationError(f"need at least 2 non-empty documents, got {len(nonempty)}")
    doc_ids = tuple(d.doc_id for d in nonempty)
    n = len(nonempty)

    vectorizer = CountVectorizer(analyzer=_identity, min_df=2)
    try:
        counts = vectorizer.fit_transform([d.tokens for d in nonempty]).tocsr()
    except ValueError:
        logger.warning("No term occurs in two documents; all %d vectors are empty", n)
        return VectorSpace(doc_ids, (), np.zeros(0), sparse.csr_matrix((n, 0)))

    vocabulary = tuple(vectorizer.get_feature_names_out().tolist())
    df = np.asarray((counts > 0).sum(axis=0)).ravel()
    idf = np.log(n / df)
    weights = (counts.astype(np.float64) @ sparse.diags(idf)).tocsr()
    weights.eliminate_zeros()
    matrix = normalize(weights, norm="l2", copy=False).tocsr()

    space = VectorSpace(doc_ids, vocabulary, idf, matrix)
    empty = int(space.empty_rows.sum())
    if empty:
        logger.warning("%d of %d documents have empty vectors after pruning", empty, n)
    return space


def _maximin_init(x: sparse.csr_matrix, k: int, rng: np.random.Generator) -> np.ndarray:
    """Seeded first centroid, then repeatedly the least similar document."""
    chosen = [int(rng.integers(x.shape[0]))]
    best = (x @ x[chosen[0]].T).toarray().ravel()
    for _ in range(k - 1):
        candidates = best.copy()
        candidates[chosen] = np.inf
        nxt = int(np.argmin(candidates))
        chosen.append(nxt)
        best = np.maximum(best, (x @ x[nxt].T).toarray().ravel())
    return x[chosen].toarray()


def cluster(
    space: VectorSpace,
    k: int,
    seed: int,
    min_cluster_size: int = 50,
    max_iter: int = 100,
    tol: float = 1e-6,
) -> dict[str, int]:
    """Spherical k-means on cosine similarity.

    Runs until the largest centroid shift drops below tol or max_iter rounds.
    Clusters smaller than min_cluster_size and empty vectors get OUTLIER (-1);
    the remaining clusters are renumbered 0..m-1 by descending size.

    Args:
        space: Output of vectorize
        k: Number of clusters
        seed: Seed for the first centroid
        min_cluster_size: Smallest cluster kept as a topic (default 50)

    Returns:
        Map doc id -> topic id, in space.doc_ids order

    Raises:
        ParameterError: k or min_cluster_size below 1, or k above the number of
            non-empty vectors
    """
    if k < 1 or min_cluster_size < 1:
        raise ParameterError(f"k and min_cluster_size must be >= 1 (got {k}, {min_cluster_size})")
    n = len(space.doc_ids)
    if n == 0:
        raise ParameterError("no vectors to cluster")
    if k > n:
        raise ParameterError(f"k={k} exceeds the number of documents ({n})")
    active = np.flatnonzero(~space.empty_rows)
    if k > len(active):
        raise ParameterError(f"k={k} exceeds the {len(active)} non-empty vectors")

    x = space.matrix[active]
    rng = np.random.default_rng(seed)
    centroids = _maximin_init(x, k, rng)

    labels = np.zeros(len(active), dtype=np.int64)
    for iteration in range(max_iter):
        labels = np.asarray(x @ centroids.T).argmax(axis=1)
        membership = sparse.csr_matrix(
            (np.ones(len(active)), (labels, np.arange(len(active)))), shape=(k, len(active))
        )
        sums = np.asarray((membership @ x).todense())
        norms = np.linalg.norm(sums, axis=1)
        updated = centroids.copy()
        nonzero = norms > 0
        updated[nonzero] = sums[nonzero] / norms[nonzero, None]
        shift = float(np.max(np.linalg.norm(updated - centroids, axis=1)))
        centroids = updated
        if shift < tol:
            logger.debug("k-means converged after %d iterations", iteration + 1)
            break
    labels = np.asarray(x @ centroids.T).argmax(axis=1)

    sizes = np.bincount(labels, minlength=k)
    kept = sorted((j for j in range(k) if sizes[j] >= min_cluster_size), key=lambda j: (-sizes[j], j))
    remap = {j: new for new, j in enumerate(kept)}

    result = np.full(n, OUTLIER, dtype=np.int64)
    result[active] = [remap.get(int(label), OUTLIER) for label in labels]
    return {doc_id: int(topic) for doc_id, topic in zip(space.doc_ids, result)}


@dataclass(frozen=True)
class TermScores:
    """Class-based TF-IDF scores, one sparse row per topic."""

    topics: tuple[int, ...]
    vocabulary: tuple[str, ...]
    matrix: sparse.csr_matrix
    _rows: dict[int, int] = field(init=False, repr=False, compare=False)
    _cols: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_rows", {t: i for i, t in enumerate(self.topics)})
        object.__setattr__(self, "_cols", {t: j for j, t in enumerate(self.vocabulary)})

    def score(self, topic: int, term: str) -> float:
        if topic not in self._rows or term not in self._cols:
            return 0.0
        return float(self.matrix[self._rows[topic], self._cols[term]])

    def ranked(self, topic: int, top_n: int) -> list[tuple[str, float]]:
        """Top terms by descending score, ties broken lexicographically."""
        if top_n <= 0 or topic not in self._rows:
            return []
        row = self.matrix.getrow(self._rows[topic])
        pairs = [(self.vocabulary[j], float(s)) for j, s in zip(row.indices, row.data) if s > 0]
        pairs.sort(key=lambda p: (-p[1], p[0]))
        return pairs[:top_n]


def class_term_scores(docs: Iterable[TokenizedDoc], assignments: Mapping[str, int]) -> TermScores:
    """Score terms per topic with class-based TF-IDF.

    score(t, c) = tf(t, c) * ln(1 + A / f(t)), where tf(t, c) counts t in the
    concatenated documents of topic c, f(t) counts t over all topics and A is
    the average token count per topic. The outlier bucket is left out.

    Raises:
        ParameterError: No non-outlier topic
    """
    topics = tuple(sorted({t for t in assignments.values() if t != OUTLIER}))
    if not topics:
        raise ParameterError("class term scores need at least one non-outlier topic")
    concatenated: dict[int, list[str]] = {t: [] for t in topics}
    for doc in docs:
        topic = assignments.get(doc.doc_id, OUTLIER)
        if topic != OUTLIER:
            concatenated[topic].extend(doc.tokens)

    vectorizer = CountVectorizer(analyzer=_identity)
    try:
        tf = vectorizer.fit_transform([concatenated[t] for t in topics]).tocsr().astype(np.float64)
    except ValueError:
        return TermScores(topics, (), sparse.csr_matrix((len(topics), 0)))
    f = np.asarray(tf.sum(axis=0)).ravel()
    average = tf.sum() / len(topics)
    scores = (tf @ sparse.diags(np.log1p(average / f))).tocsr()
    return TermScores(topics, tuple(vectorizer.get_feature_names_out().tolist()), scores)


def summarize_topics(scores: TermScores, assignments: Mapping[str, int], top_n: int = 10) -> list[TopicSummary]:
    """TopicSummary per scored topic, largest first."""
    sizes = Counter(t for t in assignments.values() if t != OUTLIER)
    summaries = []
    for topic in sorted(scores.topics, key=lambda t: (-sizes[t], t)):
        label_terms = [term for term, _ in scores.ranked(topic, LABEL_TERMS)]
        summaries.append(TopicSummary(
            topic_id=topic,
            size=sizes[topic],
            top_terms=tuple(scores.ranked(topic, top_n)),
            label=topic_label(topic, label_terms),
        ))
    return summaries


@dataclass(frozen=True)
class TopicModel:
    docs: tuple[TokenizedDoc, ...]
    assignments: dict[str, int]
    summaries: tuple[TopicSummary, ...]
    k: int

    @property
    def outliers(self) -> int:
        return sum(1 for t in self.assignments.values() if t == OUTLIER)


def default_k(n_docs: int, docs_per_topic: int = 200) -> int:
    return max(1, math.ceil(n_docs / docs_per_topic))


def mine_topics(
    records: Iterable[BibRecord],
    stopwords: Mapping[str, frozenset[str]],
    params: TopicParams,
) -> TopicModel:
    """tokenize -> vectorize -> cluster -> class_term_scores -> summarize_topics."""
    docs = tuple(d for d in (tokenize(r, stopwords) for r in records) if d.tokens)
    if len(docs) < 2:
        logger.warning("Only %d non-empty core documents; no topics mined", len(docs))
        return TopicModel(docs, {d.doc_id: OUTLIER for d in docs}, (), 0)

    space = vectorize(docs)
    active = int((~space.empty_rows).sum())
    if active == 0:
        return TopicModel(docs, {d.doc_id: OUTLIER for d in docs}, (), 0)
    if params.k is None:
        k = min(default_k(len(docs), params.docs_per_topic), active)
    else:
        k = params.k

    assignments = cluster(space, k, params.seed, params.min_cluster_size, params.max_iter, params.tol)
    if all(t == OUTLIER for t in assignments.values()):
        logger.warning("All %d clusters fell below %d documents", k, params.min_cluster_size)
        return TopicModel(docs, assignments, (), k)

    scores = class_term_scores(docs, assignments)
    summaries = tuple(summarize_topics(scores, assignments, params.top_n))
    logger.info("Mined %d topics from %d documents (k=%d)", len(summaries), len(docs), k)
    return TopicModel(docs, assignments, summaries, k)


def write_topics(summaries: Iterable[TopicSummary], path: Path) -> None:
    """Topic table: topic_id, size, label, rank, term, score."""
    rows = [
        {"topic_id": s.topic_id, "size": s.size, "label": s.label, "rank": rank, "term": term, "score": score}
        for s in summaries
        for rank, (term, score) in enumerate(s.top_terms, start=1)
    ]
    pd.DataFrame(rows, columns=["topic_id", "size", "label", "rank", "term", "score"]).to_csv(
        path, index=False, lineterminator="\n"
    )


def read_topics(path: Path) -> list[TopicSummary]:
    frame = pd.read_csv(path, keep_default_na=False)
    summaries = []
    for (topic_id, size, label), group in frame.groupby(["topic_id", "size", "label"], sort=False):
        terms = tuple((str(t), float(s)) for t, s in zip(group["term"], group["score"]))
        summaries.append(TopicSummary(topic_id=int(topic_id), size=int(size), top_terms=terms, label=str(label)))
    return summaries
