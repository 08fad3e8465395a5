"""Sentence/question embedding and top-k extractive selection.

The built-in embedder is per-document TF-IDF: the vocabulary and IDF are fit
on one transcript's sentences, which sharpens discrimination inside that
document and needs no global state. A sentence-transformer service can be
substituted through the embedding client; both sides expose ``embed``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .corpus import Sentence, Transcript
from .errors import NoQuestions
from .qbank import Question
from .text import tokenize


class Embedder(Protocol):
    def embed(self, texts: list[str]) -> np.ndarray: ...


class TfidfEmbedder:
    """TF-IDF vectors over a fixed fit corpus (typically one document).

    IDF = ln((1+N)/(1+df)) + 1, TF = raw count, vectors L2-normalized.
    Text sharing no terms with the fit corpus embeds to the zero vector.
    """

    def __init__(self, fit_corpus: list[str]):
        if not fit_corpus:
            raise ValueError("fit_corpus must be non-empty")
        docs = [tokenize(text) for text in fit_corpus]
        self.vocab = sorted({tok for doc in docs for tok in doc})
        self._index = {tok: i for i, tok in enumerate(self.vocab)}
        n_docs = len(docs)
        df = np.zeros(len(self.vocab))
        for doc in docs:
            for tok in set(doc):
                df[self._index[tok]] += 1
        self.idf = np.log((1.0 + n_docs) / (1.0 + df)) + 1.0

    def embed(self, texts: list[str]) -> np.ndarray:
        vectors = np.zeros((len(texts), len(self.vocab)))
        for row, text in enumerate(texts):
            for tok in tokenize(text):
                col = self._index.get(tok)
                if col is not None:
                    vectors[row, col] += 1.0
        vectors *= self.idf
        norms = np.linalg.norm(vectors, axis=1, keepdims=True)
        np.divide(vectors, norms, out=vectors, where=norms > 0)
        return vectors


def tfidf_embed(texts: list[str], fit_corpus: list[str]) -> np.ndarray:
    """One-shot TF-IDF embedding: fit on ``fit_corpus``, embed ``texts``."""
    return TfidfEmbedder(fit_corpus).embed(texts)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity; zero vectors score 0 by convention."""
    nu = math.sqrt(float(np.dot(u, u)))
    nv = math.sqrt(float(np.dot(v, v)))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v)) / (nu * nv)


@dataclass(frozen=True)
class ScoredSentence:
    sentence: Sentence
    question: Question
    score: float
    rank: int


@dataclass
class ExtractiveContext:
    doc_id: str
    selections: list[ScoredSentence]
    context_sentences: list[Sentence]

    @property
    def context_text(self) -> str:
        return " ".join(s.text for s in self.context_sentences)


def _rank_sentences(
    sentences, sentence_vectors, question: Question, question_vector, k: int
) -> list[ScoredSentence]:
    scored = [
        (cosine(question_vector, sentence_vectors[i]), s.position, s)
        for i, s in enumerate(sentences)
    ]
    scored.sort(key=lambda item: (-item[0], item[1]))
    return [
        ScoredSentence(sentence=s, question=question, score=score, rank=rank)
        for rank, (score, _, s) in enumerate(scored[:k], start=1)
    ]


def top_k_sentences(
    doc: Transcript, question: Question, k: int, embedder: Embedder
) -> list[ScoredSentence]:
    """Top min(k, |sentences|) sentences by cosine to the question.

    Ties break toward the earlier document position.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not doc.sentences:
        raise ValueError(f"document {doc.id!r} has no sentences")
    sentence_vectors = embedder.embed([s.text for s in doc.sentences])
    question_vector = embedder.embed([question.text])[0]
    return _rank_sentences(doc.sentences, sentence_vectors, question, question_vector, k)


def build_context(
    doc: Transcript, questions: list[Question], k: int, embedder: Embedder
) -> ExtractiveContext:
    """Union of per-question top-k selections, deduplicated by position.

    Context sentences keep document order; the per-question selections are
    retained for audit. At most k * len(questions) sentences survive.
    """
    if not questions:
        raise NoQuestions(f"no questions supplied for document {doc.id!r}")
    if k < 1:
        raise ValueError("k must be >= 1")
    sentence_vectors = embedder.embed([s.text for s in doc.sentences])
    question_vectors = embedder.embed([q.text for q in questions])

    selections = []
    positions = set()
    for q_index, question in enumerate(questions):
        ranked = _rank_sentences(
            doc.sentences, sentence_vectors, question, question_vectors[q_index], k
        )
        selections.extend(ranked)
        positions.update(s.sentence.position for s in ranked)

    context_sentences = [s for s in doc.sentences if s.position in positions]
    return ExtractiveContext(
        doc_id=doc.id, selections=selections, context_sentences=context_sentences
    )


def context_to_dict(context: ExtractiveContext) -> dict:
    return {
        "doc_id": context.doc_id,
        "selections": [
            {
                "question": s.question.text,
                "position": s.sentence.position,
                "score": s.score,
                "rank": s.rank,
            }
            for s in context.selections
        ],
        "context_sentences": [
            {"position": s.position, "text": s.text} for s in context.context_sentences
        ],
        "context_text": context.context_text,
    }


def context_from_dict(data: dict) -> ExtractiveContext:
    sentences = {
        item["position"]: Sentence(position=item["position"], text=item["text"])
        for item in data["context_sentences"]
    }
    selections = [
        ScoredSentence(
            sentence=sentences.get(
                item["position"], Sentence(item["position"], "")
            ),
            question=Question(text=item["question"], source_doc="", source_bullet_index=0),
            score=item["score"],
            rank=item["rank"],
        )
        for item in data["selections"]
    ]
    return ExtractiveContext(
        doc_id=data["doc_id"],
        selections=selections,
        context_sentences=[sentences[p] for p in sorted(sentences)],
    )
