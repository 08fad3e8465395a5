"""Test-time routing: topic detection on a transcript, then question choice.

With no reference summary available, the transcript's own topic-keyword
matches decide which bank questions to retrieve with. Questions under a
detected topic are ranked by cosine against the centroid of the sentences
that triggered the topic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Transcript
from .errors import NoTopicsDetected
from .qbank import Question, QuestionBank
from .retrieval import Embedder, cosine
from .text import normalize_text, tokenize
from .topics import UNCATEGORIZED, TopicKeywords


@dataclass(frozen=True)
class KeywordMatch:
    keyword: str
    position: int


@dataclass
class TopicDetection:
    doc_id: str
    detected: list[tuple[str, list[KeywordMatch]]]  # (topic id, evidence), >= 1 match each

    def topic_ids(self) -> list[str]:
        return [topic_id for topic_id, _ in self.detected]


def detect_topics(doc: Transcript, keywords: TopicKeywords) -> TopicDetection:
    """Topics whose keywords occur as tokens anywhere in the document.

    One evidence entry per (keyword, sentence) hit, ordered by sentence
    position then keyword rank within the topic.
    """
    sentence_tokens = [set(tokenize(s.text)) for s in doc.sentences]
    detected = []
    for topic_id in sorted(keywords.keywords):
        if topic_id == UNCATEGORIZED:
            continue
        evidence = [
            KeywordMatch(keyword=keyword, position=sentence.position)
            for sentence, tokens in zip(doc.sentences, sentence_tokens)
            for keyword in keywords.keywords[topic_id]
            if keyword in tokens
        ]
        if evidence:
            detected.append((topic_id, evidence))
    return TopicDetection(doc_id=doc.id, detected=detected)


def select_questions(
    doc: Transcript,
    detection: TopicDetection,
    bank: QuestionBank,
    q_per_topic: int,
    embedder: Embedder,
) -> list[Question]:
    """Top-matched bank questions for each detected topic.

    Per topic, questions carrying that topic label are ranked by cosine
    between the question embedding and the mean vector of the topic's
    evidence sentences; the per-topic winners are unioned (deduplicated by
    normalized text) in (topic id, rank) order.
    """
    if q_per_topic < 1:
        raise ValueError("q_per_topic must be >= 1")
    if not detection.detected:
        raise NoTopicsDetected(f"no topics detected for document {doc.id!r}")

    sentence_vectors = embedder.embed([s.text for s in doc.sentences])
    question_vectors = embedder.embed([q.text for q in bank.master])

    selected: list[Question] = []
    seen = set()
    for topic_id, evidence in detection.detected:
        bucket = [
            (index, question)
            for index, question in enumerate(bank.master)
            if topic_id in question.topics
        ]
        if not bucket:
            continue
        positions = sorted({match.position for match in evidence})
        centroid = np.mean([sentence_vectors[p] for p in positions], axis=0)
        ranked = sorted(
            bucket,
            key=lambda item: (-cosine(question_vectors[item[0]], centroid), item[0]),
        )
        for index, question in ranked[:q_per_topic]:
            key = normalize_text(question.text)
            if key in seen:
                continue
            seen.add(key)
            selected.append(question)
    return selected


def detection_to_dict(detection: TopicDetection) -> dict:
    return {
        "doc_id": detection.doc_id,
        "detected": [
            {
                "topic_id": topic_id,
                "evidence": [
                    {"keyword": m.keyword, "position": m.position} for m in evidence
                ],
            }
            for topic_id, evidence in detection.detected
        ],
    }
