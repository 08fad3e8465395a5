import math
import random

import numpy as np
import pytest

from bulletsum.errors import NoQuestions
from bulletsum.retrieval import (
    TfidfEmbedder,
    build_context,
    context_from_dict,
    context_to_dict,
    cosine,
    tfidf_embed,
    top_k_sentences,
)


class TestTfidfEmbedder:
    def test_self_similarity_is_one(self):
        corpus = ["revenue rose sharply", "profit fell slightly"]
        emb = TfidfEmbedder(corpus)
        vectors = emb.embed(corpus)
        query = emb.embed(["revenue rose sharply"])[0]
        assert cosine(query, vectors[0]) == pytest.approx(1.0)

    def test_disjoint_text_is_zero_vector(self):
        emb = TfidfEmbedder(["alpha beta", "beta gamma"])
        vec = emb.embed(["unrelated words entirely"])[0]
        assert not vec.any()
        assert cosine(vec, emb.embed(["alpha beta"])[0]) == 0.0

    def test_hand_computed_discrimination(self):
        # Fit on {"a b", "b c"}: idf(a) = idf(c) = ln(3/2)+1, idf(b) = ln(3/3)+1.
        # Query "a" overlaps only "a b", so its cosine there must be larger.
        emb = TfidfEmbedder(["a b", "b c"])
        docs = emb.embed(["a b", "b c"])
        query = emb.embed(["a"])[0]
        sim_ab = cosine(query, docs[0])
        sim_bc = cosine(query, docs[1])
        idf_a = math.log(3 / 2) + 1
        idf_b = math.log(3 / 3) + 1
        expected = idf_a / math.sqrt(idf_a**2 + idf_b**2)
        assert sim_ab == pytest.approx(expected)
        assert sim_bc == 0.0
        assert sim_ab > sim_bc

    def test_vectors_l2_normalized(self):
        emb = TfidfEmbedder(["one two three", "two three four"])
        for vec in emb.embed(["one two", "three four two"]):
            assert np.linalg.norm(vec) == pytest.approx(1.0)

    def test_empty_fit_corpus_rejected(self):
        with pytest.raises(ValueError):
            TfidfEmbedder([])

    def test_deterministic(self):
        texts = ["alpha beta", "gamma delta"]
        a = TfidfEmbedder(texts).embed(["alpha gamma"])
        b = TfidfEmbedder(texts).embed(["alpha gamma"])
        assert np.array_equal(a, b)

    def test_one_shot_helper_matches_class(self):
        corpus = ["alpha beta", "beta gamma"]
        texts = ["alpha", "gamma beta"]
        assert np.array_equal(
            tfidf_embed(texts, corpus), TfidfEmbedder(corpus).embed(texts)
        )


class TestTopK:
    def test_dominant_sentence_ranks_first(self, make_transcript, make_question):
        doc = make_transcript(
            "d",
            [
                "weather was mild today",
                "quarterly revenue grew twenty percent",
                "the cafeteria menu changed",
            ],
        )
        emb = TfidfEmbedder([s.text for s in doc.sentences])
        question = make_question("what is quarterly revenue?")
        ranked = top_k_sentences(doc, question, k=2, embedder=emb)
        assert ranked[0].sentence.position == 1
        assert ranked[0].rank == 1
        assert ranked[0].score > ranked[1].score

    def test_k_clamped_to_doc_size(self, make_transcript, make_question):
        doc = make_transcript("d", ["first one", "second one"])
        emb = TfidfEmbedder([s.text for s in doc.sentences])
        ranked = top_k_sentences(doc, make_question("what is first?"), 3, emb)
        assert len(ranked) == 2
        assert [s.rank for s in ranked] == [1, 2]

    def test_tie_broken_by_earlier_position(self, make_transcript, make_question):
        doc = make_transcript("d", ["revenue rose", "unrelated text", "revenue rose"])
        emb = TfidfEmbedder([s.text for s in doc.sentences])
        ranked = top_k_sentences(doc, make_question("what is revenue?"), 2, emb)
        assert [s.sentence.position for s in ranked] == [0, 2]

    def test_scores_non_increasing_by_rank(self, make_transcript, make_question):
        doc = make_transcript(
            "d", ["revenue rose fast", "revenue stayed flat", "profit and margin", "misc"]
        )
        emb = TfidfEmbedder([s.text for s in doc.sentences])
        ranked = top_k_sentences(doc, make_question("what is revenue margin?"), 4, emb)
        scores = [s.score for s in ranked]
        assert scores == sorted(scores, reverse=True)
        assert all(0.0 <= s <= 1.0 for s in scores)

    def test_k_must_be_positive(self, make_transcript, make_question):
        doc = make_transcript("d", ["text"])
        emb = TfidfEmbedder(["text"])
        with pytest.raises(ValueError):
            top_k_sentences(doc, make_question("what is it?"), 0, emb)


class TestBuildContext:
    def test_single_question_small_doc_selects_all(self, make_transcript, make_question):
        doc = make_transcript("d", ["alpha one", "beta two", "gamma three"])
        emb = TfidfEmbedder([s.text for s in doc.sentences])
        ctx = build_context(doc, [make_question("what is alpha?")], 3, emb)
        assert [s.position for s in ctx.context_sentences] == [0, 1, 2]

    def test_disjoint_selections_meet_kn_bound(self, make_transcript, make_question):
        sentences = [
            "alpha apple axle", "arrow alto atlas",
            "bravo berry basil", "bison blend badge",
            "cedar coral -", "dune drift -",
        ]
        doc = make_transcript("d", sentences)
        emb = TfidfEmbedder(sentences)
        questions = [
            make_question("what is alpha apple axle arrow alto atlas?"),
            make_question("what is bravo berry basil bison blend badge?"),
        ]
        ctx = build_context(doc, questions, 2, emb)
        assert len(ctx.context_sentences) == 4  # k*n with disjoint picks

    def test_overlapping_selections_deduplicate(self, make_transcript, make_question):
        doc = make_transcript(
            "d", ["revenue and profit", "only revenue here", "only profit here", "noise"]
        )
        emb = TfidfEmbedder([s.text for s in doc.sentences])
        questions = [make_question("what is revenue?"), make_question("what is profit?")]
        ctx = build_context(doc, questions, 2, emb)
        positions = [s.position for s in ctx.context_sentences]
        assert len(positions) == len(set(positions))
        assert len(ctx.context_sentences) < 4
        # brute-force union of the per-question selections
        expected = set()
        for q in questions:
            expected.update(
                s.sentence.position for s in top_k_sentences(doc, q, 2, emb)
            )
        assert set(positions) == expected

    def test_question_order_irrelevant(self, make_transcript, make_question):
        doc = make_transcript(
            "d", ["revenue rose", "profit fell", "margin grew", "costs dropped"]
        )
        emb = TfidfEmbedder([s.text for s in doc.sentences])
        questions = [
            make_question("what is revenue?"),
            make_question("what is profit?"),
            make_question("what is margin?"),
        ]
        forward = build_context(doc, questions, 1, emb)
        backward = build_context(doc, list(reversed(questions)), 1, emb)
        assert [s.position for s in forward.context_sentences] == [
            s.position for s in backward.context_sentences
        ]

    def test_document_order_preserved(self, make_transcript, make_question):
        doc = make_transcript("d", ["zeta last word", "alpha first word", "mid word"])
        emb = TfidfEmbedder([s.text for s in doc.sentences])
        ctx = build_context(doc, [make_question("what is zeta alpha?")], 2, emb)
        positions = [s.position for s in ctx.context_sentences]
        assert positions == sorted(positions)

    def test_no_questions(self, make_transcript):
        doc = make_transcript("d", ["text"])
        with pytest.raises(NoQuestions):
            build_context(doc, [], 3, TfidfEmbedder(["text"]))

    def test_kn_bound_fuzz(self, make_transcript, make_question):
        rng = random.Random(99)
        vocab = [f"w{i}" for i in range(30)]
        for _ in range(25):
            sentences = [
                " ".join(rng.sample(vocab, 4)) for _ in range(rng.randint(3, 10))
            ]
            doc = make_transcript("d", sentences)
            emb = TfidfEmbedder(sentences)
            questions = [
                make_question(f"what is {' '.join(rng.sample(vocab, 2))}?", index=i)
                for i in range(rng.randint(1, 4))
            ]
            k = rng.randint(1, 4)
            ctx = build_context(doc, questions, k, emb)
            assert len(ctx.context_sentences) <= k * len(questions)
            assert len(ctx.selections) <= k * len(questions)

    def test_cosine_symmetry(self):
        emb = TfidfEmbedder(["alpha beta gamma", "beta gamma delta"])
        u, v = emb.embed(["alpha beta", "gamma delta"])
        assert cosine(u, v) == pytest.approx(cosine(v, u))

    def test_serialization_round_trip(self, make_transcript, make_question):
        doc = make_transcript("d", ["revenue rose", "profit fell"])
        emb = TfidfEmbedder([s.text for s in doc.sentences])
        ctx = build_context(doc, [make_question("what is revenue?")], 1, emb)
        clone = context_from_dict(context_to_dict(ctx))
        assert clone.doc_id == ctx.doc_id
        assert clone.context_text == ctx.context_text
        assert [s.rank for s in clone.selections] == [s.rank for s in ctx.selections]
