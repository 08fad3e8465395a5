import numpy as np
import pytest

from bulletsum.errors import DegenerateVocabulary, EmptyBank, TooFewDocuments
from bulletsum.qbank import QuestionBank, build_question_bank
from bulletsum.topics import (
    UNCATEGORIZED,
    TopicKeywords,
    categorize_questions,
    fit_lda,
    model_from_dict,
    model_to_dict,
    question_distribution,
    topic_keywords,
)

SEPARABLE = ["what is revenue growth?"] * 20 + ["what is net profit?"] * 20
REVENUE_GROUP = {"revenue", "growth"}
PROFIT_GROUP = {"net", "profit"}


class TestFitLda:
    def test_seeded_determinism(self):
        a = fit_lda(SEPARABLE, K=2, iters=50, seed=11)
        b = fit_lda(SEPARABLE, K=2, iters=50, seed=11)
        assert np.array_equal(a.phi, b.phi)
        assert a.vocab == b.vocab

    def test_different_seeds_differ(self):
        a = fit_lda(SEPARABLE, K=2, iters=50, seed=1)
        b = fit_lda(SEPARABLE, K=2, iters=50, seed=2)
        assert not np.array_equal(a.phi, b.phi)

    def test_separable_corpus_top_keywords(self):
        # Sampler-as-oracle on a separable corpus: assert the groups split,
        # not exact probabilities.
        model = fit_lda(SEPARABLE, K=2, iters=500, seed=0)
        kws = topic_keywords(model, w=1).keywords
        first, second = [kws[tid][0] for tid in sorted(kws)]
        assert (first in REVENUE_GROUP and second in PROFIT_GROUP) or (
            first in PROFIT_GROUP and second in REVENUE_GROUP
        )

    def test_phi_rows_are_distributions(self):
        model = fit_lda(SEPARABLE, K=3, iters=20, seed=5)
        assert np.all(model.phi >= 0)
        np.testing.assert_allclose(model.phi.sum(axis=1), 1.0, atol=1e-9)

    def test_stopwords_filtered_from_vocab(self):
        model = fit_lda(["what is the revenue of q2?"] * 3, K=1, iters=10, seed=0)
        assert model.vocab == ["revenue"]

    def test_alpha_defaults_to_50_over_k(self):
        model = fit_lda(SEPARABLE, K=2, iters=5, seed=0)
        assert model.alpha == 25.0

    def test_too_few_documents(self):
        with pytest.raises(TooFewDocuments):
            fit_lda(["what is revenue?"] * 3, K=4, iters=10, seed=0)

    def test_degenerate_vocabulary(self):
        with pytest.raises(DegenerateVocabulary):
            fit_lda(["what is the of?", "what is it?"], K=1, iters=10, seed=0)

    def test_questions_empty_after_filtering_excluded(self):
        # 3 usable questions + 1 all-stopword question; K=3 must still fit.
        questions = ["what is revenue?", "what is profit?", "what is margin?", "what is the?"]
        model = fit_lda(questions, K=3, iters=10, seed=0)
        assert set(model.vocab) == {"revenue", "profit", "margin"}


class TestTopicKeywords:
    def test_full_vocab_in_probability_order(self):
        model = fit_lda(SEPARABLE, K=2, iters=100, seed=0)
        kws = topic_keywords(model, w=len(model.vocab)).keywords
        for tid, words in kws.items():
            assert sorted(words) == sorted(model.vocab)
            k = sorted(kws).index(tid)
            probs = [model.phi[k][model.vocab.index(w)] for w in words]
            assert probs == sorted(probs, reverse=True)

    def test_equal_counts_tie_breaks_lexicographically(self):
        model = fit_lda(["what is zulu alpha?"] * 2, K=1, iters=10, seed=0)
        kws = topic_keywords(model, w=2).keywords
        (words,) = kws.values()
        assert words == ["alpha", "zulu"]

    def test_w_out_of_range(self):
        model = fit_lda(SEPARABLE, K=2, iters=5, seed=0)
        with pytest.raises(ValueError):
            topic_keywords(model, w=0)
        with pytest.raises(ValueError):
            topic_keywords(model, w=len(model.vocab) + 1)

    def test_keywords_distinct_within_topic(self):
        model = fit_lda(SEPARABLE, K=2, iters=100, seed=3)
        for words in topic_keywords(model, w=3).keywords.values():
            assert len(set(words)) == len(words)


def _bank(make_summary, bullets_by_doc):
    return build_question_bank(
        [make_summary(doc, bullets) for doc, bullets in bullets_by_doc.items()]
    )


class TestCategorize:
    def test_keyword_match_assigns_topic(self, make_summary):
        bank = _bank(make_summary, {"a": ["q2 revenue $5 million."]})
        keywords = TopicKeywords(keywords={"t0": ["revenue", "sales"], "t1": ["profit"]})
        categorized = categorize_questions(bank, keywords)
        assert "t0" in categorized.master[0].topics

    def test_multi_topic_membership(self, make_summary):
        bank = _bank(make_summary, {"a": ["revenue and profit both grew 5%."]})
        keywords = TopicKeywords(keywords={"t0": ["revenue"], "t1": ["profit"]})
        categorized = categorize_questions(bank, keywords)
        assert categorized.master[0].topics == {"t0", "t1"}

    def test_no_match_gets_uncategorized(self, make_summary):
        bank = _bank(make_summary, {"a": ["dividend raised 5%."]})
        keywords = TopicKeywords(keywords={"t0": ["revenue"]})
        categorized = categorize_questions(bank, keywords)
        assert categorized.master[0].topics == {UNCATEGORIZED}

    def test_adding_keyword_never_removes_membership(self, make_summary):
        bank = _bank(
            make_summary,
            {"a": ["revenue grew 5%.", "profit fell 3%.", "margin held 2%."]},
        )
        base = TopicKeywords(keywords={"t0": ["revenue"], "t1": ["profit"]})
        grown = TopicKeywords(keywords={"t0": ["revenue", "margin"], "t1": ["profit"]})
        before = categorize_questions(bank, base)
        after = categorize_questions(bank, grown)
        for q_before, q_after in zip(before.master, after.master):
            assert q_before.topics - {UNCATEGORIZED} <= q_after.topics

    def test_every_question_has_a_topic(self, make_summary):
        bank = _bank(make_summary, {"a": ["alpha 1%.", "beta 2%.", "gamma 3%."]})
        keywords = TopicKeywords(keywords={"t0": ["alpha"]})
        categorized = categorize_questions(bank, keywords)
        for question in categorized.master:
            assert question.topics

    def test_per_doc_and_master_consistent(self, make_summary):
        bank = _bank(make_summary, {"a": ["revenue up 5%."], "b": ["revenue up 9%."]})
        keywords = TopicKeywords(keywords={"t0": ["revenue"]})
        categorized = categorize_questions(bank, keywords)
        by_text = {q.text: q.topics for q in categorized.master}
        for questions in categorized.per_doc.values():
            for question in questions:
                if question.text in by_text:
                    assert question.topics == by_text[question.text]


class TestDistribution:
    def test_two_singleton_topics(self, make_question):
        bank = QuestionBank(
            per_doc={},
            master=[
                make_question("what is revenue?", topics={"t0"}),
                make_question("what is profit?", topics={"t1"}),
            ],
        )
        assert question_distribution(bank) == {"t0": 50.0, "t1": 50.0}

    def test_multi_membership_counted_once_per_pair(self, make_question):
        bank = QuestionBank(
            per_doc={},
            master=[make_question("what is revenue profit?", topics={"t0", "t1"})],
        )
        assert question_distribution(bank) == {"t0": 50.0, "t1": 50.0}

    def test_percentages_sum_to_100(self, make_summary):
        bank = _bank(
            make_summary,
            {"a": ["revenue 1%.", "profit 2%.", "revenue and profit 3%.", "misc 4%."]},
        )
        keywords = TopicKeywords(keywords={"t0": ["revenue"], "t1": ["profit"]})
        distribution = question_distribution(categorize_questions(bank, keywords))
        assert sum(distribution.values()) == pytest.approx(100.0, abs=0.01)

    def test_empty_bank(self):
        with pytest.raises(EmptyBank):
            question_distribution(QuestionBank(per_doc={}, master=[]))

    def test_uncategorized_bank_rejected(self, make_question):
        bank = QuestionBank(per_doc={}, master=[make_question("what is x?")])
        with pytest.raises(EmptyBank):
            question_distribution(bank)


class TestModelSerialization:
    def test_round_trip(self):
        model = fit_lda(SEPARABLE, K=2, iters=50, seed=4)
        keywords = topic_keywords(model, w=3)
        data = model_to_dict(model, keywords)
        clone, clone_keywords = model_from_dict(data)
        assert clone.num_topics == model.num_topics
        assert clone.vocab == model.vocab
        assert np.array_equal(clone.phi, model.phi)
        assert clone_keywords.keywords == keywords.keywords

    def test_schema_keys(self):
        model = fit_lda(SEPARABLE, K=2, iters=5, seed=0)
        data = model_to_dict(model, topic_keywords(model, w=2))
        assert {"K", "alpha", "beta", "seed", "vocab", "phi", "keywords"} <= set(data)
