"""Stage orchestration and workspace artifact handling.

Every stage reads its upstream artifacts from the workspace, writes its own
outputs into ``workspace/<stage>/`` atomically (temp directory + rename), and
snapshots the resolved config next to them so reruns are auditable. With the
built-in embedder and the mock generator, rerunning a stage with identical
inputs and seeds produces byte-identical artifacts.
"""

from __future__ import annotations

import json
import logging
import shutil
from pathlib import Path

from . import generator as gen
from . import metrics as met
from .config import PipelineConfig
from .corpus import (
    BulletSummary,
    Corpus,
    CorpusSplit,
    Sentence,
    Transcript,
    corpus_stats,
    load_corpus,
    split_corpus,
)
from .errors import MissingArtifact, NoTopicsDetected
from .qbank import QuestionBank, build_question_bank
from .retrieval import TfidfEmbedder, build_context, context_from_dict, context_to_dict
from .router import detect_topics, detection_to_dict, select_questions
from .services import EmbeddingClient, GenerationClient, QGClient
from .text import QUESTION_STOPWORDS, load_stopwords
from .topics import (
    categorize_questions,
    fit_lda,
    model_from_dict,
    model_to_dict,
    question_distribution,
    topic_keywords,
)

logger = logging.getLogger(__name__)

STAGES = ("ingest", "qgen", "topics", "extract", "route", "generate", "eval")


def _write_json(path: Path, payload) -> None:
    path.write_text(
        json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


def _write_jsonl(path: Path, records) -> None:
    with path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")


def _read_json(path: Path, stage: str):
    if not path.is_file():
        raise MissingArtifact(f"stage '{stage}' requires missing artifact {path}")
    return json.loads(path.read_text(encoding="utf-8"))


def _read_jsonl(path: Path, stage: str) -> list:
    if not path.is_file():
        raise MissingArtifact(f"stage '{stage}' requires missing artifact {path}")
    with path.open(encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


class _StageWriter:
    """Collects artifacts for one stage and publishes them atomically."""

    def __init__(self, workspace: Path, stage: str, config: PipelineConfig):
        self.workspace = Path(workspace)
        self.stage = stage
        self.config = config
        self.tmp = self.workspace / f".{stage}.tmp"

    def __enter__(self) -> Path:
        self.workspace.mkdir(parents=True, exist_ok=True)
        if self.tmp.exists():
            shutil.rmtree(self.tmp)
        self.tmp.mkdir()
        logger.info("stage %s config hash %s", self.stage, self.config.hash())
        _write_json(
            self.tmp / "config.json",
            {"config": self.config.to_dict(), "hash": self.config.hash()},
        )
        return self.tmp

    def __exit__(self, exc_type, exc, tb):
        if exc_type is not None:
            shutil.rmtree(self.tmp, ignore_errors=True)
            return False
        final = self.workspace / self.stage
        if final.exists():
            shutil.rmtree(final)
        self.tmp.rename(final)
        return False


def _corpus_to_dict(corpus: Corpus) -> dict:
    return {
        "transcripts": {
            doc_id: [s.text for s in t.sentences]
            for doc_id, t in sorted(corpus.transcripts.items())
        },
        "summaries": {
            doc_id: list(s.bullets) for doc_id, s in sorted(corpus.summaries.items())
        },
    }


def _corpus_from_dict(data: dict) -> Corpus:
    transcripts = {}
    for doc_id, sentences in data["transcripts"].items():
        sents = tuple(Sentence(position=i, text=text) for i, text in enumerate(sentences))
        transcripts[doc_id] = Transcript(
            id=doc_id,
            sentences=sents,
            word_count=sum(len(s.text.split()) for s in sents),
        )
    summaries = {
        doc_id: BulletSummary(id=doc_id, bullets=tuple(bullets))
        for doc_id, bullets in data["summaries"].items()
    }
    return Corpus(transcripts=transcripts, summaries=summaries)


def _load_ingest(workspace: Path, stage: str) -> tuple[Corpus, CorpusSplit]:
    corpus = _corpus_from_dict(_read_json(workspace / "ingest" / "corpus.json", stage))
    split_data = _read_json(workspace / "ingest" / "split.json", stage)
    split = CorpusSplit(
        train=tuple(split_data["train"]),
        val=tuple(split_data["val"]),
        test=tuple(split_data["test"]),
        seed=split_data["seed"],
    )
    return corpus, split


def _load_bank(workspace: Path, stage: str, categorized: bool) -> QuestionBank:
    subdir = "topics" if categorized else "qgen"
    return QuestionBank.from_dict(
        _read_json(workspace / subdir / "question_bank.json", stage)
    )


def _prompt_template(config: PipelineConfig) -> gen.PromptTemplate:
    if config.instruction_file:
        path = Path(config.instruction_file)
        if not path.is_file():
            raise MissingArtifact(f"instruction file not found: {path}")
        instruction = path.read_text(encoding="utf-8").strip()
        return gen.PromptTemplate(instruction=instruction, separator=config.separator)
    return gen.PromptTemplate(separator=config.separator)


def _embedder_for(doc: Transcript, config: PipelineConfig):
    if config.embed_url:
        return EmbeddingClient(config.embed_url)
    return TfidfEmbedder([s.text for s in doc.sentences])


def stage_ingest(
    config: PipelineConfig, workspace: Path, transcripts_dir, summaries_dir
) -> None:
    corpus = load_corpus(transcripts_dir, summaries_dir)
    split = split_corpus(corpus, config.split_seed)
    stats = corpus_stats(corpus)
    with _StageWriter(workspace, "ingest", config) as out:
        _write_json(out / "corpus.json", _corpus_to_dict(corpus))
        _write_json(
            out / "split.json",
            {
                "train": list(split.train),
                "val": list(split.val),
                "test": list(split.test),
                "seed": split.seed,
            },
        )
        _write_json(out / "stats.json", stats)


def stage_qgen(config: PipelineConfig, workspace: Path) -> None:
    corpus, split = _load_ingest(workspace, "qgen")
    train_summaries = [corpus.summaries[doc_id] for doc_id in sorted(split.train)]
    if config.qg_url:
        bank = build_question_bank(
            train_summaries,
            generator="external",
            client=QGClient(config.qg_url),
            fallback=config.qg_fallback,
        )
    else:
        bank = build_question_bank(train_summaries, generator="builtin")
    report = {
        "train_documents": len(train_summaries),
        "questions_per_doc": {doc_id: bank.n_of(doc_id) for doc_id in sorted(bank.per_doc)},
        "master_size": len(bank.master),
        "generator": "external" if config.qg_url else "builtin",
    }
    with _StageWriter(workspace, "qgen", config) as out:
        _write_json(out / "question_bank.json", bank.to_dict())
        _write_json(out / "report.json", report)


def stage_topics(config: PipelineConfig, workspace: Path) -> None:
    bank = _load_bank(workspace, "topics", categorized=False)
    stopwords = (
        load_stopwords(config.stopword_file)
        if config.stopword_file
        else QUESTION_STOPWORDS
    )
    model = fit_lda(
        bank.master,
        K=config.num_topics,
        alpha=config.lda_alpha,
        beta=config.lda_beta,
        iters=config.lda_iters,
        seed=config.lda_seed,
        stopwords=stopwords,
    )
    keywords = topic_keywords(model, w=config.keywords_per_topic)
    categorized = categorize_questions(bank, keywords)
    distribution = question_distribution(categorized)
    with _StageWriter(workspace, "topics", config) as out:
        _write_json(out / "topic_model.json", model_to_dict(model, keywords))
        _write_json(out / "question_bank.json", categorized.to_dict())
        _write_json(out / "distribution.json", distribution)


def stage_extract(config: PipelineConfig, workspace: Path) -> None:
    corpus, split = _load_ingest(workspace, "extract")
    bank = _load_bank(workspace, "extract", categorized=False)
    template = _prompt_template(config)

    contexts = []
    pairs = []
    for doc_id in sorted(split.train):
        doc = corpus.transcripts[doc_id]
        questions = bank.per_doc.get(doc_id, [])
        if not questions:
            logger.warning("train document %s has no questions; skipped", doc_id)
            continue
        context = build_context(doc, questions, config.k, _embedder_for(doc, config))
        contexts.append(context_to_dict(context))
        pairs.append((context, corpus.summaries[doc_id]))

    with _StageWriter(workspace, "extract", config) as out:
        _write_jsonl(out / "contexts.jsonl", contexts)
        gen.export_finetune_dataset(
            pairs, template, gen.FineTuneSpec(), out / "finetune.jsonl"
        )


def stage_route(config: PipelineConfig, workspace: Path) -> None:
    corpus, split = _load_ingest(workspace, "route")
    bank = _load_bank(workspace, "route", categorized=True)
    model_data = _read_json(workspace / "topics" / "topic_model.json", "route")
    _, keywords = model_from_dict(model_data)

    detections = []
    selected_questions = []
    contexts = []
    for doc_id in sorted(split.test):
        doc = corpus.transcripts[doc_id]
        embedder = _embedder_for(doc, config)
        detection = detect_topics(doc, keywords)
        detections.append(detection_to_dict(detection))
        try:
            questions = select_questions(
                doc, detection, bank, config.q_per_topic, embedder
            )
        except NoTopicsDetected:
            if not config.fallback_on_empty_detection:
                raise
            logger.warning(
                "no topics detected for %s; falling back to the master list", doc_id
            )
            questions = list(bank.master)
        selected_questions.append(
            {"doc_id": doc_id, "questions": [q.text for q in questions]}
        )
        context = build_context(doc, questions, config.k, embedder)
        contexts.append(context_to_dict(context))

    with _StageWriter(workspace, "route", config) as out:
        _write_jsonl(out / "detections.jsonl", detections)
        _write_jsonl(out / "questions.jsonl", selected_questions)
        _write_jsonl(out / "contexts.jsonl", contexts)


def stage_generate(config: PipelineConfig, workspace: Path) -> None:
    context_records = _read_jsonl(workspace / "route" / "contexts.jsonl", "generate")
    template = _prompt_template(config)
    if config.generate_url:
        client = GenerationClient(config.generate_url)
    else:
        client = gen.MockGenClient(separator=config.separator)

    predictions = {}
    for record in context_records:
        context = context_from_dict(record)
        prompt = gen.build_prompt(template, context, config.max_input_tokens)
        request = gen.GenerationRequest(
            prompt=prompt,
            max_new_tokens=config.max_new_tokens,
            max_input_tokens=config.max_input_tokens,
        )
        predictions[context.doc_id] = gen.generate(client, request)

    with _StageWriter(workspace, "generate", config) as out:
        _write_json(out / "predictions.json", predictions)


def stage_eval(config: PipelineConfig, workspace: Path) -> None:
    corpus, split = _load_ingest(workspace, "eval")
    predictions = _read_json(workspace / "generate" / "predictions.json", "eval")
    references = {doc_id: corpus.summaries[doc_id] for doc_id in split.test}
    sources = {doc_id: corpus.transcripts[doc_id] for doc_id in split.test}
    report = met.evaluate_corpus(predictions, references, sources)
    with _StageWriter(workspace, "eval", config) as out:
        _write_json(out / "report.json", met.report_to_dict(report))
        (out / "report.txt").write_text(
            met.format_report_table(report) + "\n", encoding="utf-8"
        )
        met.write_per_document_csv(report, out / "per_document.csv")


def run_stage(
    stage: str,
    config: PipelineConfig,
    workspace,
    transcripts_dir=None,
    summaries_dir=None,
) -> None:
    """Run one stage, or every stage in order for ``run``."""
    workspace = Path(workspace)
    if stage == "run":
        for name in STAGES:
            run_stage(name, config, workspace, transcripts_dir, summaries_dir)
        return
    if stage == "ingest":
        if transcripts_dir is None or summaries_dir is None:
            raise MissingArtifact("ingest requires --transcripts and --summaries")
        stage_ingest(config, workspace, transcripts_dir, summaries_dir)
    elif stage == "qgen":
        stage_qgen(config, workspace)
    elif stage == "topics":
        stage_topics(config, workspace)
    elif stage == "extract":
        stage_extract(config, workspace)
    elif stage == "route":
        stage_route(config, workspace)
    elif stage == "generate":
        stage_generate(config, workspace)
    elif stage == "eval":
        stage_eval(config, workspace)
    else:
        raise ValueError(f"unknown stage {stage!r}")
