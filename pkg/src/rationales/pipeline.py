"""End-to-end pipeline: ingest, opinions, candidates, sample, summarize, evaluate.

Every stage persists its artifact under the output directory and records a
content hash of its inputs in the run manifest, so reruns skip stages whose
inputs are unchanged and stage-wise execution composes to the same bytes as
a monolithic run.  All randomness derives from the single config seed via
entity- and cluster-salted substreams.
"""

from __future__ import annotations

import hashlib
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from . import __version__
from ._rng import derive_seed
from .alignment import (
    AbsaAnnotation,
    Aligner,
    CachedAligner,
    LexicalAligner,
    RemoteAbsaTagger,
    RemoteAligner,
    generate_finetuning_pairs,
    write_pairs_jsonl,
)
from .candidates import CandidateSet, build_candidate_sets
from .corpus import (
    ReviewCorpus,
    SentenceUnit,
    filter_entities,
    load_corpus,
    sentences_to_units,
    unit_annotations,
)
from .evaluation import (
    HashEmbedder,
    MetricReport,
    RemoteEmbedder,
    RemoteEntailmentScorer,
    evaluate_entity,
)
from .opinions import (
    Opinion,
    OpinionCluster,
    build_feature_vector,
    cluster_opinions,
    extract_opinions,
)
from .properties import (
    BaselineSpecificityScorer,
    RemoteSpecificityScorer,
    compute_property_scores,
)
from .sampler import GibbsConfig, RationaleSet, SamplingProblem, sample_rationales
from .summarize import assemble_summary, rank_opinions, render_summary

logger = logging.getLogger(__name__)

STAGES = ("ingest", "opinions", "candidates", "sample", "summarize", "evaluate")


class ConfigError(ValueError):
    """Invalid pipeline configuration (exit code 1)."""


class PipelineError(RuntimeError):
    """Stage failure at runtime (exit code 2)."""


class MissingArtifactError(PipelineError):
    """An upstream stage's artifact is absent."""


@dataclass
class PipelineConfig:
    corpus: str = ""
    summaries: str = ""
    outdir: str = "out"
    scorer: str = "lexical"  # "lexical" | "remote"
    endpoint: str | None = None
    min_reviews: int = 20
    max_reviews: int = 200
    use_clauses: bool = True
    l_max: int = 20
    l_min: int = 2
    beta: float = 0.5
    min_set_size: int = 5
    k: int = 3
    eta: int = 100
    theta: int = 200
    temperature: float = 0.01
    w_div: float = 0.1
    word_limit: int | None = None
    summary_format: str = "both"  # "text" | "json" | "both"
    embedder: str = "hash"  # "hash" | "remote"
    seed: int = 0

    def validate(self) -> None:
        errors = []
        if not self.corpus:
            errors.append("corpus path is required")
        if self.scorer not in ("lexical", "remote"):
            errors.append(f"scorer must be 'lexical' or 'remote', got {self.scorer!r}")
        if self.scorer == "remote" and not self.endpoint:
            errors.append("remote scorer requires an endpoint URL")
        if self.embedder not in ("hash", "remote"):
            errors.append(f"embedder must be 'hash' or 'remote', got {self.embedder!r}")
        if self.embedder == "remote" and not self.endpoint:
            errors.append("remote embedder requires an endpoint URL")
        if not 0.0 <= self.beta <= 1.0:
            errors.append(f"beta must be in [0, 1], got {self.beta}")
        if self.min_reviews < 1:
            errors.append("min_reviews must be >= 1")
        if self.max_reviews < self.min_reviews:
            errors.append("max_reviews must be >= min_reviews")
        if self.l_min < 1 or self.l_max <= self.l_min:
            errors.append("require l_max > l_min >= 1")
        if self.min_set_size < 1:
            errors.append("min_set_size must be >= 1")
        if self.k < 1:
            errors.append("k must be >= 1")
        if self.eta < 0 or self.theta < 1:
            errors.append("require eta >= 0 and theta >= 1")
        if self.temperature <= 0:
            errors.append("temperature must be positive")
        if self.w_div < 0:
            errors.append("w_div must be >= 0")
        if self.word_limit is not None and self.word_limit < 1:
            errors.append("word_limit must be >= 1 when set")
        if self.summary_format not in ("text", "json", "both"):
            errors.append(f"unknown summary format {self.summary_format!r}")
        if errors:
            raise ConfigError("; ".join(errors))

    @classmethod
    def from_file(cls, path: str | Path, overrides: Mapping | None = None) -> "PipelineConfig":
        path = Path(path)
        if path.suffix == ".toml":
            try:
                import tomllib
            except ImportError:
                import tomli as tomllib
            with open(path, "rb") as f:
                data = tomllib.load(f)
        elif path.suffix == ".json":
            with open(path, encoding="utf-8") as f:
                data = json.load(f)
        else:
            raise ConfigError(f"config file must be .toml or .json, got {path.name}")
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if overrides:
            data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# Artifact paths and manifest
# ---------------------------------------------------------------------------

def _paths(outdir: Path) -> dict[str, Path]:
    return {
        "units": outdir / "units.jsonl",
        "opinions": outdir / "opinions",
        "candidates": outdir / "candidates",
        "properties": outdir / "properties",
        "rationales": outdir / "rationales",
        "summaries": outdir / "summaries",
        "report_json": outdir / "report.json",
        "report_txt": outdir / "report.txt",
        "manifest": outdir / "manifest.json",
        "align_cache": outdir / "align_cache.jsonl",
        "pairs": outdir / "pairs.jsonl",
    }


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _artifact_files(target: Path) -> list[Path]:
    if target.is_dir():
        return sorted(p for p in target.rglob("*") if p.is_file())
    return [target] if target.exists() else []


def _input_hash(config_slice: Mapping, inputs: Sequence[Path]) -> str:
    h = hashlib.sha256(json.dumps(config_slice, sort_keys=True).encode())
    for target in inputs:
        for f in _artifact_files(target):
            h.update(str(f.name).encode())
            h.update(_sha256_file(f).encode())
    return h.hexdigest()


class Manifest:
    def __init__(self, path: Path, config: PipelineConfig):
        self.path = path
        self.data = {
            "config": config.to_dict(),
            "versions": {
                "package": __version__,
                "python": sys.version.split()[0],
            },
            "stages": {},
        }
        if path.exists():
            try:
                with open(path, encoding="utf-8") as f:
                    previous = json.load(f)
                if previous.get("config") == self.data["config"]:
                    self.data["stages"] = previous.get("stages", {})
            except (OSError, ValueError):
                pass

    def stage_fresh(self, name: str, input_hash: str) -> bool:
        entry = self.data["stages"].get(name)
        if not entry or entry.get("input_hash") != input_hash:
            return False
        for rel, digest in entry.get("outputs", {}).items():
            f = self.path.parent / rel
            if not f.exists() or _sha256_file(f) != digest:
                return False
        return True

    def record(self, name: str, input_hash: str, outputs: Sequence[Path]) -> None:
        files = {}
        for target in outputs:
            for f in _artifact_files(target):
                files[str(f.relative_to(self.path.parent))] = _sha256_file(f)
        self.data["stages"][name] = {"input_hash": input_hash, "outputs": files}
        self.flush()

    def record_failure(self, name: str, error: str) -> None:
        self.data["failed_stage"] = name
        self.data["error"] = error
        self.flush()

    def flush(self) -> None:
        with open(self.path, "w", encoding="utf-8") as f:
            json.dump(self.data, f, indent=2, sort_keys=True)
            f.write("\n")


# ---------------------------------------------------------------------------
# Artifact I/O
# ---------------------------------------------------------------------------

def _write_jsonl(path: Path, records: Sequence[Mapping]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for rec in records:
            f.write(json.dumps(rec, sort_keys=True) + "\n")


def _write_json(path: Path, payload: Mapping) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")


def _read_jsonl(path: Path) -> list[dict]:
    out = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out


def _require(path: Path, stage: str, needed_by: str) -> None:
    if not path.exists():
        raise MissingArtifactError(
            f"stage '{needed_by}' requires {path.name}; run stage '{stage}' first"
        )


def _load_units(path: Path) -> tuple[dict[str, list[SentenceUnit]], dict[str, AbsaAnnotation]]:
    by_entity: dict[str, list[SentenceUnit]] = {}
    annotations: dict[str, AbsaAnnotation] = {}
    for rec in _read_jsonl(path):
        absa = rec.pop("absa", None)
        unit = SentenceUnit.from_dict(rec)
        by_entity.setdefault(unit.entity_id, []).append(unit)
        if absa:
            annotations[unit.unit_id] = AbsaAnnotation.from_dict(absa)
    return by_entity, annotations


def _load_summary_sentences(path: Path) -> dict[str, list[tuple[str, AbsaAnnotation | None]]]:
    out: dict[str, list[tuple[str, AbsaAnnotation | None]]] = {}
    for rec in _read_jsonl(path):
        ann = rec.get("absa")
        out.setdefault(rec["entity_id"], []).append(
            (rec["text"], AbsaAnnotation.from_dict(ann) if ann else None)
        )
    return out


def _load_opinions(
    opinions_dir: Path, entity_id: str
) -> tuple[list[Opinion], list[OpinionCluster]]:
    path = opinions_dir / f"{_safe_name(entity_id)}.json"
    with open(path, encoding="utf-8") as f:
        payload = json.load(f)
    opinions = [Opinion.from_dict(d) for d in payload["opinions"]]
    by_id = {o.opinion_id: o for o in opinions}
    clusters = [
        OpinionCluster(
            cluster_id=c["cluster_id"],
            members=[by_id[m] for m in c["members"]],
            prototype=c["prototype"],
        )
        for c in payload["clusters"]
    ]
    return opinions, clusters


def _safe_name(entity_id: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in entity_id)


# ---------------------------------------------------------------------------
# Aligner / scorer construction
# ---------------------------------------------------------------------------

def _make_aligner(
    cfg: PipelineConfig,
    units: Sequence[SentenceUnit],
    annotations: Mapping[str, AbsaAnnotation],
    opinions: Sequence[Opinion],
    cache_path: Path | None,
) -> Aligner:
    if cfg.scorer == "lexical":
        aligner = LexicalAligner()
        for unit in units:
            ann = annotations.get(unit.unit_id)
            if ann is not None:
                aligner.register(unit.text, ann)
        for opinion in opinions:
            aligner.register(
                opinion.surface,
                AbsaAnnotation(opinion.aspect_category, opinion.sentiment),
            )
        return aligner
    remote = RemoteAligner(cfg.endpoint)
    return CachedAligner(remote, cache_path)


def _usable_units(
    cfg: PipelineConfig,
    units: Sequence[SentenceUnit],
    annotations: Mapping[str, AbsaAnnotation],
) -> list[SentenceUnit]:
    """Units the active scorer can judge.

    The lexical baseline can only score annotated units; unannotated ones are
    excluded from alignment-dependent stages with a log note.
    """
    if cfg.scorer != "lexical":
        return list(units)
    usable = [u for u in units if u.unit_id in annotations]
    dropped = len(units) - len(usable)
    if dropped:
        logger.info("lexical scorer: ignoring %d unannotated units", dropped)
    return usable


# ---------------------------------------------------------------------------
# Stages
# ---------------------------------------------------------------------------

def stage_ingest(cfg: PipelineConfig, paths: Mapping[str, Path]) -> None:
    corpus = load_corpus(cfg.corpus)
    corpus = filter_entities(corpus, cfg.min_reviews, cfg.max_reviews, cfg.seed)
    units = sentences_to_units(corpus, cfg.use_clauses, cfg.l_max, cfg.l_min)
    annotations = unit_annotations(corpus, units)
    records = []
    for unit in units:
        rec = unit.to_dict()
        ann = annotations.get(unit.unit_id)
        rec["absa"] = ann.to_dict() if ann else None
        records.append(rec)
    _write_jsonl(paths["units"], records)


def stage_opinions(cfg: PipelineConfig, paths: Mapping[str, Path]) -> None:
    _require(paths["units"], "ingest", "opinions")
    if not Path(cfg.summaries).exists():
        raise PipelineError(f"summary-sentence file not found: {cfg.summaries}")
    by_entity, annotations = _load_units(paths["units"])
    summaries = _load_summary_sentences(Path(cfg.summaries))
    tagger = RemoteAbsaTagger(cfg.endpoint) if cfg.scorer == "remote" else None
    paths["opinions"].mkdir(parents=True, exist_ok=True)
    for entity_id, units in by_entity.items():
        annotated: list[tuple[str, AbsaAnnotation]] = []
        for text, ann in summaries.get(entity_id, []):
            if ann is None and tagger is not None:
                ann = tagger.annotate(text)
            if ann is None:
                logger.warning(
                    "summary sentence without annotation skipped (%s)", entity_id
                )
                continue
            annotated.append((text, ann))
        opinions = extract_opinions(annotated)
        usable = _usable_units(cfg, units, annotations)
        aligner = _make_aligner(cfg, usable, annotations, opinions, paths["align_cache"])
        vectors = {
            o.opinion_id: build_feature_vector(o, usable, aligner) for o in opinions
        }
        clusters = cluster_opinions(opinions, vectors, cfg.beta)
        _write_json(
            paths["opinions"] / f"{_safe_name(entity_id)}.json",
            {
                "entity_id": entity_id,
                "clusters": [
                    {
                        "cluster_id": c.cluster_id,
                        "prototype": c.prototype,
                        "members": [o.opinion_id for o in c.members],
                    }
                    for c in clusters
                ],
                "opinions": [o.to_dict() for o in opinions],
            },
        )


def stage_candidates(cfg: PipelineConfig, paths: Mapping[str, Path]) -> None:
    _require(paths["units"], "ingest", "candidates")
    _require(paths["opinions"], "opinions", "candidates")
    by_entity, annotations = _load_units(paths["units"])
    paths["candidates"].mkdir(parents=True, exist_ok=True)
    for entity_id, units in by_entity.items():
        opinions, clusters = _load_opinions(paths["opinions"], entity_id)
        usable = _usable_units(cfg, units, annotations)
        aligner = _make_aligner(cfg, usable, annotations, opinions, paths["align_cache"])
        sets = build_candidate_sets(usable, clusters, aligner, cfg.min_set_size)
        _write_json(
            paths["candidates"] / f"{_safe_name(entity_id)}.json",
            {"entity_id": entity_id, "sets": [s.to_dict() for s in sets]},
        )


def stage_sample(cfg: PipelineConfig, paths: Mapping[str, Path]) -> None:
    _require(paths["units"], "ingest", "sample")
    _require(paths["opinions"], "opinions", "sample")
    _require(paths["candidates"], "candidates", "sample")
    by_entity, annotations = _load_units(paths["units"])
    paths["properties"].mkdir(parents=True, exist_ok=True)
    paths["rationales"].mkdir(parents=True, exist_ok=True)
    for entity_id, units in by_entity.items():
        opinions, clusters = _load_opinions(paths["opinions"], entity_id)
        with open(paths["candidates"] / f"{_safe_name(entity_id)}.json",
                  encoding="utf-8") as f:
            sets = [CandidateSet.from_dict(d) for d in json.load(f)["sets"]]
        usable = _usable_units(cfg, units, annotations)
        units_by_id = {u.unit_id: u for u in usable}
        aligner = _make_aligner(cfg, usable, annotations, opinions, paths["align_cache"])
        if cfg.scorer == "remote":
            spec_scorer = RemoteSpecificityScorer(cfg.endpoint)
        else:
            spec_scorer = BaselineSpecificityScorer(usable, cfg.l_max)
        prop_records = []
        rationale_records = []
        for cand in sets:
            scores = compute_property_scores(
                cand, clusters, units_by_id, aligner, spec_scorer
            )
            for uid in cand.member_unit_ids:
                rec = scores[uid].to_dict()
                rec["cluster_id"] = cand.cluster_id
                prop_records.append(rec)
            problem = SamplingProblem.build(cand, scores, units_by_id)
            seed = derive_seed(cfg.seed, entity_id, cand.cluster_id)
            gibbs = GibbsConfig(
                k=cfg.k,
                eta=cfg.eta,
                theta=cfg.theta,
                temperature=cfg.temperature,
                w_div=cfg.w_div,
                seed=seed,
            )
            rset = sample_rationales(
                cand.prototype_opinion.opinion_id, problem, gibbs
            )
            rec = rset.to_dict()
            rec["cluster_id"] = cand.cluster_id
            rec["surface"] = cand.prototype_opinion.surface
            rec["seed"] = seed
            rationale_records.append(rec)
        _write_jsonl(paths["properties"] / f"{_safe_name(entity_id)}.jsonl", prop_records)
        _write_jsonl(paths["rationales"] / f"{_safe_name(entity_id)}.jsonl", rationale_records)


def _load_rationales(paths: Mapping[str, Path], entity_id: str) -> dict[str, RationaleSet]:
    out = {}
    for rec in _read_jsonl(paths["rationales"] / f"{_safe_name(entity_id)}.jsonl"):
        out[rec["cluster_id"]] = RationaleSet(
            opinion_id=rec["opinion"],
            unit_ids=tuple(rec["rationales"]),
            joint_score=rec["joint_exponent"],
            frequency=rec["frequency"],
            total_recorded=rec["recorded"],
        )
    return out


def stage_summarize(cfg: PipelineConfig, paths: Mapping[str, Path]) -> None:
    _require(paths["units"], "ingest", "summarize")
    _require(paths["candidates"], "candidates", "summarize")
    _require(paths["rationales"], "sample", "summarize")
    by_entity, _ = _load_units(paths["units"])
    paths["summaries"].mkdir(parents=True, exist_ok=True)
    for entity_id, units in by_entity.items():
        with open(paths["candidates"] / f"{_safe_name(entity_id)}.json",
                  encoding="utf-8") as f:
            sets = [CandidateSet.from_dict(d) for d in json.load(f)["sets"]]
        rationale_sets = _load_rationales(paths, entity_id)
        units_by_id = {u.unit_id: u for u in units}
        summary = assemble_summary(
            entity_id, rank_opinions(sets), rationale_sets, units_by_id, cfg.word_limit
        )
        base = paths["summaries"] / _safe_name(entity_id)
        if cfg.summary_format in ("text", "both"):
            with open(f"{base}.summary.txt", "w", encoding="utf-8") as f:
                f.write(render_summary(summary, "text"))
        if cfg.summary_format in ("json", "both"):
            with open(f"{base}.summary.json", "w", encoding="utf-8") as f:
                f.write(render_summary(summary, "json"))


def stage_evaluate(cfg: PipelineConfig, paths: Mapping[str, Path]) -> None:
    _require(paths["units"], "ingest", "evaluate")
    _require(paths["opinions"], "opinions", "evaluate")
    _require(paths["candidates"], "candidates", "evaluate")
    _require(paths["rationales"], "sample", "evaluate")
    by_entity, _ = _load_units(paths["units"])
    if cfg.embedder == "remote":
        embedder = RemoteEmbedder(cfg.endpoint)
    else:
        embedder = HashEmbedder()
    entail = None
    if cfg.endpoint:
        candidate = RemoteEntailmentScorer(cfg.endpoint)
        if candidate.available():
            entail = candidate
    per_entity = {}
    for entity_id, units in by_entity.items():
        _, clusters = _load_opinions(paths["opinions"], entity_id)
        with open(paths["candidates"] / f"{_safe_name(entity_id)}.json",
                  encoding="utf-8") as f:
            sets = [CandidateSet.from_dict(d) for d in json.load(f)["sets"]]
        rationale_sets = _load_rationales(paths, entity_id)
        units_by_id = {u.unit_id: u for u in units}
        clusters_by_id = {c.cluster_id: c for c in clusters}
        set_texts = {
            s.cluster_id: [units_by_id[u].text for u in s.member_unit_ids]
            for s in sets
        }
        cluster_opinions_map = {
            s.cluster_id: [o.surface for o in clusters_by_id[s.cluster_id].members]
            for s in sets
        }
        prototype_surfaces = {
            s.cluster_id: s.prototype_opinion.surface for s in sets
        }
        rationale_texts = {
            cid: [units_by_id[u].text for u in rset.unit_ids]
            for cid, rset in rationale_sets.items()
            if cid in set_texts
        }
        per_entity[entity_id] = evaluate_entity(
            [u.text for u in units],
            set_texts,
            cluster_opinions_map,
            prototype_surfaces,
            rationale_texts,
            embedder,
            entail,
        )
    notes = ["overall: requires at least two systems; not computed for a single run"]
    if entail is None:
        notes.append("sc: entailment endpoint unavailable; metric omitted")
    report = MetricReport.aggregate(per_entity, notes)
    paths["report_json"].parent.mkdir(parents=True, exist_ok=True)
    with open(paths["report_json"], "w", encoding="utf-8") as f:
        f.write(report.to_json())
    with open(paths["report_txt"], "w", encoding="utf-8") as f:
        f.write(report.to_table())


def stage_align_cache(cfg: PipelineConfig, paths: Mapping[str, Path]) -> None:
    """Warm the judgment cache for every (unit, opinion) pair the pipeline scores."""
    _require(paths["units"], "ingest", "align-cache")
    _require(paths["opinions"], "opinions", "align-cache")
    by_entity, annotations = _load_units(paths["units"])
    for entity_id, units in by_entity.items():
        opinions, _ = _load_opinions(paths["opinions"], entity_id)
        usable = _usable_units(cfg, units, annotations)
        aligner = _make_aligner(cfg, usable, annotations, opinions, paths["align_cache"])
        if not isinstance(aligner, CachedAligner):
            aligner = CachedAligner(aligner, paths["align_cache"])
        for unit in usable:
            for opinion in opinions:
                if not aligner._gate_blocks(unit.text, opinion.surface):
                    aligner.judge(unit.text, opinion.surface)


_STAGE_FUNCS = {
    "ingest": stage_ingest,
    "opinions": stage_opinions,
    "candidates": stage_candidates,
    "sample": stage_sample,
    "summarize": stage_summarize,
    "evaluate": stage_evaluate,
    "align-cache": stage_align_cache,
}

# Config fields each stage's behavior depends on, for resume hashing.
_STAGE_CONFIG_KEYS = {
    "ingest": ("corpus", "min_reviews", "max_reviews", "use_clauses", "l_max",
               "l_min", "seed"),
    "opinions": ("summaries", "scorer", "endpoint", "beta"),
    "candidates": ("scorer", "endpoint", "min_set_size"),
    "sample": ("scorer", "endpoint", "k", "eta", "theta", "temperature",
               "w_div", "seed", "l_max"),
    "summarize": ("word_limit", "summary_format"),
    "evaluate": ("embedder", "endpoint"),
    "align-cache": ("scorer", "endpoint"),
}

_STAGE_INPUT_ARTIFACTS = {
    "ingest": (),
    "opinions": ("units",),
    "candidates": ("units", "opinions"),
    "sample": ("units", "opinions", "candidates"),
    "summarize": ("units", "candidates", "rationales"),
    "evaluate": ("units", "opinions", "candidates", "rationales"),
    "align-cache": ("units", "opinions"),
}

_STAGE_OUTPUT_ARTIFACTS = {
    "ingest": ("units",),
    "opinions": ("opinions",),
    "candidates": ("candidates",),
    "sample": ("properties", "rationales"),
    "summarize": ("summaries",),
    "evaluate": ("report_json", "report_txt"),
    "align-cache": ("align_cache",),
}


def _stage_external_inputs(cfg: PipelineConfig, stage: str) -> list[Path]:
    external = {"ingest": [Path(cfg.corpus)]}
    if stage == "opinions":
        external["opinions"] = [Path(cfg.summaries)]
    return external.get(stage, [])


def run_stage(cfg: PipelineConfig, stage: str, force: bool = False) -> bool:
    """Run one stage if its inputs changed; returns True when work was done."""
    outdir = Path(cfg.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = _paths(outdir)
    manifest = Manifest(paths["manifest"], cfg)
    config_slice = {
        key: getattr(cfg, key) for key in _STAGE_CONFIG_KEYS[stage]
    }
    inputs = _stage_external_inputs(cfg, stage) + [
        paths[a] for a in _STAGE_INPUT_ARTIFACTS[stage]
    ]
    input_hash = _input_hash(config_slice, inputs)
    if not force and manifest.stage_fresh(stage, input_hash):
        logger.info("stage %s unchanged; skipping", stage)
        return False
    try:
        _STAGE_FUNCS[stage](cfg, paths)
    except Exception as exc:
        manifest.record_failure(stage, str(exc))
        raise
    manifest.record(
        stage, input_hash, [paths[a] for a in _STAGE_OUTPUT_ARTIFACTS[stage]]
    )
    return True


def run(cfg: PipelineConfig) -> None:
    """Execute all stages in order with resume support."""
    cfg.validate()
    if cfg.scorer == "remote":
        # Fail fast before any stage runs if the service is unreachable.
        RemoteAligner(cfg.endpoint)
    for stage in STAGES:
        run_stage(cfg, stage)


def run_gen_pairs(
    corpus_path: str | Path,
    out_path: str | Path,
    per_label: int = 1,
    seed: int = 0,
) -> dict:
    """Generate alignment fine-tuning pairs from an annotated corpus."""
    corpus = load_corpus(corpus_path)
    sentences = []
    for entity in corpus.entities:
        for review in entity.reviews:
            for sentence in review.sentences:
                if sentence.absa is not None:
                    sentences.append((sentence.text, sentence.absa))
    result = generate_finetuning_pairs(sentences, per_label=per_label, seed=seed)
    write_pairs_jsonl(result.pairs, out_path)
    report = {
        "sentences": len(sentences),
        "pairs": len(result.pairs),
        "skipped": {f"{kind}/{label}": n for (kind, label), n in sorted(result.skipped.items())},
    }
    return report
