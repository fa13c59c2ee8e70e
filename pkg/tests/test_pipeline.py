"""Pipeline configuration, stage orchestration, resume, and CLI behavior."""

import json
from pathlib import Path

import pytest

import rationales
from rationales.cli import main
from rationales.pipeline import ConfigError, PipelineConfig, run_stage


@pytest.fixture
def toy_args(tmp_path):
    return [
        "--corpus", str(rationales.toy_corpus_path()),
        "--summaries", str(rationales.toy_summaries_path()),
        "--outdir", str(tmp_path / "out"),
        "--seed", "3",
    ]


class TestConfig:
    def test_defaults_match_stated_values(self):
        cfg = PipelineConfig(corpus="x", summaries="y")
        assert (cfg.min_reviews, cfg.max_reviews) == (20, 200)
        assert (cfg.l_max, cfg.l_min) == (20, 2)
        assert cfg.use_clauses is True
        assert cfg.beta == 0.5
        assert cfg.min_set_size == 5
        assert (cfg.k, cfg.eta, cfg.theta) == (3, 100, 200)
        assert cfg.temperature == 0.01
        assert cfg.w_div == 0.1

    def test_beta_out_of_range_rejected(self):
        cfg = PipelineConfig(corpus="x", summaries="y", beta=1.5)
        with pytest.raises(ConfigError, match="beta"):
            cfg.validate()

    def test_remote_requires_endpoint(self):
        cfg = PipelineConfig(corpus="x", summaries="y", scorer="remote")
        with pytest.raises(ConfigError, match="endpoint"):
            cfg.validate()

    def test_toml_file_roundtrip(self, tmp_path):
        path = tmp_path / "cfg.toml"
        path.write_text('corpus = "c.jsonl"\nsummaries = "s.jsonl"\nk = 2\n')
        cfg = PipelineConfig.from_file(path)
        assert cfg.k == 2 and cfg.corpus == "c.jsonl"

    def test_json_file_and_overrides(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"corpus": "c.jsonl", "summaries": "s.jsonl"}))
        cfg = PipelineConfig.from_file(path, {"k": 5, "corpus": None})
        assert cfg.k == 5 and cfg.corpus == "c.jsonl"

    def test_unknown_keys_rejected(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"corpus": "c", "summaries": "s", "zap": 1}))
        with pytest.raises(ConfigError, match="zap"):
            PipelineConfig.from_file(path)


class TestCli:
    def test_validation_error_is_exit_1(self, toy_args, tmp_path):
        rc = main(["run"] + toy_args + ["--beta", "1.5"])
        assert rc == 1
        assert not (tmp_path / "out" / "units.jsonl").exists()

    def test_missing_upstream_is_exit_2(self, toy_args, capsys):
        rc = main(["sample"] + toy_args)
        assert rc == 2
        assert "ingest" in capsys.readouterr().err

    def test_missing_artifact_names_prior_stage(self, toy_args, capsys):
        assert main(["ingest"] + toy_args) == 0
        assert main(["opinions"] + toy_args) == 0
        rc = main(["sample"] + toy_args)
        assert rc == 2
        assert "candidates" in capsys.readouterr().err

    def test_stage_commands_compose(self, toy_args, tmp_path):
        for stage in ["ingest", "opinions", "candidates", "sample",
                      "summarize", "evaluate"]:
            assert main([stage] + toy_args) == 0
        out = tmp_path / "out"
        assert (out / "report.json").exists()
        assert list((out / "summaries").glob("*.summary.txt"))

    def test_remote_unreachable_fails_fast(self, toy_args, capsys):
        rc = main(["run"] + toy_args
                  + ["--scorer", "remote", "--endpoint", "http://127.0.0.1:9"])
        assert rc == 2
        assert "unreachable" in capsys.readouterr().err

    def test_gen_pairs_cli(self, tmp_path, capsys):
        out = tmp_path / "pairs.jsonl"
        rc = main([
            "gen-pairs", "--corpus", str(rationales.toy_corpus_path()),
            "--out", str(out), "--per-label", "1", "--seed", "1",
        ])
        assert rc == 0
        lines = [json.loads(line) for line in out.read_text().splitlines()]
        assert lines and all(set(p) == {"x", "y", "kind", "label"} for p in lines)
        report = json.loads(capsys.readouterr().out)
        assert report["pairs"] == len(lines)

    def test_word_limit_respected(self, toy_args, tmp_path):
        assert main(["run"] + toy_args + ["--word-limit", "40"]) == 0
        for path in (tmp_path / "out" / "summaries").glob("*.summary.json"):
            payload = json.loads(path.read_text())
            assert payload["word_count"] <= 40


class TestResume:
    def config(self, tmp_path, **kwargs):
        return PipelineConfig(
            corpus=str(rationales.toy_corpus_path()),
            summaries=str(rationales.toy_summaries_path()),
            outdir=str(tmp_path / "out"),
            seed=3,
            **kwargs,
        )

    def test_unchanged_inputs_skip(self, tmp_path):
        cfg = self.config(tmp_path)
        assert run_stage(cfg, "ingest") is True
        assert run_stage(cfg, "ingest") is False

    def test_config_change_triggers_rerun(self, tmp_path):
        cfg = self.config(tmp_path)
        assert run_stage(cfg, "ingest") is True
        changed = self.config(tmp_path, l_max=15)
        assert run_stage(changed, "ingest") is True

    def test_deleted_output_triggers_rerun(self, tmp_path):
        cfg = self.config(tmp_path)
        run_stage(cfg, "ingest")
        (tmp_path / "out" / "units.jsonl").unlink()
        assert run_stage(cfg, "ingest") is True

    def test_align_cache_stage(self, tmp_path):
        cfg = self.config(tmp_path)
        run_stage(cfg, "ingest")
        run_stage(cfg, "opinions")
        assert run_stage(cfg, "align-cache") is True
        cache = Path(cfg.outdir) / "align_cache.jsonl"
        assert cache.exists() and cache.stat().st_size > 0
        records = [json.loads(line) for line in cache.read_text().splitlines()]
        assert all(r["scorer"] == "lexical-v1" for r in records)
        assert all(abs(sum(r["p"]) - 1.0) < 1e-6 for r in records)
