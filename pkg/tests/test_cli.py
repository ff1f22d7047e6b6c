"""CLI subcommands: exit codes, file outputs, reproducibility."""

import json

import pytest

from advlab.cli import main


def run_cli(*argv):
    return main(list(argv))


class TestFixtureCommand:
    def test_same_seed_identical_directories(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run_cli("fixture", "--seed", "5", "--out", str(a)) == 0
        assert run_cli("fixture", "--seed", "5", "--out", str(b)) == 0
        for name in ("model.json", "dataset.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()


class TestAttackCommand:
    def test_writes_reproducible_record(self, fixture_dir, tmp_path):
        args = [
            "attack",
            "--model", str(fixture_dir / "model.json"),
            "--data", str(fixture_dir / "dataset.json"),
            "--attack", "fgsm", "--epsilon", "0.1",
            "--samples", "8", "--seed", "7",
        ]
        r1, r2 = tmp_path / "r1.json", tmp_path / "r2.json"
        assert run_cli(*args, "--out", str(r1)) == 0
        assert run_cli(*args, "--out", str(r2)) == 0
        assert r1.read_bytes() == r2.read_bytes()
        record = json.loads(r1.read_text())
        assert record["kind"] == "attack"
        assert len(record["report"]["samples"]) == 8

    def test_fgsm_steps_rejected_exit_2(self, fixture_dir, tmp_path, capsys):
        code = run_cli(
            "attack",
            "--model", str(fixture_dir / "model.json"),
            "--data", str(fixture_dir / "dataset.json"),
            "--attack", "fgsm", "--epsilon", "0.1", "--steps", "5",
            "--samples", "4", "--seed", "1",
            "--out", str(tmp_path / "r.json"),
        )
        assert code == 2
        assert "steps" in capsys.readouterr().err

    def test_store_persistence(self, fixture_dir, tmp_path):
        store = tmp_path / "store"
        out = tmp_path / "r.json"
        assert run_cli(
            "attack",
            "--model", str(fixture_dir / "model.json"),
            "--data", str(fixture_dir / "dataset.json"),
            "--attack", "fgsm", "--epsilon", "0.05",
            "--samples", "4", "--seed", "3",
            "--out", str(out), "--store", str(store),
        ) == 0
        record = json.loads(out.read_text())
        stored = store / "runs" / f"{record['run_id']}.json"
        assert stored.read_bytes() == out.read_bytes()


class TestDefendCommand:
    def test_gate_defense_run(self, fixture_dir, tmp_path):
        out = tmp_path / "d.json"
        assert run_cli(
            "defend",
            "--model", str(fixture_dir / "model.json"),
            "--data", str(fixture_dir / "dataset.json"),
            "--attack", "bim", "--epsilon", "0.1", "--steps", "4",
            "--samples", "4", "--seed", "2",
            "--defense", "prediction_similarity", "--window-capacity", "16",
            "--out", str(out),
        ) == 0
        record = json.loads(out.read_text())
        assert record["kind"] == "defense"
        assert record["report"]["kind"] == "prediction_similarity"
        assert len(record["report"]["risk_scores"]) == 4 * 5

    def test_wrong_param_for_kind_exit_2(self, fixture_dir, tmp_path, capsys):
        code = run_cli(
            "defend",
            "--model", str(fixture_dir / "model.json"),
            "--data", str(fixture_dir / "dataset.json"),
            "--attack", "fgsm", "--epsilon", "0.1",
            "--samples", "4", "--seed", "2",
            "--defense", "prediction_similarity", "--latent-dim", "8",
            "--out", str(tmp_path / "d.json"),
        )
        assert code == 2
        assert "latent_dim" in capsys.readouterr().err


class TestExplainCommand:
    def test_dumps_sorted_ranking(self, fixture_dir, capsys):
        assert run_cli(
            "explain",
            "--model", str(fixture_dir / "model.json"),
            "--data", str(fixture_dir / "dataset.json"),
            "--class-a", "0", "--class-b", "1", "--k", "10",
        ) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["class_pair"] == [0, 1]
        assert len(payload["ranking"]) == 10
        diffs = [r["difference"] for r in payload["ranking"]]
        assert all(a >= b for a, b in zip(diffs, diffs[1:]))

    def test_same_class_pair_exit_2(self, fixture_dir, capsys):
        code = run_cli(
            "explain",
            "--model", str(fixture_dir / "model.json"),
            "--data", str(fixture_dir / "dataset.json"),
            "--class-a", "1", "--class-b", "1",
        )
        assert code == 2
        assert "distinct" in capsys.readouterr().err


class TestExportCommand:
    def test_model_round_trip(self, fixture_dir, tmp_path):
        out = tmp_path / "m2.json"
        assert run_cli("export", "--model", str(fixture_dir / "model.json"),
                       "--out", str(out)) == 0
        assert out.read_bytes() == (fixture_dir / "model.json").read_bytes()

    def test_dataset_round_trip(self, fixture_dir, tmp_path):
        out = tmp_path / "d2.json"
        assert run_cli("export", "--data", str(fixture_dir / "dataset.json"),
                       "--out", str(out)) == 0
        assert out.read_bytes() == (fixture_dir / "dataset.json").read_bytes()

    def test_both_sources_rejected(self, fixture_dir, tmp_path, capsys):
        code = run_cli(
            "export", "--model", str(fixture_dir / "model.json"),
            "--data", str(fixture_dir / "dataset.json"),
            "--out", str(tmp_path / "x.json"),
        )
        assert code == 2
