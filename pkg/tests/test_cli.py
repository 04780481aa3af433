"""Command-line tests: exit codes and the synth -> segment -> train -> track -> eval workflow."""

from pathlib import Path

import pytest

from kfmot.cli.ablation import parse_sweep, run_ablation, sign_test, summarize_cells
from kfmot.cli.main import EXIT_INVALID, EXIT_OK, main
from kfmot.core.exceptions import ConfigurationError
from kfmot.io.mot_files import parse_results
from kfmot.models.config import RunConfig
from kfmot.models.scenario import ScenarioConfig, ScenarioKind


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("KFMOT_CONFIG_FILE", "KFMOT_THREADS", "KFMOT_LOG_FILE", "KFMOT_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def scene(tmp_path) -> Path:
    out = tmp_path / "scene"
    code = main(["synth", "--out-dir", str(out), "--kind", "occlusion", "--objects", "2", "--frames", "20",
                 "--gap", "1,6,4", "--gap", "2,10,3", "--seed", "3"])
    assert code == EXIT_OK
    return out


def inputs(scene: Path):
    return ["--dets", str(scene / "det.txt"), "--feats", str(scene / "features.txt")]


class TestExitCodes:
    def test_help(self, capsys):
        assert main(["--help"]) == EXIT_OK
        assert "segment" in capsys.readouterr().out

    def test_unknown_subcommand(self):
        assert main(["frobnicate"]) == EXIT_INVALID

    def test_unknown_flag(self, tmp_path):
        assert main(["synth", "--out-dir", str(tmp_path), "--no-such-flag"]) == EXIT_INVALID

    def test_missing_input_file(self, tmp_path):
        code = main(["segment", "--dets", str(tmp_path / "nope.txt"), "--feats", str(tmp_path / "nope.feat"),
                     "--out", str(tmp_path / "s.txt")])
        assert code == EXIT_INVALID
        assert not (tmp_path / "s.txt").exists()

    def test_out_of_range_config_value(self, tmp_path):
        assert main(["synth", "--out-dir", str(tmp_path), "--epsilon", "3"]) == EXIT_INVALID

    def test_malformed_gap(self, tmp_path):
        assert main(["synth", "--out-dir", str(tmp_path), "--gap", "1,2"]) == EXIT_INVALID

    def test_unknown_key_in_config_file(self, tmp_path):
        config = tmp_path / "run.cfg"
        config.write_text("epsilon=0.2\nwarp_speed=9\n")
        assert main(["synth", "--out-dir", str(tmp_path), "--config", str(config)]) == EXIT_INVALID

    def test_unequal_eval_lists(self, scene):
        code = main(["eval", "--gt", str(scene / "gt.txt"), "--gt", str(scene / "gt.txt"),
                     "--results", str(scene / "gt.txt")])
        assert code == EXIT_INVALID

    def test_unknown_variant(self, tmp_path):
        code = main(["ablate", "--kind", "crossing", "--seeds", "1", "--variants", "baseline,+magic",
                     "--out", str(tmp_path / "s.csv")])
        assert code == EXIT_INVALID


class TestWorkflow:
    def test_synth_writes_scene(self, scene):
        assert sorted(p.name for p in scene.iterdir()) == ["det.txt", "features.txt", "gt.txt", "scenario.json"]
        assert '"occlusion_gaps"' in (scene / "scenario.json").read_text()

    def test_config_file_seed_matches_flag(self, tmp_path, scene):
        config = tmp_path / "run.cfg"
        config.write_text("seed=3\n")
        again = tmp_path / "again"
        code = main(["synth", "--out-dir", str(again), "--kind", "occlusion", "--objects", "2", "--frames", "20",
                     "--gap", "1,6,4", "--gap", "2,10,3", "--config", str(config)])
        assert code == EXIT_OK
        for name in ("det.txt", "features.txt", "gt.txt"):
            assert (again / name).read_bytes() == (scene / name).read_bytes()

    def test_segment_track_eval(self, tmp_path, scene):
        strategy = tmp_path / "strategy.txt"
        results = tmp_path / "results.txt"
        report = tmp_path / "report.csv"
        assert main(["segment", *inputs(scene), "--equal", "5", "--out", str(strategy)]) == EXIT_OK
        assert main(["track", *inputs(scene), "--strategy", str(strategy), "--out", str(results)]) == EXIT_OK
        assert parse_results(results.read_text()).tracks
        assert main(["eval", "--gt", str(scene / "gt.txt"), "--results", str(results),
                     "--out", str(report)]) == EXIT_OK

        header, row, combined = report.read_text().splitlines()
        assert header == "sequence,hota,deta,assa,idf1,mota,ids,fp,fn"
        assert row.startswith("results,")
        assert combined.split(",")[1:] == row.split(",")[1:]
        assert 0.0 < float(row.split(",")[1]) <= 1.0

    def test_q_learning_segmentation(self, tmp_path, scene):
        strategy = tmp_path / "strategy.txt"
        code = main(["segment", *inputs(scene), "--episodes", "200", "--max-len", "5", "--seed", "1",
                     "--out", str(strategy)])
        assert code == EXIT_OK
        assert strategy.read_text().strip()

    def test_train_then_track_with_learned_weights(self, tmp_path, scene):
        strategy = tmp_path / "strategy.txt"
        scorer = tmp_path / "scorer.txt"
        weights = tmp_path / "gcn.txt"
        results = tmp_path / "results.txt"
        assert main(["segment", *inputs(scene), "--equal", "4", "--out", str(strategy)]) == EXIT_OK
        code = main(["train", *inputs(scene), "--gt", str(scene / "gt.txt"), "--strategy", str(strategy),
                     "--iterations", "20", "--gcn-weights-out", str(weights), "--out", str(scorer)])
        assert code == EXIT_OK
        assert weights.exists()
        code = main(["track", *inputs(scene), "--strategy", str(strategy), "--scorer", str(scorer),
                     "--gcn-weights", str(weights), "--out", str(results)])
        assert code == EXIT_OK

    def test_fuse_short_flags(self, tmp_path, scene):
        fused = tmp_path / "fused.txt"
        assert main(["fuse", *inputs(scene), "--mode", "average", "--a", "0.5", "--m", "2",
                     "--out", str(fused)]) == EXIT_OK
        assert fused.read_text().startswith("D=16")


class TestAblation:
    ARGS = ["ablate", "--kind", "occlusion", "--kind", "lookalike", "--objects", "2", "--frames", "12",
            "--seeds", "2", "--episodes", "30", "--sweep-a", "0:1:0.5", "--train-scenes", "1", "--iterations", "20"]

    def test_repeatable_across_thread_counts(self, tmp_path):
        runs = []
        for threads in ("1", "3"):
            cells, summary = tmp_path / f"cells{threads}.csv", tmp_path / f"summary{threads}.csv"
            code = main([*self.ARGS, "--threads", threads, "--cells-out", str(cells), "--out", str(summary)])
            assert code == EXIT_OK
            runs.append((cells.read_bytes(), summary.read_bytes()))
        assert runs[0] == runs[1]

        rows = runs[0][0].decode().splitlines()
        assert rows[0] == "kind,seed,variant,hota,deta,assa,idf1,mota,ids,fp,fn"
        # 2 kinds x 2 seeds x (5 variants + 3 sweep points)
        assert len(rows) == 1 + 2 * 2 * 8
        assert [r.split(",")[2] for r in rows[1:9]] == [
            "baseline", "+IFF", "+IFF-avg", "+KFE", "+both", "a=0", "a=0.5", "a=1"]

    def test_report_rebuilds_summary(self, tmp_path):
        cells, summary, rebuilt = tmp_path / "cells.csv", tmp_path / "summary.csv", tmp_path / "rebuilt.csv"
        assert main([*self.ARGS, "--cells-out", str(cells), "--out", str(summary)]) == EXIT_OK
        assert main(["report", "--cells", str(cells), "--out", str(rebuilt)]) == EXIT_OK
        assert rebuilt.read_bytes() == summary.read_bytes()

    def test_report_rejects_missing_column(self, tmp_path):
        cells = tmp_path / "cells.csv"
        cells.write_text("kind,seed,variant\nocclusion,0,baseline\n")
        assert main(["report", "--cells", str(cells)]) == EXIT_INVALID


@pytest.mark.slow
class TestAblationOutcome:
    CONFIG = {"neighbors": "1", "iterations": "400", "episodes": "20000", "max_len": "8"}

    def summary(self, scenario, variant):
        cells = run_ablation([scenario], ["baseline", variant], list(range(20)), RunConfig.from_values(self.CONFIG),
                             threads=4, train_scenes=4)
        return {row["variant"]: row for row in summarize_cells(cells)}

    def test_key_frames_cut_around_pass_by_occlusions(self):
        rows = self.summary(ScenarioConfig(kind=ScenarioKind.OCCLUSION, num_objects=4, length=48), "+KFE")
        assert float(rows["+KFE"]["ids_mean"]) <= float(rows["baseline"]["ids_mean"])
        assert float(rows["+KFE"]["ids_p_value"]) < 0.05

    def test_graph_fusion_separates_lookalikes(self):
        rows = self.summary(ScenarioConfig(kind=ScenarioKind.LOOKALIKE, num_objects=2, length=40), "+IFF")
        assert float(rows["+IFF"]["ids_mean"]) <= float(rows["baseline"]["ids_mean"])
        assert float(rows["+IFF"]["ids_p_value"]) < 0.05


class TestSweepAndSignTest:
    def test_sweep_includes_both_ends(self):
        assert parse_sweep("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]
        assert parse_sweep("0.3:0.3:0.1") == [0.3]

    @pytest.mark.parametrize("text", ["0:1", "0:2:0.5", "0.5:0.1:0.1", "0:1:0", "a:b:c"])
    def test_bad_sweep(self, text):
        with pytest.raises(ConfigurationError):
            parse_sweep(text)

    def test_sign_test(self):
        assert sign_test({"1": 0, "2": 0, "3": 0}, {"1": 1, "2": 1, "3": 1}) == pytest.approx(0.125)
        assert sign_test({"1": 2}, {"1": 2}) == 1.0
        assert sign_test({"1": 3, "2": 3}, {"1": 1, "2": 1}) == pytest.approx(1.0)
