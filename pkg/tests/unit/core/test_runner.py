"""
Tests du PipelineRunner: une requête par commande, sans passer par click.
"""

import json

import numpy as np
import pytest

from conftest import FIXTURES_ROOT
from surgtc.core import CommandType, CoreRequest, PipelineRunner, ResponseType, resolve_workers
from surgtc.core.runner import THREADS_ENV
from surgtc.domain.errors import ConfigError
from surgtc.infrastructure.adapters.pgm_label_map_adapter import write_label_map

MAJORITY = FIXTURES_ROOT / "majority_relabel"
HALVES = FIXTURES_ROOT / "evaluate_half"


def execute(command, workers=1, **parameters):
    return PipelineRunner(workers=workers).execute_command(CoreRequest(command, parameters))


def small_plan(path, sequences=2, seed=1):
    plan = {
        "sequences": sequences,
        "synth": {
            "frames": 6,
            "height": 16,
            "width": 20,
            "num_classes": 3,
            "objects": [{"size": [4, 4], "origin": [2, 2], "velocity": [1, 1], "class_id": 2}],
            "noise": {"flip_probability": 0.4},
            "seed": seed,
        },
    }
    path.write_text(json.dumps(plan), encoding="utf-8")
    return path


class TestResolveWorkers:
    def test_explicit(self):
        assert resolve_workers(3) == 3

    def test_environment(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV, "5")
        assert resolve_workers() == 5

    def test_cpu_count_fallback(self, monkeypatch, tmp_path):
        monkeypatch.chdir(tmp_path)
        monkeypatch.delenv(THREADS_ENV, raising=False)
        assert resolve_workers() >= 1

    @pytest.mark.parametrize("value", ["many", "0"])
    def test_invalid_environment(self, monkeypatch, value):
        monkeypatch.setenv(THREADS_ENV, value)
        with pytest.raises(ConfigError):
            resolve_workers()


class TestCorrect:
    def test_majority_fixture(self, tmp_path):
        response = execute(
            CommandType.CORRECT,
            detections=MAJORITY / "input" / "detections",
            flows=MAJORITY / "input" / "flows",
            frames=2,
            iou_threshold=0.0,
            assignment="weighted_mode",
            output=tmp_path,
        )
        assert response.ok, response.message
        assert (tmp_path / "tiny.json").read_bytes() == (MAJORITY / "expected" / "tiny.json").read_bytes()
        assert response.data["config"]["window_f"] == 2

    def test_zero_window_needs_no_flows(self, tmp_path):
        response = execute(
            CommandType.CORRECT, detections=MAJORITY / "input" / "detections", frames=0, output=tmp_path
        )
        assert response.ok
        assert (tmp_path / "tiny.json").read_bytes() == (MAJORITY / "input" / "detections" / "tiny.json").read_bytes()

    def test_flows_required_otherwise(self, tmp_path):
        response = execute(CommandType.CORRECT, detections=MAJORITY / "input" / "detections", output=tmp_path)
        assert response.type == ResponseType.ERROR
        assert response.status == "missing_input"
        assert not (tmp_path / "tiny.json").exists()

    def test_missing_flow_file_names_it(self, tmp_path):
        flows = tmp_path / "flows" / "tiny"
        flows.mkdir(parents=True)
        for index in (1, 2):
            (flows / f"00000{index}.flo").write_bytes((MAJORITY / "input" / "flows" / "tiny" / "000001.flo").read_bytes())
        response = execute(
            CommandType.CORRECT,
            detections=MAJORITY / "input" / "detections",
            flows=tmp_path / "flows",
            output=tmp_path / "out",
        )
        assert response.status == "missing_input"
        assert "000003.flo" in response.message
        assert response.data["path"].endswith("000003.flo")
        assert not (tmp_path / "out").exists()

    def test_profile_and_override(self, tmp_path):
        common = dict(detections=MAJORITY / "input" / "detections", flows=MAJORITY / "input" / "flows")
        profiled = execute(CommandType.CORRECT, profile="endovis2018", output=tmp_path / "a", **common)
        assert profiled.data["config"]["iou_threshold_u"] == 0.5
        overridden = execute(
            CommandType.CORRECT, profile="endovis2018", iou_threshold=0.2, output=tmp_path / "b", **common
        )
        assert overridden.data["config"]["iou_threshold_u"] == 0.2

    def test_invalid_parameters(self, tmp_path):
        response = execute(
            CommandType.CORRECT, detections=MAJORITY / "input" / "detections", frames=-1, output=tmp_path
        )
        assert response.status == "config_error"

    def test_unknown_sequence(self, tmp_path):
        response = execute(
            CommandType.CORRECT,
            detections=MAJORITY / "input" / "detections",
            frames=0,
            sequences=["other"],
            output=tmp_path,
        )
        assert response.status == "missing_input"
        assert "other.json" in response.message


class TestEvaluate:
    def test_half_fixture(self, tmp_path):
        response = execute(
            CommandType.EVALUATE,
            detections=HALVES / "input" / "detections",
            groundtruth=HALVES / "input" / "groundtruth",
            output=tmp_path,
        )
        assert response.ok
        assert response.data["report"]["eq1_iou"] == 0.5
        assert (tmp_path / "report.json").read_bytes() == (HALVES / "expected" / "report.json").read_bytes()
        assert "mean class IoU" in response.data["table"]

    def test_label_map_size_mismatch(self, tmp_path):
        groundtruth = tmp_path / "gt" / "halves"
        for index in (0, 1):
            write_label_map(np.zeros((3, 3), dtype=np.uint8), groundtruth / f"00000{index}.pgm")
        response = execute(
            CommandType.EVALUATE,
            detections=HALVES / "input" / "detections",
            groundtruth=tmp_path / "gt",
            output=tmp_path / "out",
        )
        assert response.status == "shape_error"
        assert response.data["path"].endswith("000000.pgm")
        assert response.data["frame"] == 0


class TestSimulate:
    def test_reruns_are_byte_identical(self, tmp_path):
        plan = small_plan(tmp_path / "plan.json")
        for name, workers in (("a", 1), ("b", 3)):
            response = execute(CommandType.SIMULATE, workers=workers, config=plan, output=tmp_path / name)
            assert response.ok
            assert response.data["sequences"] == ["seq_00", "seq_01"]
        files_a = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*") if p.is_file())
        files_b = sorted(p.relative_to(tmp_path / "b") for p in (tmp_path / "b").rglob("*") if p.is_file())
        assert files_a == files_b
        assert len(files_a) == 2 * (1 + 1 + 5 + 6) + 1
        for relative in files_a:
            assert (tmp_path / "a" / relative).read_bytes() == (tmp_path / "b" / relative).read_bytes()
        assert (tmp_path / "a" / "vocabulary.txt").read_text(encoding="utf-8") == "1 class_1\n2 class_2\n3 class_3\n"

    def test_zero_sequences(self, tmp_path):
        plan = small_plan(tmp_path / "plan.json", sequences=0)
        response = execute(CommandType.SIMULATE, config=plan, output=tmp_path / "out")
        assert response.ok
        assert (tmp_path / "out" / "detections").is_dir()
        assert list((tmp_path / "out" / "detections").iterdir()) == []

    def test_invalid_plan(self, tmp_path):
        path = tmp_path / "plan.json"
        path.write_text(json.dumps({"synth": {"frames": 3}}), encoding="utf-8")
        response = execute(CommandType.SIMULATE, config=path, output=tmp_path / "out")
        assert response.status == "config_error"


class TestAblate:
    def test_single_cell_matches_correct_then_evaluate(self, tmp_path):
        plan = small_plan(tmp_path / "plan.json", sequences=3)
        execute(CommandType.SIMULATE, config=plan, output=tmp_path / "data")
        data = tmp_path / "data"
        common = dict(
            detections=data / "detections",
            vocabulary=str(data / "vocabulary.txt"),
        )
        ablation = execute(
            CommandType.ABLATE,
            workers=2,
            flows=data / "flows",
            groundtruth=data / "groundtruth",
            grid_thresholds=[0.0],
            grid_frames=[4],
            grid_assignments=["weighted_mode"],
            output=tmp_path / "ablation",
            **common,
        )
        assert ablation.ok, ablation.message
        rows = ablation.data["ablation"]["rows"]
        assert len(rows) == 1

        execute(CommandType.CORRECT, flows=data / "flows", frames=4, output=tmp_path / "corrected", **common)
        evaluation = execute(
            CommandType.EVALUATE,
            detections=tmp_path / "corrected",
            vocabulary=common["vocabulary"],
            groundtruth=data / "groundtruth",
            output=tmp_path / "evaluation",
        )
        assert rows[0]["report"] == evaluation.data["report"]
        assert (tmp_path / "ablation" / "ablation.txt").is_file()


class TestVerifyFixtures:
    def test_missing_root(self, tmp_path):
        response = execute(CommandType.VERIFY_FIXTURES, root=tmp_path / "absent")
        assert response.status == "missing_input"
