"""
Tests for run specs, report rendering and exit codes of the command-line front end.
"""

import json
import os
import sys

sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import pytest

from symplectic.cli import execute, load_spec, main, render
from symplectic.errors import SpecError
from symplectic.schemas import RunSpec

SCENARIOS = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data", "scenarios")


def write_spec(tmp_path, spec, name="spec.json"):
    path = tmp_path / name
    path.write_text(json.dumps(spec) if not isinstance(spec, str) else spec, encoding="utf-8")
    return str(path)


class TestRunSpec:
    def test_defaults(self):
        spec = RunSpec(command="maslov-index")
        assert spec.seed == 0
        assert spec.typed_parameters().n == 1

    def test_unknown_parameter(self):
        with pytest.raises(ValueError):
            RunSpec(command="maslov-index", parameters={"dimension": 2})

    def test_unknown_tolerance(self):
        with pytest.raises(ValueError):
            RunSpec(command="maslov-index", tolerances={"fd_stepp": 1e-4})

    def test_non_coprime_pair(self):
        with pytest.raises(ValueError):
            RunSpec(command="wks-classify", parameters={"k": 2, "l": 4})

    def test_random_loop_needs_windings(self):
        with pytest.raises(ValueError):
            RunSpec(command="maslov-index", parameters={"loop": "random", "n": 2})


class TestExecute:
    def test_canonical_loop(self):
        report = execute(RunSpec(command="maslov-index", parameters={"n": 3}))
        assert report.passed
        assert report.results["index"] == 1
        assert report.results["signed_crossings"] == 1

    def test_random_loop(self):
        spec = RunSpec(command="maslov-index", parameters={"loop": "random", "n": 2, "windings": [1, -3], "samples": 400}, seed=5)
        report = execute(spec)
        assert report.passed
        assert report.results["index"] == -4

    def test_shift_family(self):
        report = execute(RunSpec(command="independence", parameters={"system": "shift-su3"}))
        assert report.passed
        assert report.results["ddim"] == 5
        assert report.results["drank"] == 3

    def test_image_preset(self):
        report = execute(load_spec(os.path.join(SCENARIOS, "image_of_j.json")))
        classes = [row["classification"] for row in report.results["table"]]
        assert classes == ["interior-diffeo", "nontrivial-maslov", "outside", "boundary"]

    def test_classify_preset(self):
        report = execute(load_spec(os.path.join(SCENARIOS, "wks_classify.json")))
        assert report.passed
        assert report.results["smooth_structure"] == 1
        assert len(report.results["table"]) == 28

    def test_enumerate_preset(self):
        report = execute(load_spec(os.path.join(SCENARIOS, "esch_enumerate.json")))
        assert report.passed
        assert report.results["count"] == report.results["naive_count"]

    def test_table_preset(self):
        report = execute(load_spec(os.path.join(SCENARIOS, "table_verify.json")))
        assert report.passed
        assert report.results["admissible"] == 28

    def test_sphere_flow(self):
        spec = RunSpec(command="flow", parameters={"system": "sphere", "dimension": 3, "T": 5.0, "steps": 5000}, seed=2)
        assert execute(spec).passed

    def test_every_command_has_a_handler(self):
        from typing import get_args

        from symplectic.cli import HANDLERS
        from symplectic.schemas import PARAMETER_MODELS, Command

        assert set(get_args(Command)) == set(HANDLERS) == set(PARAMETER_MODELS)

    def test_deterministic_report(self):
        spec = RunSpec(command="maslov-index", parameters={"loop": "random", "n": 2, "windings": [2, 0]}, seed=9)
        first = execute(spec).model_dump(exclude={"wall_time"})
        second = execute(spec).model_dump(exclude={"wall_time"})
        assert first == second

    def test_tolerance_override_is_echoed(self):
        report = execute(RunSpec(command="table-verify", tolerances={"fd_step": 1e-4}))
        assert report.tolerances == {"fd_step": 1e-4}

    def test_tolerances_are_scoped(self):
        from symplectic.config import default_tolerances, tolerances

        execute(RunSpec(command="maslov-index", tolerances={"crossing_band": 1e-6}))
        assert tolerances().crossing_band == default_tolerances().crossing_band


class TestMain:
    def test_pass(self, tmp_path, capsys):
        path = write_spec(tmp_path, {"command": "maslov-index", "parameters": {"n": 2}})
        assert main(["--spec", path]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["results"]["index"] == 1
        assert report["assertions"] == {"index_matches": True, "crossings_match_index": True}

    def test_failed_assertion(self, tmp_path):
        table = tmp_path / "table.csv"
        table.write_text("k,l,p,q,s1\n0,0,1,2,1\n1,1,1,0,0.5\n", encoding="utf-8")
        path = write_spec(tmp_path, {"command": "table-verify", "parameters": {"path": str(table)}})
        assert main(["--spec", path]) == 1

    def test_bad_input(self, tmp_path):
        path = write_spec(tmp_path, {"command": "wks-classify", "parameters": {"k": 2, "l": 4}})
        assert main(["--spec", path]) == 2

    def test_unknown_command(self, tmp_path):
        path = write_spec(tmp_path, {"command": "maslov"})
        assert main(["--spec", path]) == 2

    def test_numerical_singularity(self, tmp_path):
        path = write_spec(tmp_path, {"command": "maslov-index", "parameters": {"n": 1, "samples": 2}})
        assert main(["--spec", path]) == 3

    def test_malformed_spec_reports_line(self, tmp_path):
        path = write_spec(tmp_path, '{\n  "command": "maslov-index",\n  "parameters": {"n": 2,}\n}\n')
        with pytest.raises(SpecError) as info:
            load_spec(path)
        assert info.value.line == 3
        assert main(["--spec", path]) == 2

    def test_missing_spec(self, tmp_path):
        assert main(["--spec", str(tmp_path / "absent.json")]) == 2

    def test_csv_output(self, tmp_path):
        path = write_spec(tmp_path, {"command": "esch-enumerate", "parameters": {"bounds": [[0, 0], [0, 0], [1, 1], [2, 2]]}})
        out = tmp_path / "report.csv"
        assert main(["--spec", path, "--format", "csv", "--out", str(out)]) == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "k,l,p,q"
        assert lines[1] == "0,0,1,2"

    def test_seed_override(self, tmp_path, capsys):
        path = write_spec(tmp_path, {"command": "maslov-index", "seed": 3})
        assert main(["--spec", path, "--seed", "11"]) == 0
        assert json.loads(capsys.readouterr().out)["seed"] == 11

    def test_render_json_is_stable(self):
        report = execute(RunSpec(command="wks-classify", parameters={"k": 897, "l": 4}))
        data = json.loads(render(report))
        assert data["results"]["diffeomorphic_to_M14"] is True
        assert data["passed"] is True
