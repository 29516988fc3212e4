import json

import jsonschema
import numpy as np

from specrank.algebra import Element, INFINITE_SOCLE
from specrank.cli import main
from specrank.propsuite import PROPERTY_NAMES
from conftest import make_rng

PROPERTY_REPORT_SCHEMA = {
    "type": "object",
    "required": ["name", "seed", "trials", "pass_count", "fail_count",
                 "skip_count", "worst_residual", "histogram", "failures",
                 "counters", "notes"],
    "properties": {
        "name": {"enum": list(PROPERTY_NAMES)},
        "seed": {"type": "integer"},
        "trials": {"type": "integer", "minimum": 0},
        "pass_count": {"type": "integer", "minimum": 0},
        "fail_count": {"type": "integer", "minimum": 0},
        "skip_count": {"type": "integer", "minimum": 0},
        "worst_residual": {"type": "number"},
        "histogram": {"type": "array",
                      "items": {"type": "array", "minItems": 2, "maxItems": 2}},
        "failures": {"type": "array", "items": {"type": "object",
                                                "required": ["trial"]}},
        "counters": {"type": "object"},
        "notes": {"type": "array", "items": {"type": "string"}},
    },
}

CAMPAIGN_REPORT_SCHEMA = {
    "type": "object",
    "required": ["seed", "policy", "total_failures", "total_skipped", "properties"],
    "properties": {
        "seed": {"type": "integer"},
        "policy": {"type": "object"},
        "total_failures": {"type": "integer", "minimum": 0},
        "total_skipped": {"type": "integer", "minimum": 0},
        "properties": {"type": "array", "items": PROPERTY_REPORT_SCHEMA},
    },
}


def write_element_file(path, diag_values):
    n = len(diag_values)
    blocks = [[[[0.0, 0.0] for _ in range(n)] for _ in range(n)]]
    for i in range(n):
        blocks[0][i][i] = [float(diag_values[i]), 0.0]
    path.write_text(json.dumps(
        {"dims": [n], "ambient": "finite", "blocks": blocks}))
    return path


class TestGen:
    def test_zero_element(self, tmp_path):
        out = tmp_path / "zero.json"
        code = main(["gen", "--dims", "3,2", "--ranks", "0,0",
                     "--seed", "5", "--out", str(out)])
        assert code == 0
        element = Element.from_json(json.loads(out.read_text()))
        assert all(np.all(b == 0) for b in element.blocks)

    def test_maximal_eigs(self, tmp_path):
        out = tmp_path / "max.json"
        code = main(["gen", "--dims", "2,2", "--maximal-eigs", "1,2,3",
                     "--seed", "5", "--out", str(out)])
        assert code == 0
        element = Element.from_json(json.loads(out.read_text()))
        from specrank.rank import is_maximal
        assert is_maximal(element, make_rng(0))

    def test_infinite_ambient_round_trip(self, tmp_path):
        out = tmp_path / "inf.json"
        code = main(["gen", "--dims", "2", "--ambient", "infinite",
                     "--seed", "5", "--out", str(out)])
        assert code == 0
        element = Element.from_json(json.loads(out.read_text()))
        assert element.shape.ambient == INFINITE_SOCLE

    def test_ranks_validation(self, tmp_path):
        code = main(["gen", "--dims", "2", "--ranks", "5",
                     "--out", str(tmp_path / "x.json")])
        assert code == 2

    def test_conflicting_modes_rejected(self, tmp_path):
        code = main(["gen", "--dims", "2", "--ranks", "1",
                     "--maximal-eigs", "1", "--out", str(tmp_path / "x.json")])
        assert code == 2


class TestCheck:
    def test_golden_report(self, tmp_path):
        element_file = write_element_file(tmp_path / "a.json", [1.0, 0.0, 0.0])
        out = tmp_path / "report.json"
        code = main(["check", str(element_file), "--seed", "7", "--out", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["rank"]["rank"] == 1
        assert report["rank"]["certified"] is True
        factors = {(f["root"][0], f["root"][1]): f["mult"]
                   for f in report["char_poly"]["factors"]}
        assert factors == {(1.0, 0.0): 1, (0.0, 0.0): 1}
        assert report["cayley_hamilton_residual"] <= 1e-10
        assert report["trace"] == [1.0, 0.0]
        assert report["det_plus_one"] == [2.0, 0.0]

    def test_nilpotent_report(self, tmp_path):
        data = {"dims": [2], "ambient": "finite",
                "blocks": [[[[0.0, 0.0], [1.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]]}
        element_file = tmp_path / "nilp.json"
        element_file.write_text(json.dumps(data))
        out = tmp_path / "report.json"
        assert main(["check", str(element_file), "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        assert report["rank"]["rank"] == 1
        assert report["char_poly"]["factors"] == [{"root": [0.0, 0.0], "mult": 2}]
        assert report["cayley_hamilton_residual"] == 0.0

    def test_missing_file(self, tmp_path):
        assert main(["check", str(tmp_path / "absent.json")]) == 2


class TestCampaign:
    def test_small_campaign_exit_zero_and_schema(self, tmp_path):
        config = {"seed": 11, "trials": 2, "shapes": [[2, 2], [3]],
                  "ambient": "both"}
        config_file = tmp_path / "config.json"
        config_file.write_text(json.dumps(config))
        out = tmp_path / "report.json"
        code = main(["campaign", "--config", str(config_file), "--out", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        jsonschema.validate(report, CAMPAIGN_REPORT_SCHEMA)
        assert report["total_failures"] == 0

    def test_seed_reproducibility(self, tmp_path):
        config_file = tmp_path / "config.json"
        config_file.write_text(json.dumps({"trials": 2}))
        out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
        assert main(["campaign", "--config", str(config_file), "--seed", "3",
                     "--out", str(out1)]) == 0
        assert main(["campaign", "--config", str(config_file), "--seed", "3",
                     "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_invalid_tolerance_is_usage_error(self, tmp_path):
        config_file = tmp_path / "config.json"
        config_file.write_text(json.dumps({"tol_cluster": 0.0, "trials": 1}))
        assert main(["campaign", "--config", str(config_file)]) == 2

    def test_flag_overrides_config(self, tmp_path):
        config_file = tmp_path / "config.json"
        config_file.write_text(json.dumps({"seed": 1, "trials": 1}))
        out = tmp_path / "report.json"
        assert main(["campaign", "--config", str(config_file), "--seed", "999",
                     "--out", str(out)]) == 0
        assert json.loads(out.read_text())["seed"] == 999

    def test_failures_exit_one(self, tmp_path):
        trials = {name: 0 for name in PROPERTY_NAMES}
        trials["cayley_hamilton"] = 3
        config_file = tmp_path / "config.json"
        config_file.write_text(json.dumps(
            {"seed": 5, "trials": trials, "tol_residual": 1e-300}))
        out = tmp_path / "report.json"
        code = main(["campaign", "--config", str(config_file), "--out", str(out)])
        assert code == 1
        assert json.loads(out.read_text())["total_failures"] > 0

    def test_csv_format(self, tmp_path):
        config_file = tmp_path / "config.json"
        config_file.write_text(json.dumps({"trials": 1}))
        out = tmp_path / "report.csv"
        assert main(["campaign", "--config", str(config_file), "--seed", "2",
                     "--format", "csv", "--out", str(out)]) == 0
        assert out.read_text().startswith("property,bin_low,bin_high,count")

    def test_unknown_property_in_config(self, tmp_path):
        config_file = tmp_path / "config.json"
        config_file.write_text(json.dumps({"trials": {"bogus": 4}}))
        assert main(["campaign", "--config", str(config_file)]) == 2


class TestDemo:
    def test_m3_example_json(self, tmp_path):
        out = tmp_path / "demo.json"
        assert main(["demo", "m3_example", "--format", "json",
                     "--out", str(out)]) == 0
        data = json.loads(out.read_text())
        assert data["generalized"]["degree"] == 2
        assert data["classical"]["degree"] == 3
        assert data["degree_difference"] == 1

    def test_zero_example(self, tmp_path):
        out = tmp_path / "demo.json"
        assert main(["demo", "zero_example", "--format", "json",
                     "--out", str(out)]) == 0
        data = json.loads(out.read_text())
        assert data["exact_zero"] is True
        assert data["char_poly"]["degree"] == 1

    def test_c3_naive_det(self, tmp_path):
        out = tmp_path / "demo.json"
        assert main(["demo", "c3_naive_det", "--format", "json",
                     "--out", str(out)]) == 0
        data = json.loads(out.read_text())
        assert data["multiplicative_shifted_zero"] is False
        assert data["multiplicative_direct_value"] is True

    def test_ch_walkthrough_text(self, capsys):
        assert main(["demo", "ch_walkthrough", "--seed", "6"]) == 0
        shown = capsys.readouterr().out
        assert "identity_walk" in shown

    def test_unknown_demo_name(self):
        assert main(["demo", "not_a_demo"]) == 2


def test_no_command_is_usage_error():
    assert main([]) == 2
