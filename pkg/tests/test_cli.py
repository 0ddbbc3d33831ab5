import json

import pytest

from fusionplan import parse_descriptor, parse_formula, parse_schema
from fusionplan.cli import run


def lines(capsys):
    return [l for l in capsys.readouterr().out.splitlines() if l]


class TestDescriptors:
    def test_two_databases_gives_eight_lines(self, capsys):
        assert run(["descriptors", "--num-dbs", "2"]) == 0
        out = lines(capsys)
        assert len(out) == 8
        for line in out:
            parse_descriptor(line)  # stdout is re-parseable

    def test_traces_are_indented(self, capsys):
        assert run(["descriptors", "--num-dbs", "1", "--traces"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "{}"
        assert any(line.startswith("    ") for line in out)

    def test_bad_count_is_domain_error(self, capsys):
        assert run(["descriptors", "--num-dbs", "9"]) == 1


class TestSchemas:
    def test_merged_schema_listing(self, capsys):
        assert run(["schemas", "--descriptor", "{DB1; [DB1,DB2]}", "--merged"]) == 0
        out = lines(capsys)
        assert sorted(out) == ["E(1)E([1,2])", "E(1;[1,2])", "E([1,2])E(1)"]
        for line in out:
            parse_schema(line)

    def test_invalid_descriptor_is_domain_error(self, capsys):
        assert run(["schemas", "--descriptor", "{DB0}"]) == 1
        assert "error" in capsys.readouterr().err


class TestReduce:
    def test_arrow_chain(self, capsys):
        assert run(["reduce", "--schema", "E(2)E(1)",
                    "--descriptor", "{DB1; DB2}"]) == 0
        out = lines(capsys)
        assert out == ["E(2)E(1){DB1; DB2} -> E(2){DB2} -> {}"]

    def test_strict_failure(self, capsys):
        assert run(["reduce", "--schema", "E(1)", "--descriptor", "{}"]) == 1

    def test_lenient_mode(self, capsys):
        assert run(["reduce", "--schema", "E(1)", "--descriptor", "{}",
                    "--lenient"]) == 0
        assert lines(capsys) == ["E(1){} -> {}"]


class TestFormulas:
    def test_plain_enumeration(self, capsys):
        assert run(["formulas", "--num-dbs", "2"]) == 0
        out = lines(capsys)
        assert len(out) == 8
        for line in out:
            parse_formula(line)

    def test_workable_filtering(self, capsys):
        assert run(["formulas", "--num-dbs", "2",
                    "--descriptor", "{[DB1,DB2]}"]) == 0
        assert lines(capsys) == ["B.E.F", "E.B.F", "E.F.(BxB)"]

    def test_unicode_flag(self, capsys):
        assert run(["formulas", "--num-dbs", "1", "--unicode"]) == 0
        out = lines(capsys)
        assert "B∘E" in out


TRUST_JSON = {
    "actors": [{"id": "A1", "role": "DBO"}, {"id": "A2", "role": "CLP"},
               {"id": "A3", "role": "CTF"}],
    "trusted": [
        {"pattern": {"kind": "database", "sources": "[DB1,DB2]", "filtered": False},
         "actors": ["A1", "A2", "A3"]},
        {"pattern": {"kind": "classifier", "sources": "[DB1,DB2]", "filtered": False},
         "actors": ["A2", "A3"]},
    ],
    "competence": [
        {"actor": "A1", "action": "B", "ok": False},
        {"actor": "A2", "action": "B", "ok": False},
        {"actor": "A3", "action": "B", "ok": False},
    ],
    "joint_state_sensitive": False,
}


class TestAutomaton:
    def test_language_output(self, capsys):
        assert run(["automaton", "--schema", "E([1,2])",
                    "--descriptor", "{[DB1,DB2]}", "--num-dbs", "2"]) == 0
        assert lines(capsys) == ["B.E.F", "E.B.F", "E.F.(BxB)"]

    def test_trust_pruning(self, capsys, tmp_path):
        trust = tmp_path / "trust.json"
        trust.write_text(json.dumps(TRUST_JSON))
        assert run(["automaton", "--schema", "E([1,2])",
                    "--descriptor", "{[DB1,DB2]}", "--num-dbs", "2",
                    "--trust", str(trust)]) == 0
        assert lines(capsys) == ["B.E.F", "E.F.(BxB)"]

    def test_dot_output(self, capsys, tmp_path):
        dot = tmp_path / "plan.dot"
        assert run(["automaton", "--schema", "E(1)E([1,2])",
                    "--descriptor", "{DB1; [DB1,DB2]}", "--num-dbs", "2",
                    "--dot", str(dot)]) == 0
        text = dot.read_text()
        assert text.startswith("digraph")
        assert 'label="T"' in text

    def test_invalid_schema_is_domain_error(self, capsys):
        assert run(["automaton", "--schema", "E(1)",
                    "--descriptor", "{[DB1,DB2]}", "--num-dbs", "2"]) == 1


class TestPlan:
    def test_plan_with_trust_file(self, capsys, tmp_path):
        (tmp_path / "trust.json").write_text(json.dumps(TRUST_JSON))
        config = tmp_path / "problem.json"
        config.write_text(json.dumps({
            "descriptor": "{[DB1,DB2]}",
            "num_dbs": 2,
            "trust": "trust.json",
            "schema_scope": "all",
        }))
        assert run(["plan", "--config", str(config)]) == 0
        assert lines(capsys) == ["B.E.F", "E.F.(BxB)"]

    def test_plan_without_trust_is_permissive(self, capsys, tmp_path):
        config = tmp_path / "problem.json"
        config.write_text(json.dumps({"descriptor": "{[DB1,DB2]}", "num_dbs": 2}))
        assert run(["plan", "--config", str(config)]) == 0
        assert lines(capsys) == ["B.E.F", "E.B.F", "E.F.(BxB)"]

    def test_missing_config_is_domain_error(self, capsys):
        assert run(["plan", "--config", "/nonexistent.json"]) == 1


EVALS = [
    {"formula": "B.E.F", "efficiency": 0.9, "risk": 0.5, "damage": 1.0},
    {"formula": "E.B.F", "efficiency": 0.8, "risk": 0.1, "damage": 1.0},
    {"formula": "E.F.(BxB)", "efficiency": 0.7, "risk": 0.4, "damage": 1.0},
]


class TestPareto:
    def test_frontier(self, capsys, tmp_path):
        evals = tmp_path / "evals.json"
        evals.write_text(json.dumps(EVALS))
        assert run(["pareto", "--evals", str(evals)]) == 0
        out = lines(capsys)
        assert [l.split()[0] for l in out] == ["E.B.F", "B.E.F"]
        for line in out:
            parse_formula(line.split()[0])

    def test_risk_cap_selection(self, capsys, tmp_path):
        evals = tmp_path / "evals.json"
        evals.write_text(json.dumps(EVALS))
        assert run(["pareto", "--evals", str(evals), "--r-star", "0.3"]) == 0
        assert lines(capsys)[0].split()[0] == "E.B.F"

    def test_unsatisfiable_selection_is_domain_error(self, capsys, tmp_path):
        evals = tmp_path / "evals.json"
        evals.write_text(json.dumps(EVALS))
        assert run(["pareto", "--evals", str(evals), "--f-star", "0.95"]) == 1

    def test_csv_export(self, capsys, tmp_path):
        evals = tmp_path / "evals.json"
        evals.write_text(json.dumps(EVALS))
        out_csv = tmp_path / "front.csv"
        assert run(["pareto", "--evals", str(evals), "--csv", str(out_csv)]) == 0
        rows = out_csv.read_text().strip().splitlines()
        assert rows[0] == "formula,efficiency,risk,damage"
        assert len(rows) == 3  # header + two frontier rows

    def test_mutually_exclusive_flags(self, capsys, tmp_path):
        evals = tmp_path / "evals.json"
        evals.write_text(json.dumps(EVALS))
        with pytest.raises(SystemExit) as err:
            run(["pareto", "--evals", str(evals), "--r-star", "1", "--f-star", "1"])
        assert err.value.code == 2


class TestSvmDemo:
    def test_outputs_written(self, capsys, tmp_path):
        out = tmp_path / "demo"
        assert run(["svm-demo", "--seed", "0", "--out", str(out),
                    "--samples", "120"]) == 0
        for name in ("dataset.csv", "support_vectors_before.csv",
                     "support_vectors_after.csv", "metrics.json", "evals.json"):
            assert (out / name).exists(), name
        metrics = json.loads((out / "metrics.json").read_text())
        assert set(metrics) == {"leakage_pre", "leakage_post", "accuracy_y_pre",
                                "accuracy_y_post", "efficiency", "risk"}
        evals = json.loads((out / "evals.json").read_text())
        assert {e["formula"] for e in evals} == {"E.F.(BxB)", "B.E.F"}
        header = (out / "dataset.csv").read_text().splitlines()[0]
        assert header == "x1,x2,y,z"

    def test_evals_feed_pareto(self, capsys, tmp_path):
        out = tmp_path / "demo"
        assert run(["svm-demo", "--seed", "1", "--out", str(out),
                    "--samples", "120"]) == 0
        capsys.readouterr()
        assert run(["pareto", "--evals", str(out / "evals.json")]) == 0
        assert lines(capsys)


class TestUsageErrors:
    def test_unknown_flag_exits_two(self):
        with pytest.raises(SystemExit) as err:
            run(["descriptors", "--num-dbs", "2", "--bogus"])
        assert err.value.code == 2

    def test_unknown_subcommand_exits_two(self):
        with pytest.raises(SystemExit) as err:
            run(["frobnicate"])
        assert err.value.code == 2

    def test_missing_subcommand_exits_two(self):
        with pytest.raises(SystemExit) as err:
            run([])
        assert err.value.code == 2
