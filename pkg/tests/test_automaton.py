import json
import random

import pytest

from fusionplan import (
    accepted_language,
    apply_trust,
    build_automaton,
    enumerate_formulas,
    enumerate_schemas,
    filter_workable,
    is_workable,
    mark_sensitive,
    parse_descriptor,
    parse_schema,
    to_dot,
    validate,
    TrustModel,
)
from fusionplan.automaton import (
    ArtifactPattern,
    CompetenceRule,
    StatePattern,
    reconstruct_formula,
)
from fusionplan.semantics import CLASSIFIER, DATABASE


def section_v_trust(joint=False):
    """Running trust example: fused states trusted to three actors, but
    nobody is competent to build from the fused raw database."""
    fused_db = StatePattern((ArtifactPattern(
        kind=DATABASE, sources=frozenset({1, 2}), filtered=False),))
    fused_c = StatePattern((ArtifactPattern(
        kind=CLASSIFIER, sources=frozenset({1, 2}), filtered=False),))
    return TrustModel(
        actors=(("A1", "DBO"), ("A2", "CLP"), ("A3", "CTF")),
        trusted=((fused_db, ("A1", "A2", "A3")), (fused_c, ("A2", "A3"))),
        competence=(
            CompetenceRule("A1", "B", False),
            CompetenceRule("A2", "B", False),
            CompetenceRule("A3", "B", False),
        ),
        joint_state_sensitive=joint,
    )


class TestBuildAutomaton:
    def test_single_database_chain(self):
        a = build_automaton(parse_schema("E(1)"), parse_descriptor("{DB1}"), 1)
        assert [f.text for f in accepted_language(a)] == ["B.E", "E.B"]

    def test_correlated_descriptor_language(self):
        a = build_automaton(parse_schema("E([1,2])"), parse_descriptor("{[DB1,DB2]}"), 2)
        assert [f.text for f in accepted_language(a)] == [
            "B.E.F", "E.B.F", "E.F.(BxB)"]

    def test_two_component_schema_has_bridge(self):
        d = parse_descriptor("{DB1; [DB1,DB2]}")
        a = build_automaton(parse_schema("E(1)E([1,2])"), d, 2)
        assert a.component_boundaries  # a T transition exists
        # but no admissible sequence realizes two filters on one path
        assert accepted_language(a) == []

    def test_invalid_schema_rejected(self):
        with pytest.raises(ValueError):
            build_automaton(parse_schema("E(1)"), parse_descriptor("{DB2}"), 2)
        with pytest.raises(ValueError):
            build_automaton(parse_schema("E(1)"), parse_descriptor("{DB1; DB2}"), 2)

    def test_acyclic(self):
        d = parse_descriptor("{DB1; DB2}")
        a = build_automaton(parse_schema("E(1)E(2)"), d, 2)
        order = {}

        def visit(state, stack):
            if state in stack:
                raise AssertionError("cycle detected")
            if state in order:
                return
            for _, dst in a.successors(state):
                visit(dst, stack | {state})
            order[state] = len(order)

        visit(a.start, frozenset())


def brute_paths(a):
    """Independent recursive path enumeration over the transition relation."""
    adjacency = {}
    for src, label, dst in a.transitions:
        adjacency.setdefault(src, []).append((label, dst))

    def walk(state, prefix):
        if state in a.accepts:
            yield tuple(prefix)
        for label, dst in adjacency.get(state, ()):
            yield from walk(dst, prefix + [label])

    return list(walk(a.start, []))


class TestAcceptedLanguage:
    def test_matches_brute_force_paths(self):
        for text in ("{DB1}", "{[DB1,DB2]}", "{DB1; DB2}"):
            d = parse_descriptor(text)
            for schema in enumerate_schemas(d, include_merged=True):
                a = build_automaton(schema, d, 2)
                expected = sorted(
                    {reconstruct_formula(p).text for p in brute_paths(a)})
                assert [f.text for f in accepted_language(a)] == expected

    def test_union_over_schemas_equals_workability(self):
        formulas = enumerate_formulas(2)
        for d in (x for x in __import__("fusionplan").enumerate_descriptors(2)
                  if not x.is_null):
            union = set()
            for schema in enumerate_schemas(d, include_merged=True):
                a = build_automaton(schema, d, 2)
                union.update(f.text for f in accepted_language(a))
            oracle = {f.text for f in filter_workable(formulas, d, m=2)}
            assert union == oracle, str(d)

    def test_language_is_sound(self):
        d = parse_descriptor("{DB1; DB2; [DB1,DB2]}")
        for schema in enumerate_schemas(d, include_merged=True):
            a = build_automaton(schema, d, 2)
            for f in accepted_language(a):
                assert validate(f, 2) == []
                assert is_workable(f, d, m=2)[0]

    def test_no_accepting_state_means_empty_language(self):
        d = parse_descriptor("{DB1; [DB1,DB2]}")
        a = build_automaton(parse_schema("E([1,2])E(1)"), d, 2)
        assert accepted_language(a) == []

    def test_three_databases(self):
        d = parse_descriptor("{DB3; [DB1,DB2]}")
        schema = parse_schema("E(3)E([1,2])")
        a = build_automaton(schema, d, 3)
        lang = {f.text for f in accepted_language(a)}
        assert "F.((B.E.F)x(E.B))" in lang
        assert "F.((B.E.F)x(B.E))" in lang
        for f in accepted_language(a):
            assert validate(f, 3) == []
            assert is_workable(f, d, m=3)[0]


class TestMarkSensitive:
    def test_fused_unfiltered_states_marked(self):
        d = parse_descriptor("{[DB1,DB2]}")
        a = mark_sensitive(build_automaton(parse_schema("E([1,2])"), d, 2), d)
        labels = {s.label() for s in a.sensitive}
        assert "DB1+2" in labels
        assert "C1+2" in labels

    def test_start_state_never_marked(self):
        d = parse_descriptor("{[DB1,DB2]}")
        a = mark_sensitive(build_automaton(parse_schema("E([1,2])"), d, 2), d)
        assert a.start not in a.sensitive

    def test_clean_filtered_states_not_marked(self):
        d = parse_descriptor("{[DB1,DB2]}")
        a = mark_sensitive(build_automaton(parse_schema("E([1,2])"), d, 2), d)
        for s in a.sensitive:
            assert "'" not in s.label()

    def test_joint_classifier_state_marked_only_with_flag(self):
        d = parse_descriptor("{[DB1,DB2]}")
        base = build_automaton(parse_schema("E([1,2])"), d, 2)

        plain = mark_sensitive(base, d, joint_state_sensitive=False)
        assert all(s.label() != "[C1, C2]" for s in plain.sensitive)

        joint = mark_sensitive(base, d, joint_state_sensitive=True)
        assert any(s.label() == "[C1, C2]" for s in joint.sensitive)


class TestApplyTrust:
    def test_build_removed_at_fused_database(self):
        d = parse_descriptor("{[DB1,DB2]}")
        a = mark_sensitive(build_automaton(parse_schema("E([1,2])"), d, 2), d)
        pruned = apply_trust(a, section_v_trust())
        for src, label, dst in pruned.transitions:
            assert not (src.label() == "DB1+2" and label.kind == "B")
        assert [f.text for f in accepted_language(pruned)] == ["B.E.F", "E.F.(BxB)"]

    def test_permissive_model_keeps_language(self):
        d = parse_descriptor("{[DB1,DB2]}")
        a = mark_sensitive(build_automaton(parse_schema("E([1,2])"), d, 2), d)
        pruned = apply_trust(a, TrustModel.permissive())
        assert [f.text for f in accepted_language(pruned)] == [
            "B.E.F", "E.B.F", "E.F.(BxB)"]

    def test_untrusted_sensitive_state_removed(self):
        d = parse_descriptor("{[DB1,DB2]}")
        a = mark_sensitive(build_automaton(parse_schema("E([1,2])"), d, 2), d)
        lonely = TrustModel(actors=(("A1", "DBO"),), trusted=())
        pruned = apply_trust(a, lonely)
        assert accepted_language(pruned) == []
        assert pruned.start in set(pruned.states)

    def test_joint_flag_blocks_separate_builds(self):
        d = parse_descriptor("{[DB1,DB2]}")
        a = mark_sensitive(build_automaton(parse_schema("E([1,2])"), d, 2), d,
                           joint_state_sensitive=True)
        pruned = apply_trust(a, section_v_trust(joint=True))
        assert [f.text for f in accepted_language(pruned)] == ["B.E.F"]

    def test_pruning_is_monotone(self):
        rng = random.Random(5)
        d = parse_descriptor("{[DB1,DB2]}")
        base = mark_sensitive(build_automaton(parse_schema("E([1,2])"), d, 2), d)
        anything = StatePattern((ArtifactPattern(),))
        for _ in range(30):
            flags = [rng.random() < 0.5 for _ in range(6)]
            rules = tuple(
                CompetenceRule("A1", action, ok)
                for action, ok in zip(("B", "E", "F"), flags[:3]))
            strict = TrustModel(actors=(("A1", "DBO"),),
                                trusted=((anything, ("A1",)),),
                                competence=rules)
            relaxed = TrustModel(actors=(("A1", "DBO"),),
                                 trusted=((anything, ("A1",)),),
                                 competence=tuple(r for r in rules if r.ok))
            strict_lang = {f.text for f in accepted_language(apply_trust(base, strict))}
            relaxed_lang = {f.text for f in accepted_language(apply_trust(base, relaxed))}
            assert strict_lang <= relaxed_lang


class TestRoleVocabulary:
    def test_every_role_has_trust_requirements(self):
        from fusionplan.automaton import ROLE_TRUST_REQUIREMENTS
        assert set(ROLE_TRUST_REQUIREMENTS) == set(TrustModel.ROLES)

    def test_required_artifacts(self):
        from fusionplan.automaton import ROLE_TRUST_REQUIREMENTS as req
        assert req["DBO"] == {"SI"}
        assert req["CLP"] == {"CL-BB", "CL-WB"}
        assert req["CTF"] == {"SI", "CL-BB", "CL-WB"}
        assert req["CLU"] == {"CL-BB"}


class TestTrustModelJson:
    def test_round_trip_from_json(self):
        obj = {
            "actors": [{"id": "A1", "role": "DBO"}, {"id": "A2", "role": "CLP"}],
            "trusted": [
                {"pattern": {"kind": "database", "sources": "[DB1,DB2]",
                             "filtered": False},
                 "actors": ["A1", "A2"]},
                {"pattern": {"artifacts": [{"kind": "classifier", "sources": "DB1"},
                                           {"kind": "classifier", "sources": "DB2"}]},
                 "actors": ["A2"]},
            ],
            "competence": [{"actor": "A1", "action": "B", "ok": False}],
            "joint_state_sensitive": True,
        }
        t = TrustModel.from_json(obj)
        assert t.joint_state_sensitive
        assert t.actors == (("A1", "DBO"), ("A2", "CLP"))
        assert len(t.trusted) == 2
        assert t.competence[0].ok is False

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "trust.json"
        path.write_text(json.dumps({
            "actors": [{"id": "X", "role": "CTF"}],
            "trusted": [{"pattern": {"sources": "*"}, "actors": ["X"]}],
        }))
        t = TrustModel.load(path)
        assert t.actors == (("X", "CTF"),)

    def test_unknown_actor_rejected(self):
        with pytest.raises(ValueError, match="unknown actor"):
            TrustModel.from_json({
                "actors": [{"id": "A1", "role": "DBO"}],
                "trusted": [{"pattern": {"sources": "*"}, "actors": ["ghost"]}],
            })

    def test_unknown_role_rejected(self):
        with pytest.raises(ValueError, match="role"):
            TrustModel.from_json({"actors": [{"id": "A1", "role": "BOSS"}]})


class TestDot:
    def test_minimal_automaton_renders(self):
        a = build_automaton(parse_schema("E(1)"), parse_descriptor("{DB1}"), 1)
        dot = to_dot(a)
        assert dot.startswith("digraph")
        assert dot.count("{") == dot.count("}")
        assert "DB1" in dot

    def test_bridge_edge_is_labeled_t(self):
        d = parse_descriptor("{DB1; [DB1,DB2]}")
        a = build_automaton(parse_schema("E(1)E([1,2])"), d, 2)
        assert 'label="T"' in to_dot(a)

    def test_pruned_automaton_has_no_build_out_of_fused_db(self):
        d = parse_descriptor("{[DB1,DB2]}")
        a = mark_sensitive(build_automaton(parse_schema("E([1,2])"), d, 2), d)
        dot = to_dot(apply_trust(a, section_v_trust()))
        assert '"DB1+2" -> "C1+2"' not in dot

    def test_sensitive_states_styled(self):
        d = parse_descriptor("{[DB1,DB2]}")
        a = mark_sensitive(build_automaton(parse_schema("E([1,2])"), d, 2), d)
        dot = to_dot(a)
        assert "fillcolor" in dot
        assert "doublecircle" in dot
