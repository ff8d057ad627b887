import json
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from ambilogic.families import formula_family
from ambilogic.semantics import Mode, evaluate, extension, valid
from ambilogic.structure import (
    check_cpa, dumps_model, is_common_interpretation, loads_model, model_from_dict, validate, validate_ai,
)
from ambilogic.transforms import (
    GeneratorConfig, add_cell_labels, check_equivalent, copy_name, disjoint_copies, identity_pairing,
    pairing_from_json, pairing_to_json, project_outermost, random_structure,
)


class TestProjection:
    def test_atd(self, atd):
        m1 = project_outermost(atd, 1)
        assert is_common_interpretation(m1)
        assert valid(m1, "CB_{1,2}(p)", "in")
        assert valid(project_outermost(atd, 2), "CB_{1,2}(!p)", "in")

    def test_identity_on_common_interpretation(self, ex2):
        assert project_outermost(ex2, 2) == ex2

    def test_contract(self, atd):
        fam = formula_family(["p"], 2, 2)
        for i in (1, 2):
            v = check_equivalent(atd, project_outermost(atd, i), identity_pairing(atd, [i]), "out", "in", fam)
            assert v.equivalent and v.checked == len(fam)


class TestCopies:
    def test_atd(self, atd):
        out, pairing = disjoint_copies(atd)
        assert out.states == ("w#1", "w#2")
        assert extension(out, "p", 1, "in") == {"w#1"}
        assert out.posterior(1, "w#1") == {"w#1": 1}
        assert out.posterior(2, "w#1") == {"w#2": 1}
        assert valid(out, "CB_{1,2}(B_1(p) & B_2(!p))", "in")
        assert pairing[("w", 2)] == ("w#2", 2)
        assert validate(out).ok

    def test_single_player(self):
        m = random_structure(GeneratorConfig(seed=3, players=(1, 1)))
        out, _ = disjoint_copies(m)
        assert out.states == tuple(copy_name(w, 1) for w in m.states)
        assert [[tuple(c) for c in p] for p in out.partitions] == \
            [[tuple(copy_name(w, 1) for w in c) for c in p] for p in m.partitions]

    def test_contract(self, atd, ex2):
        for m in (atd, ex2):
            out, pairing = disjoint_copies(m)
            fam = formula_family(m.vocabulary[:2], m.players, 2, knowledge=False)
            assert check_equivalent(m, out, pairing, "in", "in", fam).equivalent

    def test_knowledge_does_not_survive(self, atd):
        # K_1 p holds at (w, 1) but the copies cell {w#1, w#2} contains a !p copy
        out, pairing = disjoint_copies(atd)
        assert evaluate(atd, "w", 1, "K_1(p)", "in")
        assert not evaluate(out, "w#1", 1, "K_1(p)", "in")
        v = check_equivalent(atd, out, pairing, "in", "in", ["K_1(p)"])
        assert not v.equivalent and v.witness["formula"] == "K_1(p)"

    def test_breaks_cpa(self, ex2):
        assert check_cpa(ex2).ok
        out, _ = disjoint_copies(ex2)
        assert not check_cpa(out).ok
        assert is_common_interpretation(out)


class TestLabels:
    def test_example2(self, ex2):
        out = add_cell_labels(ex2, "w1")
        assert len(out.states) == 3
        fresh = set(out.vocabulary) - set(ex2.vocabulary)
        assert fresh == {"cell_1_1", "cell_1_2", "cell_2_1", "cell_2_2"}
        assert validate_ai(out, "out-ai").ok and validate_ai(out, "in-ai").ok

    def test_one_state(self):
        m = random_structure(GeneratorConfig(seed=0, states=(1, 1), players=(2, 2), ambiguity_probability=F(0)))
        out = add_cell_labels(m, "w1")
        assert set(out.vocabulary) - set(m.vocabulary) == {"cell_1_1", "cell_2_1"}
        assert validate_ai(out, "out-ai").ok

    def test_restricts_to_component(self):
        m = model_from_dict({
            "states": ["a", "b"], "players": 1, "partitions": [[["a"], ["b"]]],
            "posteriors": [[{"a": "1"}, {"b": "1"}]], "interpretations": [{"a": ["p"], "b": []}],
            "priors": [{"a": "1/2", "b": "1/2"}],
        })
        out = add_cell_labels(m, "b")
        assert out.states == ("b",)
        assert out.priors[0] == {"b": 1}

    def test_name_collision(self):
        m = model_from_dict({
            "states": ["a"], "players": 1, "partitions": [[["a"]]], "posteriors": [[{"a": "1"}]],
            "interpretations": [{"a": ["cell_1_1"]}],
        })
        out = add_cell_labels(m, "a")
        assert "cell_1_1_" in out.vocabulary

    def test_evaluation_unchanged(self, ex2):
        out = add_cell_labels(ex2, "w2")
        pairing = {(w, v): (w, v) for w in out.states for v in (1, 2)}
        fam = formula_family(["p", "q"], 2, 1)
        assert check_equivalent(ex2, out, pairing, "in", "in", fam).equivalent
        assert check_equivalent(ex2, out, pairing, "in", "in-ai", fam).equivalent

    def test_needs_common_interpretation(self, atd):
        with pytest.raises(ValueError):
            add_cell_labels(atd, "w")


class TestEquivalence:
    def test_validity_mode(self, no_equiv, ex2):
        v = check_equivalent(no_equiv, no_equiv, None, "in", "in", ["Pr_2(p) = 2/3"])
        assert v.equivalent and str(v) == "equivalent (family size 1)"
        v = check_equivalent(no_equiv, ex2, None, "in", "in", ["Pr_2(p) = 2/3", "true"])
        assert not v.equivalent and v.witness["formula"] == "1*Pr_2(p) = 2/3"

    def test_pairing_json(self, atd):
        _, pairing = disjoint_copies(atd)
        rows = json.loads(json.dumps(pairing_to_json(pairing)))
        assert pairing_from_json(rows) == pairing


class TestGenerator:
    def test_seed1_cpa(self):
        m = random_structure(GeneratorConfig(seed=1))
        assert validate(m).ok and check_cpa(m).ok

    def test_no_ambiguity(self):
        assert is_common_interpretation(random_structure(GeneratorConfig(seed=5, ambiguity_probability=F(0))))

    def test_deterministic(self):
        cfg = GeneratorConfig(seed=42, with_signals=True)
        assert dumps_model(random_structure(cfg)) == dumps_model(random_structure(cfg))

    @pytest.mark.parametrize("bad", [
        {"states": (3, 2)}, {"players": (0, 1)}, {"ambiguity_probability": F(3, 2)}, {"ai_assumption": "A7"},
    ])
    def test_config_validation(self, bad):
        with pytest.raises(ValueError):
            GeneratorConfig(**bad)


@given(st.integers(0, 100_000), st.booleans(), st.booleans(), st.sampled_from(["A6", "A6'"]))
def test_generated_structures_are_valid(seed, common, signals, ai):
    cfg = GeneratorConfig(seed=seed, common_prior=common, with_signals=signals, ai_assumption=ai)
    m = random_structure(cfg)
    assert validate(m).ok
    assert loads_model(dumps_model(m)) == m
    if common:
        assert check_cpa(m).ok
    if signals:
        assert validate_ai(m, Mode.IN_AI).ok
        if ai == "A6":
            assert validate_ai(m, Mode.OUT_AI).ok


@given(st.integers(0, 100_000))
def test_cell_labels_satisfy_a5_a6(seed):
    m = random_structure(GeneratorConfig(seed=seed, ambiguity_probability=F(0)))
    out = add_cell_labels(m, m.states[0])
    assert validate_ai(out, "out-ai").ok
