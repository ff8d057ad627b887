import json
from pathlib import Path
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

import oracle
from ambilogic.agreement import (
    agreement_scan, ambiguity_measure, aumann_check, check_agreement_bound, classify_signal, common_prior,
    compare_posteriors_events, compare_posteriors_formulas, recv,
)
from ambilogic.families import propositional_family
from ambilogic.structure import (
    MissingDataError, check_cpa, is_common_interpretation, load_model, model_from_dict, validate_ai,
)
from ambilogic.syntax import CB, Prim, conj
from ambilogic.transforms import GeneratorConfig, random_structure

FIXTURES = Path(__file__).parent / "fixtures"


def everyone_receives():
    return model_from_dict({
        "states": ["w"], "players": 2, "partitions": [[["w"]], [["w"]]],
        "posteriors": [[{"w": "1"}], [{"w": "1"}]],
        "interpretations": [{"w": ["recv_1_s", "recv_2_s"]}, {"w": ["recv_1_s", "recv_2_s"]}],
        "priors": [{"w": "1"}, {"w": "1"}], "cell_labels": [["recv_1_s"], ["recv_2_s"]],
        "signals": {"w": ["s", "s"]},
    })


class TestAmbiguity:
    def test_atd(self, atd):
        rep = ambiguity_measure(atd, "p")
        assert rep.epsilon == 1 and rep.disagreement_event == {"w"}

    def test_tautology(self, atd):
        assert ambiguity_measure(atd, "true").epsilon == 0

    def test_common_interpretation(self, ex2):
        for f in propositional_family(ex2.vocabulary, 1):
            assert ambiguity_measure(ex2, f).epsilon == 0

    def test_needs_propositional(self, atd):
        with pytest.raises(ValueError):
            ambiguity_measure(atd, "B_1(p)")

    def test_needs_common_prior(self, no_equiv):
        with pytest.raises(MissingDataError):
            common_prior(no_equiv)

    def test_explicit_prior(self, no_equiv):
        assert ambiguity_measure(no_equiv, "p", {"w1": F(1, 2), "w2": F(1, 2)}).epsilon == 0


class TestAgreementBound:
    def test_atd_vacuous(self, atd):
        rep = check_agreement_bound(atd, [1, 2], "p", F(1, 2), F(3, 2))
        assert rep.status == "vacuous" and rep.epsilon == 1 and rep.ok

    def test_heterogeneous_priors(self, no_equiv):
        rep = check_agreement_bound(no_equiv, [1, 2, 3], "p", F(0), F(1))
        assert rep.status == "precondition"
        assert agreement_scan(no_equiv).status == "precondition"

    def test_example2_consistent(self, ex2):
        rep = check_agreement_bound(ex2, [1, 2], "p", F(1, 4), F(3, 4))
        assert rep.status == "consistent" and rep.checked > 0

    def test_scan(self, ex2):
        rep = agreement_scan(ex2)
        assert rep.status == "consistent" and not rep.witnesses
        json.dumps(rep.to_dict())


class TestSignals:
    def test_example2(self, ex2):
        flags = classify_signal(ex2, "s", "w1", "in")
        assert flags.common and not flags.public
        assert str(flags).startswith("common: yes, public: no, shared: no")

    def test_critical(self, critical):
        flags = classify_signal(critical, "s", "w11", "in-ai")
        assert flags.shared and not flags.public

    def test_all_flags_one_state(self):
        m = everyone_receives()
        for mode in ("in", "out", "in-ai", "out-ai"):
            f = classify_signal(m, "s", "w", mode)
            assert f.common and f.public and f.shared and f.strongly_shared

    def test_errors(self, ex2, atd):
        with pytest.raises(KeyError):
            classify_signal(ex2, "nope", "w1", "in")
        with pytest.raises(MissingDataError):
            classify_signal(atd, "s", "w", "in")

    def test_recv(self):
        assert recv(2, "s") == Prim("recv_2_s")


class TestPosteriors:
    def test_events_example2(self, ex2):
        rep = compare_posteriors_events(ex2, "w1", 1, 2)
        assert not rep.equal
        assert rep.witness == {"event": ["w2"], "values": ["1/2", "0"]}

    def test_same_player(self, ex2, critical):
        assert compare_posteriors_events(ex2, "w1", 2, 2).equal
        for d in range(3):
            assert compare_posteriors_formulas(critical, "w11", 1, 1, "in-ai", d).equal

    def test_critical_formulas_differ(self, critical):
        rep = compare_posteriors_formulas(critical, "w11", 1, 2, "in-ai", 1)
        assert not rep.equal

    def test_public_signal_equal_events(self):
        m = everyone_receives()
        assert compare_posteriors_events(m, "w", 1, 2).equal

    def test_negative_depth(self, ex2):
        with pytest.raises(ValueError):
            compare_posteriors_formulas(ex2, "w1", 1, 2, "in", -1)


class TestAumann:
    def test_example2(self, ex2):
        rep = aumann_check(ex2)
        assert rep.preconditions_ok and rep.ok and rep.checked > 0

    def test_atd_escape(self, atd):
        rep = aumann_check(atd)
        assert not rep.preconditions_ok and not rep.escapes
        forced = aumann_check(atd, force=True)
        assert forced.ok
        assert {"state": "w", "i": 1, "j": 2, "formula": "p", "values": ["1", "0"]} in forced.escapes

    def test_single_state(self):
        assert aumann_check(everyone_receives()).ok


# ---------------------------------------------------------------- frozen witnesses


def _oracle_public(m, signal, w, view, mode):
    group = tuple(m.player_ids)
    f = CB(group, conj(recv(i, signal) for i in m.player_ids))
    return oracle.Oracle(m, mode).sat(f, w, view)


def _oracle_formula_posteriors(m, w, i, j, mode, view, depth=2):
    o = oracle.Oracle(m, mode)
    pairs = []
    for f in propositional_family(m.vocabulary, depth):
        if mode == "in-ai":
            pairs.append((o.prob(i, o.ext(f, i), w, i), o.prob(j, o.ext(f, j), w, j)))
        else:
            ext = o.ext(f, view)
            pairs.append((o.prob(i, ext, w, view), o.prob(j, ext, w, view)))
    return pairs


def _event_posteriors(m, w, i, j):
    return [(m.posterior(i, w).get(x, 0), m.posterior(j, w).get(x, 0)) for x in m.states]


def test_out_ai_events_may_differ():
    m = load_model(FIXTURES / "out_ai_may_differ.json")
    exp = json.loads((FIXTURES / "out_ai_may_differ.expected.json").read_text())
    w, s, v, (i, j) = exp["state"], exp["signal"], exp["viewpoint"], exp["players"]
    assert validate_ai(m, "out-ai").ok and check_cpa(m).ok
    assert all(x == s for x in m.signals[w])
    assert _oracle_public(m, s, w, v, "out-ai")
    assert all(a == b for a, b in _oracle_formula_posteriors(m, w, i, j, "out-ai", v))
    assert any(a != b for a, b in _event_posteriors(m, w, i, j))
    # the library agrees
    assert classify_signal(m, s, w, "out-ai", viewpoint=v).public
    assert compare_posteriors_formulas(m, w, i, j, "out-ai", 2, viewpoint=v).equal
    assert compare_posteriors_events(m, w, i, j).witness == exp["events"]


def test_in_ai_formulas_may_differ():
    m = load_model(FIXTURES / "in_ai_may_differ.json")
    exp = json.loads((FIXTURES / "in_ai_may_differ.expected.json").read_text())
    w, s, (i, j) = exp["state"], exp["signal"], exp["players"]
    assert validate_ai(m, "in-ai").ok and check_cpa(m).ok
    assert all(x == s for x in m.signals[w])
    assert _oracle_public(m, s, w, 1, "in-ai")
    assert all(a == b for a, b in _event_posteriors(m, w, i, j))
    assert any(a != b for a, b in _oracle_formula_posteriors(m, w, i, j, "in-ai", None))
    assert classify_signal(m, s, w, "in-ai").public
    rep = compare_posteriors_formulas(m, w, i, j, "in-ai", 2)
    assert not rep.equal and rep.witness == exp["formulas"]


# ---------------------------------------------------------------- properties


@given(st.integers(0, 10_000))
def test_ambiguity_zero_under_common_interpretation(seed):
    m = random_structure(GeneratorConfig(seed=seed, ambiguity_probability=F(0)))
    assert is_common_interpretation(m)
    for f in propositional_family(m.vocabulary, 1):
        assert ambiguity_measure(m, f).epsilon == 0


@given(st.integers(0, 10_000), st.data())
def test_ambiguity_monotone_under_agreement(seed, data):
    m = random_structure(GeneratorConfig(seed=seed, players=(2, 3), propositions=(1, 1)))
    w = data.draw(st.sampled_from(m.states))
    i = data.draw(st.integers(2, m.players))
    interp = [dict(x) for x in m.interpretations]
    # make player i agree with player 1 about p at w
    if ("p" in interp[0][w]) != ("p" in interp[i - 1][w]):
        interp[i - 1][w] = interp[i - 1][w] ^ {"p"}
    m2 = m.replace(interpretations=tuple(interp))
    for f in propositional_family(["p"], 1):
        assert ambiguity_measure(m2, f).disagreement_event <= ambiguity_measure(m, f).disagreement_event
