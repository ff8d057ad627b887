from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

import oracle
from ambilogic.semantics import (
    ConditioningUndefined, Mode, belief_event, common_belief, evaluate, extension, prob_value, session,
    truth_table, valid,
)
from ambilogic.structure import generate_priors, model_from_dict, validate_ai
from ambilogic.syntax import (
    CB, EB, TRUE, And, B, Iff, Implies, K, Not, Or, Prim, ProbCmp, ProbGE, Term, normalize,
)
from ambilogic.transforms import GeneratorConfig, random_structure

ALL = list(Mode)


class TestAgreeToDisagree:
    def test_in_mode_agree_to_disagree(self, atd):
        for i in (1, 2):
            assert evaluate(atd, "w", i, "CB_{1,2}(B_1(p) & B_2(!p))", "in")

    def test_out_mode_common_belief(self, atd):
        assert evaluate(atd, "w", 1, "CB_{1,2}(p)", "out")
        assert evaluate(atd, "w", 2, "CB_{1,2}(!p)", "out")
        assert not evaluate(atd, "w", 2, "CB_{1,2}(p)", "out")

    def test_extension_of_p(self, atd):
        assert extension(atd, "p", 1, "in") == {"w"}
        assert extension(atd, "p", 2, "in") == set()

    def test_common_belief_event(self, atd):
        y = extension(atd, "B_1(p) & B_2(!p)", 1, "in")
        assert y == {"w"}
        assert common_belief(atd, [1, 2], y, 1, "in") == {"w"}


class TestSignalModel:
    def test_prob_values(self, ex2):
        assert prob_value(ex2, "w1", 1, 1, "p", "in") == 1
        assert prob_value(ex2, "w1", 1, 1, "q", "in") == F(1, 2)
        assert prob_value(ex2, "w1", 2, 2, "p", "in") == F(1, 2)
        assert prob_value(ex2, "w1", 2, 2, "q", "in") == 1

    def test_belief_event(self, ex2):
        assert belief_event(ex2, 1, {"w1", "w2"}, 1, "in") == {"w1", "w2"}
        assert belief_event(ex2, 1, ex2.states, 1, "in") == set(ex2.states)
        assert belief_event(ex2, 1, [], 1, "in") == set()

    def test_signal_not_public(self, ex2):
        y = extension(ex2, "recv_1_s & recv_2_s", 1, "in")
        assert y == {"w1"}
        assert common_belief(ex2, [1, 2], y, 1, "in") == set()
        assert common_belief(ex2, [1, 2], ex2.states, 1, "in") == set(ex2.states)


class TestNoEquivalent:
    def test_probabilities(self, no_equiv):
        for w in no_equiv.states:
            for i in (1, 2, 3):
                assert evaluate(no_equiv, w, i, "Pr_2(p) = 2/3", "in")
                assert evaluate(no_equiv, w, i, "Pr_3(p) = 3/4", "in")
                assert evaluate(no_equiv, w, i, "B_2(p <-> B_1(p)) & B_3(p <-> B_1(p))", "in")

    def test_validities(self, no_equiv):
        assert valid(no_equiv, "p <-> (Pr_1(p) = 1)", "in")
        assert valid(no_equiv, "!p <-> (Pr_1(!p) = 1)", "in")


class TestMisc:
    def test_true_everywhere(self, ex2):
        for mode in ALL:
            assert extension(ex2, "true", 1, mode) == set(ex2.states)
            assert prob_value(ex2, "w2", 1, 2, "true", mode) == 1

    def test_truth_table_order(self, ex2):
        rows = truth_table(ex2, "p", "in")
        assert [(w, i) for w, i, _ in rows] == [(w, i) for w in ex2.states for i in (1, 2)]

    def test_unknown_state(self, ex2):
        with pytest.raises(KeyError):
            evaluate(ex2, "nowhere", 1, "p", "in")

    def test_player_out_of_range(self, ex2):
        with pytest.raises(ValueError):
            extension(ex2, "B_3(p)", 1, "in")

    def test_propositional_mode_independent(self, critical):
        for f in ("recv_1_s", "!recv_2_s & p", "recv_1_s <-> recv_2_s"):
            for i in (1, 2):
                assert len({extension(critical, f, i, mode) for mode in ALL}) == 1

    def test_mode_coercion(self):
        assert Mode.coerce("OUT_AI") is Mode.OUT_AI
        with pytest.raises(ValueError):
            Mode.coerce("sideways")


def zero_mass_label():
    # player 2 reads player 1's label of cell {b} as {c}, which has prior 0
    return model_from_dict({
        "states": ["a", "b", "c"], "players": 2, "propositions": ["x"],
        "partitions": [[["a"], ["b", "c"]], [["a", "b", "c"]]],
        "posteriors": [[{"a": "1"}, {"b": "1"}], [{"a": "1/2", "b": "1/2"}]],
        "interpretations": [{"a": [], "b": ["x"], "c": ["x"]}, {"a": [], "b": [], "c": ["x"]}],
        "priors": [{"a": "1/2", "b": "1/2", "c": "0"}, {"a": "1/2", "b": "1/2", "c": "0"}],
        "cell_labels": [["!x", "x"], ["true"]],
    })


class TestConditioning:
    def test_undefined_is_an_error(self):
        m = zero_mass_label()
        with pytest.raises(ConditioningUndefined) as exc:
            extension(m, "B_1(x)", 2, "out-ai")
        assert exc.value.player == 1 and exc.value.viewpoint == 2

    def test_owner_view_is_defined(self):
        m = zero_mass_label()
        assert extension(m, "B_1(x)", 1, "out-ai") == {"b", "c"}
        assert extension(m, "B_1(x)", 2, "in-ai") == {"b", "c"}

    def test_no_short_circuit(self):
        m = zero_mass_label()
        with pytest.raises(ConditioningUndefined):
            extension(m, "!true & B_1(x)", 2, "out-ai")


# ---------------------------------------------------------------- oracle cross-check

PROPS = [Prim("p"), Prim("q")]


def formulas(n_players):
    players = st.integers(1, n_players)
    groups = st.sets(players, min_size=1).map(lambda s: tuple(sorted(s)))
    thresholds = st.sampled_from([F(0), F(1, 4), F(1, 3), F(1, 2), F(2, 3), F(1)])

    def extend(children):
        terms = st.lists(st.builds(Term, st.sampled_from([F(1), F(-1), F(1, 2)]), players, children),
                         min_size=1, max_size=2).map(tuple)
        return st.one_of(
            st.builds(Not, children), st.builds(And, children, children), st.builds(Or, children, children),
            st.builds(Implies, children, children), st.builds(Iff, children, children),
            st.builds(ProbGE, terms, thresholds),
            st.builds(ProbCmp, st.sampled_from(["<=", "<", ">", "="]), terms, thresholds),
            st.builds(B, players, children), st.builds(K, players, children),
            st.builds(EB, st.integers(1, 2), groups, children), st.builds(CB, groups, children),
        )

    return st.recursive(st.sampled_from(PROPS + [TRUE]), extend, max_leaves=6)


@st.composite
def cases(draw):
    seed = draw(st.integers(0, 5000))
    signals = draw(st.booleans())
    cfg = GeneratorConfig(seed=seed, players=(2, 3), propositions=(2, 2), with_signals=signals,
                          ai_assumption=draw(st.sampled_from(["A6", "A6'"])))
    m = random_structure(cfg)
    return m, draw(formulas(2))


def library(m, f, i, mode):
    try:
        return extension(m, f, i, mode)
    except ConditioningUndefined:
        return "undefined"


@given(cases())
def test_matches_oracle(case):
    m, f = case
    for mode in ALL:
        if mode.ai and m.cell_labels is None:
            continue
        for i in m.player_ids:
            assert library(m, f, i, mode) == oracle.extension(m, f, i, mode.value), (mode, i)


@given(cases())
def test_normalize_preserves_extension(case):
    m, f = case
    for mode in (Mode.OUT, Mode.IN):
        for i in m.player_ids:
            assert oracle.extension(m, f, i, mode.value) == oracle.extension(m, normalize(f), i, mode.value)


@given(cases())
def test_in_viewpoint_independence(case):
    m, f = case
    g = CB((1, 2), f)
    h = ProbGE((Term(F(1), 2, f),), F(1, 2))
    for x in (g, h):
        assert len({extension(m, x, i, "in") for i in m.player_ids}) == 1


@given(cases())
def test_out_atoms_are_unions_of_cells(case):
    m, f = case
    for j in m.player_ids:
        atom = ProbGE((Term(F(1), j, f),), F(1, 2))
        for i in m.player_ids:
            ext = extension(m, atom, i, "out")
            for cell in m.partitions[j - 1]:
                assert set(cell) <= ext or not set(cell) & ext


@given(st.integers(0, 5000), formulas(2))
def test_common_interpretation_collapse(seed, f):
    m = random_structure(GeneratorConfig(seed=seed, players=(2, 3), propositions=(2, 2),
                                         ambiguity_probability=F(0)))
    for i in m.player_ids:
        assert extension(m, f, i, "out") == extension(m, f, i, "in")


@given(st.integers(0, 5000), formulas(2))
def test_in_ai_matches_in_with_generated_priors(seed, f):
    m = random_structure(GeneratorConfig(seed=seed, players=(2, 3), propositions=(2, 2), with_signals=True))
    m = m.replace(priors=generate_priors(m))
    assert validate_ai(m, "in-ai").ok
    for i in m.player_ids:
        assert extension(m, f, i, "in-ai") == extension(m, f, i, "in")


@given(cases())
def test_cb_equals_unrolling(case):
    m, f = case
    group = tuple(m.player_ids)
    for i in m.player_ids:
        cb = extension(m, CB(group, f), i, "in")
        inter = set(m.states)
        for k in range(1, len(m.states) + 3):
            ek = extension(m, EB(k, group, f), i, "in")
            assert cb <= ek
            inter &= ek
        assert cb == inter


def test_session_is_shared(ex2):
    assert session(ex2, "in") is session(ex2, Mode.IN)
    assert session(ex2, "in") is not session(ex2, "out")
