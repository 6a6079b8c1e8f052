from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import mixed_corpus
from rpes.generate import GenParams, gen_rpes
from rpes.kernel import Pes, PreconditionError, Rpes
from rpes.residual import (
    ResidualKey,
    build_te,
    build_te_unfolded,
    check_restriction,
    removal_sets,
    remove_configuration,
    remove_step,
    remove_trace,
    remove_trace_records,
    residual_key,
    residual_of,
)
from rpes.stepsem import NotEnabledError, Step, enumerate_steps
from rpes.textformat import parse_trace

S = Step.of
fs = frozenset


def key(events, reversible, initial):
    return ResidualKey(fs(events), fs(reversible), fs(initial))


def removal_by_definition(r: Rpes, s: Step) -> tuple:
    """The removal sets written out directly over the relations."""
    forward_irrev = {a for a in s.forward if a not in r.reversible}
    tilde = forward_irrev | {x for x in r.reversible for a in forward_irrev if (x, a) in r.causality}
    sharp = {e for e in r.events for x in tilde if (e, x) in r.conflict}
    hat = {u for u in r.reversible if any((a, u) in r.reverse_causality for a in sharp)}
    hathat = {u for u in r.reversible if any((a, u) in r.prevention for a in tilde)}
    events = r.events - tilde - sharp
    reversible = (r.reversible & events) - hat - hathat
    initial = ((r.initial - s.reverse) | s.forward) & events
    return tilde, sharp, hat, hathat, key(events, reversible, initial)


class TestRemoveStep:
    def test_reversible_step_keeps_everything(self, e2):
        res = remove_step(e2, S("a"))
        assert res == e2.restrict(e2.events, e2.reversible, {"a"})

    def test_prevention_drops_reversibility(self, e2):
        res = remove_step(e2, S("b"))
        assert ResidualKey.of(res) == key("a", "", "")
        assert res.causality == res.conflict == res.reverse_causality == res.prevention == fs()

    def test_concurrent_step(self, e2):
        assert ResidualKey.of(remove_step(e2, S("ab"))) == key("a", "", "a")

    def test_not_enabled(self, e2):
        with pytest.raises(NotEnabledError):
            remove_step(e2, S((), "a"))

    def test_empty_trace(self, fixtures):
        for r in fixtures.values():
            assert remove_trace(r, ()) == r

    def test_e0_records(self, e0):
        chain, records = remove_trace_records(e0, parse_trace("b;d"))
        assert records[1].tilde_a == {"b", "d"}
        assert records[1].conflict_of_tilde == {"a", "c"}
        assert chain[-1].events == {"e"}
        assert chain[-1].causality == chain[-1].conflict == fs()

    def test_undo_returns_to_root(self, e2):
        assert remove_trace(e2, parse_trace("a;|a")) == e2

    def test_rejects_non_trace(self, e0):
        with pytest.raises(NotEnabledError):
            remove_trace(e0, parse_trace("b;d;e"))

    @settings(max_examples=80, deadline=None)
    @given(st.integers(0, 2**32), st.data())
    def test_sets_match_definition(self, seed, data):
        r = gen_rpes(GenParams(num_events=5, seed=seed, mode="any", init_prob=0.3))
        steps = sorted(enumerate_steps(r, r.initial), key=Step.sort_key)
        if not steps:
            return
        s = data.draw(st.sampled_from(steps))
        rec = removal_sets(r, s)
        tilde, sharp, hat, hathat, want = removal_by_definition(r, s)
        assert (rec.tilde_a, rec.conflict_of_tilde, rec.hat_a, rec.hat_hat_a) == (tilde, sharp, hat, hathat)
        res = remove_step(r, s)
        assert ResidualKey.of(res) == want
        check_restriction(r, res)


class TestKeys:
    def test_same_residual_after_different_traces(self, e2):
        k1 = ResidualKey.of(remove_trace(e2, parse_trace("a;b")))
        k2 = ResidualKey.of(remove_trace(e2, parse_trace("a,b")))
        assert k1 == k2 == key("a", "", "a")

    def test_empty_trace_key(self, e3):
        assert ResidualKey.of(remove_trace(e3, ())) == key(e3.events, e3.reversible, e3.initial)

    def test_text(self, e2):
        assert str(ResidualKey.of(e2)) == "R_E{a,b}_F{a}_C{}"

    def test_residual_of_inverts_key(self, fixtures):
        for r in fixtures.values():
            for state in build_te_unfolded(r, max_step_size=2).states:
                assert residual_of(r, residual_key(r, state)) == state


class TestTe:
    def test_e2_shape(self, e2):
        te = build_te(e2)
        assert (len(te.states), len(te.transitions)) == (5, 6)

    def test_empty(self):
        te = build_te(Rpes.build([]))
        assert len(te.states) == 1 and not te.transitions

    def test_e4_matches_unfolding(self, e4):
        keyed = build_te(e4)
        unfolded = build_te_unfolded(e4)
        renamed = unfolded.rename({s: ResidualKey.of(s) for s in unfolded.states})
        assert renamed.transitions == keyed.transitions
        assert renamed.states == keyed.states

    def test_residuals_are_restrictions(self):
        for r in mixed_corpus(20, start=900):
            for state in build_te_unfolded(r).states:
                check_restriction(r, state)


class TestRemoveConfiguration:
    def test_drops_configuration(self):
        p = Pes.build("ab", [("a", "b")])
        assert remove_configuration(p, {"a"}).events == {"b"}

    def test_drops_conflicts(self):
        p = Pes.build("ab", conflict=[("a", "b")])
        assert remove_configuration(p, {"a"}).events == fs()

    def test_rejects_non_configuration(self):
        p = Pes.build("ab", [("a", "b")], [])
        with pytest.raises(PreconditionError):
            remove_configuration(p, {"b"})
        with pytest.raises(PreconditionError):
            remove_configuration(Pes.build("ab", conflict=[("a", "b")]), {"a", "b"})
        with pytest.raises(PreconditionError):
            remove_configuration(p, {"z"})
