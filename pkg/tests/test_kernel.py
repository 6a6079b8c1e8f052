from __future__ import annotations

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rpes.generate import GenParams, gen_pes, gen_rpes
from rpes.kernel import (
    Pes,
    PreconditionError,
    Rpes,
    StructureError,
    ValidationError,
    is_causal,
    is_cause_respecting,
    phi,
    sustained_causation,
    transitive_closure,
    validate_pes,
    validate_rpes,
    varphi,
)

seeds = st.integers(min_value=0, max_value=2**32)


class TestValidatePes:
    def test_phi_of_e2_is_valid(self, e2):
        p = phi(e2)
        assert p.events == {"a", "b"}
        assert p.causality == p.conflict == frozenset()
        assert validate_pes(p).valid

    def test_conflict_with_own_cause_breaks_irreflexivity(self):
        p = Pes.build("ab", [("a", "b")], [("a", "b")])
        report = validate_pes(p)
        assert not report.valid
        assert "hereditary-conflict" in report.axioms()
        # a#b and a<b would force b#b
        witness = next(v.witness for v in report.violations if v.axiom == "hereditary-conflict")
        assert witness == ("a", "b", "b")

    def test_empty(self):
        assert validate_pes(Pes.build([])).valid

    def test_cycle_is_reported(self):
        p = Pes.build("ab", [("a", "b"), ("b", "a")])
        assert "causality-irreflexive" in validate_pes(p).axioms()


class TestValidateRpes:
    def test_fixtures_valid(self, fixtures):
        for r in fixtures.values():
            assert validate_rpes(r).valid

    def test_prevention_overlapping_reverse_causes(self, e0):
        bad = Rpes(**{**_fields(e0), "prevention": frozenset({("b", "b")})})
        report = validate_rpes(bad)
        assert report.axioms() == {"prevention-reverse-disjoint"}
        with pytest.raises(ValidationError):
            report.raise_if_invalid()

    def test_initial_configuration_of_e3(self, e3):
        assert e3.initial == {"b"}
        assert validate_rpes(e3).valid

    def test_every_violation_is_listed(self):
        r = Rpes.build("abc", [("a", "b")], [("a", "c"), ("b", "b")], initial="bc")
        axioms = validate_rpes(r).axioms()
        assert {"conflict-irreflexive", "initial-left-closed", "initial-conflict-free"} <= axioms

    def test_unknown_event_rejected(self):
        with pytest.raises(StructureError):
            Rpes.build("a", [("a", "z")])

    def test_reverse_target_must_be_reversible(self):
        with pytest.raises(StructureError):
            Rpes.build("ab", reverse_causality=[("a", "b")])

    def test_conflicting_reverse_causes(self):
        r = Rpes.build("abc", conflict=[("a", "b")], reversible="c", reverse_causality=[("a", "c"), ("b", "c")])
        assert "reverse-causes-conflict-free" in validate_rpes(r).axioms()

    def test_conflict_must_be_inherited_along_sustained_causation(self):
        # a << b because b prevents undoing a; c # a must then reach b
        r = Rpes.build("abc", [("a", "b")], [("a", "c")], reversible="a", prevention=[("b", "a")])
        assert "conflict-hereditary-sustained" in validate_rpes(r).axioms()

    def test_self_reverse_cause_inserted(self):
        r = Rpes.build("a", reversible="a")
        assert r.reverse_causes("a") == {"a"}


def _fields(r: Rpes) -> dict:
    return {f: getattr(r, f) for f in r.__dataclass_fields__}


class TestSustainedCausation:
    def test_e0_empty(self, e0):
        assert sustained_causation(e0) == frozenset()

    def test_e3(self, e3):
        assert sustained_causation(e3) == {("b", "d"), ("c", "d")}

    def test_irreversible_structure_keeps_all_causality(self):
        r = Rpes.build("abc", [("a", "b"), ("b", "c")])
        assert sustained_causation(r) == r.causality


class TestClassification:
    def test_cause_respecting(self, e1, e2, e4):
        assert is_cause_respecting(e2)
        assert not is_cause_respecting(e1)
        assert is_cause_respecting(e4)

    def test_causal(self, e2, e3, e4):
        assert is_causal(e4)
        assert not is_causal(e3)
        assert not is_causal(e2)

    @settings(max_examples=100, deadline=None)
    @given(seeds)
    def test_causal_implies_cause_respecting(self, seed):
        r = gen_rpes(GenParams(num_events=6, seed=seed, mode="causal"))
        assert is_causal(r) and is_cause_respecting(r)


class TestPhiVarphi:
    def test_phi_e2(self, e2):
        p = phi(e2)
        assert p == Pes.build("ab")

    def test_phi_empty(self):
        assert phi(Rpes.build([])) == Pes.build([])

    def test_phi_rejects_non_cause_respecting(self, e0):
        with pytest.raises(PreconditionError):
            phi(e0)

    def test_phi_rejects_nonempty_initial(self, e4):
        with pytest.raises(PreconditionError):
            phi(e4)

    def test_varphi_e2(self, e2):
        r = varphi(phi(e2), {"a"})
        assert r.reverse_causality == {("a", "a")}
        assert r.prevention == frozenset()

    def test_varphi_no_reversible(self):
        p = Pes.build("ab", [("a", "b")])
        r = varphi(p, ())
        assert r.reversible == r.reverse_causality == r.prevention == frozenset()

    @settings(max_examples=60, deadline=None)
    @given(seeds, st.data())
    def test_roundtrip(self, seed, data):
        p = gen_pes(GenParams(num_events=6, seed=seed))
        rev = data.draw(st.sets(st.sampled_from(sorted(p.events))) if p.events else st.just(set()))
        r = varphi(p, rev)
        assert validate_rpes(r).valid and is_causal(r)
        assert phi(r) == p


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6)), max_size=15))
def test_transitive_closure_matches_networkx(pairs):
    g = nx.DiGraph()
    g.add_edges_from(pairs)
    expected = {(a, b) for a, b in nx.transitive_closure(g, reflexive=False).edges}
    assert transitive_closure(pairs) == expected
