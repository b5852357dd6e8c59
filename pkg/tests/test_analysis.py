import pytest

from doctrina import pack
from doctrina.analysis import (characterize_completion, check_choice_rules, check_epsilon_operators,
                               check_regular_category, doctrine_equivalence, epsilon_iff,
                               existential_free_subdoctrine, free_element_report, is_completion_of, is_cover,
                               is_existential_free, localic_fragment_conditions, morita_exact, morita_regular,
                               pure_unit_iso, reconstruction, run_theorem_suite, unique_choice_conditions)
from doctrina.completion import existential_completion
from doctrina.doctrine import tops_selection
from doctrina.fincat import ChosenStructure, all_morphisms, monomorphisms, semilattice_category
from doctrina.order import boolean_lattice, chain
from doctrina.doctrine import m_subobjects_doctrine


def full(P):
    return all_morphisms(P.base)


def test_free_elements_of_weak_subobjects_are_the_tops():
    P = pack.doctrine("Psi_C2")
    rep = free_element_report(P, full(P))
    assert {k for k, v in rep.free.items() if v} == {(A, P.top(A)) for A in P.base.objects}


def test_free_elements_are_reindex_stable():
    for P in pack.corpus()[:10]:
        lam = full(P)
        rep = free_element_report(P, lam)
        for f in P.base.morphisms:
            for x in P.fibres[P.base.tgt(f)]:
                if rep.free[P.base.tgt(f), x]:
                    assert rep.splitting[P.base.src(f), P.pull(f, x)]


def test_free_subdoctrine_closure_report():
    fs = existential_free_subdoctrine(pack.doctrine("terminal-CH3"), all_morphisms(pack.base("T1")))
    assert fs.closed and len(fs.selection["*"]) == 3


def test_two_chain_over_a_fails_condition_a():
    P = pack.doctrine("C2-over-a")
    v = characterize_completion(P, full(P))
    assert v.existential == "fail"
    assert v.failing_condition == "a"
    assert v.witnesses["a"] == ("u", 0)
    assert not v


def test_characterization_round_trip_on_a_completion():
    P = pack.doctrine("C2-over-b3")
    comp = existential_completion(P, full(P))
    v = characterize_completion(comp.doctrine, full(P))
    assert v.ok and v.reconstruction.fibrewise_iso


def test_characterize_boolean_fibres_over_c2():
    from doctrina.doctrine import doctrine_from_tables
    C = pack.base("C2")
    B = boolean_lattice("pq")
    P = doctrine_from_tables(C, {"a": B, "b": B}, {"u": {x: x for x in B}}, C.structure)
    v = characterize_completion(P, full(P))
    assert v.existential in ("pass", "fail")
    assert bool(v) == v.ok


def test_reconstruction_and_ground_truth():
    P = pack.doctrine("Psi_CH3")
    assert is_completion_of(P, tops_selection(P), full(P))
    assert reconstruction(P, tops_selection(P), full(P)).ok
    assert not is_completion_of(pack.doctrine("C2-over-b3"), tops_selection(pack.doctrine("C2-over-b3")),
                                full(pack.doctrine("C2-over-b3")))


def test_is_existential_free():
    P = pack.doctrine("Psi_C2")
    assert is_existential_free(P, full(P), "b", P.top("b"))[0]


def test_choice_rules_on_weak_subobjects():
    ch = check_choice_rules(pack.doctrine("Psi_C2"), full(pack.doctrine("Psi_C2")))
    assert ch.lambda_rc is True
    assert ch.as_dict()["lambda_rc"] is True


def test_choice_rules_fail_with_witness():
    P = pack.doctrine("C2-trivial")
    ch = check_choice_rules(P, full(P))
    assert ch.lambda_rc is False and "lambda_rc" in ch.witnesses


def test_epsilon_operators():
    assert check_epsilon_operators(pack.doctrine("terminal-CH3")).verdict is True
    eps = check_epsilon_operators(pack.doctrine("Psi_C2"))
    assert eps.verdict is False and eps.failures
    assert epsilon_iff(pack.doctrine("terminal-B4")) == (True, True)
    assert pure_unit_iso(pack.doctrine("Pow_FS012")) is None


def test_doctrine_equivalence():
    assert doctrine_equivalence(pack.doctrine("Psi_C2"), pack.doctrine("C2-over-b")) is not None
    assert doctrine_equivalence(pack.doctrine("Psi_C2"), pack.doctrine("C2-trivial")) is None


def test_morita():
    assert morita_regular(pack.doctrine("Psi_C2"), pack.doctrine("C2-over-b"))
    assert not morita_exact(pack.doctrine("Psi_C2"), pack.doctrine("Psi_CH3"))


def test_regular_categories():
    C = pack.base("CH3")
    assert check_regular_category(C, C.structure).ok
    assert is_cover(C, C.identity(0))
    V = pack.base("V")
    rep = check_regular_category(V, V.structure)
    assert not rep.ok and rep.witness[0] == "missing"


def test_unique_choice_on_a_semilattice_base():
    C = semilattice_category(boolean_lattice("pq"), name="B")
    C.structure = ChosenStructure(C)
    P = m_subobjects_doctrine(C, C.structure, monomorphisms(C))
    u = unique_choice_conditions(P)
    assert u.agree and u.existential_mvar_ruc


def test_localic_fragment_for_boolean_frame():
    fc = localic_fragment_conditions(boolean_lattice("pq"), pack.base("FS012"))
    assert not fc.condition_a
    fc = localic_fragment_conditions(chain(2), pack.base("FS012"))
    assert fc.ok


def test_theorem_suite_entry_point():
    rep = run_theorem_suite("terminal-CH3", "T-EPS")
    assert rep.status == "pass"
