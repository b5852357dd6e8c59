import pytest

from doctrina import pack
from doctrina.doctrine import (TOP, check_existential, check_full_existential, check_lambda_existential,
                               doctrine_from_tables, find_elementary_structure, localic_doctrine,
                               m_subobjects_doctrine, restrict_subdoctrine, terminal_doctrine,
                               tops_selection, trivial_doctrine, weak_subobjects_doctrine)
from doctrina.errors import (MissingTop, NotClosedUnderMeet, NotClosedUnderReindex, NotFunctorial,
                             NotMeetPreserving, NotStableSystem, NotTopPreserving)
from doctrina.fincat import FinSetCategory, all_morphisms, identities
from doctrina.order import boolean_lattice, chain


def c2():
    return pack.base("C2")


def test_tables_round_trip_through_pull():
    P = pack.doctrine("C2-over-b")
    assert P.pull("u", 0) == TOP
    assert P.pull("id_b", 1) == 1


def test_top_must_be_preserved():
    with pytest.raises(NotTopPreserving):
        doctrine_from_tables(c2(), {"a": chain(2), "b": chain(2)}, {"u": {0: 0, 1: 0}})


def test_meets_must_be_preserved():
    B = boolean_lattice("pq")
    # sends p and q to top but their meet to the bottom
    table = {x: (1 if x else 0) for x in B}
    with pytest.raises(NotMeetPreserving):
        doctrine_from_tables(c2(), {"a": chain(2), "b": B}, {"u": table})


def test_missing_table_is_not_functorial():
    with pytest.raises(NotFunctorial):
        doctrine_from_tables(c2(), {"a": chain(2), "b": chain(2)}, {})


def test_weak_subobjects_over_c2():
    P = weak_subobjects_doctrine(c2())
    assert [len(P.fibres[A]) for A in ("a", "b")] == [1, 2]
    assert check_full_existential(P).holds
    assert find_elementary_structure(P) is not None


def test_trivial_doctrine_is_full_existential():
    P = trivial_doctrine(c2())
    rep = check_full_existential(P)
    assert rep.holds and rep.status == "pass"


def test_two_chain_over_a_fails_beck_chevalley():
    rep = check_full_existential(pack.doctrine("C2-over-a"))
    assert rep.adjoints and rep.fr and not rep.bcc
    assert rep.bcc_failures[0][:2] == ("u", "u")


def test_identities_always_form_an_existential_class():
    for P in pack.corpus():
        assert check_lambda_existential(P, identities(P.base)).holds


def test_powerset_and_truncation():
    P = pack.doctrine("Pow_FS012")
    rep = check_full_existential(P)
    assert rep.holds
    # products 2×2 are missing, so the projection class is partial
    assert check_existential(P).status in ("pass", "unverifiable")


def test_powerset_on_full_finsets_is_elementary():
    P = pack.doctrine("Pow_FS'")
    w = find_elementary_structure(P)
    assert w is not None
    assert w.delta[2] == frozenset({0, 3})


def test_localic_doctrine_shapes():
    P = localic_doctrine(chain(3), FinSetCategory([0, 1, 2]))
    assert [len(P.fibres[n]) for n in (0, 1, 2)] == [1, 3, 9]


def test_terminal_doctrine_has_one_object():
    P = terminal_doctrine(chain(3))
    assert P.base.objects == ("*",)
    assert check_existential(P).holds


def test_subobjects_require_a_stable_system():
    C = pack.base("C2")
    with pytest.raises(NotStableSystem):
        m_subobjects_doctrine(C, C.structure, {"u"})


def test_subdoctrine_closure_errors():
    P = pack.doctrine("C2-over-b3")
    with pytest.raises(MissingTop):
        restrict_subdoctrine(P, {"a": [TOP], "b": [0]})
    sub, inc = restrict_subdoctrine(P, tops_selection(P))
    assert inc.fibrewise_iso is False and inc.is_natural
    Q = pack.doctrine("Sub_B4")
    sel = {A: [Q.top(A)] for A in Q.base.objects}
    sel["pq"] = [Q.top("pq"), *[x for x in Q.fibres["pq"] if x != Q.top("pq")][:1]]
    with pytest.raises((NotClosedUnderReindex, NotClosedUnderMeet)):
        restrict_subdoctrine(Q, sel)


def test_elementary_structure_on_corpus():
    found = {P.name: find_elementary_structure(P) is not None for P in pack.corpus()
             if P.name not in ("Pow_FS012", "CH3^FS012")}
    assert found["Psi_C2"] and found["terminal-CH3"] and found["C2-trivial"]


def test_existential_report_counts_squares():
    rep = check_lambda_existential(pack.doctrine("Psi_CH3"), all_morphisms(pack.base("CH3")))
    assert rep.holds and rep.squares_checked > 0
