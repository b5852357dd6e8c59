import pytest
from hypothesis import given, settings, strategies as st

from doctrina import pack
from doctrina.errors import BudgetExceeded, IncompleteComposition, MissingIdentity, MissingStructure, NonAssociative
from doctrina.fincat import (ChosenStructure, FinCategory, FinSetCategory, all_morphisms, discrete_category,
                             identities, is_mono, monomorphisms, preorder_category, projections, search_equivalence,
                             skeleton, validate_category, validate_structure, verify_left_class)


def arrow_category():
    return {"objects": ["a", "b"], "morphisms": [["ia", "a", "a"], ["ib", "b", "b"], ["u", "a", "b"]],
            "identity": {"a": "ia", "b": "ib"},
            "compose": [["ia", "ia", "ia"], ["ib", "ib", "ib"], ["u", "ia", "u"], ["ib", "u", "u"]]}


def test_plain_description_validates():
    C = validate_category(arrow_category())
    assert C.compose("ib", "u") == "u"
    assert C.hom("a", "b") == ("u",)


def test_missing_identity():
    raw = arrow_category()
    raw["identity"] = {"a": "ia", "b": "u"}
    with pytest.raises(MissingIdentity):
        validate_category(raw)


def test_missing_composite():
    raw = arrow_category()
    raw["compose"] = raw["compose"][:-1]
    with pytest.raises(IncompleteComposition):
        validate_category(raw)


def test_non_associative_table_is_caught():
    # monoid {1, e} with e∘e = e but a table that breaks associativity via a third element
    raw = {"objects": ["*"], "morphisms": [["1", "*", "*"], ["x", "*", "*"], ["y", "*", "*"]],
           "identity": {"*": "1"},
           "compose": [["1", "1", "1"], ["1", "x", "x"], ["x", "1", "x"], ["1", "y", "y"], ["y", "1", "y"],
                       ["x", "x", "y"], ["x", "y", "x"], ["y", "x", "y"], ["y", "y", "y"]]}
    with pytest.raises(NonAssociative):
        validate_category(raw)


def test_finset_hom_counts():
    F = FinSetCategory([0, 1, 2])
    assert len(F.morphisms) == 11
    assert len(F.hom(2, 2)) == 4
    assert len(FinSetCategory([0, 1, 2, 4]).morphisms) == 305


def test_finset_monos_are_injections():
    F = FinSetCategory([0, 1, 2])
    for m in F.morphisms:
        t = F.function(m)
        assert is_mono(F, m) == (len(set(t)) == len(t))
    assert set(monomorphisms(F)) == {m for m in F.morphisms if len(set(F.function(m))) == len(F.function(m))}


def test_chain_limits_are_meets():
    C = pack.base("CH3")
    S = C.structure
    assert S.terminal() == 2
    P, p1, p2 = S.product(0, 1)
    assert P == 0
    assert validate_structure(S) == []


def test_truncated_finsets_lack_two_by_two():
    F = pack.base("FS012")
    with pytest.raises(MissingStructure):
        F.structure.product(2, 2)
    S = pack.base("FS'").structure
    assert S.product(2, 2)[0] == 4


def test_pullbacks_along_identities_are_strict():
    C = pack.base("C2")
    S = ChosenStructure(C)
    assert S.pullback("id_b", "u") == ("a", "u", "id_a")


def test_left_classes_on_c2():
    C = pack.base("C2")
    assert verify_left_class(C, C.structure, all_morphisms(C)).ok
    assert verify_left_class(C, C.structure, identities(C)).ok
    assert verify_left_class(C, C.structure, projections(C, C.structure)).ok


def test_class_without_identities_fails():
    C = pack.base("C2")
    rep = verify_left_class(C, C.structure, {"u"})
    assert not rep.identities
    assert rep.counterexamples[0][0] == "identity"


def test_equivalence_with_relabelled_copy():
    C = pack.base("CH3")
    D = preorder_category(["x", "y", "z"], lambda p, q: "xyz".index(p) <= "xyz".index(q))
    w = search_equivalence(C, D)
    assert w and w.verify()
    assert w.functor.obj_map == {0: "x", 1: "y", 2: "z"}


def test_equivalence_absent_is_proven():
    w = search_equivalence(pack.base("C2"), discrete_category(["p", "q"]))
    assert not w and w.reason == "proven-absent"


def test_budget_is_enforced():
    C = discrete_category(range(9))
    with pytest.raises(BudgetExceeded):
        search_equivalence(C, discrete_category(range(9)), budget=100)


def test_skeleton_collapses_isomorphic_objects():
    # two isomorphic objects a, b plus the isomorphisms between them
    C = preorder_category(["a", "b"], lambda x, y: True)
    assert len(skeleton(C).objects) == 1
    assert search_equivalence(C, pack.base("T1"))


@st.composite
def preorders(draw):
    n = draw(st.integers(1, 4))
    rel = {(i, i) for i in range(n)}
    rel |= {p for p in draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=6))}
    changed = True
    while changed:
        changed = False
        for (a, b) in list(rel):
            for (c, d) in list(rel):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
    return n, rel


@settings(max_examples=80, deadline=None)
@given(preorders(), st.randoms(use_true_random=False))
def test_preorder_categories_are_categories_and_equivalent_to_shuffles(data, rnd):
    n, rel = data
    C = validate_category(preorder_category(range(n), lambda x, y: (x, y) in rel))
    perm = list(range(n))
    rnd.shuffle(perm)
    D = validate_category(preorder_category([f"o{perm[i]}" for i in range(n)],
                                            lambda x, y: (perm.index(int(x[1:])), perm.index(int(y[1:]))) in rel))
    w = search_equivalence(C, D)
    assert w and w.verify()
