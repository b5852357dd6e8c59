import pytest

from doctrina import pack
from doctrina.analysis import doctrine_equivalence
from doctrina.completion import (build_comparison_groth, build_comparison_pred, check_comprehension_properties,
                                 comprehension_completion, existential_completion, extensional_reflection,
                                 groth_category, predicates_category, unit_counit_laws)
from doctrina.doctrine import (all_selection, check_lambda_existential, find_elementary_structure, tops_selection,
                               trivial_doctrine, weak_subobjects_doctrine)
from doctrina.errors import MissingStructure, SizeCap
from doctrina.fincat import all_morphisms, identities, projections
from doctrina.order import is_order_isomorphic


def test_trivial_completion_is_weak_subobjects():
    C = pack.base("C2")
    comp = existential_completion(trivial_doctrine(C, C.structure), all_morphisms(C))
    psi = weak_subobjects_doctrine(C, C.structure)
    for A in C.objects:
        assert is_order_isomorphic(comp.doctrine.fibres[A], psi.fibres[A]) is not None
    assert doctrine_equivalence(comp.doctrine, psi) is not None


def test_completion_along_identities_is_trivial():
    P = pack.doctrine("C2-over-b3")
    comp = existential_completion(P, identities(P.base))
    assert comp.unit.fibrewise_iso


def test_completion_is_existential_and_unit_embeds():
    for name in ("C2-over-a", "C2-constant", "Psi_CH3"):
        P = pack.doctrine(name)
        lam = all_morphisms(P.base)
        comp = existential_completion(P, lam)
        assert check_lambda_existential(comp.doctrine, lam).holds
        for A in P.base.objects:
            assert comp.unit.components[A].is_order_embedding


def test_counit_exists_only_for_existential_sources():
    lam = all_morphisms(pack.base("C2"))
    assert existential_completion(pack.doctrine("C2-over-a"), lam).counit is None
    comp = existential_completion(pack.doctrine("C2-over-b"), lam)
    assert comp.counit is not None
    assert unit_counit_laws(comp) == (True, True)


def test_completion_post_composes():
    P = pack.doctrine("C2-trivial")
    comp = existential_completion(P, all_morphisms(P.base))
    top_a = comp.unit("a", P.top("a"))
    assert comp.post("u", top_a) == ("u", P.top("a"))


def test_completion_respects_cap():
    P = pack.doctrine("Psi_CH3")
    with pytest.raises(SizeCap):
        existential_completion(P, all_morphisms(P.base), cap=2)


def test_truncated_class_is_missing_structure():
    P = pack.doctrine("Pow_FS012")
    with pytest.raises(MissingStructure):
        existential_completion(P, projections(P.base, P.structure))


def test_grothendieck_category_counts():
    P = pack.doctrine("C2-over-b")
    G = groth_category(P)
    assert len(G.category.objects) == 3
    assert all(G.forget(m) in P.base.morphisms for m in G.category.morphisms)


def test_comprehension_completion_fibres_are_downsets():
    P = pack.doctrine("Psi_C2")
    Pc = comprehension_completion(P)
    for (A, a) in Pc.base.objects:
        assert len(Pc.fibres[(A, a)]) == len(P.fibres[A].down(a))


def test_extensional_reflection_of_elementary_doctrine():
    P = pack.doctrine("Psi_CH3")
    ext = extensional_reflection(P)
    assert set(ext.category.objects) == set(P.base.objects)
    assert ext.quotient.is_functor


def test_predicates_category_builds():
    Prd = predicates_category(pack.doctrine("terminal-CH3"))
    assert len(Prd.objects) == 3


def test_comprehensions_of_weak_subobjects():
    P = pack.doctrine("Psi_C2")
    rep = check_comprehension_properties(P, find_elementary_structure(P))
    assert rep.has_all and rep.full and rep.composable and rep.diagonals


def test_comparison_on_a_completion_is_an_iso():
    P = pack.doctrine("C2-trivial")
    lam = all_morphisms(P.base)
    Q = existential_completion(P, lam).doctrine
    res = build_comparison_groth(Q, tops_selection(Q), lam)
    assert res.verdict is True


def test_comparison_fails_for_a_non_completion():
    P = pack.doctrine("C2-over-b3")
    lam = all_morphisms(P.base)
    res = build_comparison_groth(P, tops_selection(P), lam)
    assert res.verdict is False


def test_predicates_comparison_on_own_selection():
    P = pack.doctrine("terminal-CH3")
    res = build_comparison_pred(P, all_selection(P))
    assert res.verdict is True
