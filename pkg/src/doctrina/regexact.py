"""Relations in elementary existential doctrines, and the regular and exact completions.

Arrows of Reg(P) and T_P are literal fibre elements; ids are triples
``(source object, target object, element)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .completion import groth_category, predicates
from .doctrine import (DoctrineMorphism, find_elementary_structure, m_subobjects_doctrine,
                       restrict_subdoctrine, weak_subobjects_doctrine)
from .errors import DoctrinaError, IncompleteComposition, MissingStructure, NoAdjoint, SizeCap
from .fincat import (ChosenStructure, FinCategory, FunctorData, all_morphisms, is_mono,
                     validate_category, witness_from_functor)

DEFAULT_OBJECT_CAP = 4096


class Relations:
    """Relational calculus of an elementary existential doctrine.

    Triple products are taken as (A×B)×C with the chosen products.
    """

    def __init__(self, P, witness=None):
        self.P = P
        self.S = P.structure
        self.C = P.base
        w = witness if witness is not None else find_elementary_structure(P)
        if w is None:
            raise MissingStructure("equality predicates", P.name)
        self.delta = w.delta
        self._triples = {}

    def product(self, A, B):
        return self.S.product(A, B)

    def eq(self, B):
        if B not in self.delta:
            raise MissingStructure("equality predicate", B)
        return self.delta[B]

    def triple(self, A, B, C):
        """(T, pair12, pair13, pair23) with each pair an arrow from T into the binary product."""
        key = (A, B, C)
        if key not in self._triples:
            S, K = self.S, self.C
            AB, p1, p2 = S.product(A, B)
            T, q1, q2 = S.product(AB, C)
            t1, t2, t3 = K.compose(p1, q1), K.compose(p2, q1), q2
            self._triples[key] = (T, q1, S.pair(t1, t3), S.pair(t2, t3), (t1, t2, t3))
        return self._triples[key]

    def swap(self, A, B):
        """⟨pr2, pr1⟩: A×B -> B×A."""
        AB, p1, p2 = self.S.product(A, B)
        return self.S.pair(p2, p1)

    def entire(self, A, B, phi, alpha=None):
        P = self.P
        AB, p1, _ = self.product(A, B)
        a = P.top(A) if alpha is None else alpha
        return P.fibres[A].leq(a, P.exists(p1)(phi))

    def functional(self, A, B, phi):
        P = self.P
        T, f12, f13, f23, _ = self.triple(A, B, B)
        L = P.fibres[T]
        return L.leq(L.meet(P.pull(f12, phi), P.pull(f13, phi)), P.pull(f23, self.eq(B)))

    def compose(self, A, B, C, phi, psi):
        """Relational composite ∃_⟨1,3⟩(P_⟨1,2⟩φ ∧ P_⟨2,3⟩ψ) of φ ⊆ A×B and ψ ⊆ B×C."""
        P = self.P
        T, f12, f13, f23, _ = self.triple(A, B, C)
        L = P.fibres[T]
        return P.exists(f13)(L.meet(P.pull(f12, phi), P.pull(f23, psi)))

    def identity(self, A, alpha=None):
        P = self.P
        AA, p1, _ = self.product(A, A)
        d = self.eq(A)
        return d if alpha is None else P.fibres[AA].meet(d, P.pull(p1, alpha))

    def restrict(self, A, B, alpha, beta):
        """P_pr1(α) ∧ P_pr2(β) in P(A×B)."""
        P = self.P
        AB, p1, p2 = self.product(A, B)
        return P.fibres[AB].meet(P.pull(p1, alpha), P.pull(p2, beta))

    def graph(self, f):
        """P_{f×id}(δ_B) for f: A -> B."""
        K, S = self.C, self.S
        A, B = K.src(f), K.tgt(f)
        AB, p1, p2 = S.product(A, B)
        return self.P.pull(S.pair(K.compose(f, p1), p2), self.eq(B))


@dataclass
class RelationFlags:
    entire: bool
    functional: bool
    mono_check: bool | None = None


def relation_properties(P, phi, source, target, witness=None):
    """Entire and functional flags for φ between objects (A, α) and (B, β) of the comprehension completion.

    When ``P`` has a comprehension of φ, functionality is cross-checked
    against the monicity of pr_A composed with it.
    """
    R = Relations(P, witness)
    (A, a), (B, _) = source, target
    flags = RelationFlags(R.entire(A, B, phi, a), R.functional(A, B, phi))
    from .completion import find_comprehension
    try:
        m = find_comprehension(P, R.product(A, B)[0], phi)
    except DoctrinaError:
        m = None
    if m is not None:
        flags.mono_check = is_mono(P.base, P.base.compose(R.product(A, B)[1], m))
    return flags


def relational_compose(P, A, B, C, phi, psi, witness=None):
    return Relations(P, witness).compose(A, B, C, phi, psi)


# Reg(P)

def _category_from_arrows(objects, arrows, identity, compose, name):
    """Assemble a FinCategory from arrow lists; ``compose`` maps two arrows to an element."""
    mors = []
    by_pair = {}
    for X, Y, phi in arrows:
        mors.append(((X, Y, phi), X, Y))
        by_pair.setdefault((X, Y), set()).add(phi)
    comp = {}
    for f in [m for m, _, _ in mors]:
        X, Y, phi = f
        for g in [m for m, s, _ in mors if s == Y]:
            _, Z, psi = g
            h = compose(X, Y, Z, phi, psi)
            if h not in by_pair.get((X, Z), ()):
                raise IncompleteComposition((g, f), f"relational composite {h!r} is not an arrow")
            comp[g, f] = (X, Z, h)
    ident = {X: (X, X, identity(X)) for X in objects}
    for X in objects:
        if ident[X][2] not in by_pair.get((X, X), ()):
            raise DoctrinaError(f"identity at {X!r} is not an arrow")
    return validate_category(FinCategory(objects, mors, ident, comp, name=name))


def regular_completion(P, witness=None, cap=DEFAULT_OBJECT_CAP):
    """Entire functional relations between objects (A, α) of the Grothendieck category."""
    R = Relations(P, witness)
    objects = [(A, a) for A in P.base.objects for a in P.fibres[A]]
    if len(objects) > cap:
        raise SizeCap("regular completion objects", len(objects), cap)
    arrows = []
    for X in objects:
        (A, a) = X
        for Y in objects:
            (B, b) = Y
            AB = R.product(A, B)[0]
            bound = R.restrict(A, B, a, b)
            L = P.fibres[AB]
            for phi in L:
                if L.leq(phi, bound) and R.entire(A, B, phi, a) and R.functional(A, B, phi):
                    arrows.append((X, Y, phi))
    Reg = _category_from_arrows(objects, arrows, lambda X: R.identity(X[0], X[1]),
                                lambda X, Y, Z, phi, psi: R.compose(X[0], Y[0], Z[0], phi, psi),
                                name=f"Reg({P.name})")
    Reg.relations = R
    Reg.doctrine = P
    return Reg


def reg_lex_direct(D, S=None, name=""):
    """Arrows of D as objects; an arrow g -> f is a class [m] with f m k1 = f m k2 on the kernel pair of g."""
    S = S if S is not None else getattr(D, "structure", None) or ChosenStructure(D)
    objects = list(D.morphisms)
    kernel = {g: S.pullback(g, g) for g in objects}
    mors, rep_of = [], {}
    for g in objects:
        _, k1, k2 = kernel[g]
        for f in objects:
            classes = {}
            for m in D.hom(D.src(g), D.src(f)):
                fm = D.compose(f, m)
                if D.compose(fm, k1) != D.compose(fm, k2):
                    continue
                r = classes.setdefault(fm, m)
                rep_of[g, f, m] = r
            for m in classes.values():
                mors.append(((g, f, m), g, f))
    comp = {}
    for (n_id, f, h) in mors:
        for (m_id, g, f2) in mors:
            if f2 != f:
                continue
            _, _, n = n_id
            _, _, m = m_id
            nm = D.compose(n, m)
            comp[n_id, m_id] = (g, h, rep_of[g, h, nm])
    ident = {g: (g, g, rep_of[g, g, D.identity(D.src(g))]) for g in objects}
    return validate_category(FinCategory(objects, mors, ident, comp, name=name or f"{D.name}_reg/lex"))


# T_P

@dataclass(frozen=True)
class PERObject:
    carrier: object
    relation: object


def is_per(R, A, rho):
    P = R.P
    AA = R.product(A, A)[0]
    L = P.fibres[AA]
    if not L.leq(rho, P.pull(R.swap(A, A), rho)):
        return False
    T, f12, f13, f23, _ = R.triple(A, A, A)
    LT = P.fibres[T]
    return LT.leq(LT.meet(P.pull(f12, rho), P.pull(f23, rho)), P.pull(f13, rho))


def is_tp_arrow(R, A, rho, B, sigma, phi):
    """Conditions (i)-(v) for φ: (A, ρ) -> (B, σ), as a tuple of booleans."""
    P, S = R.P, R.S
    AB, p1, p2 = R.product(A, B)
    L = P.fibres[AB]
    d1 = S.pair(p1, p1)
    d2 = S.pair(p2, p2)
    c1 = L.leq(phi, L.meet(P.pull(d1, rho), P.pull(d2, sigma)))
    T, f12, f13, f23, _ = R.triple(A, A, B)
    LT = P.fibres[T]
    # f12 lands in A×A, f13 and f23 in A×B
    c2 = LT.leq(LT.meet(P.pull(f12, rho), P.pull(f13, phi)), P.pull(f23, phi))
    T2, g12, g13, g23, _ = R.triple(A, B, B)
    LT2 = P.fibres[T2]
    c3 = LT2.leq(LT2.meet(P.pull(g23, sigma), P.pull(g12, phi)), P.pull(g13, phi))
    c4 = LT2.leq(LT2.meet(P.pull(g12, phi), P.pull(g13, phi)), P.pull(g23, sigma))
    c5 = P.fibres[A].leq(P.pull(S.diagonal(A), rho), P.exists(p1)(phi))
    return c1, c2, c3, c4, c5


def exact_completion(P, witness=None, cap=DEFAULT_OBJECT_CAP):
    """Partial equivalence relations and the relations satisfying (i)-(v) between them."""
    R = Relations(P, witness)
    objects = []
    for A in P.base.objects:
        AA = R.product(A, A)[0]
        for rho in P.fibres[AA]:
            if is_per(R, A, rho):
                objects.append(PERObject(A, rho))
                if len(objects) > cap:
                    raise SizeCap("exact completion objects", len(objects), cap)
    arrows = []
    for X in objects:
        for Y in objects:
            AB = R.product(X.carrier, Y.carrier)[0]
            for phi in P.fibres[AB]:
                if all(is_tp_arrow(R, X.carrier, X.relation, Y.carrier, Y.relation, phi)):
                    arrows.append((X, Y, phi))
    T = _category_from_arrows(objects, arrows, lambda X: X.relation,
                              lambda X, Y, Z, phi, psi: R.compose(X.carrier, Y.carrier, Z.carrier, phi, psi),
                              name=f"T({P.name})")
    T.relations = R
    T.doctrine = P
    return T


def subobject_doctrine_of(C, name=""):
    """Sub over a finite category with searched limits."""
    S = getattr(C, "structure", None) or ChosenStructure(C)
    return m_subobjects_doctrine(C, S, name=name or f"Sub({C.name})")


def ex_reg(A):
    """Exact completion of a regular category as T of its subobject doctrine."""
    return exact_completion(subobject_doctrine_of(A))


def ex_lex(D):
    """Exact completion of a lex category, computed as T of its weak subobjects."""
    S = getattr(D, "structure", None) or ChosenStructure(D)
    return exact_completion(weak_subobjects_doctrine(D, S, all_morphisms(D)))


# comparison functors

@dataclass
class FunctorVerdict:
    verdict: bool
    functor: FunctorData | None
    source: FinCategory | None
    target: FinCategory | None
    witness: object = None
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return bool(self.verdict)


def _weak_subobjects_over(P, sel, mode):
    sub, _ = restrict_subdoctrine(P, sel)
    if mode == "groth":
        G = groth_category(sub)
        return weak_subobjects_doctrine(G.category, G.structure, all_morphisms(G.category),
                                        name=f"Psi(G({sub.name}))")
    if mode == "pure":
        ext = predicates(sub)
        return weak_subobjects_doctrine(ext.category, ext.doctrine.structure, all_morphisms(ext.category),
                                        name=f"Psi(Prd({sub.name}))")
    raise ValueError(mode)


def _n_map(P, psi):
    """n on Ψ over a Grothendieck-type base: [g: (B, β) -> (A, α)] ↦ ∃_g(β) in P(A)."""
    def n(X, cls):
        base_arrow, (_, beta), _ = cls
        return P.exists(base_arrow)(beta)
    return n


def _product_carrier(psi, X, Y):
    return psi.structure.product(X, Y)[0]


def _verdict_from_functor(F, source, target):
    if not F.is_functor:
        return FunctorVerdict(False, F, source, target, witness=("not a functor", F.failures()[:1]))
    not_full, not_faithful = F.hom_map_defects()
    missing = F.essential_image_defects()
    details = {"full": not not_full, "faithful": not not_faithful, "essentially_surjective": not missing}
    if not_full:
        return FunctorVerdict(False, F, source, target, ("not full", not_full[0]), details)
    if not_faithful:
        return FunctorVerdict(False, F, source, target, ("not faithful", not_faithful[0]), details)
    if missing:
        return FunctorVerdict(False, F, source, target, ("not essentially surjective", missing[0]), details)
    details["certificate"] = witness_from_functor(F) is not None
    return FunctorVerdict(True, F, source, target, None, details)


def build_reg_functor(P, selection, mode="groth"):
    """Reg(N, n): Reg(Ψ over the Grothendieck category of the selection) -> Reg(P), checked directly.

    ``mode="pure"`` uses the predicates category of the selection instead.
    """
    psi = _weak_subobjects_over(P, selection, mode)
    try:
        source = regular_completion(psi)
        target = regular_completion(P)
    except DoctrinaError as exc:
        return FunctorVerdict(False, None, None, None, ("construction failed", str(exc)))
    n = _n_map(P, psi)
    obj_map, mor_map = {}, {}
    try:
        for X in source.objects:
            (G, cls) = X
            obj_map[X] = (G[0], n(G, cls))
        for m in source.morphisms:
            X, Y, phi = m
            carrier = _product_carrier(psi, X[0], Y[0])
            mor_map[m] = (obj_map[X], obj_map[Y], n(carrier, phi))
    except NoAdjoint as exc:
        return FunctorVerdict(False, None, source, target, ("no left adjoint", exc.pair))
    bad = [m for m in source.morphisms if mor_map[m] not in target.mor_index]
    bad_obj = [X for X in source.objects if obj_map[X] not in target.obj_index]
    if bad_obj or bad:
        return FunctorVerdict(False, None, source, target,
                              ("image is not in Reg(P)", bad_obj[0] if bad_obj else bad[0]))
    return _verdict_from_functor(FunctorData(source, target, obj_map, mor_map), source, target)


def build_exact_functor(P, selection, mode="groth"):
    """Ex(N, n): T of Ψ over the selection's Grothendieck (or predicates) category -> T_P."""
    psi = _weak_subobjects_over(P, selection, mode)
    try:
        source = exact_completion(psi)
        target = exact_completion(P)
    except DoctrinaError as exc:
        return FunctorVerdict(False, None, None, None, ("construction failed", str(exc)))
    n = _n_map(P, psi)
    obj_map, mor_map = {}, {}
    try:
        for X in source.objects:
            G = X.carrier
            obj_map[X] = PERObject(G[0], n(_product_carrier(psi, G, G), X.relation))
        for m in source.morphisms:
            X, Y, phi = m
            mor_map[m] = (obj_map[X], obj_map[Y], n(_product_carrier(psi, X.carrier, Y.carrier), phi))
    except NoAdjoint as exc:
        return FunctorVerdict(False, None, source, target, ("no left adjoint", exc.pair))
    bad_obj = [X for X in source.objects if obj_map[X] not in target.obj_index]
    bad = [m for m in source.morphisms if mor_map[m] not in target.mor_index]
    if bad_obj or bad:
        return FunctorVerdict(False, None, source, target,
                              ("image is not in T_P", bad_obj[0] if bad_obj else bad[0]))
    return _verdict_from_functor(FunctorData(source, target, obj_map, mor_map), source, target)


def sub_fibre_recovery(P, Reg=None):
    """Per object A: is Sub of Reg(P) at (A, ⊤) order-isomorphic to P(A)?"""
    from .order import is_order_isomorphic
    Reg = Reg if Reg is not None else regular_completion(P)
    Reg.structure = ChosenStructure(Reg)
    sub = subobject_doctrine_of(Reg)
    return {A: is_order_isomorphic(sub.fibres[(A, P.top(A))], P.fibres[A]) is not None for A in P.base.objects}
