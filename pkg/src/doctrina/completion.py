"""Free constructions on doctrines.

Existential completion along a left class, the Grothendieck category of a
doctrine, comprehension completion, extensional reflection, the category of
predicates, comprehension search, and the comparison morphisms into weak
subobject doctrines.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .doctrine import (Doctrine, DoctrineMorphism, NotALeftClass, check_lambda_existential,
                       find_elementary_structure, identity_functor, restrict_subdoctrine,
                       weak_subobjects_doctrine)
from .errors import (AmbiguousComprehension, DoctrinaError, MissingStructure, NoAdjoint,
                     NonCommuting, NotACongruence, SizeCap)
from .fincat import (ChosenStructure, FinCategory, FunctorData, LeftClass, all_morphisms,
                     quotient_category, validate_category, verify_left_class)
from .order import MonotoneMap, validate_semilattice

DEFAULT_FIBRE_CAP = 4096

__all__ = [
    "Completion", "DoctrineMorphism", "GrothCategory", "existential_completion", "groth_category",
    "comprehension_completion", "extensional_reflection", "predicates_category", "predicates",
    "find_comprehension", "check_comprehension_properties", "build_comparison_groth",
    "build_comparison_pred",
]


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}
        self.rank = {x: i for i, x in enumerate(items)}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return
        # the earlier-listed root wins, so roots are the least members
        if self.rank[rx] < self.rank[ry]:
            self.parent[ry] = rx
        else:
            self.parent[rx] = ry


@dataclass
class Completion:
    """Output of :func:`existential_completion`.

    Elements of ``doctrine`` are canonical pairs ``(arrow, element)``.
    """
    source: Doctrine
    cls: LeftClass
    doctrine: Doctrine
    unit: DoctrineMorphism
    counit: DoctrineMorphism | None
    canon: dict
    meet_formula_checked: int = 0

    def eta(self, A, x):
        return self.unit(A, x)

    def post(self, f, pair):
        """∃ along a class arrow, as post-composition."""
        g, x = pair
        return self.canon[self.source.base.tgt(f)][self.source.base.compose(f, g), x]


def _require_left_class(C, S, lam):
    report = verify_left_class(C, S, lam)
    if not report.ok:
        missing = [c for c in report.counterexamples if c[0] == "missing pullback"]
        if missing:
            raise MissingStructure("pullback", *missing[0][1])
        raise NotALeftClass(report)


def existential_completion(P, lam, cap=DEFAULT_FIBRE_CAP, name=""):
    """Freely add left adjoints along the arrows of ``lam`` to ``P``.

    Fibres are quotients of the pairs (g, x) with g in ``lam`` by mutual
    factorization; the least pair of each class represents it. The counit is
    emitted only when ``P`` already has Λ-existential structure.
    """
    C, S = P.base, P.structure
    _require_left_class(C, S, lam)
    lam_sorted = [m for m in C.morphisms if m in set(lam)]
    raw = {A: [(g, x) for g in lam_sorted if C.tgt(g) == A for x in P.fibres[C.src(g)]] for A in C.objects}
    biggest = max(len(v) for v in raw.values())
    if biggest > cap:
        raise SizeCap("completion fibre", biggest, cap)

    def leq(p, q):
        (h, a), (f, c) = p, q
        LB = P.fibres[C.src(h)]
        return any(C.compose(f, w) == h and LB.leq(a, P.pull(w, c)) for w in C.hom(C.src(h), C.src(f)))

    fibres, canon = {}, {}
    for A in C.objects:
        pairs = raw[A]
        below = {(p, q): leq(p, q) for p in pairs for q in pairs}
        uf = _UnionFind(pairs)
        for i, p in enumerate(pairs):
            for q in pairs[i + 1:]:
                if below[p, q] and below[q, p]:
                    uf.union(p, q)
        canon[A] = {p: uf.find(p) for p in pairs}
        reps = [p for p in pairs if canon[A][p] == p]
        order = [(p, q) for p in reps for q in reps if p != q and below[p, q]]
        fibres[A] = validate_semilattice(reps, order, name=f"{P.name}^{getattr(lam, 'name', 'L')}({A})")
    checked = 0
    for A in C.objects:
        F = fibres[A]
        for (h, a) in F:
            for (f, c) in F:
                try:
                    Q, lh, lf = S.pullback(h, f)
                except MissingStructure:
                    continue
                LQ = P.fibres[Q]
                formula = canon[A][C.compose(h, lh), LQ.meet(P.pull(lh, a), P.pull(lf, c))]
                if formula != F.meet((h, a), (f, c)):
                    raise DoctrinaError(f"pullback meet formula disagrees at {(h, a)!r}, {(f, c)!r}")
                checked += 1
    reindex = {}
    for k in C.morphisms:
        A2, A = C.src(k), C.tgt(k)
        table = {}
        for (g, x) in fibres[A]:
            _, g_leg, k_leg = S.pullback(g, k)
            table[g, x] = canon[A2][k_leg, P.pull(g_leg, x)]
        reindex[k] = MonotoneMap(fibres[A], fibres[A2], table)
    Q = Doctrine(C, fibres, reindex, S, name=name or f"{P.name}^{getattr(lam, 'name', 'L')}")
    unit = DoctrineMorphism(P, Q, identity_functor(C),
                            {A: MonotoneMap(P.fibres[A], fibres[A], {x: canon[A][C.identity(A), x] for x in P.fibres[A]},
                                            name="eta") for A in C.objects})
    for A in C.objects:
        e = unit.components[A]
        if not (e.is_order_embedding and e.preserves_meets and e.preserves_top):
            raise DoctrinaError(f"unit is not a meet-preserving embedding at {A!r}")
    if not unit.is_natural:
        raise DoctrinaError(f"unit is not natural: {unit.naturality_failures()[0]!r}")
    counit = None
    if check_lambda_existential(P, lam).holds:
        counit = DoctrineMorphism(Q, P, identity_functor(C),
                                  {A: MonotoneMap(fibres[A], P.fibres[A],
                                                  {(g, x): P.exists(g)(x) for (g, x) in fibres[A]}, name="epsilon")
                                   for A in C.objects})
    comp = Completion(P, lam, Q, unit, counit, canon, checked)
    laws = unit_counit_laws(comp)
    if laws is not None and not all(laws):
        raise DoctrinaError(f"unit/counit laws fail: {laws!r}")
    return comp


def unit_counit_laws(comp):
    """(ε∘η = id, id ≤ η∘ε) on every fibre; None when no counit was emitted."""
    if comp.counit is None:
        return None
    P, Q = comp.source, comp.doctrine
    left = all(comp.counit(A, comp.unit(A, x)) == x for A, x in P.elements())
    right = all(Q.fibres[A].leq(e, comp.unit(A, comp.counit(A, e))) for A, e in Q.elements())
    return left, right


# Grothendieck category

class LiftedStructure(ChosenStructure):
    """Products and pullbacks of a Grothendieck category computed from the base."""

    def __init__(self, groth, P):
        super().__init__(groth, search=False)
        self.P = P

    def _obj(self, A, x):
        return (A, x)

    def _arr(self, f, s, t):
        return (f, s, t)

    def terminal(self):
        T = self.P.structure.terminal()
        return (T, self.P.top(T))

    def product(self, X, Y):
        key = (X, Y)
        if key not in self._products:
            (A, a), (B, b) = X, Y
            AB, p1, p2 = self.P.structure.product(A, B)
            L = self.P.fibres[AB]
            V = (AB, L.meet(self.P.pull(p1, a), self.P.pull(p2, b)))
            self._products[key] = (V, (p1, V, X), (p2, V, Y))
        return self._products[key]

    def pullback(self, f, g):
        key = (f, g)
        if key not in self._pullbacks:
            (bf, X, _), (bg, Y, _) = f, g
            Q, lf, lg = self.P.structure.pullback(bf, bg)
            L = self.P.fibres[Q]
            V = (Q, L.meet(self.P.pull(lf, X[1]), self.P.pull(lg, Y[1])))
            self._pullbacks[key] = (V, (lf, V, X), (lg, V, Y))
        return self._pullbacks[key]

    def mediate(self, span, x1, x2):
        V, p1, p2 = span
        base = self.P.structure.mediate((V[0], p1[0], p2[0]), x1[0], x2[0])
        return (base, x1[1], V)


@dataclass
class GrothCategory:
    """Pairs (A, x) with base arrows f satisfying x ≤ P_f(y), plus the forgetful functor."""
    category: FinCategory
    forget: FunctorData
    structure: LiftedStructure
    doctrine: Doctrine


def groth_category(P, cap=DEFAULT_FIBRE_CAP):
    C = P.base
    objects = [(A, x) for A in C.objects for x in P.fibres[A]]
    if len(objects) > cap:
        raise SizeCap("Grothendieck objects", len(objects), cap)
    mors = []
    for (A, x) in objects:
        for (B, y) in objects:
            for f in C.hom(A, B):
                if P.fibres[A].leq(x, P.pull(f, y)):
                    mors.append(((f, (A, x), (B, y)), (A, x), (B, y)))
    comp = {}
    by_src = {}
    for m, s, t in mors:
        by_src.setdefault(s, []).append(m)
    for f, s, t in mors:
        for g in by_src.get(t, []):
            comp[g, f] = (C.compose(g[0], f[0]), s, g[2])
    ident = {X: (C.identity(X[0]), X, X) for X in objects}
    G = FinCategory(objects, mors, ident, comp, name=f"G({P.name})")
    U = FunctorData(G, C, {X: X[0] for X in objects}, {m: m[0] for m, _, _ in mors})
    return GrothCategory(G, U, LiftedStructure(G, P), P)


def comprehension_completion(P, groth=None):
    """Fibre over (A, a) is the elements below a; reindexing is P_f(-) ∧ b."""
    G = groth or groth_category(P)
    fibres = {X: P.fibres[X[0]].principal_downset(X[1]) for X in G.category.objects}
    reindex = {}
    for m in G.category.morphisms:
        f, (B, b), (A, a) = m
        LB = P.fibres[B]
        reindex[m] = MonotoneMap(fibres[(A, a)], fibres[(B, b)], {c: LB.meet(P.pull(f, c), b) for c in fibres[(A, a)]})
    Pc = Doctrine(G.category, fibres, reindex, G.structure, name=f"{P.name}_c")
    Pc.groth = G
    return Pc


# extensional reflection

@dataclass
class Extensional:
    source: Doctrine
    doctrine: Doctrine
    quotient: FunctorData
    rep: dict
    delta: dict

    @property
    def category(self):
        return self.doctrine.base


def extensional_reflection(P, witness=None):
    """Identify parallel f, g whenever ⊤ ≤ P_⟨f,g⟩(δ); the doctrine descends to the quotient."""
    C, S = P.base, P.structure
    w = witness or find_elementary_structure(P)
    if w is None:
        raise MissingStructure("equality predicates", P.name)
    rep = {}
    for A in C.objects:
        for B in C.objects:
            ms = C.hom(A, B)
            if len(ms) < 2:
                for m in ms:
                    rep[m] = m
                continue
            if B not in w.delta:
                raise MissingStructure("equality predicate", B)
            top = P.top(A)

            def related(f, g):
                return P.pull(S.pair(f, g), w.delta[B]) == top

            for f in ms:
                if not related(f, f):
                    raise NotACongruence(("not reflexive", f))
            for f in ms:
                for g in ms:
                    if related(f, g) != related(g, f):
                        raise NotACongruence(("not symmetric", f, g))
            uf = _UnionFind(list(ms))
            for i, f in enumerate(ms):
                for g in ms[i + 1:]:
                    if related(f, g):
                        uf.union(f, g)
            for f in ms:
                for g in ms:
                    if uf.find(f) == uf.find(g) and not related(f, g):
                        raise NotACongruence(("not transitive", f, g))
            for m in ms:
                rep[m] = uf.find(m)
    for g, f in C.composable_pairs():
        gf = rep[C.compose(g, f)]
        if rep[C.compose(rep[g], rep[f])] != gf:
            raise NotACongruence(("composition", g, f))
    for m in C.morphisms:
        if P.reindex[m].table != P.reindex[rep[m]].table:
            raise NotACongruence(("doctrine does not descend", m, rep[m]))
    Q = quotient_category(C, rep, name=f"X({C.name})")
    tabled = {}
    for A in C.objects:
        for B in C.objects:
            if S.has_product(A, B):
                V, p1, p2 = S.product(A, B)
                tabled[A, B] = (V, rep[p1], rep[p2])
    SQ = ChosenStructure(Q, products=tabled)
    from .fincat import validate_structure
    for problem in validate_structure(SQ):
        SQ._products.pop(problem[1], None)
    reindex = {m: P.reindex[m] for m in Q.morphisms}
    D = Doctrine(Q, P.fibres, reindex, SQ, name=f"X({P.name})")
    F = FunctorData(C, Q, {A: A for A in C.objects}, dict(rep))
    return Extensional(P, D, F, rep, dict(w.delta))


def predicates(P):
    """Extensional reflection of the comprehension completion."""
    return extensional_reflection(comprehension_completion(P))


def predicates_category(P):
    return validate_category(predicates(P).category)


# comprehensions

def _factorizations(C, m, f):
    return [k for k in C.hom(C.src(f), C.src(m)) if C.compose(m, k) == f]


def comprehension_kind(P, m, alpha):
    """'strict', 'weak' or None for the arrow ``m`` as a comprehension of ``alpha``."""
    C = P.base
    A = C.tgt(m)
    if P.pull(m, alpha) != P.top(C.src(m)):
        return None
    strict = True
    for f in C.arrows_into(A):
        if P.pull(f, alpha) != P.top(C.src(f)):
            continue
        ks = _factorizations(C, m, f)
        if not ks:
            return None
        if len(ks) > 1:
            strict = False
    return "strict" if strict else "weak"


def find_comprehension(P, A, alpha, weak=False):
    """Lowest-id comprehension of ``alpha`` in P(A), or None.

    With ``weak`` the uniqueness of factorizations is dropped.
    """
    C = P.base
    found = [m for m in C.arrows_into(A) if comprehension_kind(P, m, alpha) in (("strict", "weak") if weak else ("strict",))]
    if not found:
        return None
    if not weak:
        m0 = found[0]
        for m in found[1:]:
            if not any(C.is_iso(i) and C.compose(m0, i) == m for i in C.hom(C.src(m), C.src(m0))):
                raise AmbiguousComprehension(alpha, [m0, m])
    return found[0]


@dataclass
class ComprehensionReport:
    has_all: bool
    has_all_weak: bool
    full: bool | None
    full_weak: bool | None
    composable: bool | None
    diagonals: bool | None
    diagonals_weak: bool | None
    comprehensions: dict = field(default_factory=dict)
    comprehension_class: frozenset = frozenset()
    witnesses: dict = field(default_factory=dict)

    @property
    def m_variational(self):
        return bool(self.has_all and self.full and self.diagonals)


def _full(P, comp):
    C = P.base
    for (A, a), ma in comp.items():
        for (B, b), mb in comp.items():
            if A != B:
                continue
            factors = any(C.compose(mb, k) == ma for k in C.hom(C.src(ma), C.src(mb)))
            if factors and not P.fibres[A].leq(a, b):
                return False, (A, a, b)
    return True, None


def check_comprehension_properties(P, witness=None):
    """Strict and weak verdicts for existence, fullness, composability and diagonals."""
    C = P.base
    strict, weak = {}, {}
    for A, a in P.elements():
        m = find_comprehension(P, A, a)
        if m is not None:
            strict[A, a] = m
        mw = find_comprehension(P, A, a, weak=True)
        if mw is not None:
            weak[A, a] = mw
    total = len(P.elements())
    has_all, has_all_weak = len(strict) == total, len(weak) == total
    wit = {}
    full, bad = _full(P, strict) if has_all else (None, None)
    if bad:
        wit["full"] = bad
    full_weak, bad = _full(P, weak) if has_all_weak else (None, None)
    if bad:
        wit["full_weak"] = bad
    cls = frozenset(m for m in C.morphisms
                    for a in P.fibres[C.tgt(m)] if comprehension_kind(P, m, a) == "strict")
    composable = None
    if has_all:
        composable = True
        for (A, a), ma in strict.items():
            X = C.src(ma)
            for b in P.fibres[X]:
                mb = strict[X, b]
                comp = C.compose(ma, mb)
                if not any(comprehension_kind(P, comp, g) == "strict" for g in P.fibres[A]):
                    composable = False
                    wit["composable"] = (A, a, b)
                    break
            if not composable:
                break
    diagonals = diagonals_weak = None
    w = witness if witness is not None else _safe_elementary(P)
    if w is not None and w.delta:
        diagonals, diagonals_weak = True, True
        for A, d in w.delta.items():
            kind = comprehension_kind(P, P.structure.diagonal(A), d)
            if kind != "strict":
                diagonals = False
                wit.setdefault("diagonals", A)
            if kind is None:
                diagonals_weak = False
    return ComprehensionReport(has_all, has_all_weak, full, full_weak, composable, diagonals, diagonals_weak,
                               strict, cls, wit)


def _safe_elementary(P):
    try:
        return find_elementary_structure(P)
    except DoctrinaError:
        return None


def comprehension_class(P):
    """Arrows that are strict comprehensions of some element, as a left-class candidate."""
    rep = check_comprehension_properties(P)
    return LeftClass(rep.comprehension_class, name="comprehensions")


# comparison morphisms

@dataclass
class ComparisonResult:
    verdict: bool | None
    psi: Doctrine | None
    morphism: DoctrineMorphism | None
    per_object: dict
    witness: object = None
    extras: dict = field(default_factory=dict)

    def __bool__(self):
        return bool(self.verdict)


def _exists_map(P, A, pairs):
    """[g: (B,b) -> (A,-)] ↦ ∃_g(b) over the listed class representatives."""
    out = {}
    for g, b in pairs:
        out[g, b] = P.exists(g)(b)
    return out


def build_comparison_groth(P, selection, lam):
    """Compare P with Λ-weak subobjects over the Grothendieck category of the selection.

    The verdict is true iff each fibre map P(A) -> Ψ(A, ⊤) is an order isomorphism.
    """
    C = P.base
    sub, _ = restrict_subdoctrine(P, selection)
    G = groth_category(sub)
    lifted = LeftClass((m for m in G.category.morphisms if m[0] in set(lam)), name=f"U^-1({getattr(lam, 'name', '')})")
    psi = weak_subobjects_doctrine(G.category, G.structure, lifted, name=f"Psi_U({P.name})")
    per, witness, comps = {}, None, {}
    for A in C.objects:
        X = (A, P.top(A))
        fib = psi.fibres[X]
        try:
            table = {e: P.exists(e[0])(e[1][1]) for e in fib}
        except NoAdjoint as exc:
            per[A] = False
            witness = witness or (A, "no left adjoint", exc.pair)
            continue
        n = MonotoneMap(fib, P.fibres[A], table, name="n")
        per[A] = n.is_order_iso
        if per[A]:
            comps[A] = n.inverse()
        elif witness is None:
            if not n.is_surjective:
                missing = next(x for x in P.fibres[A] if x not in set(table.values()))
                witness = (A, "not in the image", missing)
            else:
                witness = (A, "not an order embedding", [e for e in fib])
    verdict = all(per.values())
    morphism = None
    if verdict:
        L = FunctorData(C, G.category, {A: (A, P.top(A)) for A in C.objects},
                        {f: (f, (C.src(f), P.top(C.src(f))), (C.tgt(f), P.top(C.tgt(f)))) for f in C.morphisms})
        morphism = DoctrineMorphism(P, psi, L, comps)
        if not morphism.is_natural:
            verdict = False
            witness = ("naturality", morphism.naturality_failures()[0])
        for A in C.objects:
            for x in sub.fibres[A]:
                arrow = (C.identity(A), (A, x), (A, P.top(A)))
                if not _same_class(psi, comps[A](x), arrow):
                    raise NonCommuting("l-bar after iota vs l", (A, x))
    return ComparisonResult(verdict, psi, morphism, per, witness)


def _same_class(psi, r, arrow):
    G = psi.base

    def below(f, g):
        return any(G.compose(g, w) == f for w in G.hom(G.src(f), G.src(g)))

    return below(r, arrow) and below(arrow, r)


def _pcx_on(P, ext):
    """P_c of ``P`` transported to the predicates category ``ext`` of a subdoctrine."""
    Q = ext.category
    fibres = {X: P.fibres[X[0]].principal_downset(X[1]) for X in Q.objects}
    reindex = {}
    for m in Q.morphisms:
        f, (B, b), (A, a) = m
        LB = P.fibres[B]
        reindex[m] = MonotoneMap(fibres[(A, a)], fibres[(B, b)], {c: LB.meet(P.pull(f, c), b) for c in fibres[(A, a)]})
    return Doctrine(Q, fibres, reindex, ext.doctrine.structure, name=f"{P.name}_cx")


def build_comparison_pred(P, selection):
    """Compare P with weak subobjects over the predicates category of an elementary selection."""
    sub, _ = restrict_subdoctrine(P, selection)
    if find_elementary_structure(sub) is None:
        return ComparisonResult(None, None, None, {}, witness="selection is not elementary")
    ext = predicates(sub)
    Prd = ext.category
    try:
        psi = weak_subobjects_doctrine(Prd, ext.doctrine.structure, all_morphisms(Prd), name=f"Psi(Prd({sub.name}))")
    except (MissingStructure, NotALeftClass) as exc:
        return ComparisonResult(None, None, None, {}, witness=("predicates category lacks pullbacks", str(exc)))
    pcx = _pcx_on(P, ext)
    per, witness, comps = {}, None, {}
    for X in Prd.objects:
        fib = psi.fibres[X]
        try:
            table = {g: P.exists(g[0])(g[1][1]) for g in fib}
        except NoAdjoint as exc:
            return ComparisonResult(None, psi, None, per, witness=("no left adjoint", X, exc.pair))
        n = MonotoneMap(fib, pcx.fibres[X], table, name="n")
        per[X] = n.is_order_iso
        if per[X]:
            comps[X] = n.inverse()
        elif witness is None:
            witness = (X, f"{len(fib)} weak subobjects vs {len(pcx.fibres[X])} predicates")
    verdict = all(per.values())
    morphism = None
    if verdict:
        morphism = DoctrineMorphism(pcx, psi, identity_functor(Prd), comps)
        if not morphism.is_natural:
            verdict, witness = False, ("naturality", morphism.naturality_failures()[0])
    from .analysis import check_choice_rules
    props = check_comprehension_properties(pcx)
    choice = check_choice_rules(pcx, None)
    extras = {"weak_comprehensions": props.has_all_weak, "comprehensive_diagonals": props.diagonals_weak,
              "rule_of_choice": choice.rc}
    return ComparisonResult(verdict, psi, morphism, per, witness, extras)
