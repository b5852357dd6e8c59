"""Doctrines over finite bases, canonical builders and structure detection."""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (AmbiguousDelta, DoctrinaError, MissingStructure, MissingTop, NoAdjoint,
                     NotClosedUnderMeet, NotClosedUnderReindex, NotFunctorial, NotMeetPreserving,
                     NotStableSystem, NotTopPreserving)
from .fincat import (ChosenStructure, FinCategory, FunctorData, all_morphisms, is_mono,
                     projections, terminal_category, verify_left_class)
from .order import (InfSemilattice, MonotoneMap, boolean_lattice, identity_map, left_adjoint_of,
                    power_lattice, validate_semilattice)

TOP = "T"


class NotALeftClass(DoctrinaError):
    def __init__(self, report):
        super().__init__(f"not a left class: {report.counterexamples[:3]!r}")
        self.report = report


class Doctrine:
    """A contravariant assignment of inf-semilattices to the objects of a finite base.

    ``reindex[f]`` maps ``fibre(tgt f)`` to ``fibre(src f)``.
    """

    def __init__(self, base, fibres, reindex, structure=None, name=""):
        self.base = base
        self.structure = structure if structure is not None else ChosenStructure(base)
        self.fibres = dict(fibres)
        self.reindex = dict(reindex)
        self.name = name
        self._exists = {}

    def __repr__(self):
        sizes = ", ".join(f"{A}:{len(self.fibres[A])}" for A in self.base.objects)
        return f"<Doctrine {self.name or ''} over {self.base.name or 'base'} [{sizes}]>"

    def fibre(self, A):
        return self.fibres[A]

    def top(self, A):
        return self.fibres[A].top

    def pull(self, f, x):
        return self.reindex[f].table[x]

    def exists(self, f):
        """Verified left adjoint of reindexing along ``f``; raises :class:`NoAdjoint`."""
        if f not in self._exists:
            try:
                self._exists[f] = left_adjoint_of(self.reindex[f])
            except NoAdjoint as e:
                self._exists[f] = e
        out = self._exists[f]
        if isinstance(out, NoAdjoint):
            raise out
        return out

    def has_exists(self, f):
        try:
            self.exists(f)
            return True
        except NoAdjoint:
            return False

    def elements(self):
        """All (object, element) pairs in canonical order."""
        return [(A, x) for A in self.base.objects for x in self.fibres[A]]

    def size(self):
        return sum(len(self.fibres[A]) for A in self.base.objects)


def validate_doctrine(raw):
    """Check functoriality and meet/top preservation of every reindexing map.

    ``raw`` is a :class:`Doctrine` or a mapping with ``base``, ``fibres``
    (object to semilattice) and ``reindex`` (morphism to table); missing
    identity tables default to identities.
    """
    if isinstance(raw, Doctrine):
        P = raw
    else:
        base, fibres = raw["base"], raw["fibres"]
        reindex = {}
        for f in base.morphisms:
            table = raw["reindex"].get(f)
            if table is None and base.is_identity(f):
                table = {x: x for x in fibres[base.src(f)]}
            if table is None:
                raise NotFunctorial((f, "no reindexing table"))
            reindex[f] = MonotoneMap(fibres[base.tgt(f)], fibres[base.src(f)], table)
        P = Doctrine(base, fibres, reindex, raw.get("structure"), name=raw.get("name", ""))
    C = P.base
    for f in C.morphisms:
        h = P.reindex.get(f)
        if h is None:
            raise NotFunctorial((f, "no reindexing map"))
        dom, cod = P.fibres[C.tgt(f)], P.fibres[C.src(f)]
        if set(h.table) != set(dom.elements) or not set(h.table.values()) <= set(cod.elements):
            raise NotFunctorial((f, "reindexing map has the wrong type"))
        if not h.is_monotone:
            raise NotMeetPreserving(f, ("not monotone",))
        if h.table[dom.top] != cod.top:
            raise NotTopPreserving(f)
        bad = h.meet_failure()
        if bad is not None:
            raise NotMeetPreserving(f, bad)
    for A in C.objects:
        if any(P.pull(C.identity(A), x) != x for x in P.fibres[A]):
            raise NotFunctorial((C.identity(A), "identity"))
    for g, f in C.composable_pairs():
        gf = C.compose(g, f)
        for x in P.fibres[C.tgt(g)]:
            if P.pull(gf, x) != P.pull(f, P.pull(g, x)):
                raise NotFunctorial((g, f))
    return P


def doctrine_from_tables(base, fibres, tables, structure=None, name=""):
    """Doctrine from explicit per-morphism tables, validated."""
    return validate_doctrine({"base": base, "fibres": fibres, "reindex": tables,
                              "structure": structure, "name": name})


def trivial_doctrine(C, S=None, name=""):
    """Singleton fibres everywhere."""
    fibres = {A: validate_semilattice([TOP], [], name="1") for A in C.objects}
    reindex = {f: MonotoneMap(fibres[C.tgt(f)], fibres[C.src(f)], {TOP: TOP}) for f in C.morphisms}
    return Doctrine(C, fibres, reindex, S, name=name or f"Triv({C.name})")


def terminal_doctrine(L, name=""):
    """The doctrine over the one-arrow category with the single fibre ``L``."""
    C = terminal_category()
    return Doctrine(C, {"*": L}, {"id_*": identity_map(L)}, name=name or f"{L.name} over 1")


def _factorization_fibres(C, S, cls):
    """Poset reflection of class members over each object, with reindexing by pullback."""
    cls = set(cls)
    members = {A: [f for f in C.arrows_into(A) if f in cls] for A in C.objects}
    fibres, rep = {}, {}
    for A in C.objects:
        ms = members[A]

        def below(f, g):
            return any(C.compose(g, w) == f for w in C.hom(C.src(f), C.src(g)))

        reps = []
        for f in ms:
            r = next((r for r in reps if below(f, r) and below(r, f)), None)
            if r is None:
                reps.append(f)
                r = f
            rep[f] = r
        pairs = [(f, g) for f in reps for g in reps if f != g and below(f, g)]
        fibres[A] = validate_semilattice(reps, pairs)
    reindex = {}
    for h in C.morphisms:
        A2, A = C.src(h), C.tgt(h)
        table = {}
        for f in fibres[A]:
            _, _, leg = S.pullback(f, h)
            if leg not in rep:
                raise NotStableSystem(("base change leaves the class", f, h, leg))
            table[f] = rep[leg]
        reindex[h] = MonotoneMap(fibres[A], fibres[A2], table)
    return fibres, reindex


def weak_subobjects_doctrine(C, S=None, lam=None, name=""):
    """Arrows of ``lam`` into each object, ordered by factorization, reindexed by pullback."""
    S = S if S is not None else ChosenStructure(C)
    lam = all_morphisms(C) if lam is None else lam
    report = verify_left_class(C, S, lam)
    if not report.ok:
        missing = [c for c in report.counterexamples if c[0] == "missing pullback"]
        if missing:
            raise MissingStructure("pullback", *missing[0][1])
        raise NotALeftClass(report)
    fibres, reindex = _factorization_fibres(C, S, lam)
    return Doctrine(C, fibres, reindex, S, name=name or f"Psi({C.name})")


def m_subobjects_doctrine(C, S=None, M=None, name=""):
    """Subobjects drawn from a stable system ``M`` of monos (all monos by default)."""
    S = S if S is not None else ChosenStructure(C)
    M = set(M) if M is not None else {m for m in C.morphisms if is_mono(C, m)}
    for m in C.morphisms:
        if C.is_iso(m) and m not in M:
            raise NotStableSystem(("iso missing", m))
    for m in sorted(M, key=C.key):
        if not is_mono(C, m):
            raise NotStableSystem(("not monic", m))
    for f in sorted(M, key=C.key):
        for g in C.hom_from(C.tgt(f)):
            if g in M and C.compose(g, f) not in M:
                raise NotStableSystem(("composite", g, f))
    for f in sorted(M, key=C.key):
        for g in C.arrows_into(C.tgt(f)):
            _, _, leg = S.pullback(f, g)
            if leg not in M:
                raise NotStableSystem(("base change", f, g, leg))
    fibres, reindex = _factorization_fibres(C, S, M)
    return Doctrine(C, fibres, reindex, S, name=name or f"Sub({C.name})")


def powerset_doctrine(F, name=""):
    """Subsets of each finite set, reindexed by preimage, over a :class:`FinSetCategory`."""
    fibres = {n: boolean_lattice(range(n), name=f"P({n})") for n in F.objects}
    reindex = {}
    for f in F.morphisms:
        a, b, t = F.src(f), F.tgt(f), F.function(f)
        reindex[f] = MonotoneMap(fibres[b], fibres[a],
                                 {X: frozenset(i for i in range(a) if t[i] in X) for X in fibres[b]})
    return Doctrine(F, fibres, reindex, name=name or f"Pow({F.name})")


def localic_doctrine(L, F, name=""):
    """Functions from each finite set into ``L``, reindexed by precomposition."""
    fibres = {n: power_lattice(L, n, name=f"{L.name}^{n}") for n in F.objects}
    reindex = {}
    for f in F.morphisms:
        a, b, t = F.src(f), F.tgt(f), F.function(f)
        reindex[f] = MonotoneMap(fibres[b], fibres[a], {phi: tuple(phi[t[i]] for i in range(a)) for phi in fibres[b]})
    return Doctrine(F, fibres, reindex, name=name or f"{L.name}^(-)")


def exists_along(P, f):
    return P.exists(f)


# existential structure

@dataclass
class ExistentialReport:
    cls_name: str
    kind: str
    missing_adjoints: list = field(default_factory=list)
    bcc_failures: list = field(default_factory=list)
    fr_failures: list = field(default_factory=list)
    unverifiable: list = field(default_factory=list)
    squares_checked: int = 0

    @property
    def adjoints(self):
        return not self.missing_adjoints

    @property
    def bcc(self):
        return not self.bcc_failures

    @property
    def fr(self):
        return not self.fr_failures

    @property
    def holds(self):
        return self.adjoints and self.bcc and self.fr

    @property
    def status(self):
        if not self.holds:
            return "fail"
        return "unverifiable" if self.unverifiable else "pass"

    def __bool__(self):
        return self.holds


def check_lambda_existential(P, lam, kind=None):
    """Left adjoints along every arrow of ``lam`` with Beck-Chevalley and Frobenius.

    BCC is checked on the chosen pullback of each Λ-arrow along each arrow
    into its codomain; squares whose pullback is missing are listed as
    unverifiable.
    """
    C = P.base
    lam_sorted = sorted(set(lam), key=C.key)
    if kind is None:
        name = getattr(lam, "name", "")
        kind = {"all": "full existential", "projections": "existential"}.get(name, "Λ-existential")
    rep = ExistentialReport(getattr(lam, "name", ""), kind)
    for f in lam_sorted:
        try:
            P.exists(f)
        except NoAdjoint as e:
            rep.missing_adjoints.append((f, e.pair))
    for f in lam_sorted:
        if not P.has_exists(f):
            continue
        E = P.exists(f)
        A, X = C.tgt(f), C.src(f)
        for alpha in P.fibres[A]:
            for beta in P.fibres[X]:
                lhs = E(P.fibres[X].meet(P.pull(f, alpha), beta))
                rhs = P.fibres[A].meet(alpha, E(beta))
                if lhs != rhs:
                    rep.fr_failures.append((f, alpha, beta))
                    break
        for g in C.arrows_into(A):
            try:
                Q, g_leg, f_leg = P.structure.pullback(f, g)
            except MissingStructure:
                rep.unverifiable.append((f, g))
                continue
            if not P.has_exists(f_leg):
                rep.bcc_failures.append((f, g, "no adjoint along the base change"))
                continue
            E2 = P.exists(f_leg)
            rep.squares_checked += 1
            for beta in P.fibres[X]:
                if E2(P.pull(g_leg, beta)) != P.pull(g, E(beta)):
                    rep.bcc_failures.append((f, g, beta))
                    break
    return rep


def check_existential(P):
    return check_lambda_existential(P, projections(P.base, P.structure), kind="existential")


def check_full_existential(P):
    return check_lambda_existential(P, all_morphisms(P.base), kind="full existential")


# elementary structure

@dataclass
class ElementaryWitness:
    delta: dict
    unverified: list = field(default_factory=list)
    e_checked: list = field(default_factory=list)


@dataclass
class ElementarySearch:
    witness: ElementaryWitness | None
    obstruction: object = None


def _delta_candidates(P, A):
    S = P.structure
    AA, p1, p2 = S.product(A, A)
    d = S.diagonal(A)
    FA, FAA = P.fibres[A], P.fibres[AA]
    out = []
    for delta in FAA:
        ok = True
        for a in FA:
            left = FAA.meet(P.pull(p1, a), delta)
            for g in FAA:
                if FAA.leq(left, g) != FA.leq(a, P.pull(d, g)):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(delta)
    return out


def _check_e(P, X, A, delta):
    """Condition on e = ⟨pr1, pr2, pr2⟩: X×A -> X×A×A; returns True/False or None if missing."""
    S, C = P.structure, P.base
    try:
        XA, pX, pA = S.product(X, A)
        T, q1, q2 = S.product(XA, A)
        AA = S.product(A, A)[0]
        e = S.pair(C.identity(XA), pA)
        s = S.pair(C.compose(pA, q1), q2)
    except MissingStructure:
        return None
    FXA, FT = P.fibres[XA], P.fibres[T]
    d_part = P.pull(s, delta)
    for a in FXA:
        left = FT.meet(P.pull(q1, a), d_part)
        for g in FT:
            if FT.leq(left, g) != FXA.leq(a, P.pull(e, g)):
                return False
    return True


def elementary_search(P):
    """Search equality predicates object by object; see :func:`find_elementary_structure`."""
    C = P.base
    delta, unverified, checked = {}, [], []
    for A in C.objects:
        if not P.structure.has_product(A, A):
            unverified.append(("object", A))
            continue
        cands = _delta_candidates(P, A)
        if not cands:
            return ElementarySearch(None, ("condition 1", A))
        if len(cands) > 1:
            raise AmbiguousDelta(A, cands)
        delta[A] = cands[0]
    for A in delta:
        for X in C.objects:
            ok = _check_e(P, X, A, delta[A])
            if ok is None:
                unverified.append(("e-arrow", X, A))
            elif not ok:
                return ElementarySearch(None, ("condition 2", X, A))
            else:
                checked.append((X, A))
    return ElementarySearch(ElementaryWitness(delta, unverified, checked))


def find_elementary_structure(P):
    """Equality predicates δ_A satisfying both adjointness conditions, or None."""
    return elementary_search(P).witness


# subdoctrines and morphisms

@dataclass
class DoctrineMorphism:
    """A base functor with fibre maps b_A: P(A) -> R(F A)."""
    source: Doctrine
    target: Doctrine
    functor: FunctorData
    components: dict

    def __call__(self, A, x):
        return self.components[A].table[x]

    def naturality_failures(self):
        P, R, F = self.source, self.target, self.functor
        out = []
        for f in P.base.morphisms:
            A, B = P.base.src(f), P.base.tgt(f)
            for x in P.fibres[B]:
                if self(A, P.pull(f, x)) != R.pull(F.mor_map[f], self(B, x)):
                    out.append((f, x))
                    break
        return out

    @property
    def is_natural(self):
        return not self.naturality_failures()

    @property
    def preserves_meets(self):
        return all(c.preserves_meets for c in self.components.values())

    @property
    def preserves_tops(self):
        return all(c.preserves_top for c in self.components.values())

    @property
    def fibrewise_iso(self):
        return all(c.is_order_iso for c in self.components.values())

    def non_iso_objects(self):
        return [A for A, c in self.components.items() if not c.is_order_iso]

    def preserves_exists(self, lam):
        """b ∘ ∃_f = ∃_{F f} ∘ b for every f in ``lam`` where both adjoints exist."""
        P, R, F = self.source, self.target, self.functor
        for f in lam:
            if not P.has_exists(f) or not R.has_exists(F.mor_map[f]):
                return False
            A, B = P.base.src(f), P.base.tgt(f)
            for x in P.fibres[A]:
                if self(B, P.exists(f)(x)) != R.exists(F.mor_map[f])(self(A, x)):
                    return False
        return True


def identity_functor(C):
    return FunctorData(C, C, {A: A for A in C.objects}, {m: m for m in C.morphisms})


def restrict_subdoctrine(P, selection, name=""):
    """Full subdoctrine on ``selection`` (object -> elements) with its inclusion."""
    C = P.base
    sel = {A: set(selection.get(A, ())) for A in C.objects}
    for A in C.objects:
        if P.top(A) not in sel[A]:
            raise MissingTop(A)
    for A in C.objects:
        L = P.fibres[A]
        for x in L:
            for y in L:
                if x in sel[A] and y in sel[A] and L.meet(x, y) not in sel[A]:
                    raise NotClosedUnderMeet(A, (x, y))
    for f in C.morphisms:
        for x in P.fibres[C.tgt(f)]:
            if x in sel[C.tgt(f)] and P.pull(f, x) not in sel[C.src(f)]:
                raise NotClosedUnderReindex(f, x)
    fibres = {A: P.fibres[A].restrict(sel[A]) for A in C.objects}
    reindex = {f: MonotoneMap(fibres[C.tgt(f)], fibres[C.src(f)],
                              {x: P.pull(f, x) for x in fibres[C.tgt(f)]}) for f in C.morphisms}
    sub = Doctrine(C, fibres, reindex, P.structure, name=name or f"sub({P.name})")
    inc = DoctrineMorphism(sub, P, identity_functor(C),
                           {A: MonotoneMap(fibres[A], P.fibres[A], {x: x for x in fibres[A]}) for A in C.objects})
    return sub, inc


def tops_selection(P):
    return {A: [P.top(A)] for A in P.base.objects}


def all_selection(P):
    return {A: list(P.fibres[A]) for A in P.base.objects}
