"""Decision procedures: free elements, choice rules, ε-operators, characterization, Morita checks.

Every quantifier is evaluated exhaustively; witnesses are the first
counterexample in canonical enumeration order.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .completion import existential_completion
from .doctrine import (Doctrine, DoctrineMorphism, check_lambda_existential, find_elementary_structure,
                       identity_functor, restrict_subdoctrine)
from .errors import DoctrinaError, MissingStructure, NoAdjoint
from .fincat import (FunctorData, LeftClass, iso_classes, iter_isomorphisms, projections,
                     search_equivalence, skeleton)
from .order import MonotoneMap


class Unverifiable(DoctrinaError):
    def __init__(self, rule, reason):
        super().__init__(f"{rule} cannot be decided: {reason}")
        self.rule, self.reason = rule, reason


def _sections(C, g):
    """Arrows h with g∘h = id."""
    B = C.tgt(g)
    return [h for h in C.hom(B, C.src(g)) if C.compose(g, h) == C.identity(B)]


def _lam_sorted(C, lam):
    members = set(lam)
    return [m for m in C.morphisms if m in members]


def splitting_witness(P, lam, B, alpha):
    """First (g, β) with α ≤ ∃_g β and no section h of g with α ≤ P_h β, else None."""
    C = P.base
    L = P.fibres[B]
    for g in _lam_sorted(C, lam):
        if C.tgt(g) != B:
            continue
        E = P.exists(g)
        for beta in P.fibres[C.src(g)]:
            if L.leq(alpha, E(beta)) and not any(L.leq(alpha, P.pull(h, beta)) for h in _sections(C, g)):
                return (g, beta)
    return None


def is_existential_splitting(P, lam, B, alpha):
    """(verdict, witness); the witness is the failing (g, β)."""
    w = splitting_witness(P, lam, B, alpha)
    return w is None, w


def is_existential_free(P, lam, A, alpha):
    """(verdict, witness); the witness is (f, g, β) with P_f(α) failing to split at (g, β)."""
    C = P.base
    for f in C.arrows_into(A):
        w = splitting_witness(P, lam, C.src(f), P.pull(f, alpha))
        if w is not None:
            return False, (f, *w)
    return True, None


@dataclass
class FreeElementReport:
    splitting: dict
    free: dict
    witnesses: dict

    def free_selection(self, P):
        return {A: [x for x in P.fibres[A] if self.free[A, x]] for A in P.base.objects}


def free_element_report(P, lam):
    split, free, wit = {}, {}, {}
    for A, x in P.elements():
        s = splitting_witness(P, lam, A, x)
        split[A, x] = s is None
        if s is not None:
            wit[A, x] = s
    C = P.base
    for A, x in P.elements():
        ok = True
        for f in C.arrows_into(A):
            if not split[C.src(f), P.pull(f, x)]:
                ok = False
                wit.setdefault(("free", A, x), (f, *wit[C.src(f), P.pull(f, x)]))
                break
        free[A, x] = ok
    return FreeElementReport(split, free, wit)


@dataclass
class FreeSelection:
    selection: dict
    top_closed: bool
    meet_closed: bool
    reindex_closed: bool
    witness: object = None

    @property
    def closed(self):
        return self.top_closed and self.meet_closed and self.reindex_closed


def existential_free_subdoctrine(P, lam):
    """All Λ-free elements with a closure report."""
    rep = free_element_report(P, lam)
    sel = rep.free_selection(P)
    C = P.base
    top_ok = all(P.top(A) in sel[A] for A in C.objects)
    meet_ok, witness = True, None
    for A in C.objects:
        L = P.fibres[A]
        for x in sel[A]:
            for y in sel[A]:
                if L.meet(x, y) not in sel[A]:
                    meet_ok = False
                    witness = witness or ("meet", A, x, y)
    reindex_ok = all(P.pull(f, x) in sel[C.src(f)] for f in C.morphisms for x in sel[C.tgt(f)])
    if not top_ok:
        witness = witness or ("top", next(A for A in C.objects if P.top(A) not in sel[A]))
    return FreeSelection(sel, top_ok, meet_ok, reindex_ok, witness)


# choice rules

@dataclass
class ChoiceReport:
    lambda_rc: bool | None
    rc: bool | None
    erc: bool | None
    ruc: bool | None
    erc_prd: bool | None = None
    witnesses: dict = field(default_factory=dict)
    unverifiable: list = field(default_factory=list)

    def as_dict(self):
        return {"lambda_rc": self.lambda_rc, "rc": self.rc, "erc": self.erc, "ruc": self.ruc,
                "erc_prd": self.erc_prd}


def _top_split(P, g, extensional=None):
    """Witness β where ⊤ ≤ ∃_g β has no section h of g with ⊤ ≤ P_h β; None when all split.

    ``extensional`` relaxes g∘h = id to g∘h provably equal to id.
    """
    C = P.base
    A, B = C.tgt(g), C.src(g)
    top = P.top(A)
    E = P.exists(g)
    if extensional is None:
        cands = _sections(C, g)
    else:
        cands = [h for h in C.hom(A, B) if extensional(C.compose(g, h), C.identity(A))]
    for beta in P.fibres[B]:
        if E(beta) == top and not any(P.pull(h, beta) == top for h in cands):
            return beta
    return None


def check_choice_rules(P, lam=None):
    """Λ-RC (when ``lam`` is given), RC, ERC and RUC as True, False or None (undecidable here)."""
    C, S = P.base, P.structure
    rep = ChoiceReport(None, None, None, None)
    if lam is not None:
        rep.lambda_rc = True
        for g in _lam_sorted(C, lam):
            try:
                beta = _top_split(P, g)
            except NoAdjoint:
                rep.lambda_rc = None
                rep.unverifiable.append(("Λ-RC", "no left adjoint", g))
                break
            if beta is not None:
                rep.lambda_rc = False
                rep.witnesses["lambda_rc"] = (g, beta)
                break
    rep.rc = True
    for A in C.objects:
        for B in C.objects:
            try:
                _, p1, _ = S.product(A, B)
            except MissingStructure:
                rep.unverifiable.append(("RC", "missing product", (A, B)))
                if rep.rc:
                    rep.rc = None
                continue
            try:
                beta = _top_split(P, p1)
            except NoAdjoint:
                rep.rc = None if rep.rc is not False else False
                rep.unverifiable.append(("RC", "no left adjoint", p1))
                continue
            if beta is not None:
                rep.rc = False
                rep.witnesses.setdefault("rc", (p1, beta))
    rep.erc = True
    for g in C.morphisms:
        try:
            beta = _top_split(P, g)
        except NoAdjoint:
            rep.unverifiable.append(("ERC", "no left adjoint", g))
            if rep.erc:
                rep.erc = None
            continue
        if beta is not None:
            rep.erc = False
            rep.witnesses.setdefault("erc", (g, beta))
    w = _safe_witness(P)
    if w is not None:
        def provably_equal(f, g):
            try:
                return P.pull(S.pair(f, g), w.delta[C.tgt(f)]) == P.top(C.src(f))
            except (KeyError, MissingStructure):
                return f == g
        rep.erc_prd = True
        for g in C.morphisms:
            try:
                beta = _top_split(P, g, extensional=provably_equal)
            except NoAdjoint:
                rep.erc_prd = None if rep.erc_prd else rep.erc_prd
                continue
            if beta is not None:
                rep.erc_prd = False
                break
        rep.ruc = _ruc(P, w, rep)
    else:
        rep.unverifiable.append(("RUC", "no equality predicates"))
    return rep


def _safe_witness(P):
    try:
        return find_elementary_structure(P)
    except DoctrinaError:
        return None


def _ruc(P, w, rep):
    from .regexact import Relations
    R = Relations(P, w)
    C = P.base
    verdict = True
    for A in C.objects:
        for B in C.objects:
            try:
                AB, p1, p2 = R.product(A, B)
                R.triple(A, B, B)
                R.eq(B)
            except MissingStructure as exc:
                rep.unverifiable.append(("RUC", "missing structure", (A, B), exc.kind))
                verdict = None if verdict else verdict
                continue
            for phi in P.fibres[AB]:
                try:
                    ok = R.entire(A, B, phi) and R.functional(A, B, phi)
                except NoAdjoint:
                    rep.unverifiable.append(("RUC", "no left adjoint", p1))
                    return None if verdict else verdict
                if not ok:
                    continue
                if not any(P.pull(_pair_id(R, A, B, f), phi) == P.top(A) for f in C.hom(A, B)):
                    rep.witnesses.setdefault("ruc", (A, B, phi))
                    verdict = False
    return verdict


def _pair_id(R, A, B, f):
    return R.S.pair(R.C.identity(A), f)


# ε-operators

@dataclass
class EpsilonReport:
    verdict: bool | None
    table: dict
    missing: list
    failures: list

    def __bool__(self):
        return bool(self.verdict)


def check_epsilon_operators(P):
    """For each α in P(A×B) the first ε: A -> B with ∃_pr1(α) = P_⟨id,ε⟩(α)."""
    C, S = P.base, P.structure
    table, missing, failures = {}, [], []
    for A in C.objects:
        for B in C.objects:
            try:
                AB, p1, _ = S.product(A, B)
            except MissingStructure:
                missing.append((A, B))
                continue
            try:
                E = P.exists(p1)
            except NoAdjoint:
                failures.append((A, B, "no left adjoint along the projection"))
                continue
            for alpha in P.fibres[AB]:
                found = next((f for f in C.hom(A, B) if E(alpha) == P.pull(S.pair(C.identity(A), f), alpha)), None)
                table[A, B, alpha] = found
                if found is None:
                    failures.append((A, B, alpha))
    verdict = False if failures else (None if missing else True)
    return EpsilonReport(verdict, table, missing, failures)


def pure_unit_iso(P):
    """Is η: P -> P^pure a fibrewise isomorphism?  None when the class is unverifiable."""
    lam = projections(P.base, P.structure)
    try:
        comp = existential_completion(P, lam)
    except MissingStructure:
        return None
    return comp.unit.fibrewise_iso


def epsilon_iff(P):
    """(ε-operator verdict, η-iso verdict) for the pure completion."""
    return check_epsilon_operators(P).verdict, pure_unit_iso(P)


# characterization

@dataclass
class Reconstruction:
    morphism: DoctrineMorphism | None
    fibrewise_iso: bool
    natural: bool
    preserves_exists: bool
    completion: object = None
    witness: object = None

    @property
    def ok(self):
        return self.fibrewise_iso and self.natural and self.preserves_exists


def reconstruction(P, selection, lam):
    """The comparison (f, β) ↦ ∃_f(β) from the completion of ``selection`` into ``P``."""
    sub, _ = restrict_subdoctrine(P, selection)
    comp = existential_completion(sub, lam)
    Q, C = comp.doctrine, P.base
    comps = {}
    try:
        for A in C.objects:
            comps[A] = MonotoneMap(Q.fibres[A], P.fibres[A], {(f, b): P.exists(f)(b) for (f, b) in Q.fibres[A]},
                                   name="rho")
    except NoAdjoint as exc:
        return Reconstruction(None, False, False, False, comp, ("no left adjoint", exc.pair))
    rho = DoctrineMorphism(Q, P, identity_functor(C), comps)
    iso = rho.fibrewise_iso
    bad = rho.non_iso_objects()
    natural = rho.is_natural
    pres = rho.preserves_exists(lam)
    witness = None
    if bad:
        A = bad[0]
        witness = ("not an order isomorphism", A)
    return Reconstruction(rho, iso, natural, pres, comp, witness)


def is_completion_of(P, selection, lam):
    """Ground truth: ϱ from the Λ-completion of ``selection`` to ``P`` is a fibrewise isomorphism."""
    try:
        return reconstruction(P, selection, lam).ok
    except DoctrinaError:
        return False


@dataclass
class CharacterizationVerdict:
    existential: str
    condition_a: bool
    condition_b: bool
    condition_c: bool
    witnesses: dict
    free: FreeSelection | None
    reconstruction: Reconstruction | None = None
    unverifiable: list = field(default_factory=list)

    @property
    def conditions(self):
        return self.condition_a and self.condition_b and self.condition_c

    @property
    def ok(self):
        return (self.condition_a and self.condition_b and self.condition_c
                and self.reconstruction is not None and self.reconstruction.ok)

    @property
    def failing_condition(self):
        for key, val in (("a", self.condition_a), ("b", self.condition_b), ("c", self.condition_c)):
            if not val:
                return key
        if self.reconstruction is not None and not self.reconstruction.ok:
            return "reconstruction"
        return None

    def __bool__(self):
        return self.ok


def characterize_completion(P, lam):
    """Tops split, free elements are meet-closed, and enough free elements; then rebuild and compare."""
    ex = check_lambda_existential(P, lam)
    if not ex.adjoints:
        f, _ = ex.missing_adjoints[0]
        raise NoAdjoint(f, "characterization needs left adjoints along the class")
    C = P.base
    rep = free_element_report(P, lam)
    wit = {}
    cond_a = True
    for A in C.objects:
        if not rep.splitting[A, P.top(A)]:
            cond_a = False
            wit["a"] = rep.witnesses[A, P.top(A)]
            break
    sel = rep.free_selection(P)
    cond_b = True
    for A in C.objects:
        L = P.fibres[A]
        for x in sel[A]:
            for y in sel[A]:
                if L.meet(x, y) not in sel[A]:
                    cond_b = False
                    wit.setdefault("b", (A, x, y))
    cond_c = True
    lam_sorted = _lam_sorted(C, lam)
    for A, alpha in P.elements():
        covered = any(P.exists(g)(b) == alpha for g in lam_sorted if C.tgt(g) == A for b in sel[C.src(g)])
        if not covered:
            cond_c = False
            wit["c"] = (A, alpha)
            break
    free = FreeSelection(sel, all(P.top(A) in sel[A] for A in C.objects), cond_b,
                         all(P.pull(f, x) in sel[C.src(f)] for f in C.morphisms for x in sel[C.tgt(f)]))
    verdict = CharacterizationVerdict(ex.status, cond_a, cond_b, cond_c, wit, free)
    if cond_a and cond_b and cond_c:
        try:
            verdict.reconstruction = reconstruction(P, sel, lam)
        except MissingStructure as exc:
            verdict.unverifiable.append(("reconstruction", exc.kind, exc.args_))
    return verdict


# Morita equivalence

def morita_regular(P, Q, budget=200_000):
    from .regexact import regular_completion
    return search_equivalence(regular_completion(P), regular_completion(Q), budget)


def morita_exact(P, Q, budget=200_000):
    from .regexact import exact_completion
    return search_equivalence(exact_completion(P), exact_completion(Q), budget)


# doctrine isomorphism up to base equivalence

@dataclass
class DoctrineIso:
    obj_map: dict
    mor_map: dict
    fibre_maps: dict


def _skeletal_doctrine(P):
    C = P.base
    sk = skeleton(C)
    return sk, {A: P.fibres[A] for A in sk.objects}


def doctrine_equivalence(P, Q, budget=200_000):
    """A base isomorphism of skeletons with fibrewise order isomorphisms commuting with reindexing.

    Returns a :class:`DoctrineIso` or None.
    """
    S1, F1 = _skeletal_doctrine(P)
    S2, F2 = _skeletal_doctrine(Q)
    for obj, mor in iter_isomorphisms(S1, S2, budget):
        maps = _fibre_isos(P, Q, S1, obj, mor)
        if maps is not None:
            return DoctrineIso(obj, mor, maps)
    return None


def _all_order_isos(L, M):
    if len(L) != len(M):
        return
    src = list(L)
    assign, used = {}, set()

    def go(k):
        if k == len(src):
            yield dict(assign)
            return
        x = src[k]
        for y in M:
            if y in used:
                continue
            if all(L.leq(x, z) == M.leq(y, assign[z]) and L.leq(z, x) == M.leq(assign[z], y) for z in assign):
                assign[x] = y
                used.add(y)
                yield from go(k + 1)
                del assign[x]
                used.discard(y)

    yield from go(0)


def _fibre_isos(P, Q, S1, obj, mor):
    objs = list(S1.objects)
    chosen = {}

    def consistent():
        for f in S1.morphisms:
            A, B = S1.src(f), S1.tgt(f)
            if A in chosen and B in chosen:
                for x in P.fibres[B]:
                    if chosen[A][P.pull(f, x)] != Q.pull(mor[f], chosen[B][x]):
                        return False
        return True

    def go(k):
        if k == len(objs):
            return dict(chosen)
        A = objs[k]
        for m in _all_order_isos(P.fibres[A], Q.fibres[obj[A]]):
            chosen[A] = m
            if consistent():
                found = go(k + 1)
                if found is not None:
                    return found
            del chosen[A]
        return None

    return go(0)


# regular categories and the unique-choice characterization

def is_cover(C, e):
    """e factors through no proper mono: every mono m with e = m∘g is an iso."""
    from .fincat import is_mono
    B = C.tgt(e)
    for m in C.arrows_into(B):
        if C.is_iso(m) or not is_mono(C, m):
            continue
        if any(C.compose(m, g) == e for g in C.hom(C.src(e), C.src(m))):
            return False
    return True


@dataclass
class RegularReport:
    finite_limits: bool
    factorizations: bool
    covers_stable: bool
    covers_epic: bool
    witness: object = None

    @property
    def ok(self):
        return self.finite_limits and self.factorizations and self.covers_stable and self.covers_epic

    def __bool__(self):
        return self.ok


def check_regular_category(C, S):
    """Finite limits, (cover, mono) factorizations, pullback-stable covers that are epic."""
    from .fincat import is_mono
    try:
        S.terminal()
        for A in C.objects:
            for B in C.objects:
                S.product(A, B)
        for f in C.morphisms:
            for g in C.arrows_into(C.tgt(f)):
                S.pullback(f, g)
    except MissingStructure as exc:
        return RegularReport(False, False, False, False, ("missing", exc.kind, exc.args_))
    covers = [e for e in C.morphisms if is_cover(C, e)]
    cover_set = set(covers)
    fact = True
    witness = None
    for f in C.morphisms:
        A, B = C.src(f), C.tgt(f)
        if not any(is_mono(C, m) and any(C.compose(m, e) == f and e in cover_set for e in C.hom(A, C.src(m)))
                   for m in C.arrows_into(B)):
            fact = False
            witness = ("no factorization", f)
            break
    stable = True
    for e in covers:
        for g in C.arrows_into(C.tgt(e)):
            _, _, leg = S.pullback(e, g)
            if leg not in cover_set:
                stable = False
                witness = witness or ("cover not stable", e, g)
                break
    epic = True
    for e in covers:
        B = C.tgt(e)
        for X in C.objects:
            images = [C.compose(h, e) for h in C.hom(B, X)]
            if len(set(images)) != len(images):
                epic = False
                witness = witness or ("cover not epic", e)
    return RegularReport(True, fact, stable, epic, witness)


@dataclass
class UniqueChoiceConditions:
    existential_mvar_ruc: bool
    regular_and_sub: bool
    mono_completion: bool
    details: dict = field(default_factory=dict)

    @property
    def agree(self):
        return self.existential_mvar_ruc == self.regular_and_sub == self.mono_completion


def unique_choice_conditions(P):
    """The three equivalent conditions for existential m-variational doctrines with unique choice."""
    from .completion import check_comprehension_properties
    from .doctrine import check_existential, m_subobjects_doctrine, tops_selection
    from .fincat import monomorphisms
    C, S = P.base, P.structure
    det = {}
    ex = check_existential(P)
    w = _safe_witness(P)
    comp = check_comprehension_properties(P, w)
    choice = check_choice_rules(P)
    det.update(existential=ex.status, elementary=w is not None, full=comp.full, diagonals=comp.diagonals,
               ruc=choice.ruc)
    one = bool(ex.holds and w is not None and comp.has_all and comp.full and comp.diagonals and choice.ruc)
    reg = check_regular_category(C, S)
    det["regular"] = reg.ok
    two = False
    mono = monomorphisms(C)
    if reg.ok:
        try:
            sub = m_subobjects_doctrine(C, S, mono)
            two = doctrine_equivalence(P, sub) is not None
        except DoctrinaError as exc:
            det["sub"] = str(exc)
    det["iso_to_sub"] = two
    two = two and reg.ok
    three = False
    try:
        three = is_completion_of(P, tops_selection(P), mono)
    except DoctrinaError as exc:
        det["completion"] = str(exc)
    det["factorization_system"] = reg.factorizations and reg.covers_stable and reg.covers_epic
    three = three and det["factorization_system"]
    return UniqueChoiceConditions(one, two, three, det)


# localic doctrines on a truncated base

@dataclass
class FragmentConditions:
    condition_a: bool
    condition_b: bool
    condition_c: bool
    covering_objects: list
    witnesses: dict

    @property
    def ok(self):
        return self.condition_a and self.condition_b and self.condition_c


def localic_fragment_conditions(L, F):
    """Characterization conditions for the localic doctrine of ``L`` over finite sets ``F``, Λ = all.

    (a) and (b) are checked on every fibre. (c) is checked on the fibres n for
    which 2n is an object of ``F``, since covering an element of L^n by binary
    joins needs a 2n-element domain.
    """
    from .doctrine import localic_doctrine
    from .fincat import all_morphisms
    P = localic_doctrine(L, F)
    lam = all_morphisms(F)
    rep = free_element_report(P, lam)
    sel = rep.free_selection(P)
    wit = {}
    a = True
    for A in F.objects:
        if not rep.splitting[A, P.top(A)]:
            a = False
            wit["a"] = (A, rep.witnesses[A, P.top(A)])
            break
    b = True
    for A in F.objects:
        M = P.fibres[A]
        bad = next(((x, y) for x in sel[A] for y in sel[A] if M.meet(x, y) not in sel[A]), None)
        if bad is not None:
            b = False
            wit["b"] = (A, *bad)
            break
    covering = [n for n in F.objects if 2 * n in F.objects]
    c = True
    for A in covering:
        for alpha in P.fibres[A]:
            if not any(P.exists(g)(x) == alpha for g in F.arrows_into(A) for x in sel[F.src(g)]):
                c = False
                wit["c"] = (A, alpha)
                break
        if not c:
            break
    return FragmentConditions(a, b, c, covering, wit)


def run_theorem_suite(bundle, theorem_id):
    """Run one named theorem check over a bundle; see :mod:`doctrina.theorems`."""
    from .theorems import run_theorem_suite as run
    return run(bundle, theorem_id)
