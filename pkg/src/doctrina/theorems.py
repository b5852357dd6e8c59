"""Named theorem checks run exhaustively on bundles of finite instances.

Each theorem id maps to a function that walks a :class:`Bundle` and emits one
:class:`Check` per (subject, claim). A check is ``pass`` or ``fail`` when the
claim was decided, ``unverifiable`` when the instance lacks the structure to
decide it, and ``vacuous`` when the hypotheses do not apply. Nothing is
skipped silently: every subject appears in the report.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import pack
from .analysis import (characterize_completion, check_epsilon_operators, doctrine_equivalence,
                       free_element_report, is_completion_of, localic_fragment_conditions, pure_unit_iso,
                       unique_choice_conditions)
from .completion import (build_comparison_groth, build_comparison_pred, check_comprehension_properties,
                         existential_completion, groth_category)
from .doctrine import (all_selection, check_existential, check_lambda_existential, find_elementary_structure,
                       m_subobjects_doctrine, restrict_subdoctrine, tops_selection, weak_subobjects_doctrine)
from .errors import (BudgetExceeded, DoctrinaError, MissingStructure, NoAdjoint, SizeCap, UnsupportedTheorem)
from .fincat import (ChosenStructure, LeftClass, all_morphisms, monomorphisms, search_equivalence,
                     semilattice_category, skeleton, verify_left_class)
from .order import check_supercoherent, downset_frame, supercompact_elements, supercompact_oracle
from .regexact import (_weak_subobjects_over, build_exact_functor, build_reg_functor, ex_lex, ex_reg,
                       exact_completion, reg_lex_direct, regular_completion)

PASS, FAIL, UNVERIFIABLE, VACUOUS = "pass", "fail", "unverifiable", "vacuous"
_UNDECIDABLE = (MissingStructure, SizeCap, BudgetExceeded)


@dataclass
class Check:
    claim: str
    subject: str
    status: str
    detail: object = None

    def as_dict(self):
        return {"claim": self.claim, "subject": self.subject, "status": self.status,
                "detail": plain(self.detail)}


@dataclass
class TheoremReport:
    theorem: str
    statement: str
    bundle: str
    checks: list = field(default_factory=list)

    @property
    def status(self):
        kinds = {c.status for c in self.checks}
        if FAIL in kinds:
            return FAIL
        if PASS in kinds:
            return PASS
        if UNVERIFIABLE in kinds:
            return UNVERIFIABLE
        return VACUOUS

    @property
    def passed(self):
        return self.status in (PASS, VACUOUS)

    @property
    def failures(self):
        return [c for c in self.checks if c.status == FAIL]

    @property
    def unverifiable(self):
        return [c for c in self.checks if c.status == UNVERIFIABLE]

    def counts(self):
        out = {PASS: 0, FAIL: 0, UNVERIFIABLE: 0, VACUOUS: 0}
        for c in self.checks:
            out[c.status] += 1
        return out

    def as_dict(self):
        return {"theorem": self.theorem, "statement": self.statement, "bundle": self.bundle,
                "status": self.status, "counts": self.counts(),
                "checks": [c.as_dict() for c in self.checks],
                "unverifiable": [c.as_dict() for c in self.unverifiable]}


def plain(x):
    """JSON-friendly, deterministic rendering of witnesses and ids."""
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    if isinstance(x, dict):
        return {_key(k): plain(v) for k, v in sorted(x.items(), key=lambda kv: _key(kv[0]))}
    if isinstance(x, (frozenset, set)):
        return sorted((plain(v) for v in x), key=repr)
    if isinstance(x, (list, tuple)):
        return [plain(v) for v in x]
    if hasattr(x, "carrier") and hasattr(x, "relation"):
        return {"carrier": plain(x.carrier), "relation": plain(x.relation)}
    return str(x)


def _key(k):
    p = plain(k)
    return p if isinstance(p, str) else repr(p)


# bundles

@dataclass
class Bundle:
    name: str
    doctrines: list = field(default_factory=list)
    bases: list = field(default_factory=list)
    frames: list = field(default_factory=list)
    semilattices: list = field(default_factory=list)


def corpus_bundle():
    from .order import boolean_lattice
    return Bundle("corpus", pack.corpus(), [pack.base(b) for b in pack.LEX_BASES],
                  list(pack.frames(6)) + [boolean_lattice("pq"), pack.one_plus(boolean_lattice("pq"))],
                  pack.meet_semilattices(5))


def bundle_for(ref):
    """A bundle from a pack name: doctrine, base, frame ('B4', '1+B4') or 'corpus'."""
    if isinstance(ref, Bundle):
        return ref
    if ref in (None, "corpus", "all"):
        return corpus_bundle()
    if ref in ("B4", "1+B4"):
        return Bundle(ref, frames=[pack.frame_bundle(ref)])
    if ref in pack.BASES:
        C = pack.base(ref)
        return Bundle(ref, bases=[C] if ref in pack.LEX_BASES else [])
    P = pack.doctrine(ref)
    return doctrine_bundle(P, ref)


def doctrine_bundle(P, name=None):
    C = P.base
    lex = _is_lex(C, P.structure)
    return Bundle(name or P.name, [P], [C] if lex else [])


def _is_lex(C, S):
    try:
        S.terminal()
        for A in C.objects:
            for B in C.objects:
                S.product(A, B)
        for f in C.morphisms:
            for g in C.arrows_into(C.tgt(f)):
                S.pullback(f, g)
        return True
    except MissingStructure:
        return False


# shared, memoised computations

class _Memo:
    def __init__(self):
        self.store = {}

    def get(self, key, fn):
        if key not in self.store:
            try:
                self.store[key] = ("ok", fn())
            except DoctrinaError as exc:
                self.store[key] = ("err", exc)
        kind, val = self.store[key]
        if kind == "err":
            raise val
        return val


def _classes(m, P, names=("identities", "isomorphisms", "pure", "full")):
    out = []
    for cname in names:
        def build(cname=cname):
            lam = pack.class_preset(P.base, cname, P.structure)
            rep = verify_left_class(P.base, P.structure, lam)
            return lam if rep.ok else None
        try:
            lam = m.get(("class", id(P), cname), build)
        except _UNDECIDABLE:
            lam = None
        if lam is not None:
            out.append((cname, lam))
    return out


def _cls(m, P, cname):
    return dict(_classes(m, P, (cname,))).get(cname)


def _existential(m, P, lam, cname):
    return m.get(("ex", id(P), cname), lambda: check_lambda_existential(P, lam))


def _completion(m, P, lam, cname):
    return m.get(("comp", id(P), cname), lambda: existential_completion(P, lam))


def _elementary(m, P):
    return m.get(("elem", id(P)), lambda: find_elementary_structure(P))


def _free(m, P, lam, cname):
    return m.get(("free", id(P), cname), lambda: free_element_report(P, lam))


def _reg(m, P):
    return m.get(("reg", id(P)), lambda: regular_completion(P))


def _tp(m, P):
    return m.get(("tp", id(P)), lambda: exact_completion(P))


def _structured(C, S=None):
    """Attach a chosen structure to a bare category so later constructions can find it."""
    if getattr(C, "structure", None) is None:
        C.structure = S if S is not None else ChosenStructure(C)
    return C


def _psi(m, C):
    _structured(C)
    return m.get(("psi", id(C)), lambda: weak_subobjects_doctrine(C, C.structure, name=f"Psi_{C.name}"))


def _closed(P, sel):
    C = P.base
    return (all(P.top(A) in sel[A] for A in C.objects)
            and all(P.fibres[A].meet(x, y) in sel[A] for A in C.objects for x in sel[A] for y in sel[A])
            and all(P.pull(f, x) in sel[C.src(f)] for f in C.morphisms for x in sel[C.tgt(f)]))


def _selections(m, P, lam, cname):
    """Tops and, when it forms a subdoctrine, the free-element selection."""
    out = [("tops", tops_selection(P))]
    try:
        sel = _free(m, P, lam, cname).free_selection(P)
    except (DoctrinaError, NoAdjoint):
        return out
    if _closed(P, sel) and sel != out[0][1]:
        out.append(("free", sel))
    return out


def _guard(checks, claim, subject, fn):
    """Run ``fn`` and append its Check; structural gaps become unverifiable entries."""
    try:
        status, detail = fn()
    except _UNDECIDABLE as exc:
        status, detail = UNVERIFIABLE, f"{type(exc).__name__}: {exc}"
    except NoAdjoint as exc:
        status, detail = VACUOUS, f"no left adjoint along {exc.pair!r}"
    checks.append(Check(claim, subject, status, detail))


def _iff(a, b):
    return PASS if bool(a) == bool(b) else FAIL


def _implies(a, b):
    return PASS if (not a) or b else FAIL


# theorem implementations

def _t_char(b, m, only=None):
    checks = []
    for P in b.doctrines:
        for cname, lam in _classes(m, P):
            if only and cname not in only:
                continue
            subj = f"{P.name}/{cname}"

            def direct(P=P, lam=lam, cname=cname):
                ex = _existential(m, P, lam, cname)
                if ex.status != "pass":
                    return (UNVERIFIABLE if ex.status == "unverifiable" else VACUOUS), f"existential: {ex.status}"
                v = characterize_completion(P, lam)
                sel = v.free.selection
                truth = _closed(P, sel) and is_completion_of(P, sel, lam)
                detail = {"conditions": [v.condition_a, v.condition_b, v.condition_c],
                          "failing": v.failing_condition, "witnesses": v.witnesses, "completion": truth}
                if v.unverifiable:
                    return UNVERIFIABLE, detail
                return _iff(v.ok, truth), detail
            _guard(checks, "conditions (a)-(c) hold iff the doctrine is a completion of its free part", subj, direct)

            def roundtrip(P=P, lam=lam, cname=cname):
                comp = _completion(m, P, lam, cname)
                v = characterize_completion(comp.doctrine, lam)
                return (PASS if v.ok else FAIL), {"failing": v.failing_condition, "witnesses": v.witnesses}
            _guard(checks, "every computed completion is recognised and rebuilt isomorphically", subj, roundtrip)
    return checks


def _t_eta(b, m):
    checks = []
    for P in b.doctrines:
        for cname, lam in _classes(m, P):
            def run(P=P, lam=lam, cname=cname):
                comp = _completion(m, P, lam, cname)
                Q = comp.doctrine
                rep = free_element_report(Q, lam)
                image = {(A, comp.unit(A, x)) for A in P.base.objects for x in P.fibres[A]}
                free = {(A, y) for (A, y), ok in rep.free.items() if ok}
                extra, missing = sorted(free - image, key=repr), sorted(image - free, key=repr)
                return (PASS if not extra and not missing else FAIL), {"free_not_image": extra[:3],
                                                                       "image_not_free": missing[:3]}
            _guard(checks, "free elements of the completion are exactly the unit's image", f"{P.name}/{cname}", run)
    return checks


def _t_diag(b, m):
    checks = []
    for P in b.doctrines:
        lam = _cls(m, P, "full")
        if lam is None:
            checks.append(Check("full completions have comprehensive diagonals", P.name, UNVERIFIABLE,
                                "the class of all arrows is not a verified left class here"))
            continue

        def run(P=P, lam=lam):
            Q = _completion(m, P, lam, "full").doctrine
            w = _elementary(m, Q)
            if w is None:
                return FAIL, "completion has no equality predicates"
            if w.unverified:
                return UNVERIFIABLE, {"unverified": w.unverified}
            rep = check_comprehension_properties(Q, w)
            return (PASS if rep.diagonals else FAIL), rep.witnesses.get("diagonals")
        _guard(checks, "full completions have comprehensive diagonals", P.name, run)
    return checks


def _t_pci(b, m):
    checks = []
    for P in b.doctrines:
        for cname, lam in _classes(m, P):
            try:
                ex = _existential(m, P, lam, cname)
            except _UNDECIDABLE as exc:
                checks.append(Check("comparison iso iff completion", f"{P.name}/{cname}", UNVERIFIABLE, str(exc)))
                continue
            if ex.status != "pass":
                checks.append(Check("comparison iso iff completion", f"{P.name}/{cname}",
                                    UNVERIFIABLE if ex.status == "unverifiable" else VACUOUS,
                                    f"existential: {ex.status}"))
                continue
            for sname, sel in _selections(m, P, lam, cname):
                def run(P=P, lam=lam, sel=sel):
                    truth = is_completion_of(P, sel, lam)
                    res = build_comparison_groth(P, sel, lam)
                    return _iff(res.verdict, truth), {"comparison": res.verdict, "completion": truth,
                                                      "witness": res.witness}
                _guard(checks, "comparison into weak subobjects is an iso iff completion",
                       f"{P.name}/{cname}/{sname}", run)
    return checks


def _t_elem(b, m):
    checks = []
    for P in b.doctrines:
        lam = _cls(m, P, "pure")
        if lam is None:
            checks.append(Check("elementary iff pure completion elementary", P.name, UNVERIFIABLE,
                                "projections do not form a verified left class"))
            continue

        def run(P=P, lam=lam):
            src = find_elementary_structure(P)
            tgt = find_elementary_structure(_completion(m, P, lam, "pure").doctrine)
            if (src is not None and src.unverified) or (tgt is not None and tgt.unverified):
                return UNVERIFIABLE, "partial equality predicates"
            return _iff(src is not None, tgt is not None), {"doctrine": src is not None, "completion": tgt is not None}
        _guard(checks, "elementary iff pure completion elementary", P.name, run)
    return checks


def _t_genpure(b, m):
    return _t_char(b, m, only=("pure",))


def _pure_subjects(m, b):
    """(label, doctrine, selection) triples for the pure-completion theorems."""
    out = []
    for P in b.doctrines:
        lam = _cls(m, P, "pure")
        if lam is None:
            out.append((P.name, P, None, "projections do not form a verified left class"))
            continue
        out.append((f"{P.name}/all", P, all_selection(P), None))
        for sname, sel in _selections(m, P, lam, "pure"):
            out.append((f"{P.name}/{sname}", P, sel, None))
        try:
            comp = _completion(m, P, lam, "pure")
        except DoctrinaError as exc:
            out.append((f"pure({P.name})", None, None, str(exc)))
            continue
        Q = comp.doctrine
        image = {A: sorted({comp.unit(A, x) for x in P.fibres[A]}, key=Q.fibres[A].index.get)
                 for A in P.base.objects}
        out.append((f"pure({P.name})/unit", Q, image, None))
    return out


def _elementary_subdoctrine(P, sel):
    sub, _ = restrict_subdoctrine(P, sel)
    return find_elementary_structure(sub)


def _t_pred(b, m):
    checks = []
    claim = "comparison into weak subobjects of predicates is an iso iff pure completion"
    for label, P, sel, problem in _pure_subjects(m, b):
        if problem:
            checks.append(Check(claim, label, UNVERIFIABLE, problem))
            continue

        def run(P=P, sel=sel):
            lam = _cls(m, P, "pure")
            if check_lambda_existential(P, lam).status != "pass" or find_elementary_structure(P) is None:
                return VACUOUS, "not an existential elementary doctrine"
            if _elementary_subdoctrine(P, sel) is None:
                return VACUOUS, "selection is not elementary"
            truth = is_completion_of(P, sel, lam)
            res = build_comparison_pred(P, sel)
            if res.verdict is None:
                return UNVERIFIABLE, res.witness
            return _iff(res.verdict, truth), {"comparison": res.verdict, "completion": truth}
        _guard(checks, claim, label, run)
    return checks


def _t_eps(b, m):
    checks = []
    for P in b.doctrines:
        def run(P=P):
            eps = check_epsilon_operators(P)
            iso = pure_unit_iso(P)
            if eps.verdict is None or iso is None:
                return UNVERIFIABLE, {"missing": eps.missing[:3], "unit_iso": iso}
            return _iff(eps.verdict, iso), {"epsilon": eps.verdict, "unit_iso": iso,
                                             "failure": eps.failures[:1]}
        _guard(checks, "epsilon operators iff isomorphic to the pure completion", P.name, run)
    return checks


def _comp_report(m, P):
    return m.get(("comprep", id(P)), lambda: check_comprehension_properties(P, _safe(lambda: _elementary(m, P))))


def _safe(fn):
    try:
        return fn()
    except DoctrinaError:
        return None


def _full_comprehensions(m, P):
    rep = _comp_report(m, P)
    return rep if rep.has_all and rep.full else None


def _t_compadj(b, m):
    checks = []
    for P in b.doctrines:
        def run(P=P):
            rep = _full_comprehensions(m, P)
            if rep is None:
                return VACUOUS, "no full comprehensions"
            adj = all(P.has_exists(x) for x in rep.comprehensions.values())
            return _iff(rep.composable, adj), {"composable": rep.composable, "adjoints": adj}
        _guard(checks, "composable comprehensions iff left adjoints along comprehensions", P.name, run)
    return checks


def _comp_class(m, P):
    rep = _full_comprehensions(m, P)
    if rep is None or not rep.composable:
        return None
    lam = LeftClass(rep.comprehension_class, name="comprehensions")
    if not verify_left_class(P.base, P.structure, lam).ok:
        raise MissingStructure("comprehension class is not a left class", P.name)
    return lam


def _t_comptop(b, m):
    checks = []
    for P in b.doctrines:
        def run(P=P):
            lam = _comp_class(m, P)
            if lam is None:
                return VACUOUS, "no full composable comprehensions"
            rep = free_element_report(P, lam)
            free = {(A, x) for (A, x), ok in rep.free.items() if ok}
            tops = {(A, P.top(A)) for A in P.base.objects}
            rc = all(rep.splitting[A, P.top(A)] for A in P.base.objects)
            return (PASS if free == tops and rc else FAIL), {"free_not_top": sorted(free - tops, key=repr)[:3],
                                                              "rule_of_choice": rc}
        _guard(checks, "free elements for the comprehension class are exactly the tops", P.name, run)
    return checks


def _t_lcomp(b, m):
    checks = []
    for P in b.doctrines:
        def run(P=P):
            lam = _comp_class(m, P)
            if lam is None:
                return VACUOUS, "no full composable comprehensions"
            v = characterize_completion(P, lam)
            tops = tops_selection(P)
            ok = v.ok and v.free.selection == tops
            return (PASS if ok else FAIL), {"failing": v.failing_condition, "free_is_tops": v.free.selection == tops}
        _guard(checks, "completion of the tops along the comprehension class", P.name, run)
    return checks


def _t_ruc(b, m):
    checks = []
    for P in b.doctrines:
        def run(P=P):
            if not _is_lex(P.base, P.structure):
                return UNVERIFIABLE, "base lacks finite limits"
            u = unique_choice_conditions(P)
            return (PASS if u.agree else FAIL), {"conditions": [u.existential_mvar_ruc, u.regular_and_sub,
                                                                 u.mono_completion], **u.details}
        _guard(checks, "the three unique-choice conditions agree", P.name, run)
    for L in b.semilattices:
        def run(L=L):
            C = semilattice_category(L, name=f"cat({L.name})")
            C.structure = ChosenStructure(C)
            P = m_subobjects_doctrine(C, C.structure, monomorphisms(C), name=f"Sub({L.name})")
            u = unique_choice_conditions(P)
            ok = u.agree and u.existential_mvar_ruc and u.mono_completion
            return (PASS if ok else FAIL), {"conditions": [u.existential_mvar_ruc, u.regular_and_sub,
                                                            u.mono_completion]}
        _guard(checks, "subobjects over a meet-semilattice satisfy unique choice", f"Sub({L.name})", run)
    return checks


def _full_subjects(m, b):
    out = []
    for P in b.doctrines:
        lam = _cls(m, P, "full")
        if lam is None:
            out.append((P.name, None, None, None, "the class of all arrows is not verified"))
            continue
        try:
            ex = _existential(m, P, lam, "full")
        except _UNDECIDABLE as exc:
            out.append((P.name, None, None, None, str(exc)))
            continue
        if ex.status != "pass":
            out.append((P.name, None, None, None, f"vacuous: existential {ex.status}"))
            continue
        for sname, sel in _selections(m, P, lam, "full"):
            out.append((f"{P.name}/{sname}", P, lam, sel, None))
    return out


def _functor_theorem(b, m, builder, claim, direction, mode="groth", cname="full"):
    checks = []
    subjects = _full_subjects(m, b) if cname == "full" else [
        (label, P, _cls(m, P, "pure") if P is not None else None, sel, problem)
        for label, P, sel, problem in _pure_subjects(m, b)]
    for label, P, lam, sel, problem in subjects:
        if problem:
            status = VACUOUS if problem.startswith("vacuous") else UNVERIFIABLE
            checks.append(Check(claim, label, status, problem))
            continue

        def run(P=P, lam=lam, sel=sel):
            if mode == "pure":
                if check_lambda_existential(P, lam).status != "pass" or find_elementary_structure(P) is None:
                    return VACUOUS, "not an existential elementary doctrine"
                if _elementary_subdoctrine(P, sel) is None:
                    return VACUOUS, "selection is not elementary"
            key = (builder.__name__, id(P), repr(sorted(sel.items(), key=repr)), mode)
            v = m.get(key, lambda: builder(P, sel, mode=mode))
            truth = is_completion_of(P, sel, lam)
            status = {"forward": _implies(truth, v.verdict), "converse": _implies(v.verdict, truth),
                      "iff": _iff(v.verdict, truth)}[direction]
            return status, {"functor": v.verdict, "completion": truth, "witness": v.witness}
        _guard(checks, claim, label, run)
    return checks


def _t_regeq(b, m):
    return _functor_theorem(b, m, build_reg_functor, "completion implies Reg(N,n) is an equivalence", "forward")


def _t_tchar(b, m):
    return _functor_theorem(b, m, build_reg_functor, "Reg(N,n) an equivalence implies completion", "converse")


def _t_exgen(b, m):
    return _functor_theorem(b, m, build_exact_functor, "Ex(N,n) an equivalence iff completion", "iff")


def _t_pureex(b, m):
    return _functor_theorem(b, m, build_exact_functor, "Ex(N,n) over predicates an equivalence iff pure completion",
                            "iff", mode="pure", cname="pure")


def _psi_like(m, P):
    """Is P isomorphic to the weak subobjects doctrine of its own base?"""
    return doctrine_equivalence(P, _psi(m, P.base)) is not None


def _t_reglex(b, m):
    checks = []
    claim = "Reg of weak subobjects is equivalent to the reg/lex completion"
    subjects = [(C.name, _psi(m, C), C) for C in b.bases]
    for P in b.doctrines:
        if _is_lex(P.base, P.structure) and _psi_like(m, P):
            subjects.append((P.name, P, P.base))
        else:
            checks.append(Check(claim, P.name, VACUOUS, "not a weak subobjects doctrine on a lex base"))
    for label, P, C in subjects:
        def run(P=P, C=C):
            w = search_equivalence(_reg(m, P), reg_lex_direct(C, C.structure))
            return (PASS if w else FAIL), None if w else w.reason
        _guard(checks, claim, label, run)
    return checks


def _lex_bases_for(b):
    seen, out = set(), []
    for C in list(b.bases) + [pack.base(n) for n in pack.LEX_BASES] + [_structured(P.base, P.structure)
                                                                          for P in b.doctrines]:
        if id(C) not in seen and _is_lex(C, C.structure):
            seen.add(id(C))
            out.append(C)
    return out


def _t_uniq(b, m, exact=False):
    checks = []
    bases = _lex_bases_for(b)
    own = [C for C in bases if C in b.bases or any(P.base is C for P in b.doctrines)] or bases
    done = set()
    for C in own:
        for D in bases:
            key = frozenset((id(C), id(D)))
            if key in done:
                continue
            done.add(key)

            def run(C=C, D=D):
                PC, PD = _psi(m, C), _psi(m, D)
                if exact:
                    morita = search_equivalence(_tp(m, PC), _tp(m, PD))
                else:
                    morita = search_equivalence(_reg(m, PC), _reg(m, PD))
                iso = doctrine_equivalence(PC, PD) is not None
                return _iff(morita, iso), {"morita": bool(morita), "isomorphic": iso}
            kind = "exact" if exact else "regular"
            _guard(checks, f"weak subobjects are {kind} Morita-equivalent iff isomorphic", f"{C.name}~{D.name}", run)
    return checks


def _full_completion_candidates(m, b):
    """Full existential completions to compare against: weak subobjects and completions of the bundle."""
    out = []
    for C in _lex_bases_for(b):
        out.append((f"Psi_{C.name}", _psi(m, C), C, C.structure))
    for P in b.doctrines:
        lam = _cls(m, P, "full")
        if lam is None:
            continue
        try:
            comp = _completion(m, P, lam, "full")
        except DoctrinaError:
            continue
        G = m.get(("groth", id(P)), lambda P=P: groth_category(P))
        out.append((f"full({P.name})", comp.doctrine, G.category, G.structure))
    return out


def _morita_main(b, m, exact):
    checks = []
    kind = "exact" if exact else "regular"
    claim = f"the three {kind} Morita conditions agree"
    comp_of = _tp if exact else _reg
    direct = ex_lex if exact else (lambda D: reg_lex_direct(D, D.structure))
    cands = _full_completion_candidates(m, b)
    for P in b.doctrines:
        def run(P=P):
            lam = _cls(m, P, "full")
            if lam is None or not _is_lex(P.base, P.structure):
                return VACUOUS, "not over a lex base"
            if _existential(m, P, lam, "full").status != "pass":
                return VACUOUS, "not full existential"
            X = comp_of(m, P)
            one, two, three, detail = [], [], [], {}
            for C in _lex_bases_for(b):
                e1 = bool(search_equivalence(X, m.get((kind, "direct", id(C)), lambda C=C: direct(C))))
                e2 = bool(search_equivalence(X, comp_of(m, _psi(m, C))))
                if e1:
                    one.append(C.name)
                if e2:
                    two.append(C.name)
                if e1 != e2:
                    return FAIL, {"lex base": C.name, "direct": e1, "weak subobjects": e2}
            for name, Q, G, GS in cands:
                if search_equivalence(X, comp_of(m, Q)):
                    three.append(name)
                    G.structure = GS
                    d = m.get((kind, "direct", id(G)), lambda G=G: direct(G))
                    if not search_equivalence(X, d):
                        return FAIL, {"completion": name, "generating category": G.name}
            detail = {"(1)": one, "(2)": two, "(3)": three}
            return _iff(bool(one), bool(three)), detail
        _guard(checks, claim, P.name, run)
    return checks


def _t_morreg(b, m):
    return _morita_main(b, m, exact=False)


def _t_exmain(b, m):
    return _morita_main(b, m, exact=True)


def _t_weakuniq_ex(b, m):
    return _t_uniq(b, m, exact=True)


def _t_tpexreg(b, m):
    checks = []
    for P in b.doctrines:
        def run(P=P):
            if find_elementary_structure(P) is None:
                return VACUOUS, "not elementary"
            ex = check_existential(P)
            if ex.status != "pass":
                return (UNVERIFIABLE if ex.status == "unverifiable" else VACUOUS), f"existential: {ex.status}"
            T = _tp(m, P)
            R = _reg(m, P)
            R.structure = ChosenStructure(R)
            E = ex_reg(R)
            w = search_equivalence(T, E)
            return (PASS if w else FAIL), {"skeleton": [len(skeleton(T).objects), len(skeleton(E).objects)]}
        _guard(checks, "T_P is equivalent to the exact completion of Reg(P)", P.name, run)
    return checks


def _t_purereg(b, m):
    checks = []
    for P in b.doctrines:
        def run(P=P):
            lam = _cls(m, P, "pure")
            if lam is None:
                return UNVERIFIABLE, "projections do not form a verified left class"
            if find_elementary_structure(P) is None:
                return VACUOUS, "not elementary"
            comp = _completion(m, P, lam, "pure")
            Q = comp.doctrine
            image = {A: sorted({comp.unit(A, x) for x in P.fibres[A]}, key=Q.fibres[A].index.get)
                     for A in P.base.objects}
            psi = _weak_subobjects_over(Q, image, "pure")
            prd = psi.base
            prd.structure = psi.structure
            w1 = search_equivalence(_reg(m, Q), _reg(m, psi))
            w2 = search_equivalence(_reg(m, psi), reg_lex_direct(prd, psi.structure))
            return (PASS if w1 and w2 else FAIL), {"pure vs psi": bool(w1), "psi vs reg/lex": bool(w2)}
        _guard(checks, "Reg of the pure completion matches reg/lex of predicates", P.name, run)
    return checks


def _t_super(b, m):
    checks = []
    F = pack.base("FS012")
    for L in b.frames:
        def run(L=L):
            fc = localic_fragment_conditions(L, F)
            sc = check_supercoherent(L)
            return _implies(fc.ok, sc.ok), {"completion_conditions": [fc.condition_a, fc.condition_b,
                                                                      fc.condition_c],
                                            "supercoherent": sc.ok, "diagnosis": sc.diagnosis,
                                            "covering_fibres": fc.covering_objects}
        _guard(checks, "localic completion implies supercoherent", L.name, run)

        def converse(L=L):
            fc = localic_fragment_conditions(L, F)
            sc = check_supercoherent(L)
            return _implies(sc.ok, fc.ok), {"supercoherent": sc.ok}
        _guard(checks, "supercoherent implies the truncated completion conditions", L.name, converse)
    return checks


def _t_down(b, m):
    checks = []
    for M in b.semilattices:
        def run(M=M):
            Fr, eta = downset_frame(M)
            sc = check_supercoherent(Fr)
            scs = set(supercompact_elements(Fr))
            image = {eta(x) for x in M}
            order_ok = all(M.leq(x, y) == Fr.leq(eta(x), eta(y)) for x in M for y in M)
            ok = sc.ok and scs == image and len(image) == len(M) and order_ok
            return (PASS if ok else FAIL), {"supercoherent": sc.ok, "supercompacts": len(scs), "size": len(M)}
        _guard(checks, "downsets are supercoherent with supercompacts the principal downsets", M.name, run)
    for L in b.frames:
        if len(L) > 5:
            continue

        def oracle(L=L):
            return (PASS if set(supercompact_elements(L)) == set(supercompact_oracle(L)) else FAIL), None
        _guard(checks, "supercompact elements agree with the all-subsets oracle", L.name, oracle)
    return checks


THEOREMS = {
    "T-CHAR": (_t_char, "a Λ-existential doctrine is a Λ-completion iff tops split, free elements are "
                        "meet-closed and every element is a quantified free element"),
    "T-ETA": (_t_eta, "free elements of a completion are exactly the unit's image"),
    "T-DIAG": (_t_diag, "full existential completions have comprehensive diagonals"),
    "T-PCI": (_t_pci, "completion iff the comparison into weak subobjects over the Grothendieck category is iso"),
    "T-ELEM": (_t_elem, "a doctrine is elementary iff its pure completion is"),
    "T-GENPURE": (_t_genpure, "pure completions are characterized by RC, enough free elements and meet-closure"),
    "T-PRED": (_t_pred, "pure completion of an elementary subdoctrine iff the predicates comparison is iso"),
    "T-EPS": (_t_eps, "epsilon operators iff the doctrine is its own pure completion"),
    "T-COMPADJ": (_t_compadj, "composable comprehensions iff left adjoints along comprehensions"),
    "T-COMPTOP": (_t_comptop, "with full composable comprehensions the free elements are the tops"),
    "T-LCOMP": (_t_lcomp, "full composable comprehensions make the doctrine a completion along them"),
    "T-RUC": (_t_ruc, "unique choice: existential m-variational, subobjects of a regular base, mono completion"),
    "T-REGEQ": (_t_regeq, "a full completion has Reg(N,n) an equivalence"),
    "T-TCHAR": (_t_tchar, "Reg(N,n) an equivalence forces a full completion"),
    "T-REGLEX": (_t_reglex, "Reg of weak subobjects is the reg/lex completion"),
    "T-UNIQ": (_t_uniq, "weak subobjects doctrines are regular Morita-equivalent iff isomorphic"),
    "T-MORREG": (_t_morreg, "regular Morita conditions agree"),
    "T-TPEXREG": (_t_tpexreg, "T_P is the exact completion of Reg(P)"),
    "T-EXGEN": (_t_exgen, "Ex(N,n) an equivalence iff full completion"),
    "T-EXMAIN": (_t_exmain, "exact Morita conditions agree"),
    "T-PUREREG": (_t_purereg, "Reg of a pure completion is reg/lex of predicates"),
    "T-PUREEX": (_t_pureex, "Ex(N,n) over predicates an equivalence iff pure completion"),
    "T-WEAKUNIQ-EX": (_t_weakuniq_ex, "weak subobjects doctrines are exact Morita-equivalent iff isomorphic"),
    "T-SUPER": (_t_super, "a localic doctrine that is a full completion has a supercoherent frame"),
    "T-DOWN": (_t_down, "downset frames are the supercoherent frames, with supercompacts the semilattice"),
}

THEOREM_IDS = tuple(THEOREMS)


def run_theorem_suite(bundle, theorem_id, memo=None):
    """Run one theorem id on a bundle (or bundle name); raises :class:`UnsupportedTheorem`."""
    if theorem_id not in THEOREMS:
        raise UnsupportedTheorem(theorem_id)
    b = bundle_for(bundle)
    fn, statement = THEOREMS[theorem_id]
    memo = memo if memo is not None else _Memo()
    return TheoremReport(theorem_id, statement, b.name, fn(b, memo))


def run_all(bundle=None, ids=THEOREM_IDS):
    memo = _Memo()
    b = bundle_for(bundle)
    return [run_theorem_suite(b, t, memo) for t in ids]
