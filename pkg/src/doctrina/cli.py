"""Command-line front end: ``doctrina <verb> ...``.

Every verb produces a :class:`Report`. Exit status is 0 on pass, 1 on a
verified failure, 2 when the instance lacks the structure to decide, and 3
on a usage error (bad flags, unknown references, unreadable instance files).
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import pack
from .analysis import (characterize_completion, check_choice_rules, check_epsilon_operators, doctrine_equivalence,
                       epsilon_iff, existential_free_subdoctrine)
from .completion import (DEFAULT_FIBRE_CAP, comprehension_completion, existential_completion,
                         extensional_reflection, groth_category, predicates_category)
from .doctrine import check_lambda_existential, restrict_subdoctrine, weak_subobjects_doctrine
from .errors import (BudgetExceeded, DoctrinaError, MissingStructure, NoAdjoint, ParseError, SizeCap,
                     UnresolvedRef, UnsupportedTheorem)
from .fincat import ChosenStructure, NotFound, all_morphisms, search_equivalence, verify_left_class
from .instance import (InstanceWriter, ident, pack_instance, parse_instance, parse_text, serialize, shipped)
from .regexact import exact_completion, reg_lex_direct, regular_completion, subobject_doctrine_of
from .theorems import (THEOREM_IDS, Bundle, bundle_for, doctrine_bundle, plain, run_all, run_theorem_suite)

SCHEMA = "doctrina.report/1"
PASS, FAIL, UNVERIFIABLE = "pass", "fail", "unverifiable"
EXIT_CODES = {PASS: 0, FAIL: 1, UNVERIFIABLE: 2}
EXIT_USAGE = 3
DEFAULT_BUDGET = 200_000

CONSTRUCTIONS = ("groth", "pred", "comprehension", "extensional", "reg", "exact", "reglex", "exlex", "exreg")
ANALYSES = ("free", "choice", "epsilon", "characterize", "epsilon-iff")
CATEGORY_FORMS = ("reg", "reglex", "exact", "exlex", "exreg", "groth", "pred")
_UNDECIDABLE = (MissingStructure, SizeCap, BudgetExceeded)


class UsageError(Exception):
    pass


# reports

@dataclass
class Report:
    command: list
    results: list = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)
    unverifiable: list = field(default_factory=list)
    output: object = None
    seconds: float = 0.0

    def add(self, item, status, detail=None):
        self.results.append({"item": item, "status": status, "detail": plain(detail)})
        if status == UNVERIFIABLE:
            self.unverifiable.append({"item": item, "reason": plain(detail)})

    @property
    def verdict(self):
        kinds = {r["status"] for r in self.results}
        if FAIL in kinds:
            return FAIL
        if PASS in kinds or not kinds - {"vacuous"}:
            return PASS
        return UNVERIFIABLE

    @property
    def exit_code(self):
        return EXIT_CODES[self.verdict]

    def as_dict(self):
        out = {"schema": SCHEMA, "command": self.command, "verdict": self.verdict,
               "results": self.results, "witnesses": plain(self.witnesses),
               "unverifiable": self.unverifiable, "timing": {"seconds": round(self.seconds, 3)}}
        if self.output is not None:
            out["output"] = self.output
        return out

    def to_json(self):
        return json.dumps(self.as_dict(), sort_keys=True, indent=2, ensure_ascii=False)

    def to_text(self):
        lines = [f"# doctrina {' '.join(self.command)}", f"# verdict: {self.verdict}"]
        for r in self.results:
            detail = "" if r["detail"] in (None, "", [], {}) else f": {_short(r['detail'])}"
            lines.append(f"#   [{r['status']}] {r['item']}{detail}")
        for key, val in sorted(self.witnesses.items()):
            lines.append(f"# witness {key}: {_short(plain(val))}")
        if self.unverifiable:
            lines.append(f"# unverifiable: {len(self.unverifiable)} item(s)")
        lines.append(f"# time: {self.seconds:.3f}s")
        text = "\n".join(lines) + "\n"
        if isinstance(self.output, dict):
            text += serialize(self.output)
        return text


def _short(x, limit=160):
    s = json.dumps(x, sort_keys=True, ensure_ascii=False) if not isinstance(x, str) else x
    return s if len(s) <= limit else s[:limit - 3] + "..."


def _status(flag):
    return PASS if flag else (UNVERIFIABLE if flag is None else FAIL)


# references

@dataclass
class Context:
    instance: object = None
    cls_name: str | None = None
    budget: int = DEFAULT_BUDGET
    cap: int = DEFAULT_FIBRE_CAP

    def doctrine(self, ref):
        inst = self.instance
        if inst is not None and ref in inst.names("doctrines"):
            return inst.doctrine(ref)
        try:
            return pack.doctrine(ref)
        except KeyError:
            raise UsageError(f"unknown doctrine {ref!r}") from None

    def is_doctrine(self, ref):
        inst = self.instance
        if inst is not None and ref in inst.names("doctrines"):
            return True
        try:
            pack.doctrine(ref)
            return True
        except KeyError:
            return False

    def category(self, ref):
        """A category from a name or a construction form such as ``reg(P)`` or ``exreg(reg(P))``."""
        m = re.fullmatch(r"\s*([a-z]+)\((.*)\)\s*", ref)
        if m and m.group(1) in CATEGORY_FORMS:
            return self._construct(m.group(1), m.group(2).strip())
        inst = self.instance
        if inst is not None and ref in inst.names("categories"):
            return inst.category(ref)
        if ref in pack.BASES or ref == "FS'":
            return pack.base(ref)
        if self.is_doctrine(ref):
            return self.doctrine(ref).base
        raise UsageError(f"unknown category {ref!r}")

    def _construct(self, form, arg):
        if form in ("reglex", "exlex", "exreg"):
            C = self.category(arg)
            if form == "reglex":
                return reg_lex_direct(C, _structure_of(C))
            if form == "exlex":
                S = _structure_of(C)
                return exact_completion(weak_subobjects_doctrine(C, S, all_morphisms(C)), cap=self.cap)
            _structure_of(C)
            return exact_completion(subobject_doctrine_of(C), cap=self.cap)
        P = self.doctrine(arg)
        if form == "reg":
            return regular_completion(P, cap=self.cap)
        if form == "exact":
            return exact_completion(P, cap=self.cap)
        if form == "groth":
            return groth_category(P, cap=self.cap).category
        return predicates_category(P)

    def left_class(self, P, default="full"):
        name = self.cls_name or default
        inst = self.instance
        if inst is not None and name in inst.names("classes"):
            lam = inst.left_class(name)
            if not set(lam) <= set(P.base.morphisms):
                raise UsageError(f"class {name!r} is not over the base of {P.name!r}")
            return name, lam
        try:
            return name, pack.class_preset(P.base, name, P.structure)
        except KeyError:
            raise UsageError(f"unknown class {name!r}") from None


def _structure_of(C):
    if getattr(C, "structure", None) is None:
        C.structure = ChosenStructure(C)
    return C.structure


def _category_data(C, name):
    w = InstanceWriter(name)
    w.add_category(C, name)
    return w.data


def _doctrine_data(P, name):
    w = InstanceWriter(name)
    w.add_doctrine(P, name)
    return w.data


# verbs

def cmd_check(ctx, args, rep):
    """Validate the instance (or the shipped pack) and, with --class, Λ-existentiality."""
    inst = ctx.instance
    if inst is None:
        for stem in ("C2", "FSprime", "pack"):
            try:
                n = parse_instance(shipped(stem)).build_all()
                rep.add(f"file {stem}.yaml", PASS, {"blocks": n})
            except (ParseError, UnresolvedRef) as exc:
                rep.add(f"file {stem}.yaml", FAIL, str(exc))
        names = list(args.refs) or list(pack.corpus_names())
        doctrines = [(n, ctx.doctrine(n)) for n in names]
    else:
        for C_name in inst.names("categories"):
            C = inst.category(C_name)
            rep.add(f"category {C_name}", PASS, {"objects": len(C.objects), "morphisms": len(C.morphisms)})
        for L_name in inst.names("semilattices") + inst.names("frames"):
            rep.add(f"semilattice {L_name}", PASS, {"elements": len(inst.semilattice(L_name))})
        for c_name in inst.names("classes"):
            lam = inst.left_class(c_name)
            C = inst.category(inst.data["classes"][c_name]["category"])
            try:
                r = verify_left_class(C, C.structure, lam)
                rep.add(f"class {c_name}", _status(r.ok), None if r.ok else r.counterexamples[:1])
            except _UNDECIDABLE as exc:
                rep.add(f"class {c_name}", UNVERIFIABLE, str(exc))
        for s_name in inst.names("selections"):
            P = inst.doctrine(inst.data["selections"][s_name]["doctrine"])
            try:
                restrict_subdoctrine(P, inst.selection(s_name))
                rep.add(f"selection {s_name}", PASS)
            except DoctrinaError as exc:
                rep.add(f"selection {s_name}", FAIL, str(exc))
        names = list(args.refs) or inst.names("doctrines")
        doctrines = [(n, ctx.doctrine(n)) for n in names]
    for name, P in doctrines:
        rep.add(f"doctrine {name}", PASS, {A_id: len(P.fibres[A]) for A_id, A in
                                            ((ident(A), A) for A in P.base.objects)})
        if ctx.cls_name is None:
            continue
        cname, lam = ctx.left_class(P)
        item = f"{cname}-existential {name}"
        try:
            r = verify_left_class(P.base, P.structure, lam)
            if not r.ok:
                rep.add(item, UNVERIFIABLE, {"class axioms": r.counterexamples[:1]})
                continue
            ex = check_lambda_existential(P, lam)
        except _UNDECIDABLE as exc:
            rep.add(item, UNVERIFIABLE, str(exc))
            continue
        detail = {"missing_adjoints": ex.missing_adjoints[:1], "bcc": ex.bcc_failures[:1],
                  "fr": ex.fr_failures[:1], "unverifiable_squares": len(ex.unverifiable)}
        rep.add(item, ex.status, detail)


def cmd_complete(ctx, args, rep):
    P = ctx.doctrine(args.ref)
    cname, lam = ctx.left_class(P)
    comp = existential_completion(P, lam, cap=ctx.cap)
    name = f"{P.name or args.ref}^{cname}"
    ex = check_lambda_existential(comp.doctrine, lam)
    rep.add(f"{cname}-existential {name}", ex.status,
            {"fibres": {ident(A): len(comp.doctrine.fibres[A]) for A in P.base.objects}})
    rep.add(f"unit {args.ref} -> {name}", PASS, {"fibrewise_iso": comp.unit.fibrewise_iso})
    rep.output = _doctrine_data(comp.doctrine, name)


def cmd_construct(ctx, args, rep):
    kind, ref = args.kind, args.ref
    if kind in ("comprehension", "extensional"):
        P = ctx.doctrine(ref)
        Q = comprehension_completion(P) if kind == "comprehension" else extensional_reflection(P).doctrine
        name = f"{kind}({P.name or ref})"
        rep.add(name, PASS, {"objects": len(Q.base.objects), "morphisms": len(Q.base.morphisms),
                             "elements": Q.size()})
        rep.output = _doctrine_data(Q, name)
        return
    name = f"{kind}({ref})"
    C = ctx.category(name)
    rep.add(name, PASS, {"objects": len(C.objects), "morphisms": len(C.morphisms)})
    rep.output = _category_data(C, name)


def cmd_analyze(ctx, args, rep):
    kind, P = args.kind, ctx.doctrine(args.ref)
    if kind == "free":
        cname, lam = ctx.left_class(P)
        fs = existential_free_subdoctrine(P, lam)
        for A in P.base.objects:
            rep.add(f"free {cname} at {ident(A)}", PASS, sorted(ident(x) for x in fs.selection[A]))
        rep.add("free elements form a subdoctrine", _status(fs.closed),
                {"top": fs.top_closed, "meet": fs.meet_closed, "reindex": fs.reindex_closed})
        if fs.witness is not None:
            rep.witnesses["closure"] = fs.witness
    elif kind == "choice":
        lam = ctx.left_class(P)[1] if ctx.cls_name else None
        ch = check_choice_rules(P, lam)
        for rule, val in ch.as_dict().items():
            if val is None and rule == "lambda_rc" and lam is None:
                continue
            rep.add(rule, _status(val))
        rep.witnesses.update(ch.witnesses)
        for u in ch.unverifiable:
            rep.unverifiable.append({"item": "choice", "reason": plain(u)})
    elif kind == "epsilon":
        eps = check_epsilon_operators(P)
        rep.add("epsilon operators", _status(eps.verdict),
                {"missing_products": eps.missing} if eps.verdict is None else None)
        if eps.failures:
            rep.witnesses["epsilon"] = eps.failures[0]
    elif kind == "epsilon-iff":
        eps, iso = epsilon_iff(P)
        rep.add("epsilon operators", _status(eps))
        rep.add("unit into pure completion is iso", _status(iso))
        if eps is None or iso is None:
            rep.add("verdicts agree", UNVERIFIABLE, "a side is undecidable on this instance")
        else:
            rep.add("verdicts agree", _status(eps == iso), {"epsilon": eps, "iso": iso})
    else:
        cname, lam = ctx.left_class(P)
        v = characterize_completion(P, lam)
        rep.add(f"{cname}-existential", PASS if v.existential == "pass" else
                (UNVERIFIABLE if v.existential == "unverifiable" else FAIL), v.existential)
        for key, val in (("a", v.condition_a), ("b", v.condition_b), ("c", v.condition_c)):
            rep.add(f"condition ({key})", _status(val))
        if v.conditions:
            rec = v.reconstruction
            rep.add("reconstruction is an isomorphism", UNVERIFIABLE if rec is None else _status(rec.ok))
        for item in v.unverifiable:
            rep.unverifiable.append({"item": "characterize", "reason": plain(item)})
        rep.witnesses.update(v.witnesses)
        if v.failing_condition:
            rep.witnesses["failing_condition"] = v.failing_condition


def cmd_equiv(ctx, args, rep):
    a, b = args.a, args.b
    plain_names = not any(re.fullmatch(r"[a-z]+\(.*\)", r) for r in (a, b))
    if plain_names and ctx.is_doctrine(a) and ctx.is_doctrine(b) and not _is_category_name(ctx, a):
        iso = doctrine_equivalence(ctx.doctrine(a), ctx.doctrine(b), ctx.budget)
        rep.add(f"doctrines {a} ~ {b}", _status(iso is not None))
        if iso is not None:
            rep.witnesses["objects"] = {ident(k): ident(v) for k, v in iso.obj_map.items()}
        return
    C, D = ctx.category(a), ctx.category(b)
    w = search_equivalence(C, D, ctx.budget)
    sizes = {"left": [len(C.objects), len(C.morphisms)], "right": [len(D.objects), len(D.morphisms)]}
    if isinstance(w, NotFound):
        status = FAIL if w.reason == "proven-absent" else UNVERIFIABLE
        rep.add(f"{a} ~ {b}", status, {"reason": w.reason, "detail": w.detail, **sizes})
        return
    rep.add(f"{a} ~ {b}", PASS, sizes)
    rep.witnesses["objects"] = {ident(k): ident(v) for k, v in w.functor.obj_map.items()}


def _is_category_name(ctx, ref):
    inst = ctx.instance
    return (inst is not None and ref in inst.names("categories")) or ref in pack.BASES


def cmd_suite(ctx, args, rep):
    theorem = args.theorem
    if theorem != "all" and theorem not in THEOREM_IDS:
        raise UsageError(str(UnsupportedTheorem(theorem)))
    bundle = _bundle(ctx, args.bundle)
    reports = run_all(bundle) if theorem == "all" else [run_theorem_suite(bundle, theorem)]
    for r in reports:
        counts = r.counts()
        rep.add(f"{r.theorem} on {r.bundle}", r.status if r.status != "vacuous" else "vacuous", counts)
        if r.failures:
            rep.witnesses[r.theorem] = [c.as_dict() for c in r.failures]
        for c in r.unverifiable:
            rep.unverifiable.append({"item": f"{r.theorem} {c.claim} [{c.subject}]", "reason": plain(c.detail)})


def _bundle(ctx, ref):
    inst = ctx.instance
    if inst is not None and ref in inst.names("doctrines"):
        return doctrine_bundle(inst.doctrine(ref), ref)
    if inst is not None and ref is None:
        return Bundle(inst.name or "instance", [inst.doctrine(n) for n in inst.names("doctrines")])
    try:
        return bundle_for(ref)
    except KeyError:
        raise UsageError(f"unknown bundle {ref!r}") from None


def cmd_examples(ctx, args, rep):
    data = pack_instance()
    text = serialize(data)
    parsed = parse_text(text)
    n = parsed.build_all()
    rep.add("pack round-trip", PASS if serialize(parsed) == text else FAIL, {"blocks": n})
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "pack.yaml").write_text(text)
        for stem in ("C2", "FSprime"):
            (out / f"{stem}.yaml").write_text(shipped(stem).read_text())
        rep.add("written", PASS, sorted(p.name for p in out.glob("*.yaml")))
    else:
        rep.output = data


VERBS = {"check": cmd_check, "complete": cmd_complete, "construct": cmd_construct, "analyze": cmd_analyze,
         "equiv": cmd_equiv, "suite": cmd_suite, "examples": cmd_examples}


# argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common():
    p = argparse.ArgumentParser(add_help=False)
    s = argparse.SUPPRESS
    p.add_argument("--class", dest="cls", default=s, help="left class: a preset (full, pure, identities, "
                   "isomorphisms, monomorphisms) or a class name from the instance")
    p.add_argument("--budget", type=int, default=s, help="search-node budget for equivalence searches")
    p.add_argument("--cap", type=int, default=s, help="size cap for constructed fibres and categories")
    p.add_argument("--format", choices=("text", "json"), default=s)
    p.add_argument("--instance", default=s, help="instance file (YAML or JSON)")
    return p


def build_parser():
    common = _common()
    parser = _Parser(prog="doctrina", parents=[common],
                     description="Build and check doctrine completions on finite instances.")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)
    p = sub.add_parser("check", parents=[common], help="validate every block; with --class, Λ-existentiality")
    p.add_argument("refs", nargs="*")
    p = sub.add_parser("complete", parents=[common], help="existential completion along a class")
    p.add_argument("ref")
    p = sub.add_parser("construct", parents=[common], help="build a derived category or doctrine")
    p.add_argument("kind", choices=CONSTRUCTIONS)
    p.add_argument("ref")
    p = sub.add_parser("analyze", parents=[common], help="free elements, choice rules, ε-operators")
    p.add_argument("kind", choices=ANALYSES)
    p.add_argument("ref")
    p = sub.add_parser("equiv", parents=[common], help="search for an equivalence of two categories")
    p.add_argument("a")
    p.add_argument("b")
    p = sub.add_parser("suite", parents=[common], help="run a theorem id (or all) on a bundle")
    p.add_argument("theorem")
    p.add_argument("bundle", nargs="?")
    p = sub.add_parser("examples", parents=[common], help="emit the example pack")
    p.add_argument("--out")
    return parser


def _settings(ns, environ):
    cap = getattr(ns, "cap", None)
    if cap is None and environ.get("DOCTRINA_CAP"):
        try:
            cap = int(environ["DOCTRINA_CAP"])
        except ValueError:
            raise UsageError(f"DOCTRINA_CAP must be an integer, got {environ['DOCTRINA_CAP']!r}") from None
    return {"cls": getattr(ns, "cls", None), "budget": getattr(ns, "budget", DEFAULT_BUDGET),
            "cap": cap if cap is not None else DEFAULT_FIBRE_CAP, "format": getattr(ns, "format", "text"),
            "instance": getattr(ns, "instance", None)}


def run(argv, environ=None):
    """Parse ``argv`` and execute; returns ``(report or None, exit code, error message)``."""
    environ = os.environ if environ is None else environ
    start = time.perf_counter()
    try:
        ns = build_parser().parse_args(argv)
        opts = _settings(ns, environ)
        inst = None
        if opts["instance"]:
            if not Path(opts["instance"]).exists():
                raise UsageError(f"no such instance file: {opts['instance']}")
            try:
                inst = parse_instance(opts["instance"])
            except (ParseError, UnresolvedRef) as exc:
                if ns.verb != "check":
                    raise UsageError(f"{opts['instance']}: {exc}") from None
                rep = Report(list(argv))
                rep.add(f"file {opts['instance']}", FAIL, str(exc))
                rep.seconds = time.perf_counter() - start
                return rep, rep.exit_code, opts["format"]
        ctx = Context(inst, opts["cls"], opts["budget"], opts["cap"])
        rep = Report(list(argv))
        try:
            VERBS[ns.verb](ctx, ns, rep)
        except _UNDECIDABLE as exc:
            rep.add(ns.verb, UNVERIFIABLE, str(exc))
        except NoAdjoint as exc:
            rep.add(ns.verb, FAIL, str(exc))
        except (UnresolvedRef, UnsupportedTheorem) as exc:
            raise UsageError(str(exc)) from None
        except DoctrinaError as exc:
            rep.add(ns.verb, FAIL, f"{type(exc).__name__}: {exc}")
    except UsageError as exc:
        return None, EXIT_USAGE, str(exc)
    rep.seconds = time.perf_counter() - start
    return rep, rep.exit_code, opts["format"]


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    rep, code, extra = run(argv)
    if rep is None:
        print(f"error: {extra}", file=sys.stderr)
        print("usage: doctrina [--format text|json] <check|complete|construct|analyze|equiv|suite|examples> ...",
              file=sys.stderr)
        return code
    sys.stdout.write(rep.to_json() + "\n" if extra == "json" else rep.to_text())
    return code


if __name__ == "__main__":
    sys.exit(main())
