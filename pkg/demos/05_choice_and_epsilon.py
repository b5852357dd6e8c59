"""Choice rules and epsilon operators across the example corpus.

Run: python3 demos/05_choice_and_epsilon.py
"""
from doctrina import pack
from doctrina.analysis import check_choice_rules, check_epsilon_operators, pure_unit_iso
from doctrina.errors import MissingStructure
from doctrina.fincat import all_morphisms

print(f"{'doctrine':14s} {'Λ-RC':6s} {'RC':6s} {'ERC':6s} {'RUC':6s} {'eps':6s} pure-unit-iso")
for P in pack.corpus():
    ch = check_choice_rules(P, all_morphisms(P.base))
    try:
        eps = check_epsilon_operators(P).verdict
    except MissingStructure:
        eps = None
    cells = [ch.lambda_rc, ch.rc, ch.erc, ch.ruc, eps]
    print(f"{P.name:14s} " + " ".join(f"{str(c):6s}" for c in cells), pure_unit_iso(P))
