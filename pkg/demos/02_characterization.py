"""Which doctrines are already completions? Positive and negative cases with witnesses.

Run: python3 demos/02_characterization.py
"""
from doctrina import pack
from doctrina.analysis import characterize_completion
from doctrina.fincat import all_morphisms

for name in ("Psi_C2", "C2-over-b", "C2-over-a", "C2-constant", "Psi_CH3", "Psi_V"):
    P = pack.doctrine(name)
    lam = all_morphisms(P.base)
    v = characterize_completion(P, lam)
    if v.ok:
        print(f"{name:12s} is a completion; free selection sizes "
              f"{ {A: len(xs) for A, xs in v.free.selection.items()} }")
    else:
        cond = v.failing_condition
        print(f"{name:12s} fails condition {cond}; witness {v.witnesses.get(cond)}; "
              f"existential check: {v.existential}")
