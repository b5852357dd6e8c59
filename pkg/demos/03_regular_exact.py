"""Regular and exact completions of small doctrines, compared by equivalence search.

Run: python3 demos/03_regular_exact.py
"""
import time

from doctrina import pack
from doctrina.fincat import ChosenStructure, search_equivalence, skeleton
from doctrina.regexact import ex_reg, exact_completion, reg_lex_direct, regular_completion

C = pack.base("C2")
start = time.perf_counter()
R = regular_completion(pack.doctrine("Psi_C2"))
D = reg_lex_direct(C, C.structure)
w = search_equivalence(R, D)
print(f"Reg(Psi_C2): {len(R.objects)} objects, {len(R.morphisms)} arrows")
print(f"reg/lex(C2): {len(D.objects)} objects; equivalent: {bool(w)} ({time.perf_counter() - start:.2f}s)")

for name in ("C2-over-b", "terminal-CH3", "Psi_V"):
    P = pack.doctrine(name)
    T = exact_completion(P)
    Rp = regular_completion(P)
    Rp.structure = ChosenStructure(Rp)
    E = ex_reg(Rp)
    print(f"{name:13s} T_P skeleton {len(skeleton(T).objects)}, ex/reg skeleton {len(skeleton(E).objects)}, "
          f"equivalent: {bool(search_equivalence(T, E))}")
