"""Complete a small doctrine over the two-object chain a -> b and inspect the result.

Run: python3 demos/01_completion.py
"""
from doctrina import pack
from doctrina.analysis import characterize_completion, doctrine_equivalence, free_element_report
from doctrina.completion import existential_completion
from doctrina.doctrine import check_lambda_existential
from doctrina.fincat import all_morphisms

C = pack.base("C2")
lam = all_morphisms(C)

# The trivial doctrine has a one-point fibre everywhere; completing it along
# every arrow should give back the weak subobjects of the base.
P = pack.doctrine("C2-trivial")
comp = existential_completion(P, lam)
Q = comp.doctrine
print("fibre sizes after completion:", {A: len(Q.fibres[A]) for A in C.objects})
print("matches weak subobjects:", doctrine_equivalence(Q, pack.doctrine("Psi_C2")) is not None)

# Elements are canonical (arrow, element) pairs; the unit sends x to (id, x).
for A in C.objects:
    print(f"  fibre over {A}:", list(Q.fibres[A]))

print("left adjoints along every arrow, with Beck-Chevalley and Frobenius:",
      check_lambda_existential(Q, lam).holds)

free = free_element_report(Q, lam)
print("free elements:", sorted(k for k, v in free.free.items() if v))

# The completed doctrine passes the characterization and rebuilds itself.
v = characterize_completion(Q, lam)
print("characterization:", "ok" if v.ok else f"fails ({v.failing_condition})")

# A bigger source: a three-element chain over b.
comp3 = existential_completion(pack.doctrine("C2-over-b3"), lam)
print("C2-over-b3 completed fibres:", {A: len(comp3.doctrine.fibres[A]) for A in C.objects})
