"""Supercompact elements and supercoherent frames.

Run: python3 demos/04_frames.py
"""
from doctrina import pack
from doctrina.order import boolean_lattice, check_supercoherent, downset_frame, supercompact_elements

B4 = boolean_lattice("pq")
print("B4 supercompacts:", supercompact_elements(B4))
rep = check_supercoherent(B4)
print("B4 supercoherent:", rep.ok, "diagnosis:", rep.diagnosis)

L = pack.one_plus(B4)
# Adding a new top fixes the top but the meet of the two atoms is still not supercompact.
rep = check_supercoherent(L)
print("1+B4 supercoherent:", rep.ok, "diagnosis:", rep.diagnosis)

# A downset frame is supercoherent and its supercompacts are the principal downsets.
for M in pack.meet_semilattices(4):
    F, eta = downset_frame(M)
    sc = supercompact_elements(F)
    print(f"{M.name:10s} -> frame of size {len(F)}, {len(sc)} supercompacts, "
          f"supercoherent: {check_supercoherent(F).ok}")
