"""Exclude a single small box of noperthedron orientations.

A floating-point search proposes a witness, then the exact rational
checker decides.  Run: python demos/exclude_one_box.py
"""
from gmpy2 import mpq

from rupert.builder import propose_global_witness, propose_local_witness
from rupert.exclusion.rational import RationalSolid, global_check_rational, local_check_rational
from rupert.solids import get_solid

nop = get_solid("noperthedron")
nop_q = RationalSolid(nop)
eps = mpq(1, 2000)

# a generic orientation pair, far from any symmetry
center = (mpq(1, 10), mpq(7, 10), mpq(3, 10), mpq(12, 10), mpq(1, 2))
w = propose_global_witness(nop, [float(x) for x in center], float(eps))
res = global_check_rational(nop_q, center, eps, w)
print("generic box: witness", w, "->", "excluded" if res.excluded else f"inconclusive at {res.step}")

# a near-diagonal box, where only the local theorem applies
diag = (mpq(1, 10), mpq(7, 10), mpq(1, 10), mpq(7, 10), mpq(0))
lw = propose_local_witness(nop, [float(x) for x in diag], 3e-4)
res = local_check_rational(nop_q, diag, mpq(3, 10000), lw)
print("diagonal box: local witness p,q =", lw.p, lw.q, "->", "excluded" if res.excluded else res.step)
