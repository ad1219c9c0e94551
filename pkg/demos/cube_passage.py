"""The cube is Rupert: certify a passage and a Nieuwland bound, then draw it.

Run: python demos/cube_passage.py [out.svg]
"""
import sys

from gmpy2 import mpq

from rupert.find import RupertSolution, certify_solution, export_projection, nieuwland_lower
from rupert.solids import get_solid

cube = get_solid("cube")
# inner view along a face diagonal; outer view along the space diagonal
angles = (0, 0, mpq(785398163397, 10**12), mpq(955316618124, 10**12), 0)
sol = RupertSolution.make(angles)
print("certified:", certify_solution(cube, sol))
nu = nieuwland_lower(cube, sol)
print("Nieuwland lower bound:", nu, f"~ {float(nu):.6f}")

out = sys.argv[1] if len(sys.argv) > 1 else "cube_passage.svg"
export_projection(cube, angles[2], angles[3], alpha=angles[4], fmt="svg", out=out,
                  inner=(angles[0], angles[1]))
print("wrote", out)
