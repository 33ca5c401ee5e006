"""Two places where a stated bound does not hold as written.

1. For the third construction the two-level vector built from the trace
   bound differs from the actual spectrum; a refined vector matches it.
2. The lower bound m^2 v r on Tr(HH') fails for non-binary families; the
   true minimum comes from spreading incidences as evenly as possible.
"""
import numpy as np

from multiway import build
from multiway import optimality as O

d = build("d3", 7)
cp = O.chain_parameters(d)
mu = O.eigenvalue_vector(d)
gamma = O.trace_rank_bound(cp.r, cp.a, cp.rho, cp.n)
refined = O.trace_refined_bound(cp.r, cp.a, cp.s)
print("spectrum     ", [str(x) for x in mu.values])
print("gamma        ", [str(x) for x in gamma.values], gamma == mu)
print("refined bound", [str(x) for x in refined.values], refined == mu)

# one row, three columns, two matrices each with row sum r = 2
N1 = np.array([[1, 1, 0]])
N2 = np.array([[0, 1, 1]])
H = N1 + N2
v, b, r, m = 1, 3, 2, 2
print(f"\nH = {H.tolist()}: Tr(HH') = {int((H * H).sum())}, bound m^2 v r = {m * m * v * r}")
q, rem = divmod(m * r, b)
print("even-spread minimum:", v * ((b - rem) * q * q + rem * (q + 1) ** 2))
