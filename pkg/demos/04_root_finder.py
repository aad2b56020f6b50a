"""
Zeros of analytic functions in rectangles
=========================================

Argument principle on box edges, quadrisection, Newton polishing.
Multiplicities come from the winding number.
"""

# %%
import numpy as np

from ptspectra.roots import Rectangle, find_roots

f = lambda z: (z - 0.3) ** 2 * (z + 0.5 - 0.2j) * np.sin(3 * z)
rs = find_roots(f, Rectangle(-2, 2, -1, 1))
print("total winding", rs.total_winding)
for r in rs:
    print(f"{r.k:.12f}  m={r.multiplicity}  verified={r.verified}")
