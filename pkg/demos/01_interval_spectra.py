"""
Interval spectra and the three regimes
======================================

A point interaction at the origin of (-l, l), an outer condition at the
ends.  Depending on the interaction angle the spectrum is discrete, empty,
or the whole complex plane.
"""

# %%
import math

import numpy as np

from ptspectra import IntervalModel, SeparatedParams, SymmetricParams, classify
from ptspectra.interval import boundary_determinant, eigenvalues_in_region
from ptspectra.roots import Rectangle

# %% Dirichlet ends, no interaction: k = m pi / 2
m = IntervalModel(1.0, 0.0, SymmetricParams.dirichlet())
rs = eigenvalues_in_region(m, Rectangle(0.1, 10, -1, 1))
for r in rs:
    print(f"k = {r.k.real:.12f}  (m pi/2 = {round(r.k.real / (math.pi / 2))})  |f| = {r.residual:.1e}")

# %% a generic interaction angle keeps the spectrum discrete and PT symmetric
m = IntervalModel(1.0, 0.9, SeparatedParams(1.0, 1.0, 2.0))
lam = eigenvalues_in_region(m, Rectangle(0.05, 6, -3, 3.1)).values ** 2
print(np.round(np.sort_complex(lam), 6))

# %% at phi = pi/2 the regime is decided by the outer condition
for outer in (SymmetricParams.dirichlet(), SeparatedParams(math.pi / 4, 1, 1), SeparatedParams(0.0, 1, 1)):
    m = IntervalModel(1.0, math.pi / 2, outer)
    c = classify(m)
    k = np.array([0.5, 2 + 1j, 4 - 2j])
    print(f"{type(outer).__name__:16s} {c.tag:20s} normalized |det| = "
          + " ".join(f"{v:.1e}" for v in boundary_determinant(m, k, normalized=True)))
