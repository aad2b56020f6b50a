"""
The interaction on the whole line
=================================

Square-integrable eigenfunctions exist for every lambda off [0, inf) when
phi = +-pi/2 and for none otherwise.  The metric operator has spectrum
{1 - sin phi, 1 + sin phi} and collapses at the same angles.
"""

# %%
import math

from ptspectra.line_model import (
    LineModel,
    bc_compatible_gaussian,
    eigen_residual,
    interface_residual,
    intertwining_residual,
    metric_invertible,
    metric_spectrum,
    point_spectrum_member,
    weyl_residual,
)

# %% eigenfunctions at phi = pi/2
model = LineModel(math.pi / 2)
for lam in (-1.0, 2 + 3j, -0.2 - 0.05j):
    f = point_spectrum_member(lam, model)
    print(lam, f"interface {interface_residual(f, model):.1e}  eigen {eigen_residual(f, lam):.1e}")
print("phi = 0:", point_spectrum_member(-1.0, LineModel(0.0)))

# %% metric operator
for phi in (0.0, math.pi / 6, math.pi / 2 - 1e-6, math.pi / 2):
    m = LineModel(phi)
    f = bc_compatible_gaussian(m, grid_n=2048)
    print(f"phi={phi:.6f} spectrum={metric_spectrum(m)} invertible={metric_invertible(m)} "
          f"commutator={intertwining_residual(m, f).commutator:.1e}")

# %% Weyl sequences: the residual halves when n doubles
prev = None
for n in (4, 8, 16, 32, 64):
    r = weyl_residual(1.0, n)
    print(n, f"{r.residual:.4e} <= {r.bound:.4e}", "" if prev is None else f"ratio {r.residual / prev:.3f}")
    prev = r.residual
