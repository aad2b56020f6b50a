"""
Resolvent with separated outer conditions
=========================================

R g = Green integral + defect correction.  Check the equation, the
boundary conditions, the resolvent identity, and the algebraic decay of
the singular values of R.
"""

# %%
from ptspectra import IntervalModel, SeparatedParams
from ptspectra.resolvent import (
    ResolventContext,
    apply_resolvent,
    default_source,
    kernel_singular_values,
    resolvent_identity_residual,
    resolvent_residual,
    singular_value_decay_rate,
)

model = IntervalModel(1.0, 0.4, SeparatedParams(0.7, 1.0, 0.6))
ctx = ResolventContext(model, 0.9 + 0.2j)
g = default_source(1.0, 2048)

# %%
res = apply_resolvent(ctx, g)
print("C-, C+ =", res.c_minus, res.c_plus)
print({k: f"{v:.1e}" for k, v in resolvent_residual(ctx, g, res.function).items()})

# %%
print(f"resolvent identity: {resolvent_identity_residual(model, 0.5 + 0.4j, -1.2 + 0.8j, g):.1e}")

# %% singular values fall like n^-2: compact, but slowly
s = kernel_singular_values(ctx, 256)
print("s_1, s_10, s_60 =", s[0], s[9], s[59])
print(f"decay rate {singular_value_decay_rate(s):.2f}")
