"""Whole-line operator ``L_phi`` with the interaction
``psi(0+) = e^{i phi} psi(0-)``, ``psi'(0+) = e^{-i phi} psi'(0-)``.

For ``phi = +-pi/2`` every ``lambda`` off ``[0, inf)`` is an eigenvalue; for
other ``phi`` there are none.  The metric ``Theta_phi = I - i sin(phi) P_sign P``
intertwines ``L_phi`` with its adjoint ``L_{-phi}``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from typing import Callable, Literal, NamedTuple, Optional

import numpy as np

from .boundary_conditions import (
    TOL,
    BoundaryTraces,
    ConnectedParams,
    adjoint_connected,
    bc_residual_connected,
    connected_matrix,
    reduce_angle,
)
from .grid import (
    PiecewiseFunction,
    apply_second_derivative,
    decay_truncation,
    from_closure,
    quadrature_weights,
    round_grid_n,
)


@dataclass(frozen=True)
class LineModel:
    phi: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "phi", reduce_angle(self.phi))

    @property
    def interaction(self) -> ConnectedParams:
        return ConnectedParams(phi=self.phi)

    @property
    def adjoint(self) -> "LineModel":
        return LineModel(-self.phi)

    @property
    def exceptional(self) -> int:
        """+1 or -1 when ``phi = +-pi/2``, else 0."""
        if abs(self.phi - math.pi / 2) < TOL:
            return 1
        if abs(self.phi + math.pi / 2) < TOL:
            return -1
        return 0


@dataclass(frozen=True)
class EigenBranch:
    kind: Literal["psi", "phi_branch", "zeta"]
    sign: int
    k: complex

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.kind not in ("psi", "phi_branch", "zeta"):
            raise ValueError(f"unknown branch {self.kind!r}")
        object.__setattr__(self, "k", complex(self.k))

    @property
    def square_integrable(self) -> bool:
        k = self.k
        if self.kind == "psi":
            return k.real > 0
        if self.kind == "phi_branch":
            return k.real < 0
        return abs(k.real) < TOL and k.imag > 0

    @property
    def decay_rate(self) -> float:
        return abs(self.k.real) if self.kind != "zeta" else self.k.imag


def _branch_closures(br: EigenBranch):
    k, c = br.k, 1j * br.sign
    # left/right exponents: f = e^{sl x} on x<0, c e^{sr x} on x>0
    sl, sr = {"psi": (k, -k), "phi_branch": (-k, k), "zeta": (-1j * k, 1j * k)}[br.kind]
    sl, sr = np.clongdouble(sl), np.clongdouble(sr)
    fn = (lambda x: np.exp(sl * x), lambda x: c * np.exp(sr * x))
    dfn = (lambda x: sl * np.exp(sl * x), lambda x: c * sr * np.exp(sr * x))
    return fn, dfn


def line_grid_n(k: complex, truncation: float, grid_n: int = 4096, fd_order: int = 6,
                kh: float = 0.025) -> int:
    """Samples per side resolving ``e^{kx}`` to about ``(|k| h)^p`` relative accuracy."""
    h = kh / max(abs(k), 1e-300)
    return round_grid_n(max(grid_n, math.ceil(truncation / h)), fd_order)


def eigenfunction_line(br: EigenBranch, grid_n: int = 4096, fd_order: int = 6,
                       truncation: Optional[float] = None):
    """Explicit eigenfunction of ``L_{+-}`` on a truncated line and its eigenvalue.

    Returns ``(f, eigenvalue)``; ``eigenvalue = -k^2`` for the ``psi`` and
    ``phi_branch`` families and ``k^2`` for ``zeta``.  The truncation defaults
    to the half-width where the function has decayed below 1e-14.
    """
    if not br.square_integrable:
        raise ValueError(f"branch {br.kind} with k={br.k} is not square integrable")
    X = truncation if truncation is not None else decay_truncation(br.decay_rate)
    n = line_grid_n(br.k, X, grid_n, fd_order)
    fn, dfn = _branch_closures(br)
    f = from_closure(fn, dfn, -X, X, n, fd_order, extended=True)
    lam = br.k ** 2 if br.kind == "zeta" else -br.k ** 2
    return f, lam


def point_spectrum_member(lam: complex, model: LineModel, grid_n: int = 4096,
                          fd_order: int = 6) -> Optional[PiecewiseFunction]:
    """Eigenfunction of ``model`` at ``lam`` if ``lam`` is in the point spectrum, else None."""
    lam = complex(lam)
    sgn = model.exceptional
    on_ray = abs(lam.imag) == 0 and lam.real >= 0
    if sgn == 0 or on_ray:
        return None
    k = cmath.sqrt(-lam)
    f, _ = eigenfunction_line(EigenBranch("psi", sgn, k), grid_n, fd_order)
    return f


def matching_determinant(model: LineModel, k: complex) -> complex:
    """Determinant of the interface system for ``c1 e^{kx}`` (x<0), ``c2 e^{-kx}`` (x>0).

    Equals ``k e^{-i phi} (e^{2 i phi} + 1)``; it vanishes only at ``phi = +-pi/2``.
    """
    B = connected_matrix(model.interaction)
    # rows: value and derivative matching; columns: c1, c2
    A = np.array([[B[0, 0], -1.0], [B[1, 1] * k, k]])
    return complex(np.linalg.det(A))


def eigen_residual(f: PiecewiseFunction, lam: complex) -> float:
    """``||L f - lam f|| / ||f||`` with the finite-difference ``L``."""
    r = apply_second_derivative(f) - f * lam
    return r.norm() / f.norm()


def interface_residual(f: PiecewiseFunction, model: LineModel) -> float:
    return bc_residual_connected(f.traces, connected_matrix(model.interaction))


# -- metric operator -----------------------------------------------------------

def metric_spectrum(model: LineModel) -> tuple[float, float]:
    s = math.sin(model.phi)
    return 1 + s, 1 - s


def metric_invertible(model: LineModel) -> bool:
    """False exactly at ``phi = +-pi/2`` (same angle tolerance as ``exceptional``).

    Testing ``1 - |sin phi|`` instead would flip the flag within about
    1e-6 of the exceptional angles because the eigenvalue vanishes quadratically.
    """
    return model.exceptional == 0


def _check_symmetric(f: PiecewiseFunction):
    if abs(f.a + f.b) > 1e-12 * f.b:
        raise ValueError("metric needs a grid symmetric about 0")


def metric_apply(model: LineModel, f: PiecewiseFunction) -> PiecewiseFunction:
    """``(Theta f)(x) = f(x) - i sin(phi) sign(x) f(-x)``.

    The reflected term's derivative picks up a factor -1 from ``d/dx f(-x)``.
    """
    _check_symmetric(f)
    s = 1j * math.sin(model.phi)
    left = f.left + s * f.right[::-1]
    right = f.right - s * f.left[::-1]
    t, e = f.traces, f.endpoint_traces
    traces = BoundaryTraces(
        t.val_minus + s * t.val_plus,
        t.der_minus - s * t.der_plus,
        t.val_plus - s * t.val_minus,
        t.der_plus + s * t.der_minus,
    )
    ends = BoundaryTraces(
        e.val_minus + s * e.val_plus,
        e.der_minus - s * e.der_plus,
        e.val_plus - s * e.val_minus,
        e.der_plus + s * e.der_minus,
    )
    return replace(f, left=left, right=right, traces=traces, endpoint_traces=ends)


def pt_map(f: PiecewiseFunction) -> PiecewiseFunction:
    """``(PT f)(x) = conj(f(-x))`` on a symmetric grid."""
    _check_symmetric(f)
    t, e = f.traces, f.endpoint_traces
    c = np.conj
    return replace(
        f, left=c(f.right[::-1]), right=c(f.left[::-1]),
        traces=BoundaryTraces(c(t.val_plus), -c(t.der_plus), c(t.val_minus), -c(t.der_minus)),
        endpoint_traces=BoundaryTraces(c(e.val_plus), -c(e.der_plus), c(e.val_minus), -c(e.der_minus)),
    )


class IntertwiningResult(NamedTuple):
    commutator: float
    adjoint_bc: float

    @property
    def total(self) -> float:
        return max(self.commutator, self.adjoint_bc)


def intertwining_residual(model: LineModel, f: PiecewiseFunction,
                          domain_tol: float = 1e-10) -> IntertwiningResult:
    """Check ``L* Theta f = Theta L f`` for ``f`` in the domain of ``L_phi``.

    Returns the relative commutator norm on the grid and the residual of
    ``Theta f`` in the adjoint interface condition.
    """
    if interface_residual(f, model) > domain_tol:
        raise ValueError("f does not satisfy the interface conditions of the model")
    tf = metric_apply(model, f)
    lhs = apply_second_derivative(tf)
    rhs = metric_apply(model, apply_second_derivative(f))
    comm = (lhs - rhs).norm() / f.norm()
    adj = adjoint_connected(model.interaction)
    return IntertwiningResult(comm, bc_residual_connected(tf.traces, adj.matrix, plus_to_minus=True))


def bc_compatible_gaussian(model: LineModel, a0: complex = 1.0, a1: complex = 0.5, width: float = 1.0,
                           grid_n: int = 4096, fd_order: int = 4) -> PiecewiseFunction:
    """``(a0 + a1 x) e^{-x^2/w^2}`` on the left and ``(e^{i phi} a0 + e^{-i phi} a1 x) e^{-x^2/w^2}`` on the right.

    Lies in the domain of ``L_phi``; truncated where the Gaussian is below 1e-16.
    """
    X = math.sqrt(-math.log(1e-16)) * width + 1.0
    ep, em = np.exp(1j * model.phi), np.exp(-1j * model.phi)
    w2 = width ** 2

    def make(c0, c1):
        fn = lambda x: (c0 + c1 * x) * np.exp(-x * x / w2)
        dfn = lambda x: (c1 - 2 * x / w2 * (c0 + c1 * x)) * np.exp(-x * x / w2)
        return fn, dfn

    (fl, dl), (fr, dr) = make(a0, a1), make(ep * a0, em * a1)
    return from_closure((fl, fr), (dl, dr), -X, X, grid_n, fd_order)


# -- Weyl sequences --------------------------------------------------------------

@dataclass(frozen=True)
class Bump:
    """Smooth profile supported in (-1, 1) with its first two derivatives."""

    f: Callable
    d1: Callable
    d2: Callable


def _std(t):
    t = np.asarray(t, dtype=float)
    inside = np.abs(t) < 1
    q = np.where(inside, 1 - t * t, 1.0)
    return inside, q


def _bump(t):
    inside, q = _std(t)
    return np.where(inside, np.exp(-1 / q), 0.0)


def _bump_d1(t):
    inside, q = _std(t)
    t = np.asarray(t, dtype=float)
    return np.where(inside, -2 * t / q ** 2 * np.exp(-1 / q), 0.0)


def _bump_d2(t):
    inside, q = _std(t)
    t = np.asarray(t, dtype=float)
    g1 = -2 * t / q ** 2
    g2 = -2 / q ** 2 - 8 * t * t / q ** 3
    return np.where(inside, (g2 + g1 * g1) * np.exp(-1 / q), 0.0)


STANDARD_BUMP = Bump(_bump, _bump_d1, _bump_d2)


def weyl_sequence(k: float, n: int, bump: Bump = STANDARD_BUMP, points_per_unit: Optional[float] = None,
                  fd_order: int = 4) -> PiecewiseFunction:
    """Normalized ``e^{ikx} bump(x/n - n)``, supported in ``(n(n-1), n(n+1))``."""
    if n < 2:
        raise ValueError("n must be at least 2 so that the support avoids 0")
    b = n * (n + 1) + 1.0
    if points_per_unit is None:
        points_per_unit = max(256 / n, 40 * max(abs(k), 1.0) / (2 * math.pi))
    grid_n = round_grid_n(b * points_per_unit, fd_order)
    fn = lambda x: np.exp(1j * k * x) * bump.f(x / n - n)
    dfn = lambda x: np.exp(1j * k * x) * (1j * k * bump.f(x / n - n) + bump.d1(x / n - n) / n)
    f = from_closure(fn, dfn, -b, b, grid_n, fd_order)
    return f * (1 / f.norm())


class WeylResidual(NamedTuple):
    residual: float
    bound: float


def weyl_residual(k: float, n: int, bump: Bump = STANDARD_BUMP, samples: int = 4096) -> WeylResidual:
    """``||(L - k^2) psi_n||`` and the bound ``2|k| ||b_n'||/||b_n|| + ||b_n''||/||b_n||``.

    Evaluated with exact bump derivatives; ``(L - k^2)(e^{ikx} b_n) = -e^{ikx}(b_n'' + 2ik b_n')``.
    """
    t = np.linspace(-1.0, 1.0, samples + 1)
    w = quadrature_weights(samples, 2.0 / samples, 4)
    f0, f1, f2 = bump.f(t), bump.d1(t) / n, bump.d2(t) / n ** 2
    # the Jacobian dx = n dt cancels in every ratio
    norm0 = math.sqrt(w @ f0 ** 2)
    res = math.sqrt(w @ np.abs(f2 + 2j * k * f1) ** 2) / norm0
    bound = 2 * abs(k) * math.sqrt(w @ f1 ** 2) / norm0 + math.sqrt(w @ f2 ** 2) / norm0
    return WeylResidual(res, bound)
