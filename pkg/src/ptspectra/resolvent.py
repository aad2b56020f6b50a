"""Resolvent of the interval operator with separated outer conditions.

``R g = F1 + C_- e_- + C_+ e_+`` where ``F1`` is the Green integral of the
operator without interaction (smooth across 0) and ``e_{+-}`` are the outer
fundamental solutions restricted to either half; the coefficients fix the
interface condition.

Fundamental solutions are kept multiplied by ``h0`` so that ``h0 = 0``
(Dirichlet) needs no special case::

    u_+(x) = k h0 cos k(x - l) + h1 e^{ i theta} sin k(x - l)
    u_-(x) = -k h0 cos k(x + l) + h1 e^{-i theta} sin k(x + l)

``u_+`` satisfies the condition at ``+l`` and ``u_-`` the one at ``-l``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

import numpy as np

from .boundary_conditions import BoundaryTraces, SeparatedParams
from .grid import PiecewiseFunction, apply_second_derivative, cumulative_integral, from_closure
from .interval import ENTIRE, IntervalModel, RegimeError, classify, interval_bc_residuals


class DegenerateError(ValueError):
    """The unscaled formula needs ``h0 != 0``."""


@dataclass(frozen=True, eq=False)
class ResolventContext:
    model: IntervalModel
    k: complex

    def __post_init__(self):
        if not isinstance(self.model.outer, SeparatedParams):
            raise TypeError("resolvent construction needs separated outer conditions")
        k = complex(self.k)
        if k == 0:
            raise ValueError("k = 0 is not supported")
        if k.imag < 0 or (k.imag == 0 and k.real < 0):
            k = -k
        object.__setattr__(self, "k", k)

    @classmethod
    def from_lambda(cls, model: IntervalModel, lam: complex) -> "ResolventContext":
        return cls(model, cmath.sqrt(complex(lam)))

    @property
    def lam(self) -> complex:
        return self.k ** 2

    @property
    def outer(self) -> SeparatedParams:
        return self.model.outer


class Pair(NamedTuple):
    u_minus: object
    u_plus: object
    du_minus: object
    du_plus: object


def _solutions(k, h0, h1, theta, l):
    ep, em = np.exp(1j * theta), np.exp(-1j * theta)
    return Pair(
        lambda x: -k * h0 * np.cos(k * (x + l)) + h1 * em * np.sin(k * (x + l)),
        lambda x: k * h0 * np.cos(k * (x - l)) + h1 * ep * np.sin(k * (x - l)),
        lambda x: k * k * h0 * np.sin(k * (x + l)) + k * h1 * em * np.cos(k * (x + l)),
        lambda x: -k * k * h0 * np.sin(k * (x - l)) + k * h1 * ep * np.cos(k * (x - l)),
    )


def fundamental_pair(ctx: ResolventContext, rescaled: bool = True) -> Pair:
    """``u_{+-}`` and derivatives.  ``rescaled=False`` divides by ``h0``."""
    p = ctx.outer
    if rescaled:
        return _solutions(ctx.k, p.h0, p.h1, p.theta, ctx.model.l)
    if p.h0 == 0:
        raise DegenerateError("h0 = 0: use the rescaled solutions")
    return _solutions(ctx.k, 1.0, p.h1 / p.h0, p.theta, ctx.model.l)


def wronskian_W(ctx: ResolventContext, rescaled: bool = True) -> complex:
    """``W = u_- u_+' - u_-' u_+`` (constant in x)."""
    u = fundamental_pair(ctx, rescaled)
    return complex(u.u_minus(0.0) * u.du_plus(0.0) - u.du_minus(0.0) * u.u_plus(0.0))


def wronskian_closed_form(ctx: ResolventContext) -> complex:
    """``(k/h0^2)(-2 h0 h1 k cos 2kl cos theta + (h1 - h0 k)(h1 + h0 k) sin 2kl)``."""
    p, k, l = ctx.outer, ctx.k, ctx.model.l
    if p.h0 == 0:
        raise DegenerateError("h0 = 0: use wronskian_W(ctx, rescaled=True)")
    return complex(k / p.h0 ** 2 * (-2 * p.h0 * p.h1 * k * cmath.cos(2 * k * l) * math.cos(p.theta)
                                    + (p.h1 - p.h0 * k) * (p.h1 + p.h0 * k) * cmath.sin(2 * k * l)))


def green_kernel(ctx: ResolventContext, x, y):
    """``G(x, y) = -u_-(min) u_+(max) / W`` for the operator without interaction."""
    u = fundamental_pair(ctx)
    W = wronskian_W(ctx)
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    lo, hi = np.minimum(x, y), np.maximum(x, y)
    return -u.u_minus(lo) * u.u_plus(hi) / W


# -- defect elements and the interface matrix ------------------------------------------

def defect_basis(ctx: ResolventContext) -> Pair:
    """Fundamental solutions with ``theta`` replaced by ``-theta`` and ``h1/h0`` normalization.

    These are the literal textbook-style defect elements; they satisfy the
    adjoint outer conditions, so they are used for the closed-form
    determinant only.  See ``domain_defect_basis`` for the ones entering
    ``apply_resolvent``.
    """
    p = ctx.outer
    if p.h0 == 0:
        raise DegenerateError("h0 = 0: the literal defect elements need h1/h0")
    return _solutions(ctx.k, 1.0, p.h1 / p.h0, -p.theta, ctx.model.l)


def domain_defect_basis(ctx: ResolventContext) -> Pair:
    """``e_- = u_-`` on ``x < 0`` and ``e_+ = u_+`` on ``x > 0`` (rescaled by h0)."""
    return fundamental_pair(ctx)


def _interface(e: Pair, phi: float) -> np.ndarray:
    a, b = np.exp(1j * phi), np.exp(-1j * phi)
    return np.array([[-a * e.u_minus(0.0), e.u_plus(0.0)],
                     [-b * e.du_minus(0.0), e.du_plus(0.0)]], dtype=complex)


def m_matrix(ctx: ResolventContext) -> np.ndarray:
    """Interface matrix built from ``defect_basis``.

    At ``phi = pi/2`` its determinant is ``2 k^2 (h1/h0) sin theta``.
    """
    return _interface(defect_basis(ctx), ctx.model.phi)


def interface_matrix(ctx: ResolventContext) -> np.ndarray:
    """Interface matrix built from ``domain_defect_basis``; ``det = k * secular_separated``."""
    return _interface(domain_defect_basis(ctx), ctx.model.phi)


# -- applying the resolvent ----------------------------------------------------------

class ResolventResult(NamedTuple):
    function: PiecewiseFunction
    c_minus: complex
    c_plus: complex
    green_part: PiecewiseFunction


def _check_grid(ctx: ResolventContext, g: PiecewiseFunction):
    l = ctx.model.l
    if not (math.isclose(g.a, -l) and math.isclose(g.b, l)):
        raise ValueError(f"g must live on (-{l}, {l})")


def green_apply(ctx: ResolventContext, g: PiecewiseFunction) -> PiecewiseFunction:
    """``F1 = int G(., y) g(y) dy`` by fourth-order running integrals on both halves."""
    _check_grid(ctx, g)
    u = fundamental_pair(ctx)
    W = wronskian_W(ctx)
    if abs(W) <= 1e-13 * max(abs(ctx.k), 1.0) ** 3:
        raise RegimeError(f"W(k) = 0 at k={ctx.k}: lambda is an eigenvalue without interaction")
    xl, xr = g.x_left, g.x_right
    um_l, um_r = u.u_minus(xl), u.u_minus(xr)
    up_l, up_r = u.u_plus(xl), u.u_plus(xr)

    def cum(y, x):
        return cumulative_integral(y, x[1] - x[0])

    # I_-(x) = int_{-l}^x u_- g,  I_+(x) = int_x^l u_+ g
    Im_l = cum(um_l * g.left, xl)
    Im_r = Im_l[-1] + cum(um_r * g.right, xr)
    c_r = cum(up_r * g.right, xr)
    Ip_r = c_r[-1] - c_r
    c_l = cum(up_l * g.left, xl)
    Ip_l = Ip_r[0] + c_l[-1] - c_l

    left = -(up_l * Im_l + um_l * Ip_l) / W
    right = -(up_r * Im_r + um_r * Ip_r) / W
    d_l = -(u.du_plus(xl[[0, -1]]) * Im_l[[0, -1]] + u.du_minus(xl[[0, -1]]) * Ip_l[[0, -1]]) / W
    d_r = -(u.du_plus(xr[[0, -1]]) * Im_r[[0, -1]] + u.du_minus(xr[[0, -1]]) * Ip_r[[0, -1]]) / W
    traces = BoundaryTraces(left[-1], d_l[1], right[0], d_r[0])
    ends = BoundaryTraces(left[0], d_l[0], right[-1], d_r[1])
    return PiecewiseFunction(g.a, g.b, left, right, traces, ends, g.fd_order)


def apply_resolvent(ctx: ResolventContext, g: PiecewiseFunction, det_tol: float = 1e-13) -> ResolventResult:
    """``(L_phi - lambda)^{-1} g`` for ``lambda`` in the resolvent set."""
    cls = classify(ctx.model)
    if cls.tag == ENTIRE:
        raise RegimeError(f"spectrum is {cls.tag}: no resolvent")
    F1 = green_apply(ctx, g)
    M = interface_matrix(ctx)
    if abs(np.linalg.det(M)) <= det_tol * np.prod(np.linalg.norm(M, axis=1)):
        raise RegimeError(f"lambda={ctx.lam} is an eigenvalue")
    phi = ctx.model.phi
    f0 = 0.5 * (F1.traces.val_minus + F1.traces.val_plus)
    d0 = 0.5 * (F1.traces.der_minus + F1.traces.der_plus)
    rhs = np.array([(np.exp(1j * phi) - 1) * f0, (np.exp(-1j * phi) - 1) * d0])
    cm, cp = np.linalg.solve(M, rhs)
    e = domain_defect_basis(ctx)
    xl, xr = g.x_left, g.x_right
    left = F1.left + cm * e.u_minus(xl)
    right = F1.right + cp * e.u_plus(xr)
    t, s = F1.traces, F1.endpoint_traces
    traces = BoundaryTraces(t.val_minus + cm * e.u_minus(0.0), t.der_minus + cm * e.du_minus(0.0),
                            t.val_plus + cp * e.u_plus(0.0), t.der_plus + cp * e.du_plus(0.0))
    l = ctx.model.l
    ends = BoundaryTraces(s.val_minus + cm * e.u_minus(-l), s.der_minus + cm * e.du_minus(-l),
                          s.val_plus + cp * e.u_plus(l), s.der_plus + cp * e.du_plus(l))
    f = replace(F1, left=left, right=right, traces=traces, endpoint_traces=ends)
    return ResolventResult(f, complex(cm), complex(cp), F1)


def resolvent_residual(ctx: ResolventContext, g: PiecewiseFunction, Rg: PiecewiseFunction) -> dict:
    """Equation residual ``||(L - lambda) Rg - g|| / ||g||`` and boundary residuals."""
    r = apply_second_derivative(Rg) - ctx.lam * Rg - g
    out = {"equation": r.norm() / g.norm()}
    out.update(interval_bc_residuals(ctx.model, Rg))
    return out


def coefficient_bound(ctx: ResolventContext, grid_n: int = 2048) -> float:
    """Constant ``C`` with ``|C_-| + |C_+| <= C ||g||`` for all g."""
    l = ctx.model.l
    y = np.linspace(-l, l, 2 * grid_n + 1)
    G0 = green_kernel(ctx, 0.0, y)
    u = fundamental_pair(ctx)
    W = wronskian_W(ctx)
    # d/dx G(x, y) at x = 0, taking the side of y into account
    dG0 = np.where(y >= 0, -u.du_minus(0.0) * u.u_plus(y), -u.u_minus(y) * u.du_plus(0.0)) / W
    w = np.full(y.size, y[1] - y[0])
    w[[0, -1]] *= 0.5
    n0 = math.sqrt(float(w @ np.abs(G0) ** 2))
    n1 = math.sqrt(float(w @ np.abs(dG0) ** 2))
    phi = ctx.model.phi
    rhs = math.hypot(abs(cmath.exp(1j * phi) - 1) * n0, abs(cmath.exp(-1j * phi) - 1) * n1)
    Minv = np.linalg.inv(interface_matrix(ctx))
    return math.sqrt(2) * float(np.linalg.norm(Minv, 2)) * rhs


# -- kernel discretization --------------------------------------------------------

def resolvent_kernel_matrix(ctx: ResolventContext, grid_n: int = 256) -> np.ndarray:
    """Symmetrically weighted Nystrom matrix of the full resolvent kernel.

    Nodes are the grid points of both halves (``0-`` and ``0+`` separately)
    with trapezoidal weights.  Singular values approximate those of R.
    """
    l = ctx.model.l
    xl = np.linspace(-l, 0.0, grid_n + 1)
    xr = np.linspace(0.0, l, grid_n + 1)
    x = np.concatenate([xl, xr])
    left = np.concatenate([np.ones(grid_n + 1, bool), np.zeros(grid_n + 1, bool)])
    h = l / grid_n
    w = np.full(x.size, h)
    w[[0, grid_n, grid_n + 1, -1]] = h / 2

    u = fundamental_pair(ctx)
    W = wronskian_W(ctx)
    K = green_kernel(ctx, x[:, None], x[None, :])
    dG0 = np.where(x >= 0, -u.du_minus(0.0) * u.u_plus(x), -u.u_minus(x) * u.du_plus(0.0)) / W
    G0 = green_kernel(ctx, 0.0, x)
    phi = ctx.model.phi
    rhs = np.vstack([(np.exp(1j * phi) - 1) * G0, (np.exp(-1j * phi) - 1) * dG0])
    c = np.linalg.solve(interface_matrix(ctx), rhs)
    K = K + np.where(left, u.u_minus(x), 0)[:, None] * c[0][None, :] \
        + np.where(left, 0, u.u_plus(x))[:, None] * c[1][None, :]
    sw = np.sqrt(w)
    return sw[:, None] * K * sw[None, :]


def kernel_singular_values(ctx: ResolventContext, grid_n: int = 256, count: Optional[int] = None) -> np.ndarray:
    s = np.linalg.svd(resolvent_kernel_matrix(ctx, grid_n), compute_uv=False)
    return s if count is None else s[:count]


def singular_value_decay_rate(s: np.ndarray, start: int = 10, stop: int = 60) -> float:
    """Least-squares slope of ``log s_n`` against ``log n`` for ``start <= n < stop``."""
    n = np.arange(start, stop)
    slope, _ = np.polyfit(np.log(n), np.log(s[start - 1:stop - 1]), 1)
    return float(slope)


def default_source(l: float, grid_n: int = 2048, fd_order: int = 4, center: float = 0.2,
                   width: float = 0.25) -> PiecewiseFunction:
    """Smooth Gaussian test function on (-l, l)."""
    fn = lambda x: np.exp(-((x - center) / width) ** 2)
    dfn = lambda x: -2 * (x - center) / width ** 2 * fn(x)
    return from_closure(fn, dfn, -l, l, grid_n, fd_order)


def resolvent_identity_residual(model: IntervalModel, lam1: complex, lam2: complex,
                                g: PiecewiseFunction) -> float:
    """``||R1 g - R2 g - (lam1 - lam2) R1 R2 g|| / ||R1 g - R2 g||``."""
    c1 = ResolventContext.from_lambda(model, lam1)
    c2 = ResolventContext.from_lambda(model, lam2)
    r1 = apply_resolvent(c1, g).function
    r2 = apply_resolvent(c2, g).function
    r12 = apply_resolvent(c1, r2).function
    diff = r1 - r2
    return (diff - (lam1 - lam2) * r12).norm() / diff.norm()

