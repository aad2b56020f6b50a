"""Sampled complex functions on ``(a, 0) U (0, b)`` with one-sided traces at 0.

Each side carries ``grid_n + 1`` equispaced nodes including both ends; the
node at 0 holds the one-sided limit.  Traces are stored separately from the
samples and are never estimated across the junction.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .boundary_conditions import BoundaryTraces

FD_ORDERS = (2, 4, 6)


@dataclass(frozen=True)
class GridConfig:
    grid_n: int = 2048
    truncation: float = 20.0
    fd_order: int = 4

    def __post_init__(self):
        if self.grid_n < 64:
            raise ValueError("grid_n must be at least 64")
        if self.fd_order not in FD_ORDERS:
            raise ValueError(f"fd_order must be one of {FD_ORDERS}")
        if self.grid_n % _nodes_multiple(self.fd_order):
            raise ValueError(f"grid_n must be a multiple of {_nodes_multiple(self.fd_order)} "
                             f"for fd_order={self.fd_order}")
        if not self.truncation > 0:
            raise ValueError("truncation must be positive")


def _nodes_multiple(order: int) -> int:
    return {2: 1, 4: 2, 6: 4}[order]


def round_grid_n(n: float, fd_order: int) -> int:
    m = 4 if fd_order == 6 else 2
    return max(64, int(m * math.ceil(n / m)))


def decay_truncation(rate: float, level: float = 1e-14) -> float:
    """Half-width X with ``exp(-rate X) < level``."""
    return -math.log(level) / rate


# -- finite differences and quadrature ---------------------------------------

def fornberg_weights(z: float, x: np.ndarray, m: int) -> np.ndarray:
    """Finite-difference weights for derivatives 0..m at ``z`` on nodes ``x``.

    Fornberg's recursion; returns an array of shape ``(m + 1, len(x))``.
    """
    n = len(x)
    c = np.zeros((n, m + 1), dtype=np.result_type(x, float))
    c1, c4 = 1.0, x[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2, c5, c4 = 1.0, c4, x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c.T


@lru_cache(maxsize=None)
def _stencils(order: int, deriv: int, dtype=float):
    """Unit-spacing stencils: centered interior weights and one-sided edge rows."""
    half = order // 2 if deriv == 2 else (order + 1) // 2
    width_c = 2 * half + 1
    width_e = order + deriv
    centered = fornberg_weights(dtype(0), np.arange(-half, half + 1, dtype=dtype), deriv)[deriv]
    edge = [fornberg_weights(dtype(j), np.arange(width_e, dtype=dtype), deriv)[deriv]
            for j in range(half)]
    return half, width_c, centered, np.array(edge, dtype=dtype)


def _real_dtype(y):
    return np.longdouble if np.asarray(y).dtype in (np.longdouble, np.clongdouble) else float


def fd_derivative(y: np.ndarray, h: float, deriv: int, order: int) -> np.ndarray:
    """Derivative of samples ``y`` (first or second) with one-sided stencils at both ends.

    Long-double samples get long-double weights.
    """
    half, width_c, centered, edge = _stencils(order, deriv, _real_dtype(y))
    n = len(y)
    width_e = edge.shape[1]
    if n < max(width_c, width_e) + half:
        raise ValueError("grid too small for the finite-difference stencil")
    out = np.empty(n, dtype=np.result_type(y, float))
    out[half:n - half] = np.convolve(y, centered[::-1], mode="valid")
    for j in range(half):
        out[j] = edge[j] @ y[:width_e]
        # mirrored stencil for the right end: odd derivatives flip sign
        out[n - 1 - j] = (-1) ** deriv * (edge[j] @ y[::-1][:width_e])
    return out / h ** deriv


def fd_edge_derivative(y: np.ndarray, h: float, order: int) -> tuple:
    """One-sided first derivative at the first and last sample."""
    _, _, _, edge = _stencils(order, 1)
    w = edge[0]
    m = len(w)
    return (w @ y[:m]) / h, -(w @ y[::-1][:m]) / h


def quadrature_weights(n: int, h: float, order: int, dtype=float) -> np.ndarray:
    """Composite Newton-Cotes weights for ``n`` intervals (trapezoid, Simpson, Boole)."""
    w = np.zeros(n + 1, dtype=dtype)
    h = dtype(h)
    if order == 2:
        w[:] = h
        w[[0, -1]] = h / 2
    elif order == 4:
        if n % 2:
            raise ValueError("Simpson's rule needs an even number of intervals")
        w[1:-1:2] = 4
        w[2:-1:2] = 2
        w[[0, -1]] = 1
        w *= h / 3
    elif order == 6:
        if n % 4:
            raise ValueError("Boole's rule needs a multiple of four intervals")
        block = np.array([7.0, 32.0, 12.0, 32.0, 7.0])
        for s in range(0, n, 4):
            w[s:s + 5] += block
        w *= 2 * h / 45
    else:
        raise ValueError(f"unsupported quadrature order {order}")
    return w


def cumulative_integral(y: np.ndarray, h: float) -> np.ndarray:
    """Running integral from the first node, fourth order.

    Every interval uses the same cubic-interpolation rule (one-sided at the
    two ends), so the error varies smoothly from node to node and survives
    later differentiation.
    """
    y = np.asarray(y)
    n = len(y) - 1
    if n < 3:
        raise ValueError("need at least four samples")
    seg = np.empty(n, dtype=np.result_type(y, float))
    seg[1:-1] = -y[:-3] + 13 * y[1:-2] + 13 * y[2:-1] - y[3:]
    seg[0] = 9 * y[0] + 19 * y[1] - 5 * y[2] + y[3]
    seg[-1] = 9 * y[-1] + 19 * y[-2] - 5 * y[-3] + y[-4]
    out = np.zeros(n + 1, dtype=seg.dtype)
    out[1:] = np.cumsum(seg) * (h / 24)
    return out


# -- piecewise functions -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PiecewiseFunction:
    """Complex samples on both sides of the origin plus analytic traces.

    ``traces`` are the one-sided values at 0; ``endpoint_traces`` store the
    values at ``a`` (``*_minus``) and ``b`` (``*_plus``).
    """

    a: float
    b: float
    left: np.ndarray
    right: np.ndarray
    traces: BoundaryTraces
    endpoint_traces: BoundaryTraces
    fd_order: int = 4

    def __post_init__(self):
        if not self.a < 0 < self.b:
            raise ValueError("need a < 0 < b")
        left = np.asarray(self.left, dtype=complex)
        right = np.asarray(self.right, dtype=complex)
        if left.shape != right.shape or left.ndim != 1:
            raise ValueError("left and right samples must have matching sizes")
        if not (np.all(np.isfinite(left)) and np.all(np.isfinite(right))):
            raise ValueError("samples must be finite")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    @property
    def grid_n(self) -> int:
        return len(self.left) - 1

    @property
    def x_left(self) -> np.ndarray:
        return np.linspace(self.a, 0.0, self.grid_n + 1)

    @property
    def x_right(self) -> np.ndarray:
        return np.linspace(0.0, self.b, self.grid_n + 1)

    @property
    def h_left(self) -> float:
        return -self.a / self.grid_n

    @property
    def h_right(self) -> float:
        return self.b / self.grid_n

    def same_grid(self, other: "PiecewiseFunction") -> bool:
        return (self.a == other.a and self.b == other.b and self.grid_n == other.grid_n)

    def _check(self, other: "PiecewiseFunction"):
        if not self.same_grid(other):
            raise ValueError("grid mismatch")

    def _combine(self, other, fn):
        self._check(other)
        t = BoundaryTraces.from_array(fn(self.traces.as_array(), other.traces.as_array()))
        e = BoundaryTraces.from_array(
            fn(self.endpoint_traces.as_array(), other.endpoint_traces.as_array()))
        return replace(self, left=fn(self.left, other.left), right=fn(self.right, other.right),
                       traces=t, endpoint_traces=e)

    def __add__(self, other):
        return self._combine(other, np.add)

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __mul__(self, c):
        c = complex(c)
        return replace(self, left=c * self.left, right=c * self.right,
                       traces=BoundaryTraces.from_array(c * self.traces.as_array()),
                       endpoint_traces=BoundaryTraces.from_array(c * self.endpoint_traces.as_array()))

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def norm(self) -> float:
        return math.sqrt(max(inner_product(self, self).real, 0.0))


def inner_product(f: PiecewiseFunction, g: PiecewiseFunction) -> complex:
    """``int conj(f) g`` over both sides, composite rule matching ``f.fd_order``."""
    f._check(g)
    n = f.grid_n
    total = 0j
    for u, v, h in ((f.left, g.left, f.h_left), (f.right, g.right, f.h_right)):
        total += quadrature_weights(n, h, f.fd_order) @ (np.conj(u) * v)
    return complex(total)


def apply_second_derivative(f: PiecewiseFunction) -> PiecewiseFunction:
    """``-f''`` by finite differences on each side separately.

    The traces of the result are finite-difference estimates: the value at
    each end of a side is its one-sided stencil value, the derivative a
    one-sided first difference of the result.
    """
    p = f.fd_order
    parts = []
    for y, h in ((f.left, f.h_left), (f.right, f.h_right)):
        d2 = -fd_derivative(y, h, 2, p)
        parts.append((d2, fd_edge_derivative(d2, h, p)))
    (l2, (l3a, l3b)), (r2, (r3a, r3b)) = parts
    return replace(
        f, left=l2, right=r2,
        traces=BoundaryTraces(l2[-1], l3b, r2[0], r3a),
        endpoint_traces=BoundaryTraces(l2[0], l3a, r2[-1], r3b),
    )


def _sides(fn):
    if isinstance(fn, (tuple, list)):
        return fn[0], fn[1]
    return fn, fn


def from_closure(fn, dfn, a: float, b: float, grid_n: int = 2048, fd_order: int = 4,
                 extended: bool = False) -> PiecewiseFunction:
    """Sample a function given per-side closures.

    ``fn`` and ``dfn`` are callables (used on both sides) or ``(left, right)``
    pairs.  Traces at 0 and at the ends are evaluated from the closures, so
    they are the one-sided analytic limits.

    With ``extended=True`` the closures receive ``np.longdouble`` nodes; use
    this when rounding of the node positions would otherwise show up as
    sample noise (e.g. ``exp(k x)`` with large ``|k x|``).
    """
    fl, fr = _sides(fn)
    dl, dr = _sides(dfn)
    dtype = np.longdouble if extended else float
    a_, b_, z = dtype(a), dtype(b), dtype(0)
    xl = np.linspace(a_, z, grid_n + 1)
    xr = np.linspace(z, b_, grid_n + 1)

    def ev(g, x):
        v = np.asarray(g(x)).astype(complex)
        if v.shape != np.shape(x):
            v = np.broadcast_to(v, np.shape(x)).copy()
        if not np.all(np.isfinite(v)):
            raise ValueError("closure returned non-finite values")
        return v

    left, right = ev(fl, xl), ev(fr, xr)
    dleft, dright = ev(dl, xl[[0, -1]]), ev(dr, xr[[0, -1]])
    traces = BoundaryTraces(left[-1], dleft[-1], right[0], dright[0])
    ends = BoundaryTraces(left[0], dleft[0], right[-1], dright[-1])
    return PiecewiseFunction(a, b, left, right, traces, ends, fd_order)


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def to_csv(f: PiecewiseFunction, fh=None) -> str:
    """CSV with columns ``x, re, im, side`` preceded by a ``#`` line listing the traces."""
    buf = io.StringIO()
    t = f.traces
    items = []
    for name in ("val_minus", "der_minus", "val_plus", "der_plus"):
        z = complex(getattr(t, name))
        items.append(f"{name}={_fmt(z.real)}{'+' if z.imag >= 0 else '-'}{_fmt(abs(z.imag))}j")
    buf.write("# traces " + " ".join(items) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "re", "im", "side"])
    for xs, ys, side in ((f.x_left, f.left, "L"), (f.x_right, f.right, "R")):
        for x, y in zip(xs, ys):
            w.writerow([_fmt(x), _fmt(y.real), _fmt(y.imag), side])
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text
