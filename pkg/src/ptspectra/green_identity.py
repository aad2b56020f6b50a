"""Numerical check of the adjoint boundary conditions via the Green identity.

For ``psi`` in the domain of ``L`` and ``chi`` in the domain of the claimed
adjoint, ``<L psi, chi> - <psi, L* chi>`` is a sum of boundary terms that
must vanish.  On a grid it is a pure discretization error and decays at the
finite-difference/quadrature order.  Test functions are built per side from
cubic Hermite interpolants of prescribed traces plus a smooth interior
perturbation that vanishes to second order at the ends.  Everything is a
polynomial of degree at most five, so the fourth- and sixth-order stencils
differentiate it exactly and what remains is the quadrature error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .boundary_conditions import (
    BoundaryTraces,
    ConnectedParams,
    SeparatedParams,
    SymmetricParams,
    adjoint_constraints,
    domain_constraints,
)
from .grid import (
    PiecewiseFunction,
    apply_second_derivative,
    fd_derivative,
    from_closure,
    inner_product,
    quadrature_weights,
)


def _hermite_side(x0: float, x1: float, v0, d0, v1, d1, amp: complex, tilt: complex):
    """Closures for ``H(x) + amp s^2 (1-s)^2 (1 + tilt s)`` with ``s = (x-x0)/(x1-x0)``."""
    L = x1 - x0

    def f(x):
        s = (x - x0) / L
        h00, h10 = 2 * s ** 3 - 3 * s ** 2 + 1, s ** 3 - 2 * s ** 2 + s
        h01, h11 = -2 * s ** 3 + 3 * s ** 2, s ** 3 - s ** 2
        bump = s * s * (1 - s) ** 2 * (1 + tilt * s)
        return v0 * h00 + L * d0 * h10 + v1 * h01 + L * d1 * h11 + amp * bump

    def df(x):
        s = (x - x0) / L
        g00, g10 = (6 * s ** 2 - 6 * s) / L, 3 * s ** 2 - 4 * s + 1
        g01, g11 = (-6 * s ** 2 + 6 * s) / L, 3 * s ** 2 - 2 * s
        q = s * s * (1 - s) ** 2
        dq = 2 * s * (1 - s) ** 2 - 2 * s * s * (1 - s)
        dbump = (dq * (1 + tilt * s) + tilt * q) / L
        return v0 * g00 + d0 * g10 + v1 * g01 + d1 * g11 + amp * dbump

    return f, df


@dataclass(frozen=True, eq=False)
class PrescribedFunction:
    """Smooth function on ``(a, 0) U (0, b)`` with given traces at 0 and at the ends."""

    a: float
    b: float
    origin: BoundaryTraces
    ends: BoundaryTraces
    amp: tuple = (0.3, -0.2j)
    tilt: tuple = (0.5, -1j)

    def _closures(self):
        o, e = self.origin, self.ends
        left = _hermite_side(self.a, 0.0, e.val_minus, e.der_minus, o.val_minus, o.der_minus,
                             self.amp[0], self.tilt[0])
        right = _hermite_side(0.0, self.b, o.val_plus, o.der_plus, e.val_plus, e.der_plus,
                              self.amp[1], self.tilt[1])
        return left, right

    def sample(self, grid_n: int, fd_order: int = 4) -> PiecewiseFunction:
        (fl, dl), (fr, dr) = self._closures()
        return from_closure((fl, fr), (dl, dr), self.a, self.b, grid_n, fd_order)

    def sample_extended(self, grid_n: int) -> tuple:
        """Long-double samples ``(left, right)`` on the same nodes as ``sample``."""
        (fl, _), (fr, _) = self._closures()
        ld = np.longdouble
        xl = np.linspace(ld(self.a), ld(0), grid_n + 1)
        xr = np.linspace(ld(0), ld(self.b), grid_n + 1)
        return (np.asarray(fl(xl), dtype=np.clongdouble), np.asarray(fr(xr), dtype=np.clongdouble))


def _null_vector(A: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Random element of ``ker A``."""
    _, _, vh = np.linalg.svd(A)
    basis = vh[A.shape[0]:].conj()
    c = rng.normal(size=basis.shape[0]) + 1j * rng.normal(size=basis.shape[0])
    v = c @ basis
    return v / np.linalg.norm(v)


def symmetric_constraints(p: SymmetricParams) -> np.ndarray:
    """2x4 constraint on the end traces ``(psi(-l), psi'(-l), psi(l), psi'(l))``."""
    A = p.U - np.eye(2)
    B = 1j * p.L0 * (p.U + np.eye(2))
    return np.column_stack([A[:, 1], -B[:, 1], A[:, 0], B[:, 0]])


Family = Union[ConnectedParams, SeparatedParams, SymmetricParams]


def trace_pair(p: Family, rng: np.random.Generator, l: float = 1.0):
    """Functions ``(psi, chi)`` in the domains of ``L`` and ``L*`` for the BC family ``p``.

    Connected and separated conditions sit at 0 and the functions vanish to
    first order at ``+-l``; symmetric conditions sit at ``+-l`` and the
    functions vanish to first order at 0.
    """
    zero = BoundaryTraces(0, 0, 0, 0)
    amps = [tuple(rng.normal(size=2) + 1j * rng.normal(size=2)) for _ in range(2)]
    om = [tuple(rng.normal(size=2) + 1j * rng.normal(size=2)) for _ in range(2)]
    if isinstance(p, SymmetricParams):
        A = symmetric_constraints(p)
        t1 = BoundaryTraces.from_array(_null_vector(A, rng))
        t2 = BoundaryTraces.from_array(_null_vector(A, rng))
        return (PrescribedFunction(-l, l, zero, t1, amps[0], om[0]),
                PrescribedFunction(-l, l, zero, t2, amps[1], om[1]))
    t1 = BoundaryTraces.from_array(_null_vector(domain_constraints(p), rng))
    t2 = BoundaryTraces.from_array(_null_vector(adjoint_constraints(p), rng))
    return (PrescribedFunction(-l, l, t1, zero, amps[0], om[0]),
            PrescribedFunction(-l, l, t2, zero, amps[1], om[1]))


def green_identity_residual(psi: PiecewiseFunction, chi: PiecewiseFunction) -> float:
    """``|<L psi, chi> - <psi, L chi>|`` with the finite-difference ``L = -d^2/dx^2``."""
    Lpsi = apply_second_derivative(psi)
    Lchi = apply_second_derivative(chi)
    return abs(inner_product(Lpsi, chi) - inner_product(psi, Lchi))


def green_identity_residual_extended(psi: PrescribedFunction, chi: PrescribedFunction, grid_n: int,
                                     fd_order: int = 4) -> float:
    """Same discrete quantity as ``green_identity_residual`` evaluated in long double.

    Sampling noise in double precision is amplified by ``1/h^2``; at the
    grids needed to see the asymptotic order it would otherwise dominate.
    """
    total = 0
    for u, v, (a, b) in zip(psi.sample_extended(grid_n), chi.sample_extended(grid_n),
                            ((psi.a, 0.0), (0.0, psi.b))):
        h = np.longdouble(b - a) / grid_n
        w = quadrature_weights(grid_n, h, fd_order, np.longdouble)
        Lu = -fd_derivative(u, h, 2, fd_order)
        Lv = -fd_derivative(v, h, 2, fd_order)
        total += w @ (np.conj(Lu) * v) - w @ (np.conj(u) * Lv)
    return float(abs(total))


def convergence_order(residual: Callable[[int], float], grids=(64, 128, 256, 512)) -> tuple[float, list]:
    """Least-squares slope of ``-log residual`` against ``log grid_n``."""
    r = [residual(n) for n in grids]
    slope = np.polyfit(np.log(grids), np.log(r), 1)[0]
    return float(-slope), r


# per-order grids: past the one-sided edge terms, before long-double roundoff
DEFAULT_GRIDS = {2: (256, 512, 1024, 2048), 4: (64, 128, 256, 512), 6: (32, 64, 128, 256)}


def green_identity_order(psi: PrescribedFunction, chi: PrescribedFunction, fd_order: int = 4,
                         grids=None, extended: bool = True) -> tuple[float, list]:
    grids = grids or DEFAULT_GRIDS[fd_order]
    if extended:
        return convergence_order(lambda n: green_identity_residual_extended(psi, chi, n, fd_order), grids)
    return convergence_order(
        lambda n: green_identity_residual(psi.sample(n, fd_order), chi.sample(n, fd_order)), grids)
