"""Operators on ``(-l, l)`` with the ``phi``-interaction at 0 and a boundary condition at ``+-l``.

The ground truth for eigenvalues is the 4x4 determinant of the boundary
system for ``psi = a cos kx + b sin(kx)/k`` on each side.  The closed-form
secular equations are kept as cross-checks.

Outer conventions (determined by matching the closed forms):

* symmetric: ``(U - I) Psi + i L0 (U + I) Psi' = 0``
* connected: ``(psi(l), psi'(l)) = B2 (psi(-l), psi'(-l))``
* separated: ``h0 psi'(l) = h1 e^{i theta} psi(l)``, ``h0 psi'(-l) = -h1 e^{-i theta} psi(-l)``
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .boundary_conditions import (
    TOL,
    ConnectedParams,
    SeparatedParams,
    SymmetricParams,
    bc_residual_connected,
    bc_residual_separated,
    bc_residual_symmetric,
    connected_matrix,
    params_from_dict,
    reduce_angle,
)
from .grid import PiecewiseFunction, from_closure
from .roots import Rectangle, RootConfig, RootSet, find_roots

Outer = Union[SymmetricParams, ConnectedParams, SeparatedParams]

DISCRETE = "Discrete"
EMPTY = "Empty"
ENTIRE = "EntireComplexPlane"

RANK_TOL = 1e-8

# probe points for classification witnesses (deterministic)
PROBES = (0.7 + 0.3j, 1.9 - 0.4j, 3.1 + 0.2j)


class RegimeError(RuntimeError):
    """Raised when an operation is meaningless for the model's spectral class."""


@dataclass(frozen=True, eq=False)
class IntervalModel:
    l: float
    phi: float
    outer: Outer

    def __post_init__(self):
        if not (self.l > 0 and math.isfinite(self.l)):
            raise ValueError("l must be positive")
        if not isinstance(self.outer, (SymmetricParams, ConnectedParams, SeparatedParams)):
            raise TypeError("outer must be symmetric, connected or separated parameters")
        object.__setattr__(self, "phi", reduce_angle(self.phi))
        object.__setattr__(self, "l", float(self.l))

    @property
    def exceptional(self) -> int:
        if abs(self.phi - math.pi / 2) < TOL:
            return 1
        if abs(self.phi + math.pi / 2) < TOL:
            return -1
        return 0

    def to_dict(self) -> dict:
        return {"l": self.l, "phi": self.phi, "outer": self.outer.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "IntervalModel":
        return cls(float(d["l"]), float(d["phi"]), params_from_dict(d["outer"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, s: str) -> "IntervalModel":
        return cls.from_dict(json.loads(s))


# -- boundary system -------------------------------------------------------------
# trace tuple order: psi(0-), psi'(0-), psi(0+), psi'(0+), psi(-l), psi'(-l), psi(l), psi'(l)

def constraint_matrix(model: IntervalModel) -> np.ndarray:
    """4x8 matrix of the interface (rows 0-1) and outer (rows 2-3) conditions."""
    C = np.zeros((4, 8), dtype=complex)
    C[0, 2], C[0, 0] = 1, -np.exp(1j * model.phi)
    C[1, 3], C[1, 1] = 1, -np.exp(-1j * model.phi)
    p = model.outer
    if isinstance(p, SymmetricParams):
        A = p.U - np.eye(2)
        B = 1j * p.L0 * (p.U + np.eye(2))
        C[2:, 6], C[2:, 4] = A[:, 0], A[:, 1]
        C[2:, 7], C[2:, 5] = B[:, 0], -B[:, 1]
    elif isinstance(p, ConnectedParams):
        C[2:, 6:8] = np.eye(2)
        C[2:, 4:6] = -connected_matrix(p)
    else:
        e = np.exp(1j * p.theta)
        C[2, 7], C[2, 6] = p.h0, -p.h1 * e
        C[3, 5], C[3, 4] = p.h0, p.h1 / e
    return C


def _sinc_x(k, x):
    """``sin(kx)/k``, continuous at k = 0."""
    return x * np.sinc(k * x / np.pi)


def basis_kind(k: complex, l: float) -> str:
    """Well-conditioned basis for a given k: trigonometric near 0, exponential dichotomy otherwise."""
    return "trig" if abs(k) * l < 1 else "dichotomy"


def basis_functions(k: complex, l: float, kind: str = "trig"):
    """Closures ``(value, derivative)`` for the two basis functions on each side.

    Returns ``{"L": [(f, df), (f, df)], "R": [...]}``.  ``trig`` is
    ``cos kx, sin(kx)/k`` on both sides (entire in k, even in k);
    ``dichotomy`` uses exponentials anchored so that each is bounded by 1 on
    its side.
    """
    if kind == "trig":
        pair = [(lambda x: np.cos(k * x), lambda x: -k * np.sin(k * x)),
                (lambda x: _sinc_x(k, x), lambda x: np.cos(k * x))]
        return {"L": pair, "R": pair}
    if kind != "dichotomy":
        raise ValueError(f"unknown basis {kind!r}")
    kk = k if k.imag >= 0 else -k
    ik = 1j * kk

    def ex(s, x0):
        return (lambda x: np.exp(s * (x - x0)), lambda x: s * np.exp(s * (x - x0)))

    return {"L": [ex(ik, -l), ex(-ik, 0.0)], "R": [ex(ik, 0.0), ex(-ik, l)]}


def trace_matrix(k: complex, l: float, kind: str = "trig") -> np.ndarray:
    """8x4 map from basis coefficients ``(aL1, aL2, aR1, aR2)`` to the trace tuple."""
    bf = basis_functions(k, l, kind)
    T = np.zeros((8, 4), dtype=complex)
    for j, (f, df) in enumerate(bf["L"]):
        T[0, j], T[1, j] = f(0.0), df(0.0)
        T[4, j], T[5, j] = f(-l), df(-l)
    for j, (f, df) in enumerate(bf["R"]):
        T[2, 2 + j], T[3, 2 + j] = f(0.0), df(0.0)
        T[6, 2 + j], T[7, 2 + j] = f(l), df(l)
    return T


def _trig_trace_stack(k: np.ndarray, l: float) -> np.ndarray:
    """Vectorized trig-basis trace matrices, shape ``k.shape + (8, 4)``."""
    T = np.zeros(k.shape + (8, 4), dtype=complex)
    c, s = np.cos(k * l), np.sin(k * l)
    sx = _sinc_x(k, l)
    T[..., 0, 0], T[..., 0, 1] = 1, 0
    T[..., 1, 0], T[..., 1, 1] = 0, 1
    T[..., 2, 2], T[..., 2, 3] = 1, 0
    T[..., 3, 2], T[..., 3, 3] = 0, 1
    T[..., 4, 0], T[..., 4, 1] = c, -sx
    T[..., 5, 0], T[..., 5, 1] = k * s, c
    T[..., 6, 2], T[..., 6, 3] = c, sx
    T[..., 7, 2], T[..., 7, 3] = -k * s, c
    return T


def boundary_system(model: IntervalModel, k: complex, kind: Optional[str] = None) -> np.ndarray:
    if kind is None:
        kind = basis_kind(k, model.l)
    return constraint_matrix(model) @ trace_matrix(complex(k), model.l, kind)


def boundary_determinant(model: IntervalModel, k, normalized: bool = False):
    """Secular determinant of the boundary system.

    The raw value (``normalized=False``) uses the trigonometric basis, is entire
    and even in k, and is finite at k = 0.  Its zeros are exactly the
    eigenvalues ``lambda = k^2``.  With ``normalized=True`` the modulus of the
    determinant in the well-conditioned basis divided by the product of row
    norms is returned (a number in [0, 1]).
    """
    k_arr = np.asarray(k, dtype=complex)
    if not normalized:
        A = constraint_matrix(model) @ _trig_trace_stack(k_arr, model.l)
        d = np.linalg.det(A)
        return d if np.ndim(k) else complex(d)
    out = np.empty(k_arr.shape)
    for idx, kv in np.ndenumerate(k_arr):
        A = boundary_system(model, complex(kv))
        out[idx] = abs(np.linalg.det(A)) / np.prod(np.linalg.norm(A, axis=1))
    return out if np.ndim(k) else float(out)


# -- closed-form secular equations ---------------------------------------------

def _require(model, cls):
    if not isinstance(model.outer, cls):
        raise TypeError(f"outer boundary condition is {type(model.outer).__name__}, "
                        f"expected {cls.__name__}")


def symmetric_polynomials(U: np.ndarray) -> tuple[complex, complex, complex]:
    u11, u12, u21, u22 = U[0, 0], U[0, 1], U[1, 0], U[1, 1]
    P1 = 1 - u11 - u12 * u21 - u22 + u11 * u22
    P2 = 1 + u12 * u21 - u11 * u22
    P3 = 1 + u11 - u12 * u21 + u22 + u11 * u22
    return P1, P2, P3


def secular_symmetric(model: IntervalModel, k, corrected: bool = False):
    """Closed-form secular function for symmetric outer conditions.

    Evaluated as published by default, in which the ``P1`` term carries no
    k-dependence.  ``corrected=True`` multiplies that term by ``sin 2kl``,
    which makes the function equal to ``boundary_determinant`` up to a
    factor ``-1/k`` for every unitary U.  The two coincide when
    ``P1 = det(I - U) = 0``.
    """
    _require(model, SymmetricParams)
    U, L0, l, phi = model.outer.U, model.outer.L0, model.l, model.phi
    k = np.asarray(k, dtype=complex)
    P1, P2, P3 = symmetric_polynomials(U)
    t1 = P1 * np.sin(2 * k * l) if corrected else P1
    u11, u12, u21, u22 = U[0, 0], U[0, 1], U[1, 0], U[1, 1]
    val = (np.cos(phi) * (t1 - 2j * k * L0 * P2 * np.cos(2 * k * l)
                          + k ** 2 * L0 ** 2 * P3 * np.sin(2 * k * l))
           + 2j * k * L0 * (u12 + u21 + 1j * (u11 - u22) * np.sin(phi)))
    return val if val.ndim else complex(val)


def secular_connected(model: IntervalModel, k):
    _require(model, ConnectedParams)
    p, l, phi = model.outer, model.l, model.phi
    if abs(p.theta) > TOL:
        raise ValueError("closed form assumes theta = 0 for the outer interaction")
    k = np.asarray(k, dtype=complex)
    s = p.s
    val = (np.cos(phi) * ((p.b * k ** 2 - p.c) * np.sin(2 * k * l)
                          + 2 * k * s * np.cos(p.phi) * np.cos(2 * k * l))
           + 2 * k * (s * np.sin(phi) * np.sin(p.phi) - 1))
    return val if val.ndim else complex(val)


def secular_separated(model: IntervalModel, k):
    _require(model, SeparatedParams)
    p, l, phi = model.outer, model.l, model.phi
    k = np.asarray(k, dtype=complex)
    val = (np.cos(phi) * (2 * p.h0 * p.h1 * k * np.cos(2 * k * l) * np.cos(p.theta)
                          + (p.h0 ** 2 * k ** 2 - p.h1 ** 2) * np.sin(2 * k * l))
           - 2 * p.h0 * p.h1 * k * np.sin(p.theta) * np.sin(phi))
    return val if val.ndim else complex(val)


def secular_function(model: IntervalModel) -> Callable:
    if isinstance(model.outer, SymmetricParams):
        return lambda k: secular_symmetric(model, k)
    if isinstance(model.outer, ConnectedParams):
        return lambda k: secular_connected(model, k)
    return lambda k: secular_separated(model, k)


# -- classification --------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SpectrumClass:
    tag: str
    witness: str
    condition_value: Optional[complex] = None
    secular: Optional[Callable] = None
    probes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        cv = self.condition_value
        return {
            "class": self.tag,
            "condition_evaluated": self.witness,
            "condition_value": None if cv is None else [cv.real, cv.imag],
            "witness_values": {f"{z.real:+.2f}{z.imag:+.2f}i": v for z, v in self.probes.items()},
        }


def classify(model: IntervalModel) -> SpectrumClass:
    """Discrete, empty or entire-plane point spectrum according to the outer family.

    The ``+-`` in each exceptional condition is paired with the sign of phi.
    ``probes`` holds the normalized boundary determinant at fixed k values as
    an independent witness.
    """
    p = model.outer
    sgn = model.exceptional
    sin_phi = math.sin(model.phi)
    probes = {z: float(boundary_determinant(model, z, normalized=True)) for z in PROBES}

    def decide(value, text):
        tag = ENTIRE if abs(value) < TOL else EMPTY
        return SpectrumClass(tag, text, complex(value), None, probes)

    if isinstance(p, ConnectedParams) and p.b == 0 and p.c == 0 and abs(abs(p.phi) - math.pi / 2) < TOL:
        # second interaction of the same exceptional type
        v = sin_phi * math.sin(p.phi) - 1
        return decide(v, "b2=c2=0, phi2=+-pi/2: sin(phi) sin(phi2) - 1 = 0")
    if sgn == 0:
        return SpectrumClass(DISCRETE, "phi != +-pi/2", None, secular_function(model), probes)
    if isinstance(p, SymmetricParams):
        U = p.U
        v = U[0, 1] + U[1, 0] + sgn * 1j * (U[0, 0] - U[1, 1])
        pm = "+" if sgn > 0 else "-"
        return decide(v, f"u12 + u21 {pm} i (u11 - u22) = 0")
    if isinstance(p, ConnectedParams):
        v = p.s * sin_phi * math.sin(p.phi) - 1
        return decide(v, "sqrt(1 + b2 c2) sin(phi) sin(phi2) - 1 = 0")
    v = p.h0 * p.h1 * math.sin(p.theta)
    return decide(v, "h0 h1 sin(theta) = 0 (theta in {0, pi} or Dirichlet/Neumann)")


def connected_sign_pairings(model: IntervalModel) -> dict:
    """Both ``+-`` readings of the connected exceptional condition and the determinant test.

    Returns the values of ``sqrt(1 + b2 c2) sin(phi2) -+ 1`` together with the
    maximum normalized determinant over the classification probes.
    """
    _require(model, ConnectedParams)
    p = model.outer
    dets = [float(boundary_determinant(model, z, normalized=True)) for z in PROBES]
    return {
        "plus": p.s * math.sin(p.phi) - 1,
        "minus": p.s * math.sin(p.phi) + 1,
        "phi_sign": model.exceptional,
        "max_normalized_det": max(dets),
        "determinant_vanishes": max(dets) < TOL,
    }


# -- eigenfunctions ----------------------------------------------------------------

def interval_bc_residuals(model: IntervalModel, f: PiecewiseFunction) -> dict:
    origin = bc_residual_connected(f.traces, connected_matrix(ConnectedParams(phi=model.phi)))
    p, e = model.outer, f.endpoint_traces
    if isinstance(p, SymmetricParams):
        outer = bc_residual_symmetric(e, p)
    elif isinstance(p, ConnectedParams):
        outer = bc_residual_connected(e, connected_matrix(p))
    else:
        outer = bc_residual_separated(e, p)
    return {"origin": origin, "outer": outer}


def eigenfunction_interval(model: IntervalModel, k: complex, grid_n: int = 2048,
                           fd_order: int = 4, rank_tol: float = RANK_TOL) -> PiecewiseFunction:
    """Normalized eigenfunction at ``lambda = k^2`` from the null space of the boundary system."""
    k = complex(k)
    kind = basis_kind(k, model.l)
    A = boundary_system(model, k, kind)
    A = A / np.linalg.norm(A, axis=1, keepdims=True)
    _, s, vh = np.linalg.svd(A)
    if s[-1] >= rank_tol * s[0]:
        raise RegimeError(f"k={k} is not an eigenvalue (sigma_min/sigma_max={s[-1] / s[0]:.3e})")
    c = vh[-1].conj()
    bf = basis_functions(k, model.l, kind)

    def side(pairs, coef):
        return (lambda x: coef[0] * pairs[0][0](x) + coef[1] * pairs[1][0](x),
                lambda x: coef[0] * pairs[0][1](x) + coef[1] * pairs[1][1](x))

    fl, dfl = side(bf["L"], c[:2])
    fr, dfr = side(bf["R"], c[2:])
    f = from_closure((fl, fr), (dfl, dfr), -model.l, model.l, grid_n, fd_order)
    return f * (1 / f.norm())


def eigenvalues_in_region(model: IntervalModel, region: Rectangle,
                          cfg: Optional[RootConfig] = None) -> RootSet:
    """All zeros of the boundary determinant in a rectangle of the k-plane."""
    cls = classify(model)
    if cls.tag != DISCRETE:
        raise RegimeError(f"spectrum is {cls.tag}; root finding is meaningless ({cls.witness})")
    return find_roots(lambda k: boundary_determinant(model, k), region, cfg or RootConfig())


def rootset_to_csv(rs: RootSet, fh=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["re_k", "im_k", "re_lambda", "im_lambda", "multiplicity", "residual"])
    for r in rs.roots:
        lam = r.k ** 2
        w.writerow([format(v, ".17g") for v in (r.k.real, r.k.imag, lam.real, lam.imag)]
                   + [r.multiplicity, format(r.residual, ".17g")])
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text
