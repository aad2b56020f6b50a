"""Boundary-condition families for second-derivative operators with point interactions.

Three families are supported:

* ``ConnectedParams``: ``(psi(0+), psi'(0+)) = B (psi(0-), psi'(0-))``
* ``SeparatedParams``: ``h0 psi'(0+) = h1 e^{i theta} psi(0+)`` and
  ``h0 psi'(0-) = -h1 e^{-i theta} psi(0-)``
* ``SymmetricParams``: ``(U - I) Psi + i L0 (U + I) Psi' = 0`` at the outer
  endpoints of an interval, with ``Psi = (psi(l), psi(-l))`` and
  ``Psi' = (psi'(l), -psi'(-l))``.

Trace vectors are ordered ``(val_minus, der_minus, val_plus, der_plus)``
throughout.  Every parameter object is immutable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

TOL = 1e-12

# parity acting on trace vectors: (Pf)(0-) = f(0+), (Pf)'(0-) = -f'(0+), ...
PARITY_TRACES = np.array(
    [[0, 0, 1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, -1, 0, 0]], dtype=float
)


def reduce_angle(a: float) -> float:
    """Reduce an angle to the half-open interval (-pi, pi]."""
    r = math.remainder(float(a), 2 * math.pi)
    if r <= -math.pi:
        r += 2 * math.pi
    return r


@dataclass(frozen=True)
class ConnectedParams:
    theta: float = 0.0
    phi: float = 0.0
    b: float = 0.0
    c: float = 0.0

    def __post_init__(self):
        for name in ("theta", "phi", "b", "c"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.b < 0:
            raise ValueError("b must be non-negative")
        if 1 + self.b * self.c < 0:
            raise ValueError("1 + b*c must be non-negative (c >= -1/b)")
        object.__setattr__(self, "theta", reduce_angle(self.theta))
        object.__setattr__(self, "phi", reduce_angle(self.phi))

    @property
    def s(self) -> float:
        return math.sqrt(1 + self.b * self.c)

    def to_dict(self) -> dict:
        return {"family": "connected", "theta": self.theta, "phi": self.phi,
                "b": self.b, "c": self.c}


@dataclass(frozen=True)
class SeparatedParams:
    theta: float = 0.0
    h0: float = 1.0
    h1: float = 0.0

    def __post_init__(self):
        h = np.array([self.h0, self.h1], dtype=float)
        if not np.all(np.isfinite(h)) or not math.isfinite(self.theta):
            raise ValueError("separated parameters must be finite")
        norm = math.hypot(h[0], h[1])
        if norm == 0:
            raise ValueError("(h0, h1) must not vanish")
        if abs(norm - 1) > 4 * np.finfo(float).eps:  # keeps normalization idempotent
            h = h / norm
        if h[0] < 0 or (h[0] == 0 and h[1] < 0):
            h = -h
        object.__setattr__(self, "h0", float(h[0]) + 0.0)
        object.__setattr__(self, "h1", float(h[1]) + 0.0)
        object.__setattr__(self, "theta", float(self.theta) % (2 * math.pi))

    def to_dict(self) -> dict:
        return {"family": "separated", "theta": self.theta, "h0": self.h0, "h1": self.h1}


@dataclass(frozen=True, eq=False)
class SymmetricParams:
    U: np.ndarray = field(default_factory=lambda: -np.eye(2, dtype=complex))
    L0: float = 1.0

    def __post_init__(self):
        U = np.array(self.U, dtype=complex)
        if U.shape != (2, 2):
            raise ValueError("U must be a 2x2 matrix")
        if np.linalg.norm(U.conj().T @ U - np.eye(2)) >= TOL:
            raise ValueError("U must be unitary")
        if self.L0 == 0 or not math.isfinite(self.L0):
            raise ValueError("L0 must be a non-zero real number")
        U.setflags(write=False)
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "L0", float(self.L0))

    def __eq__(self, other):
        if not isinstance(other, SymmetricParams):
            return NotImplemented
        return self.L0 == other.L0 and np.array_equal(self.U, other.U)

    def __hash__(self):
        return hash((self.L0, self.U.tobytes()))

    @classmethod
    def dirichlet(cls, L0: float = 1.0) -> "SymmetricParams":
        return cls(-np.eye(2), L0)

    @classmethod
    def neumann(cls, L0: float = 1.0) -> "SymmetricParams":
        return cls(np.eye(2), L0)

    @classmethod
    def robin(cls, alpha: float, L0: float = 1.0) -> "SymmetricParams":
        """Scalar boundary matrix ``U = e^{i alpha} I`` (unitary for every real alpha)."""
        return cls(np.exp(1j * alpha) * np.eye(2), L0)

    def to_dict(self) -> dict:
        return {"family": "symmetric",
                "U": [[[z.real, z.imag] for z in row] for row in self.U],
                "L0": self.L0}


@dataclass(frozen=True)
class BoundaryTraces:
    """One-sided values and derivatives at a junction (or at the two outer endpoints)."""

    val_minus: complex
    der_minus: complex
    val_plus: complex
    der_plus: complex

    def __post_init__(self):
        for name in ("val_minus", "der_minus", "val_plus", "der_plus"):
            v = complex(getattr(self, name))
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValueError(f"trace {name} is not finite")
            object.__setattr__(self, name, v)

    def as_array(self) -> np.ndarray:
        return np.array([self.val_minus, self.der_minus, self.val_plus, self.der_plus])

    @classmethod
    def from_array(cls, t) -> "BoundaryTraces":
        return cls(*(complex(v) for v in t))

    def to_dict(self) -> dict:
        return {n: [complex(getattr(self, n)).real, complex(getattr(self, n)).imag]
                for n in ("val_minus", "der_minus", "val_plus", "der_plus")}


Params = Union[ConnectedParams, SeparatedParams, SymmetricParams]


# -- matrices -----------------------------------------------------------------

def connected_matrix(p: ConnectedParams) -> np.ndarray:
    """Transfer matrix ``B`` mapping the minus-side traces to the plus side."""
    s = p.s
    return np.exp(1j * p.theta) * np.array(
        [[s * np.exp(1j * p.phi), p.b], [p.c, s * np.exp(-1j * p.phi)]]
    )


@dataclass(frozen=True, eq=False)
class AdjointTransfer:
    """Adjoint interface matrix together with the direction it maps traces in."""

    matrix: np.ndarray
    direction: str = "plus_to_minus"

    def forward_form(self) -> np.ndarray:
        """Equivalent matrix mapping minus-side traces to the plus side."""
        return np.linalg.inv(self.matrix)


def adjoint_connected(p: ConnectedParams) -> AdjointTransfer:
    """Interface matrix of the adjoint operator.

    The adjoint domain is ``(phi(0-), phi'(0-)) = Bt (phi(0+), phi'(0+))``;
    note the reversed direction compared with :func:`connected_matrix`.
    """
    s = p.s
    Bt = np.exp(-1j * p.theta) * np.array(
        [[s * np.exp(1j * p.phi), -p.b], [-p.c, s * np.exp(-1j * p.phi)]]
    )
    return AdjointTransfer(Bt)


def adjoint_separated(p: SeparatedParams) -> SeparatedParams:
    return SeparatedParams(theta=(-p.theta) % (2 * math.pi), h0=p.h0, h1=p.h1)


def parity_conjugated_matrix(p: ConnectedParams) -> np.ndarray:
    """Matrix of the parity image of ``Dom(L)``: ``e^{2 i theta}`` times the adjoint matrix."""
    return np.exp(2j * p.theta) * adjoint_connected(p).matrix


def plp_equals_adjoint(p: ConnectedParams) -> bool:
    """Whether ``P L P`` has the same domain as ``L*``.

    This is the literal matrix condition ``e^{2 i theta} = 1``, which also
    holds at ``theta = pi``.
    """
    return abs(np.exp(2j * p.theta) - 1) < TOL


# -- residuals ----------------------------------------------------------------

def bc_residual_connected(t: BoundaryTraces, B: np.ndarray, plus_to_minus: bool = False) -> float:
    vm = np.array([t.val_minus, t.der_minus])
    vp = np.array([t.val_plus, t.der_plus])
    if plus_to_minus:
        return float(np.linalg.norm(vm - B @ vp))
    return float(np.linalg.norm(vp - B @ vm))


def bc_residual_separated(t: BoundaryTraces, p: SeparatedParams) -> float:
    r = np.array([
        p.h0 * t.der_plus - p.h1 * np.exp(1j * p.theta) * t.val_plus,
        p.h0 * t.der_minus + p.h1 * np.exp(-1j * p.theta) * t.val_minus,
    ])
    return float(np.linalg.norm(r))


def bc_residual_symmetric(outer: BoundaryTraces, p: SymmetricParams) -> float:
    """Residual of the symmetric endpoint condition.

    ``outer.val_minus``/``der_minus`` are the traces at ``-l`` and
    ``val_plus``/``der_plus`` those at ``+l``.
    """
    Psi = np.array([outer.val_plus, outer.val_minus])
    dPsi = np.array([outer.der_plus, -outer.der_minus])
    I = np.eye(2)
    r = (p.U - I) @ Psi + 1j * p.L0 * (p.U + I) @ dPsi
    return float(np.linalg.norm(r))


# -- symmetry predicates ------------------------------------------------------

def domain_constraints(p: Union[ConnectedParams, SeparatedParams]) -> np.ndarray:
    """2x4 matrix whose kernel is the set of admissible trace vectors at 0."""
    if isinstance(p, ConnectedParams):
        return np.hstack([connected_matrix(p), -np.eye(2)])
    if isinstance(p, SeparatedParams):
        e = np.exp(1j * p.theta)
        return np.array([
            [0, 0, -p.h1 * e, p.h0],
            [p.h1 / e, p.h0, 0, 0],
        ], dtype=complex)
    raise TypeError(f"unsupported parameters {type(p).__name__}")


def adjoint_constraints(p: Union[ConnectedParams, SeparatedParams]) -> np.ndarray:
    if isinstance(p, ConnectedParams):
        return np.hstack([-np.eye(2), adjoint_connected(p).matrix])
    return domain_constraints(adjoint_separated(p))


def same_kernel(A: np.ndarray, B: np.ndarray, tol: float = TOL) -> bool:
    """Whether two full-rank constraint matrices cut out the same subspace."""
    s = np.linalg.svd(np.vstack([A, B]), compute_uv=False)
    return bool(s[A.shape[0]] < tol * s[0])


def symmetry_predicates(model) -> dict:
    """PT-symmetry, T-self-adjointness and P-pseudo-Hermiticity of the interface conditions.

    ``model`` is a ``ConnectedParams``, ``SeparatedParams`` or anything with a
    ``phi`` attribute (taken as the connected interaction with theta=b=c=0).
    """
    if not isinstance(model, (ConnectedParams, SeparatedParams)):
        model = ConnectedParams(phi=model.phi)
    A = domain_constraints(model)
    Aadj = adjoint_constraints(model)
    P = PARITY_TRACES
    return {
        "pt_symmetric": same_kernel(A, A.conj() @ P),
        "t_selfadjoint": same_kernel(Aadj, A.conj()),
        "p_pseudo_hermitian": same_kernel(Aadj, A @ P),
    }


# -- serialization ------------------------------------------------------------

def params_from_dict(d: dict) -> Params:
    d = dict(d)
    family = d.pop("family")
    if family == "connected":
        return ConnectedParams(**{k: float(v) for k, v in d.items()})
    if family == "separated":
        return SeparatedParams(**{k: float(v) for k, v in d.items()})
    if family == "symmetric":
        U = np.array([[complex(*z) for z in row] for row in d["U"]])
        return SymmetricParams(U, float(d.get("L0", 1.0)))
    if family in ("dirichlet", "neumann"):
        return getattr(SymmetricParams, family)(float(d.get("L0", 1.0)))
    if family == "robin":
        return SymmetricParams.robin(float(d["alpha"]), float(d.get("L0", 1.0)))
    raise ValueError(f"unknown boundary-condition family {family!r}")


def params_to_json(p: Params) -> str:
    return json.dumps(p.to_dict())


def params_from_json(s: str) -> Params:
    return params_from_dict(json.loads(s))
