"""Zeros of analytic functions in rectangles: argument principle, quadrisection, Newton.

``f`` must accept a complex ndarray and return an array of the same shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

ZERO_TOL = 1e-12
GOLDEN = (math.sqrt(5) - 1) / 2


class ContourZeroError(RuntimeError):
    """A zero lies on (or numerically on) the integration contour."""


@dataclass(frozen=True)
class Rectangle:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError("empty rectangle")

    @property
    def width(self) -> float:
        return self.re_max - self.re_min

    @property
    def height(self) -> float:
        return self.im_max - self.im_min

    @property
    def diameter(self) -> float:
        return math.hypot(self.width, self.height)

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    def contains(self, z: complex, pad: float = 0.0) -> bool:
        return (self.re_min - pad <= z.real <= self.re_max + pad
                and self.im_min - pad <= z.imag <= self.im_max + pad)

    def grow(self, d: float) -> "Rectangle":
        return Rectangle(self.re_min - d, self.re_max + d, self.im_min - d, self.im_max + d)

    def split(self, fx: float = 0.5, fy: float = 0.5) -> list["Rectangle"]:
        x = self.re_min + fx * self.width
        y = self.im_min + fy * self.height
        return [Rectangle(self.re_min, x, self.im_min, y), Rectangle(x, self.re_max, self.im_min, y),
                Rectangle(self.re_min, x, y, self.im_max), Rectangle(x, self.re_max, y, self.im_max)]

    def boundary(self, n: int) -> np.ndarray:
        """``4 n`` counter-clockwise points, first vertex repeated at the end."""
        t = np.arange(n) / n
        a, b = self.re_min, self.re_max
        c, d = self.im_min, self.im_max
        pts = np.concatenate([
            a + t * (b - a) + 1j * c,
            b + 1j * (c + t * (d - c)),
            b + t * (a - b) + 1j * d,
            a + 1j * (d + t * (c - d)),
        ])
        return np.append(pts, pts[0])

    @classmethod
    def parse(cls, text: str) -> "Rectangle":
        vals = [float(v) for v in text.split(",")]
        if len(vals) != 4:
            raise ValueError("region must be 're_min,re_max,im_min,im_max'")
        return cls(*vals)


@dataclass(frozen=True)
class RootConfig:
    edge_samples: int = 64
    max_depth: int = 40
    polish_tol: float = 1e-12
    min_box: float = 1e-6
    derivative_step: float = 1e-3
    max_refine: int = 24
    max_retries: int = 8

    def __post_init__(self):
        if self.edge_samples < 64:
            raise ValueError("edge_samples must be at least 64")
        if self.max_depth < 1 or self.min_box <= 0 or self.polish_tol <= 0 or self.derivative_step <= 0:
            raise ValueError("invalid root-finding configuration")


@dataclass(frozen=True)
class Root:
    k: complex
    multiplicity: int
    residual: float
    verified: bool = True
    unresolved: bool = False


@dataclass(frozen=True)
class RootSet:
    roots: tuple
    region: Rectangle
    total_winding: int
    scale: float

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)

    @property
    def values(self) -> np.ndarray:
        return np.array([r.k for r in self.roots], dtype=complex)


def _ev(f: Callable, z) -> np.ndarray:
    return np.asarray(f(np.asarray(z, dtype=complex)), dtype=complex)


def _polygon_winding(f: Callable, pts: np.ndarray, cfg: RootConfig, scale: Optional[float] = None):
    """Winding number of ``f`` along a closed polyline, refined until phase steps are below pi/2.

    Returns ``(winding, scale)`` where ``scale`` is the median ``|f|`` on the
    initial samples.
    """
    z = np.asarray(pts, dtype=complex)
    v = _ev(f, z)
    if scale is None:
        scale = float(np.median(np.abs(v)))
    if not np.all(np.isfinite(v)):
        raise FloatingPointError("non-finite function values on contour")
    length = float(np.sum(np.abs(np.diff(z))))
    for _ in range(cfg.max_refine + 1):
        if np.any(np.abs(v) <= ZERO_TOL * scale):
            raise ContourZeroError("zero on contour")
        d = np.angle(v[1:] / v[:-1])
        bad = np.abs(d) > math.pi / 2
        if not bad.any():
            w = d.sum() / (2 * math.pi)
            n = round(w)
            if abs(w - n) > 1e-3:
                raise ContourZeroError(f"non-integer winding {w}")
            return int(n), scale
        idx = np.nonzero(bad)[0]
        if np.min(np.abs(z[idx + 1] - z[idx])) < 1e-13 * length:
            raise ContourZeroError("contour refinement stalled")
        mid = 0.5 * (z[idx] + z[idx + 1])
        z = np.insert(z, idx + 1, mid)
        v = np.insert(v, idx + 1, _ev(f, mid))
    raise ContourZeroError("contour refinement limit reached")


def winding_count(f: Callable, rect: Rectangle, cfg: Optional[RootConfig] = None) -> int:
    """Number of zeros (with multiplicity) inside ``rect``."""
    cfg = cfg or RootConfig()
    return _polygon_winding(f, rect.boundary(cfg.edge_samples), cfg)[0]


def circle_winding(f: Callable, z0: complex, radius: float, cfg: Optional[RootConfig] = None) -> int:
    cfg = cfg or RootConfig()
    t = np.linspace(0.0, 2 * math.pi, 4 * cfg.edge_samples + 1)
    pts = z0 + radius * np.exp(1j * t)
    pts[-1] = pts[0]
    return _polygon_winding(f, pts, cfg)[0]


def cauchy_derivative(f: Callable, z: complex, radius: float, m: int = 16) -> complex:
    """``f'(z)`` from the trapezoidal rule on a circle (exact for analytic f up to aliasing)."""
    t = np.exp(2j * math.pi * np.arange(m) / m)
    return complex(np.mean(_ev(f, z + radius * t) / t) / radius)


def newton(f: Callable, z0: complex, cfg: RootConfig, multiplicity: int = 1,
           fprime: Optional[Callable] = None, scale: float = 1.0, maxiter: int = 60):
    """Modified Newton iteration ``z -= m f/f'``.  Returns ``(z, |f(z)|, converged)``."""
    z = complex(z0)
    fz = complex(_ev(f, [z])[0])
    best = (abs(fz), z)
    extra = 0
    for _ in range(maxiter):
        if abs(fz) <= cfg.polish_tol * scale:
            # a few more steps to reach full precision
            extra += 1
            if extra > 3 or fz == 0:
                break
        r = cfg.derivative_step * max(1.0, abs(z))
        df = complex(_ev(fprime, [z])[0]) if fprime else cauchy_derivative(f, z, r)
        if df == 0 or not np.isfinite(df):
            break
        step = multiplicity * fz / df
        z_new = z - step
        f_new = complex(_ev(f, [z_new])[0])
        if not np.isfinite(f_new):
            break
        z, fz = z_new, f_new
        if abs(fz) < best[0]:
            best = (abs(fz), z)
        if abs(step) <= 1e-15 * max(1.0, abs(z)):
            break
    res, z = best
    return z, res, res <= cfg.polish_tol * scale


def _split_offsets():
    # deterministic, avoids the exact midpoint (real roots sit on Im k = 0)
    yield 0.5 + 0.5 * (GOLDEN - 0.5) * 0.1, 0.5 - 0.5 * (GOLDEN - 0.5) * 0.13
    for i in range(1, 12):
        a = (i * GOLDEN) % 1
        yield 0.3 + 0.4 * a, 0.7 - 0.4 * ((i * GOLDEN * GOLDEN) % 1)


def _children(f, box: Rectangle, n: int, cfg: RootConfig, scale: float):
    for fx, fy in _split_offsets():
        kids = box.split(fx, fy)
        try:
            counts = [_polygon_winding(f, r.boundary(cfg.edge_samples), cfg, scale)[0] for r in kids]
        except ContourZeroError:
            continue
        if sum(counts) == n and min(counts) >= 0:
            return list(zip(kids, counts))
    return None


def _is_multiple(f, z, n, box, cfg) -> bool:
    """All ``n`` zeros of the box sit within a tiny circle around ``z``."""
    rad = max(1e-4 * min(box.width, box.height), cfg.min_box)
    try:
        return circle_winding(f, z, rad, cfg) == n
    except ContourZeroError:
        return False


def find_roots(f: Callable, region: Rectangle, cfg: Optional[RootConfig] = None,
               fprime: Optional[Callable] = None) -> RootSet:
    """All zeros of an analytic ``f`` inside ``region``, sorted by real then imaginary part.

    If a zero sits on the boundary the region is enlarged by a small
    deterministic amount (at most ``max_retries`` times).  Boxes that still
    contain several zeros at ``min_box`` or ``max_depth`` are returned as one
    cluster root with ``unresolved=True``.
    """
    cfg = cfg or RootConfig()
    rect = region
    for attempt in range(cfg.max_retries + 1):
        try:
            total, scale = _polygon_winding(f, rect.boundary(cfg.edge_samples), cfg)
            break
        except ContourZeroError:
            if attempt == cfg.max_retries:
                raise
            rect = region.grow(region.diameter * 1e-7 * (1 + attempt) * (1 + GOLDEN))
    if total < 0:
        raise ContourZeroError("negative winding: f has poles in the region")
    scale = max(scale, np.finfo(float).tiny)

    found: list[tuple[Root, float]] = []
    stack = [(rect, total, 0)]
    while stack:
        box, n, depth = stack.pop()
        if n == 0:
            continue
        small = max(box.width, box.height) < cfg.min_box or depth >= cfg.max_depth
        if n == 1 or small or depth >= 2:
            z, res, ok = newton(f, box.center, cfg, multiplicity=n, fprime=fprime, scale=scale)
            if ok and box.contains(z, pad=1e-9 * box.diameter) and (
                    n == 1 or small or _is_multiple(f, z, n, box, cfg)):
                found.append((Root(z, n, res), min(box.width, box.height)))
                continue
            if small:
                c = box.center
                found.append((Root(c, n, float(abs(_ev(f, [c])[0])), False, True), 0.0))
                continue
        kids = _children(f, box, n, cfg, scale)
        if kids is None:
            c = box.center
            found.append((Root(c, n, float(abs(_ev(f, [c])[0])), False, True), 0.0))
            continue
        stack.extend((r, m, depth + 1) for r, m in kids if m > 0)

    roots = []
    zs = np.array([r.k for r, _ in found], dtype=complex)
    for i, (r, side) in enumerate(found):
        if r.unresolved:
            roots.append(r)
            continue
        others = np.delete(zs, i)
        gap = float(np.min(np.abs(others - r.k))) if len(others) else math.inf
        rad = max(min(0.25 * gap, 0.5 * side, 1e-2 * rect.diameter), 1e-9 * rect.diameter)
        try:
            ok = circle_winding(f, r.k, rad, cfg) == r.multiplicity
        except ContourZeroError:
            ok = False
        roots.append(Root(r.k, r.multiplicity, r.residual, ok, False))
    roots.sort(key=lambda r: (r.k.real, r.k.imag))
    return RootSet(tuple(roots), rect, total, scale)
