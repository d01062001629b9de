"""Billiard domains, boundary discretizations, symmetry reduction and deformations.

All lengths are dimensionless (units with hbar = 2m = 1 for the billiard
problem).  Shapes are centered at the origin and carry both reflection
symmetries, so every shape can be reduced to its first-quadrant fundamental
domain.  Deformation families:

* ``Dilation(s)``  -- uniform scaling of the whole domain,
* ``Stretch(dl)``  -- symmetric change of the straight-section length,
* ``Physical(d)``  -- normal offset of every wall by a fixed distance
  (for a stadium this equals a dilation followed by a negative stretch,
  i.e. ``Stadium(r + d, l)``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InvalidParameterError, UnsupportedSymmetryError

__all__ = [
    "Stadium",
    "Rectangle",
    "Circle",
    "BilliardShape",
    "Dilation",
    "Stretch",
    "Physical",
    "Perturbation",
    "SymmetryClass",
    "BoundarySamples",
    "FundamentalDomain",
    "apply_perturbation",
    "boundary_samples",
    "desymmetrize",
    "equivalent_displacement",
    "shape_from_dict",
    "shape_to_dict",
    "perturbation_from_dict",
]


# ---------------------------------------------------------------------------
# shapes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Stadium:
    """Bunimovich stadium: straight sections of length ``l`` at y = +-r,
    capped by semicircles of radius ``r`` centered at (+-l/2, 0)."""

    r: float
    l: float

    def __post_init__(self):
        if self.r <= 0 or self.l < 0:
            raise InvalidParameterError(f"invalid stadium parameters r={self.r}, l={self.l}")

    def area(self) -> float:
        return math.pi * self.r**2 + 2.0 * self.r * self.l

    def perimeter(self) -> float:
        return 2.0 * math.pi * self.r + 2.0 * self.l

    def signed_distance(self, points: np.ndarray) -> np.ndarray:
        # distance to the capsule: segment core (-l/2,0)..(l/2,0), radius r
        p = np.atleast_2d(np.asarray(points, dtype=float))
        dx = np.maximum(np.abs(p[:, 0]) - 0.5 * self.l, 0.0)
        return np.hypot(dx, p[:, 1]) - self.r

    def inside(self, points: np.ndarray) -> np.ndarray:
        return self.signed_distance(points) < 0.0

    # extents of the first-quadrant fundamental domain
    @property
    def x_extent(self) -> float:
        return 0.5 * self.l + self.r

    @property
    def y_extent(self) -> float:
        return self.r

    def to_dict(self) -> dict:
        return {"type": "stadium", "r": self.r, "l": self.l}


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned rectangle of width ``a`` (x) and height ``b`` (y)."""

    a: float
    b: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise InvalidParameterError(f"invalid rectangle parameters a={self.a}, b={self.b}")

    def area(self) -> float:
        return self.a * self.b

    def perimeter(self) -> float:
        return 2.0 * (self.a + self.b)

    def signed_distance(self, points: np.ndarray) -> np.ndarray:
        p = np.atleast_2d(np.asarray(points, dtype=float))
        qx = np.abs(p[:, 0]) - 0.5 * self.a
        qy = np.abs(p[:, 1]) - 0.5 * self.b
        outside = np.hypot(np.maximum(qx, 0.0), np.maximum(qy, 0.0))
        inside = np.minimum(np.maximum(qx, qy), 0.0)
        return outside + inside

    def inside(self, points: np.ndarray) -> np.ndarray:
        return self.signed_distance(points) < 0.0

    @property
    def x_extent(self) -> float:
        return 0.5 * self.a

    @property
    def y_extent(self) -> float:
        return 0.5 * self.b

    def to_dict(self) -> dict:
        return {"type": "rectangle", "a": self.a, "b": self.b}


@dataclass(frozen=True)
class Circle:
    """Disk of radius ``R`` centered at the origin."""

    R: float

    def __post_init__(self):
        if self.R <= 0:
            raise InvalidParameterError(f"invalid circle radius R={self.R}")

    def area(self) -> float:
        return math.pi * self.R**2

    def perimeter(self) -> float:
        return 2.0 * math.pi * self.R

    def signed_distance(self, points: np.ndarray) -> np.ndarray:
        p = np.atleast_2d(np.asarray(points, dtype=float))
        return np.hypot(p[:, 0], p[:, 1]) - self.R

    def inside(self, points: np.ndarray) -> np.ndarray:
        return self.signed_distance(points) < 0.0

    @property
    def x_extent(self) -> float:
        return self.R

    @property
    def y_extent(self) -> float:
        return self.R

    def to_dict(self) -> dict:
        return {"type": "circle", "R": self.R}


BilliardShape = Union[Stadium, Rectangle, Circle]


# ---------------------------------------------------------------------------
# perturbations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Dilation:
    """Uniform scaling by factor ``s`` (identity at s = 1)."""

    s: float


@dataclass(frozen=True)
class Stretch:
    """Symmetric straight-section length change by ``dl`` (identity at 0).

    Both half-lines extend by dl/2, so both reflection symmetries survive.
    """

    dl: float


@dataclass(frozen=True)
class Physical:
    """Normal offset of every wall outward by ``d`` (identity at 0)."""

    d: float


Perturbation = Union[Dilation, Stretch, Physical]


def apply_perturbation(shape: BilliardShape, pert: Perturbation) -> BilliardShape:
    """Return the deformed shape. Pure; raises on non-positive resulting geometry."""
    if isinstance(pert, Dilation):
        s = pert.s
        if s <= 0:
            raise InvalidParameterError(f"dilation factor must be positive, got {s}")
        if isinstance(shape, Stadium):
            return Stadium(s * shape.r, s * shape.l)
        if isinstance(shape, Rectangle):
            return Rectangle(s * shape.a, s * shape.b)
        return Circle(s * shape.R)
    if isinstance(pert, Stretch):
        dl = pert.dl
        if isinstance(shape, Stadium):
            if shape.l + dl < 0:
                raise InvalidParameterError(f"stretch {dl} would make straight length negative")
            return Stadium(shape.r, shape.l + dl)
        if isinstance(shape, Rectangle):
            # stretch acts on the long axis
            if shape.a >= shape.b:
                if shape.a + dl <= 0:
                    raise InvalidParameterError(f"stretch {dl} exceeds rectangle width")
                return Rectangle(shape.a + dl, shape.b)
            if shape.b + dl <= 0:
                raise InvalidParameterError(f"stretch {dl} exceeds rectangle height")
            return Rectangle(shape.a, shape.b + dl)
        # a stretched circle grows straight sections: it becomes a stadium
        if dl < 0:
            raise InvalidParameterError("cannot stretch a circle by a negative length")
        if dl == 0:
            return shape
        return Stadium(shape.R, dl)
    if isinstance(pert, Physical):
        d = pert.d
        if isinstance(shape, Stadium):
            if shape.r + d <= 0:
                raise InvalidParameterError(f"wall offset {d} collapses the stadium")
            return Stadium(shape.r + d, shape.l)
        if isinstance(shape, Rectangle):
            if shape.a + 2 * d <= 0 or shape.b + 2 * d <= 0:
                raise InvalidParameterError(f"wall offset {d} collapses the rectangle")
            return Rectangle(shape.a + 2 * d, shape.b + 2 * d)
        if shape.R + d <= 0:
            raise InvalidParameterError(f"wall offset {d} collapses the circle")
        return Circle(shape.R + d)
    raise InvalidParameterError(f"unknown perturbation {pert!r}")


def equivalent_displacement(shape: BilliardShape, pert: Perturbation) -> float:
    """Mean normal wall displacement of the deformation (first order in strength).

    Computed as (area change)/(perimeter), which reduces to ``d`` exactly for
    the physical perturbation.  Used to compare perturbation families on a
    common strength axis.
    """
    new = apply_perturbation(shape, pert)
    return (new.area() - shape.area()) / shape.perimeter()


# ---------------------------------------------------------------------------
# symmetry classes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SymmetryClass:
    """Reflection parity pair (px, py), each +1 (even) or -1 (odd)."""

    px: int
    py: int

    def __post_init__(self):
        if self.px not in (-1, 1) or self.py not in (-1, 1):
            raise InvalidParameterError(f"parities must be +-1, got ({self.px}, {self.py})")

    @classmethod
    def from_string(cls, s: str) -> "SymmetryClass":
        """Parse '--', '+-', '-+' or '++' (x parity first)."""
        if len(s) != 2 or any(c not in "+-" for c in s):
            raise InvalidParameterError(f"bad parity string {s!r}")
        return cls(1 if s[0] == "+" else -1, 1 if s[1] == "+" else -1)

    def __str__(self) -> str:
        return ("+" if self.px > 0 else "-") + ("+" if self.py > 0 else "-")

    @classmethod
    def all_classes(cls):
        return [cls(px, py) for px in (1, -1) for py in (1, -1)]


# ---------------------------------------------------------------------------
# boundary sampling
# ---------------------------------------------------------------------------


@dataclass
class BoundarySamples:
    """Midpoint-rule boundary discretization.

    positions : (M, 2) sample points
    normals   : (M, 2) outward unit normals
    weights   : (M,) arc-length panel weights (sum = sampled length)
    """

    positions: np.ndarray
    normals: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.weights)


def _sample_segment(p0, p1, n_samples):
    """Midpoint samples along a straight segment with constant outward normal."""
    p0 = np.asarray(p0, float)
    p1 = np.asarray(p1, float)
    t = (np.arange(n_samples) + 0.5) / n_samples
    pos = p0[None, :] + t[:, None] * (p1 - p0)[None, :]
    seg = p1 - p0
    length = math.hypot(*seg)
    normal = np.array([seg[1], -seg[0]]) / length  # right-hand normal of p0->p1
    normals = np.tile(normal, (n_samples, 1))
    weights = np.full(n_samples, length / n_samples)
    return pos, normals, weights


def _sample_arc(center, radius, theta0, theta1, n_samples):
    """Midpoint samples along a circular arc, outward normal = radial direction."""
    t = (np.arange(n_samples) + 0.5) / n_samples
    theta = theta0 + t * (theta1 - theta0)
    normals = np.column_stack([np.cos(theta), np.sin(theta)])
    pos = np.asarray(center, float)[None, :] + radius * normals
    length = abs(theta1 - theta0) * radius
    weights = np.full(n_samples, length / n_samples)
    return pos, normals, weights


def _assemble(parts) -> BoundarySamples:
    pos = np.concatenate([p for p, _, _ in parts])
    nor = np.concatenate([n for _, n, _ in parts])
    wts = np.concatenate([w for _, _, w in parts])
    return BoundarySamples(pos, nor, wts)


def _counts(lengths, total_samples):
    """Distribute a sample budget over segments proportionally to length."""
    lengths = np.asarray(lengths, float)
    raw = lengths / lengths.sum() * total_samples
    counts = np.maximum(1, np.rint(raw).astype(int))
    return counts


def boundary_samples(shape: BilliardShape, points_per_wavelength: float, k: float) -> BoundarySamples:
    """Sample the full shape boundary at ``points_per_wavelength`` points per
    wavelength 2*pi/k, approximately uniform in arc length.

    Corners of the rectangle are never sampled (midpoint-panel rule).
    """
    if points_per_wavelength < 3:
        raise InvalidParameterError("need at least 3 points per wavelength")
    if k <= 0:
        raise InvalidParameterError("wavenumber must be positive")
    total = max(8, math.ceil(shape.perimeter() * k / (2.0 * math.pi) * points_per_wavelength))
    if isinstance(shape, Circle):
        return _assemble([_sample_arc((0.0, 0.0), shape.R, 0.0, 2.0 * math.pi, total)])
    if isinstance(shape, Rectangle):
        a, b = shape.a, shape.b
        counts = _counts([a, b, a, b], total)
        parts = [
            _sample_segment((-a / 2, -b / 2), (a / 2, -b / 2), counts[0]),
            _sample_segment((a / 2, -b / 2), (a / 2, b / 2), counts[1]),
            _sample_segment((a / 2, b / 2), (-a / 2, b / 2), counts[2]),
            _sample_segment((-a / 2, b / 2), (-a / 2, -b / 2), counts[3]),
        ]
        return _assemble(parts)
    # stadium, counter-clockwise from the bottom straight
    r, l = shape.r, shape.l
    arc = math.pi * r
    counts = _counts([l, arc, l, arc], total)
    parts = [
        _sample_segment((-l / 2, -r), (l / 2, -r), counts[0]),
        _sample_arc((l / 2, 0.0), r, -math.pi / 2, math.pi / 2, counts[1]),
        _sample_segment((l / 2, r), (-l / 2, r), counts[2]),
        _sample_arc((-l / 2, 0.0), r, math.pi / 2, 3 * math.pi / 2, counts[3]),
    ]
    return _assemble(parts)


# ---------------------------------------------------------------------------
# desymmetrization
# ---------------------------------------------------------------------------


@dataclass
class FundamentalDomain:
    """First-quadrant fundamental domain of a doubly symmetric shape.

    The symmetry lines carry Dirichlet (odd parity) or Neumann (even parity)
    conditions; ``dirichlet_length``/``neumann_length`` feed the Weyl count of
    the reduced problem.
    """

    shape: BilliardShape
    cls: SymmetryClass

    @property
    def area(self) -> float:
        return 0.25 * self.shape.area()

    @property
    def wall_length(self) -> float:
        return 0.25 * self.shape.perimeter()

    @property
    def x_axis_length(self) -> float:
        # symmetry line y = 0, governed by the y-parity
        return self.shape.x_extent

    @property
    def y_axis_length(self) -> float:
        # symmetry line x = 0, governed by the x-parity
        return self.shape.y_extent

    @property
    def dirichlet_length(self) -> float:
        ld = self.wall_length
        if self.cls.py < 0:
            ld += self.x_axis_length
        if self.cls.px < 0:
            ld += self.y_axis_length
        return ld

    @property
    def neumann_length(self) -> float:
        ln = 0.0
        if self.cls.py > 0:
            ln += self.x_axis_length
        if self.cls.px > 0:
            ln += self.y_axis_length
        return ln

    @property
    def perimeter(self) -> float:
        return self.wall_length + self.x_axis_length + self.y_axis_length

    def inside(self, points: np.ndarray) -> np.ndarray:
        p = np.atleast_2d(np.asarray(points, float))
        return self.shape.inside(p) & (p[:, 0] > 0.0) & (p[:, 1] > 0.0)

    def wall_samples(self, points_per_wavelength: float, k: float) -> BoundarySamples:
        """Midpoint samples of the physical wall only (symmetry lines excluded)."""
        if points_per_wavelength < 3:
            raise InvalidParameterError("need at least 3 points per wavelength")
        if k <= 0:
            raise InvalidParameterError("wavenumber must be positive")
        shape = self.shape
        total = max(8, math.ceil(self.wall_length * k / (2.0 * math.pi) * points_per_wavelength))
        if isinstance(shape, Circle):
            return _assemble([_sample_arc((0.0, 0.0), shape.R, 0.0, math.pi / 2, total)])
        if isinstance(shape, Rectangle):
            a, b = shape.a, shape.b
            counts = _counts([b / 2, a / 2], total)
            parts = [
                _sample_segment((a / 2, 0.0), (a / 2, b / 2), counts[0]),
                _sample_segment((a / 2, b / 2), (0.0, b / 2), counts[1]),
            ]
            return _assemble(parts)
        r, l = shape.r, shape.l
        counts = _counts([math.pi * r / 2, l / 2], total)
        parts = [
            _sample_arc((l / 2, 0.0), r, 0.0, math.pi / 2, counts[0]),
            _sample_segment((l / 2, r), (0.0, r), counts[1]),
        ]
        return _assemble(parts)

    def weyl_count(self, k: float) -> float:
        """Smoothed counting function N(k) for the reduced mixed-BC problem."""
        return (
            self.area * k**2 / (4.0 * math.pi)
            - (self.dirichlet_length - self.neumann_length) * k / (4.0 * math.pi)
        )


def desymmetrize(shape: BilliardShape, cls: SymmetryClass) -> FundamentalDomain:
    """Reduce a doubly symmetric shape to its first-quadrant domain.

    All supported shapes are symmetric about both axes; anything else is an
    error.
    """
    if not isinstance(shape, (Stadium, Rectangle, Circle)):
        raise UnsupportedSymmetryError(f"shape {shape!r} has no double reflection symmetry")
    return FundamentalDomain(shape, cls)


# ---------------------------------------------------------------------------
# (de)serialization helpers for configs and cache descriptors
# ---------------------------------------------------------------------------


def shape_to_dict(shape: BilliardShape) -> dict:
    if isinstance(shape, Stadium):
        return {"type": "stadium", "r": shape.r, "l": shape.l}
    if isinstance(shape, Rectangle):
        return {"type": "rectangle", "a": shape.a, "b": shape.b}
    return {"type": "circle", "R": shape.R}


def shape_from_dict(d: dict) -> BilliardShape:
    kind = d.get("type")
    try:
        if kind == "stadium":
            return Stadium(float(d["r"]), float(d["l"]))
        if kind == "rectangle":
            return Rectangle(float(d["a"]), float(d["b"]))
        if kind == "circle":
            return Circle(float(d["R"]))
    except KeyError as exc:
        raise InvalidParameterError(f"shape record missing key {exc}") from exc
    raise InvalidParameterError(f"unknown shape type {kind!r}")


def perturbation_from_dict(d: dict) -> Perturbation:
    kind = d.get("type")
    if kind == "dilation":
        return Dilation(float(d.get("s", 1.0)))
    if kind == "stretch":
        return Stretch(float(d.get("dl", 0.0)))
    if kind == "physical":
        return Physical(float(d.get("d", 0.0)))
    raise InvalidParameterError(f"unknown perturbation type {kind!r}")
