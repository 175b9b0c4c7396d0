"""Hyperbolic plane primitives in the upper half-plane model.

Finite points are complex numbers z with Im z > 0.  Ideal (boundary) points
are floats on the real axis or the constant INFINITY.  All formulas are the
standard closed forms for the metric ds = |dz| / y; the Poincare disk enters
only through :func:`to_disk` for rendering and for robust intersection
clipping.

Fermi convention: a geodesic with real endpoints a < b has base point at its
Euclidean top c + ri (c = (a+b)/2, r = (b-a)/2), positive arclength toward b,
positive offset to the left of travel.  For {x, INFINITY} the base point is
x + i and the positive direction points up.
"""

from __future__ import annotations

import cmath
import math
import os
from dataclasses import dataclass, field

from .errors import PreconditionError

INFINITY = math.inf

#: geometric tolerance for incidence/angle checks; HF_TOLERANCE overrides
EPS_GEOM = float(os.environ.get("HF_TOLERANCE", "1e-9"))

#: ideal vertices are clipped at this disk-model radius for intersection tests
IDEAL_CLIP_RADIUS = 1.0 - 1e-7


def set_geometry_tolerance(eps: float) -> None:
    global EPS_GEOM
    EPS_GEOM = float(eps)


class CoincidentPoints(PreconditionError):
    pass


class DegenerateVertex(PreconditionError):
    pass


class TooFewVertices(PreconditionError):
    pass


class NotUltraparallel(PreconditionError):
    pass


class TraceNotHyperbolic(PreconditionError):
    pass


def is_ideal(p) -> bool:
    """True for a boundary point (real number or INFINITY), False for an HPoint."""
    if isinstance(p, complex):
        return p.imag == 0.0
    return True


def _require_finite(p, what="point"):
    if is_ideal(p):
        raise PreconditionError(f"{what} must lie in the open upper half-plane: {p!r}")
    return complex(p)


def boundary_value(p) -> float:
    """Real coordinate of an ideal point (INFINITY included)."""
    if isinstance(p, complex):
        if p.imag != 0.0:
            raise PreconditionError(f"not a boundary point: {p!r}")
        return p.real
    return float(p)


def dist(p: complex, q: complex) -> float:
    """Hyperbolic distance between finite points.

    Uses the sinh(d/2) form, which is accurate for nearby points where
    acosh(1 + small) loses digits.
    """
    p = _require_finite(p)
    q = _require_finite(q)
    return 2.0 * math.asinh(abs(p - q) / (2.0 * math.sqrt(p.imag * q.imag)))


class Geodesic:
    """Complete geodesic named by its unordered pair of ideal endpoints."""

    __slots__ = ("a", "b")

    def __init__(self, e1, e2):
        e1 = boundary_value(e1)
        e2 = boundary_value(e2)
        if e1 == e2:
            raise CoincidentPoints(f"geodesic endpoints coincide: {e1}")
        # canonical order: finite ascending, INFINITY last
        if e1 == INFINITY or (e2 != INFINITY and e1 > e2):
            e1, e2 = e2, e1
        self.a = e1
        self.b = e2

    def __repr__(self):
        return f"Geodesic({self.a!r}, {self.b!r})"

    def __eq__(self, other):
        return isinstance(other, Geodesic) and self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    @property
    def is_vertical(self) -> bool:
        return self.b == INFINITY

    @property
    def center(self) -> float:
        if self.is_vertical:
            raise PreconditionError("vertical geodesic has no Euclidean center")
        return 0.5 * (self.a + self.b)

    @property
    def radius(self) -> float:
        if self.is_vertical:
            raise PreconditionError("vertical geodesic has no Euclidean radius")
        return 0.5 * (self.b - self.a)

    def basepoint(self) -> complex:
        """Origin of the Fermi parametrization (see module docstring)."""
        if self.is_vertical:
            return complex(self.a, 1.0)
        return complex(self.center, self.radius)

    def contains(self, p, tol=None) -> bool:
        tol = EPS_GEOM if tol is None else tol
        if is_ideal(p):
            u = boundary_value(p)
            return u == self.a or u == self.b or abs(u - self.a) <= tol or abs(u - self.b) <= tol
        p = complex(p)
        if self.is_vertical:
            return abs(p.real - self.a) <= tol * max(1.0, abs(p))
        return abs(abs(p - self.center) - self.radius) <= tol * max(1.0, self.radius)

    def endpoints(self):
        return (self.a, self.b)

    def side(self, p: complex) -> float:
        """Signed side of a finite point: 0 on the geodesic, opposite signs across it."""
        p = _require_finite(p)
        if self.is_vertical:
            return p.real - self.a
        return abs(p - self.center) - self.radius


def geodesic_through(p, q) -> Geodesic:
    """Geodesic through two distinct points, at most one of them ideal."""
    p_ideal, q_ideal = is_ideal(p), is_ideal(q)
    if p_ideal and q_ideal:
        raise PreconditionError("at most one ideal input; use Geodesic for two ideal points")
    if p_ideal:
        p, q = q, p
        p_ideal, q_ideal = q_ideal, p_ideal
    p = _require_finite(p)
    if q_ideal:
        u = boundary_value(q)
        if u == INFINITY:
            return Geodesic(p.real, INFINITY)
        if abs(u - p.real) <= EPS_GEOM * max(1.0, abs(p)):
            return Geodesic(p.real, INFINITY)
        c = (abs(p) ** 2 - u * u) / (2.0 * (p.real - u))
        return Geodesic(u, 2.0 * c - u)
    q = complex(q)
    if abs(p - q) <= EPS_GEOM * max(1.0, abs(p), abs(q)):
        raise CoincidentPoints(f"cannot join coincident points {p} and {q}")
    if abs(p.real - q.real) <= EPS_GEOM * max(1.0, abs(p), abs(q)):
        return Geodesic(0.5 * (p.real + q.real), INFINITY)
    c = (abs(p) ** 2 - abs(q) ** 2) / (2.0 * (p.real - q.real))
    r = abs(p - c)
    return Geodesic(c - r, c + r)


def direction(frm: complex, to) -> complex:
    """Unit tangent (chart vector) at `frm` along the geodesic toward `to`.

    `to` may be a finite point or a boundary point.
    """
    frm = _require_finite(frm)
    if is_ideal(to):
        u = boundary_value(to)
        if u == INFINITY:
            return 1j
        if abs(u - frm.real) <= EPS_GEOM * max(1.0, abs(frm)):
            return -1j
        c = (abs(frm) ** 2 - u * u) / (2.0 * (frm.real - u))
        tang = 1j * (frm - c)
        tang /= abs(tang)
        # increasing arg moves away from u iff u > c maps to arg 0
        return -tang if u > c else tang
    to = complex(to)
    if abs(to - frm) <= EPS_GEOM * max(1.0, abs(frm), abs(to)):
        raise CoincidentPoints("direction between coincident points")
    if abs(frm.real - to.real) <= EPS_GEOM * max(1.0, abs(frm), abs(to)):
        return 1j if to.imag > frm.imag else -1j
    c = (abs(frm) ** 2 - abs(to) ** 2) / (2.0 * (frm.real - to.real))
    tang = 1j * (frm - c)
    tang /= abs(tang)
    th_f = cmath.phase(frm - c)
    th_t = cmath.phase(to - c)
    return tang if th_t > th_f else -tang


def interior_angle(a, b: complex, c) -> float:
    """Unsigned angle in [0, pi] at b between the geodesic segments b->a and b->c."""
    b = _require_finite(b, "angle vertex")
    for x in (a, c):
        if not is_ideal(x) and abs(complex(x) - b) <= EPS_GEOM * max(1.0, abs(b)):
            raise DegenerateVertex("angle endpoint coincides with the vertex")
    u = direction(b, a)
    v = direction(b, c)
    ang = abs(cmath.phase(u / v))
    return ang


def angle_between(l1: Geodesic, l2: Geodesic, at: complex) -> float:
    """Unsigned crossing angle of two geodesics at a common point."""
    # pick the endpoint of each line that is not "behind" -- either works
    u = direction(at, l1.a if not (l1.is_vertical and l1.a == INFINITY) else l1.b)
    v = direction(at, l2.a if not (l2.is_vertical and l2.a == INFINITY) else l2.b)
    ang = abs(cmath.phase(u / v))
    return min(ang, math.pi - ang)


# ---------------------------------------------------------------------------
# Mobius helpers private to this module (the full Isometry type lives in
# hypcone.isometry; these small closed forms avoid a circular import).
# ---------------------------------------------------------------------------


def _mob(m, z):
    a, b, c, d = m
    if is_ideal(z):
        u = boundary_value(z)
        if u == INFINITY:
            return INFINITY if c == 0.0 else a / c
        den = c * u + d
        if den == 0.0:
            return INFINITY
        return (a * u + b) / den
    z = complex(z)
    return (a * z + b) / (c * z + d)


def _frame_to(l: Geodesic):
    """Matrix sending {0, INFINITY} with base point i onto l with its base point."""
    if l.is_vertical:
        return (1.0, l.a, 0.0, 1.0)
    s = math.sqrt(l.b - l.a)
    return (l.b / s, l.a / s, 1.0 / s, 1.0 / s)


def _frame_inv(m):
    a, b, c, d = m
    return (d, -b, -c, a)


def fermi_point(l: Geodesic, s: float, h: float) -> complex:
    """Point at signed arclength s along l and signed perpendicular offset h."""
    es = math.exp(s)
    base = complex(-math.tanh(h), 1.0 / math.cosh(h)) * es
    return _mob(_frame_to(l), base)


def fermi_coordinates(l: Geodesic, p: complex):
    """Inverse of fermi_point: (arclength of foot, signed offset)."""
    w = _mob(_frame_inv(_frame_to(l)), _require_finite(p))
    s = math.log(abs(w))
    h = math.asinh(-w.real / w.imag)
    return s, h


def perpendicular_foot(l: Geodesic, p: complex) -> complex:
    s, _ = fermi_coordinates(l, p)
    return fermi_point(l, s, 0.0)


def dist_to_geodesic(l: Geodesic, p: complex) -> float:
    return abs(fermi_coordinates(l, p)[1])


def perpendicular_at(l: Geodesic, s: float) -> Geodesic:
    """Geodesic through the arclength-s point of l, orthogonal to l."""
    m = _frame_to(l)
    es = math.exp(s)
    return Geodesic(_mob(m, -es), _mob(m, es))


def reflect_point(l: Geodesic, p):
    """Reflection of a point (finite or ideal) in the geodesic l."""
    if is_ideal(p):
        u = boundary_value(p)
        if l.is_vertical:
            return INFINITY if u == INFINITY else 2.0 * l.a - u
        if u == INFINITY:
            return l.center
        if u == l.center:
            return INFINITY
        return l.center + l.radius**2 / (u - l.center)
    p = _require_finite(p)
    if l.is_vertical:
        return complex(2.0 * l.a - p.real, p.imag)
    w = p.conjugate() - l.center
    return l.center + l.radius**2 / w


def geodesic_intersection(l1: Geodesic, l2: Geodesic) -> complex:
    """Finite intersection point of two crossing geodesics."""
    if l1 == l2:
        raise PreconditionError("geodesics coincide")
    if l1.is_vertical and l2.is_vertical:
        raise PreconditionError("parallel vertical geodesics do not cross")
    if l1.is_vertical or l2.is_vertical:
        v, c = (l1, l2) if l1.is_vertical else (l2, l1)
        y2 = c.radius**2 - (v.a - c.center) ** 2
        if y2 <= 0.0:
            raise PreconditionError(f"{l1} and {l2} do not cross")
        return complex(v.a, math.sqrt(y2))
    if l1.center == l2.center:
        raise PreconditionError("concentric geodesics do not cross")
    x = (l1.center**2 - l1.radius**2 - l2.center**2 + l2.radius**2) / (2.0 * (l1.center - l2.center))
    y2 = l1.radius**2 - (x - l1.center) ** 2
    if y2 <= 0.0:
        raise PreconditionError(f"{l1} and {l2} do not cross")
    return complex(x, math.sqrt(y2))


def common_perpendicular(l1: Geodesic, l2: Geodesic) -> Geodesic:
    """The unique geodesic orthogonal to two ultraparallel geodesics."""
    if l1 == l2:
        raise NotUltraparallel("identical geodesics")
    shared = {l1.a, l1.b} & {l2.a, l2.b}
    if shared:
        raise NotUltraparallel(f"asymptotic geodesics share endpoint {shared.pop()}")
    m = _frame_inv(_frame_to(l1))  # sends l1 to {0, INFINITY}
    u = _mob(m, l2.a)
    v = _mob(m, l2.b)
    if u == INFINITY or v == INFINITY or u == 0.0 or v == 0.0:
        raise NotUltraparallel("asymptotic geodesics")
    if u * v < 0.0:
        raise NotUltraparallel("geodesics cross")
    r = math.sqrt(u * v)
    r = math.copysign(r, u)
    back = _frame_to(l1)
    return Geodesic(_mob(back, -r), _mob(back, r))


def collar_width(t: float) -> float:
    """Half-width of the embedded collar of a closed geodesic with trace t.

    sinh w = 1 / sinh(d/2) with d = 2 acosh(t/2) the geodesic length.
    """
    if t <= 2.0:
        raise TraceNotHyperbolic(f"collar width needs trace > 2, got {t}")
    half_d = math.acosh(t / 2.0)
    return math.asinh(1.0 / math.sinh(half_d))


def trace_to_length(t: float) -> float:
    """Translation length 2 acosh(|t|/2) of a hyperbolic with trace t."""
    if abs(t) <= 2.0:
        raise TraceNotHyperbolic(f"|trace| must exceed 2, got {t}")
    return 2.0 * math.acosh(abs(t) / 2.0)


# ---------------------------------------------------------------------------
# Disk model (rendering and clipped intersection tests)
# ---------------------------------------------------------------------------


def to_disk(p) -> complex:
    """Cayley transform z -> (z - i)/(z + i); boundary points land on |w| = 1."""
    if is_ideal(p):
        u = boundary_value(p)
        if u == INFINITY:
            return 1.0 + 0.0j
        w = (u - 1j) / (u + 1j)
    else:
        z = complex(p)
        w = (z - 1j) / (z + 1j)
    return w


def from_disk(w: complex):
    if abs(w - 1.0) < 1e-15:
        return INFINITY
    z = 1j * (1.0 + w) / (1.0 - w)
    if abs(z.imag) < 1e-15:
        return z.real
    return z


def _disk_chord_or_arc(w1: complex, w2: complex):
    """Geodesic arc between two disk points: ('line', w1, w2) or ('arc', c, r, w1, w2)."""
    cross = w1.real * w2.imag - w1.imag * w2.real
    if abs(cross) < 1e-13 * max(abs(w1), abs(w2), 1e-300):
        return ("line", w1, w2)
    # center c with |c|^2 = r^2 + 1 and |wi - c| = r: 2 Re(conj(wi) c) = |wi|^2 + 1
    a1, b1, r1 = w1.real, w1.imag, abs(w1) ** 2 + 1.0
    a2, b2, r2 = w2.real, w2.imag, abs(w2) ** 2 + 1.0
    det = 2.0 * (a1 * b2 - a2 * b1)
    cx = (r1 * b2 - r2 * b1) / det
    cy = (a1 * r2 - a2 * r1) / det
    c = complex(cx, cy)
    r = math.sqrt(max(abs(c) ** 2 - 1.0, 0.0))
    return ("arc", c, r, w1, w2)


def _arc_contains(c, r, w1, w2, p, tol) -> bool:
    """Is p on the minor arc from w1 to w2 of circle (c, r)?"""
    t1 = cmath.phase(w1 - c)
    t2 = cmath.phase(w2 - c)
    tp = cmath.phase(p - c)
    span = (t2 - t1) % (2.0 * math.pi)
    if span > math.pi:
        t1, t2 = t2, t1
        span = 2.0 * math.pi - span
    off = (tp - t1) % (2.0 * math.pi)
    ang_tol = tol / max(r, 1e-12)
    return -ang_tol <= off <= span + ang_tol


def _seg_contains(w1, w2, p, tol) -> bool:
    d = w2 - w1
    L2 = abs(d) ** 2
    if L2 == 0.0:
        return abs(p - w1) <= tol
    t = ((p - w1).real * d.real + (p - w1).imag * d.imag) / L2
    if t < -tol or t > 1.0 + tol:
        return False
    return abs(w1 + t * d - p) <= tol


def _side_intersections(s1, s2, tol):
    """Intersection points of two disk-model sides (each 'line' or 'arc')."""
    pts = []
    if s1[0] == "line" and s2[0] == "line":
        (_, p1, p2), (_, q1, q2) = s1, s2
        d1, d2 = p2 - p1, q2 - q1
        den = d1.real * d2.imag - d1.imag * d2.real
        if abs(den) > 1e-15:
            t = ((q1 - p1).real * d2.imag - (q1 - p1).imag * d2.real) / den
            pts = [p1 + t * d1]
    elif s1[0] == "arc" and s2[0] == "arc":
        (_, c1, r1, *_), (_, c2, r2, *_) = s1, s2
        d = abs(c2 - c1)
        if d > 1e-15 and abs(r1 - r2) - tol <= d <= r1 + r2 + tol:
            x = (d * d - r2 * r2 + r1 * r1) / (2.0 * d)
            h2 = r1 * r1 - x * x
            if h2 > -tol:
                h = math.sqrt(max(h2, 0.0))
                u = (c2 - c1) / d
                base = c1 + x * u
                pts = [base + 1j * h * u, base - 1j * h * u] if h > 0 else [base]
    else:
        if s1[0] == "line":
            s1, s2 = s2, s1
        (_, c, r, *_), (_, q1, q2) = s1, s2
        d = q2 - q1
        L = abs(d)
        if L > 1e-15:
            u = d / L
            # project center on the line
            t0 = ((c - q1).real * u.real + (c - q1).imag * u.imag)
            foot = q1 + t0 * u
            h2 = r * r - abs(c - foot) ** 2
            if h2 > -tol:
                h = math.sqrt(max(h2, 0.0))
                pts = [foot + h * u, foot - h * u] if h > 0 else [foot]
    out = []
    for p in pts:
        ok1 = _arc_contains(s1[1], s1[2], s1[3], s1[4], p, tol) if s1[0] == "arc" else _seg_contains(s1[1], s1[2], p, tol)
        ok2 = _arc_contains(s2[1], s2[2], s2[3], s2[4], p, tol) if s2[0] == "arc" else _seg_contains(s2[1], s2[2], p, tol)
        if ok1 and ok2:
            out.append(p)
    return out


# ---------------------------------------------------------------------------
# Polygons
# ---------------------------------------------------------------------------


class GeodesicPolygon:
    """Cyclic vertex list; ideal vertices (reals or INFINITY) are allowed."""

    def __init__(self, vertices):
        if len(vertices) < 3:
            raise TooFewVertices(f"polygon needs >= 3 vertices, got {len(vertices)}")
        self.vertices = list(vertices)

    def __len__(self):
        return len(self.vertices)

    def __repr__(self):
        return f"GeodesicPolygon({self.vertices!r})"

    def sides(self):
        n = len(self.vertices)
        return [(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)]

    def disk_vertices(self, clip=True):
        out = []
        for v in self.vertices:
            w = to_disk(v)
            if clip and is_ideal(v):
                w *= IDEAL_CLIP_RADIUS
            out.append(w)
        return out


@dataclass
class ValidityReport:
    nondegenerate: bool
    simple: bool
    orientation: str | None
    interior_angles: list = field(default_factory=list)
    angle_sum: float = float("nan")
    area: float = float("nan")
    reasons: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return self.nondegenerate and self.simple and self.area > 0.0

    def __str__(self):
        tag = "valid" if self.valid else "invalid"
        why = ("; " + "; ".join(self.reasons)) if self.reasons else ""
        return f"<{tag} polygon: orientation={self.orientation} angle_sum={self.angle_sum:.6f} area={self.area:.6f}{why}>"


def _scale_of(vertices) -> float:
    m = 1.0
    for v in vertices:
        if not is_ideal(v):
            z = complex(v)
            m = max(m, abs(z), 1.0 / z.imag)
        elif boundary_value(v) != INFINITY:
            m = max(m, abs(boundary_value(v)))
    return m


def polygon_validate(poly: GeodesicPolygon) -> ValidityReport:
    """Nondegeneracy, simplicity, orientation, interior angles, Gauss-Bonnet area."""
    verts = poly.vertices
    n = len(verts)
    if n < 3:
        raise TooFewVertices(f"polygon needs >= 3 vertices, got {n}")
    tol = EPS_GEOM * _scale_of(verts)
    reasons = []

    nondeg = True
    for i in range(n):
        v, w = verts[i], verts[(i + 1) % n]
        vi, wi = is_ideal(v), is_ideal(w)
        if vi and wi:
            if abs(to_disk(v) - to_disk(w)) <= 1e-12:
                nondeg = False
                reasons.append(f"vertices {i},{(i + 1) % n} coincide (ideal)")
        elif not vi and not wi:
            if abs(complex(v) - complex(w)) <= tol:
                nondeg = False
                reasons.append(f"vertices {i},{(i + 1) % n} coincide")
    if not nondeg:
        return ValidityReport(False, False, None, [], float("nan"), float("nan"), reasons)

    # orientation from the Euclidean signed area of the clipped disk polygon,
    # sampled along each side so that fat arcs cannot fool the sign
    disk_sides = []
    dverts = poly.disk_vertices(clip=True)
    for i in range(n):
        disk_sides.append(_disk_chord_or_arc(dverts[i], dverts[(i + 1) % n]))
    signed2 = 0.0
    for s in disk_sides:
        pts = _sample_side(s, 8)
        for j in range(len(pts) - 1):
            signed2 += pts[j].real * pts[j + 1].imag - pts[j].imag * pts[j + 1].real
    orientation = "CCW" if signed2 > 0 else "CW"

    # simplicity: non-adjacent sides must not meet; adjacent only at the vertex
    disk_tol = 1e-9 * max(1.0, max(abs(w) for w in dverts))
    simple = True
    for i in range(n):
        for j in range(i + 1, n):
            adjacent = (j == i + 1) or (i == 0 and j == n - 1)
            hits = _side_intersections(disk_sides[i], disk_sides[j], disk_tol)
            if adjacent:
                shared = dverts[(i + 1) % n] if j == i + 1 else dverts[i]
                for p in hits:
                    if abs(p - shared) > 50.0 * disk_tol:
                        simple = False
                        reasons.append(f"adjacent sides {i},{j} meet away from their vertex")
                        break
            elif hits:
                simple = False
                reasons.append(f"sides {i},{j} intersect")
    # interior angles
    angles = []
    for i in range(n):
        v = verts[i]
        if is_ideal(v):
            angles.append(0.0)
            continue
        prev = verts[(i - 1) % n]
        nxt = verts[(i + 1) % n]
        d_in = direction(complex(v), prev)
        d_out = direction(complex(v), nxt)
        if orientation == "CCW":
            ang = cmath.phase(d_in / d_out) % (2.0 * math.pi)
        else:
            ang = cmath.phase(d_out / d_in) % (2.0 * math.pi)
        angles.append(ang)
    angle_sum = math.fsum(angles)
    area = (n - 2) * math.pi - angle_sum
    if area <= 0.0:
        reasons.append("nonpositive Gauss-Bonnet area")
    return ValidityReport(nondeg, simple, orientation, angles, angle_sum, area, reasons)


def _sample_side(side, k):
    if side[0] == "line":
        _, w1, w2 = side
        return [w1 + (w2 - w1) * (t / k) for t in range(k + 1)]
    _, c, r, w1, w2 = side
    t1 = cmath.phase(w1 - c)
    t2 = cmath.phase(w2 - c)
    span = (t2 - t1) % (2.0 * math.pi)
    if span > math.pi:
        span -= 2.0 * math.pi
    return [c + r * cmath.exp(1j * (t1 + span * (t / k))) for t in range(k + 1)]
