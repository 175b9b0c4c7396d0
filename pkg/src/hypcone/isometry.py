"""PSL(2, R) elements acting on the upper half-plane.

An Isometry stores a determinant-one real matrix with the sign the caller
gave it; trace bookkeeping (character theory) relies on those signs.  The
projective representative with the deterministic sign rule is available via
:meth:`Isometry.canonical` and is what equality and hashing use.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from . import plane
from .errors import PreconditionError
from .plane import INFINITY, Geodesic, boundary_value, direction, dist, is_ideal

#: classification tolerance around |trace| = 2
TAU_CLS = 1e-9

IDENTITY_LABEL = "IDENTITY"
ELLIPTIC = "ELLIPTIC"
PARABOLIC = "PARABOLIC"
HYPERBOLIC = "HYPERBOLIC"


class LengthMismatch(PreconditionError):
    pass


class DegenerateSegment(PreconditionError):
    pass


class IdenticalLines(PreconditionError):
    pass


class NonPositiveDeterminant(PreconditionError):
    pass


class Isometry:
    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d, _normalized=False):
        if not _normalized:
            det = a * d - b * c
            if det <= 0.0:
                raise NonPositiveDeterminant(f"matrix determinant {det} is not positive")
            s = math.sqrt(det)
            a, b, c, d = a / s, b / s, c / s, d / s
        self.a = a
        self.b = b
        self.c = c
        self.d = d

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0, 0.0, 1.0, _normalized=True)

    @classmethod
    def from_matrix(cls, m):
        a, b, c, d = m
        return cls(float(a), float(b), float(c), float(d))

    @classmethod
    def rotation(cls, theta: float):
        """Elliptic about i with classification angle theta (boundary shift theta/2)."""
        c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
        return cls(c, -s, s, c, _normalized=True)

    @classmethod
    def axis_translation(cls, length: float):
        """Hyperbolic along {0, INFINITY} moving toward INFINITY for length > 0."""
        e = math.exp(length / 2.0)
        return cls(e, 0.0, 0.0, 1.0 / e, _normalized=True)

    @classmethod
    def parabolic_shift(cls, tau: float):
        return cls(1.0, tau, 0.0, 1.0, _normalized=True)

    @classmethod
    def point_frame(cls, p: complex):
        """Maps i to p with the vertical direction preserved."""
        p = complex(p)
        s = math.sqrt(p.imag)
        return cls(s, p.real / s, 0.0, 1.0 / s, _normalized=True)

    @classmethod
    def frame(cls, p: complex, u: complex):
        """Maps i to p and the upward direction at i to the unit chart vector u."""
        psi = cmath.phase(-1j * u)
        half = -psi / 2.0
        rot = cls(math.cos(half), -math.sin(half), math.sin(half), math.cos(half), _normalized=True)
        return cls.point_frame(p) @ rot

    @classmethod
    def geodesic_frame(cls, l: Geodesic, toward=None):
        """Maps {0, INFINITY} (upward) onto l; `toward` picks the positive end."""
        if l.is_vertical:
            g = cls(1.0, l.a, 0.0, 1.0, _normalized=True)
            pos_end = INFINITY
        else:
            s = math.sqrt(l.b - l.a)
            g = cls(l.b / s, l.a / s, 1.0 / s, 1.0 / s, _normalized=True)
            pos_end = l.b
        if toward is not None and boundary_value(toward) != pos_end:
            # reverse: conjugate source direction by z -> -1/z (maps 0 <-> inf)
            g = g @ cls(0.0, -1.0, 1.0, 0.0, _normalized=True)
        return g

    # -- algebra ------------------------------------------------------------

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return Isometry(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "Isometry":
        return Isometry(self.d, -self.b, -self.c, self.a, _normalized=True)

    @property
    def trace(self) -> float:
        return self.a + self.d

    def matrix(self):
        return (self.a, self.b, self.c, self.d)

    def canonical(self) -> "Isometry":
        """Deterministic PSL representative: Tr > 0, then c > 0, then b > 0."""
        t = self.trace
        flip = False
        if t < -1e-12:
            flip = True
        elif abs(t) <= 1e-12:
            if self.c < 0.0:
                flip = True
            elif abs(self.c) <= 1e-12 and self.b < 0.0:
                flip = True
        if flip:
            return Isometry(-self.a, -self.b, -self.c, -self.d, _normalized=True)
        return self

    def __eq__(self, other):
        if not isinstance(other, Isometry):
            return NotImplemented
        p, q = self.canonical(), other.canonical()
        return (
            abs(p.a - q.a) + abs(p.b - q.b) + abs(p.c - q.c) + abs(p.d - q.d) < 1e-9
        )

    def __hash__(self):
        p = self.canonical()
        return hash(tuple(round(x, 6) for x in p.matrix()))

    def __repr__(self):
        return f"Isometry({self.a:.12g}, {self.b:.12g}, {self.c:.12g}, {self.d:.12g})"

    def frobenius_from_identity(self) -> float:
        """Frobenius distance to the nearer of +-identity."""
        plus = math.hypot(self.a - 1.0, self.b, self.c, self.d - 1.0)
        minus = math.hypot(self.a + 1.0, self.b, self.c, self.d + 1.0)
        return min(plus, minus)

    def is_identity(self, tol=1e-8) -> bool:
        return self.frobenius_from_identity() < tol

    # -- action -------------------------------------------------------------

    def __call__(self, p):
        if is_ideal(p):
            u = boundary_value(p)
            if u == INFINITY:
                return INFINITY if self.c == 0.0 else self.a / self.c
            den = self.c * u + self.d
            if den == 0.0:
                return INFINITY
            return (self.a * u + self.b) / den
        z = complex(p)
        return (self.a * z + self.b) / (self.c * z + self.d)

    def deriv(self, z: complex) -> complex:
        den = self.c * complex(z) + self.d
        return 1.0 / (den * den)

    def transport_geodesic(self, l: Geodesic) -> Geodesic:
        return Geodesic(self(l.a), self(l.b))


def apply(A: Isometry, p):
    """Mobius action on a finite or ideal point."""
    return A(p)


def commutator(g: Isometry, h: Isometry) -> Isometry:
    return g @ h @ g.inverse() @ h.inverse()


def conjugate(a: Isometry, g: Isometry) -> Isometry:
    return a @ g @ a.inverse()


# ---------------------------------------------------------------------------
# Classification and fixed data
# ---------------------------------------------------------------------------


@dataclass
class IsoClass:
    label: str
    angle: float | None = None      # elliptic: boundary-shift angle doubled, in (0, 2 pi)
    length: float | None = None     # hyperbolic translation length
    par_sign: int | None = None     # parabolic: +1 if the simplest lift pushes forward
    ambiguous: bool = False         # ||Tr| - 2| < TAU_CLS

    def __str__(self):
        bits = [self.label]
        if self.angle is not None:
            bits.append(f"angle={self.angle:.9g}")
        if self.length is not None:
            bits.append(f"length={self.length:.9g}")
        if self.par_sign is not None:
            bits.append(f"sign={self.par_sign:+d}")
        if self.ambiguous:
            bits.append("near-parabolic")
        return " ".join(bits)


@dataclass
class FixedData:
    kind: str
    axis: Geodesic | None = None
    attracting: float | None = None
    center: complex | None = None
    fixed_boundary: float | None = None


def _fixed_points_real(A: Isometry, clamp=False):
    """Real fixed points of the Mobius map: roots of c u^2 + (d - a) u - b = 0."""
    a, b, c, d = A.matrix()
    if abs(c) < 1e-14 * (abs(a) + abs(d)):
        pts = [INFINITY]
        if abs(a - d) > 1e-14:
            pts.append(b / (d - a))
        return pts
    disc = (d - a) ** 2 + 4.0 * b * c
    if disc < 0.0:
        if not clamp:
            return []
        disc = 0.0
    r = math.sqrt(disc)
    return [((a - d) + r) / (2.0 * c), ((a - d) - r) / (2.0 * c)]


def classify(A: Isometry) -> IsoClass:
    t = abs(A.trace)
    ambiguous = abs(t - 2.0) < TAU_CLS
    if A.frobenius_from_identity() < 1e-12:
        return IsoClass(IDENTITY_LABEL, ambiguous=ambiguous)
    if t > 2.0:
        return IsoClass(HYPERBOLIC, length=2.0 * math.acosh(t / 2.0), ambiguous=ambiguous)
    if t == 2.0 or ambiguous:
        return IsoClass(PARABOLIC, par_sign=_parabolic_sign(A), ambiguous=ambiguous)
    # elliptic: angle from the multiplier at the fixed center
    z0 = elliptic_center(A)
    mult = A.deriv(z0)
    phi = (-cmath.phase(mult) / 2.0) % math.pi
    return IsoClass(ELLIPTIC, angle=2.0 * phi, ambiguous=ambiguous)


def elliptic_center(A: Isometry) -> complex:
    a, b, c, d = A.matrix()
    disc = (a + d) ** 2 - 4.0
    if disc >= 0.0 or abs(c) < 1e-300:
        raise PreconditionError("not elliptic")
    return complex((a - d) / (2.0 * c), math.sqrt(-disc) / (2.0 * abs(c)))


def _parabolic_sign(A: Isometry) -> int:
    """+1 when the parabolic pushes boundary points forward (simplest lift >= id)."""
    u = _fixed_points_real(A, clamp=True)[0]
    if u == INFINITY:
        probe = 0.0
    else:
        probe = u + 1.0 if u >= 0 else u - 1.0
    img = A(probe)
    # compare in the RP^1 angle chart centered away from the fixed point
    x0 = _rp1_angle(probe)
    x1 = _rp1_angle(img)
    delta = (x1 - x0 + math.pi / 2.0) % math.pi - math.pi / 2.0
    if delta == 0.0:
        # probe hit a fixed direction; nudge
        img = A(A(probe))
        x1 = _rp1_angle(img)
        delta = (x1 - x0 + math.pi / 2.0) % math.pi - math.pi / 2.0
    return 1 if delta > 0 else -1


def _rp1_angle(u) -> float:
    if u == INFINITY:
        return 0.0
    a = math.atan2(1.0, u)
    return a % math.pi


def fixed_data(A: Isometry) -> FixedData:
    cls = classify(A)
    if cls.label == IDENTITY_LABEL:
        raise PreconditionError("identity fixes everything")
    if cls.label == HYPERBOLIC:
        u1, u2 = _fixed_points_real(A)[:2]
        # attracting endpoint: |derivative| < 1 there
        att = u1 if _boundary_multiplier(A, u1) < 1.0 else u2
        rep = u2 if att == u1 else u1
        return FixedData(HYPERBOLIC, axis=Geodesic(u1, u2), attracting=att)
    if cls.label == PARABOLIC:
        return FixedData(PARABOLIC, fixed_boundary=_fixed_points_real(A, clamp=True)[0])
    return FixedData(ELLIPTIC, center=elliptic_center(A))


def _boundary_multiplier(A: Isometry, u) -> float:
    if u == INFINITY:
        return abs(A.d / A.a)  # c == 0 whenever INFINITY is fixed
    return abs(A.deriv(u))


def axis_of(A: Isometry) -> Geodesic:
    fd = fixed_data(A)
    if fd.kind != HYPERBOLIC:
        raise PreconditionError("axis_of requires a hyperbolic element")
    return fd.axis


# ---------------------------------------------------------------------------
# Constructive maps
# ---------------------------------------------------------------------------


def segment_carrier(p1: complex, q1: complex, p2: complex, q2: complex) -> Isometry:
    """The orientation-preserving isometry with p1 -> p2 and q1 -> q2.

    Requires dist(p1, q1) == dist(p2, q2) > 0 within 1e-9.
    """
    d1 = dist(p1, q1)
    d2 = dist(p2, q2)
    if d1 < 1e-12 or d2 < 1e-12:
        raise DegenerateSegment("zero-length segment")
    if abs(d1 - d2) > 1e-9 * max(1.0, d1):
        raise LengthMismatch(f"segment lengths differ: {d1} vs {d2}")
    f1 = Isometry.frame(p1, direction(complex(p1), complex(q1)))
    f2 = Isometry.frame(p2, direction(complex(p2), complex(q2)))
    return f2 @ f1.inverse()


def reflection_matrix(l: Geodesic):
    """Matrix m with sigma_l(z) = mob(m, conj(z)); det < 0."""
    if l.is_vertical:
        return (-1.0, 2.0 * l.a, 0.0, 1.0)
    c, r = l.center, l.radius
    return (c, r * r - c * c, 1.0, -c)


def compose_reflections(l1: Geodesic, l2: Geodesic) -> Isometry:
    """reflect(l2) o reflect(l1) as an orientation-preserving isometry."""
    if l1 == l2:
        raise IdenticalLines(f"cannot compose reflections in the same line {l1}")
    a2, b2, c2, d2 = reflection_matrix(l2)
    a1, b1, c1, d1 = reflection_matrix(l1)
    return Isometry(
        a2 * a1 + b2 * c1,
        a2 * b1 + b2 * d1,
        c2 * a1 + d2 * c1,
        c2 * b1 + d2 * d1,
    )


def reflect(l: Geodesic, p):
    return plane.reflect_point(l, p)


def conjugator_hyperbolic(A: Isometry, target: Isometry) -> Isometry:
    """Some s with s A s^-1 = target, for hyperbolics of equal translation length."""
    fa, ft = fixed_data(A), fixed_data(target)
    if fa.kind != HYPERBOLIC or ft.kind != HYPERBOLIC:
        raise PreconditionError("conjugator_hyperbolic needs hyperbolic inputs")
    s = Isometry.geodesic_frame(ft.axis, toward=ft.attracting) @ Isometry.geodesic_frame(
        fa.axis, toward=fa.attracting
    ).inverse()
    return s


def conjugator_elliptic(A: Isometry, target: Isometry) -> Isometry:
    """Some s with s A s^-1 = target, for elliptics of equal rotation angle."""
    ca, ct = elliptic_center(A), elliptic_center(target)
    return Isometry.point_frame(ct) @ Isometry.point_frame(ca).inverse()


def _parabolic_normal_form(A: Isometry):
    """(N, tau) with N A N^-1 = [[1, tau], [0, 1]] up to PSL sign."""
    u = _fixed_points_real(A, clamp=True)[0]
    if u == INFINITY:
        n = Isometry.identity()
    else:
        n = Isometry(0.0, -1.0, 1.0, -u)
    ap = n @ A @ n.inverse()
    tau = ap.b * (1.0 if ap.a > 0 else -1.0)
    return n, tau


def conjugator_parabolic(A: Isometry, target: Isometry) -> Isometry:
    """Some s with s A s^-1 = target, for parabolics of the same sign class."""
    na, ta = _parabolic_normal_form(A)
    nt, tt = _parabolic_normal_form(target)
    if ta == 0.0 or tt == 0.0 or (ta > 0) != (tt > 0):
        raise PreconditionError("parabolics lie in different conjugacy classes")
    lam = math.sqrt(tt / ta)
    scale = Isometry(lam, 0.0, 0.0, 1.0 / lam, _normalized=True)
    return nt.inverse() @ scale @ na


def random_isometry(rng, spread=1.5) -> Isometry:
    """Haar-ish sample via the Iwasawa coordinates; rng is a random.Random."""
    theta = rng.uniform(0.0, 2.0 * math.pi)
    u = rng.uniform(-spread, spread)
    s = rng.gauss(0.0, spread)
    rot = Isometry(math.cos(theta), -math.sin(theta), math.sin(theta), math.cos(theta), _normalized=True)
    diag = Isometry(math.exp(u / 2.0), 0.0, 0.0, math.exp(-u / 2.0), _normalized=True)
    shear = Isometry(1.0, s, 0.0, 1.0, _normalized=True)
    out = rot @ diag @ shear
    if rng.random() < 0.5:
        out = Isometry(-out.a, -out.b, -out.c, -out.d, _normalized=True)
    return out
