"""The universal cover of PSL(2, R) as computable lifted circle maps.

A point of RP^1 is the angle x (mod pi) of a direction (cos x, sin x); a
full turn of the boundary circle is pi in these units.  For a matrix A the
principal lift ghat_A is the continuous lift of x -> angle(A (cos x, sin x))
with ghat_A(0) in [0, pi).  A Lift is a pair (base, winding k) representing
the map ghat_base + k pi; the central generator is z = (identity, 1).

The angle function theta reads off the rotation part of the lifted polar
decomposition; it satisfies theta(z L) = theta(L) + pi and
theta(L^-1) = -theta(L) exactly, with theta(z) = pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import PreconditionError
from .isometry import (
    ELLIPTIC,
    HYPERBOLIC,
    IDENTITY_LABEL,
    PARABOLIC,
    Isometry,
    _fixed_points_real,
    classify,
    commutator,
)
from .plane import INFINITY

PI = math.pi

#: a lift whose base is within this Frobenius distance of +-identity is central
CENTRAL_TOL = 1e-8


class EllipticHasNoPreferredLift(PreconditionError):
    pass


class EllipticBoundary(PreconditionError):
    pass


class RelatorNotIdentity(PreconditionError):
    pass


class AmbiguousRegion(PreconditionError):
    """Translation number lies on a region boundary (measure-zero input)."""


class FixedBasepoint(PreconditionError):
    pass


def _half_angle(x: float, y: float) -> float:
    """Direction angle of (x, y) reduced mod pi into [0, pi)."""
    a = math.atan2(y, x) % PI
    if a >= PI:
        a -= PI
    return a


def principal_value(A: Isometry, x: float) -> float:
    """Value at x of the principal lift ghat_A."""
    k = math.floor(x / PI)
    r = x - k * PI
    a0 = _half_angle(A.a, A.c)
    cr, sr = math.cos(r), math.sin(r)
    a1 = _half_angle(A.a * cr + A.b * sr, A.c * cr + A.d * sr)
    b = a1 if a1 >= a0 else a1 + PI
    return k * PI + b


class Lift:
    """Element of the universal cover: lifted map x -> ghat_base(x) + winding*pi."""

    __slots__ = ("base", "winding")

    def __init__(self, base: Isometry, winding: int = 0):
        self.base = base
        self.winding = int(winding)

    def __repr__(self):
        return f"Lift({self.base!r}, {self.winding})"

    def __call__(self, x: float) -> float:
        return principal_value(self.base, x) + self.winding * PI

    def __mul__(self, other: "Lift") -> "Lift":
        base = self.base @ other.base
        g2_at_0 = principal_value(other.base, 0.0)
        composed = principal_value(self.base, g2_at_0)
        m = round((composed - principal_value(base, 0.0)) / PI)
        return Lift(base, self.winding + other.winding + m)

    def inverse(self) -> "Lift":
        binv = self.base.inverse()
        m = round(principal_value(self.base, principal_value(binv, 0.0)) / PI)
        return Lift(binv, -self.winding - m)

    def is_central(self, tol=CENTRAL_TOL) -> bool:
        return self.base.frobenius_from_identity() < tol

    def central_power(self, tol=CENTRAL_TOL) -> int:
        """m with self = z^m.  Reads the lifted map value so that a base on
        the principal-branch boundary (tiny negative lower-left entry) cannot
        shift the count."""
        if not self.is_central(tol):
            raise PreconditionError("central_power of a non-central lift")
        return round(self(0.0) / PI)


def identity_lift() -> Lift:
    return Lift(Isometry.identity(), 0)


def central(k: int) -> Lift:
    """z^k."""
    return Lift(Isometry.identity(), k)


def lift_multiply(l1: Lift, l2: Lift) -> Lift:
    return l1 * l2


def lift_commutator(g: Lift, h: Lift) -> Lift:
    """Canonical commutator lift; independent of the factor windings."""
    return g * h * g.inverse() * h.inverse()


def _polar_skew_angle(A: Isometry) -> float:
    """Angle in (-pi/2, pi/2) of the first column of the positive polar factor.

    For M = A^T A (det 1), sqrt(M) = (M + I)/sqrt(tr M + 2).
    """
    a, b, c, d = A.matrix()
    m11 = a * a + c * c
    m12 = a * b + c * d
    # sqrt(M) column 1 is proportional to (m11 + 1, m12)
    return math.atan2(m12, m11 + 1.0)


def theta(L: Lift) -> float:
    """Milnor's angle function on the cover; theta(z) = pi."""
    return principal_value(L.base, 0.0) + L.winding * PI - _polar_skew_angle(L.base)


def simplest_lift(A: Isometry) -> Lift:
    """The unique lift of a non-elliptic isometry whose map has a fixed point."""
    cls = classify(A)
    if cls.label == ELLIPTIC:
        raise EllipticHasNoPreferredLift(f"elliptic element has no simplest lift: {A!r}")
    if cls.label == IDENTITY_LABEL:
        return Lift(A, 0)
    u = _fixed_points_real(A, clamp=True)[0]
    xf = 0.0 if u == INFINITY else math.atan2(1.0, u) % PI
    k = -round((principal_value(A, xf) - xf) / PI)
    return Lift(A, k)


def translation_number(L: Lift) -> float:
    """Exact translation number in RP^1 units (full turn = pi)."""
    cls = classify(L.base)
    if cls.label == IDENTITY_LABEL:
        return L.winding * PI
    if cls.label == ELLIPTIC:
        # the principal lift of an elliptic displaces every point into (0, pi)
        return 0.5 * cls.angle + L.winding * PI
    ks = simplest_lift(L.base).winding
    return (L.winding - ks) * PI


@dataclass(frozen=True)
class RegionLabel:
    kind: str  # CENTRAL | HYP | PAR_PLUS | PAR_MINUS | ELL
    index: int

    def __str__(self):
        return f"{self.kind}({self.index})"


def region(L: Lift) -> RegionLabel:
    """Which sheet/region of the cover the lift lies in."""
    if L.is_central():
        return RegionLabel("CENTRAL", L.central_power())
    cls = classify(L.base)
    if cls.label == ELLIPTIC:
        tau = translation_number(L)
        near = min(tau % PI, PI - (tau % PI))
        if near < 1e-9:
            raise AmbiguousRegion(f"elliptic translation number {tau} sits on a region boundary")
        if tau > 0:
            n = math.floor(tau / PI) + 1
        else:
            n = math.ceil(tau / PI) - 1
        return RegionLabel("ELL", n)
    n = L.winding - simplest_lift(L.base).winding
    if cls.label == HYPERBOLIC:
        return RegionLabel("HYP", n)
    kind = "PAR_PLUS" if cls.par_sign > 0 else "PAR_MINUS"
    return RegionLabel(kind, n)


# ---------------------------------------------------------------------------
# Surface representations and the Euler class
# ---------------------------------------------------------------------------


@dataclass
class SurfaceRep:
    """Images of the standard generators G_i, H_i, C_j of a surface group."""

    genus: int
    boundary_count: int
    gens: list  # [(g1, h1), ..., (gk, hk)]
    boundaries: list = field(default_factory=list)  # [c1, ..., cn]

    def __post_init__(self):
        if len(self.gens) != self.genus:
            raise PreconditionError(f"expected {self.genus} handle pairs, got {len(self.gens)}")
        if len(self.boundaries) != self.boundary_count:
            raise PreconditionError(
                f"expected {self.boundary_count} boundary images, got {len(self.boundaries)}"
            )

    @property
    def chi(self) -> int:
        return 2 - 2 * self.genus - self.boundary_count

    def relator_residual(self) -> float:
        prod = Isometry.identity()
        for g, h in self.gens:
            prod = prod @ commutator(g, h)
        for c in self.boundaries:
            prod = prod @ c
        return prod.frobenius_from_identity()


def punctured_torus_rep(g: Isometry, h: Isometry) -> SurfaceRep:
    return SurfaceRep(1, 1, [(g, h)], [commutator(g, h).inverse()])


def euler_class(rep: SurfaceRep, residual_tol=1e-8) -> int:
    """Relative Euler number: the relator of the standard presentation lifts to z^m.

    Handle generators take arbitrary lifts (winding 0); boundary images must
    be non-elliptic and take their simplest lifts.
    """
    if rep.chi >= 0:
        raise PreconditionError(f"Euler characteristic must be negative, got {rep.chi}")
    prod = identity_lift()
    for g, h in rep.gens:
        prod = prod * lift_commutator(Lift(g, 0), Lift(h, 0))
    for c in rep.boundaries:
        if classify(c).label == ELLIPTIC:
            raise EllipticBoundary("boundary image is elliptic; relative Euler class undefined")
        prod = prod * simplest_lift(c)
    if not prod.is_central(residual_tol):
        raise RelatorNotIdentity(
            f"relator deviates from identity by {prod.base.frobenius_from_identity():.3g}"
        )
    m = prod.central_power(residual_tol)
    assert abs(m) <= -rep.chi, f"Milnor-Wood violated: |{m}| > {-rep.chi}"
    return m


# ---------------------------------------------------------------------------
# Twist
# ---------------------------------------------------------------------------


def twist(L: Lift, p: complex) -> float:
    """Twist of a lifted isometry at a basepoint.

    The mod-2pi part is the signed angle at base(p) from the parallel
    transport (along the geodesic p -> base p) of the unit vector at p
    pointing toward base p, to the image of that vector under the
    differential of the base.  The integer branch is pinned to the window
    (T - pi, T + pi] around T = twice the translation number, so that
    twist(z, p) = 2 pi and a simplest hyperbolic lift has twist 0 on its
    axis.
    """
    from .plane import direction  # local import keeps module load order flat

    T = 2.0 * translation_number(L)
    if L.base.frobenius_from_identity() < CENTRAL_TOL:
        tau0 = 0.0
    else:
        q = L.base(complex(p))
        if abs(q - complex(p)) < 1e-12 * max(1.0, abs(complex(p))):
            raise FixedBasepoint(f"basepoint {p} is fixed by the isometry")
        u = direction(q, complex(p))  # at q, back toward p
        u = -u  # forward continuation of the geodesic p -> q
        v_at_p = direction(complex(p), q)
        dv = L.base.deriv(complex(p)) * v_at_p
        dv /= abs(dv)
        w = u / dv
        tau0 = math.atan2(w.imag, w.real)
    # unique representative of tau0 mod 2 pi in (T - pi, T + pi]
    n = math.floor((T + PI - tau0) / (2.0 * PI))
    full = tau0 + 2.0 * PI * n
    if full <= T - PI:  # fp guard at the open end of the window
        full += 2.0 * PI
    return full
