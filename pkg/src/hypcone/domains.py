"""Fundamental domains: five-sided punctured-torus domains, right-angled
pants octagons from reflection lines, and searches for good basepoints.

The five-sided domain of a pair (g, h) based at p has vertex cycle

    p,  h^-1 g h p,  g h p,  h p,  [g^-1, h^-1] p

with g carrying the (t, s) side onto (q, r), h carrying (p, q) onto (s, r),
and the remaining side p -> [g^-1, h^-1] p free (it develops the boundary or
the gluing curve).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import cover, plane
from .cover import Lift, lift_commutator, simplest_lift, twist
from .errors import PreconditionError, SearchExhausted
from .isometry import (
    ELLIPTIC,
    HYPERBOLIC,
    IDENTITY_LABEL,
    PARABOLIC,
    Isometry,
    classify,
    commutator,
    compose_reflections,
    fixed_data,
    segment_carrier,
)
from .plane import (
    INFINITY,
    Geodesic,
    GeodesicPolygon,
    ValidityReport,
    boundary_value,
    common_perpendicular,
    dist,
    fermi_coordinates,
    fermi_point,
    geodesic_intersection,
    is_ideal,
    perpendicular_at,
    polygon_validate,
    reflect_point,
)

TWO_PI = 2.0 * math.pi


class EpsilonUnderflow(SearchExhausted):
    pass


class CertificateNotFound(SearchExhausted):
    pass


class WrongEulerSide(PreconditionError):
    pass


class AxesNotDisjoint(PreconditionError):
    pass


class TraceProductViolation(PreconditionError):
    pass


class EllipticBoundary(PreconditionError):
    pass


class PantsConstructionError(PreconditionError):
    pass


# ---------------------------------------------------------------------------
# Pentagon domains
# ---------------------------------------------------------------------------


@dataclass
class Pentagon:
    g: Isometry
    h: Isometry
    basepoint: complex
    vertices: list            # [p, q, r, s, t]
    report: ValidityReport
    pairing_error: float
    corner_angle: float | None = None
    twist_value: float | None = None
    twist_defect: float | None = None

    #: side pairings by vertex index: g: (4,3)->(1,2), h: (0,1)->(3,2)
    PAIRINGS = (("g", (4, 3), (1, 2)), ("h", (0, 1), (3, 2)))
    BOUNDARY_EDGE = (0, 4)

    @property
    def valid(self) -> bool:
        return self.report.valid and self.pairing_error < 1e-8

    def polygon(self) -> GeodesicPolygon:
        return GeodesicPolygon(self.vertices)


def build_pentagon(g: Isometry, h: Isometry, p: complex) -> Pentagon:
    """Construct the five-sided domain at p; failures land in the report."""
    p = complex(p)
    hp = h(p)
    ghp = g(hp)
    q = h.inverse()(ghp)
    d_comm = commutator(g.inverse(), h.inverse())
    t_vert = d_comm(p)
    verts = [p, q, ghp, hp, t_vert]

    finite = all((not is_ideal(v)) and math.isfinite(v.real) and math.isfinite(v.imag) for v in verts)
    if not finite:
        report = ValidityReport(False, False, None, reasons=["vertex escaped the upper half-plane"])
        return Pentagon(g, h, p, verts, report, math.inf)

    pair_err = max(
        abs(g(t_vert) - q),
        abs(g(hp) - ghp),
        abs(h(p) - hp),
        abs(h(q) - ghp),
    )
    try:
        report = polygon_validate(GeodesicPolygon(verts))
    except PreconditionError as exc:
        report = ValidityReport(False, False, None, reasons=[str(exc)])
        return Pentagon(g, h, p, verts, report, pair_err)

    pent = Pentagon(g, h, p, verts, report, pair_err)
    if report.valid:
        pent.corner_angle = report.angle_sum
        if not d_comm.is_identity(1e-10) and abs(t_vert - p) > 1e-10:
            lift = lift_commutator(Lift(g, 0).inverse(), Lift(h, 0).inverse())
            pent.twist_value = twist(lift, p)
            defect = (3.0 * math.pi - pent.corner_angle - pent.twist_value) % TWO_PI
            if defect > math.pi:
                defect -= TWO_PI
            pent.twist_defect = defect
    return pent


# ---------------------------------------------------------------------------
# Good representations (explicit Fermi-coordinate construction)
# ---------------------------------------------------------------------------


def good_rep(t: float, epsilon: float, orientation: str = "CCW"):
    """Pair (g, h) with elliptic generators, tr[g,h] = t, and a valid
    five-sided domain whose basepoint sits at distance epsilon from the
    commutator axis (the imaginary axis).

    Positive offsets produce the CCW domain; epsilon is halved (at most 40
    times) until the generators are elliptic and the domain is valid.
    """
    if t <= 2.0:
        raise PreconditionError(f"good_rep needs t > 2, got {t}")
    if epsilon <= 0.0:
        raise PreconditionError("epsilon must be positive")
    if orientation not in ("CCW", "CW"):
        raise PreconditionError(f"orientation must be CCW or CW, got {orientation!r}")
    d = 2.0 * math.acosh(t / 2.0)
    axis = Geodesic(0.0, INFINITY)
    eps = epsilon if orientation == "CCW" else -epsilon
    for _ in range(41):
        p = fermi_point(axis, -d / 2.0, eps)
        q = fermi_point(axis, -d / 4.0, 0.0)
        r = fermi_point(axis, 0.0, -eps)
        s = fermi_point(axis, d / 4.0, 0.0)
        tt = fermi_point(axis, d / 2.0, eps)
        g = segment_carrier(tt, s, q, r)
        h = segment_carrier(p, q, s, r)
        ok = (
            abs(g.trace) < 2.0
            and abs(h.trace) < 2.0
            and abs(commutator(g, h).trace - t) <= 1e-9 * max(1.0, t)
        )
        if ok:
            pent = build_pentagon(g, h, p)
            if pent.valid and pent.report.orientation == orientation:
                return g, h, p
        eps *= 0.5
    raise EpsilonUnderflow(f"no valid construction for t={t} after 40 halvings of {epsilon}")


# ---------------------------------------------------------------------------
# Pants octagons
# ---------------------------------------------------------------------------


@dataclass
class PantsDomain:
    c1: Isometry
    c2: Isometry
    c3: Isometry
    octagon: GeodesicPolygon
    report: ValidityReport
    reflection_lines: tuple      # (L, M1, M2)
    pairings: list               # [(name, src vertex pair, dst vertex pair)]
    pairing_error: float
    recomposition_error: float

    @property
    def valid(self) -> bool:
        return self.report.valid and self.pairing_error < 1e-8 and self.recomposition_error < 1e-8

    def finite_angle_error(self) -> float:
        err = 0.0
        for v, ang in zip(self.octagon.vertices, self.report.interior_angles):
            if not is_ideal(v):
                err = max(err, abs(ang - math.pi / 2.0))
        return err


def _axis_or_point(c: Isometry):
    fd = fixed_data(c)
    if fd.kind == HYPERBOLIC:
        return fd
    return fd  # parabolic: fixed_boundary


def _line_between(f1, f2) -> Geodesic:
    """Generalized common perpendicular of two axes / ideal points."""
    if f1.kind == HYPERBOLIC and f2.kind == HYPERBOLIC:
        return common_perpendicular(f1.axis, f2.axis)
    if f1.kind == HYPERBOLIC and f2.kind == PARABOLIC:
        return _drop_from_ideal(f2.fixed_boundary, f1.axis)
    if f1.kind == PARABOLIC and f2.kind == HYPERBOLIC:
        return _drop_from_ideal(f1.fixed_boundary, f2.axis)
    return Geodesic(f1.fixed_boundary, f2.fixed_boundary)


def _drop_from_ideal(u, axis: Geodesic) -> Geodesic:
    """Geodesic from the ideal point u meeting `axis` orthogonally."""
    frame = Isometry.geodesic_frame(axis)
    w = frame.inverse()(u)
    if w == INFINITY or w == 0.0:
        raise PantsConstructionError("ideal point is an endpoint of the axis")
    r = abs(w)
    return Geodesic(frame(-math.copysign(r, w)), frame(math.copysign(r, w)))


def _reflection_partner(line: Geodesic, c: Isometry) -> Geodesic:
    """The line M with reflect(M) o reflect(line) = c."""
    cls = classify(c)
    if cls.label == HYPERBOLIC:
        fd = fixed_data(c)
        axis = fd.axis
        foot = geodesic_intersection(line, axis)
        s0, _ = fermi_coordinates(axis, foot)
        half = cls.length / 2.0
        for sign in (1.0, -1.0):
            m = perpendicular_at(axis, s0 + sign * half)
            err = (compose_reflections(line, m) @ c.inverse()).frobenius_from_identity()
            if err < 1e-8:
                return m
        raise PantsConstructionError("no perpendicular reflection partner recomposes the boundary")
    if cls.label == PARABOLIC:
        u = fixed_data(c).fixed_boundary
        if u == INFINITY:
            norm = Isometry.identity()
        else:
            norm = Isometry(0.0, -1.0, 1.0, -u)
        cp = norm @ c @ norm.inverse()
        if abs(cp.c) > 1e-8:
            raise PantsConstructionError("parabolic normalization failed")
        sign = 1.0 if cp.a > 0 else -1.0
        tau = sign * cp.b
        la, lb = norm(line.a), norm(line.b)
        x0 = la if lb == INFINITY else lb
        m = Geodesic(norm.inverse()(x0 + tau / 2.0), norm.inverse()(INFINITY))
        err = (compose_reflections(line, m) @ c.inverse()).frobenius_from_identity()
        if err < 1e-8:
            return m
        raise PantsConstructionError("parabolic reflection partner does not recompose")
    raise PantsConstructionError(f"cannot decompose a {cls.label} into two reflections")


def _foot_on(boundary_data, m: Geodesic):
    """Vertex where the perpendicular m meets an axis (or its ideal limit)."""
    if boundary_data.kind == PARABOLIC:
        return boundary_data.fixed_boundary
    return geodesic_intersection(m, boundary_data.axis)


def _same_vertex(v, w) -> bool:
    if is_ideal(v) != is_ideal(w):
        return False
    if is_ideal(v):
        a, b = boundary_value(v), boundary_value(w)
        if a == INFINITY or b == INFINITY:
            return a == b
        return abs(a - b) <= 1e-9 * max(1.0, abs(a))
    return abs(complex(v) - complex(w)) <= 1e-9


def build_pants(c1: Isometry, c2: Isometry) -> PantsDomain:
    """Right-angled (possibly ideal-cornered) octagon for the group <c1, c2>.

    Requires the simplest lifts to satisfy lift(c1) lift(c2) lift(c3) = z,
    tr[c1,c2] > 2 and tr(c1) tr(c2) tr(c1 c2) <= -8; c3 = (c1 c2)^-1.
    """
    c3 = (c1 @ c2).inverse()
    for name, c in (("c1", c1), ("c2", c2), ("c3", c3)):
        lab = classify(c).label
        if lab == ELLIPTIC:
            raise EllipticBoundary(f"{name} is elliptic")
        if lab == IDENTITY_LABEL:
            raise EllipticBoundary(f"{name} is the identity")
    tr_comm = commutator(c1, c2).trace
    if tr_comm <= 2.0:
        raise AxesNotDisjoint(f"tr[c1,c2] = {tr_comm} <= 2: axes cross or representation reducible")
    prod = c1.trace * c2.trace * (c1 @ c2).trace
    if prod > -8.0:
        raise TraceProductViolation(f"tr(c1) tr(c2) tr(c1 c2) = {prod} > -8")
    rel = simplest_lift(c1) * simplest_lift(c2) * simplest_lift(c3)
    if not rel.is_central():
        raise PantsConstructionError("simplest-lift relator is not central")
    power = rel.central_power()
    if power == -1:
        raise WrongEulerSide("relator lift is z^-1; swap orientation (invert both boundaries)")
    if power != 1:
        raise PantsConstructionError(f"relator lift is z^{power}; expected z")

    f1, f2, f3 = fixed_data(c1), fixed_data(c2), fixed_data(c3)
    line = _line_between(f1, f2)
    m1 = _reflection_partner(line, c1)
    m2 = _reflection_partner(line, c2.inverse())
    rec_err = max(
        (compose_reflections(line, m1) @ c1.inverse()).frobenius_from_identity(),
        (compose_reflections(m2, line) @ c2.inverse()).frobenius_from_identity(),
        (compose_reflections(m1, m2) @ c3.inverse()).frobenius_from_identity(),
    )

    f22 = _foot_on(f2, m2)
    f23 = _foot_on(f3, m2)
    f13 = _foot_on(f3, m1)
    f11 = _foot_on(f1, m1)
    s11 = reflect_point(line, f11)
    s13 = reflect_point(line, f13)
    s23 = reflect_point(line, f23)
    s22 = reflect_point(line, f22)

    cycle = [f22, f23, f13, f11, s11, s13, s23, s22]
    verts = []
    for v in cycle:
        if verts and _same_vertex(verts[-1], v):
            continue
        verts.append(v)
    if len(verts) > 1 and _same_vertex(verts[0], verts[-1]):
        verts.pop()
    octagon = GeodesicPolygon(verts)
    report = polygon_validate(octagon)

    def _index(v):
        for i, w in enumerate(verts):
            if _same_vertex(v, w):
                return i
        raise PantsConstructionError("pairing vertex missing from the assembled cycle")

    pairings = [
        ("c1", (_index(s11), _index(s13)), (_index(f11), _index(f13))),
        ("c2", (_index(f22), _index(f23)), (_index(s22), _index(s23))),
    ]
    pair_err = 0.0
    for cmap, (src, dst) in ((c1, (pairings[0][1], pairings[0][2])), (c2, (pairings[1][1], pairings[1][2]))):
        for i_src, i_dst in zip(src, dst):
            img = cmap(verts[i_src])
            tgt = verts[i_dst]
            if is_ideal(tgt):
                a, b = boundary_value(img), boundary_value(tgt)
                if a == INFINITY or b == INFINITY:
                    pair_err = max(pair_err, 0.0 if a == b else math.inf)
                else:
                    pair_err = max(pair_err, abs(a - b))
            else:
                pair_err = max(pair_err, abs(complex(img) - complex(tgt)))

    return PantsDomain(c1, c2, c3, octagon, report, (line, m1, m2), pairings, pair_err, rec_err)


# ---------------------------------------------------------------------------
# Nielsen search for good bases
# ---------------------------------------------------------------------------


def _reduce_word(w: str) -> str:
    out = []
    for ch in w:
        if out and out[-1] == ch.swapcase():
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def _inv_word(w: str) -> str:
    return w.swapcase()[::-1]


#: orientation-preserving elementary basis moves (they fix the commutator
#: up to conjugacy); the orientation-reversing swap is exposed separately
NIELSEN_MOVES = (
    ("gh.h", lambda g, h: (g @ h, h), lambda a, b: (a + b, b)),
    ("hg.h", lambda g, h: (h @ g, h), lambda a, b: (b + a, b)),
    ("gH.h", lambda g, h: (g @ h.inverse(), h), lambda a, b: (a + _inv_word(b), b)),
    ("Hg.h", lambda g, h: (h.inverse() @ g, h), lambda a, b: (_inv_word(b) + a, b)),
    ("g.hg", lambda g, h: (g, h @ g), lambda a, b: (a, b + a)),
    ("g.gh", lambda g, h: (g, g @ h), lambda a, b: (a, a + b)),
    ("g.hG", lambda g, h: (g, h @ g.inverse()), lambda a, b: (a, b + _inv_word(a))),
    ("g.Gh", lambda g, h: (g, g.inverse() @ h), lambda a, b: (a, _inv_word(a) + b)),
)


def swap_basis(g: Isometry, h: Isometry):
    """The orientation-reversing change (g, h) -> (h, g)."""
    return h, g


@dataclass
class GoodnessCertificate:
    basis: tuple                  # (g', h') matrices
    words: tuple                  # words over g/h (capitals are inverses)
    moves: list
    orientation: str
    basepoint: complex
    offset: float                 # signed Fermi offset of the basepoint
    station: int
    depth: int
    distance_to_axis: float
    pentagon: Pentagon


def _directed_point(axis: Geodesic, attracting, s: float, offset: float) -> complex:
    """Fermi point in the frame whose positive direction is the attracting end."""
    if boundary_value(attracting) == axis.b:
        return fermi_point(axis, s, offset)
    return fermi_point(axis, -s, -offset)


def _directed_arclength(axis: Geodesic, attracting, p: complex) -> float:
    s, _ = fermi_coordinates(axis, p)
    return s if boundary_value(attracting) == axis.b else -s


def _fixed_set_foot(axis: Geodesic, attracting, m: Isometry):
    """Directed arclength of the point of `axis` nearest the fixed set of m."""
    cls = classify(m)
    if cls.label == IDENTITY_LABEL:
        return None
    if cls.label == ELLIPTIC:
        from .isometry import elliptic_center

        return _directed_arclength(axis, attracting, elliptic_center(m))
    fd = fixed_data(m)
    if cls.label == PARABOLIC:
        u = fd.fixed_boundary
        if u == axis.a or u == axis.b:
            return None
        frame = Isometry.geodesic_frame(axis)
        w = frame.inverse()(u)
        if w == INFINITY or w == 0.0:
            return None
        s = math.log(abs(w))
        return s if boundary_value(attracting) == axis.b else -s
    other = fd.axis
    if {other.a, other.b} & {axis.a, axis.b}:
        return None
    try:
        foot = geodesic_intersection(axis, other)
    except PreconditionError:
        try:
            foot = geodesic_intersection(axis, common_perpendicular(axis, other))
        except PreconditionError:
            return None
    return _directed_arclength(axis, attracting, foot)


def _axis_anchor(axis: Geodesic, attracting, g: Isometry, h: Isometry) -> float:
    """Equivariant arclength origin near the action of the pair."""
    vals = [s for s in (_fixed_set_foot(axis, attracting, m) for m in (g, h)) if s is not None]
    if vals:
        return sum(vals) / len(vals)
    return 0.0


def scan_pentagon_stations(
    g: Isometry,
    h: Isometry,
    offsets,
    stations: int,
    orientation: str | None,
    depth: int = 0,
    moves=None,
    words=("g", "h"),
):
    """Deterministic station scan for a valid five-sided domain of (g, h).

    Offsets are signed Fermi offsets from the axis of [g^-1, h^-1]; stations
    divide one translation length starting from an equivariant anchor.
    Returns a GoodnessCertificate or None.
    """
    d_comm = commutator(g.inverse(), h.inverse())
    cls = classify(d_comm)
    if cls.label != HYPERBOLIC:
        return None
    fd = fixed_data(d_comm)
    anchor = _axis_anchor(fd.axis, fd.attracting, g, h)
    window = 3.0 * cls.length
    for oi, off in enumerate(offsets):
        for j in range(stations):
            s = anchor + window * (j / stations - 0.5)
            p = _directed_point(fd.axis, fd.attracting, s, off)
            pent = build_pentagon(g, h, p)
            if pent.valid and (orientation is None or pent.report.orientation == orientation):
                return GoodnessCertificate(
                    basis=(g, h),
                    words=tuple(words),
                    moves=list(moves or []),
                    orientation=pent.report.orientation,
                    basepoint=p,
                    offset=off,
                    station=oi * stations + j,
                    depth=depth,
                    distance_to_axis=abs(off),
                    pentagon=pent,
                )
    return None


def good_search(
    g: Isometry,
    h: Isometry,
    t: float,
    epsilon: float,
    depth: int = 12,
    samples: int = 64,
    orientation: str = "CCW",
    max_station_evals: int | None = None,
) -> GoodnessCertificate:
    """Breadth-first search over orientation-preserving basis changes for an
    epsilon-good basepoint; raises CertificateNotFound when exhausted.

    Station order: depth, then basis enumeration order, then offset index,
    then station index (so parallel drivers can merge deterministically).
    """
    tr = commutator(g, h).trace
    if tr <= 2.0:
        raise PreconditionError(f"good_search needs tr[g,h] > 2, got {tr}")
    if abs(tr - t) > 1e-6 * max(1.0, abs(t)):
        raise PreconditionError(f"tr[g,h] = {tr} does not match t = {t}")
    mags = [epsilon / 4.0, epsilon / 2.0, 3.0 * epsilon / 4.0, epsilon * (1.0 - 1e-3)]
    offsets = []
    for m in mags:
        offsets.extend((m, -m))
    evals = 0
    seen = set()
    frontier = [(g, h, [], ("g", "h"))]
    for d in range(depth + 1):
        nxt = []
        for gg, hh, mv, wd in frontier:
            key = (round(gg.trace, 9), round(hh.trace, 9), round((gg @ hh).trace, 9))
            if key in seen:
                continue
            seen.add(key)
            cert = scan_pentagon_stations(gg, hh, offsets, samples, orientation, d, mv, wd)
            evals += 8 * samples
            if cert is not None:
                return cert
            if max_station_evals is not None and evals > max_station_evals:
                raise CertificateNotFound(
                    f"station budget {max_station_evals} exhausted at depth {d}"
                )
            if d < depth:
                for name, mat_fn, word_fn in NIELSEN_MOVES:
                    g2, h2 = mat_fn(gg, hh)
                    w2 = tuple(_reduce_word(w) for w in word_fn(*wd))
                    nxt.append((g2, h2, mv + [name], w2))
        frontier = nxt
        if not frontier:
            break
    raise CertificateNotFound(f"no certificate to depth {depth} with {samples} stations")
