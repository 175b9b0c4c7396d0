"""Assembling cone structures: genus-2 gluings along a non-hyperbolic (or
hyperbolic) separating curve, and the extremal pipeline that pieces pants
and one-holed-torus domains along a decomposition.

A closed genus-2 group is presented on (G0, H0, G1, H1) with relator
[G0,H0][G1,H1].  The separating word is the commutator; splitting transports
the second pair by rho(L) with L = G0^-1 H0^-1 G1 H1, after which the two
inverse commutators share their fixed data and the two five-sided domains
can share the edge p -> [g0^-1, h0^-1] p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import cover
from .characters import Character, char_to_rep, kappa, solve_level_z
from .cover import Lift, RegionLabel, SurfaceRep, lift_commutator, region, simplest_lift, theta, twist
from .domains import (
    CertificateNotFound,
    GoodnessCertificate,
    Pentagon,
    PantsDomain,
    build_pentagon,
    build_pants,
    good_search,
    scan_pentagon_stations,
)
from .errors import PreconditionError, SearchExhausted
from .isometry import (
    ELLIPTIC,
    HYPERBOLIC,
    IDENTITY_LABEL,
    PARABOLIC,
    Isometry,
    classify,
    commutator,
    conjugator_elliptic,
    conjugator_hyperbolic,
    conjugator_parabolic,
    elliptic_center,
    fixed_data,
    random_isometry,
    segment_carrier,
)
from .plane import (
    INFINITY,
    Geodesic,
    GeodesicPolygon,
    collar_width,
    dist,
    from_disk,
    is_ideal,
    polygon_validate,
    trace_to_length,
)

TWO_PI = 2.0 * math.pi
FOUR_PI = 4.0 * math.pi


class RelatorViolation(PreconditionError):
    pass


class IdentityCommutator(PreconditionError):
    pass


class NonExtremal(PreconditionError):
    pass


class EllipticDecompositionCurve(PreconditionError):
    pass


class PieceEulerMismatch(PreconditionError):
    pass


class CertificateMissing(PreconditionError):
    pass


class NoCompatibleBasepoint(SearchExhausted):
    pass


class GlueSearchExhausted(SearchExhausted):
    pass


# ---------------------------------------------------------------------------
# Genus-2 representations
# ---------------------------------------------------------------------------


@dataclass
class Genus2Rep:
    g0: Isometry
    h0: Isometry
    g1: Isometry
    h1: Isometry

    def surface_rep(self) -> SurfaceRep:
        return SurfaceRep(2, 0, [(self.g0, self.h0), (self.g1, self.h1)])

    def relator_residual(self) -> float:
        return (commutator(self.g0, self.h0) @ commutator(self.g1, self.h1)).frobenius_from_identity()

    def euler(self) -> int:
        return cover.euler_class(self.surface_rep())

    def swapped(self) -> "Genus2Rep":
        """Orientation-reversed presentation (swaps each handle pair)."""
        return Genus2Rep(self.h0, self.g0, self.h1, self.g1)


@dataclass
class SplitResult:
    case: str                     # ELLIPTIC | PARABOLIC | HYPERBOLIC
    rho0: tuple                   # (g0, h0)
    rho1: tuple                   # second pair conjugated by rho(L)
    euler: int
    orientation_flipped: bool
    theta_sum: float | None = None
    regions: tuple | None = None


def split_genus2(rep: Genus2Rep, residual_tol: float = 1e-8) -> SplitResult:
    """Split along the separating commutator curve and classify the case."""
    if rep.relator_residual() >= residual_tol:
        raise RelatorViolation(f"relator residual {rep.relator_residual():.3g} >= {residual_tol}")
    e = rep.euler()
    flipped = False
    if e < 0:
        rep = rep.swapped()
        e = -e
        flipped = True
    g0, h0, g1, h1 = rep.g0, rep.h0, rep.g1, rep.h1
    k0 = commutator(g0, h0)
    label = classify(k0).label
    if label == IDENTITY_LABEL:
        raise IdentityCommutator("separating curve has identity holonomy")
    rho_l = g0.inverse() @ h0.inverse() @ g1 @ h1
    a1 = rho_l @ g1 @ rho_l.inverse()
    b1 = rho_l @ h1 @ rho_l.inverse()
    if label == HYPERBOLIC:
        return SplitResult("HYPERBOLIC", (g0, h0), (a1, b1), e, flipped)
    if e != 1:
        raise PreconditionError(
            f"separating curve is {label} but euler class is {e if not flipped else -e}; need +-1"
        )
    l0 = lift_commutator(Lift(g0, 0), Lift(h0, 0))
    l1 = lift_commutator(Lift(a1, 0), Lift(b1, 0))
    r0, r1 = region(l0), region(l1)
    if label == ELLIPTIC:
        if not (r0 == RegionLabel("ELL", 1) and r1 == RegionLabel("ELL", 1)):
            raise PreconditionError(f"elliptic case expects ELL(1)/ELL(1), got {r0}/{r1}")
        th = theta(l0) + theta(l1)
        if abs(th - math.pi) > 1e-8:
            raise PreconditionError(f"theta sum {th} != pi")
        return SplitResult("ELLIPTIC", (g0, h0), (a1, b1), e, flipped, theta_sum=th, regions=(r0, r1))
    # parabolic case: traces 2 and -2 up to which side is which
    pair = {(r0.kind, r0.index), (r1.kind, r1.index)}
    if pair != {("PAR_PLUS", 0), ("PAR_MINUS", 1)}:
        raise PreconditionError(f"parabolic case expects PAR_PLUS(0)/PAR_MINUS(1), got {r0}/{r1}")
    return SplitResult("PARABOLIC", (g0, h0), (a1, b1), e, flipped, regions=(r0, r1))


# ---------------------------------------------------------------------------
# Glued octagon domains
# ---------------------------------------------------------------------------


@dataclass
class GluedDomain:
    octagon: GeodesicPolygon
    pairings: list               # (name, isometry, src index pair, dst index pair)
    cone_angle: float
    area: float
    euler_certificate: int
    provenance: list             # per-side piece tags
    twist_sum: float | None
    pentagons: tuple             # the two five-sided halves
    report: object

    def vertex_orbit_single(self) -> bool:
        n = len(self.octagon.vertices)
        adj = {i: set() for i in range(n)}
        for _name, _iso, src, dst in self.pairings:
            for i, j in zip(src, dst):
                adj[i].add(j)
                adj[j].add(i)
        seen = {0}
        stack = [0]
        while stack:
            for j in adj[stack.pop()]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == n


def _union_octagon(pent0: Pentagon, pent1: Pentagon):
    verts = pent0.vertices[:4] + pent1.vertices[:4]
    return GeodesicPolygon(verts)


def _assemble_glued(split: SplitResult, pent0: Pentagon, pent1: Pentagon) -> GluedDomain | None:
    octagon = _union_octagon(pent0, pent1)
    report = polygon_validate(octagon)
    if not report.valid:
        return None
    cone = report.angle_sum
    if abs(cone - FOUR_PI) > 1e-6:
        return None
    g0, h0 = split.rho0
    a1, b1 = split.rho1
    pairings = [
        ("g0", g0, (4, 3), (1, 2)),
        ("h0", h0, (0, 1), (3, 2)),
        ("g1", a1, (0, 7), (5, 6)),
        ("h1", b1, (4, 5), (7, 6)),
    ]
    l0 = lift_commutator(Lift(g0, 0).inverse(), Lift(h0, 0).inverse())
    l1 = lift_commutator(Lift(a1, 0).inverse(), Lift(b1, 0).inverse())
    tw = twist(l0, pent0.basepoint) + twist(l1, pent1.basepoint)
    dom = GluedDomain(
        octagon,
        pairings,
        cone,
        report.area,
        split.euler if not split.orientation_flipped else -split.euler,
        ["S0"] * 4 + ["S1"] * 4,
        tw,
        (pent0, pent1),
        report,
    )
    if not dom.vertex_orbit_single():
        return None
    return dom


def _circle_point(center: complex, radius: float, angle: float) -> complex:
    frame = Isometry.point_frame(center) @ Isometry.rotation(angle)
    return frame(complex(0.0, math.exp(radius)))


def glue_genus2(split: SplitResult, stations: int = 64, max_halvings: int = 30) -> GluedDomain:
    """Search basepoints near the shared fixed datum until the two five-sided
    domains join into an embedded octagon with cone angle 4 pi."""
    if split.case not in ("ELLIPTIC", "PARABOLIC"):
        raise PreconditionError(f"glue_genus2 handles ELLIPTIC/PARABOLIC, got {split.case}")
    g0, h0 = split.rho0
    a1, b1 = split.rho1
    d0 = commutator(g0.inverse(), h0.inverse())

    if split.case == "ELLIPTIC":
        r = elliptic_center(d0)
        probe = build_pentagon(g0, h0, _circle_point(r, 0.1, 0.0))
        scale = _min_vertex_gap(probe) / 2.0
        eps0 = min(1.0, scale if scale > 0 else 0.1)
        eps = eps0
        for _ in range(max_halvings + 1):
            for k in range(stations):
                p0 = _circle_point(r, eps, TWO_PI * k / stations)
                p1 = d0(p0)
                pent0 = build_pentagon(g0, h0, p0)
                if not pent0.valid:
                    continue
                pent1 = build_pentagon(a1, b1, p1)
                if not pent1.valid:
                    continue
                dom = _assemble_glued(split, pent0, pent1)
                if dom is not None:
                    return dom
            eps *= 0.5
        raise GlueSearchExhausted(
            f"elliptic glue: no compatible basepoints down to eps={eps:.3g} with {stations} stations"
        )

    # parabolic: stations along horocycles about the fixed boundary point
    u = fixed_data(d0).fixed_boundary
    if u == INFINITY:
        norm = Isometry.identity()
    else:
        norm = Isometry(0.0, -1.0, 1.0, -u)
    dn = norm @ d0 @ norm.inverse()
    tau = dn.b * (1.0 if dn.a > 0 else -1.0)
    height = 1.0
    for _ in range(max_halvings + 1):
        for k in range(stations):
            x0 = tau * k / stations
            p0 = norm.inverse()(complex(x0, height))
            p1 = d0(p0)
            pent0 = build_pentagon(g0, h0, p0)
            if not pent0.valid:
                continue
            pent1 = build_pentagon(a1, b1, p1)
            if not pent1.valid:
                continue
            dom = _assemble_glued(split, pent0, pent1)
            if dom is not None:
                return dom
        height *= 2.0
    raise GlueSearchExhausted(
        f"parabolic glue: no compatible basepoints up to height {height:.3g} with {stations} stations"
    )


def _min_vertex_gap(pent: Pentagon) -> float:
    gap = math.inf
    vs = pent.vertices
    for i in range(len(vs)):
        for j in range(i + 1, len(vs)):
            if is_ideal(vs[i]) or is_ideal(vs[j]):
                continue
            gap = min(gap, dist(vs[i], vs[j]))
    return 0.0 if gap is math.inf else gap


def glue_hyperbolic(
    rho1: tuple,
    rho_w: tuple,
    t: float,
    certificate: GoodnessCertificate | None = None,
    stations: int = 64,
) -> GluedDomain:
    """Glue a one-holed torus with tr[g,h] = t > 2 (via a collar-width-good
    basepoint) to a Fuchsian one-holed torus with boundary trace t.

    The W side is conjugated so the two inverse commutators are exact
    inverses; the translation gauge along the shared axis is searched.
    """
    g, h = rho1
    gw, hw = rho_w
    t1 = commutator(g, h).trace
    tw_tr = commutator(gw, hw).trace
    if abs(t1 - t) > 1e-6 * max(1.0, t):
        raise PreconditionError(f"tr[g,h] = {t1} does not match t = {t}")
    if abs(tw_tr + t) > 1e-6 * max(1.0, t):
        raise CertificateMissing(
            f"W-side commutator trace {tw_tr} is not -t = {-t}: boundary traces mismatch"
        )
    if certificate is None:
        try:
            certificate = good_search(g, h, t, collar_width(t), orientation="CCW")
        except CertificateNotFound as exc:
            raise CertificateMissing(f"no collar-width certificate for the torus side: {exc}")
    gp, hp = certificate.basis
    p0 = certificate.basepoint
    d = commutator(gp.inverse(), hp.inverse())

    # W side: commutator lift must be on the +1 side; swap generators if not
    lw = lift_commutator(Lift(gw, 0).inverse(), Lift(hw, 0).inverse())
    if region(lw).index == -1:
        gw, hw = hw, gw
        lw = lift_commutator(Lift(gw, 0).inverse(), Lift(hw, 0).inverse())
    if region(lw) != RegionLabel("HYP", 1):
        raise PreconditionError(f"W-side inverse-commutator lift in {region(lw)}, need HYP(1)")
    dw = commutator(gw.inverse(), hw.inverse())
    s = conjugator_hyperbolic(dw, d.inverse())
    gw1, hw1 = s @ gw @ s.inverse(), s @ hw @ s.inverse()

    p1 = d(p0)
    axis = fixed_data(d).axis
    frame = Isometry.geodesic_frame(axis)
    period = trace_to_length(t)
    split = SplitResult("HYPERBOLIC", (gp, hp), (None, None), 1, False)
    for j in range(stations):
        u = period * j / stations
        shift = frame @ Isometry.axis_translation(u) @ frame.inverse()
        gw2, hw2 = shift @ gw1 @ shift.inverse(), shift @ hw1 @ shift.inverse()
        pent1 = build_pentagon(gw2, hw2, p1)
        if not pent1.valid:
            continue
        split.rho1 = (gw2, hw2)
        dom = _assemble_glued(split, certificate.pentagon, pent1)
        if dom is not None:
            return dom
    raise NoCompatibleBasepoint(
        f"no translation gauge out of {stations} stations aligns the W-side domain"
    )


# ---------------------------------------------------------------------------
# Consistency report for cone data
# ---------------------------------------------------------------------------


@dataclass
class ConeCheckReport:
    chi: int
    cone_angles: list
    orders: list
    euler_class: int
    expected_magnitude: int
    consistent: bool

    def __str__(self):
        return (
            f"chi={self.chi} orders={self.orders} |E|={abs(self.euler_class)} "
            f"expected {self.expected_magnitude}: {'ok' if self.consistent else 'MISMATCH'}"
        )


def cone_euler_check(obj, chi: int | None = None) -> ConeCheckReport:
    """Check |E| = |chi + sum of cone orders| against the measured angles."""
    if isinstance(obj, GluedDomain):
        chi = -2 if chi is None else chi
        angles = [obj.cone_angle]
        e = obj.euler_certificate
    elif isinstance(obj, PantsDomain):
        chi = -1 if chi is None else chi
        angles = []
        e = 1
    elif isinstance(obj, AssembledStructure):
        chi = obj.chi if chi is None else chi
        angles = []
        e = obj.euler_total
    else:
        raise PreconditionError(f"cone_euler_check cannot read {type(obj).__name__}")
    orders = [a / TWO_PI - 1.0 for a in angles]
    expected = abs(chi + sum(round(s) for s in orders))
    ok = abs(e) == expected and all(abs(s - round(s)) < 1e-6 for s in orders)
    return ConeCheckReport(chi, angles, [round(s) for s in orders], e, expected, ok)


# ---------------------------------------------------------------------------
# Extremal assembly along a decomposition
# ---------------------------------------------------------------------------


@dataclass
class Piece:
    kind: str          # "PANTS" | "PUNCTURED_TORUS"
    words: dict        # PANTS: C1, C2; PUNCTURED_TORUS: G, H
    transport: str = ""


@dataclass
class Decomposition:
    pieces: list
    edges: list        # (i, j, curve word)


@dataclass
class AssembledPiece:
    kind: str
    images: dict
    euler: int
    domain: object     # PantsDomain | Pentagon


@dataclass
class EdgeCheck:
    pieces: tuple
    curve_class: str
    axis: Geodesic
    axis_matched: bool
    opposite_sides: bool


@dataclass
class AssembledStructure:
    pieces: list
    edges: list
    euler_total: int
    chi: int

    def tiling(self, max_word_len: int = 4):
        """Translates of the piece domains under short pairing words."""
        tiles = []
        for idx, piece in enumerate(self.pieces):
            if isinstance(piece.domain, PantsDomain):
                poly = piece.domain.octagon
                gens = [piece.domain.c1, piece.domain.c2]
            else:
                poly = piece.domain.polygon()
                gens = [piece.domain.g, piece.domain.h]
            seen = {(1.0, 0.0, 0.0, 1.0)}
            group = [((), Isometry.identity())]
            frontier = list(group)
            for _ in range(max_word_len):
                nxt = []
                for word, mat in frontier:
                    for gi, base in enumerate(gens):
                        for sgn in (1, -1):
                            if word and word[-1] == (gi, -sgn):
                                continue
                            m2 = (base if sgn > 0 else base.inverse()) @ mat
                            key = tuple(round(v, 7) for v in m2.canonical().matrix())
                            if key in seen:
                                continue
                            seen.add(key)
                            entry = (word + ((gi, sgn),), m2)
                            group.append(entry)
                            nxt.append(entry)
                frontier = nxt
            for word, mat in group:
                tiles.append((idx, word, _transform_polygon(mat, poly)))
        return tiles


def _transform_polygon(A: Isometry, poly: GeodesicPolygon) -> GeodesicPolygon:
    return GeodesicPolygon([A(v) for v in poly.vertices])


def evaluate_word(images: dict, word: str) -> Isometry:
    """Evaluate a whitespace word like 'G0 H0^-1 G1' over named images."""
    out = Isometry.identity()
    for tok in word.split():
        inv = tok.endswith("^-1")
        name = tok[:-3] if inv else tok
        if name not in images:
            raise PreconditionError(f"unknown generator {name!r} in word {word!r}")
        m = images[name]
        out = out @ (m.inverse() if inv else m)
    return out


def _piece_images(rep_images: dict, piece: Piece) -> dict:
    t = evaluate_word(rep_images, piece.transport) if piece.transport else Isometry.identity()
    out = {}
    for key, word in piece.words.items():
        out[key] = t @ evaluate_word(rep_images, word) @ t.inverse()
    return out


def _interior_probe(domain) -> complex:
    """A point inside the domain: average of finite vertices in the disk chart."""
    poly = domain.octagon if isinstance(domain, PantsDomain) else domain.polygon()
    pts = [v for v in poly.disk_vertices(clip=True)]
    w = sum(pts) / len(pts)
    z = from_disk(w * 0.999)
    return z


def assemble_extremal(rep: SurfaceRep, images: dict, dec: Decomposition) -> AssembledStructure:
    """Build per-piece domains for an extremal representation and verify the
    shared decomposition curves.

    `images` names the generator images of `rep` for word evaluation.
    """
    total = cover.euler_class(rep)
    if abs(total) != -rep.chi:
        raise NonExtremal(f"euler class {total} is not extremal for chi = {rep.chi}")

    assembled = []
    for piece in dec.pieces:
        imgs = _piece_images(images, piece)
        if piece.kind == "PANTS":
            c1, c2 = imgs["C1"], imgs["C2"]
            if total < 0:
                c1, c2 = c2.inverse(), c1.inverse()
            for nm, c in (("C1", c1), ("C2", c2), ("C3", (c1 @ c2).inverse())):
                if classify(c).label == ELLIPTIC:
                    raise EllipticDecompositionCurve(f"pants boundary {nm} is elliptic")
            rel = simplest_lift(c1) * simplest_lift(c2) * simplest_lift((c1 @ c2).inverse())
            e = rel.central_power()
            dom = build_pants(c1, c2)
            assembled.append(AssembledPiece("PANTS", {"C1": c1, "C2": c2}, e, dom))
        elif piece.kind == "PUNCTURED_TORUS":
            g, h = imgs["G"], imgs["H"]
            if total < 0:
                g, h = h, g
            bdry = commutator(g, h)
            if classify(bdry).label == ELLIPTIC:
                raise EllipticDecompositionCurve("torus boundary commutator is elliptic")
            e = cover.euler_class(cover.punctured_torus_rep(g, h))
            cert = scan_pentagon_stations(g, h, [0.0], 128, None)
            if cert is None:
                raise GlueSearchExhausted("no on-axis basepoint gives a valid torus domain")
            assembled.append(AssembledPiece("PUNCTURED_TORUS", {"G": g, "H": h}, e, cert.pentagon))
        else:
            raise PreconditionError(f"unknown piece kind {piece.kind!r}")

    if any(abs(p.euler) != 1 for p in assembled):
        raise PieceEulerMismatch(f"piece classes {[p.euler for p in assembled]} must be +-1")
    if sum(p.euler for p in assembled) != abs(total):
        raise PieceEulerMismatch(
            f"piece classes {[p.euler for p in assembled]} do not sum to {abs(total)}"
        )

    edge_checks = []
    for (i, j, word) in dec.edges:
        cw = evaluate_word(images, word)
        lab = classify(cw).label
        if lab != HYPERBOLIC:
            raise EllipticDecompositionCurve(f"decomposition curve {word!r} is {lab}")
        axis = fixed_data(cw).axis
        matched = _domain_touches_axis(assembled[i].domain, axis) and _domain_touches_axis(
            assembled[j].domain, axis
        )
        si = axis.side(_interior_probe(assembled[i].domain))
        sj = axis.side(_interior_probe(assembled[j].domain))
        edge_checks.append(EdgeCheck((i, j), lab, axis, matched, si * sj < 0.0))

    return AssembledStructure(assembled, edge_checks, total, rep.chi)


def _domain_touches_axis(domain, axis: Geodesic, tol: float = 1e-6) -> bool:
    poly = domain.octagon if isinstance(domain, PantsDomain) else domain.polygon()
    verts = poly.vertices
    n = len(verts)
    for i in range(n):
        v, w = verts[i], verts[(i + 1) % n]
        if axis.contains(v, tol) and axis.contains(w, tol):
            return True
    return False


# ---------------------------------------------------------------------------
# Constructors for notable representations
# ---------------------------------------------------------------------------


def regular_octagon_rep() -> Genus2Rep:
    """Side pairings of the regular octagon with vertex angles pi/4.

    The holonomy is Fuchsian: the relator holds exactly and the Euler class
    is extremal (|m| = 2).
    """
    circum = math.acosh(1.0 / math.tan(math.pi / 8.0) ** 2)
    r_eucl = math.tanh(circum / 2.0)
    verts = [
        from_disk(r_eucl * complex(math.cos(a), math.sin(a)))
        for a in [math.pi / 8.0 + k * math.pi / 4.0 for k in range(8)]
    ]
    v = verts
    a = segment_carrier(v[3], v[2], v[0], v[1])
    b = segment_carrier(v[4], v[3], v[1], v[2])
    c = segment_carrier(v[7], v[6], v[4], v[5])
    d = segment_carrier(v[0], v[7], v[5], v[6])
    return Genus2Rep(a, b, c, d)


def pair_with_commutator(target: Isometry, rng, max_tries: int = 200):
    """A pair (g, h) with [g, h] equal to `target` exactly (up to fp).

    Samples characters on the matching kappa level and conjugates the
    construction onto the target's fixed data.
    """
    cls = classify(target)
    if cls.label == IDENTITY_LABEL:
        base = random_hyperbolic(rng)
        return base, base @ base
    # kappa level matching the SL2 trace of a commutator in the class
    if cls.label == HYPERBOLIC:
        levels = [2.0 * math.cosh(cls.length / 2.0), -2.0 * math.cosh(cls.length / 2.0)]
    elif cls.label == PARABOLIC:
        levels = [-2.0]
    else:
        levels = [2.0 * math.cos(cls.angle / 2.0)]
    for _ in range(max_tries):
        lv = levels[rng.randrange(len(levels))] if len(levels) > 1 else levels[0]
        x = rng.uniform(-4.0, 4.0)
        y = rng.uniform(-4.0, 4.0)
        try:
            z = solve_level_z(x, y, lv, 1 if rng.random() < 0.5 else -1)
        except PreconditionError:
            continue
        ch = Character(x, y, z)
        if abs(kappa(*ch) - 2.0) < 1e-6:
            continue
        try:
            g, h = char_to_rep(ch)
        except PreconditionError:
            continue
        k = commutator(g, h)
        kcls = classify(k)
        if kcls.label != cls.label:
            continue
        if kcls.label == ELLIPTIC and abs(kcls.angle - cls.angle) > 1e-7:
            g, h = h, g
            k = commutator(g, h)
            kcls = classify(k)
            if abs(kcls.angle - cls.angle) > 1e-7:
                continue
        if kcls.label == PARABOLIC and classify(k).par_sign != cls.par_sign:
            g, h = h, g
            k = commutator(g, h)
        try:
            if kcls.label == HYPERBOLIC:
                s = conjugator_hyperbolic(k, target)
            elif kcls.label == PARABOLIC:
                s = conjugator_parabolic(k, target)
            else:
                s = conjugator_elliptic(k, target)
        except PreconditionError:
            continue
        g2, h2 = s @ g @ s.inverse(), s @ h @ s.inverse()
        if (commutator(g2, h2) @ target.inverse()).frobenius_from_identity() < 1e-7:
            return g2, h2
    raise SearchExhausted(f"no pair with the prescribed commutator after {max_tries} tries")


def random_hyperbolic(rng, min_len: float = 0.3, max_len: float = 3.0) -> Isometry:
    m = random_isometry(rng)
    return m @ Isometry.axis_translation(rng.uniform(min_len, max_len)) @ m.inverse()


def random_nonelliptic(rng) -> Isometry:
    if rng.random() < 0.85:
        return random_hyperbolic(rng)
    m = random_isometry(rng)
    return m @ Isometry.parabolic_shift(rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 2.0)) @ m.inverse()


def random_surface_rep(genus: int, boundary: int, rng) -> SurfaceRep:
    """Random representation with the relator enforced by construction."""
    if 2 - 2 * genus - boundary >= 0:
        raise PreconditionError("need negative Euler characteristic")
    for _ in range(200):
        gens = [(random_isometry(rng), random_isometry(rng)) for _ in range(genus if boundary else genus - 1)]
        prefix = Isometry.identity()
        for g, h in gens:
            prefix = prefix @ commutator(g, h)
        if boundary:
            bnds = [random_nonelliptic(rng) for _ in range(boundary - 1)]
            for c in bnds:
                prefix = prefix @ c
            last = prefix.inverse()
            if classify(last).label == ELLIPTIC:
                continue
            return SurfaceRep(genus, boundary, gens, bnds + [last])
        try:
            g_last, h_last = pair_with_commutator(prefix.inverse(), rng)
        except SearchExhausted:
            continue
        return SurfaceRep(genus, 0, gens + [(g_last, h_last)])
    raise SearchExhausted("could not build a random surface representation")


def genus2_elliptic_example() -> Genus2Rep:
    """Elliptic-commutator genus-2 representation with euler class +1.

    First handle: diag(2, 1/2) and its quarter-turn conjugate (commutator
    trace 0.734375); second handle built on the same kappa level and
    conjugated so the relator holds exactly.
    """
    g0 = Isometry.axis_translation(2.0 * math.log(2.0))
    rot = Isometry.rotation(math.pi / 2.0)
    h0 = rot @ g0 @ rot.inverse()
    k0 = commutator(g0, h0)
    if region(lift_commutator(Lift(g0, 0), Lift(h0, 0))) != RegionLabel("ELL", 1):
        g0, h0 = h0, g0
        k0 = commutator(g0, h0)
    lv = k0.trace
    z = solve_level_z(3.0, 3.0, lv, -1)
    g1, h1 = char_to_rep(Character(3.0, 3.0, z))
    k1 = commutator(g1, h1)
    target = k0.inverse()
    if abs(classify(k1).angle - classify(target).angle) > 1e-9:
        g1, h1 = h1, g1
        k1 = commutator(g1, h1)
    s = conjugator_elliptic(k1, target)
    return Genus2Rep(g0, h0, s @ g1 @ s.inverse(), s @ h1 @ s.inverse())


def genus2_parabolic_example() -> Genus2Rep:
    """Parabolic-commutator genus-2 representation with euler class +1.

    One half is reducible non-abelian (upper-triangular pair, commutator
    trace +2); the other is the (3, 3, 3) cusped-torus pair (commutator
    trace -2), conjugated so the relator holds exactly.
    """
    g0 = Isometry(math.exp(0.4), 0.0, 0.0, math.exp(-0.4))
    h0 = Isometry(math.exp(0.3), 1.0, 0.0, math.exp(-0.3))
    k0 = commutator(g0, h0)
    if region(lift_commutator(Lift(g0, 0), Lift(h0, 0))) != RegionLabel("PAR_PLUS", 0):
        g0, h0 = h0, g0
        k0 = commutator(g0, h0)
    g1 = Isometry(1.0, 1.0, 1.0, 2.0)
    h1 = Isometry(1.0, -1.0, -1.0, 2.0)
    k1 = commutator(g1, h1)
    if region(lift_commutator(Lift(g1, 0), Lift(h1, 0))) != RegionLabel("PAR_MINUS", 1):
        g1, h1 = h1, g1
        k1 = commutator(g1, h1)
    target = k0.inverse()
    if classify(k1).par_sign != classify(target).par_sign:
        g1, h1 = h1, g1
        k1 = commutator(g1, h1)
    s = conjugator_parabolic(k1, target)
    return Genus2Rep(g0, h0, s @ g1 @ s.inverse(), s @ h1 @ s.inverse())


def fuchsian_torus_with_boundary_trace(t: float) -> tuple:
    """One-holed-torus pair with tr[g,h] = -t (boundary trace t), built from
    the (3, 3, z) character family."""
    z = solve_level_z(3.0, 3.0, -t, -1)
    return char_to_rep(Character(3.0, 3.0, z))
