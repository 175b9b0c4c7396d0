"""Punctured-torus character variety: kappa, the Markoff-move action,
greedy trace reduction, characters to matrices, and level-set sampling.

A character is the trace triple (x, y, z) = (tr g, tr h, tr gh) of a pair of
SL(2, R) matrices.  kappa(x, y, z) = x^2 + y^2 + z^2 - x y z - 2 equals
tr[g, h] for any consistent sign lifts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import PreconditionError, SearchExhausted
from .isometry import Isometry, commutator

VIETA_X = "vieta_x"
VIETA_Y = "vieta_y"
VIETA_Z = "vieta_z"
SIGN_XY = "sign_xy"
SIGN_YZ = "sign_yz"
SIGN_ZX = "sign_zx"

#: permutation moves keyed by the coordinate pattern they produce
PERMS = ("xyz", "xzy", "yxz", "yzx", "zxy", "zyx")

ALL_MOVES = (VIETA_X, VIETA_Y, VIETA_Z, SIGN_XY, SIGN_YZ, SIGN_ZX) + tuple(
    "perm_" + p for p in PERMS
)


class ReducibleCharacter(PreconditionError):
    pass


class NotInVariety(PreconditionError):
    pass


class IterationBudgetExceeded(SearchExhausted):
    pass


class EmptyAfterMaxRejects(SearchExhausted):
    pass


class Character(NamedTuple):
    x: float
    y: float
    z: float


def kappa(x: float, y: float, z: float) -> float:
    return x * x + y * y + z * z - x * y * z - 2.0


def in_variety(c: Character, tol=0.0) -> bool:
    """Membership in the character variety of the punctured torus."""
    return kappa(*c) >= 2.0 - tol or max(abs(c.x), abs(c.y), abs(c.z)) >= 2.0 - tol


def gamma_apply(c: Character, move: str) -> Character:
    x, y, z = c
    if move == VIETA_X:
        return Character(y * z - x, y, z)
    if move == VIETA_Y:
        return Character(x, x * z - y, z)
    if move == VIETA_Z:
        return Character(x, y, x * y - z)
    if move == SIGN_XY:
        return Character(-x, -y, z)
    if move == SIGN_YZ:
        return Character(x, -y, -z)
    if move == SIGN_ZX:
        return Character(-x, y, -z)
    if move.startswith("perm_"):
        pat = move[5:]
        vals = {"x": x, "y": y, "z": z}
        return Character(vals[pat[0]], vals[pat[1]], vals[pat[2]])
    raise PreconditionError(f"unknown move {move!r}")


def gamma_word(c: Character, moves) -> Character:
    for m in moves:
        c = gamma_apply(c, m)
    return c


@dataclass
class ReductionOutcome:
    type: str  # "PANTS" | "ELLIPTIC"
    witness: Character
    moves: list

    def replay(self, start: Character) -> Character:
        return gamma_word(start, self.moves)


def _norm2(c: Character) -> float:
    return c.x * c.x + c.y * c.y + c.z * c.z


def _classify_triple(c: Character):
    if any(-2.0 < v < 2.0 for v in c):
        return "ELLIPTIC"
    if all(v <= -2.0 for v in c):
        return "PANTS"
    return None


def goldman_reduce(c: Character, max_iter: int = 100_000) -> ReductionOutcome:
    """Greedy descent of x^2+y^2+z^2 over Vieta moves, then sign normalization.

    Requires kappa > 2 (the level sets where the basis-change action is
    ergodic and the pants/elliptic dichotomy holds).
    """
    if kappa(*c) <= 2.0:
        raise PreconditionError(f"goldman_reduce needs kappa > 2, got {kappa(*c)}")
    cur = Character(*map(float, c))
    moves: list = []
    outcome = _classify_triple(cur)
    steps = 0
    while outcome is None:
        if steps >= max_iter:
            raise IterationBudgetExceeded(f"no witness after {steps} moves from {tuple(c)}")
        steps += 1
        best, best_move = None, None
        for mv in (VIETA_X, VIETA_Y, VIETA_Z):
            cand = gamma_apply(cur, mv)
            if best is None or _norm2(cand) < _norm2(best):
                best, best_move = cand, mv
        if _norm2(best) < _norm2(cur) - 1e-12:
            cur = best
            moves.append(best_move)
            outcome = _classify_triple(cur)
            continue
        # stalled: all |coords| >= 2; flip an even number of signs
        pos = [v > 0 for v in cur]
        npos = sum(pos)
        if npos % 2 == 1:
            # odd sign patterns do not occur at kappa > 2 stalls except
            # through rounding; one more Vieta restores even parity
            cur = best
            moves.append(best_move)
            outcome = _classify_triple(cur)
            continue
        if npos == 2:
            if pos[0] and pos[1]:
                mv = SIGN_XY
            elif pos[1] and pos[2]:
                mv = SIGN_YZ
            else:
                mv = SIGN_ZX
            cur = gamma_apply(cur, mv)
            moves.append(mv)
        outcome = _classify_triple(cur)
        if outcome is None and npos == 0:
            raise IterationBudgetExceeded(f"stalled without witness at {tuple(cur)}")
    return ReductionOutcome(outcome, cur, moves)


def orbit_search(c: Character, depth: int = 12, max_nodes: int = 200_000):
    """Breadth-first oracle over the full move set; stops at the first witness.

    Returns (type, witness, depth) or None if no witness within `depth`.
    Sound because pants-type and elliptic-type orbits are disjoint.
    """
    start = Character(*map(float, c))
    t0 = _classify_triple(start)
    if t0:
        return (t0, start, 0)
    seen = {tuple(round(v, 9) for v in start)}
    frontier = [start]
    for d in range(1, depth + 1):
        nxt = []
        for cur in frontier:
            for mv in ALL_MOVES:
                cand = gamma_apply(cur, mv)
                key = tuple(round(v, 9) for v in cand)
                if key in seen:
                    continue
                seen.add(key)
                t = _classify_triple(cand)
                if t:
                    return (t, cand, d)
                nxt.append(cand)
                if len(seen) > max_nodes:
                    return None
        frontier = nxt
    return None


# ---------------------------------------------------------------------------
# Characters to matrices
# ---------------------------------------------------------------------------


def _companion_pair(x: float, y: float, z: float):
    """Matrices with traces (x, y, z) when |z| >= 2 (xi real)."""
    xi = 0.5 * (z + math.copysign(math.sqrt(z * z - 4.0), z))
    g = Isometry(x, -1.0, 1.0, 0.0)
    h = Isometry(0.0, xi, -1.0 / xi, y)
    return g, h


def _two_elliptic_pair(x: float, y: float, z: float):
    """Two rotations about centers at distance delta on the imaginary axis."""
    ca, cb = x / 2.0, y / 2.0
    sa = math.sqrt(1.0 - ca * ca)
    sb = math.sqrt(1.0 - cb * cb)
    same = (2.0 * ca * cb - z) / (2.0 * sa * sb)
    if same >= 1.0:
        coshd, flip = same, False
    else:
        opp = (z - 2.0 * ca * cb) / (2.0 * sa * sb)
        if opp < 1.0:
            raise NotInVariety(
                f"no two-elliptic realization: kappa={kappa(x, y, z)} requires kappa >= 2"
            )
        coshd, flip = opp, True
    delta = math.acosh(coshd)
    e = math.exp(delta)
    g = Isometry(ca, -sa, sa, ca)
    s2 = -sb if flip else sb
    h = Isometry(cb, -s2 * e, s2 / e, cb)
    return g, h


def char_to_rep(c: Character):
    """Explicit SL(2, R) pair with the given trace coordinates.

    Uses the companion form when some coordinate has magnitude >= 2
    (permuting it into the z slot and undoing the basis move on matrices),
    and two elliptic rotations along a common geodesic otherwise.
    """
    x, y, z = (float(v) for v in c)
    k = kappa(x, y, z)
    if abs(k - 2.0) < 1e-9:
        raise ReducibleCharacter(f"kappa = {k} is reducible")
    if not in_variety(Character(x, y, z)):
        raise NotInVariety(f"({x}, {y}, {z}) is outside the character variety")
    if abs(z) >= 2.0:
        return _companion_pair(x, y, z)
    if abs(x) >= 2.0:
        g1, h1 = _companion_pair(z, y, x)
        return (g1 @ h1).inverse(), h1
    if abs(y) >= 2.0:
        g1, h1 = _companion_pair(x, z, y)
        return g1, (g1 @ h1).inverse()
    return _two_elliptic_pair(x, y, z)


def char_of(g: Isometry, h: Isometry) -> Character:
    return Character(g.trace, h.trace, (g @ h).trace)


def commutator_trace(g: Isometry, h: Isometry) -> float:
    return commutator(g, h).trace


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


def solve_level_z(x: float, y: float, t: float, branch: int = 1) -> float:
    """The root of kappa(x, y, z) = t in z; branch +1 takes the larger root."""
    disc = x * x * y * y - 4.0 * (x * x + y * y - 2.0 - t)
    if disc < 0.0:
        raise NotInVariety(f"kappa(x={x}, y={y}, .) = {t} has no real solution")
    r = math.sqrt(disc)
    return 0.5 * (x * y + r) if branch > 0 else 0.5 * (x * y - r)


def sample_level_set(t: float, box=(-5.0, 5.0), rng=None, max_rejects: int = 10_000) -> Character:
    """Draw a character with kappa = t: (x, y) uniform in the box, z solved.

    The law is mutually absolutely continuous with Lebesgue measure on the
    sampled chart, which suffices for null-set probing.
    """
    if t <= 2.0:
        raise PreconditionError(f"sample_level_set needs t > 2, got {t}")
    if rng is None:
        raise PreconditionError("sample_level_set requires an explicit seeded rng")
    lo, hi = box
    for _ in range(max_rejects):
        x = rng.uniform(lo, hi)
        y = rng.uniform(lo, hi)
        disc = x * x * y * y - 4.0 * (x * x + y * y - 2.0 - t)
        if disc < 0.0:
            continue
        r = math.sqrt(disc)
        z = 0.5 * (x * y + r) if rng.random() < 0.5 else 0.5 * (x * y - r)
        return Character(x, y, z)
    raise EmptyAfterMaxRejects(f"no real root in {max_rejects} draws at t={t}, box={box}")
