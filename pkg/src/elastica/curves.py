"""Planar elastica curves, the figure-eight constants, and leafed closures.

Point-level parametrizations of the five planar families (canonical pose,
unit frequency, composed with a similarity), the figure-eight modulus m*
solving 2E(m) = K(m), the half-leaf energy constant varpi* and the leaf
spread angle psi, leafed-elastica construction in the plane (even leaf
count, mirrored leaves) and in space (tangent chains on the sphere),
curvature/torsion reconstruction by Frenet integration, and a least-squares
classifier for closed planar curves (circle / figure-eight / neither).

Canonical curves, arclength-parametrized with curvature kappa:

    linear      (s, 0)                                    kappa = 0
    wavelike    (2 eps(s,m) - s, -2 sqrt(m) cn(s,m))      kappa = 2 sqrt(m) cn
    borderline  (2 tanh s - s, -2 sech s)                 kappa = 2 sech s
    orbitlike   (1/m)(2 eps(s,m) + (m-2) s, -2 dn(s,m))   kappa = 2 dn
    circular    (sin s, -cos s)                           kappa = 1

where eps(s,m) is the Jacobi epsilon function.  The wavelike tangential
angle is theta_w = 2 arcsin(sqrt(m) sn), the orbitlike one theta_o = 2 am.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .discrete import DiscreteCurve, curvature_data, length
from .elliptic import am, cn, comp_E, comp_K, dE_dm, dK_dm, dn, jacobi_epsilon, sn
from .errors import DomainError, InfeasibleError
from .profiles import (
    FAMILY_TAGS,
    CurvatureProfile,
    kappa_sq,
    profile_c,
)

__all__ = [
    "figure_eight_modulus",
    "varpi_star",
    "leaf_spread_angle",
    "check_closure",
    "Similarity",
    "RigidMotion",
    "PlanarElastica",
    "eval_planar",
    "eval_theta",
    "eval_k",
    "planar_state",
    "Leaf",
    "canonical_leaf",
    "build_leaf",
    "spherical_chain",
    "LeafedElastica",
    "build_leafed",
    "sample_leafed",
    "ClassifyResult",
    "classify_closed",
    "reconstruct_spatial",
]

_eps_vec = np.vectorize(jacobi_epsilon, otypes=[float])
_am_vec = np.vectorize(am, otypes=[float])


# ---------------------------------------------------------------------------
# figure-eight constants

@lru_cache(maxsize=1)
def figure_eight_modulus() -> float:
    """The unique m* in (0,1) with 2E(m*) = K(m*).

    m -> 2E(m) - K(m) decreases strictly from pi/2 to -inf, so bisection
    brackets the root; a Newton polish lands |2E - K| below 1e-13.
    """
    f = lambda m: 2.0 * comp_E(m) - comp_K(m)
    lo, hi = 0.5, 0.95  # f(0.5) > 0 > f(0.95)
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    m = 0.5 * (lo + hi)
    for _ in range(4):
        m -= f(m) / (2.0 * dE_dm(m) - dK_dm(m))
    if not abs(f(m)) < 1e-13:
        raise RuntimeError("figure-eight modulus did not converge")
    return m


@lru_cache(maxsize=1)
def varpi_star() -> float:
    """Normalized bending energy of one leaf: 32 (2m* - 1) E(m*)^2 = 28.109..."""
    m = figure_eight_modulus()
    return 32.0 * (2.0 * m - 1.0) * comp_E(m) ** 2


@lru_cache(maxsize=1)
def leaf_spread_angle() -> float:
    """Angle psi in (0, pi) between the leaf's start and end unit tangents:
    2 pi - 4 arcsin(sqrt(m*))."""
    return 2.0 * math.pi - 4.0 * math.asin(math.sqrt(figure_eight_modulus()))


def check_closure(family: str, m: float, tol: float = 1e-9) -> bool:
    """Whether the family closes up at modulus m.

    Wavelike curves close exactly when 2E(m) = K(m); orbitlike ones never
    do, since 2E(m) + (m-2)K(m) < 0 throughout (0,1).
    """
    if family not in ("wavelike", "orbitlike"):
        raise DomainError(f"closure test applies to wavelike/orbitlike, not {family!r}")
    if not 0.0 < m < 1.0:
        raise DomainError("need m in (0,1)")
    if family == "orbitlike":
        return False
    return abs(2.0 * comp_E(m) - comp_K(m)) < tol


# ---------------------------------------------------------------------------
# similarities and rigid motions

@dataclass(frozen=True)
class Similarity:
    """p -> translation + scale * Rot(rotation) * Mirror^reflect * p,
    with Mirror = diag(1, -1)."""

    rotation: float = 0.0
    translation: tuple[float, float] = (0.0, 0.0)
    scale: float = 1.0
    reflect: bool = False

    def __post_init__(self):
        if not (np.isfinite(self.rotation) and np.all(np.isfinite(self.translation))):
            raise DomainError("similarity parameters must be finite")
        if not (np.isfinite(self.scale) and self.scale > 0.0):
            raise DomainError("similarity scale must be positive")

    def apply(self, x, y):
        if self.reflect:
            y = -np.asarray(y)
        ca, sa = math.cos(self.rotation), math.sin(self.rotation)
        tx, ty = self.translation
        return (
            tx + self.scale * (ca * np.asarray(x) - sa * np.asarray(y)),
            ty + self.scale * (sa * np.asarray(x) + ca * np.asarray(y)),
        )


@dataclass(frozen=True)
class RigidMotion:
    """Euclidean isometry x -> rotation @ x + translation (det rotation ±1)."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        R = np.array(self.rotation, dtype=float)
        t = np.array(self.translation, dtype=float)
        if R.ndim != 2 or R.shape[0] != R.shape[1] or R.shape[0] not in (2, 3):
            raise DomainError("rotation must be a 2x2 or 3x3 matrix")
        if t.shape != (R.shape[0],):
            raise DomainError("translation dimension must match the rotation")
        if not np.allclose(R.T @ R, np.eye(R.shape[0]), atol=1e-12):
            raise DomainError("rotation columns must be orthonormal to 1e-12")
        R.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", t)

    def apply(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(points) @ self.rotation.T + self.translation


# ---------------------------------------------------------------------------
# planar families

def _need_m(tag: str) -> bool:
    return tag in ("wavelike", "orbitlike")


@dataclass(frozen=True)
class PlanarElastica:
    """A planar elastica: canonical family member composed with a similarity.

    Evaluation at arclength s uses the canonical parameter u = s/scale + s0,
    so the transformed curve stays unit-speed in s.
    """

    family: str
    m: float | None = None
    similarity: Similarity = field(default_factory=Similarity)
    s0: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILY_TAGS:
            raise DomainError(f"unknown family {self.family!r}")
        if _need_m(self.family):
            if self.m is None or not 0.0 < self.m < 1.0:
                raise DomainError(f"{self.family} needs m in (0,1)")
        elif self.m is not None:
            raise DomainError(f"{self.family} takes no modulus")
        if not np.isfinite(self.s0):
            raise DomainError("phase must be finite")


def _canon_point(tag: str, m, s):
    s = np.asarray(s, dtype=float)
    if tag == "linear":
        return s, np.zeros_like(s)
    if tag == "wavelike":
        return 2.0 * _eps_vec(s, m) - s, -2.0 * math.sqrt(m) * cn(s, m)
    if tag == "borderline":
        return 2.0 * np.tanh(s) - s, -2.0 / np.cosh(s)
    if tag == "orbitlike":
        return (2.0 * _eps_vec(s, m) + (m - 2.0) * s) / m, -2.0 * dn(s, m) / m
    return np.sin(s), -np.cos(s)  # circular


def _canon_theta(tag: str, m, s):
    s = np.asarray(s, dtype=float)
    if tag == "linear":
        return np.zeros_like(s)
    if tag == "wavelike":
        return 2.0 * np.arcsin(math.sqrt(m) * sn(s, m))
    if tag == "borderline":
        return 2.0 * np.arcsin(np.tanh(s))
    if tag == "orbitlike":
        return 2.0 * _am_vec(s, m)
    return s + np.zeros_like(s)


def _canon_k(tag: str, m, s):
    s = np.asarray(s, dtype=float)
    if tag == "linear":
        return np.zeros_like(s)
    if tag == "wavelike":
        return 2.0 * math.sqrt(m) * cn(s, m)
    if tag == "borderline":
        return 2.0 / np.cosh(s)
    if tag == "orbitlike":
        return 2.0 * dn(s, m)
    return 1.0 + np.zeros_like(s)


def _canon_k_prime(tag: str, m, s):
    s = np.asarray(s, dtype=float)
    if tag == "wavelike":
        return -2.0 * math.sqrt(m) * sn(s, m) * dn(s, m)
    if tag == "borderline":
        return -2.0 * np.tanh(s) / np.cosh(s)
    if tag == "orbitlike":
        return -2.0 * m * sn(s, m) * cn(s, m)
    return np.zeros_like(s)  # linear, circular


def _shape_like(s, *out):
    if np.ndim(s) == 0:
        return tuple(float(o) for o in out) if len(out) > 1 else float(out[0])
    return out if len(out) > 1 else out[0]


def eval_planar(e: PlanarElastica, s):
    """Point at arclength s (arrays allowed): similarity of the canonical curve."""
    u = np.asarray(s, dtype=float) / e.similarity.scale + e.s0
    x, y = e.similarity.apply(*_canon_point(e.family, e.m, u))
    return _shape_like(s, x, y)


def eval_theta(e: PlanarElastica, s):
    """Tangential angle: d/ds eval_planar = (cos theta, sin theta)."""
    u = np.asarray(s, dtype=float) / e.similarity.scale + e.s0
    th = _canon_theta(e.family, e.m, u)
    if e.similarity.reflect:
        th = -th
    return _shape_like(s, th + e.similarity.rotation)


def eval_k(e: PlanarElastica, s):
    """Signed curvature: d/ds eval_theta."""
    u = np.asarray(s, dtype=float) / e.similarity.scale + e.s0
    k = _canon_k(e.family, e.m, u) / e.similarity.scale
    if e.similarity.reflect:
        k = -k
    return _shape_like(s, k)


def planar_state(e: PlanarElastica, s: float):
    """(gamma, d1, d2, d3) of the curve at s — initial data for the
    position-form ODE.  d2 = k N, d3 = k' N - k^2 d1."""
    Lam = e.similarity.scale
    sgn = -1.0 if e.similarity.reflect else 1.0
    u = s / Lam + e.s0
    th = float(eval_theta(e, s))
    k = float(eval_k(e, s))
    kp = sgn * float(_canon_k_prime(e.family, e.m, u)) / Lam**2
    x, y = eval_planar(e, s)
    d1 = np.array([math.cos(th), math.sin(th)])
    nrm = np.array([-math.sin(th), math.cos(th)])
    return np.array([x, y]), d1, k * nrm, kp * nrm - k * k * d1


# ---------------------------------------------------------------------------
# the leaf

@dataclass(frozen=True)
class Leaf:
    """Half figure-eight: the wavelike arc gamma_w(s - K(m*), m*) on
    s in [0, 2K(m*)].  Both endpoints sit at the origin (closure is exactly
    the condition 2E = K) with vanishing curvature."""

    m: float
    K: float

    @property
    def length(self) -> float:
        return 2.0 * self.K

    def point(self, s):
        u = np.asarray(s, dtype=float) - self.K
        return np.stack(
            [2.0 * _eps_vec(u, self.m) - u, -2.0 * math.sqrt(self.m) * cn(u, self.m)],
            axis=-1,
        )

    def tangent_angle(self, s):
        u = np.asarray(s, dtype=float) - self.K
        return _shape_like(s, 2.0 * np.arcsin(math.sqrt(self.m) * sn(u, self.m)))

    def curvature(self, s):
        u = np.asarray(s, dtype=float) - self.K
        return _shape_like(s, 2.0 * math.sqrt(self.m) * cn(u, self.m))


@lru_cache(maxsize=1)
def canonical_leaf() -> Leaf:
    m = figure_eight_modulus()
    return Leaf(m=m, K=comp_K(m))


def build_leaf(N: int) -> DiscreteCurve:
    """Open polyline with N+1 arclength-uniform samples of the leaf."""
    if N < 2:
        raise DomainError("need N >= 2")
    leaf = canonical_leaf()
    return DiscreteCurve(leaf.point(np.linspace(0.0, leaf.length, N + 1)), closed=False)


# ---------------------------------------------------------------------------
# tangent chains on the sphere and leafed elasticae

def _chain_residual(u: np.ndarray, cpsi: float) -> float:
    dots = np.einsum("ij,ij->i", u, np.roll(u, -1, axis=0))
    return float(np.max(np.abs(dots - cpsi)))


def spherical_chain(r: int, psi: float) -> np.ndarray:
    """r unit 3-vectors u_1..u_r with angle(u_i, u_{i+1 mod r}) = psi.

    r=2 is a planar pair, r=3 the closed-form cone cos^2(alpha) =
    (2 cos psi + 1)/3 over azimuths {0, 2pi/3, 4pi/3}; larger r starts
    from a winding cone and polishes by projected least squares on
    sum_i (<u_i, u_{i+1}> - cos psi)^2.  Raises InfeasibleError when the
    residual cannot be brought below 1e-9 (e.g. r=3 with psi > 2pi/3).
    """
    if r < 2:
        raise DomainError("need r >= 2")
    if not 0.0 < psi < math.pi:
        raise DomainError("need psi in (0, pi)")
    cpsi = math.cos(psi)
    if r == 2:
        half = 0.5 * psi
        return np.array(
            [[math.cos(half), math.sin(half), 0.0], [math.cos(half), -math.sin(half), 0.0]]
        )
    if r == 3:
        # consecutive pairs exhaust all pairs: the chain must be equiangular,
        # which needs the Gram eigenvalue 1 + 2 cos psi >= 0
        c2 = (2.0 * cpsi + 1.0) / 3.0
        if c2 < 0.0:
            raise InfeasibleError(f"no 3-chain at angle {psi:.6g}: 1 + 2 cos psi < 0")
        ca = math.sqrt(c2)
        sa = math.sqrt(1.0 - c2)
        phi = 2.0 * math.pi * np.arange(3) / 3.0
        return np.column_stack([sa * np.cos(phi), sa * np.sin(phi), ca + 0.0 * phi])

    # cone winding k times: consecutive azimuth gap 2 pi k / r
    u = None
    for k in range(1, r // 2 + 1):
        cgap = math.cos(2.0 * math.pi * k / r)
        denom = 1.0 - cgap
        c2 = (cpsi - cgap) / denom
        if 0.0 <= c2 <= 1.0:
            ca, sa = math.sqrt(c2), math.sqrt(1.0 - c2)
            phi = 2.0 * math.pi * k * np.arange(r) / r
            u = np.column_stack([sa * np.cos(phi), sa * np.sin(phi), ca + 0.0 * phi])
            break
    if u is None:
        # no cone fits; start from a jittered polar cap and let the solver try
        phi = 2.0 * math.pi * np.arange(r) / r
        u = np.column_stack([np.cos(phi), np.sin(phi), 0.1 + 0.0 * phi])
        u /= np.linalg.norm(u, axis=1)[:, None]

    step = 0.25
    for _ in range(500):
        if _chain_residual(u, cpsi) < 1e-12:
            break
        e = np.einsum("ij,ij->i", u, np.roll(u, -1, axis=0)) - cpsi
        g = 2.0 * (e[:, None] * np.roll(u, -1, axis=0) + np.roll(e, 1)[:, None] * np.roll(u, 1, axis=0))
        g -= np.einsum("ij,ij->i", g, u)[:, None] * u  # tangent to the sphere
        u = u - step * g
        u /= np.linalg.norm(u, axis=1)[:, None]
    if _chain_residual(u, cpsi) > 1e-9:
        raise InfeasibleError(f"no {r}-chain found at angle {psi:.6g}")
    return u


@dataclass(frozen=True)
class LeafedElastica:
    """r >= 2 canonical leaves joined C^1 at the origin.

    motions[i] places leaf i (zero translation: every leaf passes through
    the origin); chain[i] is leaf i's start tangent, which equals leaf
    (i-1)'s end tangent.
    """

    r: int
    dim: int
    motions: tuple[RigidMotion, ...]
    chain: np.ndarray

    @property
    def total_length(self) -> float:
        return self.r * canonical_leaf().length


def _leaf_end_tangents(dim: int) -> tuple[np.ndarray, np.ndarray]:
    a = 2.0 * math.asin(math.sqrt(figure_eight_modulus()))
    ts = np.array([math.cos(a), -math.sin(a), 0.0][:dim])
    te = np.array([math.cos(a), math.sin(a), 0.0][:dim])
    return ts, te


def _pair_frame(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # orthonormal (bisector, difference, normal) frame of a unit-vector pair
    p = a + b
    q = b - a
    p /= np.linalg.norm(p)
    q /= np.linalg.norm(q)
    return np.column_stack([p, q, np.cross(p, q)])


def build_leafed(r: int, dim: int) -> LeafedElastica:
    """Closed r-leafed elastica in R^dim.

    dim=2 alternates the leaf with its mirror image across the junction
    tangent bisector, giving the (r/2)-fold figure-eight; odd r is
    infeasible in the plane.  dim=3 places leaf i by the unique rotation
    taking the canonical start/end tangent pair to (u_i, u_{i+1}) from
    spherical_chain, keeping each leaf's plane through the pair bisector.
    """
    if r < 2:
        raise DomainError("need r >= 2")
    if dim not in (2, 3):
        raise DomainError("dim must be 2 or 3")
    ts, te = _leaf_end_tangents(dim)
    if dim == 2:
        if r % 2:
            raise InfeasibleError(
                "planar closed leafed elasticae need an even leaf count"
            )
        mirror = np.diag([1.0, -1.0])
        eye = np.eye(2)
        motions = tuple(
            RigidMotion(eye if i % 2 == 0 else mirror, np.zeros(2)) for i in range(r)
        )
        chain = np.array([ts if i % 2 == 0 else te for i in range(r)])
        return LeafedElastica(r=r, dim=2, motions=motions, chain=chain)

    chain = spherical_chain(r, leaf_spread_angle())
    F0 = _pair_frame(ts, te)
    motions = []
    for i in range(r):
        Fi = _pair_frame(chain[i], chain[(i + 1) % r])
        motions.append(RigidMotion(Fi @ F0.T, np.zeros(3)))
    return LeafedElastica(r=r, dim=3, motions=tuple(motions), chain=chain)


def sample_leafed(le: LeafedElastica, n_per_leaf: int) -> DiscreteCurve:
    """Closed polyline with n_per_leaf vertices per leaf (junctions shared)."""
    if n_per_leaf < 3:
        raise DomainError("need n_per_leaf >= 3")
    leaf = canonical_leaf()
    s = np.arange(n_per_leaf) * (leaf.length / n_per_leaf)  # endpoint omitted
    pts = leaf.point(s)
    if le.dim == 3:
        pts = np.column_stack([pts, np.zeros(len(pts))])
    return DiscreteCurve(
        np.vstack([mot.apply(pts) for mot in le.motions]), closed=True
    )


# ---------------------------------------------------------------------------
# classification of closed planar curves

@dataclass(frozen=True)
class ClassifyResult:
    kind: str  # "circle" | "figure_eight" | "not_elastica"
    fold: int  # covering count (0 when not_elastica)
    residual: float  # best rms curvature misfit relative to max |k|


def _cn_shifted(cn_u, sn_u, dn_u, m, b):
    # cn(u - b) via the addition formula, vectorized over u for scalar b
    cb = cn(-b, m)
    sb = sn(-b, m)
    db = dn(-b, m)
    return (cn_u * cb - sn_u * sb * dn_u * db) / (1.0 - m * sn_u**2 * sb**2)


def classify_closed(curve: DiscreteCurve, tol: float = 1e-3) -> ClassifyResult:
    """Classify a closed, arclength-uniform planar curve by its curvature.

    Least-squares fit of the signed discrete curvature to a constant
    (multiply covered circle) and to the figure-eight profile
    2 sqrt(m*)/Lam * cn((s - beta)/Lam, m*) across covering counts;
    accepted when the rms misfit is below tol * max |k|.
    """
    if not curve.closed:
        raise DomainError("classification applies to closed curves")
    if curve.dim != 2:
        raise DomainError("classification applies to planar curves")
    kappa, lbar, s = curvature_data(curve, signed=True)
    L = length(curve)
    w = lbar / L
    kmax = float(np.max(np.abs(kappa)))
    if kmax == 0.0:
        return ClassifyResult("not_elastica", 0, float("inf"))

    kbar = float(np.sum(w * kappa))
    rms_circle = math.sqrt(float(np.sum(w * (kappa - kbar) ** 2)))
    fold_f = abs(kbar) * L / (2.0 * math.pi)
    if rms_circle <= tol * kmax and abs(fold_f - round(fold_f)) < 0.05 and round(fold_f) >= 1:
        return ClassifyResult("circle", int(round(fold_f)), rms_circle / kmax)

    m = figure_eight_modulus()
    K = comp_K(m)
    amp_best = (float("inf"), 0, 0.0)  # (rms, fold, beta)
    for mu in range(1, 9):
        Lam = L / (4.0 * K * mu)
        u = s / Lam
        cn_u, sn_u, dn_u = cn(u, m), sn(u, m), dn(u, m)
        amp = 2.0 * math.sqrt(m) / Lam

        def rms_at(b):
            model = amp * _cn_shifted(cn_u, sn_u, dn_u, m, b)
            return math.sqrt(float(np.sum(w * (kappa - model) ** 2)))

        grid = np.linspace(0.0, 4.0 * K, 129)[:-1]
        vals = [rms_at(b) for b in grid]
        j = int(np.argmin(vals))
        lo, hi = grid[j] - 4.0 * K / 128, grid[j] + 4.0 * K / 128
        gr = 0.5 * (math.sqrt(5.0) - 1.0)
        b1, b2 = hi - gr * (hi - lo), lo + gr * (hi - lo)
        f1, f2 = rms_at(b1), rms_at(b2)
        for _ in range(40):
            if f1 < f2:
                hi, b2, f2 = b2, b1, f1
                b1 = hi - gr * (hi - lo)
                f1 = rms_at(b1)
            else:
                lo, b1, f1 = b1, b2, f2
                b2 = lo + gr * (hi - lo)
                f2 = rms_at(b2)
        rms = min(f1, f2)
        if rms < amp_best[0]:
            amp_best = (rms, mu, 0.5 * (lo + hi))
    if amp_best[0] <= tol * kmax:
        return ClassifyResult("figure_eight", amp_best[1], amp_best[0] / kmax)
    return ClassifyResult(
        "not_elastica", 0, min(rms_circle, amp_best[0]) / kmax
    )


# ---------------------------------------------------------------------------
# Frenet reconstruction from a curvature profile

def reconstruct_spatial(
    p: CurvatureProfile,
    frame0: np.ndarray,
    s_range: tuple[float, float],
    h: float,
) -> DiscreteCurve:
    """Integrate gamma' = T, T' = kN, N' = -kT + tB, B' = -tN from the
    profile's curvature k = sqrt(kappa_sq) and torsion t = c/k^2.

    Classical 4th-order stepping with per-step Gram-Schmidt
    re-orthonormalization of the frame; planar profiles (c = 0) freeze the
    binormal and integrate the unsigned curvature.  frame0 holds rows
    (T0, N0, B0), orthonormal to 1e-12; the curve starts at the origin.
    """
    F = np.array(frame0, dtype=float)
    if F.shape != (3, 3) or not np.allclose(F @ F.T, np.eye(3), atol=1e-12):
        raise DomainError("frame0 must be an orthonormal (T, N, B) triple")
    if not h > 0.0:
        raise DomainError("need h > 0")
    s_min, s_max = map(float, s_range)
    if not s_max > s_min:
        raise DomainError("need s_max > s_min")
    c = profile_c(p)

    def rates(svals: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        k = np.sqrt(np.maximum(kappa_sq(p, svals), 0.0))
        if c == 0.0:
            return k, np.zeros_like(k)
        return k, c / (k * k)

    n = max(1, int(round((s_max - s_min) / h)))
    h = (s_max - s_min) / n
    svals = s_min + h * np.arange(n + 1)
    k_all, t_all = rates(np.repeat(svals, 2)[: 2 * n + 1] + np.tile([0.0, 0.5 * h], n + 1)[: 2 * n + 1])

    def deriv(y: np.ndarray, k: float, t: float) -> np.ndarray:
        g, T, Nv, B = y
        return np.stack([T, k * Nv, -k * T + t * B, -t * Nv])

    y = np.stack([np.zeros(3), F[0], F[1], F[2]])
    out = np.empty((n + 1, 3))
    out[0] = y[0]
    for i in range(n):
        k0, t0 = k_all[2 * i], t_all[2 * i]
        km, tm = k_all[2 * i + 1], t_all[2 * i + 1]
        k1, t1 = k_all[2 * i + 2], t_all[2 * i + 2]
        a1 = deriv(y, k0, t0)
        a2 = deriv(y + 0.5 * h * a1, km, tm)
        a3 = deriv(y + 0.5 * h * a2, km, tm)
        a4 = deriv(y + h * a3, k1, t1)
        y = y + (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        # Gram-Schmidt the frame; the frame is the product here, keep it clean
        T = y[1] / np.linalg.norm(y[1])
        Nv = y[2] - np.dot(y[2], T) * T
        Nv /= np.linalg.norm(Nv)
        B = y[3] - np.dot(y[3], T) * T - np.dot(y[3], Nv) * Nv
        B /= np.linalg.norm(B)
        y = np.stack([y[0], T, Nv, B])
        out[i + 1] = y[0]
    return DiscreteCurve(out, closed=False)
