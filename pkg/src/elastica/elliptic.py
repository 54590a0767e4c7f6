"""Jacobi elliptic integrals and elliptic functions, parameter convention.

Everything here is indexed by the *parameter* m = k^2 in [0, 1] (not the
modulus k).  Definitions:

    F(x, m) = integral_0^x (1 - m sin^2 t)^(-1/2) dt      (first kind)
    E(x, m) = integral_0^x (1 - m sin^2 t)^(+1/2) dt      (second kind)
    K(m) = F(pi/2, m),   E(m) = E(pi/2, m)                (complete)
    am(x, m) = inverse of F(., m),  sn = sin(am),  cn = cos(am),
    dn = sqrt(1 - m sn^2)

Algorithms: complete integrals by the arithmetic-geometric mean, incomplete
ones by Carlson symmetric-form duplication (R_F, R_D), sn/cn/dn by a
descending Landen/AGM chain with a trigonometric base case, and am by a
safeguarded Newton iteration on F.  All are quadratically convergent and
well-conditioned as m -> 1.

Accuracy contract: absolute error <= 1e-12 for m <= 1 - 1e-9 and |x| <= 100.
Operations built on K (F, K, am, and sn/cn/dn away from m = 1) refuse
parameters beyond that cutoff instead of silently degrading; comp_E accepts
all of [0, 1], and sn/cn/dn additionally accept m = 1 exactly (hyperbolic
closed forms).

All functions are pure; scalar in, scalar out.  `sncndn` (and the three
single-value wrappers) also broadcast over numpy arrays in x for fixed m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "M_MAX",
    "DK_DM_AT_ZERO",
    "DE_DM_AT_ZERO",
    "EllipticValue",
    "ellint_F",
    "ellint_E_inc",
    "comp_K",
    "comp_E",
    "am",
    "sn",
    "cn",
    "dn",
    "sncndn",
    "jacobi_epsilon",
    "dK_dm",
    "dE_dm",
    "ellint_F_with_error",
    "ellint_E_inc_with_error",
    "comp_K_with_error",
    "comp_E_with_error",
]

#: K-type operations reject m above this (K has a log singularity at m = 1).
M_MAX = 1.0 - 1e-9

#: limits of dK_dm / dE_dm as m -> 0+ (the closed forms are 0/0 there)
DK_DM_AT_ZERO = math.pi / 8.0
DE_DM_AT_ZERO = -math.pi / 8.0

_EPS = float(np.finfo(float).eps)

# pi = fl(pi) + _PI_TAIL; needed to reduce x mod pi without losing the
# ~1e-16 tail, which the (1 - m sin^2)^(-1/2) weight can amplify near m -> 1
_PI_TAIL = 1.2246467991473532e-16

# AGM chain truncation for sn/cn/dn; resulting error ~ _CA^2
_CA = 1.0e-8


@dataclass(frozen=True)
class EllipticValue:
    """A computed value together with an a-priori absolute error bound."""

    value: float
    est_abs_error: float


def _require_finite(x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"argument must be finite, got {x!r}")
    return x


def _require_m_complete(m: float) -> float:
    """Parameter domain for E-type operations: the closed interval [0, 1]."""
    m = float(m)
    if not 0.0 <= m <= 1.0:
        raise DomainError(f"parameter m={m!r} outside [0, 1]")
    return m


def _require_m_for_K(m: float) -> float:
    """Parameter domain for K-type operations: [0, 1 - 1e-9]."""
    m = float(m)
    if not 0.0 <= m <= M_MAX:
        raise DomainError(
            f"parameter m={m!r} outside [0, {M_MAX}]; K-type evaluations "
            "are not supported closer to the m=1 singularity"
        )
    return m


# ---------------------------------------------------------------------------
# Carlson symmetric forms (duplication method)

def _rf(x: float, y: float, z: float) -> float:
    """Carlson R_F(x, y, z); args >= 0, at most one of them zero."""
    xt, yt, zt = x, y, z
    while True:
        sx, sy, sz = math.sqrt(xt), math.sqrt(yt), math.sqrt(zt)
        lam = sx * (sy + sz) + sy * sz
        xt, yt, zt = 0.25 * (xt + lam), 0.25 * (yt + lam), 0.25 * (zt + lam)
        ave = (xt + yt + zt) / 3.0
        dx = (ave - xt) / ave
        dy = (ave - yt) / ave
        dz = (ave - zt) / ave
        # series truncation error ~ ERRTOL^6 ~ 2e-16 relative
        if max(abs(dx), abs(dy), abs(dz)) <= 0.0025:
            break
    e2 = dx * dy - dz * dz
    e3 = dx * dy * dz
    return (1.0 + (e2 / 24.0 - 0.1 - 3.0 * e3 / 44.0) * e2 + e3 / 14.0) / math.sqrt(ave)


def _rd(x: float, y: float, z: float) -> float:
    """Carlson R_D(x, y, z); x, y >= 0 (at most one zero), z > 0."""
    xt, yt, zt = x, y, z
    total = 0.0
    fac = 1.0
    while True:
        sx, sy, sz = math.sqrt(xt), math.sqrt(yt), math.sqrt(zt)
        lam = sx * (sy + sz) + sy * sz
        total += fac / (sz * (zt + lam))
        fac *= 0.25
        xt, yt, zt = 0.25 * (xt + lam), 0.25 * (yt + lam), 0.25 * (zt + lam)
        ave = 0.2 * (xt + yt + 3.0 * zt)
        dx = (ave - xt) / ave
        dy = (ave - yt) / ave
        dz = (ave - zt) / ave
        if max(abs(dx), abs(dy), abs(dz)) <= 0.0015:
            break
    ea = dx * dy
    eb = dz * dz
    ec = ea - eb
    ed = ea - 6.0 * eb
    ee = ed + ec + ec
    c1, c2, c3, c4 = 3.0 / 14.0, 1.0 / 6.0, 9.0 / 22.0, 3.0 / 26.0
    s = 1.0 + ed * (-c1 + 0.25 * c3 * ed - 1.5 * c4 * dz * ee) \
        + dz * (c2 * ee + dz * (-c3 * ec + dz * c4 * ea))
    return 3.0 * total + fac * s / (ave * math.sqrt(ave))


# ---------------------------------------------------------------------------
# Complete integrals (AGM)

def comp_K(m: float) -> float:
    """Complete elliptic integral of the first kind, K(m) = F(pi/2, m)."""
    m = _require_m_for_K(m)
    if m == 0.0:
        return math.pi / 2.0
    a, b = 1.0, math.sqrt(1.0 - m)
    for _ in range(40):
        if abs(a - b) <= _EPS * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (a + b)


def comp_E(m: float) -> float:
    """Complete elliptic integral of the second kind, E(m) = E(pi/2, m)."""
    m = _require_m_complete(m)
    if m == 1.0:
        return 1.0
    if m == 0.0:
        return math.pi / 2.0
    # E = K * (1 - sum_n 2^(n-1) c_n^2) with c_0 = sqrt(m), c_{n+1} = (a-b)/2
    a, b = 1.0, math.sqrt(1.0 - m)
    csum = 0.5 * m
    p = 0.5
    for _ in range(40):
        if abs(a - b) <= _EPS * a:
            break
        c = 0.5 * (a - b)
        p *= 2.0
        csum += p * c * c
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (a + b) * (1.0 - csum)


# ---------------------------------------------------------------------------
# Incomplete integrals (Carlson) with quasi-period reduction

def _reduce_pi(x: float) -> tuple[float, float]:
    """Write x = x0 + n*pi with x0 in [-pi/2, pi/2]; returns (x0, n)."""
    if abs(x) <= math.pi / 2.0:
        return x, 0.0
    r = math.remainder(x, math.pi)  # exact: x - n*fl(pi)
    n = round((x - r) / math.pi)
    return r - n * _PI_TAIL, float(n)


def _F_principal(phi: float, m: float) -> float:
    # |phi| <= pi/2 (+ a few ulp); no reduction
    s, c = math.sin(phi), math.cos(phi)
    if s == 0.0:
        return 0.0
    return s * _rf(c * c, 1.0 - m * s * s, 1.0)


def _E_principal(phi: float, m: float) -> float:
    s, c = math.sin(phi), math.cos(phi)
    if s == 0.0:
        return 0.0
    cc, q = c * c, 1.0 - m * s * s
    return s * (_rf(cc, q, 1.0) - (m / 3.0) * s * s * _rd(cc, q, 1.0))


def ellint_F(x: float, m: float) -> float:
    """Incomplete elliptic integral of the first kind F(x, m)."""
    x = _require_finite(x)
    m = _require_m_for_K(m)
    x0, n = _reduce_pi(x)
    f0 = _F_principal(x0, m)
    if n == 0.0:
        return f0
    return f0 + 2.0 * n * comp_K(m)


def ellint_E_inc(x: float, m: float) -> float:
    """Incomplete elliptic integral of the second kind E(x, m)."""
    x = _require_finite(x)
    m = _require_m_for_K(m)
    x0, n = _reduce_pi(x)
    e0 = _E_principal(x0, m)
    if n == 0.0:
        return e0
    return e0 + 2.0 * n * comp_E(m)


# ---------------------------------------------------------------------------
# Amplitude (Newton on F with bisection safeguard)

def am(x: float, m: float) -> float:
    """Jacobi amplitude: the inverse of F(., m), so F(am(x, m), m) = x."""
    x = _require_finite(x)
    m = _require_m_for_K(m)
    if m == 0.0:
        return x
    K = comp_K(m)
    n = math.floor(x / (2.0 * K) + 0.5)
    x0 = x - 2.0 * K * n
    half_pi = 0.5 * math.pi
    lo, hi = -half_pi, half_pi
    phi = half_pi * x0 / K
    tol = 4.0 * _EPS * max(1.0, abs(x0))
    for _ in range(60):
        f = _F_principal(phi, m) - x0
        if abs(f) <= tol:
            break
        if f < 0.0:
            lo = phi
        else:
            hi = phi
        s = math.sin(phi)
        step = -f * math.sqrt(max(1.0 - m * s * s, 0.0))
        nxt = phi + step
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)  # bisection fallback
        if nxt == phi:
            break
        phi = nxt
    return phi + n * math.pi


def jacobi_epsilon(x: float, m: float) -> float:
    """E(am(x, m), m), the Jacobi epsilon function (arclength of the ellipse)."""
    x = _require_finite(x)
    m = _require_m_for_K(m)
    K = comp_K(m)
    n = math.floor(x / (2.0 * K) + 0.5)
    x0 = x - 2.0 * K * n
    out = _E_principal(am(x0, m), m)
    if n:
        out += 2.0 * n * comp_E(m)
    return out


# ---------------------------------------------------------------------------
# sn / cn / dn (descending Landen / AGM chain)

def _landen_chain(m: float) -> tuple[list[float], list[float], float]:
    # arithmetic (a_i) and geometric (b_i) legs of the AGM for 1, sqrt(1-m),
    # terminated when the relative gap drops below _CA; final midpoint last
    emc = 1.0 - m
    a = 1.0
    aa: list[float] = []
    bb: list[float] = []
    c = 0.0
    for _ in range(14):
        aa.append(a)
        emc = math.sqrt(emc)
        bb.append(emc)
        c = 0.5 * (a + emc)
        if abs(a - emc) <= _CA * a:
            break
        emc *= a
        a = c
    return aa, bb, c


def sncndn(x, m: float):
    """All three Jacobi elliptic functions at once: (sn, cn, dn).

    x may be a float or a numpy array; m is a scalar parameter in
    [0, 1 - 1e-9] or exactly 1.
    """
    m = float(m)
    if m == 1.0:
        pass  # hyperbolic closed forms below
    else:
        _require_m_for_K(m)
    arr = isinstance(x, np.ndarray)
    u = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(u)):
        raise DomainError("argument must be finite")
    if m == 1.0:
        sech = 1.0 / np.cosh(u)
        s, c, d = np.tanh(u), sech, sech.copy()
    elif m == 0.0:
        s, c, d = np.sin(u), np.cos(u), np.ones_like(u)
    else:
        aa, bb, cmid = _landen_chain(m)
        v = cmid * u
        s, c = np.sin(v), np.cos(v)
        d = np.ones_like(v)
        zero = s == 0.0  # only hit at v == 0 in floats; there sn=0, cn=dn=1
        a = c / np.where(zero, 1.0, s)
        cc = cmid * a
        for ai, bi in zip(reversed(aa), reversed(bb)):
            a = a * cc
            cc = cc * d
            d = (bi + a) / (ai + a)
            a = cc / ai
        amp = 1.0 / np.sqrt(cc * cc + 1.0)
        s_out = np.where(s >= 0.0, amp, -amp)
        c_out = cc * s_out
        s = np.where(zero, 0.0, s_out)
        c = np.where(zero, 1.0, c_out)
        d = np.where(zero, 1.0, d)
    if arr:
        return s, c, d
    return float(s), float(c), float(d)


def sn(x, m: float):
    """Jacobi elliptic sine sn(x, m) = sin(am(x, m))."""
    return sncndn(x, m)[0]


def cn(x, m: float):
    """Jacobi elliptic cosine cn(x, m) = cos(am(x, m))."""
    return sncndn(x, m)[1]


def dn(x, m: float):
    """Jacobi delta amplitude dn(x, m) = sqrt(1 - m sn^2)."""
    return sncndn(x, m)[2]


# ---------------------------------------------------------------------------
# Parameter derivatives

def dK_dm(m: float) -> float:
    """dK/dm = (E - (1-m)K) / (2m(1-m)) for m in (0, 1).

    The closed form is 0/0 at m = 0 (limit pi/8, see DK_DM_AT_ZERO) and
    singular at m = 1; both endpoints raise.  For m below ~1e-6 the numerator
    cancellation costs a few digits (relative error ~1e-10).
    """
    m = float(m)
    if not 0.0 < m < 1.0:
        raise DomainError(f"dK_dm needs m in (0, 1), got {m!r}")
    if m > M_MAX:
        raise DomainError(f"dK_dm not supported above m = {M_MAX}")
    K, E = comp_K(m), comp_E(m)
    return (E - (1.0 - m) * K) / (2.0 * m * (1.0 - m))


def dE_dm(m: float) -> float:
    """dE/dm = (E - K) / (2m) for m in (0, 1); limit -pi/8 at m = 0."""
    m = float(m)
    if not 0.0 < m < 1.0:
        raise DomainError(f"dE_dm needs m in (0, 1), got {m!r}")
    if m > M_MAX:
        raise DomainError(f"dE_dm not supported above m = {M_MAX}")
    return (comp_E(m) - comp_K(m)) / (2.0 * m)


# ---------------------------------------------------------------------------
# Error-estimating variants
#
# The estimates are a-priori bounds: Carlson duplication truncates at
# ~2e-16 relative, the AGM terminates at machine epsilon, and quasi-period
# assembly rounds once per term — eps*(2|v| + 4|n|*period + 2) covers the
# principal evaluation, the |2n| period multiples, and the final additions,
# and stays below 1e-12 over the whole contract domain (|x| <= 100,
# m <= 1 - 1e-9, where |n| <= 32 and K <= 11.75).

def comp_K_with_error(m: float) -> EllipticValue:
    v = comp_K(m)
    return EllipticValue(v, 8.0 * _EPS * max(1.0, v))


def comp_E_with_error(m: float) -> EllipticValue:
    v = comp_E(m)
    return EllipticValue(v, 8.0 * _EPS * max(1.0, v))


def ellint_F_with_error(x: float, m: float) -> EllipticValue:
    v = ellint_F(x, m)
    _, n = _reduce_pi(float(x))
    period = comp_K(m) if n else 0.0
    return EllipticValue(v, _EPS * (2.0 * abs(v) + 4.0 * abs(n) * period + 2.0))


def ellint_E_inc_with_error(x: float, m: float) -> EllipticValue:
    v = ellint_E_inc(x, m)
    _, n = _reduce_pi(float(x))
    period = comp_E(m) if n else 0.0
    return EllipticValue(v, _EPS * (2.0 * abs(v) + 4.0 * abs(n) * period + 2.0))
