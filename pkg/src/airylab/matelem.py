"""Matrix elements and moments.

Closed forms for integrals of Airy-function products over [0, inf), the
surface-term recursions for power-law matrix elements (Airy and oscillator
variants), half-oscillator formulas, and an independent quadrature oracle.

Conventions: rho = beta = 1; symmetric-linear matrix elements are over the
whole line with the phases fixed by ``spectra.normalization``; bouncer and
half-SHO elements are over the half-line.
"""
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from airylab.errors import ArgumentError, DomainError
from airylab.quadrature import QuadratureConfig, adaptive_integrate
from airylab.spectra import (
    Parity,
    SpectralPoint,
    SystemId,
    ZeroKind,
    airy_zero,
    boundary_value,
    normalization,
    turning_point,
    wavefunction,
)
from airylab.specfun import airy_pair

# --- Airy product integrals -------------------------------------------------


def _f_terms(zeta, a, b):
    ai_a, aip_a = airy_pair(np.asarray(zeta) - a)
    ai_b, aip_b = airy_pair(np.asarray(zeta) - b)
    return (
        ai_a * ai_b,
        aip_a * ai_b - ai_a * aip_b,
        aip_a * ai_b + ai_a * aip_b,
        aip_a * aip_b,
    )


def _coincident(a, b):
    return abs(a - b) <= 1e-7 * max(1.0, abs(a), abs(b))


def airy_product_antiderivative(p, zeta, a, b):
    """Indefinite integral of zeta^p Ai(zeta - a) Ai(zeta - b).

    ``a == b`` selects the equal-shift forms; distinct shifts use the
    off-diagonal forms.  Vectorized in ``zeta``.
    """
    if p not in (0, 1, 2):
        raise ArgumentError("closed forms exist for p = 0, 1, 2; use the moment recursion")
    z = np.asarray(zeta, dtype=float)
    f1, f2, f3, f4 = _f_terms(z, a, b)
    if a == b:
        s = a
        if p == 0:
            return (z - s) * f1 - f4
        if p == 1:
            return (z * z + s * z - 2 * s * s) / 3 * f1 + f3 / 6 - (z + 2 * s) / 3 * f4
        return (
            (3 * z**3 + s * z**2 + 4 * s * s * z - 8 * s**3 - 3) / 15 * f1
            + (3 * z + 2 * s) / 15 * f3
            - (3 * z * z + 4 * s * z + 8 * s * s) / 15 * f4
        )
    if _coincident(a, b):
        raise DomainError("nearly coincident shifts: distinct-shift form is ill-conditioned")
    d = a - b
    s = a + b
    if p == 0:
        return f2 / (b - a)
    if p == 1:
        return (s - 2 * z) / d**2 * f1 + (z / (b - a) + 2 / (b - a) ** 3) * f2 + 2 / d**2 * f4
    return (
        (12 * s / d**4 + 2 * (-12 + s * d * d) / d**4 * z - 4 / d**2 * z * z) * f1
        + (4 * (-6 + s * d * d) / d**5 - 12 / d**3 * z - z * z / d) * f2
        - 2 / d**2 * f3
        + (24 / d**4 + 4 / d**2 * z) * f4
    )


@dataclass(frozen=True)
class AiryProductIntegralResult:
    p: int
    shift_a: float
    shift_b: float
    value: float
    f_terms: tuple


def airy_product_integral(p, shift_a, shift_b):
    """int_0^inf zeta^p Ai(zeta - a) Ai(zeta - b) d zeta from the closed forms.

    The upper-limit contribution vanishes by Airy decay, so the integral is
    minus the antiderivative at zeta = 0.
    """
    if shift_a <= 0 or shift_b <= 0:
        raise DomainError("shifts must be positive")
    value = -float(airy_product_antiderivative(p, 0.0, shift_a, shift_b))
    terms = tuple(float(t) for t in _f_terms(0.0, shift_a, shift_b))
    return AiryProductIntegralResult(p, shift_a, shift_b, value, terms)


def gordon_integral(p, shift_a, shift_b):
    return airy_product_integral(p, shift_a, shift_b).value


def derivative_integral(shift):
    """int_0^inf [Ai'(zeta - shift)]^2 d zeta."""
    if shift <= 0:
        raise DomainError("shift must be positive")
    ai, aip = airy_pair(-shift)
    f1, f3, f4 = ai * ai, 2 * ai * aip, aip * aip
    # minus the antiderivative -(z-s)^2/3 F1 + F3/3 + (z-s)/3 F4 at z = 0
    return -(-(shift**2) / 3 * f1 + f3 / 3 - shift / 3 * f4)


def _linear_sign(state):
    return -1 if state.parity is Parity.ODD else 1


def linear_matrix_element(p, state_a, state_b):
    """<a| y^p |b> for two symmetric-linear states (or two bouncer states), p <= 2."""
    systems = {state_a.system, state_b.system}
    if systems == {SystemId.BOUNCER}:
        factor = 1.0
    elif systems == {SystemId.SYMMETRIC_LINEAR}:
        # integrand parity; odd integrands vanish over the line
        if _linear_sign(state_a) * _linear_sign(state_b) * (-1) ** p < 0:
            return 0.0
        factor = 2.0
    else:
        raise DomainError("both states must belong to the same linear-potential system")
    norm = normalization(state_a) * normalization(state_b)
    return factor * norm * gordon_integral(p, state_a.lam, state_b.lam)


def dipole_linear(n_odd, k_even):
    """<psi_n^- | z | psi_k^+> = -2 / (sqrt(eta_k) (eta_k - zeta_n)^3)."""
    zeta = airy_zero(ZeroKind.AI, n_odd)
    eta = airy_zero(ZeroKind.AI_PRIME, k_even)
    return -2.0 / (math.sqrt(eta) * (eta - zeta) ** 3)


def even_even_z2(n, k):
    """<psi_n^+ | z^2 | psi_k^+> for n != k."""
    if n == k:
        raise ArgumentError("off-diagonal formula; use the moment expression for n == k")
    en = airy_zero(ZeroKind.AI_PRIME, n)
    ek = airy_zero(ZeroKind.AI_PRIME, k)
    return -12.0 * (en + ek) / (math.sqrt(en * ek) * (en - ek) ** 4)


def bouncer_dipole(n, k):
    """<n|y|k> for normalized bouncer states, n != k."""
    zn = airy_zero(ZeroKind.AI, n)
    zk = airy_zero(ZeroKind.AI, k)
    return -2.0 / (zn - zk) ** 2


def virial_ratios(parity, n):
    """(<V>/E, <T>/E) for a symmetric-linear state from the closed forms."""
    state = SpectralPoint(SystemId.SYMMETRIC_LINEAR, n, Parity(parity))
    lam = state.lam
    norm2 = normalization(state) ** 2
    potential = 2.0 * norm2 * gordon_integral(1, lam, lam)
    kinetic = 2.0 * norm2 * derivative_integral(lam)
    return potential / lam, kinetic / lam


# --- moment recursion -------------------------------------------------------


@dataclass(frozen=True)
class MomentExpression:
    """sum_i c_i lam^(e_i): a closed form for <y^p> on the half-line."""

    parity: Parity
    p: int
    terms: tuple  # ((Fraction, exponent), ...), exponents strictly decreasing

    def __post_init__(self):
        exps = [e for _, e in self.terms]
        if any(e1 <= e2 for e1, e2 in zip(exps, exps[1:])):
            raise ArgumentError("exponents must be strictly decreasing")
        if self.terms and (exps[0] != self.p or any((self.p - e) % 3 for e in exps)):
            raise ArgumentError("exponents must be p, p-3, p-6, ...")

    def evaluate(self, lam):
        return math.fsum(float(c) * lam**e for c, e in self.terms)

    def coefficient(self, exponent):
        return dict((e, c) for c, e in self.terms).get(exponent, Fraction(0))

    def to_json(self):
        return {
            "parity": self.parity.value,
            "p": self.p,
            "terms": [{"num": c.numerator, "den": c.denominator, "exp": e} for c, e in self.terms],
        }

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        terms = tuple((Fraction(t["num"], t["den"]), t["exp"]) for t in data["terms"])
        return cls(Parity(data["parity"]), data["p"], terms)

    def __str__(self):
        sym = "zeta" if self.parity is Parity.ODD else "eta"
        parts = []
        for c, e in self.terms:
            if e == 0:
                parts.append(f"{c}")
            elif e == 1:
                parts.append(f"({c})*{sym}")
            else:
                parts.append(f"({c})*{sym}^{e}")
        return " + ".join(parts) if parts else "0"


def _add(poly, other, scale):
    for e, c in other.items():
        poly[e] = poly.get(e, Fraction(0)) + scale * c


def _shift(poly, by):
    return {e + by: c for e, c in poly.items()}


@lru_cache(maxsize=8)
def _moment_polys(parity, max_p):
    """Normalized half-line moments m_q as {exponent: Fraction}, q = 0..max_p.

    From the surface-term identity with f = zeta^q and equal states:
      (4q^2 - 2q) m_{q-1} = q(q-1)(q-2)(q-3) m_{q-4} + 4 lam q(q-1) m_{q-2} - r_q
    where r_q is the normalized surface term: odd states (Ai(-lam) = 0) give
    r_1 = -2; even states (Ai'(-lam) = 0) give r_1 = -2 and r_3 = -6/lam.
    """
    moments = {0: {0: Fraction(1)}}
    for q in range(2, max_p + 2):
        rhs = {}
        if q >= 4:
            _add(rhs, moments[q - 4], Fraction(q * (q - 1) * (q - 2) * (q - 3)))
        _add(rhs, _shift(moments[q - 2], 1), Fraction(4 * q * (q - 1)))
        if parity is Parity.EVEN and q == 3:
            _add(rhs, {-1: Fraction(1)}, Fraction(6))
        moments[q - 1] = {e: c / (4 * q * q - 2 * q) for e, c in rhs.items() if c != 0}
    return moments


def moment_expression(parity, p):
    parity = Parity(parity)
    if parity is Parity.NONE:
        raise ArgumentError("parity must be even or odd")
    poly = _moment_polys(parity, max(p, 1))[p]
    terms = tuple(sorted(((c, e) for e, c in poly.items()), key=lambda t: -t[1]))
    return MomentExpression(parity, p, terms)


def moment_recursion_airy(parity, max_p):
    """Exact <y^p>, p = 1..max_p, for normalized half-line Airy states."""
    if max_p < 1:
        raise ArgumentError("max_p must be >= 1")
    _moment_polys(Parity(parity), max_p)
    return [moment_expression(parity, p) for p in range(1, max_p + 1)]


# --- oscillator --------------------------------------------------------------


def sho_ladder_element(q, n, m):
    """<n| y^q |m> for the full oscillator from the ladder-operator algebra."""
    if q < 0 or n < 0 or m < 0:
        raise ArgumentError("indices must be nonnegative")
    vec = {m: 1.0}
    for _ in range(q):
        nxt = {}
        for j, c in vec.items():
            # y |j> = sqrt(j/2) |j-1> + sqrt((j+1)/2) |j+1>
            if j > 0:
                nxt[j - 1] = nxt.get(j - 1, 0.0) + c * math.sqrt(j / 2)
            nxt[j + 1] = nxt.get(j + 1, 0.0) + c * math.sqrt((j + 1) / 2)
        vec = nxt
    return vec.get(n, 0.0)


def dipole_half_sho(n, m):
    """<psi~_m| y |psi~_n> = -psi~_n'(0) psi~_m'(0) / (2 [4 (n-m)^2 - 1])."""
    if n < 0 or m < 0:
        raise ArgumentError("indices must be nonnegative")
    slopes = _slope(n) * _slope(m)
    return -slopes / (2.0 * (4 * (n - m) ** 2 - 1))


def _slope(n):
    return boundary_value(SpectralPoint(SystemId.HALF_SHO, n))


def half_sho_y2(n, k):
    """Nearest-neighbour <psi~_n| y^2 |psi~_k>."""
    if n == k:
        return (4 * k + 3) / 2.0
    if n == k - 1:
        return math.sqrt((2 * k + 1) * (2 * k)) / 2.0
    if n == k + 1:
        return math.sqrt((2 * k + 2) * (2 * k + 3)) / 2.0
    return 0.0


def half_sho_y3(n, k):
    """<psi~_n| y^3 |psi~_k> = -6 (2n+2k+3) / [4(n-k)^2 - 9] <psi~_n| y |psi~_k>."""
    d2 = 4 * (n - k) ** 2
    return -6.0 * (2 * n + 2 * k + 3) / (d2 - 9) * dipole_half_sho(n, k)


def oscillator_recursion(q, n, m, system=SystemId.HALF_SHO):
    """<n| y^q |m> from the oscillator surface-term recursion.

    With f = y^q the identity reads
      (Delta^2 - 4 q^2) I_q = J_q - q(q-1)(q-2)(q-3) I_{q-4} - 4 eps_ave q(q-1) I_{q-2},
    Delta = eps_n - eps_m.  For the half-SHO only the -2 f'(0) psi_n'(0) psi_m'(0)
    surface term survives; over the full line there are none.  Where
    Delta^2 = 4 q^2 the identity is silent about I_q; those band-edge elements
    are taken from the ladder algebra (even q only; odd q never hits it for
    the half-SHO).
    """
    if q < 0:
        raise ArgumentError("q must be >= 0")
    system = SystemId(system)
    if system not in (SystemId.HALF_SHO, SystemId.FULL_SHO):
        raise DomainError("oscillator_recursion handles oscillator systems only")
    return _osc(q, n, m, system)


@lru_cache(maxsize=None)
def _osc(q, n, m, system):
    if n < 0 or m < 0:
        raise ArgumentError("indices must be nonnegative")
    if q < 0:
        return 0.0
    half = system is SystemId.HALF_SHO
    if half:
        eps_n, eps_m = 4 * n + 3, 4 * m + 3
    else:
        eps_n, eps_m = 2 * n + 1, 2 * m + 1
    if q == 0:
        return 1.0 if n == m else 0.0
    delta = eps_n - eps_m
    denom = delta * delta - 4 * q * q
    if denom == 0:
        if half:
            if q % 2:
                raise ArgumentError("recursion needs an unavailable base case")
            return sho_ladder_element(q, 2 * n + 1, 2 * m + 1)
        return sho_ladder_element(q, n, m)
    surface = 0.0
    if half and q == 1:
        surface = -2.0 * _slope(n) * _slope(m)
    eps_ave = 0.5 * (eps_n + eps_m)
    rest = q * (q - 1) * (q - 2) * (q - 3) * _osc(q - 4, n, m, system) if q >= 4 else 0.0
    rest += 4 * eps_ave * q * (q - 1) * _osc(q - 2, n, m, system) if q >= 2 else 0.0
    return (surface - rest) / denom


# --- quadrature oracle -----------------------------------------------------


def _integration_limit(states, margin):
    return max(turning_point(s) for s in states) + margin


def _breakpoints(upper, tps, width):
    pts = set(np.arange(0.0, upper, width).tolist()) | {upper}
    for tp in tps:
        # dyadic refinement towards each turning point
        for j in range(1, 6):
            for sgn in (-1, 1):
                x = tp + sgn * width / 2**j
                if 0 < x < upper:
                    pts.add(x)
    return np.array(sorted(pts))


def quad_matrix_element(system, p, state_a, state_b, cfg=QuadratureConfig()):
    """<a| y^p |b> by adaptive Gauss-Legendre quadrature of the wavefunctions.

    Symmetric-linear and full-SHO integrals run over the line via parity
    (twice the half-line integral, or zero); bouncer and half-SHO over the
    half-line.
    """
    system = SystemId(system)
    if state_a.system is not system or state_b.system is not system:
        raise DomainError("states must belong to the requested system")
    if p < 0:
        raise ArgumentError("p must be >= 0")
    factor = 1.0
    if system is SystemId.SYMMETRIC_LINEAR:
        if _linear_sign(state_a) * _linear_sign(state_b) * (-1) ** p < 0:
            return 0.0
        factor = 2.0
    elif system is SystemId.FULL_SHO:
        if (state_a.n + state_b.n + p) % 2:
            return 0.0
        factor = 2.0
    upper = _integration_limit((state_a, state_b), cfg.margin)
    tps = [turning_point(state_a), turning_point(state_b)]

    def integrand(y):
        return y**p * wavefunction(state_a, y) * wavefunction(state_b, y)

    value, _ = adaptive_integrate(
        integrand, _breakpoints(upper, tps, cfg.panel_width), cfg.rtol, cfg.order, cfg.max_level
    )
    return factor * value


def quad_airy_integral(p, shift_a, shift_b, cfg=QuadratureConfig()):
    """int_0^inf zeta^p Ai(zeta - a) Ai(zeta - b) by quadrature (no closed forms)."""
    upper = max(shift_a, shift_b) + cfg.margin

    def integrand(z):
        return z**p * airy_pair(z - shift_a)[0] * airy_pair(z - shift_b)[0]

    value, _ = adaptive_integrate(
        integrand, _breakpoints(upper, [shift_a, shift_b], cfg.panel_width), cfg.rtol, cfg.order
    )
    return value


def quad_half_line_moment(parity, p, n, cfg=QuadratureConfig()):
    """Normalized half-line <y^p> of Ai(y - lam_n) by quadrature alone."""
    kind = ZeroKind.AI if Parity(parity) is Parity.ODD else ZeroKind.AI_PRIME
    lam = airy_zero(kind, n)
    return quad_airy_integral(p, lam, lam, cfg) / quad_airy_integral(0, lam, lam, cfg)


def quad_derivative_integral(shift, cfg=QuadratureConfig()):
    upper = shift + cfg.margin

    def integrand(z):
        return airy_pair(z - shift)[1] ** 2

    value, _ = adaptive_integrate(
        integrand, _breakpoints(upper, [shift], cfg.panel_width), cfg.rtol, cfg.order
    )
    return value
