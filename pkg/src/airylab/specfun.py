"""Airy functions, weighted Hermite functions and the half-oscillator D_n.

Ai and Ai' on the real line use two regimes:

* ``-11.125 <= x < 9.125``: local Taylor expansion about the nearest anchor
  of a 0.25-spaced grid.  Anchor values are produced once, in 50-digit
  decimal arithmetic, by Taylor-stepping the Airy equation outwards from the
  exact values at the origin.
* outside that window: the standard asymptotic expansions (exponential form
  for x > 0, modulus/phase form for x < 0), summed to optimal truncation.

``airy_series_dd`` is an independent, slow reference: the Maclaurin series
summed in double-double arithmetic.
"""
import math
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import lru_cache

import numpy as np

from airylab._dd import DD, quick_two_sum, two_prod, two_sum
from airylab.errors import DomainError

AI0_STR = "0.355028053887817239260063186004183176397979174199177240583327"
AIP0_STR = "-0.258819403792806798405183560189203963479091138354934582210002"

AI0 = float(AI0_STR)
AIP0 = float(AIP0_STR)

_STEP = 0.25
_ANCHOR_LO = -44  # anchor index; x = index * _STEP
_ANCHOR_HI = 36
TAYLOR_MIN = (_ANCHOR_LO - 0.5) * _STEP
TAYLOR_MAX = (_ANCHOR_HI + 0.5) * _STEP
_TAYLOR_TERMS = 26

_SQRT_PI = math.sqrt(math.pi)


def _check_finite(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("Airy functions require finite arguments")
    return arr


def _decimal_step(x0, y, dy, h, eps):
    """Advance (y, y') of y'' = x y from x0 to x0 + h with a Taylor series."""
    coeffs = [y, dy]
    k = 0
    while True:
        nxt = (x0 * coeffs[k] + (coeffs[k - 1] if k > 0 else Decimal(0))) / ((k + 1) * (k + 2))
        coeffs.append(nxt)
        k += 1
        if k > 12 and abs(nxt) * abs(h) ** (k + 1) < eps and abs(coeffs[-2]) * abs(h) ** k < eps:
            break
        if k > 400:
            break
    val = Decimal(0)
    der = Decimal(0)
    hp = Decimal(1)
    for j, c in enumerate(coeffs):
        val += c * hp
        if j + 1 < len(coeffs):
            der += (j + 1) * coeffs[j + 1] * hp
        hp *= h
    return val, der


@lru_cache(maxsize=1)
def _anchors():
    """Ai and Ai' at x = j * 0.25 for j in [_ANCHOR_LO, _ANCHOR_HI]."""
    n = _ANCHOR_HI - _ANCHOR_LO + 1
    ai = np.empty(n)
    aip = np.empty(n)
    with localcontext() as ctx:
        ctx.prec = 50
        eps = Decimal(10) ** -48
        h = Decimal("0.25")
        y0, d0 = Decimal(AI0_STR), Decimal(AIP0_STR)
        ai[-_ANCHOR_LO], aip[-_ANCHOR_LO] = float(y0), float(d0)
        for sign, stop in ((1, _ANCHOR_HI), (-1, -_ANCHOR_LO)):
            y, d = y0, d0
            for j in range(stop):
                x0 = sign * j * h
                y, d = _decimal_step(x0, y, d, sign * h, eps)
                idx = sign * (j + 1) - _ANCHOR_LO
                ai[idx], aip[idx] = float(y), float(d)
    ai.setflags(write=False)
    aip.setflags(write=False)
    return ai, aip


def _airy_taylor(x):
    ai_tab, aip_tab = _anchors()
    j = np.rint(x / _STEP).astype(int)
    x0 = j * _STEP
    h = x - x0
    a_km1 = np.zeros_like(x)
    a_k = ai_tab[j - _ANCHOR_LO].copy()
    a_kp1 = aip_tab[j - _ANCHOR_LO].copy()
    val = a_k + a_kp1 * h
    der = a_kp1.copy()
    hp = h.copy()  # h**k for k = 1
    for k in range(_TAYLOR_TERMS):
        # a_{k+2} = (x0 a_k + a_{k-1}) / ((k+1)(k+2))
        a_kp2 = (x0 * a_k + a_km1) / ((k + 1) * (k + 2))
        der = der + (k + 2) * a_kp2 * hp
        hp = hp * h
        val = val + a_kp2 * hp
        a_km1, a_k, a_kp1 = a_k, a_kp1, a_kp2
    return val, der


@lru_cache(maxsize=1)
def _asym_coefficients(count=60):
    u = [1.0]
    for k in range(1, count):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k))
    v = [1.0] + [-(6 * k + 1) / (6 * k - 1) * u[k] for k in range(1, count)]
    return np.array(u), np.array(v)


def _optimal_sum(coefs, signs, inv, start, stride):
    """Sum sign_k c_k inv**k over k = start, start+stride, ... to optimal truncation."""
    total = np.zeros_like(inv)
    prev = np.full_like(inv, np.inf)
    active = np.ones(inv.shape, dtype=bool)
    for idx, k in enumerate(range(start, len(coefs), stride)):
        term = signs[idx] * coefs[k] * inv ** k
        mag = np.abs(term)
        active &= mag < prev
        total = np.where(active, total + term, total)
        prev = mag
        if not np.any(active & (mag > 1e-18 * np.abs(total))):
            break
    return total


def _airy_asym_pos(x):
    u, v = _asym_coefficients()
    xi = 2.0 / 3.0 * x ** 1.5
    inv = 1.0 / xi
    signs = np.array([(-1) ** k for k in range(len(u))], dtype=float)
    su = _optimal_sum(u, signs, inv, 0, 1)
    sv = _optimal_sum(v, signs, inv, 0, 1)
    pref = np.exp(-xi) / (2.0 * _SQRT_PI)
    q = x ** 0.25
    return pref / q * su, -pref * q * sv


_TWO_THIRDS = (2.0 / 3.0, float(Fraction(2, 3) - Fraction(2.0 / 3.0)))
_TWO_PI = (6.283185307179586, 2.4492935982947064e-16)
_QUARTER_PI = (0.7853981633974483, 3.061616997868383e-17)


def _oscillatory_phase(t):
    """(2/3) t^{3/2} - pi/4 reduced into [-pi, pi], carried in double-double.

    A plain double loses ~ulp(xi) of phase, which for t ~ 100 already
    exceeds the 1e-14 accuracy budget of Ai'.
    """
    s = np.sqrt(t)
    p, e = two_prod(s, s)
    s_lo = ((t - p) - e) / (2.0 * s)
    hi, lo = two_prod(t, s)
    hi, lo = quick_two_sum(hi, lo + t * s_lo)
    p, e = two_prod(hi, _TWO_THIRDS[0])
    e = e + hi * _TWO_THIRDS[1] + lo * _TWO_THIRDS[0]
    hi, lo = quick_two_sum(p, e)
    hi, e = two_sum(hi, -_QUARTER_PI[0])
    lo = lo + e - _QUARTER_PI[1]
    turns = np.rint(hi / _TWO_PI[0])
    p, e = two_prod(turns, _TWO_PI[0])
    r = hi - p
    return r + (lo - e - turns * _TWO_PI[1])


def _airy_asym_neg(x):
    # x < 0; expansions in terms of t = |x|
    u, v = _asym_coefficients()
    t = -x
    xi = 2.0 / 3.0 * t ** 1.5
    inv = 1.0 / xi
    half = len(u) // 2
    signs = np.array([(-1) ** k for k in range(half)], dtype=float)
    ue = _optimal_sum(u, signs, inv, 0, 2)
    uo = _optimal_sum(u, signs, inv, 1, 2)
    ve = _optimal_sum(v, signs, inv, 0, 2)
    vo = _optimal_sum(v, signs, inv, 1, 2)
    phase = _oscillatory_phase(t)
    c, s = np.cos(phase), np.sin(phase)
    q = t ** 0.25
    ai = (c * ue + s * uo) / (_SQRT_PI * q)
    aip = q * (s * ve - c * vo) / _SQRT_PI
    return ai, aip


def airy_pair(x):
    """Return ``(Ai(x), Ai'(x))``; scalar in, scalars out, arrays broadcast."""
    arr = _check_finite(x)
    scalar = arr.ndim == 0
    xs = np.atleast_1d(arr).astype(float)
    ai = np.empty_like(xs)
    aip = np.empty_like(xs)
    mid = (xs >= TAYLOR_MIN) & (xs < TAYLOR_MAX)
    pos = xs >= TAYLOR_MAX
    neg = xs < TAYLOR_MIN
    if mid.any():
        ai[mid], aip[mid] = _airy_taylor(xs[mid])
    if pos.any():
        ai[pos], aip[pos] = _airy_asym_pos(xs[pos])
    if neg.any():
        ai[neg], aip[neg] = _airy_asym_neg(xs[neg])
    if scalar:
        return float(ai[0]), float(aip[0])
    return ai.reshape(arr.shape), aip.reshape(arr.shape)


def airy_ai(x):
    """Ai(x) for finite real x (scalar or array)."""
    return airy_pair(x)[0]


def airy_ai_prime(x):
    """Ai'(x) for finite real x (scalar or array)."""
    return airy_pair(x)[1]


def airy_series_dd(x, max_terms=400):
    """Reference (Ai(x), Ai'(x)) from the Maclaurin series in double-double.

    Slow and only meaningful for moderate |x| (|x| <= ~12); used as an
    accuracy oracle for the production evaluator.
    """
    x = float(x)
    if not math.isfinite(x):
        raise DomainError("Airy functions require finite arguments")
    c1 = DD.from_string(AI0_STR)
    c2 = -DD.from_string(AIP0_STR)
    x3 = DD(x) * x * x
    # f = sum x^{3k} prod, g = sum x^{3k+1} prod; derivatives alongside
    f_term = DD(1.0)
    g_term = DD(x)
    f_sum, g_sum = DD(1.0), DD(x)
    fp_sum, gp_sum = DD(0.0), DD(1.0)
    for k in range(1, max_terms):
        f_term = f_term * x3 / float((3 * k - 1) * (3 * k))
        g_term = g_term * x3 / float((3 * k) * (3 * k + 1))
        f_sum = f_sum + f_term
        g_sum = g_sum + g_term
        if x != 0.0:
            fp_sum = fp_sum + f_term * (3.0 * k) / x
            gp_sum = gp_sum + g_term * (3.0 * k + 1.0) / x
        if k > 5 and abs(f_term.hi) + abs(g_term.hi) < 1e-34 * (abs(f_sum.hi) + abs(g_sum.hi)):
            break
    ai = c1 * f_sum - c2 * g_sum
    aip = c1 * fp_sum - c2 * gp_sum
    return float(ai), float(aip)


class DCoefficient:
    """Exact D_n = 4 (2n+1)! / (4^n (n!)^2) with a float view."""

    __slots__ = ("n", "value")

    def __init__(self, n, value):
        self.n = n
        self.value = value

    @property
    def float(self):
        return float(self.value)

    def __repr__(self):
        return f"DCoefficient(n={self.n}, value={self.value})"


@lru_cache(maxsize=4096)
def d_coefficient(n):
    if n < 0:
        raise DomainError("D_n is defined for n >= 0")
    # equals the product D_0 prod (2j+3)/(2(j+1)); closed form avoids n Fraction steps
    return DCoefficient(n, Fraction(4 * (2 * n + 1) * math.comb(2 * n, n), 4 ** n))


def d_coefficients(count):
    """Float D_0..D_{count-1} via the recurrence D_{k+1} = D_k (2k+3) / (2k+2)."""
    k = np.arange(count - 1, dtype=float)
    ratios = (2 * k + 3) / (2 * k + 2)
    out = np.empty(count)
    out[0] = 4.0
    out[1:] = 4.0 * np.cumprod(ratios)
    return out


# Gamma(x + 1/2) / (sqrt(x) Gamma(x)) in inverse powers of x
_GAMMA_HALF_RATIO = (1.0, -1 / 8, 1 / 128, 5 / 1024, -21 / 32768, -399 / 262144, 869 / 4194304)


def d_continuous(k):
    """Smooth interpolant of D_k for large real k (k >= ~50), via the
    expansion of Gamma(k + 3/2) / Gamma(k + 1)."""
    x = np.asarray(k, dtype=float) + 1.0
    inv = 1.0 / x
    s = np.zeros_like(x)
    for c in reversed(_GAMMA_HALF_RATIO):
        s = s * inv + c
    return 8.0 / _SQRT_PI * np.sqrt(x) * s


def hermite_weighted(n, y):
    """Normalized oscillator eigenfunction c_n H_n(y) exp(-y^2/2).

    Uses the orthonormal-function recurrence with power-of-two rescaling, so
    neither H_n nor the Gaussian is ever formed separately.
    """
    if n < 0:
        raise DomainError("n must be nonnegative")
    arr = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("hermite_weighted requires finite y")
    scalar = arr.ndim == 0
    yy = np.atleast_1d(arr)
    # carry psi = mantissa * 2**expo to stay clear of under/overflow
    log2e = -0.5 * yy * yy / math.log(2.0)
    expo = np.floor(log2e)
    scale = np.exp2(log2e - expo)
    prev = np.zeros_like(yy)
    cur = np.full_like(yy, math.pi ** -0.25) * scale
    for j in range(n):
        nxt = math.sqrt(2.0 / (j + 1)) * yy * cur - math.sqrt(j / (j + 1)) * prev
        prev, cur = cur, nxt
        big = np.abs(cur) > 2.0 ** 500
        if big.any():
            prev = np.where(big, prev * 2.0 ** -500, prev)
            cur = np.where(big, cur * 2.0 ** -500, cur)
            expo = np.where(big, expo + 500, expo)
    out = np.ldexp(cur, expo.astype(int))
    return float(out[0]) if scalar else out.reshape(arr.shape)
