"""Semiclassical densities and moments, Stark shifts (closed form, WKB and
second-order perturbation sums) and the WKB/PT comparison series.

Units: linear systems report energies in (Fbar/F)^2 E_0 with E_0 = rho F;
oscillators report first-order shifts in Fbar beta and second-order shifts
in Fbar^2 / (m omega^2).
"""
import csv
import enum
import io
import math
from dataclasses import dataclass

import numpy as np

from airylab.errors import ArgumentError, DomainError
from airylab.matelem import moment_expression
from airylab.quadrature import gauss_legendre
from airylab.spectra import Parity, SpectralPoint, SystemId, ZeroKind, airy_zero, asymptotic_zero, wavefunction, zero_table
from airylab.specfun import d_coefficient, d_coefficients, d_continuous
from airylab.sumrules import SummationConfig, _Series, accelerated_sum


class Method(enum.Enum):
    WKB = "WKB"
    PT = "PT"
    EXACT = "exact"


@dataclass(frozen=True)
class StarkResult:
    system: SystemId
    parity: Parity
    n: int
    order: int
    method: Method
    value: float
    terms: int = 0
    tail: float = 0.0
    est_error: float = 0.0

    @property
    def coefficient(self):
        """value / E_n; meaningful for the linear systems."""
        return self.value / SpectralPoint(self.system, self.n, self.parity).lam


def _turning_point(system, n, parity):
    system = SystemId(system)
    if system is SystemId.HALF_SHO:
        return math.sqrt(4 * n + 3)
    if system is SystemId.BOUNCER:
        return airy_zero(ZeroKind.AI, n)
    if system is SystemId.SYMMETRIC_LINEAR:
        kind = ZeroKind.AI if Parity(parity) is Parity.ODD else ZeroKind.AI_PRIME
        return airy_zero(kind, n)
    raise DomainError(f"no classical density for {system.value}")


def classical_moment(system, p, n, parity=Parity.ODD):
    """Classical <y^p> on the half-line for the state's energy."""
    if p < 0:
        raise ArgumentError("p must be >= 0")
    a = _turning_point(system, n, parity)
    if SystemId(system) is SystemId.HALF_SHO:
        return a**p * math.gamma((1 + p) / 2) / (math.sqrt(math.pi) * math.gamma(1 + p / 2))
    return a**p * math.gamma(1 + p) * math.sqrt(math.pi) / (2 * math.gamma(p + 1.5))


def classical_density(system, n, y, parity=Parity.ODD):
    """P_CL(y) on [0, A_n), normalized to one; zero outside."""
    a = _turning_point(system, n, parity)
    y = np.asarray(y, dtype=float)
    inside = (y >= 0) & (y < a)
    safe = np.where(inside, y, 0.0)
    if SystemId(system) is SystemId.HALF_SHO:
        dens = 2.0 / (math.pi * np.sqrt(a * a - safe * safe))
    else:
        dens = 1.0 / (2.0 * np.sqrt(a * (a - safe)))
    return np.where(inside, dens, 0.0)


def leading_term_ratio(parity, p, n):
    """Quantum <y^p> (exact moment recursion) over the classical moment."""
    lam = _turning_point(SystemId.SYMMETRIC_LINEAR, n, parity)
    quantum = moment_expression(parity, p).evaluate(lam)
    return quantum / classical_moment(SystemId.SYMMETRIC_LINEAR, p, n, parity)


def semiclassical_density_check(n, window, samples=200, order=96):
    """Max relative deviation of the window-averaged bouncer density from P_CL.

    ``window`` is the averaging width in local de Broglie wavelengths
    2 pi / sqrt(zeta_n - z).  Both |psi|^2 and P_CL are box-averaged over the
    same window and compared on the inner 80% of [0, zeta_n].
    """
    if n < 10:
        raise ArgumentError("the semiclassical comparison needs n >= 10")
    if not window >= 1.0:
        raise ArgumentError("window must span at least one local wavelength")
    state = SpectralPoint(SystemId.BOUNCER, n)
    zeta = state.lam
    centers = np.linspace(0.1 * zeta, 0.9 * zeta, samples)
    x, w = gauss_legendre(order)
    worst = 0.0
    for z in centers:
        half = 0.5 * window * 2 * math.pi / math.sqrt(zeta - z)
        lo, hi = max(z - half, 0.0), min(z + half, zeta)
        pts = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x
        quantum = float(np.dot(w, wavefunction(state, pts) ** 2)) / 2
        # P_CL has a closed-form antiderivative -sqrt(zeta - y)/sqrt(zeta)
        classical = (math.sqrt(zeta - lo) - math.sqrt(zeta - hi)) / math.sqrt(zeta) / (hi - lo)
        worst = max(worst, abs(quantum - classical) / classical)
    return worst


# --- Stark shifts -------------------------------------------------------------

WKB_LINEAR_COEFFICIENT = -2.0 / 3.0


def stark_linear_closed_form(parity, n):
    """Exact second-order shift: -(7/9) zeta_n (odd) or -(5/9) eta_n (even)."""
    parity = Parity(parity)
    state = SpectralPoint(SystemId.SYMMETRIC_LINEAR, n, parity)
    coef = -7.0 / 9.0 if parity is Parity.ODD else -5.0 / 9.0
    return StarkResult(SystemId.SYMMETRIC_LINEAR, parity, n, 2, Method.EXACT, coef * state.lam)


def stark_linear_wkb(parity, n):
    """WKB second-order shift, -(2/3) E_n for either parity."""
    parity = Parity(parity)
    lam = SpectralPoint(SystemId.SYMMETRIC_LINEAR, n, parity).lam
    return StarkResult(SystemId.SYMMETRIC_LINEAR, parity, n, 2, Method.WKB, WKB_LINEAR_COEFFICIENT * lam)


def _linear_pt2_series(parity, n, cfg):
    # sum over opposite-parity states of |<n|z|k>|^2 / (E_n - E_k)
    if parity is Parity.ODD:
        lam = airy_zero(ZeroKind.AI, n)
        kind = ZeroKind.AI_PRIME

        def term(x):
            return (4.0 / (x * (x - lam) ** 6)) / (lam - x)
    else:
        lam = airy_zero(ZeroKind.AI_PRIME, n)
        kind = ZeroKind.AI

        def term(x):
            return (4.0 / (lam * (lam - x) ** 6)) / (lam - x)

    count = cfg.explicit_terms
    refine = min(cfg.refine_upto, count)

    def values(k):
        return zero_table(kind, count, refine).values[np.asarray(k) - 1]

    return _Series(
        discrete=lambda k: term(values(k)),
        smooth=lambda k: term(asymptotic_zero(kind, k)),
        sensitivity=lambda k: 3.0 + 7 * (values(k) + lam) / np.abs(values(k) - lam),
        start=1,
        m=3,
    )


def _bouncer_pt2_series(n, cfg):
    lam = airy_zero(ZeroKind.AI, n)
    count = cfg.explicit_terms
    refine = min(cfg.refine_upto, count)

    def term(x):
        return (4.0 / (lam - x) ** 4) / (lam - x)

    def values(k):
        return zero_table(ZeroKind.AI, count, refine).values[np.asarray(k) - 1]

    return _Series(
        discrete=lambda k: term(values(k)),
        smooth=lambda k: term(asymptotic_zero(ZeroKind.AI, k)),
        sensitivity=lambda k: 3.0 + 5 * (values(k) + lam) / np.abs(values(k) - lam),
        start=1,
        exclude=n,
        m=3,
    )


def _half_sho_pt2_series(n, cfg):
    d_n = d_coefficient(n).float
    count = cfg.explicit_terms

    def term(k, d_k):
        # |<n|y|k>|^2 = D_n D_k / (4 pi [4(n-k)^2 - 1]^2), E_n - E_k = 2(n-k) hbar omega
        y2 = d_n * d_k / (4.0 * math.pi * (4.0 * (n - k) ** 2 - 1.0) ** 2)
        return y2 / (2.0 * (n - k))

    def discrete(k):
        k = np.asarray(k)
        return term(k.astype(float), d_coefficients(count)[k])

    return _Series(
        discrete=discrete,
        smooth=lambda k: term(k, d_continuous(k)),
        sensitivity=lambda k: 8.0 + np.sqrt(np.asarray(k, dtype=float) + 1.0) * 0.5,
        start=0,
        exclude=n,
        m=2,
    )


def pt2_shift(system, parity, n, cfg=SummationConfig(explicit_terms=10000)):
    """Second-order perturbation sum with tail acceleration."""
    system = SystemId(system)
    parity = Parity(parity)
    if system is SystemId.SYMMETRIC_LINEAR:
        if parity is Parity.NONE:
            raise ArgumentError("symmetric linear states need a parity")
        series = _linear_pt2_series(parity, n, cfg)
    elif system is SystemId.BOUNCER:
        series = _bouncer_pt2_series(n, cfg)
    elif system is SystemId.HALF_SHO:
        if n < 0:
            raise ArgumentError("oscillator states are labeled from n = 0")
        series = _half_sho_pt2_series(n, cfg)
    else:
        # full oscillator: only k = n +- 1 couple, giving -1/2 exactly
        if n < 0:
            raise ArgumentError("oscillator states are labeled from n = 0")
        value = math.fsum([(n / 2.0) / 1.0, ((n + 1) / 2.0) / -1.0])
        return StarkResult(system, parity, n, 2, Method.PT, value, terms=2)
    ev = accelerated_sum(series, cfg)
    return StarkResult(system, parity, n, 2, Method.PT, ev.total, ev.explicit_terms, ev.tail_estimate, ev.est_error)


def wkb_half_sho(n, order):
    """WKB energy series for the half-SHO in a uniform field, order 0, 1 or 2."""
    if n < 0:
        raise ArgumentError("oscillator states are labeled from n = 0")
    if order == 0:
        value = 2 * n + 1.5
    elif order == 1:
        value = 2.0 / math.pi * math.sqrt(4 * n + 3)
    elif order == 2:
        value = -0.5 + 4.0 / math.pi**2
    else:
        raise ArgumentError("order must be 0, 1 or 2")
    return StarkResult(SystemId.HALF_SHO, Parity.NONE, n, order, Method.WKB, value)


def pt1_half_sho(n):
    """First-order shift <n|y|n> = D_n / (2 sqrt(pi))."""
    return d_coefficient(n).float / (2.0 * math.sqrt(math.pi))


@dataclass(frozen=True)
class Fig1Row:
    n: int
    r1: float
    r2: float
    pt2_terms: int
    pt2_tail: float


def r1_closed_form(n):
    return 4.0 * math.sqrt(4 * n + 3) / (math.sqrt(math.pi) * d_coefficient(n).float) - 1.0


def fig1_series(n_max, cfg=SummationConfig(explicit_terms=10000)):
    """Rows (n, r1, r2, pt2_terms, pt2_tail) for n = 0..n_max."""
    if n_max < 4:
        raise ArgumentError("n_max must be at least 4")
    rows = []
    for n in range(n_max + 1):
        pt2 = pt2_shift(SystemId.HALF_SHO, Parity.NONE, n, cfg)
        r2 = wkb_half_sho(n, 2).value / pt2.value - 1.0
        rows.append(Fig1Row(n, r1_closed_form(n), r2, pt2.terms, pt2.tail))
    return rows


def fig1_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "r1", "r2", "pt2_terms", "pt2_tail"])
    for r in rows:
        writer.writerow([r.n, f"{r.r1:.16e}", f"{r.r2:.16e}", r.pt2_terms, f"{r.pt2_tail:.16e}"])
    return buf.getvalue()
