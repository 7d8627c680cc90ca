"""Accelerated evaluation of the zero sums and the identity registry.

Every sum is split into an explicit part over k <= K (fsum, so the result is
the correctly rounded sum of the computed terms and independent of order or
partitioning) and a tail estimated from the smooth large-k form of the terms:

    sum_{k >= k0} f(k) ~ int_{k0}^inf f + f(k0)/2 - f'(k0)/12 + f'''(k0)/720

The integral is mapped to [0, 1] with k = k0 s^(-m); with m chosen so that
the leading decay becomes polynomial in s, Gauss-Legendre converges quickly.
"""
import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from airylab.errors import ArgumentError, DivergenceError
from airylab.quadrature import gauss_legendre
from airylab.spectra import ZeroKind, airy_zero, asymptotic_zero, zero_table
from airylab.specfun import d_coefficient, d_coefficients, d_continuous

_EPS = np.finfo(float).eps


class SumTag(enum.Enum):
    T = "T"
    U = "U"
    T_TILDE = "Ttilde"
    U_TILDE = "Utilde"
    S = "S"
    EVEN_EVEN_MONOPOLE = "EvenEvenMonopole"
    HALF_SHO_TRK = "HalfShoTRK"
    HALF_SHO_COMPLETENESS = "HalfShoCompleteness"
    HALF_SHO_K_WEIGHTED = "HalfShoKWeighted"


_HALF_SHO = {SumTag.HALF_SHO_TRK, SumTag.HALF_SHO_COMPLETENESS, SumTag.HALF_SHO_K_WEIGHTED}
# summation variable x_k and fixed eigenvalue lambda_n for the Airy families
_ZERO_KINDS = {
    SumTag.T: (ZeroKind.AI_PRIME, ZeroKind.AI),
    SumTag.T_TILDE: (ZeroKind.AI_PRIME, ZeroKind.AI),
    SumTag.U: (ZeroKind.AI, ZeroKind.AI_PRIME),
    SumTag.U_TILDE: (ZeroKind.AI, ZeroKind.AI_PRIME),
    SumTag.S: (ZeroKind.AI, ZeroKind.AI),
    SumTag.EVEN_EVEN_MONOPOLE: (ZeroKind.AI_PRIME, ZeroKind.AI_PRIME),
}


@dataclass(frozen=True)
class SumFamily:
    tag: SumTag
    n: int
    p: int = 0

    def __post_init__(self):
        object.__setattr__(self, "tag", SumTag(self.tag))
        if self.tag in _HALF_SHO:
            if self.n < 0:
                raise ArgumentError("half-SHO states are labeled from n = 0")
        elif self.n < 1:
            raise ArgumentError("linear-potential states are labeled from n = 1")
        if self.tag in (SumTag.T, SumTag.U, SumTag.T_TILDE, SumTag.U_TILDE, SumTag.S):
            if self.p < 2:
                raise DivergenceError(
                    f"{self.tag.value}_{self.p} is below the convergence threshold p = 2"
                )

    @property
    def label(self):
        if self.tag in _HALF_SHO or self.tag is SumTag.EVEN_EVEN_MONOPOLE:
            return f"{self.tag.value}({self.n})"
        return f"{self.tag.value}{self.p}({self.n})"


@dataclass(frozen=True)
class SummationConfig:
    explicit_terms: int = 20000
    refine_upto: int = 200
    tail_method: str = "integral_euler_maclaurin"
    nodes: int = 48

    def __post_init__(self):
        if self.explicit_terms < 100:
            raise ArgumentError("explicit_terms must be at least 100")
        if self.refine_upto < 1:
            raise ArgumentError("refine_upto must be positive")
        if self.tail_method not in ("none", "integral_euler_maclaurin"):
            raise ArgumentError(f"unknown tail method {self.tail_method!r}")


@dataclass(frozen=True)
class SumEvaluation:
    explicit_sum: float
    explicit_terms: int
    tail_estimate: float
    tail_method: str
    total: float
    est_error: float


# --- series definitions -------------------------------------------------------


@dataclass(frozen=True)
class _Series:
    """Terms f(k) for integer k >= start, with an optional excluded index.

    ``discrete(k)`` evaluates the exact terms; ``smooth(k)`` is the
    large-k interpolant used for the tail; ``sensitivity(k)`` bounds the
    relative rounding error per term; ``m`` is the tail substitution power.
    """

    discrete: object
    smooth: object
    sensitivity: object
    start: int
    exclude: int = None
    m: int = 3


def _airy_series(tag, n, p, cfg):
    x_kind, lam_kind = _ZERO_KINDS[tag]
    lam = airy_zero(lam_kind, n)

    def term(x):
        d = x - lam
        if tag is SumTag.T:
            return 1.0 / (x * d**p)
        if tag is SumTag.U:
            return 1.0 / (lam * d**p)
        if tag is SumTag.EVEN_EVEN_MONOPOLE:
            return (lam + x) ** 2 / (lam * x * d**7)
        return 1.0 / d**p

    power = 7 if tag is SumTag.EVEN_EVEN_MONOPOLE else p
    count = cfg.explicit_terms
    refine = min(cfg.refine_upto, count)

    def values(k):
        table = zero_table(x_kind, count, refine).values
        return table[np.asarray(k) - 1]

    return _Series(
        discrete=lambda k: term(values(k)),
        smooth=lambda k: term(asymptotic_zero(x_kind, k)),
        sensitivity=lambda k: 3.0 + power * (values(k) + lam) / np.abs(values(k) - lam),
        start=1,
        exclude=n if tag in (SumTag.S, SumTag.EVEN_EVEN_MONOPOLE) else None,
        m=3,
    )


def _half_sho_series(tag, n, cfg):
    d_n = d_coefficient(n).float
    count = cfg.explicit_terms

    def term(k, d_k):
        den = (4.0 * (n - k) ** 2 - 1.0) ** 2
        if tag is SumTag.HALF_SHO_TRK:
            return d_n * (k - n) * d_k / den
        if tag is SumTag.HALF_SHO_K_WEIGHTED:
            return d_n * k * d_k / den
        return d_n * d_k / den

    def discrete(k):
        k = np.asarray(k)
        return term(k.astype(float), d_coefficients(count)[k])

    return _Series(
        discrete=discrete,
        smooth=lambda k: term(k, d_continuous(k)),
        sensitivity=lambda k: 8.0 + np.sqrt(np.asarray(k, dtype=float) + 1.0) * 0.5,
        start=0,
        exclude=None,
        m=2,
    )


def _series_for(family, cfg):
    if family.tag in _HALF_SHO:
        return _half_sho_series(family.tag, family.n, cfg)
    return _airy_series(family.tag, family.n, family.p, cfg)


# --- engine ------------------------------------------------------------------


def _tail(series, k0, nodes):
    """Integral + Euler-Maclaurin tail from k0 (inclusive) with an error estimate."""
    m = series.m

    def integral(order):
        x, w = gauss_legendre(order)
        s = 0.5 * (x + 1.0)
        k = k0 * s ** (-m)
        vals = series.smooth(k) * m * k0 * s ** (-m - 1)
        return 0.5 * math.fsum(w * vals)

    body = integral(nodes)
    body_check = integral(nodes // 2 + 4)
    f = lambda x: float(series.smooth(np.float64(x)))  # noqa: E731

    def d1(h):
        return (f(k0 - 2 * h) - 8 * f(k0 - h) + 8 * f(k0 + h) - f(k0 + 2 * h)) / (12 * h)

    h = 0.05 * k0
    fp, fp_half = d1(h), d1(h / 2)
    f3 = (f(k0 + 2 * h) - 2 * f(k0 + h) + 2 * f(k0 - h) - f(k0 - 2 * h)) / (2 * h**3)
    correction = f(k0) / 2 - fp_half / 12 + f3 / 720
    tail = body + correction
    # |f'''|/720 stands in for the first omitted Euler-Maclaurin term
    err = (
        abs(body - body_check)
        + abs(fp - fp_half) / 12
        + abs(f3) / 720
        + 64 * _EPS * (abs(body) + abs(correction))
    )
    return tail, err


def accelerated_sum(series, cfg):
    """Evaluate a ``_Series`` with the configured explicit range and tail."""
    k = np.arange(series.start, series.start + cfg.explicit_terms)
    if series.exclude is not None:
        k = k[k != series.exclude]
    terms = series.discrete(k)
    explicit = math.fsum(terms)
    rounding = _EPS * math.fsum(np.abs(terms) * series.sensitivity(k))
    k0 = series.start + cfg.explicit_terms
    if cfg.tail_method == "none":
        # raw truncation: the omitted remainder is bounded by twice its estimate
        tail, tail_err = 0.0, 2 * abs(_tail(series, k0, cfg.nodes)[0])
    else:
        tail, tail_err = _tail(series, k0, cfg.nodes)
    return SumEvaluation(
        explicit_sum=explicit,
        explicit_terms=int(k.size),
        tail_estimate=tail,
        tail_method=cfg.tail_method,
        total=explicit + tail,
        est_error=rounding + tail_err,
    )


def evaluate_sum(family, cfg=SummationConfig()):
    """Evaluate one zero sum (or half-SHO D_k sum) with tail acceleration."""
    if not isinstance(family, SumFamily):
        raise ArgumentError("family must be a SumFamily")
    return accelerated_sum(_series_for(family, cfg), cfg)


def tilde_sums(p, n, cfg=SummationConfig()):
    """(T~_p(n), U~_p(n)) from T~_p = zeta_n T_p + T_{p-1} and U~_p = eta_n U_p."""
    if p < 3:
        raise DivergenceError("T~_p needs T_{p-1} convergent, i.e. p >= 3")
    zeta = airy_zero(ZeroKind.AI, n)
    eta = airy_zero(ZeroKind.AI_PRIME, n)
    t_p = evaluate_sum(SumFamily(SumTag.T, n, p), cfg).total
    t_pm1 = evaluate_sum(SumFamily(SumTag.T, n, p - 1), cfg).total
    u_p = evaluate_sum(SumFamily(SumTag.U, n, p), cfg).total
    return zeta * t_p + t_pm1, eta * u_p


# --- registry ---------------------------------------------------------------


def _zeta(n):
    return airy_zero(ZeroKind.AI, n)


def _eta(n):
    return airy_zero(ZeroKind.AI_PRIME, n)


@dataclass(frozen=True)
class IdentityRecord:
    """One closed-form identity: ``lhs_family(n)`` summed equals ``rhs(n)``.

    Identities that fix states of both parities contribute one record per
    part (e.g. ``linear.trk`` has parts ``T5`` and ``U5``).
    """

    id: str
    part: str
    tag: SumTag
    p: int
    rhs: object = field(repr=False, compare=False)
    rhs_text: str
    provenance: str
    tolerance: float
    absolute: bool = False

    @property
    def key(self):
        return f"{self.id}:{self.part}"

    @property
    def first_n(self):
        return 0 if self.tag in _HALF_SHO else 1

    def family(self, n):
        return SumFamily(self.tag, n, self.p)


def _rec(id_, part, tag, p, rhs, text, prov, tol, absolute=False):
    return IdentityRecord(id_, part, tag, p, rhs, text, prov, tol, absolute)


_TOL_P2 = 1e-6
_TOL = 1e-8
_TOL_SHO = 1e-6

_REGISTRY = (
    _rec("linear.force_squared", "T2", SumTag.T, 2, lambda n: 1.0, "1",
         "force-squared sum rule, odd fixed state", _TOL_P2),
    _rec("linear.force_squared", "U2", SumTag.U, 2, lambda n: 1.0, "1",
         "force-squared sum rule, even fixed state", _TOL_P2),
    _rec("linear.force_momentum", "T3", SumTag.T, 3, lambda n: 0.0, "0",
         "force-times-momentum sum rule, odd fixed state (psi(0) = 0)", 1e-9, True),
    # |psi(0)|^2 = 1/(2 eta) on the right; eta U_3 = 1/2
    _rec("linear.force_momentum", "U3", SumTag.U, 3, lambda n: 0.5 / _eta(n), "1/(2 eta)",
         "force-times-momentum sum rule, even fixed state", _TOL_P2),
    _rec("linear.momentum_completeness", "T4", SumTag.T, 4, lambda n: _zeta(n) / 3, "zeta/3",
         "momentum completeness with <p^2> from the virial theorem", _TOL),
    _rec("linear.momentum_completeness", "U4", SumTag.U, 4, lambda n: _eta(n) / 3, "eta/3",
         "momentum completeness with <p^2> from the virial theorem", _TOL),
    _rec("linear.trk", "T5", SumTag.T, 5, lambda n: 0.25, "1/4",
         "Thomas-Reiche-Kuhn sum rule, odd fixed state", _TOL),
    _rec("linear.trk", "U5", SumTag.U, 5, lambda n: 0.25, "1/4",
         "Thomas-Reiche-Kuhn sum rule, even fixed state", _TOL),
    _rec("linear.z_completeness", "T6", SumTag.T, 6, lambda n: 2 * _zeta(n) ** 2 / 15,
         "2 zeta^2/15", "dipole completeness with <z^2>", _TOL),
    _rec("linear.z_completeness", "U6", SumTag.U, 6,
         lambda n: 2 * _eta(n) ** 2 / 15 + 1 / (20 * _eta(n)), "2 eta^2/15 + 1/(20 eta)",
         "dipole completeness with <z^2>", _TOL),
    _rec("linear.stark", "T7", SumTag.T, 7, lambda n: 7 * _zeta(n) / 36, "7 zeta/36",
         "second-order Stark shift as an energy-weighted sum", _TOL),
    _rec("linear.stark", "U7", SumTag.U, 7, lambda n: 5 * _eta(n) / 36, "5 eta/36",
         "second-order Stark shift as an energy-weighted sum", _TOL),
    _rec("linear.even_monopole", "EE7", SumTag.EVEN_EVEN_MONOPOLE, 7,
         lambda n: (8 * _eta(n) ** 2 / 15 + 1 / (5 * _eta(n))) / 36,
         "(8 eta^2/15 + 1/(5 eta))/36",
         "monopole energy-weighted sum over even states with <z^2> closure", _TOL),
    _rec("bouncer.trk", "S3", SumTag.S, 3, lambda n: 0.25, "1/4",
         "Thomas-Reiche-Kuhn sum rule for the bouncer", _TOL),
    _rec("bouncer.momentum_completeness", "S2", SumTag.S, 2, lambda n: _zeta(n) / 3, "zeta/3",
         "momentum completeness for the bouncer", _TOL),
    _rec("bouncer.x_completeness", "S4", SumTag.S, 4, lambda n: _zeta(n) ** 2 / 45,
         "zeta^2/45", "dipole completeness for the bouncer (diagonal term removed)", _TOL),
    _rec("bouncer.stark", "S5", SumTag.S, 5, lambda n: _zeta(n) / 36, "zeta/36",
         "second-order Stark shift of the bouncer", _TOL),
    _rec("bouncer.monopole", "S7", SumTag.S, 7, lambda n: _zeta(n) ** 2 / 270, "zeta^2/270",
         "monopole energy-weighted sum for the bouncer", _TOL),
    _rec("halfsho.trk", "D", SumTag.HALF_SHO_TRK, 0, lambda n: math.pi, "pi",
         "Thomas-Reiche-Kuhn sum rule for the half oscillator", _TOL_SHO),
    _rec("halfsho.completeness", "D", SumTag.HALF_SHO_COMPLETENESS, 0,
         lambda n: (8 * n + 6) * math.pi, "(8n+6) pi",
         "dipole completeness for the half oscillator (all k)", _TOL_SHO),
    _rec("halfsho.k_weighted", "D", SumTag.HALF_SHO_K_WEIGHTED, 0,
         lambda n: (4 * n + 1) * (2 * n + 1) * math.pi, "(4n+1)(2n+1) pi",
         "completeness minus n times TRK for the half oscillator (all k)", _TOL_SHO),
)


def registry():
    """All identity records, in a fixed order."""
    return list(_REGISTRY)


def identity_ids():
    seen = []
    for rec in _REGISTRY:
        if rec.id not in seen:
            seen.append(rec.id)
    return seen


def records_for(identity_id):
    """Records for ``"linear.trk"`` (all parts) or ``"linear.trk:T5"`` (one)."""
    base, _, part = identity_id.partition(":")
    out = [r for r in _REGISTRY if r.id == base and (not part or r.part == part)]
    if not out:
        raise ArgumentError(f"unknown identity {identity_id!r}")
    return out


# --- verification reports --------------------------------------------------

REPORT_FIELDS = ("id", "n", "lhs", "rhs", "abs_res", "rel_res", "terms", "tail", "pass")


@dataclass(frozen=True)
class VerificationReport:
    id: str
    n: int
    lhs: float
    rhs: float
    abs_res: float
    rel_res: float
    terms: int
    tail: float
    passed: bool
    est_error: float = 0.0

    def as_row(self):
        return {
            "id": self.id,
            "n": self.n,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "abs_res": self.abs_res,
            "rel_res": self.rel_res,
            "terms": self.terms,
            "tail": self.tail,
            "pass": self.passed,
        }

    def to_json(self):
        return json.dumps(self.as_row())

    def csv_fields(self):
        row = self.as_row()
        return [
            f"{v:.16e}" if isinstance(v, float) else (str(v).lower() if isinstance(v, bool) else str(v))
            for v in (row[k] for k in REPORT_FIELDS)
        ]


def reports_to_csv(reports):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_FIELDS)
    for rep in reports:
        writer.writerow(rep.csv_fields())
    return buf.getvalue()


def reports_to_jsonl(reports):
    return "".join(rep.to_json() + "\n" for rep in reports)


def verify_record(record, n, cfg=SummationConfig(), tolerance=None):
    ev = evaluate_sum(record.family(n), cfg)
    rhs = float(record.rhs(n))
    abs_res = abs(ev.total - rhs)
    # a zero right-hand side has no relative scale; rel_res then repeats abs_res
    rel_res = abs_res / abs(rhs) if rhs != 0 else abs_res
    tol = record.tolerance if tolerance is None else tolerance
    passed = (abs_res if record.absolute or rhs == 0 else rel_res) <= tol
    return VerificationReport(
        record.key, n, ev.total, rhs, abs_res, rel_res, ev.explicit_terms, ev.tail_estimate,
        bool(passed), ev.est_error,
    )


def verify_identity(identity_id, n, cfg=SummationConfig(), tolerance=None):
    """Reports for every part of an identity at state index ``n``."""
    return [verify_record(r, n, cfg, tolerance) for r in records_for(identity_id)]
