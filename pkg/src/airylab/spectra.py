"""Eigenvalue and eigenstate bookkeeping for the four model systems.

Dimensionless throughout: lengths in units of rho = (hbar^2 / 2mF)^(1/3) for
the linear potentials (energies in rho F), and of beta = sqrt(hbar / m omega)
for the oscillators (energies as eps = 2E / hbar omega).

Linear-potential families are 1-based (zeta_1 is the first zero of Ai);
oscillator families are 0-based.
"""
import csv
import enum
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from airylab.errors import ArgumentError, DomainError
from airylab.specfun import airy_pair, d_coefficient, hermite_weighted


class SystemId(enum.Enum):
    SYMMETRIC_LINEAR = "symmetric_linear"
    BOUNCER = "bouncer"
    HALF_SHO = "half_sho"
    FULL_SHO = "full_sho"


class Parity(enum.Enum):
    EVEN = "even"
    ODD = "odd"
    NONE = "none"


class ZeroKind(enum.Enum):
    AI = "ai"
    AI_PRIME = "aiprime"


# Handbook expansions: zeta_k = T(3 pi (4k-1)/8), eta_k = U(3 pi (4k-3)/8)
_T_SERIES = (1.0, 5 / 48, -5 / 36, 77125 / 82944, -108056875 / 6967296)
_U_SERIES = (1.0, -7 / 48, 35 / 288, -181223 / 207360, 18683371 / 1244160)


def _asymptotic(kind, k):
    k = np.asarray(k, dtype=float)
    if kind is ZeroKind.AI:
        t = 3 * math.pi * (4 * k - 1) / 8
        coefs = _T_SERIES
    else:
        t = 3 * math.pi * (4 * k - 3) / 8
        coefs = _U_SERIES
    inv2 = 1.0 / (t * t)
    s = np.zeros_like(t)
    prev = np.full_like(t, np.inf)
    live = np.ones(t.shape, dtype=bool)
    # ascending order, stopping at the smallest term (matters only for k <= 2)
    for j, c in enumerate(coefs):
        term = c * inv2 ** j
        live &= np.abs(term) < prev
        s = np.where(live, s + term, s)
        prev = np.abs(term)
    return t ** (2.0 / 3.0) * s


def asymptotic_zero(kind, k):
    """Asymptotic-expansion estimate of the k-th zero magnitude (k may be real)."""
    return _asymptotic(ZeroKind(kind), k)


def leading_zero_estimate(kind, n):
    """The bare large-n formula [3 pi/4 (2n - 1/2)]^(2/3) (or 2n - 3/2 for Ai')."""
    kind = ZeroKind(kind)
    m = 2 * n - 0.5 if kind is ZeroKind.AI else (2 * n - 1) - 0.5
    return (3 * math.pi / 4 * m) ** (2.0 / 3.0)


@lru_cache(maxsize=None)
def airy_zero(kind, n):
    """Magnitude of the n-th negative zero of Ai (zeta_n) or Ai' (eta_n).

    Seeded by the asymptotic expansion and polished by Newton iteration.
    """
    kind = ZeroKind(kind)
    if n < 1:
        raise ArgumentError("zeros are labeled from n = 1")
    x = -float(_asymptotic(kind, n))
    for _ in range(60):
        ai, aip = airy_pair(x)
        if kind is ZeroKind.AI:
            step = ai / aip
        else:
            step = aip / (x * ai)
        x -= step
        if abs(step) <= 2e-16 * abs(x):
            break
    # the root is only known to an ulp; keep the neighbouring double with the smallest residual
    cands = [x]
    for direction in (-np.inf, np.inf):
        y = x
        for _ in range(2):
            y = float(np.nextafter(y, direction))
            cands.append(y)
    idx = 0 if kind is ZeroKind.AI else 1
    return -min(cands, key=lambda c: abs(airy_pair(c)[idx]))


@dataclass(frozen=True)
class ZeroTable:
    kind: ZeroKind
    count: int
    values: np.ndarray = field(repr=False)
    refined_upto: int

    def __getitem__(self, k):
        """1-based access: table[k] is the k-th zero."""
        return float(self.values[k - 1])

    def to_csv(self, stream=None):
        own = stream is None
        stream = stream or io.StringIO()
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["kind", "k", "value", "refined"])
        for k, v in enumerate(self.values, start=1):
            writer.writerow([self.kind.value, k, f"{v:.16e}", int(k <= self.refined_upto)])
        return stream.getvalue() if own else None


@lru_cache(maxsize=32)
def zero_table(kind, count, refine_upto):
    kind = ZeroKind(kind)
    if count < 1 or refine_upto < 1:
        raise ArgumentError("count and refine_upto must be positive")
    if refine_upto > count:
        raise ArgumentError("refine_upto cannot exceed count")
    vals = np.empty(count)
    vals[:refine_upto] = [airy_zero(kind, k) for k in range(1, refine_upto + 1)]
    if count > refine_upto:
        vals[refine_upto:] = _asymptotic(kind, np.arange(refine_upto + 1, count + 1))
    if np.any(np.diff(vals) <= 0):
        raise ArgumentError("zero table is not strictly increasing")
    vals.setflags(write=False)
    return ZeroTable(kind, count, vals, refine_upto)


@dataclass(frozen=True)
class SpectralPoint:
    system: SystemId
    n: int
    parity: Parity = Parity.NONE

    def __post_init__(self):
        if self.system is SystemId.SYMMETRIC_LINEAR:
            if self.parity is Parity.NONE:
                raise ArgumentError("symmetric linear states need a parity")
            if self.n < 1:
                raise ArgumentError("linear-potential states are labeled from n = 1")
        elif self.system is SystemId.BOUNCER:
            if self.n < 1:
                raise ArgumentError("bouncer states are labeled from n = 1")
        elif self.n < 0:
            raise ArgumentError("oscillator states are labeled from n = 0")

    @property
    def lam(self):
        """Dimensionless eigenvalue: zeta_n, eta_n or eps_n."""
        if self.system is SystemId.BOUNCER or (
            self.system is SystemId.SYMMETRIC_LINEAR and self.parity is Parity.ODD
        ):
            return airy_zero(ZeroKind.AI, self.n)
        if self.system is SystemId.SYMMETRIC_LINEAR:
            return airy_zero(ZeroKind.AI_PRIME, self.n)
        if self.system is SystemId.HALF_SHO:
            return 4.0 * self.n + 3.0
        return 2.0 * self.n + 1.0

    @property
    def airy_kind(self):
        if self.system is SystemId.BOUNCER or self.parity is Parity.ODD:
            return ZeroKind.AI
        return ZeroKind.AI_PRIME


def odd(n):
    return SpectralPoint(SystemId.SYMMETRIC_LINEAR, n, Parity.ODD)


def even(n):
    return SpectralPoint(SystemId.SYMMETRIC_LINEAR, n, Parity.EVEN)


def energy(state):
    """Dimensionless energy: zeta_n / eta_n (units rho F), 4n+3 or 2n+1 (units hbar omega / 2)."""
    return state.lam


def half_sho_slope(n):
    """psi~_n'(0) = (-1)^n sqrt(D_n / sqrt(pi))."""
    return (-1) ** n * math.sqrt(d_coefficient(n).float / math.sqrt(math.pi))


def boundary_value(state):
    """Origin data of a state.

    Symmetric linear: psi(0) (0 for odd states, 1/sqrt(2 eta_n) for even).
    Hard-wall systems (bouncer, half-SHO), where psi(0) = 0, return the slope
    psi'(0): 1 for the bouncer, (-1)^n sqrt(D_n/sqrt(pi)) for the half-SHO.
    """
    if state.system is SystemId.SYMMETRIC_LINEAR:
        if state.parity is Parity.ODD:
            return 0.0
        return 1.0 / math.sqrt(2.0 * state.lam)
    if state.system is SystemId.BOUNCER:
        return 1.0
    if state.system is SystemId.HALF_SHO:
        return half_sho_slope(state.n)
    raise DomainError(f"boundary_value is not defined for {state.system.value}")


def normalization(state):
    """Coefficient N multiplying Ai(|y| - lambda) in the wavefunction."""
    lam = state.lam
    ai, aip = airy_pair(-lam)
    if state.system is SystemId.BOUNCER:
        return 1.0 / aip
    if state.parity is Parity.ODD:
        return 1.0 / (math.sqrt(2.0) * aip)
    return 1.0 / (math.sqrt(2.0 * lam) * ai)


def wavefunction(state, y):
    """Normalized eigenfunction on the real line (vectorized in y)."""
    y = np.asarray(y, dtype=float)
    sys_ = state.system
    if sys_ is SystemId.FULL_SHO:
        return hermite_weighted(state.n, y)
    if sys_ is SystemId.HALF_SHO:
        return np.where(y >= 0, math.sqrt(2.0) * hermite_weighted(2 * state.n + 1, y), 0.0)
    norm = normalization(state)
    core = norm * airy_pair(np.abs(y) - state.lam)[0]
    if sys_ is SystemId.BOUNCER:
        return np.where(y >= 0, core, 0.0)
    if state.parity is Parity.ODD:
        return np.sign(y) * core
    return core


def turning_point(state):
    """Upper classical turning point in dimensionless units."""
    if state.system in (SystemId.SYMMETRIC_LINEAR, SystemId.BOUNCER):
        return state.lam
    return math.sqrt(state.lam)
