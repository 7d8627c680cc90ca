"""Composite Gauss-Legendre quadrature with adaptive panel bisection."""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from airylab.errors import AccuracyError


@dataclass(frozen=True)
class QuadratureConfig:
    rtol: float = 1e-12
    order: int = 32
    margin: float = 15.0
    panel_width: float = 1.0
    max_level: int = 30


@lru_cache(maxsize=16)
def gauss_legendre(order):
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _panel_sums(f, a, b, order):
    x, w = gauss_legendre(order)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    pts = mid[:, None] + half[:, None] * x[None, :]
    vals = np.asarray(f(pts.ravel()), dtype=float).reshape(pts.shape)
    return half * (vals @ w), half * (np.abs(vals) @ w)


def adaptive_integrate(f, breakpoints, rtol=1e-12, order=32, max_level=30):
    """Integrate a vectorized ``f`` over the span of ``breakpoints``.

    Each panel is compared with the sum over its two halves; panels that
    disagree by more than ``rtol`` times the integral of |f| (estimated from
    the initial panels) are bisected.  Returns ``(value, error_estimate)``.
    """
    edges = np.asarray(breakpoints, dtype=float)
    a, b = edges[:-1], edges[1:]
    coarse, coarse_abs = _panel_sums(f, a, b, order)
    scale = max(float(np.sum(coarse_abs)), np.finfo(float).tiny)
    budget = rtol * scale
    accepted = []
    err_total = 0.0
    for level in range(max_level + 1):
        mid = 0.5 * (a + b)
        left, _ = _panel_sums(f, a, mid, order)
        right, _ = _panel_sums(f, mid, b, order)
        fine = left + right
        diff = np.abs(fine - coarse)
        width_share = (b - a) / (edges[-1] - edges[0])
        ok = diff <= np.maximum(budget * width_share, 4 * np.finfo(float).eps * np.abs(fine))
        accepted.append(fine[ok])
        err_total += float(np.sum(diff[ok]))
        if ok.all():
            value = float(np.sum(np.concatenate(accepted)))
            return value, err_total
        # bisect the rejected panels
        a_bad, b_bad, m_bad = a[~ok], b[~ok], mid[~ok]
        a = np.concatenate([a_bad, m_bad])
        b = np.concatenate([m_bad, b_bad])
        coarse = np.concatenate([left[~ok], right[~ok]])
    value = float(np.sum(np.concatenate(accepted))) + float(np.sum(coarse))
    raise AccuracyError(
        f"adaptive quadrature did not converge in {max_level} levels",
        estimate=value,
        achieved=err_total + float(np.sum(diff[~ok])),
    )


def fixed_gauss(f, a, b, order=48):
    """Single-panel Gauss-Legendre rule on [a, b]."""
    x, w = gauss_legendre(order)
    half = 0.5 * (b - a)
    return half * float(np.dot(w, f(0.5 * (a + b) + half * x)))
