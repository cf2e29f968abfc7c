"""Bivariate standard normal CDF via Gauss-Legendre quadrature.

Evaluates Pr(Z1 <= x, Z2 <= y) for correlation rho in (-1, 1) using the
Drezner-Wesolowsky correlation-integral form with the high-|rho| reduction
of Genz's BVND routine. Absolute error is far below 1e-7 over the whole
parameter range; infinities reduce to the univariate marginal limits.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtr

from .errors import NumericError

_TWOPI = 2.0 * np.pi

# 20-point Gauss-Legendre rule on (-1, 1), positive half
_GL_X = np.array([
    0.9931285991850949, 0.9639719272779138, 0.9122344282513259,
    0.8391169718222188, 0.7463319064601508, 0.6360536807265150,
    0.5108670019508271, 0.3737060887154196, 0.2277858511416451,
    0.07652652113349733,
])
_GL_W = np.array([
    0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
    0.08327674157670475, 0.1019301198172404, 0.1181945319615184,
    0.1316886384491766, 0.1420961093183821, 0.1491729864726037,
    0.1527533871307259,
])


def _bvnu_moderate(h, k, r):
    """Upper-quadrant probability for |r| < 0.925 (arrays of equal shape)."""
    hk = h * k
    hs = 0.5 * (h * h + k * k)
    asr = np.arcsin(r)
    sn_lo = np.sin(asr[..., None] * (1.0 - _GL_X) / 2.0)
    sn_hi = np.sin(asr[..., None] * (1.0 + _GL_X) / 2.0)

    def integrand(sn):
        return np.exp((sn * hk[..., None] - hs[..., None]) / (1.0 - sn * sn))

    acc = np.sum(_GL_W * (integrand(sn_lo) + integrand(sn_hi)), axis=-1)
    return acc * asr / (2.0 * _TWOPI) + ndtr(-h) * ndtr(-k)


def _bvnu_extreme(h, k, r):
    """Upper-quadrant probability for 0.925 <= |r| < 1 (arrays of equal shape)."""
    neg = r < 0
    k = np.where(neg, -k, k)
    hk = h * k
    a_sq = (1.0 - r) * (1.0 + r)
    a = np.sqrt(a_sq)
    bs = (h - k) ** 2
    c = (4.0 - hk) / 8.0
    d = (12.0 - hk) / 16.0
    asr0 = -(bs / a_sq + hk) / 2.0

    series = a * np.exp(np.minimum(asr0, 700.0)) * (
        1.0 - c * (bs - a_sq) * (1.0 - d * bs / 5.0) / 3.0 + c * d * a_sq * a_sq / 5.0
    )
    bvn = np.where(asr0 > -100.0, series, 0.0)

    keep = -hk < 100.0
    b = np.sqrt(bs)
    sp = np.sqrt(_TWOPI) * ndtr(-b / a)
    tail = np.exp(np.where(keep, -hk / 2.0, 0.0)) * sp * b * (
        1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0
    )
    bvn = bvn - np.where(keep, tail, 0.0)

    half = a / 2.0
    for sign in (-1.0, 1.0):
        xs = (half[..., None] * (sign * _GL_X + 1.0)) ** 2
        rs = np.sqrt(1.0 - xs)
        asr1 = -(bs[..., None] / xs + hk[..., None]) / 2.0
        ok = asr1 > -100.0
        ep = np.exp(np.minimum(-hk[..., None] * (1.0 - rs) / (2.0 * (1.0 + rs)), 700.0)) / rs
        sp1 = 1.0 + c[..., None] * xs * (1.0 + d[..., None] * xs)
        term = half[..., None] * _GL_W * np.exp(np.where(ok, asr1, -np.inf)) * (ep - sp1)
        bvn = bvn + np.sum(np.where(ok, term, 0.0), axis=-1)
    bvn = -bvn / _TWOPI

    pos_val = bvn + ndtr(-np.maximum(h, k))
    neg_val = -bvn + np.maximum(0.0, ndtr(-h) - ndtr(-k))
    return np.where(neg, neg_val, pos_val)


def bivariate_normal_cdf(x, y, rho):
    """Pr(Z1 <= x, Z2 <= y) for standard bivariate normal correlation rho.

    Accepts scalars or broadcastable arrays; +-inf arguments take their
    marginal limits. rho must lie strictly inside (-1, 1).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if np.any(np.abs(rho) >= 1.0):
        raise NumericError("correlation must satisfy |rho| < 1")
    if np.any(np.isnan(x)) or np.any(np.isnan(y)):
        raise NumericError("arguments must not be NaN")

    # evaluate on the canonical order (x <= y); the function is symmetric and
    # this keeps the quadrature bit-identical under argument swap
    x, y = np.minimum(x, y), np.maximum(x, y)
    h, k, r = np.broadcast_arrays(-x, -y, rho)
    shape = h.shape
    h = h.astype(float).ravel()
    k = k.astype(float).ravel()
    r = r.astype(float).ravel()
    out = np.empty(h.shape)

    lo = np.isposinf(h) | np.isposinf(k)  # x or y is -inf
    x_inf = np.isneginf(h) & ~lo  # x is +inf
    y_inf = np.isneginf(k) & ~lo
    finite = ~(lo | x_inf | y_inf)

    out[lo] = 0.0
    out[x_inf] = ndtr(-k[x_inf])
    out[y_inf] = ndtr(-h[y_inf])

    mod = finite & (np.abs(r) < 0.925)
    ext = finite & ~mod
    if mod.any():
        out[mod] = _bvnu_moderate(h[mod], k[mod], r[mod])
    if ext.any():
        out[ext] = _bvnu_extreme(h[ext], k[ext], r[ext])

    out = np.clip(out, 0.0, 1.0).reshape(shape)
    return float(out) if out.ndim == 0 else out
