"""Bivariate copulas on rank-transformed scores.

Three families, each fitted by inverting the closed-form map between the
family parameter and Kendall's tau:

    gaussian  rho = sin(pi * tau / 2)            tail-independent
    clayton   theta = 2 tau / (1 - tau)          lower-tail dependent
    gumbel    theta = max(1, 1 / (1 - tau))      upper-tail dependent

Samplers: Gaussian by correlated normals, Clayton by conditional inversion,
Gumbel through its Archimedean generator with a root solve of the inner
distribution function.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .bvn import bivariate_normal_cdf
from .errors import DataError, NumericError

FAMILIES = ("gaussian", "clayton", "gumbel")

CLAYTON_THETA_FLOOR = 1e-6

_GUMBEL_ROOT_TOL = 1e-12
_GUMBEL_ROOT_LO = 1e-12
_GUMBEL_ROOT_HI = 1.0 - 1e-12


def average_ranks(x) -> np.ndarray:
    """1-based ranks, ties replaced by the mean rank of the tied block."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    order = np.argsort(x, kind="stable")
    sx = x[order]
    run_start = np.empty(n, dtype=bool)
    run_start[0] = True
    run_start[1:] = sx[1:] != sx[:-1]
    run_id = np.cumsum(run_start) - 1
    starts = np.flatnonzero(run_start)
    ends = np.append(starts[1:], n)
    mean_rank = 0.5 * (starts + ends - 1) + 1.0
    ranks = np.empty(n)
    ranks[order] = mean_rank[run_id]
    return ranks


def pseudo_observations(x) -> np.ndarray:
    """Map scores to (0,1) via rank / (n + 1), average ranks on ties."""
    x = np.asarray(x, dtype=float)
    if len(x) < 2:
        raise DataError("pseudo-observations need at least two values")
    return average_ranks(x) / (len(x) + 1.0)


_INVERSION_BLOCK = 128


def _count_inversions(a: np.ndarray):
    """Number of pairs i < j with a[i] > a[j]; returns (sorted a, count)."""
    n = len(a)
    if n <= _INVERSION_BLOCK:
        count = int(np.sum(np.triu(a[:, None] > a[None, :], k=1)))
        return np.sort(a, kind="stable"), count
    mid = n // 2
    left, cl = _count_inversions(a[:mid])
    right, cr = _count_inversions(a[mid:])
    # elements of `left` sit before `right`; strict decreases across the cut
    cross = int(mid * len(right) - np.searchsorted(left, right, side="right").sum())
    return np.sort(np.concatenate([left, right]), kind="stable"), cl + cr + cross


def _tie_pairs(x: np.ndarray) -> int:
    _, counts = np.unique(x, return_counts=True)
    return int(np.sum(counts * (counts - 1) // 2))


def kendall_tau(u, v, variant: str = "a") -> float:
    """Kendall rank correlation by merge-based inversion counting.

    variant "a" (default) leaves tied pairs contributing zero against the
    full pair count; variant "b" normalizes the tie counts away.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if len(u) != len(v):
        raise DataError("vectors must have equal length")
    n = len(u)
    if n < 2:
        raise DataError("Kendall's tau needs at least two pairs")
    order = np.lexsort((v, u))
    y = v[order]
    _, discordant = _count_inversions(y)
    n0 = n * (n - 1) // 2
    n1 = _tie_pairs(u)
    n2 = _tie_pairs(v)
    pairs_uv = np.rec.fromarrays([u, v])
    n3 = _tie_pairs(pairs_uv)
    c_minus_d = n0 - n1 - n2 + n3 - 2 * discordant
    if variant == "a":
        return c_minus_d / n0
    if variant == "b":
        denom = np.sqrt(float(n0 - n1) * float(n0 - n2))
        if denom == 0:
            raise NumericError("tau-b undefined: one margin is constant")
        return c_minus_d / denom
    raise NumericError(f"unknown tau variant {variant!r}")


@dataclass(frozen=True)
class CopulaModel:
    """A fitted family with its parameter and derived dependence summaries."""

    family: str
    param: float
    tau: float
    lambda_lower: float
    lambda_upper: float

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "param": self.param,
            "tau": self.tau,
            "lambda_L": self.lambda_lower,
            "lambda_U": self.lambda_upper,
        }


def fit_gaussian(tau: float) -> CopulaModel:
    if not -1.0 < tau < 1.0:
        raise NumericError("gaussian fit requires |tau| < 1")
    rho = float(np.sin(np.pi * tau / 2.0))
    return CopulaModel("gaussian", rho, tau, 0.0, 0.0)


def fit_clayton(tau: float) -> CopulaModel:
    if tau >= 1.0:
        raise NumericError("clayton fit requires tau < 1")
    theta = 2.0 * tau / (1.0 - tau) if tau > 0 else CLAYTON_THETA_FLOOR
    return CopulaModel("clayton", float(theta), theta / (theta + 2.0), float(2.0 ** (-1.0 / theta)), 0.0)


def fit_gumbel(tau: float) -> CopulaModel:
    if tau >= 1.0:
        raise NumericError("gumbel fit requires tau < 1")
    theta = max(1.0, 1.0 / (1.0 - tau))
    return CopulaModel("gumbel", float(theta), 1.0 - 1.0 / theta, 0.0, float(2.0 - 2.0 ** (1.0 / theta)))


def fit_family(family: str, tau: float) -> CopulaModel:
    if family == "gaussian":
        return fit_gaussian(tau)
    if family == "clayton":
        return fit_clayton(tau)
    if family == "gumbel":
        return fit_gumbel(tau)
    raise NumericError(f"unknown copula family {family!r}")


def tail_dependence(model: CopulaModel) -> tuple[float, float]:
    return model.lambda_lower, model.lambda_upper


def _clayton_cdf(u, v, theta):
    # 1 + (u^-t - 1) + (v^-t - 1), assembled from expm1 so tiny theta stays exact
    s = np.expm1(-theta * np.log(u)) + np.expm1(-theta * np.log(v))
    return np.exp(-np.log1p(s) / theta)


def _gumbel_cdf(u, v, theta):
    a = -np.log(u)
    b = -np.log(v)
    hi = np.maximum(a, b)
    lo = np.minimum(a, b)
    inner = hi * (1.0 + (lo / hi) ** theta) ** (1.0 / theta)
    return np.exp(-inner)


def copula_cdf(model: CopulaModel, u, v):
    """C(u, v) for the fitted family; boundaries take their exact limits."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any((u < 0) | (u > 1) | (v < 0) | (v > 1)):
        raise NumericError("copula arguments must lie in [0, 1]")
    u, v = np.broadcast_arrays(u, v)
    shape = u.shape
    u = u.ravel().copy()
    v = v.ravel().copy()
    out = np.empty(u.shape)

    zero = (u == 0.0) | (v == 0.0)
    u_one = (v == 1.0) & ~zero
    v_one = (u == 1.0) & ~zero & ~u_one
    interior = ~(zero | u_one | v_one)
    out[zero] = 0.0
    out[u_one] = u[u_one]
    out[v_one] = v[v_one]

    ui, vi = u[interior], v[interior]
    if model.family == "gaussian":
        if not -1.0 < model.param < 1.0:
            raise NumericError("gaussian copula requires |rho| < 1")
        vals = bivariate_normal_cdf(ndtri(ui), ndtri(vi), model.param)
    elif model.family == "clayton":
        if model.param <= 0:
            raise NumericError("clayton copula requires theta > 0")
        vals = _clayton_cdf(ui, vi, model.param)
    elif model.family == "gumbel":
        if model.param < 1.0:
            raise NumericError("gumbel copula requires theta >= 1")
        vals = _gumbel_cdf(ui, vi, model.param)
    else:
        raise NumericError(f"unknown copula family {model.family!r}")

    # Frechet-Hoeffding envelope; quadrature round-off never escapes it
    vals = np.clip(vals, np.maximum(ui + vi - 1.0, 0.0), np.minimum(ui, vi))
    out[interior] = vals
    out = out.reshape(shape)
    return float(out) if out.ndim == 0 else out


def _solve_gumbel_inner(t, theta):
    """Solve K(w) = w - w ln(w) / theta = t on (0, 1), vectorized hybrid
    Newton / bisection with bracket maintenance."""
    t = np.asarray(t, dtype=float)
    lo = np.full(t.shape, _GUMBEL_ROOT_LO)
    hi = np.full(t.shape, _GUMBEL_ROOT_HI)

    def K(w):
        return w - w * np.log(w) / theta

    # clamp targets into the reachable range of K on the bracket
    t = np.clip(t, K(lo), K(hi))
    w = np.clip(t, lo, hi)
    for _ in range(100):
        f = K(w) - t
        lo = np.where(f < 0, w, lo)
        hi = np.where(f > 0, w, hi)
        deriv = 1.0 - (np.log(w) + 1.0) / theta
        step = f / deriv
        w_new = w - step
        bad = (w_new <= lo) | (w_new >= hi) | ~np.isfinite(w_new)
        w_new = np.where(bad, 0.5 * (lo + hi), w_new)
        done = np.abs(w_new - w) <= _GUMBEL_ROOT_TOL
        w = w_new
        if done.all():
            break
    return w


def _clip_open(x):
    """Push values off the closed boundary so pairs stay strictly inside (0,1)."""
    return np.clip(x, 1e-300, np.nextafter(1.0, 0.0))


def sample(model: CopulaModel, n: int, seed) -> tuple[np.ndarray, np.ndarray]:
    """Draw n pairs from the fitted copula; margins are uniform on (0,1)."""
    if n <= 0:
        raise NumericError("sample size must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)

    if model.family == "gaussian":
        rho = model.param
        z1 = rng.standard_normal(n)
        z2 = rho * z1 + np.sqrt(1.0 - rho * rho) * rng.standard_normal(n)
        return _clip_open(ndtr(z1)), _clip_open(ndtr(z2))

    if model.family == "clayton":
        theta = model.param
        u = rng.uniform(size=n)
        w = rng.uniform(size=n)
        # conditional quantile V | U inverted in closed form, log-domain
        inner = np.exp(-theta * np.log(u)) * np.expm1(-theta / (1.0 + theta) * np.log(w))
        v = np.exp(-np.log1p(inner) / theta)
        return _clip_open(u), _clip_open(v)

    if model.family == "gumbel":
        theta = model.param
        s = rng.uniform(size=n)
        t = rng.uniform(size=n)
        w = _solve_gumbel_inner(t, theta)
        log_w = np.log(w)
        u = np.exp(s ** (1.0 / theta) * log_w)
        v = np.exp((1.0 - s) ** (1.0 / theta) * log_w)
        return _clip_open(u), _clip_open(v)

    raise NumericError(f"unknown copula family {model.family!r}")
