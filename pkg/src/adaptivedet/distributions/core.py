"""Complex noncentral chi-square, F, and Beta distributions.

Conventions (fixed package-wide):

* ``t ~ CChi2(k, delta)``  iff  ``2 t`` is real noncentral chi-square with
  ``2 k`` degrees of freedom and noncentrality ``2 delta``.  The central case
  is a unit-rate Erlang with shape ``k``.
* ``CF(m, n, delta)`` is the ratio ``A / B`` of independent ``A ~ CChi2(m,
  delta)`` and central ``B ~ CChi2(n)`` with no degree-of-freedom
  normalization.
* ``CBeta(a, b, delta)`` is ``A / (A + B)`` with central ``A ~ CChi2(a)`` and
  noncentral ``B ~ CChi2(b, delta)``: the noncentrality sits on the *b*
  component, so increasing ``delta`` pushes mass toward zero (loss-factor
  semantics).

All CDFs/PDFs are Poisson mixtures over central terms; the mixture window is
truncated where the Poisson tail mass drops below ``POISSON_TAIL`` and the
per-term incomplete beta/gamma values are advanced by exact integer-shape
recurrences, so a mixture costs one special-function call plus a cumulative
sum.
"""

from dataclasses import dataclass

import numpy as np
from scipy import special

POISSON_TAIL = 1e-12
POISSON_TERM_CAP = 100_000


def poisson_window(delta: float):
    """Index window and weights of a Poisson(delta) pmf covering all but
    ``POISSON_TAIL`` of the mass (hard cap ``POISSON_TERM_CAP`` terms)."""
    if delta < 0:
        raise ValueError("noncentrality must be nonnegative")
    if delta == 0.0:
        return 0, np.ones(1)
    sd = np.sqrt(delta)
    j_lo = max(0, int(np.floor(delta - 10.0 * sd - 30.0)))
    j_hi = int(np.ceil(delta + 10.0 * sd + 30.0))
    j_hi = min(j_hi, j_lo + POISSON_TERM_CAP - 1)
    j = np.arange(j_lo, j_hi + 1, dtype=float)
    w = np.exp(j * np.log(delta) - delta - special.gammaln(j + 1.0))
    return j_lo, w


def _validate_shape(name: str, value: int) -> int:
    if int(value) != value or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class ComplexChi2:
    """Complex noncentral chi-square with ``k`` complex DOFs, noncentrality ``delta``."""

    k: int
    delta: float = 0.0

    def __post_init__(self):
        _validate_shape("k", self.k)
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")

    def cdf(self, t):
        t, scalar = _as_grid(t)
        if np.any(t < 0):
            raise ValueError("chi-square argument must be nonnegative")
        j0, w = poisson_window(self.delta)
        p0 = special.gammainc(self.k + j0, t)
        # P(a+1, t) = P(a, t) - t^a e^-t / Gamma(a+1), advanced by cumprod/cumsum
        terms = _gamma_terms(self.k + j0, t, len(w))
        p = p0[None, :] - np.concatenate(
            [np.zeros((1, t.size)), np.cumsum(terms[:-1], axis=0)], axis=0
        )
        out = np.clip(w @ p, 0.0, 1.0)
        return out[0] if scalar else out

    def sf(self, t):
        t, scalar = _as_grid(t)
        if np.any(t < 0):
            raise ValueError("chi-square argument must be nonnegative")
        j0, w = poisson_window(self.delta)
        q0 = special.gammaincc(self.k + j0, t)
        terms = _gamma_terms(self.k + j0, t, len(w))
        q = q0[None, :] + np.concatenate(
            [np.zeros((1, t.size)), np.cumsum(terms[:-1], axis=0)], axis=0
        )
        out = np.clip(w @ q, 0.0, 1.0)
        return out[0] if scalar else out

    def sample(self, rng, size=None):
        """Draw via ``2k`` unit-variance real normal squares with mean offsets."""
        n = 1 if size is None else int(size)
        g = rng.standard_normal((n, 2 * self.k))
        g[:, 0] += np.sqrt(2.0 * self.delta)
        out = 0.5 * np.sum(g * g, axis=1)
        return float(out[0]) if size is None else out


@dataclass(frozen=True)
class ComplexF:
    """Ratio ``A/B`` of complex chi-squares; ``m``/``n`` DOFs, numerator noncentrality."""

    m: int
    n: int
    delta: float = 0.0

    def __post_init__(self):
        _validate_shape("m", self.m)
        _validate_shape("n", self.n)
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")

    def cdf(self, t):
        t, scalar = _as_grid(t)
        if np.any(t < 0):
            raise ValueError("F argument must be nonnegative")
        out = 1.0 - _cf_sf_core(self.m, self.n, np.full_like(t, self.delta), t)
        return out[0] if scalar else np.clip(out, 0.0, 1.0)

    def sf(self, t):
        t, scalar = _as_grid(t)
        if np.any(t < 0):
            raise ValueError("F argument must be nonnegative")
        out = _cf_sf_core(self.m, self.n, np.full_like(t, self.delta), t)
        return out[0] if scalar else out

    def sample(self, rng, size=None):
        num = ComplexChi2(self.m, self.delta).sample(rng, size=size or 1)
        den = ComplexChi2(self.n).sample(rng, size=size or 1)
        out = np.asarray(num) / np.asarray(den)
        return float(out[0]) if size is None else out


@dataclass(frozen=True)
class ComplexBeta:
    """``A/(A+B)`` with central ``A ~ CChi2(a)`` and ``B ~ CChi2(b, delta)``."""

    a: int
    b: int
    delta: float = 0.0

    def __post_init__(self):
        _validate_shape("a", self.a)
        _validate_shape("b", self.b)
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")

    def cdf(self, x):
        x, scalar = _as_grid(x)
        if np.any((x < 0) | (x > 1)):
            raise ValueError("beta argument must lie in [0, 1]")
        j0, w = poisson_window(self.delta)
        c0 = special.betainc(self.a, self.b + j0, x)
        # I_x(a, b+1) = I_x(a, b) + x^a (1-x)^b / (b B(a, b))
        terms = _beta_cdf_terms(self.a, self.b + j0, x, len(w))
        c = c0[None, :] + np.concatenate(
            [np.zeros((1, x.size)), np.cumsum(terms[:-1], axis=0)], axis=0
        )
        out = np.clip(w @ c, 0.0, 1.0)
        return out[0] if scalar else out

    def pdf(self, x):
        x, scalar = _as_grid(x)
        if np.any((x < 0) | (x > 1)):
            raise ValueError("beta argument must lie in [0, 1]")
        out = cbeta_pdf_grid(self.a, self.b, self.delta, x)
        return out[0] if scalar else out

    def sample(self, rng, size=None):
        num = np.asarray(ComplexChi2(self.a).sample(rng, size=size or 1))
        den = np.asarray(ComplexChi2(self.b, self.delta).sample(rng, size=size or 1))
        out = num / (num + den)
        return float(out[0]) if size is None else out


def _as_grid(x):
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    return arr, np.isscalar(x) or np.ndim(x) == 0


def _gamma_terms(a0: int, t: np.ndarray, count: int) -> np.ndarray:
    """Rows ``j``: ``t^(a0+j) e^-t / Gamma(a0+j+1)`` for ``j = 0..count-1``."""
    with np.errstate(divide="ignore", invalid="ignore"):
        log0 = a0 * np.log(t) - t - special.gammaln(a0 + 1.0)
        d0 = np.where(t > 0, np.exp(log0), 0.0)
    if count == 1:
        return d0[None, :]
    j = np.arange(1, count, dtype=float)[:, None]
    ratios = t[None, :] / (a0 + j)
    return np.concatenate([d0[None, :], d0[None, :] * np.cumprod(ratios, axis=0)], axis=0)


def _beta_cdf_terms(a: int, b0: int, x: np.ndarray, count: int) -> np.ndarray:
    """Rows ``j``: ``x^a (1-x)^(b0+j) / ((b0+j) B(a, b0+j))``."""
    with np.errstate(divide="ignore", invalid="ignore"):
        log0 = (
            a * np.log(x)
            + b0 * np.log1p(-x)
            - np.log(b0)
            - special.betaln(a, b0)
        )
        e0 = np.where((x > 0) & (x < 1), np.exp(log0), 0.0)
    if count == 1:
        return e0[None, :]
    j = np.arange(0, count - 1, dtype=float)[:, None]
    ratios = (1.0 - x)[None, :] * (a + b0 + j) / (b0 + j + 1.0)
    return np.concatenate([e0[None, :], e0[None, :] * np.cumprod(ratios, axis=0)], axis=0)


def cbeta_pdf_grid(a: int, b: int, delta: float, x: np.ndarray) -> np.ndarray:
    """Vectorized noncentral-Beta density on a grid (shared Poisson window)."""
    j0, w = poisson_window(delta)
    with np.errstate(divide="ignore", invalid="ignore"):
        log0 = (
            (a - 1.0) * np.log(x)
            + (b + j0 - 1.0) * np.log1p(-x)
            - special.betaln(a, b + j0)
        )
        interior = (x > 0) & (x < 1)
        f0 = np.where(interior, np.exp(np.where(interior, log0, 0.0)), 0.0)
    _edge_pdf(a, b + j0, x, f0)
    if len(w) == 1:
        return f0
    j = np.arange(0, len(w) - 1, dtype=float)[:, None]
    ratios = (1.0 - x)[None, :] * (a + b + j0 + j) / (b + j0 + j)
    rows = np.concatenate([f0[None, :], f0[None, :] * np.cumprod(ratios, axis=0)], axis=0)
    return w @ rows


def _edge_pdf(a, b, x, out):
    # Integer shapes: density at the endpoints is finite only for unit shapes.
    if a == 1:
        out[x == 0.0] = b  # central Beta(1, b) density at 0
    if np.ndim(b) == 0 and b == 1:
        out[x == 1.0] = a


def _cf_sf_core(m: int, n: int, deltas: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """Survival of ``CF(m, n, delta_i)`` at ``t_i``, vectorized over nodes.

    Shares one Poisson index window across all nodes (union of per-node
    windows), advancing ``I_y(m+j, n)`` by the integer-shape recurrence.
    """
    deltas = np.asarray(deltas, dtype=float)
    ts = np.asarray(ts, dtype=float)
    y = ts / (1.0 + ts)
    one_my = 1.0 / (1.0 + ts)
    dmax = float(deltas.max()) if deltas.size else 0.0
    dmin = float(deltas.min()) if deltas.size else 0.0
    j_hi = poisson_window(dmax)[0] + len(poisson_window(dmax)[1]) - 1
    j_lo = poisson_window(dmin)[0]
    count = j_hi - j_lo + 1
    j = np.arange(j_lo, j_hi + 1, dtype=float)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        logw = j * np.log(np.maximum(deltas, np.finfo(float).tiny))[None, :] - deltas[None, :] - special.gammaln(j + 1.0)
        w = np.exp(logw)
    # delta == 0 columns come out right: j_lo is 0 whenever any delta is 0,
    # the j = 0 row gives weight 1 and higher rows underflow to 0.
    # survival of the central term at the window base
    s0 = special.betainc(n, m + j_lo, one_my)
    with np.errstate(divide="ignore", invalid="ignore"):
        logd0 = (
            (m + j_lo) * np.log(y)
            + n * np.log(one_my)
            - np.log(m + j_lo)
            - special.betaln(m + j_lo, n)
        )
        d0 = np.where(y > 0, np.exp(logd0), 0.0)
    if count > 1:
        jj = np.arange(0, count - 1, dtype=float)[:, None]
        ratios = y[None, :] * (m + n + j_lo + jj) / (m + j_lo + jj + 1.0)
        d = np.concatenate([d0[None, :], d0[None, :] * np.cumprod(ratios, axis=0)], axis=0)
        s = s0[None, :] + np.concatenate(
            [np.zeros((1, ts.size)), np.cumsum(d[:-1], axis=0)], axis=0
        )
    else:
        s = s0[None, :]
    return np.clip(np.sum(w * s, axis=0), 0.0, 1.0)


def cf_sf_nodes(m: int, n: int, deltas, ts) -> np.ndarray:
    """Public wrapper of the node-vectorized ``CF`` survival (used by quadrature)."""
    deltas = np.atleast_1d(np.asarray(deltas, dtype=float))
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if deltas.shape != ts.shape:
        deltas, ts = np.broadcast_arrays(deltas, ts)
    return _cf_sf_core(m, n, deltas, ts)
