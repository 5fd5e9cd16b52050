"""Covariance and forecast distributions with per-variable degrees of freedom.

The covariance family generalizes the inverted Wishart by replacing its scalar
degrees of freedom with a diagonal matrix N = diag(n_1, ..., n_p), one entry
per observed variable. For fixed N the reparameterization

    R = N^{1/2} S N^{1/2},        k = 2 v + tr(N) / p,

is a bijection onto the classical inverted Wishart parameters (R, k), so every
density, moment and sampler below collapses to the classical object when all
n_j are equal. The point of the diagonal form is conjugacy under matrix-normal
data in which different variables have accumulated different amounts of
information, e.g. because some variables were missing at some observation
times.

Conventions:

* a p x p covariance Sigma has scale S (p x p), degrees of freedom n (length-p
  vector holding the diagonal of N) and scalar v;
* matrix-normal data Y is r x p with row scale P (r x r) and column covariance
  Sigma (p x p), so vec(Y) has covariance kron(Sigma, P);
* all densities are returned in log space, since gamma-function and
  determinant powers overflow for moderately large degrees of freedom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln
from scipy.stats import invwishart

from .errors import DimensionMismatch, DomainError, MeanUndefined
from .linalg import SpdMatrix, as_spd, cholesky_lower, symmetrize

__all__ = [
    "IgParams",
    "MatrixNormalParams",
    "MiwParams",
    "MtParams",
    "diag_marginal_ig",
    "iw_log_density",
    "iw_to_miw",
    "log_multigamma",
    "matrix_normal_log_density",
    "miw_conditional_update",
    "miw_log_density",
    "miw_marginal_block",
    "miw_mean",
    "miw_to_iw",
    "mt_log_density",
    "sample_matrix_normal",
    "sample_miw",
]

_LOG_2 = math.log(2.0)
_LOG_PI = math.log(math.pi)
_LOG_2PI = math.log(2.0 * math.pi)


def log_multigamma(a: float, p: int) -> float:
    """Log of the p-variate gamma function.

    Evaluated through the product-of-ordinary-gammas expansion
    ``pi^{p(p-1)/4} * prod_j Gamma(a + (1 - j)/2)`` for j = 1..p, which is
    finite exactly when a > (p - 1)/2.
    """
    if p < 1:
        raise DomainError(f"dimension must be a positive integer, got {p}")
    if a <= 0.5 * (p - 1):
        raise DomainError(f"log_multigamma requires a > (p - 1)/2, got a={a}, p={p}")
    j = np.arange(1, p + 1)
    return float(0.25 * p * (p - 1) * _LOG_PI + gammaln(a + 0.5 * (1.0 - j)).sum())


def _sqrt_outer(n: np.ndarray) -> np.ndarray:
    # outer(sqrt(n), sqrt(n)) is exactly symmetric entrywise, so S * _sqrt_outer(n)
    # stays exactly symmetric whenever S is.
    s = np.sqrt(n)
    return np.outer(s, s)


@dataclass(frozen=True, eq=False)
class MiwParams:
    """Covariance law parameters: scale S, per-variable dof n, scalar v.

    Normalizability requires every n_j > 0 and 2 v + sum(n)/p > 2 p, which the
    constructor enforces. ``v`` is kept general here; the filter fixes v = p.
    """

    S: np.ndarray
    n: np.ndarray
    v: float

    def __post_init__(self):
        S = np.asarray(self.S, dtype=float)
        n = np.asarray(self.n, dtype=float)
        if S.ndim != 2 or S.shape[0] != S.shape[1]:
            raise DimensionMismatch(f"scale must be square, got shape {S.shape}")
        p = S.shape[0]
        if n.shape != (p,):
            raise DimensionMismatch(
                f"degrees-of-freedom vector must have shape ({p},), got {n.shape}"
            )
        if not np.all(n > 0.0):
            raise DomainError("all degrees-of-freedom entries must be strictly positive")
        v = float(self.v)
        if 2.0 * v + n.sum() / p <= 2.0 * p:
            raise DomainError(
                f"normalizability requires 2v + mean(n) > 2p, got v={v}, mean(n)={n.mean()}, p={p}"
            )
        object.__setattr__(self, "S", symmetrize(S))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "v", v)

    @property
    def p(self) -> int:
        return self.S.shape[0]

    @property
    def k(self) -> float:
        """Classical degrees of freedom of the equivalent inverted Wishart."""
        return 2.0 * self.v + float(self.n.sum()) / self.p


def miw_to_iw(params: MiwParams) -> tuple[np.ndarray, float]:
    """Map (S, n, v) to the classical inverted Wishart parameters (R, k).

    R = N^{1/2} S N^{1/2} is exactly symmetric by construction.
    """
    return params.S * _sqrt_outer(params.n), params.k


def iw_to_miw(R: np.ndarray, k: float, n: np.ndarray) -> MiwParams:
    """Inverse of :func:`miw_to_iw` for a given dof vector n."""
    R = np.asarray(R, dtype=float)
    n = np.asarray(n, dtype=float)
    p = R.shape[0]
    if n.shape != (p,):
        raise DimensionMismatch(f"dof vector must have shape ({p},), got {n.shape}")
    if not np.all(n > 0.0):
        raise DomainError("all degrees-of-freedom entries must be strictly positive")
    S = R / _sqrt_outer(n)
    v = 0.5 * (float(k) - n.sum() / p)
    return MiwParams(S=S, n=n, v=v)


def iw_log_density(Sigma, R, k: float) -> float:
    """Log density of the inverted Wishart with scale R and degrees of freedom k.

    Density: c |R|^{(k-p-1)/2} |Sigma|^{-k/2} etr(-R Sigma^{-1} / 2), with
    1/c = 2^{(k-p-1)p/2} Gamma_p{(k-p-1)/2}; proper only for k > 2p.
    """
    Sig = as_spd(Sigma)
    Rm = as_spd(R)
    p = Sig.dim
    if Rm.dim != p:
        raise DimensionMismatch(f"scale dim {Rm.dim} does not match argument dim {p}")
    k = float(k)
    if k <= 2.0 * p:
        raise DomainError(f"inverted Wishart requires k > 2p, got k={k}, p={p}")
    a = 0.5 * (k - p - 1.0)
    log_c = -(a * p * _LOG_2 + log_multigamma(a, p))
    trace_term = float(np.trace(Sig.solve(Rm.mat)))
    return log_c + a * Rm.log_det - 0.5 * k * Sig.log_det - 0.5 * trace_term


def miw_log_density(Sigma, params: MiwParams) -> float:
    """Log density of Sigma under the per-variable-dof law.

    Equals the inverted Wishart log density at the mapped parameters (R, k).
    """
    R, k = miw_to_iw(params)
    return iw_log_density(Sigma, R, k)


def miw_mean(params: MiwParams) -> np.ndarray:
    """E(Sigma) = N^{1/2} S N^{1/2} / (mean(n) + 2v - 2p - 2).

    Defined only when the denominator is positive; raises MeanUndefined
    otherwise.
    """
    p = params.p
    denom = params.k - 2.0 * p - 2.0
    if denom <= 0.0:
        raise MeanUndefined(
            f"mean requires mean(n) + 2v > 2p + 2, got mean(n)={params.n.mean()}, v={params.v}"
        )
    R, _ = miw_to_iw(params)
    return R / denom


@dataclass(frozen=True, eq=False)
class MatrixNormalParams:
    """Matrix-normal parameters: mean M (r x p), row scale P, column covariance Sigma."""

    M: np.ndarray
    P: np.ndarray
    Sigma: np.ndarray

    def __post_init__(self):
        M = np.asarray(self.M, dtype=float)
        P = np.asarray(self.P, dtype=float)
        Sigma = np.asarray(self.Sigma, dtype=float)
        if M.ndim != 2:
            raise DimensionMismatch(f"mean must be a 2-d matrix, got shape {M.shape}")
        r, p = M.shape
        if P.shape != (r, r):
            raise DimensionMismatch(f"row scale must have shape ({r}, {r}), got {P.shape}")
        if Sigma.shape != (p, p):
            raise DimensionMismatch(
                f"column covariance must have shape ({p}, {p}), got {Sigma.shape}"
            )
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "P", symmetrize(P))
        object.__setattr__(self, "Sigma", symmetrize(Sigma))

    @property
    def r(self) -> int:
        return self.M.shape[0]

    @property
    def p(self) -> int:
        return self.M.shape[1]


def matrix_normal_log_density(Y, params: MatrixNormalParams) -> float:
    """Log density of the r x p matrix normal; vec(Y) ~ N(vec(M), kron(Sigma, P))."""
    Y = np.asarray(Y, dtype=float)
    if Y.shape != params.M.shape:
        raise DimensionMismatch(f"argument shape {Y.shape} does not match mean {params.M.shape}")
    r, p = params.M.shape
    Pc = as_spd(params.P)
    Sc = as_spd(params.Sigma)
    Z = Pc.solve_half(Y - params.M)
    W = Sc.solve_half(Z.T)
    quad = float(np.sum(W * W))
    return -0.5 * (r * p * _LOG_2PI + p * Pc.log_det + r * Sc.log_det + quad)


def miw_conditional_update(m, P, params: MiwParams, Y) -> MiwParams:
    """Posterior covariance law after observing Y ~ matrix normal (m, P, Sigma).

    Each of the r rows of Y adds one degree of freedom per variable:
    n* = n + r, and the scaled scale accumulates the data quadratic form,
    N*^{1/2} S* N*^{1/2} = N^{1/2} S N^{1/2} + (Y - m)' P^{-1} (Y - m).
    """
    Y = np.asarray(Y, dtype=float)
    m = np.asarray(m, dtype=float)
    if Y.shape != m.shape:
        raise DimensionMismatch(f"data shape {Y.shape} does not match location {m.shape}")
    r, p = Y.shape
    if p != params.p:
        raise DimensionMismatch(f"data has {p} columns but the law has dimension {params.p}")
    Pc = as_spd(P)
    if Pc.dim != r:
        raise DimensionMismatch(f"row scale dim {Pc.dim} does not match {r} data rows")
    Z = Pc.solve_half(Y - m)
    C = symmetrize(Z.T @ Z)
    R0, _ = miw_to_iw(params)
    n_new = params.n + float(r)
    S_new = symmetrize((R0 + C) / _sqrt_outer(n_new))
    return MiwParams(S=S_new, n=n_new, v=params.v)


@dataclass(frozen=True, eq=False)
class MtParams:
    """Matrix-t forecast law: location f (r x p), row scale Q, and (S, n, v).

    This is the marginal of matrix-normal data whose column covariance follows
    the per-variable-dof law; (S, n, v) obey the same normalizability
    constraint as MiwParams.
    """

    f: np.ndarray
    Q: np.ndarray
    S: np.ndarray
    n: np.ndarray
    v: float

    def __post_init__(self):
        f = np.asarray(self.f, dtype=float)
        Q = np.asarray(self.Q, dtype=float)
        S = np.asarray(self.S, dtype=float)
        n = np.asarray(self.n, dtype=float)
        if f.ndim != 2:
            raise DimensionMismatch(f"location must be a 2-d matrix, got shape {f.shape}")
        r, p = f.shape
        if Q.shape != (r, r):
            raise DimensionMismatch(f"row scale must have shape ({r}, {r}), got {Q.shape}")
        if S.shape != (p, p):
            raise DimensionMismatch(f"scale must have shape ({p}, {p}), got {S.shape}")
        if n.shape != (p,):
            raise DimensionMismatch(f"dof vector must have shape ({p},), got {n.shape}")
        if not np.all(n > 0.0):
            raise DomainError("all degrees-of-freedom entries must be strictly positive")
        v = float(self.v)
        if 2.0 * v + n.sum() / p <= 2.0 * p:
            raise DomainError(
                f"normalizability requires 2v + mean(n) > 2p, got v={v}, mean(n)={n.mean()}, p={p}"
            )
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "Q", symmetrize(Q))
        object.__setattr__(self, "S", symmetrize(S))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "v", v)

    @property
    def r(self) -> int:
        return self.f.shape[0]

    @property
    def p(self) -> int:
        return self.f.shape[1]


def mt_log_density(Y, params: MtParams) -> float:
    """Log density of the matrix-t law above, with kernel exponent built from r.

    With k = 2v - 2p + sum(n)/p the density is

        c |N^{1/2} S N^{1/2} + (Y - f)' Q^{-1} (Y - f)|^{-(k + r + p - 1)/2},
        c = Gamma_p{(k+r+p-1)/2} (|S| prod_j n_j)^{(k+p-1)/2} |Q|^{-p/2}
            / (pi^{rp/2} Gamma_p{(k+p-1)/2}),

    which makes Bayes' rule exact against the matrix-normal likelihood and the
    conjugate prior/posterior pair.
    """
    Y = np.asarray(Y, dtype=float)
    if Y.shape != params.f.shape:
        raise DimensionMismatch(f"argument shape {Y.shape} does not match location {params.f.shape}")
    r, p = params.f.shape
    k = 2.0 * params.v - 2.0 * p + float(params.n.sum()) / p
    a1 = 0.5 * (k + r + p - 1.0)
    a0 = 0.5 * (k + p - 1.0)
    Qc = as_spd(params.Q)
    Sc = as_spd(params.S)
    Z = Qc.solve_half(Y - params.f)
    inner = params.S * _sqrt_outer(params.n) + symmetrize(Z.T @ Z)
    log_det_r0 = Sc.log_det + float(np.log(params.n).sum())
    log_c = (
        log_multigamma(a1, p)
        - log_multigamma(a0, p)
        - 0.5 * r * p * _LOG_PI
        + a0 * log_det_r0
        - 0.5 * p * Qc.log_det
    )
    return log_c - a1 * as_spd(inner).log_det


def miw_marginal_block(params: MiwParams, q: int) -> MiwParams:
    """Law of the leading q x q block of Sigma.

    The block keeps its own scale block and dof entries; the scalar adjusts to
    v1 = v - p + q + sum(n)/(2p) - sum(n_1..n_q)/(2q). For q = p this is the
    identity map.
    """
    p = params.p
    if not 1 <= q <= p:
        raise DomainError(f"block size must satisfy 1 <= q <= p, got q={q}, p={p}")
    if q == p:
        return params
    n_head = params.n[:q]
    v1 = params.v - p + q + float(params.n.sum()) / (2.0 * p) - float(n_head.sum()) / (2.0 * q)
    return MiwParams(S=params.S[:q, :q], n=n_head, v=v1)


@dataclass(frozen=True)
class IgParams:
    """Inverted gamma parameters: density proportional to x^{-shape-1} exp(-scale/x)."""

    shape: float
    scale: float

    def __post_init__(self):
        if self.shape <= 0.0 or self.scale <= 0.0:
            raise DomainError(
                f"inverted gamma requires positive parameters, got shape={self.shape}, scale={self.scale}"
            )


def diag_marginal_ig(params: MiwParams, index: int) -> IgParams:
    """Marginal law of the diagonal entry sigma_{jj} (0-based index).

    The 1 x 1 block marginal is an inverted gamma with shape
    v + sum(n)/(2p) - p (independent of the entry) and scale n_j s_jj / 2.
    """
    p = params.p
    if not 0 <= index < p:
        raise DomainError(f"index must satisfy 0 <= index < {p}, got {index}")
    shape = params.v + float(params.n.sum()) / (2.0 * p) - p
    scale = 0.5 * params.n[index] * params.S[index, index]
    return IgParams(shape=float(shape), scale=float(scale))


def sample_miw(params: MiwParams, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Draw Sigma from the per-variable-dof law.

    Uses the classical inverted Wishart at the mapped parameters (R, k), with
    effective Wishart degrees of freedom k - p - 1. Deterministic for a fixed
    generator state. Returns (p, p) for size=None, else (size, p, p).
    """
    R, k = miw_to_iw(params)
    p = params.p
    df = k - p - 1.0
    m = 1 if size is None else int(size)
    if m < 1:
        raise DomainError(f"size must be a positive integer, got {size}")
    draws = invwishart.rvs(df=df, scale=R, size=m, random_state=rng)
    draws = np.asarray(draws, dtype=float).reshape(m, p, p)
    draws = 0.5 * (draws + np.transpose(draws, (0, 2, 1)))
    return draws[0] if size is None else draws


def sample_matrix_normal(
    params: MatrixNormalParams, rng: np.random.Generator, size: int | None = None
) -> np.ndarray:
    """Draw Y = M + L_P Z L_Sigma' with Z iid standard normal.

    Returns (r, p) for size=None, else (size, r, p).
    """
    r, p = params.M.shape
    Lp = cholesky_lower(params.P)
    Ls = cholesky_lower(params.Sigma)
    if size is None:
        Z = rng.standard_normal((r, p))
    else:
        m = int(size)
        if m < 1:
            raise DomainError(f"size must be a positive integer, got {size}")
        Z = rng.standard_normal((m, r, p))
    return params.M + Lp @ Z @ Ls.T
