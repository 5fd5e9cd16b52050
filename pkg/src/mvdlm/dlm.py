"""Sequential filtering for matrix-variate dynamic linear models.

The model at each time t is

    Y_t = F_t' Theta_t + E_t,        rows of Y_t are r replicate observations
    Theta_t = G_t Theta_{t-1} + O_t, state is d x p,

with E_t matrix normal (0, V_t, Sigma), O_t matrix normal (0, W_t, Sigma), and
Sigma carrying the per-variable degrees-of-freedom covariance law from
:mod:`mvdlm.distributions`. Conjugacy gives closed-form one-step priors,
matrix-t forecasts, and posterior updates.

Missing data are handled through diagonal 0/1 masks: each observed variable
updates its own degrees-of-freedom entry while fully missing variables keep
their prior moments. The classical alternative (``mode="classical"``) discards
the entire observation whenever any entry is missing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .distributions import MiwParams, MtParams, miw_to_iw
from .errors import (
    ConfigError,
    DimensionMismatch,
    DomainError,
    FilterError,
    MvdlmError,
)
from .linalg import SpdMatrix, symmetrize

__all__ = [
    "FilterOutput",
    "ForecastResult",
    "MaskSet",
    "MaskedObservation",
    "ModelSpec",
    "NmiwState",
    "build_masks",
    "correlation_estimate",
    "discount_noise",
    "evolve",
    "filter",
    "forecast",
    "msse",
    "update_classical",
    "update_full",
    "update_missing",
]

MatrixProvider = Union[np.ndarray, Callable[[int], np.ndarray]]


def _materialize(entry: MatrixProvider, t: int, shape: tuple[int, int], name: str) -> np.ndarray:
    m = entry(t) if callable(entry) else entry
    m = np.asarray(m, dtype=float)
    if m.shape != shape:
        raise DimensionMismatch(f"{name} at t={t} must have shape {shape}, got {m.shape}")
    return m


@dataclass(eq=False)
class ModelSpec:
    """Model dimensions and per-time design inputs.

    F, G, V (and W, when explicit) may be constant arrays or callables mapping
    the 1-based time index to an array. Exactly one of ``W`` and ``discount``
    must be given: an explicit evolution scale, or a discount factor delta in
    (0, 1] that sets W_t = (1 - delta)/delta * G P_{t-1} G', i.e. R_t =
    G P_{t-1} G' / delta.
    """

    d: int
    p: int
    r: int
    F: MatrixProvider
    G: MatrixProvider
    V: MatrixProvider
    W: MatrixProvider | None = None
    discount: float | None = None

    def __post_init__(self):
        for name, value in (("d", self.d), ("p", self.p), ("r", self.r)):
            if int(value) < 1:
                raise DomainError(f"{name} must be a positive integer, got {value}")
        self.d, self.p, self.r = int(self.d), int(self.p), int(self.r)
        if (self.W is None) == (self.discount is None):
            raise ConfigError(
                "exactly one of an explicit evolution scale W and a discount factor must be given",
                section="model",
            )
        if self.discount is not None:
            delta = float(self.discount)
            if not 0.0 < delta <= 1.0:
                raise DomainError(f"discount factor must lie in (0, 1], got {delta}")
            self.discount = delta

    def F_at(self, t: int) -> np.ndarray:
        return _materialize(self.F, t, (self.d, self.r), "F")

    def G_at(self, t: int) -> np.ndarray:
        return _materialize(self.G, t, (self.d, self.d), "G")

    def V_at(self, t: int) -> np.ndarray:
        return _materialize(self.V, t, (self.r, self.r), "V")

    def W_at(self, t: int) -> np.ndarray | None:
        if self.W is None:
            return None
        return _materialize(self.W, t, (self.d, self.d), "W")


@dataclass(frozen=True, eq=False)
class NmiwState:
    """Conjugate state: mean m (d x p), row scale P (d x d), covariance law miw."""

    m: np.ndarray
    P: np.ndarray
    miw: MiwParams

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float)
        P = np.asarray(self.P, dtype=float)
        if m.ndim != 2:
            raise DimensionMismatch(f"state mean must be 2-d, got shape {m.shape}")
        d, p = m.shape
        if P.shape != (d, d):
            raise DimensionMismatch(f"state scale must have shape ({d}, {d}), got {P.shape}")
        if self.miw.p != p:
            raise DimensionMismatch(
                f"covariance law dimension {self.miw.p} does not match state columns {p}"
            )
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "P", P)

    @property
    def d(self) -> int:
        return self.m.shape[0]

    @property
    def p(self) -> int:
        return self.m.shape[1]


@dataclass(frozen=True, eq=False)
class MaskedObservation:
    """r x p observation with an entrywise observed/missing mask.

    ``y`` holds the observed values; entries where ``observed`` is False are
    undefined and stored as NaN. Row k is replicate k, column j is variable j.
    """

    y: np.ndarray
    observed: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        observed = np.asarray(self.observed, dtype=bool)
        if y.ndim != 2:
            raise DimensionMismatch(f"observation must be 2-d, got shape {y.shape}")
        if observed.shape != y.shape:
            raise DimensionMismatch(
                f"mask shape {observed.shape} does not match observation shape {y.shape}"
            )
        if not np.all(np.isfinite(y[observed])):
            raise DomainError("observed entries must be finite")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "observed", observed)

    @classmethod
    def from_values(cls, values) -> "MaskedObservation":
        """Build from an r x p array in which missing entries are NaN."""
        values = np.asarray(values, dtype=float)
        return cls(y=values, observed=np.isfinite(values))

    @classmethod
    def fully_observed(cls, values) -> "MaskedObservation":
        values = np.asarray(values, dtype=float)
        return cls(y=values, observed=np.ones(values.shape, dtype=bool))

    @property
    def r(self) -> int:
        return self.y.shape[0]

    @property
    def p(self) -> int:
        return self.y.shape[1]


@dataclass(frozen=True, eq=False)
class MaskSet:
    """Diagonal masks derived from one observation.

    uk[k] is the 0/1 diagonal for replicate k; uprod and usum are the
    elementwise product and sum over replicates; u = mean(uprod) is the
    fraction of variables observed in every replicate.
    """

    uk: np.ndarray
    uprod: np.ndarray
    usum: np.ndarray
    u: float


def build_masks(obs: MaskedObservation) -> MaskSet:
    uk = obs.observed.astype(float)
    uprod = uk.prod(axis=0)
    usum = uk.sum(axis=0)
    u = float(uprod.sum()) / obs.p
    return MaskSet(uk=uk, uprod=uprod, usum=usum, u=u)


@dataclass(eq=False)
class ForecastResult:
    """One-step forecast: location f (r x p), row scale Q, gain A (d x r), and
    the matrix-t forecast law whose (S, n, v) come from the time-(t-1)
    posterior. ``e`` is filled in by the filter once the observation arrives
    (residual with missing entries set to 0)."""

    f: np.ndarray
    Q: SpdMatrix
    A: np.ndarray
    marginal: MtParams
    e: np.ndarray | None = None


def evolve(state: NmiwState, G, W) -> tuple[np.ndarray, np.ndarray]:
    """One-step prior moments: a = G m, R = G P G' + W (symmetrized)."""
    G = np.asarray(G, dtype=float)
    W = np.asarray(W, dtype=float)
    d = state.d
    if G.shape != (d, d):
        raise DimensionMismatch(f"G must have shape ({d}, {d}), got {G.shape}")
    if W.shape != (d, d):
        raise DimensionMismatch(f"W must have shape ({d}, {d}), got {W.shape}")
    a = G @ state.m
    R = symmetrize(G @ state.P @ G.T + W)
    return a, R


def discount_noise(P, G, delta: float) -> np.ndarray:
    """Evolution scale implied by a discount factor: W = (1 - delta)/delta * G P G'."""
    delta = float(delta)
    if not 0.0 < delta <= 1.0:
        raise DomainError(f"discount factor must lie in (0, 1], got {delta}")
    P = np.asarray(P, dtype=float)
    G = np.asarray(G, dtype=float)
    return ((1.0 - delta) / delta) * symmetrize(G @ P @ G.T)


def forecast(a, R, F, V, miw: MiwParams) -> ForecastResult:
    """One-step forecast from prior moments (a, R) and design (F, V).

    f = F'a, Q = F'RF + V, gain A = R F Q^{-1}; the forecast law is matrix-t
    with (S, n, v) inherited from the covariance law.
    """
    a = np.asarray(a, dtype=float)
    R = np.asarray(R, dtype=float)
    F = np.asarray(F, dtype=float)
    V = np.asarray(V, dtype=float)
    d, p = a.shape
    if F.ndim != 2 or F.shape[0] != d:
        raise DimensionMismatch(f"F must have {d} rows, got shape {F.shape}")
    r = F.shape[1]
    if V.shape != (r, r):
        raise DimensionMismatch(f"V must have shape ({r}, {r}), got {V.shape}")
    if R.shape != (d, d):
        raise DimensionMismatch(f"R must have shape ({d}, {d}), got {R.shape}")
    f = F.T @ a
    RF = R @ F
    Q = SpdMatrix(F.T @ RF + V)
    A = Q.solve(RF.T).T
    marginal = MtParams(f=f, Q=Q.mat, S=miw.S, n=miw.n, v=miw.v)
    return ForecastResult(f=f, Q=Q, A=A, marginal=marginal)


def _masked_update(
    prior: NmiwState,
    fc: ForecastResult,
    e: np.ndarray,
    wprod: np.ndarray,
    wsum: np.ndarray,
    u: float,
) -> NmiwState:
    # Shared core for full and masked updates. With all-ones masks every mask
    # multiplication is exact, so the fully observed path is bit-identical to
    # the unmasked recursion.
    A = fc.A
    Q = fc.Q
    m = prior.m + (A @ e) * wprod
    P = symmetrize(prior.P - (A @ Q.mat @ A.T) * u)
    Z = Q.solve_half(e)
    C = symmetrize(Z.T @ Z) * np.outer(wprod, wprod)
    miw = prior.miw
    R0, _ = miw_to_iw(miw)
    n_new = miw.n + wsum
    sn = np.sqrt(n_new)
    S_new = symmetrize((R0 + C) / np.outer(sn, sn))
    return NmiwState(m=m, P=P, miw=MiwParams(S=S_new, n=n_new, v=miw.v))


def update_full(prior: NmiwState, fc: ForecastResult, y) -> NmiwState:
    """Posterior after a fully observed r x p observation."""
    y = np.asarray(y, dtype=float)
    r, p = fc.f.shape
    if y.shape != (r, p):
        raise DimensionMismatch(f"observation must have shape ({r}, {p}), got {y.shape}")
    if not np.all(np.isfinite(y)):
        raise DomainError("update_full requires a fully observed, finite observation")
    e = y - fc.f
    ones = np.ones(p)
    return _masked_update(prior, fc, e, ones, float(r) * ones, 1.0)


def update_missing(prior: NmiwState, fc: ForecastResult, obs: MaskedObservation) -> NmiwState:
    """Posterior update that uses every observed entry of a partially missing
    observation.

    Mean and scale updates are masked by the product mask (a variable must be
    observed in every replicate to move the mean), degrees of freedom advance
    by the per-variable observed counts, and a fully missing observation
    returns the prior unchanged.
    """
    r, p = fc.f.shape
    if obs.y.shape != (r, p):
        raise DimensionMismatch(f"observation must have shape ({r}, {p}), got {obs.y.shape}")
    if not obs.observed.any():
        return prior
    masks = build_masks(obs)
    e = np.where(obs.observed, obs.y - fc.f, 0.0)
    return _masked_update(prior, fc, e, masks.uprod, masks.usum, masks.u)


def update_classical(prior: NmiwState, fc: ForecastResult, obs: MaskedObservation) -> NmiwState:
    """Classical handling: discard the whole observation if anything is missing."""
    if obs.observed.all():
        return update_full(prior, fc, obs.y)
    return prior


def correlation_estimate(state: NmiwState, i: int, j: int) -> float:
    """Correlation implied by the posterior scale: S_ij / sqrt(S_ii S_jj)."""
    S = state.miw.S
    p = S.shape[0]
    if not (0 <= i < p and 0 <= j < p):
        raise DomainError(f"indices must lie in [0, {p}), got i={i}, j={j}")
    if i == j:
        raise DomainError("correlation_estimate requires two distinct variables")
    sii, sjj = S[i, i], S[j, j]
    if sii <= 0.0 or sjj <= 0.0:
        raise DomainError("scale diagonal must be strictly positive")
    return float(S[i, j] / np.sqrt(sii * sjj))


def _corr_matrix(S: np.ndarray) -> np.ndarray:
    d = np.sqrt(np.diag(S))
    return S / np.outer(d, d)


@dataclass(eq=False)
class FilterOutput:
    """Per-time filter records plus summary hooks.

    Arrays are stacked over time: priors (a, R), forecasts (f, Q, A), masked
    residuals e (missing entries 0), standardized errors (NaN where missing),
    observation masks, posterior states, matrix-t forecast laws, and the
    correlation matrices implied by each posterior scale.
    """

    mode: str
    times: np.ndarray
    a: np.ndarray
    R: np.ndarray
    f: np.ndarray
    Q: np.ndarray
    A: np.ndarray
    e: np.ndarray
    std_err: np.ndarray
    observed: np.ndarray
    states: list[NmiwState]
    marginals: list[MtParams]
    masks: list[MaskSet]
    corr: np.ndarray
    _msse: np.ndarray | None = field(default=None, repr=False)

    @property
    def T(self) -> int:
        return len(self.times)

    @property
    def msse(self) -> np.ndarray:
        if self._msse is None:
            self._msse = msse(self)
        return self._msse


def filter(
    model: ModelSpec,
    data: Sequence[MaskedObservation],
    prior: NmiwState,
    mode: str = "new",
) -> FilterOutput:
    """Run the forward filter over a sequence of (possibly masked) observations.

    ``mode="new"`` applies the per-variable masked update; ``mode="classical"``
    discards any observation with a missing entry. Numerical failures are
    re-raised with the failing 1-based time index attached.
    """
    if mode not in ("new", "classical"):
        raise DomainError(f"mode must be 'new' or 'classical', got {mode!r}")
    if len(data) == 0:
        raise DomainError("data must contain at least one observation")
    if prior.d != model.d or prior.p != model.p:
        raise DimensionMismatch(
            f"prior has shape ({prior.d}, {prior.p}), model declares ({model.d}, {model.p})"
        )

    state = prior
    a_l, R_l, f_l, Q_l, A_l, e_l, se_l, obs_l, corr_l = [], [], [], [], [], [], [], [], []
    states: list[NmiwState] = []
    marginals: list[MtParams] = []
    mask_l: list[MaskSet] = []

    for t, obs in enumerate(data, start=1):
        if not isinstance(obs, MaskedObservation):
            obs = MaskedObservation.from_values(obs)
        if obs.y.shape != (model.r, model.p):
            raise DimensionMismatch(
                f"observation at t={t} must have shape ({model.r}, {model.p}), got {obs.y.shape}"
            )
        try:
            G = model.G_at(t)
            W = model.W_at(t)
            if W is None:
                W = discount_noise(state.P, G, model.discount)
            a, R = evolve(state, G, W)
            prior_t = NmiwState(m=a, P=R, miw=state.miw)
            fc = forecast(a, R, model.F_at(t), model.V_at(t), state.miw)
            if mode == "new":
                post = update_missing(prior_t, fc, obs)
            else:
                post = update_classical(prior_t, fc, obs)
        except MvdlmError as exc:
            raise FilterError(str(exc), t=t) from exc

        e = np.where(obs.observed, obs.y - fc.f, 0.0)
        fc.e = e
        denom = np.sqrt(np.outer(np.diag(fc.Q.mat), np.diag(state.miw.S)))
        std = np.where(obs.observed, e / denom, np.nan)

        a_l.append(a)
        R_l.append(R)
        f_l.append(fc.f)
        Q_l.append(fc.Q.mat)
        A_l.append(fc.A)
        e_l.append(e)
        se_l.append(std)
        obs_l.append(obs.observed)
        corr_l.append(_corr_matrix(post.miw.S))
        states.append(post)
        marginals.append(fc.marginal)
        mask_l.append(build_masks(obs))
        state = post

    return FilterOutput(
        mode=mode,
        times=np.arange(1, len(data) + 1),
        a=np.stack(a_l),
        R=np.stack(R_l),
        f=np.stack(f_l),
        Q=np.stack(Q_l),
        A=np.stack(A_l),
        e=np.stack(e_l),
        std_err=np.stack(se_l),
        observed=np.stack(obs_l),
        states=states,
        marginals=marginals,
        masks=mask_l,
        corr=np.stack(corr_l),
    )


def msse(output: FilterOutput) -> np.ndarray:
    """Mean of squared standardized one-step errors, one entry per variable.

    Entry (t, k, j) is standardized by sqrt(Q_t[k, k] * S_{t-1}[j, j]), the
    forecast row scale diagonal times the prior scale diagonal; the mean for
    variable j runs over all observed entries of that variable. Raises if some
    variable is never observed.
    """
    p = output.std_err.shape[2]
    out = np.empty(p)
    for j in range(p):
        vals = output.std_err[:, :, j][output.observed[:, :, j]]
        if vals.size == 0:
            raise DomainError(f"variable {j} is never observed; its MSSE is undefined")
        out[j] = np.mean(vals**2)
    return out
