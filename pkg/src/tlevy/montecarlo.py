"""Ensemble simulation of truncated Levy walks and the estimators built on it.

Increments are exact draws from ``C * P_L(x) * g(x/ell)``: a stable
variate is accepted with probability ``g(x/ell)``.  All estimators use
moments about the origin, which is the true mean by symmetry.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import kernels
from .errors import DomainError, IterationLimitError
from .stable import stable_peak_density, stable_sample
from .truncation import Family, TlfModel

MIN_WALKERS = 100
#: half-width of the return window in units of gamma * n**(1/alpha)
RETURN_WINDOW = 0.1
#: Levy-regime guard on n * epsilon
LEVY_GUARD = 0.1

_SALT_WALK = 0
_SALT_SINGLE = 0x5EED


@dataclass(frozen=True)
class WalkConfig:
    model: TlfModel
    steps: int
    walkers: int
    seed: int
    record_steps: tuple = field(default=())

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 1:
            raise DomainError(f"steps must be a positive integer, got {self.steps!r}")
        if int(self.walkers) != self.walkers or self.walkers < MIN_WALKERS:
            raise DomainError(f"walkers must be an integer >= {MIN_WALKERS}, got {self.walkers!r}")
        kernels.stream_base(self.seed)
        rec = tuple(self.record_steps) or (int(self.steps),)
        if any(int(n) != n for n in rec):
            raise DomainError("record steps must be integers")
        rec = tuple(sorted({int(n) for n in rec}))
        if rec[0] < 1 or rec[-1] > self.steps:
            raise DomainError(f"record steps must lie in [1, {self.steps}], got {list(rec)}")
        object.__setattr__(self, "steps", int(self.steps))
        object.__setattr__(self, "walkers", int(self.walkers))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "record_steps", rec)


@dataclass(frozen=True)
class EnsembleStats:
    """Per recorded step count: moments, kurtosis and return density with errors."""

    n: np.ndarray
    variance: np.ndarray
    variance_se: np.ndarray
    kurtosis: np.ndarray
    kurtosis_se: np.ndarray
    return_density: np.ndarray
    return_density_se: np.ndarray
    count: np.ndarray
    mean: np.ndarray
    mean_se: np.ndarray

    COLUMNS = ("n", "variance", "variance_se", "kurtosis", "kurtosis_se",
               "return_density", "return_density_se", "count")

    def rows(self):
        return [{c: (int(getattr(self, c)[i]) if c in ("n", "count") else float(getattr(self, c)[i]))
                 for c in self.COLUMNS} for i in range(len(self.n))]


def _model_args(model: TlfModel):
    spec = model.deformation
    if spec.family is Family.CUSTOM:
        return None, None, spec.evaluator
    return spec.family.value, spec.h, None


def run_walks(config: WalkConfig, backend: str | None = None, salt: int = _SALT_WALK) -> np.ndarray:
    """Positions at the recorded steps, shape ``(len(record_steps), walkers)``."""
    m = config.model
    fam, h, ev = _model_args(m)
    gfun = None
    if ev is not None:
        spec = m.deformation
        gfun = lambda xi: np.asarray(spec(xi), dtype=float)  # noqa: E731
    return kernels.walk_positions(m.alpha, m.gamma, m.ell, fam, h,
                                  kernels.stream_base(config.seed, salt), config.walkers,
                                  config.steps, config.record_steps, backend=backend,
                                  evaluator=gfun)


def moment_stats(eta: np.ndarray):
    """Variance and kurtosis about the origin with delta-method errors.

    Returns ``(m2, se_m2, kurt, se_kurt)`` where ``kurt = m4/m2**2 - 3``.
    The kurtosis error uses the gradient ``(-2 m4/m2**3, 1/m2**2)`` against the
    covariance of ``(eta**2, eta**4)``.
    """
    w = eta.size
    e2 = eta * eta
    m2, m4 = e2.mean(), (e2 * e2).mean()
    m6, m8 = (e2 ** 3).mean(), (e2 ** 4).mean()
    var2 = m4 - m2 * m2
    cov = np.array([[var2, m6 - m2 * m4], [m6 - m2 * m4, m8 - m4 * m4]]) / w
    grad = np.array([-2.0 * m4 / m2 ** 3, 1.0 / m2 ** 2])
    return m2, math.sqrt(var2 / w), m4 / m2 ** 2 - 3.0, math.sqrt(max(grad @ cov @ grad, 0.0))


def return_window(model: TlfModel, n: int) -> float:
    return RETURN_WINDOW * model.gamma * n ** (1.0 / model.alpha)


def return_estimate(eta: np.ndarray, delta: float):
    """Fraction of walkers with ``|eta| <= delta`` over ``2 delta``, with binomial error."""
    p = np.count_nonzero(np.abs(eta) <= delta) / eta.size
    return p / (2.0 * delta), math.sqrt(p * (1.0 - p) / eta.size) / (2.0 * delta)


def ensemble_stats(config: WalkConfig, positions: np.ndarray) -> EnsembleStats:
    cols = {k: [] for k in ("variance", "variance_se", "kurtosis", "kurtosis_se",
                            "return_density", "return_density_se", "mean", "mean_se")}
    for n, eta in zip(config.record_steps, positions):
        m2, se2, k, sek = moment_stats(eta)
        rd, rdse = return_estimate(eta, return_window(config.model, n))
        for key, val in zip(cols, (m2, se2, k, sek, rd, rdse, eta.mean(),
                                   eta.std() / math.sqrt(eta.size))):
            cols[key].append(val)
    arr = {k: np.asarray(v, dtype=float) for k, v in cols.items()}
    return EnsembleStats(n=np.asarray(config.record_steps), count=np.full(len(positions), config.walkers),
                         **arr)


def run_ensemble(config: WalkConfig, backend: str | None = None) -> EnsembleStats:
    """Simulate ``config.walkers`` walks and summarize every recorded step count."""
    return ensemble_stats(config, run_walks(config, backend))


@dataclass(frozen=True)
class DiffusionFit:
    slope: float
    slope_se: float
    r_squared: float


def diffusion_fit(record_steps, positions: np.ndarray) -> DiffusionFit:
    """Weighted least squares of ``Var(eta_n) = D n`` through the origin.

    Weights are inverse squared standard errors of the per-n variances.  The
    slope is linear in the per-walker squares, ``D = mean_w sum_n c_n eta_wn**2``,
    so its error follows from the spread of that per-walker sum and accounts
    for the correlation between step counts along one walk.  ``r_squared`` is
    the weighted, uncentered coefficient of determination.
    """
    n = np.asarray(record_steps, dtype=float)
    sq = positions * positions
    v = sq.mean(axis=1)
    var_v = sq.var(axis=1) / sq.shape[1]
    wts = 1.0 / var_v
    c = wts * n / np.sum(wts * n * n)
    per_walker = c @ sq
    slope = float(per_walker.mean())
    se = float(per_walker.std(ddof=1) / math.sqrt(sq.shape[1]))
    r2 = 1.0 - float(np.sum(wts * (v - slope * n) ** 2) / np.sum(wts * v * v))
    return DiffusionFit(slope, se, r2)


@dataclass(frozen=True)
class ReturnScaling:
    n: int
    scaled: float
    se: float


def return_scaling_check(config: WalkConfig, stats_: EnsembleStats | None = None,
                         backend: str | None = None) -> list[ReturnScaling]:
    """``W_hat(0, n) * n**(1/alpha)`` for every recorded ``n``.

    In the Levy regime the product should equal the peak density of the
    untruncated law; every ``n`` must satisfy ``n * epsilon <= 0.1``.
    """
    m = config.model
    bad = [n for n in config.record_steps if n * m.epsilon > LEVY_GUARD]
    if bad:
        raise DomainError(
            f"step counts {bad} violate the Levy-regime guard n * epsilon <= {LEVY_GUARD} "
            f"(epsilon = {m.epsilon:.4g})")
    st = stats_ if stats_ is not None else run_ensemble(config, backend)
    scale = st.n ** (1.0 / m.alpha)
    return [ReturnScaling(int(n), float(r * s), float(e * s))
            for n, r, e, s in zip(st.n, st.return_density, st.return_density_se, scale)]


def peak_target(model: TlfModel) -> float:
    return stable_peak_density(model.stable)


def scaling_collapse_ks(model: TlfModel, n: int, walkers: int, seed: int,
                        backend: str | None = None):
    """Two-sample KS of ``eta_n / n**(1/alpha)`` against single increments.

    Both samples come from the same seed through separate salts, so they
    are independent.  Returns the scipy result (``statistic``, ``pvalue``).
    """
    if n * model.epsilon > LEVY_GUARD:
        raise DomainError(f"n = {n} violates the Levy-regime guard n * epsilon <= {LEVY_GUARD}")
    walks = run_walks(WalkConfig(model, n, walkers, seed, (n,)), backend)[0]
    single = run_walks(WalkConfig(model, 1, walkers, seed, (1,)), backend, salt=_SALT_SINGLE)[0]
    return stats.ks_2samp(walks / n ** (1.0 / model.alpha), single)


# -- direct sampling with a numpy Generator ------------------------------------

def truncated_sample(model: TlfModel, rng: np.random.Generator) -> float:
    """One exact draw: stable variates accepted with probability ``g(x/ell)``."""
    spec = model.deformation
    for _ in range(kernels.MAX_ATTEMPTS):
        x = stable_sample(model.stable, rng)
        if rng.uniform() < spec(x / model.ell):
            return x
    raise IterationLimitError(f"no acceptance in {kernels.MAX_ATTEMPTS} attempts")


def truncated_samples(model: TlfModel, rng: np.random.Generator, size: int) -> np.ndarray:
    """Vectorized form of ``truncated_sample``."""
    out = np.empty(size)
    todo = np.arange(size)
    spec = model.deformation
    for _ in range(kernels.MAX_ATTEMPTS):
        x = stable_sample(model.stable, rng, todo.size)
        acc = rng.uniform(size=todo.size) < np.asarray(spec(x / model.ell))
        out[todo[acc]] = x[acc]
        todo = todo[~acc]
        if todo.size == 0:
            return out
    raise IterationLimitError(f"{todo.size} draws exceeded {kernels.MAX_ATTEMPTS} attempts")


def acceptance_rate(model: TlfModel, rng: np.random.Generator, trials: int):
    """Fraction of ``trials`` stable proposals accepted, with its binomial error."""
    x = stable_sample(model.stable, rng, trials)
    p = float(np.mean(rng.uniform(size=trials) < np.asarray(model.deformation(x / model.ell))))
    return p, math.sqrt(p * (1.0 - p) / trials)
