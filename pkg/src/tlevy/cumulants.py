"""Closed-form cumulant theory of the truncated Levy flight.

To first order in ``epsilon = (gamma/ell)**alpha`` the even cumulants of the
increment are

    kappa_j = ell**(j - alpha) * gamma**alpha * A(alpha) * mu_j(alpha),
    A(alpha) = (2/pi) * Gamma(alpha + 1) * sin(pi*alpha/2),

odd cumulants vanish, and the standardized cumulants scale as
``lambda_j ~ epsilon**(1 - j/2)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import DomainError, LevyRegimeWarning, UnsupportedFamilyError
from .stable import StableParams, stable_peak_density
from .truncation import Family, TlfModel, deformation_moment, influence

#: orders exposed by default; the cumulant series is capped at order 8
DEFAULT_ORDERS = (2, 4, 6)
MAX_ORDER = 8
#: factor applied to the kurtosis when labelling a step count Gaussian
GAUSSIAN_MARGIN = 10.0
#: Levy-regime guard on n * epsilon = (gamma_eff / ell)**alpha
LEVY_GUARD = 0.1


def a_coefficient(alpha: float) -> float:
    """``(2/pi) * Gamma(alpha + 1) * sin(pi*alpha/2)``, positive on (0, 2)."""
    if not 0.0 < alpha < 2.0:
        raise DomainError(f"alpha must lie in (0, 2), got {alpha!r}")
    return 2.0 / math.pi * math.gamma(alpha + 1.0) * math.sin(0.5 * math.pi * alpha)


def _even_order(j, alpha: float) -> int:
    if int(j) != j or j < 2 or j % 2:
        raise DomainError(f"order must be an even integer >= 2, got {j!r}")
    if not j > alpha:
        raise DomainError(f"order j={j} must exceed alpha={alpha}")
    return int(j)


def cumulant(model: TlfModel, j: int) -> float:
    """First-order cumulant ``kappa_j``; odd orders are exactly zero."""
    if int(j) == j and j >= 1 and j % 2 == 1:
        return 0.0
    j = _even_order(j, model.alpha)
    a = model.alpha
    return (model.ell ** (j - a) * model.gamma ** a * a_coefficient(a)
            * influence(model.deformation, j, a))


def cumulant_cauchy(model: TlfModel, j: int) -> float:
    """``alpha = 1`` form ``ell**(j-1) * gamma * 2 * M_{j-2} / pi`` via half-line moments."""
    if model.alpha != 1.0:
        raise DomainError(f"the Cauchy cumulant form needs alpha = 1, got {model.alpha!r}")
    j = _even_order(j, 1.0)
    m = deformation_moment(model.deformation, j - 2)
    return model.ell ** (j - 1) * model.gamma * 2.0 * m / math.pi


def cumulant_coefficient(model: TlfModel, j: int) -> float:
    """Standardized cumulant ``lambda_j = kappa_j / kappa_2**(j/2)``.

    Evaluated as ``(ell/gamma)**(alpha (j-2)/2) * mu_j / (A**(j/2-1) * mu_2**(j/2))``
    so that the power of ``ell/gamma`` is exact.
    """
    a = model.alpha
    j = _even_order(j, a)
    if j < 4:
        raise DomainError("cumulant coefficients are defined for j >= 4")
    spec = model.deformation
    ratio = model.ell / model.gamma
    half = j // 2
    return (ratio ** (a * (j - 2) / 2.0) * influence(spec, j, a)
            / (a_coefficient(a) ** (half - 1) * influence(spec, 2, a) ** half))


def family_variance(model: TlfModel) -> float:
    """Increment variance from the per-family closed forms."""
    a, g, ell = model.alpha, model.gamma, model.ell
    base = ell ** (2.0 - a) * g ** a * a_coefficient(a)
    fam = model.family
    if fam is Family.MANTEGNA_STANLEY:
        return base / (2.0 - a)
    if fam is Family.EXPONENTIAL:
        return base * math.gamma(2.0 - a)
    if fam is Family.POWER_EXPONENTIAL:
        h = model.deformation.h
        return base * math.gamma((2.0 - a) / h) / h
    raise UnsupportedFamilyError("no closed-form variance for custom deformations")


def family_kurtosis(model: TlfModel) -> float:
    """Kurtosis coefficient ``lambda_4`` from the per-family closed forms."""
    a = model.alpha
    lead = (model.ell / model.gamma) ** a / a_coefficient(a)
    fam = model.family
    if fam is Family.MANTEGNA_STANLEY:
        return lead * (2.0 - a) ** 2 / (4.0 - a)
    if fam is Family.EXPONENTIAL:
        return lead * (2.0 - a) * (3.0 - a) / math.gamma(2.0 - a)
    if fam is Family.POWER_EXPONENTIAL:
        h = model.deformation.h
        return lead * h * math.gamma((4.0 - a) / h) / math.gamma((2.0 - a) / h) ** 2
    raise UnsupportedFamilyError("no closed-form kurtosis for custom deformations")


def _steps(n) -> int:
    if int(n) != n or n < 1:
        raise DomainError(f"step count must be a positive integer, got {n!r}")
    return int(n)


def walk_cumulant(model: TlfModel, j: int, n: int) -> float:
    """Cumulant function of the n-step walk: ``n * kappa_j``."""
    return _steps(n) * cumulant(model, j)


def walk_cumulant_coefficient(model: TlfModel, j: int, n: int) -> float:
    """``lambda_j / n**(j/2 - 1)``: decay of the standardized cumulants with n."""
    n = _steps(n)
    return cumulant_coefficient(model, j) / n ** (j // 2 - 1)


@dataclass(frozen=True)
class CumulantTable:
    orders: tuple
    a_alpha: float
    mu: tuple
    kappa: tuple
    lam: tuple
    variance: float
    model: TlfModel

    @property
    def epsilon(self) -> float:
        return self.model.epsilon

    def rows(self):
        return [dict(j=j, mu_j=m, kappa_j=k, lambda_j=l)
                for j, m, k, l in zip(self.orders, self.mu, self.kappa, self.lam)]


def cumulant_table(model: TlfModel, orders=DEFAULT_ORDERS) -> CumulantTable:
    a = model.alpha
    orders = tuple(_even_order(j, a) for j in orders)
    if any(j > MAX_ORDER for j in orders):
        raise DomainError(f"orders above {MAX_ORDER} are not supported")
    mu = tuple(influence(model.deformation, j, a) for j in orders)
    kappa = tuple(cumulant(model, j) for j in orders)
    lam = tuple(1.0 if j == 2 else cumulant_coefficient(model, j) for j in orders)
    return CumulantTable(orders, a_coefficient(a), mu, kappa, lam, cumulant(model, 2), model)


@dataclass(frozen=True)
class RegimeReport:
    """Diffusion coefficient and the two regime scales, in steps.

    ``n_gauss`` is the kurtosis coefficient itself; a walk is labelled Gaussian
    once ``n >= GAUSSIAN_MARGIN * n_gauss``.  ``n_levy_max = 1/epsilon``.
    """

    diffusion: float
    n_gauss: float
    n_levy_max: float
    epsilon: float

    def classify(self, n: float) -> str:
        if n <= self.n_levy_max:
            return "levy"
        if n >= GAUSSIAN_MARGIN * self.n_gauss:
            return "gaussian"
        return "crossover"


def regime_report(model: TlfModel) -> RegimeReport:
    return RegimeReport(
        diffusion=cumulant(model, 2),
        n_gauss=cumulant_coefficient(model, 4),
        n_levy_max=(model.ell / model.gamma) ** model.alpha,
        epsilon=model.epsilon,
    )


def model_char_fn(model: TlfModel, q: float, n: int = 1, j_max: int = MAX_ORDER) -> float:
    """Truncated cumulant series ``exp(sum_{j even <= j_max} n kappa_j (iq)**j / j!)``.

    The value is real because odd cumulants vanish.  The series is only
    trusted for ``|q| * ell <= 1``; beyond that a ``DomainError`` is raised.
    """
    n = _steps(n)
    if int(j_max) != j_max or j_max < 2 or j_max % 2 or j_max > MAX_ORDER:
        raise DomainError(f"j_max must be an even integer in [2, {MAX_ORDER}], got {j_max!r}")
    if abs(q) * model.ell > 1.0:
        raise DomainError(
            f"|q| * ell = {abs(q) * model.ell:.3g} > 1: cumulant series not reliable")
    expo = 0.0
    for j in range(2, int(j_max) + 1, 2):
        sign = -1.0 if (j // 2) % 2 else 1.0      # (i q)**j = (-1)**(j/2) q**j
        expo += n * cumulant(model, j) * sign * q ** j / math.factorial(j)
    return math.exp(expo)


def scale_identity_check(model: TlfModel, q: float, n: int, j_max: int = MAX_ORDER) -> float:
    """``|theta(q, n, gamma) - theta(q, 1, gamma n**(1/alpha))|`` from the model series."""
    n = _steps(n)
    if n * model.epsilon > LEVY_GUARD:
        raise DomainError(
            f"n * epsilon = {n * model.epsilon:.3g} > {LEVY_GUARD}: "
            "gamma * n**(1/alpha) is not small against ell")
    rescaled = model.with_gamma(model.gamma * n ** (1.0 / model.alpha))
    return abs(model_char_fn(model, q, n, j_max) - model_char_fn(rescaled, q, 1, j_max))


def levy_return_density(params: StableParams, n: int) -> float:
    """Return density of the undisturbed Levy flight, ``Gamma(1/a)/(pi a gamma n**(1/a))``."""
    n = _steps(n)
    return stable_peak_density(params) / n ** (1.0 / params.alpha)


def return_density(model: TlfModel, n: int) -> float:
    """Return density of the truncated flight in the Levy regime.

    Truncation enters only at second order there, so the undisturbed value
    is returned; no correction is attempted.  A ``LevyRegimeWarning`` is
    emitted when ``n * epsilon > 0.1``.
    """
    n = _steps(n)
    if n * model.epsilon > LEVY_GUARD:
        warnings.warn(
            f"n * epsilon = {n * model.epsilon:.3g} exceeds {LEVY_GUARD}; "
            "the undisturbed return density is not reliable here",
            LevyRegimeWarning, stacklevel=2)
    return levy_return_density(model.stable, n)
