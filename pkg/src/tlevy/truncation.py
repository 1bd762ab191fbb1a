"""Deformation (truncation) functions and their Mellin transforms.

A deformation ``g`` is evaluated in the dimensionless coordinate
``xi = x / ell``.  Its influence function is the Mellin transform

    mu_j(alpha) = int_0^inf xi**(j - 1 - alpha) g(xi) dxi,

which carries the whole dependence of the cumulants on the truncation shape.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .errors import (DivergentIntegralError, DomainError, QuadratureError,
                     ScaleSeparationWarning, UnsupportedFamilyError)
from .stable import StableParams

#: epsilon above which the first-order asymptotics are flagged
EPSILON_WARN = 0.1
_MELLIN_RTOL = 1e-10
_PROBE_XI = 1e6
_PROBE_POWER = 16
_EDGE = 40.0


class Family(str, enum.Enum):
    MANTEGNA_STANLEY = "ms"
    EXPONENTIAL = "exp"
    POWER_EXPONENTIAL = "pexp"
    CUSTOM = "custom"

    @classmethod
    def parse(cls, value) -> "Family":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"mantegna-stanley": "ms", "mantegnastanley": "ms", "abrupt": "ms",
                   "exponential": "exp", "power-exponential": "pexp",
                   "powerexponential": "pexp", "stretched": "pexp"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise DomainError(f"unknown truncation family {value!r}") from None


@dataclass(frozen=True)
class DeformationSpec:
    """Truncation family, spatial scale ``ell`` and optional shape ``h``.

    For ``Family.CUSTOM`` the ``evaluator`` maps ``xi`` (scalar or array) to
    ``g(xi)``; it must be even, pure, equal to 1 at the origin, bounded by
    [0, 1] and decay faster than any power.
    """

    family: Family
    ell: float
    h: Optional[float] = None
    evaluator: Optional[Callable] = field(default=None, compare=False)

    def __post_init__(self):
        fam = Family.parse(self.family)
        object.__setattr__(self, "family", fam)
        ell = float(self.ell)
        if not (math.isfinite(ell) and ell > 0):
            raise DomainError(f"ell must be positive, got {self.ell!r}")
        object.__setattr__(self, "ell", ell)
        if fam is Family.POWER_EXPONENTIAL:
            if self.h is None:
                raise DomainError("power-exponential truncation needs the shape parameter h")
            h = float(self.h)
            if not (math.isfinite(h) and h > 0):
                raise DomainError(f"h must be positive, got {self.h!r}")
            object.__setattr__(self, "h", h)
        if fam is Family.CUSTOM:
            if self.evaluator is None:
                raise DomainError("custom truncation needs an evaluator")
            _check_custom(self.evaluator)

    @classmethod
    def mantegna_stanley(cls, ell: float) -> "DeformationSpec":
        return cls(Family.MANTEGNA_STANLEY, ell)

    @classmethod
    def exponential(cls, ell: float) -> "DeformationSpec":
        return cls(Family.EXPONENTIAL, ell)

    @classmethod
    def power_exponential(cls, ell: float, h: float) -> "DeformationSpec":
        return cls(Family.POWER_EXPONENTIAL, ell, h)

    @classmethod
    def custom(cls, ell: float, evaluator: Callable) -> "DeformationSpec":
        return cls(Family.CUSTOM, ell, evaluator=evaluator)

    def __call__(self, xi):
        return deformation_eval(self, xi)

    def __hash__(self):
        return hash((self.family, self.ell, self.h, id(self.evaluator)))

    def __eq__(self, other):
        if not isinstance(other, DeformationSpec):
            return NotImplemented
        return (self.family, self.ell, self.h) == (other.family, other.ell, other.h) \
            and self.evaluator is other.evaluator


def _check_custom(fn: Callable) -> None:
    probe = np.concatenate([np.linspace(0.0, 4.0, 41), np.geomspace(4.0, 1e3, 20)])
    try:
        vals = np.asarray([float(fn(float(v))) for v in probe])
        neg = np.asarray([float(fn(-float(v))) for v in probe])
    except (ArithmeticError, ValueError, TypeError) as exc:
        raise DomainError(f"custom deformation failed on the probe grid: {exc}") from None
    if abs(vals[0] - 1.0) > 1e-12:
        raise DomainError(f"custom deformation must satisfy g(0) = 1, got {vals[0]!r}")
    if np.any(vals < 0) or np.any(vals > 1 + 1e-12) or not np.all(np.isfinite(vals)):
        raise DomainError("custom deformation must take values in [0, 1]")
    if np.max(np.abs(neg - vals)) > 1e-12:
        raise DomainError("custom deformation must be even in xi")


@dataclass(frozen=True)
class TlfModel:
    """Stable law plus deformation; ``epsilon = (gamma/ell)**alpha`` is derived."""

    stable: StableParams
    deformation: DeformationSpec

    def __post_init__(self):
        eps = self.epsilon
        if eps > EPSILON_WARN:
            warnings.warn(
                f"epsilon = (gamma/ell)**alpha = {eps:.4g} exceeds {EPSILON_WARN}; "
                "scale separation ell >> gamma is not satisfied",
                ScaleSeparationWarning, stacklevel=3)

    @property
    def alpha(self) -> float:
        return self.stable.alpha

    @property
    def gamma(self) -> float:
        return self.stable.gamma

    @property
    def ell(self) -> float:
        return self.deformation.ell

    @property
    def family(self) -> Family:
        return self.deformation.family

    @property
    def epsilon(self) -> float:
        return (self.stable.gamma / self.deformation.ell) ** self.stable.alpha

    def with_gamma(self, gamma: float) -> "TlfModel":
        return TlfModel(StableParams(self.alpha, gamma), self.deformation)


def make_model(alpha: float, gamma: float, ell: float, family="ms",
               h: Optional[float] = None, evaluator: Optional[Callable] = None) -> TlfModel:
    """Shorthand constructor used throughout the tests and the CLI."""
    fam = Family.parse(family)
    spec = DeformationSpec(fam, ell, h if fam is Family.POWER_EXPONENTIAL else None, evaluator)
    return TlfModel(StableParams(alpha, gamma), spec)


# -- evaluation ---------------------------------------------------------------

def deformation_eval(spec: DeformationSpec, xi):
    """``g(xi)`` for the family of ``spec``; ``xi`` is dimensionless."""
    a = np.abs(np.asarray(xi, dtype=float))
    fam = spec.family
    if fam is Family.MANTEGNA_STANLEY:
        out = (a <= 1.0).astype(float)
    elif fam is Family.EXPONENTIAL:
        out = np.exp(-a)
    elif fam is Family.POWER_EXPONENTIAL:
        with np.errstate(over="ignore"):
            out = np.exp(-np.power(a, spec.h))
    else:
        fn = spec.evaluator
        out = np.asarray([float(fn(v)) for v in a.ravel()]).reshape(a.shape)
    return out if out.ndim else float(out)


def _check_order(j, alpha: float) -> int:
    if int(j) != j or j < 2 or j % 2:
        raise DomainError(f"order j must be an even integer >= 2, got {j!r}")
    j = int(j)
    if not j > alpha:
        raise DomainError(f"order j={j} must exceed alpha={alpha}")
    return j


def influence_closed(spec: DeformationSpec, j: int, alpha: float) -> float:
    """Closed-form influence function ``mu_j(alpha)`` of a named family.

    Mantegna-Stanley: ``1/(j - alpha)``; exponential: ``Gamma(j - alpha)``;
    power-exponential: ``Gamma((j - alpha)/h) / h``.
    """
    j = _check_order(j, alpha)
    s = j - alpha
    fam = spec.family
    if fam is Family.MANTEGNA_STANLEY:
        return 1.0 / s
    if fam is Family.EXPONENTIAL:
        return math.gamma(s)
    if fam is Family.POWER_EXPONENTIAL:
        return math.gamma(s / spec.h) / spec.h
    raise UnsupportedFamilyError(
        "custom deformations have no closed-form influence function; use influence_numeric")


def _tail_probe(spec: DeformationSpec) -> None:
    g = float(deformation_eval(spec, _PROBE_XI))
    if not g * _PROBE_XI ** _PROBE_POWER < 1.0:
        raise DivergentIntegralError(
            f"deformation decays too slowly: g({_PROBE_XI:g}) * {_PROBE_XI:g}**{_PROBE_POWER} "
            f"= {g * _PROBE_XI ** _PROBE_POWER:.3g} >= 1")


def mellin_transform(spec: DeformationSpec, s: float) -> float:
    """``int_0^inf xi**(s-1) g(xi) dxi`` for ``s > 0``.

    The integral is split at ``xi = 1``.  For Mantegna-Stanley the unit
    interval is done in closed form.  Otherwise both halves are integrated
    in ``t = log(xi)``; near ``t = 0`` the variable is stretched by ``h``
    for the power-exponential family so its transition has unit width.
    """
    if not s > 0:
        raise DomainError(f"Mellin argument must be positive, got {s!r}")
    if spec.family is Family.CUSTOM:
        _tail_probe(spec)
    scale = max(spec.h, 1.0) if spec.family is Family.POWER_EXPONENTIAL else 1.0
    # the transition of g sits within ~_EDGE/scale of t = 0; left of that g is flat
    t_edge = -_EDGE / scale

    def integrand(u, k):
        t = u / k
        with np.errstate(over="ignore"):
            g = float(deformation_eval(spec, math.exp(t) if t < 709.0 else math.inf))
        return 0.0 if g == 0.0 else math.exp(s * t) * g / k

    def piece(lo, hi, k):
        return integrate.quad(integrand, lo * k, hi * k, args=(k,), epsabs=0.0,
                              epsrel=_MELLIN_RTOL, limit=500)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        if spec.family is Family.MANTEGNA_STANLEY:
            head, err_h = 1.0 / s, 0.0
        else:
            far, err_f = piece(-np.inf, t_edge, 1.0)
            near, err_n = piece(t_edge, 0.0, scale)
            head, err_h = far + near, err_f + err_n
        tail, err_t = piece(0.0, np.inf, scale)
    val = head + tail
    if not math.isfinite(val):
        raise DivergentIntegralError(f"Mellin transform at s={s} diverges")
    if err_h + err_t > 1e-6 * abs(val):
        raise QuadratureError(
            f"Mellin transform at s={s} did not converge (error estimate {err_h + err_t:.3g})")
    return val


def influence_numeric(spec: DeformationSpec, j: int, alpha: float) -> float:
    """``mu_j(alpha)`` by quadrature of the Mellin integral (any family)."""
    j = _check_order(j, alpha)
    return mellin_transform(spec, j - alpha)


def influence(spec: DeformationSpec, j: int, alpha: float) -> float:
    """Closed form when one exists, quadrature otherwise."""
    if spec.family is Family.CUSTOM:
        return influence_numeric(spec, j, alpha)
    return influence_closed(spec, j, alpha)


def deformation_moment(spec: DeformationSpec, k: int) -> float:
    """Half-line moment ``M_k = int_0^inf xi**k g(xi) dxi``; ``M_{j-2} = mu_j(1)``."""
    if int(k) != k or k < 0:
        raise DomainError(f"moment order must be a nonnegative integer, got {k!r}")
    return mellin_transform(spec, int(k) + 1.0)
