"""Quadrature ground truth for the truncated density ``C * P_L(x) * g(x/ell)``.

Everything is computed in real space on a fixed composite Gauss-Legendre
grid in ``t = log(x/gamma)``.  The stable density on the grid is cached per
``alpha`` (core panels) so the moments of a whole epsilon sweep cost one
inversion pass.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cumulants import cumulant
from .errors import DomainError, QuadratureError
from .quadrature import PanelAntiderivative, gl_panels, merge_edges, uniform_edges
from .stable import (CORE_MIN, TAIL_START, StableParams, core_log_edges, panel_pdf,
                     stable_pdf, stable_peak_density)
from .truncation import (DeformationSpec, Family, TlfModel, deformation_eval, make_model)

#: tail panels are this wide in log x
_TAIL_WIDTH = 0.25
#: the grid stops where g(xi) * xi**_DECAY_POWER drops below _DECAY_FLOOR
_DECAY_POWER = 10
_DECAY_FLOOR = 1e-16
MAX_MOMENT = 8


@dataclass(frozen=True)
class MomentVector:
    m2: float
    m4: float
    m6: float
    normalization_c: float
    epsilon: float
    m8: float = math.nan


@dataclass(frozen=True)
class OracleReport:
    order: int
    m_numeric: float
    kappa_numeric: float
    kappa_asymptotic: float
    rel_error: float
    epsilon: float


def cutoff_xi(spec: DeformationSpec) -> float:
    """Dimensionless end of the integration range.

    Mantegna-Stanley stops exactly at 1; other families stop at the first
    ``xi`` (on a 1.1-geometric ladder) with ``g(xi) * xi**10 < 1e-16``.
    """
    if spec.family is Family.MANTEGNA_STANLEY:
        return 1.0
    xi = 1.0
    while float(deformation_eval(spec, xi)) * xi ** _DECAY_POWER >= _DECAY_FLOOR:
        xi *= 1.1
        if xi > 1e300:
            raise QuadratureError("deformation does not decay on the representable range")
    return xi


def grid_edges(model: TlfModel) -> np.ndarray:
    """Panel edges in ``t = log(x/gamma)`` covering ``[1e-12, ell * cutoff]``."""
    spec = model.deformation
    t_ell = math.log(model.ell / model.gamma)
    t_end = t_ell + math.log(cutoff_xi(spec))
    t_core = math.log(TAIL_START)
    core = core_log_edges()
    pieces = [core[core < t_end]]
    if t_end > t_core:
        pieces.append(uniform_edges(t_core, t_end, _TAIL_WIDTH))
    breaks = [t_end]
    if t_ell < t_end:
        breaks.append(t_ell)
    h = spec.h if spec.family is Family.POWER_EXPONENTIAL else 1.0
    if h > 1.0:
        # g switches off over a log-width of order 1/h around xi = 1
        lo, hi = max(t_ell - 8.0 / h, core[0]), min(t_ell + 4.0 / h, t_end)
        if hi > lo:
            pieces.append(uniform_edges(lo, hi, _TAIL_WIDTH / h))
    edges = merge_edges(*pieces, breakpoints=breaks)
    return edges[edges <= t_end + 1e-12]


@dataclass(frozen=True)
class _Grid:
    t: np.ndarray
    dx: np.ndarray        # quadrature weight times x/gamma (Jacobian of t = log)
    s: np.ndarray         # x / gamma at the nodes
    density: np.ndarray   # standardized P_L(s) * g at the nodes
    edges: np.ndarray
    head: float           # mass of the standardized density on [0, CORE_MIN]


@lru_cache(maxsize=128)
def _grid(model: TlfModel) -> _Grid:
    edges = grid_edges(model)
    t, w = gl_panels(edges)
    s = np.exp(t)
    g = np.asarray(deformation_eval(model.deformation, s * (model.gamma / model.ell)), float)
    dens = panel_pdf(model.alpha, edges) * g
    head = stable_peak_density(StableParams(model.alpha)) * CORE_MIN
    return _Grid(t, w * s, s, dens, edges, head)


def normalize(model: TlfModel) -> float:
    """``C = 1 / int P_L(x) g(x/ell) dx``."""
    grid = _grid(model)
    half = grid.head + float(np.dot(grid.dx, grid.density))
    if not (math.isfinite(half) and half > 0):
        raise QuadratureError(f"truncated mass is not positive: {half!r}")
    return 1.0 / (2.0 * half)


def truncated_pdf(model: TlfModel, x):
    """``C * P_L(x) * g(x/ell)``."""
    x = np.asarray(x, dtype=float)
    out = normalize(model) * np.asarray(stable_pdf(model.stable, x)) \
        * np.asarray(deformation_eval(model.deformation, x / model.ell))
    return out if out.ndim else float(out)


def numeric_moment(model: TlfModel, j: int) -> float:
    """Raw moment ``int x**j C P_L g dx``; odd orders vanish by symmetry.

    Only the half line is integrated and the result doubled, so odd
    moments are zero by construction rather than by cancellation.
    """
    if int(j) != j or j < 0 or j > MAX_MOMENT:
        raise DomainError(f"moment order must be an integer in [0, {MAX_MOMENT}], got {j!r}")
    j = int(j)
    if j % 2:
        return 0.0
    if j == 0:
        return 1.0
    grid = _grid(model)
    c = normalize(model)
    return 2.0 * c * model.gamma ** j * float(np.dot(grid.dx, grid.s ** j * grid.density))


def moment_vector(model: TlfModel) -> MomentVector:
    return MomentVector(
        m2=numeric_moment(model, 2), m4=numeric_moment(model, 4), m6=numeric_moment(model, 6),
        normalization_c=normalize(model), epsilon=model.epsilon, m8=numeric_moment(model, 8))


def cumulants_from_moments(m: MomentVector) -> tuple[float, float, float]:
    """Even cumulants of a symmetric law from its raw moments."""
    m2, m4, m6 = m.m2, m.m4, m.m6
    return m2, m4 - 3.0 * m2 * m2, m6 - 15.0 * m2 * m4 + 30.0 * m2 ** 3


def numeric_cumulant(model: TlfModel, j: int) -> float:
    if j not in (2, 4, 6):
        raise DomainError(f"numeric cumulants are available for j in (2, 4, 6), got {j!r}")
    return cumulants_from_moments(moment_vector(model))[j // 2 - 1]


def convergence_sweep(alpha: float, family, j: int, eps_list, gamma: float = 1.0,
                      h: float | None = None) -> list[OracleReport]:
    """Numeric versus first-order cumulants along ``ell = gamma / eps**(1/alpha)``.

    Parameters
    ----------
    alpha : float
    family : Family or str
        Named family (``ms``, ``exp``, ``pexp``).
    j : int
        Even order, 2, 4 or 6.
    eps_list : sequence of float
        Values in (0, 0.1].
    """
    if int(j) != j or j % 2 or j not in (2, 4, 6):
        raise DomainError(f"order must be 2, 4 or 6, got {j!r}")
    j = int(j)
    eps = [float(e) for e in eps_list]
    bad = [e for e in eps if not 0.0 < e <= 0.1]
    if bad:
        raise DomainError(f"epsilon values must lie in (0, 0.1], got {bad}")
    out = []
    for e in eps:
        model = make_model(alpha, gamma, gamma / e ** (1.0 / alpha), family, h)
        mv = moment_vector(model)
        k_num = cumulants_from_moments(mv)[j // 2 - 1]
        k_asym = cumulant(model, j)
        m_num = getattr(mv, f"m{j}")
        out.append(OracleReport(j, m_num, k_num, k_asym, abs(k_num - k_asym) / abs(k_asym),
                                model.epsilon))
    return out


def loglog_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    return float(np.polyfit(lx, ly, 1)[0])


class TruncatedCdf:
    """Distribution function of the truncated law and its inverse.

    The half-line mass ``int_0^x`` is the exact integral of the panelwise
    interpolant of ``C s p(s) g`` in ``t = log s``, so its total is 1/2 up
    to rounding.
    """

    def __init__(self, model: TlfModel):
        self.model = model
        grid = _grid(model)
        self.c = normalize(model)
        self._p0 = self.c * stable_peak_density(StableParams(model.alpha))
        self._anti = PanelAntiderivative(grid.edges, self.c * grid.s * grid.density,
                                         offset=self.c * grid.head)
        self._inv = self._anti.inverse_table()
        self._t_lo, self._t_hi = float(grid.edges[0]), float(grid.edges[-1])

    def half_mass(self, s):
        s = np.asarray(s, dtype=float)
        out = np.where(s < CORE_MIN, self._p0 * s, 0.0)
        inside = s >= CORE_MIN
        out[inside] = self._anti(np.log(np.minimum(s[inside], math.exp(self._t_hi))))
        return out

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = 0.5 + np.sign(x) * self.half_mass(np.abs(x) / self.model.gamma)
        return out if out.ndim else float(out)

    def ppf(self, u):
        """Quantile function; ``u`` in (0, 1)."""
        u = np.asarray(u, dtype=float)
        half = np.abs(u - 0.5)
        s = np.empty_like(half)
        small = half < self._anti.cumulative[0]
        s[small] = half[small] / self._p0
        rest = ~small
        top = self._anti.total
        t = self._inv(np.minimum(half[rest], top))
        s[rest] = np.exp(np.where(np.isnan(t), self._t_hi, t))
        out = np.sign(u - 0.5) * s * self.model.gamma
        return out if out.ndim else float(out)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.ppf(rng.uniform(0.0, 1.0, size))
