"""Composite Gauss-Legendre panels in ``t = log x`` and their antiderivatives."""
from __future__ import annotations

import numpy as np
from numpy.polynomial import legendre
from scipy import interpolate

NODES = 20
_X, _W = legendre.leggauss(NODES)
# discrete Legendre transform: coefficients from values at the Gauss nodes
_DLT = (legendre.legvander(_X, NODES - 1) * _W[:, None]).T * ((2 * np.arange(NODES) + 1) / 2.0)[:, None]


def gl_panels(edges) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the 20-point rule on each panel ``edges[i]..edges[i+1]``."""
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    return (half * _X + 0.5 * (hi + lo)).ravel(), (half * _W).ravel()


def merge_edges(*pieces, breakpoints=()) -> np.ndarray:
    """Sorted union of edge arrays with extra breakpoints, dropping near-duplicates."""
    e = np.unique(np.concatenate([np.asarray(p, float) for p in pieces] + [np.asarray(breakpoints, float)]))
    keep = np.concatenate([[True], np.diff(e) > 1e-9])
    return e[keep]


def uniform_edges(lo: float, hi: float, width: float) -> np.ndarray:
    n = max(1, int(np.ceil((hi - lo) / width - 1e-9)))
    return np.linspace(lo, hi, n + 1)


class PanelAntiderivative:
    """Exact antiderivative of the panelwise degree-19 interpolant of ``f(t)``.

    ``values`` holds ``f`` at the Gauss nodes of every panel (panel-major).
    ``offset`` is the integral accumulated left of ``edges[0]``.
    """

    def __init__(self, edges, values, offset: float = 0.0):
        self.edges = np.asarray(edges, dtype=float)
        f = np.asarray(values, dtype=float).reshape(len(self.edges) - 1, NODES)
        coef = _DLT @ f.T                      # (NODES, panels)
        self._half = 0.5 * np.diff(self.edges)
        self._anti = legendre.legint(coef, lbnd=-1, axis=0)  # (NODES+1, panels)
        panel = self._half * legendre.legval(1.0, self._anti)
        self.cumulative = offset + np.concatenate([[0.0], np.cumsum(panel)])

    @property
    def total(self) -> float:
        return float(self.cumulative[-1])

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        flat = np.clip(t.ravel(), self.edges[0], self.edges[-1])
        idx = np.clip(np.searchsorted(self.edges, flat, side="right") - 1, 0, len(self.edges) - 2)
        mid = 0.5 * (self.edges[idx] + self.edges[idx + 1])
        x = (flat - mid) / self._half[idx]
        val = self._half[idx] * legendre.legval(x, self._anti[:, idx], tensor=False)
        return (self.cumulative[idx] + val).reshape(t.shape)

    def inverse_table(self, per_panel: int = 48):
        """Monotone interpolant ``t(F)`` tabulated on a fine sub-grid."""
        sub = np.concatenate([np.linspace(a, b, per_panel, endpoint=False)
                              for a, b in zip(self.edges[:-1], self.edges[1:])] + [self.edges[-1:]])
        vals = self(sub)
        vals, keep = np.unique(vals, return_index=True)
        return interpolate.PchipInterpolator(vals, sub[keep], extrapolate=False)
