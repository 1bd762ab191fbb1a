"""Cumulant theory, quadrature oracles and Monte Carlo for truncated Levy flights."""
__version__ = "0.1.0"
