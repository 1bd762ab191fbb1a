"""Walk kernels: a numba path and a pure-numpy path drawing identical numbers.

Randomness is counter based.  Walker ``w`` owns the key
``mix64(base + w * GOLDEN)`` and its ``c``-th uniform is
``mix64(key + (c + 1) * GOLDEN)`` mapped to the open unit interval, so a
walker's stream does not depend on how walkers are scheduled or batched.
Each rejection attempt consumes three uniforms: angle, exponential, accept.

The backend is chosen by ``TLEVY_BACKEND`` (``numba`` or ``numpy``); numba
is used when it imports and the variable is unset.
"""
from __future__ import annotations

import os

import numpy as np

from .errors import DomainError, IterationLimitError

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_TWO53 = 2.0 ** -53
MAX_ATTEMPTS = 1_000_000

FAMILY_CODES = {"ms": 0, "exp": 1, "pexp": 2}

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


def available_backends() -> tuple[str, ...]:
    return ("numba", "numpy") if numba is not None else ("numpy",)


def default_backend() -> str:
    name = os.environ.get("TLEVY_BACKEND", "").strip().lower()
    if not name:
        return "numba" if numba is not None else "numpy"
    if name not in ("numba", "numpy"):
        raise DomainError(f"TLEVY_BACKEND must be 'numba' or 'numpy', got {name!r}")
    if name == "numba" and numba is None:
        raise DomainError("TLEVY_BACKEND=numba but numba is not importable")
    return name


# -- numpy reference implementation -------------------------------------------

def mix64(z):
    """SplitMix64 finalizer on uint64 arrays (wrapping arithmetic)."""
    z = np.asarray(z, dtype=np.uint64)
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def stream_base(seed: int, salt: int = 0) -> np.uint64:
    """Master key for a seed; ``salt`` separates independent uses of one seed."""
    if int(seed) != seed or not 0 <= seed < 2 ** 64:
        raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    with np.errstate(over="ignore"):
        return mix64(np.uint64(int(seed) ^ int(salt)))[()]


def walker_keys(base, walkers: int, offset: int = 0) -> np.ndarray:
    idx = np.arange(offset, offset + walkers, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return mix64(np.uint64(base) + idx * GOLDEN)


def uniforms(keys, counters):
    """``u(key, c)`` in (0, 1), elementwise."""
    with np.errstate(over="ignore"):
        z = mix64(keys + (np.asarray(counters, dtype=np.uint64) + np.uint64(1)) * GOLDEN)
    return ((z >> np.uint64(11)).astype(np.float64) + 0.5) * _TWO53


def _g_numpy(code: int, h: float, xi):
    a = np.abs(xi)
    if code == 0:
        return (a <= 1.0).astype(float)
    if code == 1:
        return np.exp(-a)
    with np.errstate(over="ignore"):
        return np.exp(-np.power(a, h))


def _cms(alpha, v, e):
    return (np.sin(alpha * v) / np.cos(v) ** (1.0 / alpha)
            * (np.cos((1.0 - alpha) * v) / e) ** ((1.0 - alpha) / alpha))


def _increments_numpy(alpha, gamma, ell, gfun, keys, counters, trials=None):
    """One accepted increment per walker; ``counters`` is advanced in place."""
    out = np.empty(keys.size)
    todo = np.arange(keys.size)
    for _ in range(MAX_ATTEMPTS):
        k, c = keys[todo], counters[todo]
        u1 = uniforms(k, c)
        u2 = uniforms(k, c + np.uint64(1))
        u3 = uniforms(k, c + np.uint64(2))
        counters[todo] = c + np.uint64(3)
        if trials is not None:
            trials[todo] += 1
        x = gamma * _cms(alpha, np.pi * (u1 - 0.5), -np.log(u2))
        acc = u3 < gfun(x / ell)
        out[todo[acc]] = x[acc]
        todo = todo[~acc]
        if todo.size == 0:
            return out
    raise IterationLimitError(f"{todo.size} walkers exceeded {MAX_ATTEMPTS} rejections")


def walk_numpy(alpha, gamma, ell, gfun, base, walkers, steps, record, offset=0):
    """Positions ``eta_n`` at each ``n`` in ``record`` (shape ``(len(record), walkers)``)."""
    keys = walker_keys(base, walkers, offset)
    counters = np.zeros(walkers, dtype=np.uint64)
    eta = np.zeros(walkers)
    out = np.empty((len(record), walkers))
    r = 0
    for n in range(1, steps + 1):
        eta += _increments_numpy(alpha, gamma, ell, gfun, keys, counters)
        if r < len(record) and record[r] == n:
            out[r] = eta
            r += 1
    return out


# -- numba implementation -------------------------------------------------------

if numba is not None:
    _U30, _U27, _U31, _U11 = (np.uint64(30), np.uint64(27), np.uint64(31), np.uint64(11))
    _ONE = np.uint64(1)

    @numba.njit(cache=True)
    def _mix64_nb(z):
        z = (z ^ (z >> _U30)) * _M1
        z = (z ^ (z >> _U27)) * _M2
        return z ^ (z >> _U31)

    @numba.njit(cache=True)
    def _uniform_nb(key, c):
        z = _mix64_nb(key + (c + _ONE) * GOLDEN)
        return (np.float64(z >> _U11) + 0.5) * _TWO53

    @numba.njit(cache=True)
    def _g_nb(code, h, xi):
        a = abs(xi)
        if code == 0:
            return 1.0 if a <= 1.0 else 0.0
        if code == 1:
            return np.exp(-a)
        return np.exp(-a ** h)

    @numba.njit(cache=True)
    def _walk_nb(alpha, gamma, ell, code, h, base, walkers, steps, record, offset):
        out = np.empty((record.size, walkers))
        inv = 1.0 / alpha
        expo = (1.0 - alpha) / alpha
        for w in range(walkers):
            key = _mix64_nb(base + np.uint64(offset + w) * GOLDEN)
            c = np.uint64(0)
            eta = 0.0
            r = 0
            for n in range(1, steps + 1):
                tries = 0
                while True:
                    u1 = _uniform_nb(key, c)
                    u2 = _uniform_nb(key, c + _ONE)
                    u3 = _uniform_nb(key, c + np.uint64(2))
                    c += np.uint64(3)
                    v = np.pi * (u1 - 0.5)
                    e = -np.log(u2)
                    x = gamma * (np.sin(alpha * v) / np.cos(v) ** inv
                                 * (np.cos((1.0 - alpha) * v) / e) ** expo)
                    if u3 < _g_nb(code, h, x / ell):
                        break
                    tries += 1
                    if tries >= MAX_ATTEMPTS:
                        return out, w
                eta += x
                if r < record.size and record[r] == n:
                    out[r, w] = eta
                    r += 1
        return out, -1


def walk_positions(alpha: float, gamma: float, ell: float, family: str, h, base,
                   walkers: int, steps: int, record, backend: str | None = None,
                   evaluator=None, offset: int = 0) -> np.ndarray:
    """Dispatch to a backend; custom deformations always take the numpy path."""
    record = np.asarray(record, dtype=np.int64)
    backend = backend or default_backend()
    if evaluator is not None:
        return walk_numpy(alpha, gamma, ell, evaluator, base, walkers, steps, record, offset)
    code = FAMILY_CODES[family]
    hh = float(h) if h is not None else 1.0
    if backend == "numba":
        if numba is None:
            raise DomainError("numba backend requested but numba is not importable")
        out, failed = _walk_nb(float(alpha), float(gamma), float(ell), code, hh,
                               np.uint64(base), int(walkers), int(steps), record, int(offset))
        if failed >= 0:
            raise IterationLimitError(f"walker {failed} exceeded {MAX_ATTEMPTS} rejections")
        return out
    return walk_numpy(alpha, gamma, ell, lambda xi: _g_numpy(code, hh, xi), base,
                      walkers, steps, record, offset)
