import numpy as np
import pytest

from tlevy import kernels
from tlevy.errors import DomainError


def test_mix64_reference_values():
    # SplitMix64 outputs for state 0: first three values of the reference generator
    state = np.uint64(0)
    got = []
    with np.errstate(over="ignore"):
        for _ in range(3):
            state = state + kernels.GOLDEN
            got.append(int(kernels.mix64(state)))
    assert got == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]


def test_uniforms_open_interval():
    keys = kernels.walker_keys(kernels.stream_base(3), 1000)
    u = kernels.uniforms(keys, np.zeros(1000, dtype=np.uint64))
    assert np.all((u > 0) & (u < 1))
    assert abs(u.mean() - 0.5) < 4 * np.sqrt(1 / 12 / 1000)


def test_seed_validation():
    with pytest.raises(DomainError):
        kernels.stream_base(-1)
    with pytest.raises(DomainError):
        kernels.stream_base(2 ** 64)


def test_backend_env(monkeypatch):
    monkeypatch.setenv("TLEVY_BACKEND", "numpy")
    assert kernels.default_backend() == "numpy"
    monkeypatch.setenv("TLEVY_BACKEND", "cuda")
    with pytest.raises(DomainError):
        kernels.default_backend()
    monkeypatch.delenv("TLEVY_BACKEND")
    assert kernels.default_backend() in kernels.available_backends()


@pytest.mark.parametrize("alpha,family,h", [(1.0, "ms", None), (1.5, "exp", None),
                                            (0.6, "pexp", 2.0), (0.4, "pexp", 0.5)])
def test_backends_agree(alpha, family, h):
    base = kernels.stream_base(99)
    args = (alpha, 1.0, 20.0, family, h, base, 500, 12, [1, 6, 12])
    a = kernels.walk_positions(*args, backend="numba")
    b = kernels.walk_positions(*args, backend="numpy")
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)


def test_walker_streams_independent_of_batching():
    base = kernels.stream_base(5)
    whole = kernels.walk_positions(1.2, 1.0, 30.0, "exp", None, base, 300, 5, [5])
    tail = kernels.walk_positions(1.2, 1.0, 30.0, "exp", None, base, 100, 5, [5], offset=200)
    np.testing.assert_array_equal(whole[:, 200:], tail)


def test_ms_increments_bounded():
    base = kernels.stream_base(8)
    x = kernels.walk_positions(0.8, 1.0, 5.0, "ms", None, base, 2000, 1, [1])
    assert np.all(np.abs(x) <= 5.0)
