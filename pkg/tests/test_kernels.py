import numpy as np
import pytest

from stefbound import _core
from stefbound._core import _pykernels

try:
    from stefbound._core import _ckernels
except ImportError:  # pragma: no cover - extension not built
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def _grid(n, seed=3):
    rng = np.random.default_rng(seed)
    x = np.sort(np.concatenate([[0.0, 1.0], rng.uniform(0, 1, n - 1)]))
    y = np.sin(7 * x) + x ** 2
    ym = np.sin(7 * (x[:-1] + x[1:]) / 2) + ((x[:-1] + x[1:]) / 2) ** 2
    return x, y, ym


def test_backend_flag_matches_selection():
    expected = "cython" if _core.simpson is not _pykernels.simpson else "python"
    assert _core.BACKEND == expected


@needs_ext
@pytest.mark.parametrize("n", [2, 8, 101, 4096])
def test_backends_agree(n):
    x, y, ym = _grid(n)
    h = 1.0 / (n - n % 2)
    yu = np.sin(np.linspace(0, 3, n - n % 2 + 1))
    for name in ("trapezoid", "max_slope"):
        assert getattr(_ckernels, name)(x, y) == pytest.approx(getattr(_pykernels, name)(x, y), rel=1e-13)
    for name in ("cellwise_simpson",):
        assert _ckernels.cellwise_simpson(x, y, ym) == pytest.approx(_pykernels.cellwise_simpson(x, y, ym), rel=1e-13)
    np.testing.assert_allclose(_ckernels.cumulative_simpson(x, y, ym),
                               _pykernels.cumulative_simpson(x, y, ym), rtol=1e-13, atol=1e-15)
    assert _ckernels.simpson(yu, h) == pytest.approx(_pykernels.simpson(yu, h), rel=1e-13)
    assert _ckernels.rs_sum(ym, y) == pytest.approx(_pykernels.rs_sum(ym, y), rel=1e-12, abs=1e-15)
    assert _ckernels.variation(y) == pytest.approx(_pykernels.variation(y), rel=1e-13)


@pytest.mark.parametrize("mod", [_pykernels] + ([_ckernels] if _ckernels else []),
                         ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def test_kernel_values(mod):
    x = np.array([0.0, 0.5, 1.0])
    assert mod.simpson(x ** 2, 0.5) == pytest.approx(1 / 3, abs=1e-15)
    assert mod.trapezoid(x, 2 * x) == 1.0
    assert mod.variation(np.array([0.0, 2.0, -1.0])) == 5.0
    assert mod.max_slope(x, np.array([0.0, 1.0, 1.5])) == 2.0
    assert mod.rs_sum(np.array([1.0, 1.0]), x) == 1.0
    cum = mod.cumulative_simpson(x, x ** 2, np.array([0.0625, 0.5625]))
    assert list(cum) == pytest.approx([0.0, 1 / 24, 1 / 3], abs=1e-15)
