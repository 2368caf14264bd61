import os
import subprocess
import sys

import numpy as np
import pytest

from magline import _backend, _pykernels

try:
    from magline import _ckernels
except ImportError:  # extension not built
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def test_backend_name():
    assert _backend.BACKEND in ("cython", "python")
    if _ckernels is not None and not os.environ.get("MAGLINE_PURE"):
        assert _backend.BACKEND == "cython"


def test_pure_env_var_selects_python():
    out = subprocess.run([sys.executable, "-c", "from magline import _backend; print(_backend.BACKEND)"],
                         env={**os.environ, "MAGLINE_PURE": "1"}, capture_output=True, text=True,
                         check=True)
    assert out.stdout.strip() == "python"


@needs_ext
def test_scalar_kernels_agree():
    rng = np.random.default_rng(0)
    for _ in range(300):
        x, y, z = rng.uniform(0, 5, 3)
        assert _ckernels.carlson_rf(x, y, z) == pytest.approx(_pykernels.carlson_rf(x, y, z),
                                                              rel=1e-15)
        k = rng.uniform(0, 0.999)
        assert _ckernels.complete_k(k) == pytest.approx(_pykernels.complete_k(k), rel=1e-15)


@needs_ext
@pytest.mark.parametrize("k", [0.0, 0.3, 0.9, 0.9999999, 1.0])
def test_sncndn_agree(k):
    u = np.linspace(-30, 30, 3001)
    a = _ckernels.sncndn_array(u, k)
    b = _pykernels.sncndn_array(u, k)
    for x, y in zip(a, b):
        assert np.abs(np.asarray(x) - np.asarray(y)).max() < 1e-15
    for ui in (-3.3, 0.0, 7.1):
        assert _ckernels.sncndn(ui, k) == pytest.approx(_pykernels.sncndn(ui, k), abs=1e-15)


@needs_ext
@pytest.mark.parametrize("omega,b", [((0, 0, 1), (0, 0, 0)), ((1, 0, 0), (0, 0, 0)),
                                     ((0, 0, 0), (0, 0, 2))])
def test_dopri_agree(omega, b):
    y0 = np.array([2.0, 0.3, 0.0, 0.0, 0.6, 0.8])
    times = np.linspace(0, 10, 101)
    args = (np.array(omega, float), np.array(b, float), y0, times, 1e-10, 1e-10, 0.1)
    oc, sc = _ckernels.dopri_linear(*args)
    op, sp = _pykernels.dopri_linear(*args)
    assert tuple(sc) == pytest.approx(tuple(sp))
    assert np.abs(np.asarray(oc) - np.asarray(op)).max() < 1e-12
