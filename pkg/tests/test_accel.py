import os
import subprocess
import sys

import numpy as np
import pytest

from sharpconst import _accel, _speedups_py

compiled = pytest.importorskip("sharpconst._speedups", reason="compiled extension not built")


def test_kernels_agree():
    rng = np.random.default_rng(0)
    c = rng.standard_normal(9)
    xs = rng.uniform(0, 1, 500)
    assert np.allclose(compiled.horner(c, xs), _speedups_py.horner(c, xs), rtol=1e-14, atol=1e-14)
    for x in xs[:20]:
        assert compiled.horner_scalar(c, float(x)) == pytest.approx(_speedups_py.horner_scalar(c, float(x)), rel=1e-13, abs=1e-14)
    p = np.array([-0.3, 1.0, 0.0, 0.0])
    assert compiled.bisect_root(p, 0.0, 1.0, 1e-15) == pytest.approx(0.3, abs=1e-14)
    assert _speedups_py.bisect_root(p, 0.0, 1.0, 1e-15) == pytest.approx(0.3, abs=1e-14)
    v, x, w = rng.standard_normal(64), rng.uniform(0, 1, 64), rng.uniform(0, 1, 64)
    for signed in (True, False):
        assert np.allclose(compiled.power_moments(v, x, w, 5, 1.7, signed),
                           _speedups_py.power_moments(v, x, w, 5, 1.7, signed), rtol=1e-12)


def test_compiled_selected_by_default():
    if os.environ.get("SHARPCONST_PURE_PYTHON", "") not in ("", "0"):
        pytest.skip("fallback forced by the environment")
    assert _accel.COMPILED


def test_fallback_selected_by_env():
    env = dict(os.environ, SHARPCONST_PURE_PYTHON="1")
    code = "from sharpconst import _accel; print(_accel.COMPILED)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "False"
