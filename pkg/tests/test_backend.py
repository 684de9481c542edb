"""Backend selection: numba kernels vs the pure-numpy fallback."""

import os
import subprocess
import sys

import numpy as np
import pytest
from conftest import random_hermitian, random_hermitian_pd

from eigenpsd import _backend
from eigenpsd import _kernels as k


def test_default_backend_uses_numba_when_available():
    try:
        import numba  # noqa: F401
    except ImportError:
        pytest.skip("numba not installed")
    if os.environ.get(_backend.DISABLE_ENV, "0").strip().lower() not in ("", "0", "false", "no"):
        pytest.skip("fallback requested via environment")
    assert _backend.NUMBA_ENABLED
    assert hasattr(k.jacobi_eigh, "py_func")


def test_env_flag_disables_numba():
    code = (
        "import os; os.environ['EIGENPSD_DISABLE_NUMBA'] = '1'\n"
        "import numpy as np\n"
        "from eigenpsd import _backend, _kernels, pipeline\n"
        "from eigenpsd.simulate import ScenarioSpec, simulate_scenario\n"
        "from eigenpsd.spatial import ArrayScene\n"
        "assert not _backend.NUMBA_ENABLED\n"
        "assert not hasattr(_kernels.jacobi_eigh, 'py_func')\n"
        "lam, u, st = _kernels.jacobi_eigh(np.eye(3, dtype=np.complex128), 1e-14, 100)\n"
        "assert st == 0 and np.allclose(lam, 1.0)\n"
        "scene = ArrayScene.linear(2, 0.08)\n"
        "sc = simulate_scenario(ScenarioSpec(scene=scene, duration=0.25, snr_db=5.0, seed=1))\n"
        "res = pipeline.enhance_all(sc.mixture, scene, tau=0.2)\n"
        "assert all(np.all(np.isfinite(v)) for v in res.outputs.values())\n"
        "print('fallback-ok')\n"
    )
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True)
    assert out.returncode == 0, out.stderr
    assert "fallback-ok" in out.stdout


def test_compiled_and_python_kernels_agree():
    if not _backend.NUMBA_ENABLED:
        pytest.skip("numba disabled; nothing to compare")
    rng = np.random.default_rng(0)
    a = random_hermitian(rng, 5)
    gamma = random_hermitian_pd(rng, 5)

    lam_c, u_c, st_c = k.jacobi_eigh(a, 1e-14, 100)
    lam_p, u_p, st_p = k.jacobi_eigh.py_func(a, 1e-14, 100)
    assert st_c == st_p == k.STATUS_OK
    np.testing.assert_allclose(lam_c, lam_p, rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(u_c, u_p, rtol=1e-12, atol=1e-12)

    l_c, _ = k.cholesky_lower(gamma)
    l_p, _ = k.cholesky_lower.py_func(gamma)
    np.testing.assert_allclose(l_c, l_p, rtol=1e-13, atol=1e-15)

    lam_c, p_c, _ = k.gevd_with_chol(a, l_c, 1e-14, 100)
    lam_p, p_p, _ = k.gevd_with_chol.py_func(a, l_p, 1e-14, 100)
    np.testing.assert_allclose(lam_c, lam_p, rtol=1e-12, atol=1e-13)
    np.testing.assert_allclose(p_c, p_p, rtol=1e-11, atol=1e-12)


def test_fallback_pipeline_matches_numba_on_short_scene():
    if not _backend.NUMBA_ENABLED:
        pytest.skip("numba disabled; nothing to compare")
    from eigenpsd import pipeline
    from eigenpsd.simulate import ScenarioSpec, simulate_scenario
    from eigenpsd.spatial import ArrayScene

    scene = ArrayScene.linear(3, 0.08)
    sc = simulate_scenario(ScenarioSpec(scene=scene, duration=0.6, snr_db=5.0, seed=2))
    compiled = pipeline.enhance_all(sc.mixture, scene, tau=0.3)

    saved = k.tracked_enhance
    k.tracked_enhance = saved.py_func
    try:
        fallback = pipeline.enhance_all(sc.mixture, scene, tau=0.3)
    finally:
        k.tracked_enhance = saved
    for mode in compiled.outputs:
        np.testing.assert_allclose(fallback.outputs[mode], compiled.outputs[mode],
                                   rtol=1e-10, atol=1e-12)
