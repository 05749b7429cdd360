import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hankel_spectra import _backend, _quad_py


needs_compiled = pytest.mark.skipif("compiled" not in _backend.available_backends(),
                                    reason="extension not built")


def test_backend_selected():
    assert _backend.BACKEND in _backend.available_backends()
    with pytest.raises(ValueError):
        _backend.laplace_batch(np.array([2.0]), 0, 1.0, 0.5, False, 1e-12, 0.0, 100, backend="gpu")


def test_smooth_cutoff_shape():
    x = np.array([0.1, 0.5, 0.625, 0.75, 0.9])
    c = _quad_py.smooth_cutoff(x)
    assert c[0] == 1.0 and c[1] == 1.0 and c[-2] == 0.0 and c[-1] == 0.0
    assert c[2] == pytest.approx(0.5)


@needs_compiled
@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(1.0, 1e6), min_size=1, max_size=6), st.integers(0, 3),
       st.floats(0.3, 3.0), st.booleans())
def test_compiled_matches_python(ts, power, gamma, smooth):
    t = np.array(ts)
    upper = 0.75 if smooth else 0.5
    args = (t, power, gamma, upper, smooth, 1e-300, 1e-12, 4000)
    v1, e1, c1 = _backend.laplace_batch(*args, backend="compiled")
    v2, e2, c2 = _backend.laplace_batch(*args, backend="python")
    assert np.all(c1) and np.all(c2)
    assert np.allclose(v1, v2, rtol=1e-11, atol=0)


def test_env_forces_fallback():
    import os
    import subprocess
    import sys
    env = {**os.environ, "HANKEL_SPECTRA_PURE": "1"}
    out = subprocess.run([sys.executable, "-c", "import hankel_spectra as h; print(h.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_model_symbol_same_on_both_backends():
    from hankel_spectra.params import Kind, SymbolSpec, model_sequence
    spec = SymbolSpec(2, 1.0, kind=Kind.MODEL)
    for name in _backend.available_backends():
        a = model_sequence(spec, 300, backend=name)
        b = model_sequence(spec, 300, backend="python")
        assert np.allclose(a, b, rtol=1e-11, atol=0)
