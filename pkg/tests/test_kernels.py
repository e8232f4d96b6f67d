"""Compiled and pure Python backends must agree bit for bit."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hedgekit import _pykernels, kernels

needs_ext = pytest.mark.skipif(kernels.compiled is None, reason="compiled kernels not built")
BACKENDS = [kernels.pure] + ([kernels.compiled] if kernels.compiled is not None else [])


def test_xoshiro_reference_vectors():
    # published xoshiro256** outputs for state {1, 2, 3, 4}
    rng = _pykernels.Xoshiro256(state=[1, 2, 3, 4])
    assert [rng.next_u64() for _ in range(4)] == [11520, 0, 1509978240, 1215971899390074240]


def test_splitmix_reference_vector():
    assert _pykernels.splitmix64(0)[1] == 0xE220A8397B1DCDAF


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.__name__)
def test_normals_look_normal(backend):
    z = backend.normals(2024, 200_000)
    assert abs(z.mean()) < 0.01
    assert abs(z.std() - 1) < 0.01
    assert abs(np.mean(z**3)) < 0.03
    assert abs(np.mean(z**4) - 3) < 0.06


@needs_ext
@pytest.mark.parametrize("seed", [0, 1, 42, 2**63 + 5, 2**64 - 1])
@pytest.mark.parametrize("count", [1, 2, 7, 1000])
def test_normals_identical(seed, count):
    assert kernels.pure.normals(seed, count).tobytes() == kernels.compiled.normals(seed, count).tobytes()


@needs_ext
@given(st.integers(0, 2**64 - 1), st.integers(2, 300), st.floats(-0.5, 0.5), st.floats(0.01, 1.0),
       st.floats(-0.1, 0.1), st.floats(0, 0.99), st.floats(0, 0.5))
@settings(max_examples=50, deadline=None)
def test_synth_identical(seed, n, mu, sigma, kappa, phi, sigma_s):
    a = kernels.pure.synth_path(seed, n, mu, sigma, kappa, phi, sigma_s)
    b = kernels.compiled.synth_path(seed, n, mu, sigma, kappa, phi, sigma_s)
    assert a[0].tobytes() == b[0].tobytes() and a[1].tobytes() == b[1].tobytes()


@needs_ext
@given(st.lists(st.floats(0, 1), min_size=1, max_size=80), st.integers(1, 12), st.integers(0, 3),
       st.floats(-2, 2), st.floats(-2, 2), st.floats(0, 1), st.floats(0, 0.2), st.integers(1, 6))
@settings(max_examples=200, deadline=None)
def test_hedge_and_pnl_identical(sig, window, kind, alpha, beta, h0, band, k):
    sig = np.array(sig)
    ra = kernels.pure.rolling_mean(sig, window)
    rb = kernels.compiled.rolling_mean(sig, window)
    assert ra.tobytes() == rb.tobytes()
    ha = kernels.pure.hedge_path(ra, kind, h0, alpha, beta, 0.5, band, 0.0, 1.0, k)
    hb = kernels.compiled.hedge_path(rb, kind, h0, alpha, beta, 0.5, band, 0.0, 1.0, k)
    assert ha[0].tobytes() == hb[0].tobytes() and ha[1].tobytes() == hb[1].tobytes()
    rets = np.sin(np.arange(len(sig) - 1) * 1.7) * 0.02
    pa = kernels.pure.pnl_path(ha[0], rets, 10000.0, 0.0005)
    pb = kernels.compiled.pnl_path(hb[0], rets, 10000.0, 0.0005)
    assert pa[0].tobytes() == pb[0].tobytes() and pa[1].tobytes() == pb[1].tobytes()


@needs_ext
@given(st.lists(st.floats(0.1, 1e6), min_size=1, max_size=60))
def test_drawdown_identical(curve):
    assert kernels.pure.max_drawdown(curve) == kernels.compiled.max_drawdown(np.array(curve))


def test_backend_flag():
    assert kernels.BACKEND in ("cython", "python")
