"""The compiled kernels against the numpy fallback and dense references."""
import importlib
import math

import numpy as np
import pytest
from scipy.linalg import expm

from pacs import _kernels_py, kernels

compiled = pytest.importorskip("pacs._kernels")


def random_two_mode(n, seed=0):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=(n + 1, n + 1)) + 1j * rng.normal(size=(n + 1, n + 1))
    return c / np.linalg.norm(c)


def dense_beam_splitter(c, t):
    """exp(theta (a1+ a2 - a1 a2+)) on the full truncated product space."""
    n = c.shape[0]
    big = 2 * n  # room for every photon in one mode
    a = np.diag(np.sqrt(np.arange(1, big)), 1)
    eye = np.eye(big)
    a1, a2 = np.kron(a, eye), np.kron(eye, a)
    theta = math.acos(math.sqrt(t))
    gen = a1.T @ a2 - a1 @ a2.T
    psi = np.zeros((big, big), dtype=complex)
    psi[:n, :n] = c
    out = (expm(theta * gen) @ psi.ravel()).reshape(big, big)
    return out[:n, :n]


@pytest.mark.parametrize("t", [0.0, 0.2, 0.5, 0.85, 1.0])
def test_beam_splitter_matches_dense_exponential(t):
    c = random_two_mode(6, seed=1)
    # keep total photon number within the cutoff so nothing is truncated
    i, j = np.indices(c.shape)
    c[i + j > 6] = 0
    c /= np.linalg.norm(c)
    ref = dense_beam_splitter(c, t)
    for impl in (_kernels_py, compiled):
        np.testing.assert_allclose(impl.beam_splitter_apply(c, t, 6), ref, atol=1e-13)


@pytest.mark.parametrize("t", [0.3, 0.5, 0.9])
def test_beam_splitter_stable_at_high_photon_number(t):
    # blocks up to 240 photons; a column-raising recursion fails here
    c = random_two_mode(120, seed=2)
    for impl in (_kernels_py, compiled):
        out = impl.beam_splitter_apply(c, t, 240)
        assert abs(np.linalg.norm(out) - 1) < 1e-12


@pytest.mark.parametrize("t", [0.1, 0.5, 0.77])
def test_beam_splitter_backends_agree(t):
    c = random_two_mode(40, seed=3)
    a = _kernels_py.beam_splitter_apply(c, t, 40)
    b = compiled.beam_splitter_apply(c, t, 40)
    np.testing.assert_allclose(a, b, atol=1e-14)


def test_beam_splitter_zero_input():
    z = np.zeros((4, 4), dtype=complex)
    for impl in (_kernels_py, compiled):
        assert not np.any(impl.beam_splitter_apply(z, 0.5, 4))


def dense_displacement(gamma, n):
    a = np.diag(np.sqrt(np.arange(1, n)), 1)
    return expm(gamma * a.T - np.conj(gamma) * a)


def test_displaced_parity_matches_dense_displacement():
    rng = np.random.default_rng(4)
    v = rng.normal(size=(2, 6)) + 1j * rng.normal(size=(2, 6))
    v /= np.linalg.norm(v)
    betas = np.array([0, 0.4 - 0.3j, 1.5j, -2.0 + 1.0j])
    m_max = 70
    big = 160
    for impl in (_kernels_py, compiled):
        w, mass = impl.displaced_parity(v, betas, m_max)
        for b, wi, mi in zip(betas, w, mass):
            d = dense_displacement(-b, big)
            phi = d[:, :6] @ v.T
            prob = (np.abs(phi[: m_max + 1]) ** 2).sum(axis=1)
            parity = (-1.0) ** np.arange(m_max + 1)
            assert wi == pytest.approx(prob @ parity / math.pi, abs=1e-13)
            assert mi == pytest.approx(prob.sum(), abs=1e-13)


def test_displaced_parity_backends_agree():
    rng = np.random.default_rng(5)
    v = rng.normal(size=(3, 25)) + 1j * rng.normal(size=(3, 25))
    v /= np.linalg.norm(v)
    xs = np.linspace(-6, 6, 31)
    betas = ((xs[:, None] + 1j * xs[None, :]) / math.sqrt(2)).ravel()
    a = _kernels_py.displaced_parity(v, betas, 180)
    b = compiled.displaced_parity(v, betas, 180)
    np.testing.assert_allclose(a[0], b[0], atol=1e-13)
    np.testing.assert_allclose(a[1], b[1], atol=1e-13)


def test_displaced_parity_rejects_small_cutoff():
    for impl in (_kernels_py, compiled):
        with pytest.raises(ValueError):
            impl.displaced_parity(np.ones((1, 5)), np.zeros(1), 3)


def test_dispatch_honours_pure_python_flag(monkeypatch):
    monkeypatch.setenv("PACS_PURE_PYTHON", "1")
    mod = importlib.reload(kernels)
    try:
        assert mod.BACKEND == "python"
        assert mod.displaced_parity is _kernels_py.displaced_parity
    finally:
        monkeypatch.delenv("PACS_PURE_PYTHON")
        importlib.reload(kernels)
    assert kernels.BACKEND == "compiled"
