"""Pure-numpy versions of the hot kernels.

Signatures and results match the compiled ``_kernels`` module exactly; this
module is used whenever the extension is missing or ``PACS_PURE_PYTHON`` is
set.
"""
import math

import numpy as np


def beam_splitter_apply(c, t, out_cutoff):
    """Apply the beam-splitter unitary to two-mode amplitudes ``c[n1, n2]``.

    Creation operators map as a1+ -> sqrt(t) a1+ - sqrt(1-t) a2+ and
    a2+ -> sqrt(1-t) a1+ + sqrt(t) a2+. The unitary conserves total photon
    number; its block ``U_n`` on n photons is the compression of
    ``U_{n-1} (x) u`` onto the symmetric subspace, u being the one-photon
    2x2 matrix. Splitting one photon off |k, n-k> gives the weights
    sqrt(k/n) (mode 1) and sqrt((n-k)/n) (mode 2), so

        U_n[i, j] = sum_{a,b} w_a(i) w_b(j) u[a, b] U_{n-1}[i - [a=1], j - [b=1]].

    Each step is a contraction, so rounding errors do not grow with n.
    Raising columns with creation operators instead amplifies them
    exponentially beyond about 50 photons.
    """
    c = np.ascontiguousarray(c, dtype=np.complex128)
    n_in = c.shape[0] - 1
    out = np.zeros((out_cutoff + 1, out_cutoff + 1), dtype=np.complex128)
    rows, cols = np.nonzero(c)
    if rows.size == 0:
        return out
    n_max = int((rows + cols).max())
    st, sr = math.sqrt(t), math.sqrt(max(0.0, 1.0 - t))

    block = np.ones((1, 1))
    for n in range(n_max + 1):
        if n > 0:
            k = np.arange(n + 1)
            w1 = np.sqrt(k / n)
            w2 = np.sqrt((n - k) / n)
            pad = np.zeros((n + 2, n + 2))  # pad[i + 1, j + 1] = U_{n-1}[i, j]
            pad[1:-1, 1:-1] = block
            block = (
                st * np.outer(w1, w1) * pad[:-1, :-1]
                + sr * np.outer(w1, w2) * pad[:-1, 1:]
                - sr * np.outer(w2, w1) * pad[1:, :-1]
                + st * np.outer(w2, w2) * pad[1:, 1:]
            )
        j = np.arange(max(0, n - n_in), min(n, n_in) + 1)
        x = c[j, n - j]
        if not np.any(x):
            continue
        y = block[:, j] @ x
        k = np.arange(max(0, n - out_cutoff), min(n, out_cutoff) + 1)
        out[k, n - k] = y[k]
    return out


def displaced_parity(vectors, betas, m_max):
    """Displaced-parity sums for a set of (possibly unnormalized) vectors.

    For each point beta returns
        W = (1/pi) sum_r sum_m (-1)^m |<m| D(-beta) |v_r>|^2
        mass = sum_r sum_m |<m| D(-beta) |v_r>|^2
    with ``m`` running to ``m_max``. Summing over ``r`` gives the Wigner
    function of the mixture sum_r |v_r><v_r|.

    Matrix elements <n+a|D(g)|n> = d_n(a) e^{i a arg g} are generated along
    each diagonal ``a`` by the normalized Laguerre recurrence
        d_{n+1} = ((2n+1+a-x) d_n - sqrt(n(n+a)) d_{n-1}) / sqrt((n+1)(n+1+a))
    with x = |g|^2. Raising the column index through (a^dagger - g*) instead
    loses all precision once |g| and n exceed a few units.
    """
    vectors = np.atleast_2d(np.asarray(vectors, dtype=np.complex128))
    betas = np.atleast_1d(np.asarray(betas, dtype=np.complex128))
    n_vec = vectors.shape[1] - 1
    n_rank = vectors.shape[0]
    n_pts = betas.size
    if m_max < n_vec:
        raise ValueError("m_max must be at least the vector cutoff")
    gam = -betas
    x = (np.abs(gam) ** 2)[:, None]
    rad = np.abs(gam)
    alpha = np.arange(m_max + 1)

    # d_0(a) = e^{-x/2} |g|^a / sqrt(a!), built iteratively to avoid overflow
    d = np.empty((n_pts, m_max + 1))
    d[:, 0] = np.exp(-0.5 * x[:, 0])
    for a in range(1, m_max + 1):
        d[:, a] = d[:, a - 1] * rad / math.sqrt(a)
    d_prev = np.zeros_like(d)
    phase = np.exp(1j * np.angle(gam)[:, None] * alpha[None, :])
    upper = np.where(alpha % 2 == 0, 1.0, -1.0)[None, :] * np.conj(phase)

    phi = np.zeros((n_pts, n_rank, m_max + 1), dtype=np.complex128)
    for n in range(n_vec + 1):
        if n > 0:
            k = n - 1
            nxt = ((2 * k + 1 + alpha - x) * d - np.sqrt(k * (k + alpha)) * d_prev) / np.sqrt(
                (k + 1) * (k + 1 + alpha)
            )
            d_prev, d = d, nxt
        width = m_max + 1 - n
        lower = d[:, :width] * phase[:, :width]
        phi[:, :, n:] += vectors[None, :, n, None] * lower[:, None, :]
        span = n_vec - n
        if span > 0:
            up = d[:, 1 : span + 1] * upper[:, 1 : span + 1]
            phi[:, :, n] += np.einsum("pa,ra->pr", up, vectors[:, n + 1 : n + 1 + span])

    prob = (np.abs(phi) ** 2).sum(axis=1)
    parity = np.where(alpha % 2 == 0, 1.0, -1.0)
    return prob @ parity / math.pi, prob.sum(axis=1)
