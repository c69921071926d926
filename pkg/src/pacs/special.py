"""Special functions used by the closed-form formulas and Fock amplitudes."""
import math

import numpy as np

from .errors import DomainError

MAX_ORDER = 32


def laguerre(m, x):
    """Laguerre polynomial L_m(x) by upward three-term recurrence.

    ``x`` may be a scalar or an array; the result has the same shape.

    The recurrence (k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1} is free of
    cancellation for x <= 0, which is the only regime the photon-addition
    formulas need (x = -T|alpha|^2).
    """
    if int(m) != m or m < 0:
        raise DomainError(f"Laguerre order must be a non-negative integer, got {m!r}")
    m = int(m)
    if m > MAX_ORDER:
        raise DomainError(f"Laguerre order {m} exceeds ceiling {MAX_ORDER}")
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("Laguerre argument must be finite")

    prev = np.ones_like(x)
    if m == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 - x
    for k in range(1, m):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    return cur if cur.ndim else float(cur)


def log_factorial(n):
    """ln(n!) for a non-negative integer ``n``."""
    if n < 0:
        raise DomainError(f"factorial of negative number {n}")
    return math.lgamma(n + 1)


def log_factorials(n_max):
    """Array of ln(k!) for k = 0..n_max."""
    out = np.zeros(n_max + 1)
    if n_max > 0:
        out[1:] = np.cumsum(np.log(np.arange(1, n_max + 1)))
    return out
