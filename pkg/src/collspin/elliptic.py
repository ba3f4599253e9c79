"""Complete elliptic integral of the first kind for complex parameter."""

from __future__ import annotations

import numpy as np
from scipy.special import elliprf

__all__ = ["ellipk", "ellipk_tilde"]


def ellipk(m):
    """K(m) = R_F(0, 1 - m, 1), principal branch (cut along m in (1, inf))."""
    m = np.asarray(m, dtype=complex)
    out = elliprf(np.zeros_like(m), 1 - m, np.ones_like(m))
    return out[()] if out.ndim == 0 else out


def ellipk_tilde(m):
    """K(m) - 2i K(1 - m): continuation of K across (1, inf) from below."""
    return ellipk(m) - 2j * ellipk(1 - np.asarray(m, dtype=complex))
