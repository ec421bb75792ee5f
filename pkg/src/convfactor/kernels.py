"""Kernel dispatch: compiled log-potential evaluation with a numpy fallback.

``eval_potential(points, charges, weights, robin)`` returns
``robin + sum_j weights[j] * ln|points - charges[j]|`` for a complex point
batch.  The compiled extension (built from ``_green_kernel.pyx``) is used
when the install compiled it; otherwise a chunked numpy implementation with
identical semantics takes over.  ``IMPLEMENTATION`` records which one won.
"""

from __future__ import annotations

import numpy as np

try:  # pragma: no cover - exercised indirectly via IMPLEMENTATION
    from . import _green_kernel as _compiled
except ImportError:  # pragma: no cover
    _compiled = None

IMPLEMENTATION = "compiled" if _compiled is not None else "python"

# chunk size keeps the fallback's temporaries around ~32 MB
_CHUNK = 2_000_000


def eval_potential_numpy(points: np.ndarray, charges: np.ndarray,
                         weights: np.ndarray, robin: float) -> np.ndarray:
    pts = np.ascontiguousarray(points, dtype=complex).ravel()
    out = np.full(pts.shape, robin, dtype=float)
    step = max(1, _CHUNK // max(1, len(charges)))
    for k in range(0, len(pts), step):
        blk = pts[k:k + step, None] - charges[None, :]
        out[k:k + step] += np.log(np.abs(blk)) @ weights
    return out.reshape(np.shape(points))


def eval_potential_compiled(points: np.ndarray, charges: np.ndarray,
                            weights: np.ndarray, robin: float) -> np.ndarray:
    pts = np.ascontiguousarray(points, dtype=complex).ravel()
    out = np.empty(pts.shape, dtype=float)
    _compiled.eval_potential(
        np.ascontiguousarray(pts.real), np.ascontiguousarray(pts.imag),
        np.ascontiguousarray(charges.real, dtype=float),
        np.ascontiguousarray(charges.imag, dtype=float),
        np.ascontiguousarray(weights, dtype=float),
        float(robin), out)
    return out.reshape(np.shape(points))


eval_potential = (eval_potential_compiled if _compiled is not None
                  else eval_potential_numpy)
