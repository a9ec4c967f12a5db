"""Backend selection for the hot loops.

The Cython extension ``tracefn._core`` is used when it imports; otherwise the
numpy fallback. Set ``TRACEFN_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import os

from tracefn import _fallback

if os.environ.get("TRACEFN_PURE", "") not in ("", "0"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from tracefn import _core as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback
        BACKEND = "python"

BACKENDS = {"python": _fallback}
if BACKEND == "cython":
    BACKENDS["cython"] = _impl
else:
    try:
        from tracefn import _core

        BACKENDS["cython"] = _core
    except ImportError:
        pass

gamma_corr_batch = _impl.gamma_corr_batch
kl_ring_batch = _impl.kl_ring_batch
sparse_mul_mod = _impl.sparse_mul_mod
sigma_mod = _impl.sigma_mod
self_conv_at = _impl.self_conv_at


def resolve_threads(threads) -> int:
    """'auto' / None / 0 -> os.cpu_count(); otherwise a positive int."""
    if threads in (None, "auto", 0, "0"):
        return os.cpu_count() or 1
    n = int(threads)
    if n < 1:
        raise ValueError("threads must be >= 1 or 'auto'")
    return n
