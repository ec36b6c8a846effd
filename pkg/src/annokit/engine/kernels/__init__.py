"""Hot kernels with a compiled core and a pure fallback, chosen at import.

Set ANNOKIT_PURE_KERNELS=1 to force the numpy fallback (used by the kernel
parity tests and the benchmark).
"""

import os

from . import pure

if os.environ.get("ANNOKIT_PURE_KERNELS"):
    _impl = pure
else:
    try:
        from . import _native as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = pure

BACKEND = getattr(_impl, "BACKEND", "native")
token_feature_buckets = _impl.token_feature_buckets
gather_mean = _impl.gather_mean
scatter_add_mean = _impl.scatter_add_mean

__all__ = ["BACKEND", "token_feature_buckets", "gather_mean", "scatter_add_mean", "pure"]
