"""Select the integration kernel backend at import time.

The compiled extension is preferred; set ``NILCYL_FORCE_FALLBACK=1`` to
force the pure-numpy reference (used by the parity tests and the
benchmark).
"""

import os

if os.environ.get("NILCYL_FORCE_FALLBACK"):
    from ._kernel_py import BACKEND, rk4_laurent
else:
    try:
        from ._speedup import BACKEND, rk4_laurent
    except ImportError:
        from ._kernel_py import BACKEND, rk4_laurent

__all__ = ["rk4_laurent", "BACKEND"]
