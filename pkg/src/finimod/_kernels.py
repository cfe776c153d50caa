"""Backend selection for the propagation kernel.

The compiled extension is used when it is importable and the environment
variable ``FINIMOD_PURE`` is not set to a non-empty value other than ``0``.
"""

import os

from . import _bcp_py

BACKEND = "python"
propagate = _bcp_py.propagate

if os.environ.get("FINIMOD_PURE", "") in ("", "0"):
    try:
        from . import _bcp  # type: ignore[attr-defined]
    except ImportError:
        pass
    else:
        propagate = _bcp.propagate
        BACKEND = "cython"
