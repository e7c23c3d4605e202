"""Kernel selection: the compiled extension when importable, numpy otherwise.

Set CIRCUNITS_PURE_PYTHON=1 to force the fallback.
"""

import os

BACKEND = "python"
if not os.environ.get("CIRCUNITS_PURE_PYTHON"):
    try:
        from ._ckernels import modinv, modpow, relation_products, symbol_values  # noqa: F401

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        pass
if BACKEND == "python":
    from ._kernels_py import modinv, modpow, relation_products, symbol_values  # noqa: F401
