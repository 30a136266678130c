"""Backend selection for the hot loops.

The compiled extension is used when it was built; otherwise the numpy
fallback is imported. Set ``PDMSE_PURE_PYTHON=1`` to force the fallback.
"""

import os

BACKEND = "python"

if os.environ.get("PDMSE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from ._kernels import (  # noqa: F401
            jacobi_recurrence,
            sturm_count,
            tridiag_eigvals,
            tridiag_solve_shifted,
        )

        BACKEND = "cython"
    except ImportError:
        pass

if BACKEND == "python":
    from ._fallback import (  # noqa: F401
        jacobi_recurrence,
        sturm_count,
        tridiag_eigvals,
        tridiag_solve_shifted,
    )

__all__ = [
    "BACKEND",
    "jacobi_recurrence",
    "sturm_count",
    "tridiag_eigvals",
    "tridiag_solve_shifted",
]
