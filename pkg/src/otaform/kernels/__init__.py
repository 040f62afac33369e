"""Flow-kernel backend selection.

Prefers the compiled Cython kernel; falls back to the pure-Python twin when
the extension is missing or OTAFORM_PURE_PYTHON is set. Both expose the same
unicycle_control / unicycle_flow functions with identical semantics.
"""

import os

if os.environ.get("OTAFORM_PURE_PYTHON"):
    from ._unicycle_py import (VARIANT_PAPER_LITERAL, VARIANT_PERPENDICULAR,
                               unicycle_control, unicycle_flow)
    BACKEND = "python"
else:
    try:
        from ._unicycle_cy import (VARIANT_PAPER_LITERAL, VARIANT_PERPENDICULAR,
                                   unicycle_control, unicycle_flow)
        BACKEND = "cython"
    except ImportError:
        from ._unicycle_py import (VARIANT_PAPER_LITERAL, VARIANT_PERPENDICULAR,
                                   unicycle_control, unicycle_flow)
        BACKEND = "python"

__all__ = ["BACKEND", "VARIANT_PAPER_LITERAL", "VARIANT_PERPENDICULAR",
           "unicycle_control", "unicycle_flow"]
