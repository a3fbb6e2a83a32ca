"""Scoring kernel selection.

Imports the compiled kernel when it is built, the pure-Python one
otherwise. Set GRIDOBS_PURE=1 to force the fallback (used by the
benchmark and for debugging). Both backends produce bit-identical
results; only speed differs.
"""
import os

if os.environ.get("GRIDOBS_PURE"):
    from ._pure import BACKEND, accumulate_group_totals
else:
    try:
        from ._accel import BACKEND, accumulate_group_totals
    except ImportError:
        from ._pure import BACKEND, accumulate_group_totals

__all__ = ["BACKEND", "accumulate_group_totals"]
