"""Gibbs kernel backend selection.

Prefers the compiled extension when it was built; falls back to the pure
Python twin otherwise.  Set ``RATIONALES_PURE_PYTHON=1`` to force the
fallback (used by the kernel-parity tests and the benchmark).
"""

import os

from . import gibbs_py

try:
    from . import _gibbs as _compiled
except ImportError:  # extension not built on this install
    _compiled = None

HAVE_COMPILED = _compiled is not None

if HAVE_COMPILED and not os.environ.get("RATIONALES_PURE_PYTHON"):
    gibbs_counts = _compiled.gibbs_counts
    BACKEND = "cython"
else:
    gibbs_counts = gibbs_py.gibbs_counts
    BACKEND = "python"

__all__ = ["gibbs_counts", "gibbs_py", "BACKEND", "HAVE_COMPILED"]
