"""Select the compiled kernels when available, else the pure-Python ones.

Set ``CTACP_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

if os.environ.get("CTACP_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "compiled" if _impl is not _pykernels else "python"

vec_not = _impl.vec_not
vec_and = _impl.vec_and
vec_or = _impl.vec_or
vec_imp = _impl.vec_imp
atom_vector = _impl.atom_vector
sat_indices = _impl.sat_indices
refine_once = _impl.refine_once
