"""Hot loops, compiled when the Cython extension is built.

Set ``MINSKYLAB_PURE=1`` to force the pure-Python versions.
"""
import os

from . import _pykernels

BACKEND = "python"
if not os.environ.get("MINSKYLAB_PURE"):
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
else:
    _impl = _pykernels

lex_normal = _impl.lex_normal
two_factors = _impl.two_factors
check_assoc = _impl.check_assoc
find_counterexample = _impl.find_counterexample
