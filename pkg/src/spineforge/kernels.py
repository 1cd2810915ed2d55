"""Kernel selection: compiled extension when available, pure Python otherwise.

Set SPINEFORGE_KERNEL=python (or =cython) to force a choice; the two
implementations produce identical results, so everything downstream is
kernel-agnostic.  SPINEFORGE_SEED is ignored by design: nothing here is
randomized.
"""

import os

from . import _kernels_py

_forced = os.environ.get("SPINEFORGE_KERNEL", "").strip().lower()

if _forced == "python":
    _impl = _kernels_py
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[no-redef]
    except ImportError:
        if _forced == "cython":
            raise
        _impl = _kernels_py

KERNEL_NAME = _impl.KERNEL_NAME
refine = _impl.refine
automorphisms = _impl.automorphisms
SearchLimitExceeded = _impl.SearchLimitExceeded


def all_kernels():
    """(name, module) pairs of every importable kernel, for benchmarks/tests."""
    out = [("python", _kernels_py)]
    try:
        from . import _kernels_cy

        out.append(("cython", _kernels_cy))
    except ImportError:
        pass
    return out
