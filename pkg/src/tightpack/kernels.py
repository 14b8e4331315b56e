"""Kernel backend selection.

Importing this module picks the compiled kernels when the extension built,
otherwise the pure Python twin.  Both expose the same three functions with
bit-identical outputs; see benchmarks/bench_kernels.py for the speed gap.
"""

from __future__ import annotations

try:
    from . import _fastkernels as _impl
except ImportError:
    from . import _pykernels as _impl

BACKEND: str = _impl.BACKEND
max_flow_bipartite = _impl.max_flow_bipartite
decompose_k_regular = _impl.decompose_k_regular
schedule_scan = _impl.schedule_scan


def available_backends() -> list:
    """All importable backend modules (for parity tests and benchmarks)."""
    from . import _pykernels

    backends = [_pykernels]
    try:
        from . import _fastkernels

        backends.append(_fastkernels)
    except ImportError:
        pass
    return backends
