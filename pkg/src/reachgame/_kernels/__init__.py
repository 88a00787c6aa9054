"""Hot-kernel backend selection.

Imports the compiled extension when available, otherwise falls back to the
pure-numpy reference implementation.  Setting ``REACHGAME_PURE=1`` in the
environment forces the fallback (used by the benchmark and by tests that
compare the two backends).
"""

import os

from . import _numpy_impl

if os.environ.get("REACHGAME_PURE"):
    _impl = _numpy_impl
else:
    try:
        from . import _core as _impl
    except ImportError:
        _impl = _numpy_impl

masked_value_contract = _impl.masked_value_contract
br_action_values = _impl.br_action_values


def backend_name() -> str:
    """Either ``"compiled"`` or ``"python"``."""
    return _impl.BACKEND
