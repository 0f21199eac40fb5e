"""Directional-width coresets for stochastic point sets."""

try:
    from stokern._stokern import *  # noqa: F401,F403  (installed wheel layout)
    from stokern import _stokern as _impl
except ImportError:  # in-tree builds put the extension on PYTHONPATH directly
    from _stokern import *  # noqa: F401,F403
    import _stokern as _impl

__all__ = [name for name in dir(_impl) if not name.startswith("_")]
__version__ = "0.1.0"
