"""Python bindings for the dicausal core library."""

try:
    from ._dicausal import *  # noqa: F401,F403
    from ._dicausal import __version__
except ImportError:  # in-tree build: the extension sits next to this package
    from _dicausal import *  # noqa: F401,F403
    from _dicausal import __version__
