"""Python bindings for the microgripper multiphysics toolkit."""

try:
    from ._pygripper import *  # noqa: F401,F403  (installed package)
except ImportError:
    from _pygripper import *  # noqa: F401,F403  (build-tree layout)
