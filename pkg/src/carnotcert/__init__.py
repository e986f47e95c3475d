"""Exact arithmetic in step-2 Carnot groups: bracket cones, inaccessible subspaces,
horizontal loops and their certificates."""

__version__ = "0.1.0"

from carnotcert._backend import BACKEND  # noqa: E402,F401
