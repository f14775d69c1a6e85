"""Semidefinite programming bounds for error-correcting and covering codes.

Thin wrapper over the C++ core. Exact integer results cross the boundary as
decimal strings; this module converts them back to Python ints.
"""

from ._core import (  # noqa: F401
    affine_cap_bound,
    block_specs,
    class_count,
    code_bound,
    covering_bound,
)
from ._core import binomial as _binomial
from ._core import krawtchouk as _krawtchouk
from ._core import sphere_covering_bound as _sphere_covering_bound

__all__ = [
    "affine_cap_bound",
    "binomial",
    "block_specs",
    "class_count",
    "code_bound",
    "covering_bound",
    "krawtchouk",
    "sphere_covering_bound",
]


def binomial(n: int, k: int) -> int:
    return int(_binomial(n, k))


def krawtchouk(q: int, n: int, j: int, x: int) -> int:
    return int(_krawtchouk(q, n, j, x))


def sphere_covering_bound(q: int, n: int, r: int) -> int:
    return int(_sphere_covering_bound(q, n, r))
