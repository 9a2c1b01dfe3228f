"""Bitmask kernels for the hot combinatorial loop: minimal non-face enumeration.

Every subset of ray indices is a uint64 bitmask; a subset is a *face* iff it
is contained in some maximal cone's mask, and the primitive collections of a
simplicial fan are exactly the minimal non-faces.  The full 2^r scan is the
only loop in the package whose cost grows past milliseconds, so it gets a
numba kernel with a vectorized numpy twin.

Path selection:

* env var ``TORICFANS_ACCEL=numpy`` forces the numpy path,
  ``TORICFANS_ACCEL=numba`` forces the jitted path (ImportError if numba is
  missing); unset/auto prefers numba when importable.
* regardless of the flag, fans with fewer than ``KERNEL_MIN_RAYS`` rays take
  the numpy path: at that size the vectorized scan is already sub-millisecond
  and never pays the one-off JIT warm-up.

Both paths require r <= 25 (the scan allocates O(2^r) bytes); larger fans
fall back to the pure-Python incremental search in ``primitive``.
"""

from __future__ import annotations

import os

import numpy as np

MAX_KERNEL_RAYS = 25
KERNEL_MIN_RAYS = 15

_FLAG = os.environ.get("TORICFANS_ACCEL", "auto").lower()

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - environment without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if len(args) == 1 and callable(args[0]):
            return args[0]
        return wrap


if _FLAG == "numba" and not HAVE_NUMBA:
    raise ImportError("TORICFANS_ACCEL=numba but numba is not importable")


def active_path() -> str:
    """Name of the kernel path the auto selector would use for a large fan."""
    if _FLAG == "numpy":
        return "numpy"
    if _FLAG == "numba":
        return "numba"
    return "numba" if HAVE_NUMBA else "numpy"


@njit(cache=True)
def _minimal_nonfaces_numba(cone_masks, n_rays):  # pragma: no cover - jitted
    total = 1 << n_rays
    ncones = cone_masks.shape[0]
    is_face = np.zeros(total, dtype=np.bool_)
    for mask in range(total):
        for c in range(ncones):
            if mask & cone_masks[c] == mask:
                is_face[mask] = True
                break
    out = []
    for mask in range(1, total):
        if is_face[mask]:
            continue
        minimal = True
        for v in range(n_rays):
            bit = 1 << v
            if mask & bit and not is_face[mask & ~bit]:
                minimal = False
                break
        if minimal:
            out.append(mask)
    return out


def _minimal_nonfaces_numpy(cone_masks: np.ndarray, n_rays: int) -> list[int]:
    total = 1 << n_rays
    masks = np.arange(total, dtype=np.int64)
    is_face = np.zeros(total, dtype=bool)
    for cone in cone_masks:
        is_face |= (masks & cone) == masks
    candidate = ~is_face
    for v in range(n_rays):
        bit = np.int64(1 << v)
        has_v = (masks & bit) != 0
        candidate &= ~has_v | is_face[masks & ~bit]
    candidate[0] = False
    return [int(m) for m in np.nonzero(candidate)[0]]


def minimal_nonface_masks(cone_masks: list[int], n_rays: int) -> list[int]:
    """All minimal non-face bitmasks of the complex whose facets are cone_masks.

    Returns masks in ascending numeric order.  Raises ValueError when
    n_rays exceeds the kernel cap; callers are expected to fall back to the
    pure-Python search.
    """
    if n_rays > MAX_KERNEL_RAYS:
        raise ValueError(f"kernel supports at most {MAX_KERNEL_RAYS} rays, got {n_rays}")
    arr = np.asarray(cone_masks, dtype=np.int64)
    path = active_path()
    if path == "numba" and n_rays >= KERNEL_MIN_RAYS:
        return list(_minimal_nonfaces_numba(arr, n_rays))
    return _minimal_nonfaces_numpy(arr, n_rays)
