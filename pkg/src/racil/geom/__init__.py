"""Ray-cast geometry core with backend selection.

Prefers the compiled Cython kernel; falls back to the pure-Python twin when
the extension is not built.  Both produce bit-identical results (verified by
tests/test_geom.py); benchmarks/bench_raycast.py compares their throughput.
Set RACIL_FORCE_PURE=1 to force the fallback.
"""

import os

from . import pure as _pure
from .scene import (  # noqa: F401
    GOAL_ID_BASE,
    KIND_GOAL,
    KIND_UAV,
    NO_COLLIDER,
    OBSTACLE_ID_BASE,
    TAG_GOAL,
    TAG_NAMES,
    TAG_NONE,
    TAG_OBSTACLE,
    TAG_OWN_GOAL,
    TAG_UAV,
    TAG_WALL,
    UAV_ID_BASE,
    WALL_ID_BASE,
    PackedScene,
    build_scene,
    scene_from_world,
)

if os.environ.get("RACIL_FORCE_PURE"):
    _impl = _pure
else:
    try:
        from . import _kernel as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _pure

BACKEND = _impl.BACKEND
cast_rays = _impl.cast_rays
cast_rays_pure = _pure.cast_rays


def compiled_available():
    try:
        from . import _kernel  # noqa: F401
        return True
    except ImportError:
        return False
