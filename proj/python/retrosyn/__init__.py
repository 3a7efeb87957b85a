# Project RetroSyn - Copyright 2026 RetroSyn Developers.
# SPDX-License-Identifier: Apache-2.0
"""Two-stage single-step retrosynthesis: graph edits plus synthon completion."""

try:
    from ._core import *  # noqa: F401,F403  (installed wheel layout)
    from ._core import __doc__ as _core_doc  # noqa: F401
except ImportError:  # in-repo layout: extension lives in the CMake build tree
    import os as _os
    import sys as _sys

    _core_dir = _os.environ.get("RETROSYN_CORE_DIR")
    if not _core_dir:
        raise
    _sys.path.insert(0, _core_dir)
    from _core import *  # noqa: F401,F403

__version__ = "0.1.0"
