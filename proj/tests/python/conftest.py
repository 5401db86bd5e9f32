import os
import sys

# In-tree runs: pick up the built extension and the python package without an
# install. GRIDHEDGE_EXT_DIR is set by ctest to the extension's build dir.
_here = os.path.dirname(os.path.abspath(__file__))
_root = os.path.dirname(os.path.dirname(_here))
for candidate in (
    os.environ.get("GRIDHEDGE_EXT_DIR"),
    os.path.join(_root, "build", "bindings"),
    os.path.join(_root, "python"),
):
    if candidate and os.path.isdir(candidate) and candidate not in sys.path:
        sys.path.insert(0, candidate)
