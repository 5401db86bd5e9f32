"""Model-free pricing and hedging on a finite price grid.

The heavy lifting lives in the compiled extension; this package re-exports
its surface. When installed as a wheel the extension sits inside the
package; in a development tree it is found on sys.path next to the build
directory.
"""

try:
    from ._gridhedge import *  # noqa: F401,F403
    from ._gridhedge import __version__  # noqa: F401
except ImportError:  # in-tree builds: extension on sys.path, not in-package
    from _gridhedge import *  # noqa: F401,F403
    from _gridhedge import __version__  # noqa: F401
