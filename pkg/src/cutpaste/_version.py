"""Package version and the build identifier stamped into dataset manifests."""

from __future__ import annotations

import hashlib
import os

__version__ = "0.1.0"


def generator_version() -> str:
    """Version plus a hash of the package sources.

    Two installs produce the same identifier iff they run the same code,
    which is what dataset manifests need to record.
    """
    pkg_dir = os.path.dirname(os.path.abspath(__file__))
    digest = hashlib.sha256()
    for name in sorted(os.listdir(pkg_dir)):
        if not name.endswith(".py"):
            continue
        digest.update(name.encode("utf-8"))
        with open(os.path.join(pkg_dir, name), "rb") as fh:
            digest.update(fh.read())
    return f"{__version__}+g{digest.hexdigest()[:12]}"
