import os
import platform
import socket
import sys
from functools import lru_cache

from .constant import package_name, version
from .utils import logger

_CONTEXT = dict(
    package=dict(name=package_name, version=version),
    os=platform.platform(),
    language=f"Python/{platform.python_version()}",
    hostname=socket.gethostname(),
)

# Modules whose versions are recorded when loaded.
_TRACKED = ("numpy", "scipy", "yaml", "pydantic", "tdigest")


def run_context(root_directory=None):
    """
    Where and with what a run was made: package, platform, library versions
    and, inside a git checkout, the HEAD revision.
    """
    ctx = dict(_CONTEXT)

    versions = dict(python=platform.python_version())
    for name in _TRACKED:
        mod = sys.modules.get(name)
        if mod is not None and hasattr(mod, "__version__"):
            versions[name] = str(mod.__version__)
    ctx["versions"] = versions

    git_dir = find_git_dir(root_directory or os.getcwd())
    if git_dir != "":
        rev = get_git_revision(git_dir)
        if rev is not None:
            ctx["revision"] = rev
    return ctx


@lru_cache(maxsize=64)
def get_git_revision(dirpath):
    try:
        return _get_git_revision(dirpath)
    except (OSError, IOError) as err:
        logger.error("get_git_revision failed: %s", err)
        return None


def _get_git_revision(dirpath):
    with open(os.path.join(dirpath, ".git", "HEAD"), "r", encoding="utf8") as f:
        head = f.read().rstrip()

    prefix = "ref: "
    if not head.startswith(prefix):
        return head
    ref = head[len(prefix):]

    try:
        with open(os.path.join(dirpath, ".git", ref), "r", encoding="utf8") as f:
            return f.read().rstrip()
    except (OSError, IOError):
        pass

    with open(os.path.join(dirpath, ".git", "packed-refs"), "r", encoding="utf8") as f:
        for line in f:
            if not line or line[0] in ("#", "^"):
                continue
            parts = line.rstrip().split(" ")
            if len(parts) == 2 and parts[1] == ref:
                return parts[0]
    return None


def find_git_dir(directory):
    """
    Returns the first of directory and its parents that holds a .git entry,
    or "" when there is none.
    """
    directory = os.path.abspath(directory)
    if not os.path.exists(directory):
        return ""

    while True:
        if os.path.exists(os.path.join(directory, ".git")):
            return directory
        parent = os.path.dirname(directory)
        if parent == directory:
            return ""
        directory = parent
