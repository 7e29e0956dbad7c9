import logging

import numpy as np


def _get_logger():
    _logger = logging.getLogger("pyadiabaton")
    fmter = logging.Formatter(
        "%(asctime)s %(filename)s:%(lineno)d %(name)s %(levelname)s - %(message)s"
    )

    sh = logging.StreamHandler()
    sh.setFormatter(fmter)
    _logger.addHandler(sh)

    return _logger


logger = _get_logger()


def frozen(arr, dtype=None):
    """Returns a read-only copy of arr."""
    out = np.array(arr, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


def rel_l2(a, b):
    """
    Relative L2 distance ||a - b|| / ||a||. Falls back to the absolute
    distance when a vanishes.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    diff = float(np.linalg.norm(a - b))
    norm = float(np.linalg.norm(a))
    if norm == 0.0:
        return diff
    return diff / norm
