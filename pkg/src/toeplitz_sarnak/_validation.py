"""Small argument checks shared by the public functions."""

import numbers

import numpy as np


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    value = int(value)
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_symbols(x, name="x", allow_empty=False):
    """Return ``x`` as a 1-d numpy array (integer, float, complex or object)."""
    arr = np.asarray(x)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not allow_empty and arr.size == 0:
        raise ValueError(f"{name} must be nonempty")
    return arr


def as_int_symbols(x, name="x"):
    arr = check_symbols(x, name)
    if arr.dtype.kind not in "iub":
        if arr.dtype.kind == "O" or arr.dtype.kind == "f":
            rounded = arr.astype(np.int64)
            if not np.all(rounded == arr):
                raise ValueError(f"{name} must hold integer symbols")
            return rounded
        raise ValueError(f"{name} must hold integer symbols")
    return arr.astype(np.int64, copy=False)
