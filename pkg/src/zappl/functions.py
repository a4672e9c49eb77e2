"""Builtin test functions for the CLI.

Specs look like ``name`` or ``name:key=value,key=value``; every function maps
an ``(P, D)`` array of points to ``P`` values.
"""

from __future__ import annotations

from typing import Callable

import numpy as np


def constant(X, c: float = 1.0):
    return np.full(X.shape[0], float(c))


def coord_sum(X):
    return X.sum(axis=1)


def coord_product(X):
    return X.prod(axis=1)


def square(X):
    """``sum_k x_k**2``; in the span whenever ``b >= 2``."""
    return (X**2).sum(axis=1)


def poly(X, degree: int = 2, shift: float = 1.0):
    """``(shift + mean_k x_k)**degree``: total degree ``degree``."""
    return (shift + X.mean(axis=1)) ** int(degree)


def genz_oscillatory(X, c: float = 1.0, u: float = 0.25):
    return np.cos(2 * np.pi * u + c * X.sum(axis=1))


def genz_product_peak(X, c: float = 1.0, w: float = 0.2):
    return np.prod(1.0 / (c**-2 + (X - w) ** 2), axis=1)


BUILTINS: dict[str, Callable] = {
    "constant": constant,
    "sum": coord_sum,
    "product": coord_product,
    "square": square,
    "poly": poly,
    "oscillatory": genz_oscillatory,
    "product-peak": genz_product_peak,
}


def parse_function(spec: str) -> Callable[[np.ndarray], np.ndarray]:
    name, _, rest = spec.partition(":")
    try:
        fn = BUILTINS[name.strip()]
    except KeyError:
        raise ValueError(
            f"unknown builtin function {name!r}; choose from {', '.join(BUILTINS)}"
        ) from None
    kwargs = {}
    for item in filter(None, rest.split(",")):
        key, _, val = item.partition("=")
        kwargs[key.strip()] = float(val)

    def f(X):
        return fn(np.atleast_2d(np.asarray(X, dtype=float)), **kwargs)

    f.__name__ = name
    return f
