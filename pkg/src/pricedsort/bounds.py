"""Closed-form expected costs and bounds, looked up by name."""

from __future__ import annotations

import math
from typing import Callable

from pricedsort.errors import ParameterError


def harmonic(k: int) -> float:
    """H_k = 1 + 1/2 + ... + 1/k, by direct summation."""
    if k < 0:
        raise ParameterError(f"harmonic number needs k >= 0, got {k}")
    return math.fsum(1.0 / i for i in range(1, k + 1))


def log_base(x: float, base: float) -> float:
    return math.log(x) / math.log(base)


def expected_extensions(n: int, p: float) -> float:
    """Expected number of linear extensions of the random order G(n, p)."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if not 0.0 < p <= 1.0:
        raise ParameterError(f"p must lie in (0, 1], got {p}")
    value = 1.0
    for k in range(1, n + 1):
        value *= (1.0 - (1.0 - p) ** k) / p
    return value


def _need(name: str, **args):
    for key, value in args.items():
        if value is None:
            raise ParameterError(f"bound {name!r} needs {key}")
    if args.get("n") is not None and args["n"] < 1:
        raise ParameterError(f"bound {name!r} needs n >= 1")
    p = args.get("p")
    if p is not None and not 0.0 < p <= 1.0:
        raise ParameterError(f"bound {name!r} needs p in (0, 1]")


def _uniform_findmax(n, p, k):
    _need("uniform_findmax_bound", n=n)
    return 2.0 * (harmonic(n) - 1.0)


def _rank_cert(n, p, k):
    _need("rank_cert_expect", n=n, k=k)
    if not 1 <= k <= n:
        raise ParameterError(f"k={k} outside 1..{n}")
    return harmonic(k) + harmonic(n - k + 1) - 2.0


def _uniform_sortcert(n, p, k):
    _need("uniform_sortcert_expect", n=n)
    return (n - 1) / 2.0


def _boolean_findmax_limit(n, p, k):
    _need("boolean_findmax_limit", p=p)
    return 1.0 / p - 1.0


def _boolean_findmax_gap(n, p, k):
    # Distance between the finite-n survivor expectation and the limit.
    _need("boolean_findmax_gap", n=n, p=p)
    return (1.0 - p) ** n / p


def _boolean_survivors(n, p, k):
    _need("boolean_survivors_expect", n=n, p=p)
    return (1.0 - (1.0 - p) ** n) / p


def _boolean_sortcert(n, p, k):
    _need("boolean_sortcert_expect", n=n, p=p)
    return (1.0 - p) * (n - 1)


def _boolean_sort(n, p, k):
    _need("boolean_sort_bound", n=n, p=p)
    if p == 1.0:
        return 0.0
    return min(log_base(1.0 / p, 11.0 / 8.0), 1.0 / p - 1.0) * (n - 1)


def _boolean_repeated_max(n, p, k):
    _need("boolean_repeated_max_bound", n=n, p=p)
    return (1.0 / p - 1.0) * (n - 1)


def _extensions(n, p, k):
    _need("extensions_expect", n=n, p=p)
    return expected_extensions(n, p)


def _poset_isolated(n, p, k):
    _need("poset_isolated_expect", n=n, p=p)
    return n * (1.0 - p) ** (n - 1)


def _poset_allmax_lower(n, p, k):
    _need("poset_allmax_lower", n=n, p=p)
    return (n - n * (1.0 - p) ** (n - 1)) / 2.0


def _poset_allmax_upper(n, p, k):
    _need("poset_allmax_upper", n=n)
    if n == 1:
        return 0.0
    return (n - 1) * (harmonic(n - 1) + 1.0)


def _poset_findmax_upper(n, p, k):
    _need("poset_findmax_upper", n=n)
    return float(n - 1)


BOUNDS: dict[str, Callable[[int | None, float | None, int | None], float]] = {
    "uniform_findmax_bound": _uniform_findmax,
    "rank_cert_expect": _rank_cert,
    "uniform_sortcert_expect": _uniform_sortcert,
    "boolean_findmax_limit": _boolean_findmax_limit,
    "boolean_findmax_gap": _boolean_findmax_gap,
    "boolean_survivors_expect": _boolean_survivors,
    "boolean_sortcert_expect": _boolean_sortcert,
    "boolean_sort_bound": _boolean_sort,
    "boolean_repeated_max_bound": _boolean_repeated_max,
    "extensions_expect": _extensions,
    "poset_isolated_expect": _poset_isolated,
    "poset_allmax_lower": _poset_allmax_lower,
    "poset_allmax_upper": _poset_allmax_upper,
    "poset_findmax_upper": _poset_findmax_upper,
}


def bound(name: str, n: int | None = None, p: float | None = None, k: int | None = None) -> float:
    """Evaluate the named closed form.  ``harmonic`` reads its argument from ``k`` or ``n``."""
    if name == "harmonic":
        arg = k if k is not None else n
        if arg is None:
            raise ParameterError("harmonic needs k")
        return harmonic(arg)
    try:
        fn = BOUNDS[name]
    except KeyError:
        raise ParameterError(f"unknown bound {name!r}") from None
    return float(fn(n, p, k))
