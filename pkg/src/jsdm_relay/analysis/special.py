"""Lower incomplete gamma function.

Series expansion below ``v = s + 1``, Lentz continued fraction for the upper
function above it (Numerical Recipes, ch. 6.2).
"""
import math

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 10_000


def _series(s, v):
    term = 1.0 / s
    total = term
    ap = s
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= v / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    else:
        raise ArithmeticError("incomplete gamma series did not converge")
    return total * math.exp(-v + s * math.log(v))


def _upper_cf(s, v):
    b = v + 1.0 - s
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    else:
        raise ArithmeticError("incomplete gamma continued fraction did not converge")
    return math.exp(-v + s * math.log(v)) * h


def incomplete_gamma_lower(s: float, v: float) -> float:
    """``gamma(s, v) = int_0^v t^(s-1) e^(-t) dt`` for ``s > 0, v >= 0``."""
    if not s > 0:
        raise ValueError("s must be positive")
    if v < 0:
        raise ValueError("v must be non-negative")
    if v == 0:
        return 0.0
    if math.isinf(v):
        return math.gamma(s)
    if v < s + 1.0:
        return _series(s, v)
    return math.gamma(s) - _upper_cf(s, v)


def radial_moment(u: float, a: float, alpha: float) -> float:
    """``int_0^u l exp(-a l^alpha) dl = gamma(2/alpha, a u^alpha) / (alpha a^(2/alpha))``."""
    if a == 0:
        return 0.5 * u * u
    s = 2.0 / alpha
    return incomplete_gamma_lower(s, a * u ** alpha) / (alpha * a ** s)
