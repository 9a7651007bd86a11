"""Continuous t-norms on the rational unit interval and their residua."""
from fractions import Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def product(p, q):
    """Product t-norm."""
    return p * q


def product_residual(p, q):
    """Goguen implication: largest v with p*v <= q."""
    if p <= q:
        return ONE
    return q / p


def minimum(p, q):
    """Goedel t-norm."""
    return p if p <= q else q


def minimum_residual(p, q):
    return ONE if p <= q else q


def lukasiewicz(p, q):
    """Lukasiewicz t-norm max(p + q - 1, 0)."""
    v = p + q - 1
    return v if v > 0 else ZERO


def lukasiewicz_residual(p, q):
    v = 1 - p + q
    return v if v < 1 else ONE


TNORMS = {
    "product": (product, product_residual),
    "minimum": (minimum, minimum_residual),
    "lukasiewicz": (lukasiewicz, lukasiewicz_residual),
}

_ALIASES = {
    "prod": "product", "product": "product", "times": "product",
    "min": "minimum", "minimum": "minimum", "godel": "minimum",
    "luk": "lukasiewicz", "lukasiewicz": "lukasiewicz",
}


def canonical_tnorm(name: str) -> str:
    try:
        return _ALIASES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown t-norm {name!r}") from None
