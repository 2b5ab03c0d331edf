"""Exception types and small argument checks shared across modules."""

import math
import numbers


class DomainError(ValueError):
    """A parameter lies outside the domain where the model is defined."""


def check_positive(name, value):
    if not isinstance(value, numbers.Real) or isinstance(value, bool):
        raise DomainError(f"{name} must be a real number > 0 (got {value!r})")
    if not math.isfinite(value) or value <= 0:
        raise DomainError(f"{name} must be > 0 (got {value!r})")
    return value


def check_finite(name, value):
    if not isinstance(value, numbers.Real) or isinstance(value, bool):
        raise DomainError(f"{name} must be a finite real number (got {value!r})")
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite (got {value!r})")
    return value


def check_positive_int(name, value):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        if isinstance(value, numbers.Real) and float(value).is_integer():
            value = int(value)
        else:
            raise DomainError(f"{name} must be an integer >= 1 (got {value!r})")
    if value < 1:
        raise DomainError(f"{name} must be an integer >= 1 (got {value!r})")
    return int(value)


def check_open_unit(name, value):
    check_finite(name, value)
    if not 0.0 < value < 1.0:
        raise DomainError(f"{name} must lie in the open interval (0, 1) (got {value!r})")
    return value
