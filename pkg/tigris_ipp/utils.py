import math

TWO_PI = 2.0 * math.pi


def wrap_angle(angle: float) -> float:
    """Normalize an angle to [0, 2π)."""
    wrapped = math.fmod(angle, TWO_PI)
    if wrapped < 0.0:
        wrapped += TWO_PI
    # fmod of a tiny negative number can round up to exactly 2π
    if wrapped >= TWO_PI:
        wrapped = 0.0
    return wrapped


def angle_difference(a: float, b: float) -> float:
    """Smallest signed difference a - b, in (-π, π]."""
    diff = math.fmod(a - b, TWO_PI)
    if diff <= -math.pi:
        diff += TWO_PI
    elif diff > math.pi:
        diff -= TWO_PI
    return diff


def format_float(value: float, digits: int = 17) -> str:
    """Format a float as a YAML 1.1 float literal that reads back exactly (at 17
    digits)."""
    if math.isnan(value):
        return ".nan"
    if math.isinf(value):
        return ".inf" if value > 0 else "-.inf"
    text = f"{value:.{digits}g}"
    mantissa, _, exponent = text.partition("e")
    # PyYAML only resolves plain scalars with a dot as floats.
    if "." not in mantissa:
        mantissa += ".0"
    return f"{mantissa}e{exponent}" if exponent else mantissa
