"""
Closed-form predictions for memory deployment on connected G(N, p).

All logarithms are natural except log_N, which is ln(x)/ln(N).
"""

import math
from dataclasses import dataclass
from typing import Tuple

from .exceptions import InvalidDeltaError, ValidationError


@dataclass(frozen=True)
class TheoryGain:
    """Predicted network-wide gain and whether M reaches the N^(1/g) threshold."""

    value: float
    above_threshold: bool

    def __float__(self) -> float:
        return self.value


def _check_gain(g: float, strict: bool = True) -> None:
    if strict and not g > 1:
        raise ValidationError(f"gain must be > 1, got {g}")
    if not strict and not g >= 1:
        raise ValidationError(f"gain must be >= 1, got {g}")


def predicted_radius(num_vertices: float, g: float, delta: float = 0.0) -> float:
    """
    Radius of the neighborhood that benefits from a single memory.

    Returns (1 - 1/g - delta) * ln N / ln ln N; delta = 0 gives the full
    radius and delta > 0 the shrunk radius used in the covering argument.

    Raises:
        InvalidDeltaError: If delta is negative or exceeds 1 - 1/g.
    """
    if num_vertices < 3:
        raise ValidationError(f"num_vertices must be >= 3, got {num_vertices}")
    _check_gain(g)
    slack = 1.0 - 1.0 / g
    if delta < 0 or delta > slack + 1e-12:
        raise InvalidDeltaError(f"delta must lie in [0, {slack:.6g}], got {delta}")
    log_n = math.log(num_vertices)
    return max(0.0, slack - delta) * log_n / math.log(log_n)


def threshold_memories(num_vertices: float, g: float) -> float:
    """N^(1/g): below this many memories the network-wide gain tends to 1."""
    if num_vertices < 2:
        raise ValidationError(f"num_vertices must be >= 2, got {num_vertices}")
    _check_gain(g, strict=False)
    return num_vertices ** (1.0 / g)


def theory_gain(num_vertices: int, num_memories: int, g: float) -> TheoryGain:
    """
    g / (1 - g·log_N(M/N)), the almost-sure gain above threshold.

    The value is only meaningful when ``above_threshold`` is true; at
    M = N^(1/g + δ) it equals 1/(1 - δ).
    """
    if not 1 <= num_memories <= num_vertices:
        raise ValidationError(f"num_memories must lie in 1..{num_vertices}, got {num_memories}")
    _check_gain(g, strict=False)
    log_ratio = math.log(num_memories / num_vertices) / math.log(num_vertices)
    value = g / (1.0 - g * log_ratio)
    above = num_memories >= threshold_memories(num_vertices, g)
    return TheoryGain(value, above)


def below_threshold_gain_bound(num_vertices: int, num_memories: int, g: float) -> float:
    """
    Upper bound N / (N - (1 - 1/g)·M·N^(1-1/g)) on G from neighborhood counting.

    Returns inf once M reaches the order of the threshold and the bound stops binding.
    """
    _check_gain(g, strict=False)
    covered = (1.0 - 1.0 / g) * num_memories * num_vertices ** (1.0 - 1.0 / g)
    denominator = num_vertices - covered
    if denominator <= 0:
        return math.inf
    return num_vertices / denominator


def neighborhood_bounds(num_vertices: int, p: float, radius: float, eps: float) -> Tuple[float, float]:
    """((1-eps)(Np)^r, (1+2eps)(Np)^r): lower and upper sizes of a radius-r neighborhood."""
    growth = (num_vertices * p) ** radius
    return (1.0 - eps) * growth, (1.0 + 2.0 * eps) * growth


def expected_boundary_size(num_vertices: int, p: float, set_size: int) -> float:
    """Expected vertex-boundary size (N-k)(1-(1-p)^k) of a k-vertex set."""
    return (num_vertices - set_size) * (1.0 - (1.0 - p) ** set_size)


def mean_field_flow(num_vertices: int, degree_coeff: float) -> float:
    """F0 ≈ N·ln N / ln(Np) with p = c·ln N / N."""
    log_n = math.log(num_vertices)
    return num_vertices * log_n / math.log(degree_coeff * log_n)


def theory_gain_at_exponent(exponent: float, g: float) -> float:
    """Above-threshold gain for M = N^x written in x alone: g / (1 + g - g·x) = 1/(1 - (x - 1/g))."""
    _check_gain(g, strict=False)
    return g / (1.0 + g - g * exponent)
