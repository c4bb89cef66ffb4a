"""q-number arithmetic for real deformation q = exp(tau)."""
from __future__ import annotations

import math
from dataclasses import dataclass

# below this |tau| the q-number is returned as its classical limit
TAU_EPS = 1e-12


@dataclass(frozen=True)
class DeformationParameter:
    """Deformation of the oscillator, stored as tau with q = exp(tau)."""

    tau: float

    def __post_init__(self):
        if not math.isfinite(self.tau):
            raise ValueError(f"tau must be finite, got {self.tau!r}")

    @property
    def q(self) -> float:
        return math.exp(self.tau)

    @property
    def is_classical(self) -> bool:
        return abs(self.tau) < TAU_EPS


def as_deformation(dp: DeformationParameter | float) -> DeformationParameter:
    if isinstance(dp, DeformationParameter):
        return dp
    return DeformationParameter(float(dp))


def q_number(x: float, dp: DeformationParameter | float) -> float:
    r"""Return the q-number [x] = (q^x - q^-x) / (q - q^-1).

    Evaluated as sinh(x*tau)/sinh(tau), which avoids the cancellation of
    the power form for small tau. For |tau| < 1e-12 the limit value x is
    returned directly.

    >>> q_number(1, 0.5)
    1.0
    >>> q_number(3, 0.0)
    3.0
    """
    dp = as_deformation(dp)
    if not math.isfinite(x):
        raise ValueError(f"x must be finite, got {x!r}")
    if dp.is_classical:
        return float(x)
    return math.sinh(x * dp.tau) / math.sinh(dp.tau)


def q_number_power_form(x: float, dp: DeformationParameter | float) -> float:
    """[x] evaluated literally from powers of q; only sensible away from tau = 0."""
    dp = as_deformation(dp)
    q = dp.q
    return (q**x - q ** (-x)) / (q - 1.0 / q)
