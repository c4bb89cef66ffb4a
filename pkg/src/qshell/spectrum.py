"""Single-particle energies (units of hbar*omega_0 = 1) for the oscillator models.

Models:

    Q_EXACT     deformed u_q(3) > so_q(3) oscillator
    Q_TAYLOR2   its expansion to second order in tau (inspection only)
    NILSSON     modified oscillator with an l(l+1) - <L^2>_N correction
    PLAIN_HO    isotropic harmonic oscillator, E = n
    PSEUDO_3NL  empirical 3n+l grouping, n = radial nodes, E = 3n + l
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .qmath import DeformationParameter, as_deformation, q_number

# hard stop for band enumeration; spectra bounded from above (tau < 0,
# large Nilsson mu') never pass the cut and would otherwise loop forever
MAX_BANDS = 400


class SpectrumError(ValueError):
    """Levels up to the requested cut cannot be enumerated."""


class Model(str, enum.Enum):
    Q_EXACT = "q-exact"
    Q_TAYLOR2 = "q-taylor2"
    NILSSON = "nilsson"
    PLAIN_HO = "plain-ho"
    PSEUDO_3NL = "pseudo-3nl"

    @property
    def oscillator_family(self) -> bool:
        return self is not Model.PSEUDO_3NL


@dataclass(frozen=True)
class Level:
    n: int
    l: int
    energy: float

    @property
    def degeneracy(self) -> int:
        return 2 * (2 * self.l + 1)


def band_ls(n: int) -> range:
    """Angular momenta l = n, n-2, ..., 1 or 0, returned in ascending order."""
    return range(n % 2, n + 1, 2)


def check_nl(n: int, l: int) -> None:
    if not (isinstance(n, int) and isinstance(l, int)):
        raise ValueError(f"n and l must be integers, got n={n!r}, l={l!r}")
    if n < 0 or l < 0 or l > n or (n - l) % 2:
        raise ValueError(f"invalid oscillator level (n={n}, l={l})")


def casimir_q(l: int, dp: DeformationParameter | float) -> float:
    """so_q(3) Casimir eigenvalue [l][l+1]."""
    return q_number(l, dp) * q_number(l + 1, dp)


def energy_q_exact(n: int, l: int, dp: DeformationParameter | float) -> float:
    """E = [n] q^(n+1) - q (q - 1/q) / [2] * [l][l+1]."""
    check_nl(n, l)
    dp = as_deformation(dp)
    q = dp.q
    return q_number(n, dp) * q ** (n + 1) - q * (q - 1.0 / q) / q_number(2, dp) * casimir_q(l, dp)


def energy_q_taylor(n: int, l: int, tau: float) -> float:
    check_nl(n, l)
    ll = l * (l + 1)
    return (
        n
        - tau * (ll - n * (n + 1))
        - tau**2 * (ll - n * (n + 1) * (2 * n + 1) / 3.0)
    )


def mean_l2(n: int) -> Fraction:
    """<L^2>_N = N(N+3)/2, the band average subtracted in the Nilsson term."""
    return Fraction(n * (n + 3), 2)


def energy_nilsson(n: int, l: int, mu_prime: float) -> float:
    check_nl(n, l)
    if not mu_prime >= 0:
        raise ValueError(f"mu_prime must be >= 0, got {mu_prime!r}")
    return n - mu_prime * float(l * (l + 1) - mean_l2(n))


def energy_plain_ho(n: int, l: int) -> float:
    check_nl(n, l)
    return float(n)


def energy_pseudo_3nl(n: int, l: int) -> float:
    if n < 0 or l < 0:
        raise ValueError(f"invalid (n={n}, l={l}) for the 3n+l scheme")
    return float(3 * n + l)


def _energy_rule(model: Model, tau: float | None, mu_prime: float | None):
    if model is Model.Q_EXACT:
        if tau is None:
            raise ValueError("model q-exact needs tau")
        dp = DeformationParameter(tau)
        return lambda n, l: energy_q_exact(n, l, dp)
    if model is Model.Q_TAYLOR2:
        if tau is None:
            raise ValueError("model q-taylor2 needs tau")
        return lambda n, l: energy_q_taylor(n, l, tau)
    if model is Model.NILSSON:
        if mu_prime is None:
            raise ValueError("model nilsson needs mu_prime")
        return lambda n, l: energy_nilsson(n, l, mu_prime)
    if model is Model.PLAIN_HO:
        return energy_plain_ho
    raise ValueError(f"no band energy rule for {model}")


def enumerate_levels(
    model: Model | str,
    e_cut: float,
    tau: float | None = None,
    mu_prime: float | None = None,
) -> list[Level]:
    """All levels of `model` with energy <= e_cut, in band order (not sorted).

    Bands are generated until two consecutive bands have their lowest
    member above the cut.
    """
    model = Model(model)
    if not (math.isfinite(e_cut) and e_cut > 0):
        raise ValueError(f"e_cut must be a positive finite number, got {e_cut!r}")
    if model is Model.PSEUDO_3NL:
        return _enumerate_pseudo_3nl(e_cut)

    energy = _energy_rule(model, tau, mu_prime)
    levels: list[Level] = []
    above = 0
    for n in range(MAX_BANDS):
        band = [Level(n, l, energy(n, l)) for l in band_ls(n)]
        if min(lv.energy for lv in band) > e_cut:
            above += 1
            if above == 2:
                return levels
        else:
            above = 0
            levels.extend(lv for lv in band if lv.energy <= e_cut)
    raise SpectrumError(
        f"{model.value}: band minima stay below e_cut={e_cut} for {MAX_BANDS} bands"
    )


def _enumerate_pseudo_3nl(e_cut: float) -> list[Level]:
    k_max = math.floor(e_cut)
    return [
        Level(n, k - 3 * n, float(k))
        for k in range(k_max + 1)
        for n in range(k // 3 + 1)
    ]


def pseudo_3nl_fill(k_max: int) -> list[tuple[int, int, int]]:
    """Occupancy of each 3n+l group and the running total, for k = 0..k_max."""
    if not isinstance(k_max, int) or k_max < 0:
        raise ValueError(f"k_max must be a non-negative integer, got {k_max!r}")
    out = []
    total = 0
    for k in range(k_max + 1):
        occ = sum(2 * (2 * (k - 3 * n) + 1) for n in range(k // 3 + 1))
        total += occ
        out.append((k, occ, total))
    return out
