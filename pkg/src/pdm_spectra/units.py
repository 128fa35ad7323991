"""Conversion between physical units (nm, eV, electron masses) and the
dimensionless units hbar^2 / (2 M0) = 1 with M0 the electron mass.

With a length scale L0 (nm), lengths map as z -> z / L0 and energies as
E -> E L0^2 / K, where K = hbar^2 / (2 m_e) in eV nm^2.  Masses in units of
m_e are unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import constants

from .errors import InvalidParameterError

__all__ = [
    "K_EV_NM2",
    "UnitScale",
    "to_dimensionless",
    "from_dimensionless",
    "energy_to_dimensionless",
    "energy_from_dimensionless",
]

# hbar^2 / (2 m_e) in eV nm^2, about 0.0380998
K_EV_NM2 = constants.hbar**2 / (2.0 * constants.m_e) / constants.eV * 1e18


@dataclass(frozen=True)
class UnitScale:
    """Length scale L0 in nm and the matching energy unit K / L0^2 in eV."""

    length_nm: float

    def __post_init__(self):
        if not (np.isfinite(self.length_nm) and self.length_nm > 0):
            raise InvalidParameterError(f"length scale must be positive, got {self.length_nm!r}")

    @property
    def energy_ev(self) -> float:
        return K_EV_NM2 / self.length_nm**2


def energy_to_dimensionless(E_ev, length_nm: float):
    return np.asarray(E_ev, dtype=float) / UnitScale(length_nm).energy_ev


def energy_from_dimensionless(E, length_nm: float):
    return np.asarray(E, dtype=float) * UnitScale(length_nm).energy_ev


def to_dimensionless(physical: dict, length_nm: float) -> dict:
    """Map a parameter block to dimensionless values.

    ``physical`` has optional keys ``lengths`` (nm), ``energies`` (eV) and
    ``masses`` (m_e), each a mapping from names to numbers.  The result has
    the same layout.
    """
    scale = UnitScale(length_nm)
    out = {}
    for key, factor in (("lengths", 1.0 / scale.length_nm), ("energies", 1.0 / scale.energy_ev), ("masses", 1.0)):
        block = physical.get(key, {})
        out[key] = {name: float(value) * factor for name, value in block.items()}
    unknown = set(physical) - {"lengths", "energies", "masses"}
    if unknown:
        raise InvalidParameterError(f"unknown unit blocks: {sorted(unknown)}")
    return out


def from_dimensionless(values: dict, length_nm: float) -> dict:
    """Inverse of :func:`to_dimensionless`."""
    scale = UnitScale(length_nm)
    out = {}
    for key, factor in (("lengths", scale.length_nm), ("energies", scale.energy_ev), ("masses", 1.0)):
        block = values.get(key, {})
        out[key] = {name: float(value) * factor for name, value in block.items()}
    return out
