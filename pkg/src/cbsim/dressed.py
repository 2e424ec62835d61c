"""Closed-form dressed-state predictions for the backscattering spectrum.

Strong driving splits the atom-field product states into doublets separated
by the generalized Rabi frequency.  Emission on the detected arm then shows
seven resonances: the driven transition's triplet at 0 and +-Omega_R, an
asymmetric doublet at +(Omega_R - delta)/2 and -(Omega_R + delta)/2 from
the detected transition terminating on the split ground sublevels, and a
doublet at +-2*Omega_R from frequency-shifting (Raman) rescattering of the
triplet sidebands.  Frequencies are offsets from the drive frequency in
units of gamma.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import CoverageError

PEAK_LABELS = (
    "mollow_central",
    "mollow_plus",
    "mollow_minus",
    "autler_townes_plus",
    "autler_townes_minus",
    "hyper_raman_plus",
    "hyper_raman_minus",
)


def generalized_rabi(rabi, detuning):
    """Omega_R = sqrt(rabi^2 + detuning^2)."""
    return math.hypot(rabi, detuning)


@dataclass(frozen=True)
class PeakSet:
    """The seven predicted resonance positions (offsets from the drive)."""

    mollow_central: float
    mollow_plus: float
    mollow_minus: float
    autler_townes_plus: float
    autler_townes_minus: float
    hyper_raman_plus: float
    hyper_raman_minus: float

    def as_dict(self):
        return {label: getattr(self, label) for label in PEAK_LABELS}

    @property
    def positions(self):
        """All seven positions, sorted ascending."""
        return tuple(sorted(self.as_dict().values()))


def peak_positions(rabi, detuning):
    """Predicted peak positions {0, +-Omega_R, (Omega_R -+ delta)/2 pair, +-2 Omega_R}."""
    omega_r = generalized_rabi(rabi, detuning)
    return PeakSet(
        mollow_central=0.0,
        mollow_plus=omega_r,
        mollow_minus=-omega_r,
        autler_townes_plus=0.5 * (omega_r - detuning),
        autler_townes_minus=-0.5 * (omega_r + detuning),
        hyper_raman_plus=2.0 * omega_r,
        hyper_raman_minus=-2.0 * omega_r,
    )


@dataclass(frozen=True)
class DressedDoublet:
    """Splitting of the two dressed ground-sublevel branches.

    ``upper_weights`` are the bare-state populations (ground, driven-excited)
    of the upper-energy branch; equal mixing at zero detuning, no mixing at
    zero drive.
    """

    splitting: float
    upper_weights: tuple


def dressed_energies(rabi, detuning):
    """Diagonalize the driven two-level block and report the branch splitting."""
    h = np.array([[0.0, 0.5 * rabi], [0.5 * rabi, -detuning]])
    vals, vecs = np.linalg.eigh(h)
    upper = vecs[:, np.argmax(vals)]
    return DressedDoublet(
        splitting=float(vals.max() - vals.min()),
        upper_weights=(float(abs(upper[0]) ** 2), float(abs(upper[1]) ** 2)),
    )


def local_extrema(values, kind="max", min_relative_height=0.0):
    """Indices of strict interior local extrema of a sampled curve.

    ``kind`` selects maxima, minima, or both.  With a positive
    ``min_relative_height``, extrema whose magnitude is below that fraction
    of the overall maximum magnitude are discarded (guards against ripple
    in flat tails).
    """
    y = np.asarray(values, dtype=float)
    if y.size < 3:
        return np.array([], dtype=int)
    interior = np.arange(1, y.size - 1)
    is_max = (y[interior] > y[interior - 1]) & (y[interior] > y[interior + 1])
    is_min = (y[interior] < y[interior - 1]) & (y[interior] < y[interior + 1])
    if kind == "max":
        mask = is_max
    elif kind == "min":
        mask = is_min
    elif kind == "both":
        mask = is_max | is_min
    else:
        raise ValueError(f"kind must be 'max', 'min', or 'both', got {kind!r}")
    idx = interior[mask]
    if min_relative_height > 0.0 and idx.size:
        floor = min_relative_height * np.abs(y).max()
        idx = idx[np.abs(y[idx]) >= floor]
    return idx


@dataclass(frozen=True)
class PeakMatch:
    label: str
    predicted: float
    found: float
    offset: float
    passed: bool


@dataclass(frozen=True)
class PeakReport:
    tolerance: float
    matches: tuple

    @property
    def all_passed(self):
        return all(m.passed for m in self.matches)


def validate_spectrum(spectrum, peaks, tolerance):
    """Match predicted peaks against the extrema of a computed spectrum.

    Background-type spectra are searched for local maxima; interference-type
    spectra for extrema of either sign, since their resonances may carry
    negative weight or be dispersive.  Every predicted position must lie
    inside the grid, otherwise :class:`CoverageError` is raised before any
    matching.
    """
    grid = np.asarray(spectrum.omega)
    density = np.asarray(spectrum.density)
    predicted = peaks.as_dict()
    lo, hi = grid.min(), grid.max()
    for label, pos in predicted.items():
        if not (lo <= pos <= hi):
            raise CoverageError(
                f"predicted peak {label} at {pos:g} lies outside the grid [{lo:g}, {hi:g}]"
            )
    kind = "max" if getattr(spectrum, "kind", "background") == "background" else "both"
    idx = local_extrema(density, kind=kind, min_relative_height=1e-9)
    if idx.size == 0:
        raise CoverageError("spectrum has no local extrema to match against")
    extrema_pos = grid[idx]
    matches = []
    for label in PEAK_LABELS:
        pos = predicted[label]
        found = float(extrema_pos[np.argmin(np.abs(extrema_pos - pos))])
        offset = abs(found - pos)
        matches.append(PeakMatch(label, float(pos), found, offset, offset <= tolerance))
    return PeakReport(tolerance=float(tolerance), matches=tuple(matches))
