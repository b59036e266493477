"""Signal-to-noise analysis of the intensity measurement.

Real field amplitudes E_r (reflected), E_s (scattered) and E_i (reference)
live in their own unit system: intensity is the squared total amplitude and
the shot noise of the counting distribution is sqrt(intensity).  The signal
for a parameter is the intensity term it modulates.

Without the reference arm the intensity is

    I1 = E_r^2 + 2*E_r*E_s*cos(phi_s) + E_s^2

and with it

    I2 = E_i^2 + 2*E_i*E_r*cos(phi_i) + 2*E_i*E_s*cos(phi_i - phi_s)
       + E_r^2 + 2*E_r*E_s*cos(phi_s) + E_s^2.

Mass scales linearly with E_s, so its signal is the sum of the terms linear
in E_s.  For a small scattering phase the one-arm setup only carries a
quadratic phi_s^2 signal while the two-arm setup keeps a linear one,
2*E_i*E_s*phi_s*sin(phi_i).

All functions accept floats or numpy arrays (broadcasting applies) and
raise DegenerateFieldError when a noise denominator vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFieldError


@dataclass(frozen=True)
class RealFieldTriple:
    """Real amplitudes and phases of the three detector-field components.

    Fields may be scalars or broadcastable numpy arrays.
    """

    e_r: float
    e_s: float
    e_i: float
    phi_s: float
    phi_i: float = 0.0

    def __post_init__(self):
        for name in ("e_r", "e_s", "e_i"):
            if np.any(np.asarray(getattr(self, name)) < 0):
                raise ValueError(f"{name} must be >= 0")


def _maybe_scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def _checked_sqrt(intensity, context: str):
    if np.any(np.asarray(intensity) <= 0):
        raise DegenerateFieldError(
            f"total destructive interference: zero intensity in {context}"
        )
    return np.sqrt(intensity)


def intensity_iscat(f: RealFieldTriple):
    """One-arm detector intensity I1."""
    out = (
        f.e_r**2 + 2.0 * f.e_r * f.e_s * np.cos(f.phi_s) + f.e_s**2
    )
    return _maybe_scalar(out)


def intensity_miscat(f: RealFieldTriple):
    """Two-arm detector intensity I2 (all six interference terms)."""
    out = (
        f.e_i**2
        + 2.0 * f.e_i * f.e_r * np.cos(f.phi_i)
        + 2.0 * f.e_i * f.e_s * np.cos(f.phi_i - f.phi_s)
        + f.e_r**2
        + 2.0 * f.e_r * f.e_s * np.cos(f.phi_s)
        + f.e_s**2
    )
    return _maybe_scalar(out)


def snr_mass_iscat(f: RealFieldTriple):
    """Mass SNR of the one-arm setup: 2*E_r*E_s*cos(phi_s)/sqrt(I1)."""
    signal = 2.0 * f.e_r * f.e_s * np.cos(f.phi_s)
    noise = _checked_sqrt(intensity_iscat(f), "snr_mass_iscat")
    return _maybe_scalar(signal / noise)


def snr_mass_miscat(f: RealFieldTriple):
    """Mass SNR of the two-arm setup: both E_s-linear terms over sqrt(I2)."""
    signal = 2.0 * f.e_r * f.e_s * np.cos(f.phi_s) + 2.0 * f.e_i * f.e_s * np.cos(
        f.phi_i - f.phi_s
    )
    noise = _checked_sqrt(intensity_miscat(f), "snr_mass_miscat")
    return _maybe_scalar(signal / noise)


def snr_phase_small_iscat(f: RealFieldTriple):
    """Small-phase SNR of the one-arm setup, quadratic in phi_s:
    2*phi_s^2*E_r*E_s / sqrt(E_r^2 + 2*E_r*E_s + E_s^2)."""
    signal = 2.0 * np.asarray(f.phi_s) ** 2 * f.e_r * f.e_s
    noise = _checked_sqrt(
        f.e_r**2 + 2.0 * f.e_r * f.e_s + f.e_s**2, "snr_phase_small_iscat"
    )
    return _maybe_scalar(signal / noise)


def snr_phase_small_miscat(f: RealFieldTriple):
    """Small-phase SNR of the two-arm setup, linear in phi_s:
    2*E_i*E_s*phi_s*sin(phi_i) / sqrt(E_i^2 + 2*E_i*E_r*cos(phi_i) + E_r^2)."""
    signal = 2.0 * f.e_i * f.e_s * np.asarray(f.phi_s) * np.sin(f.phi_i)
    noise = _checked_sqrt(
        f.e_i**2 + 2.0 * f.e_i * f.e_r * np.cos(f.phi_i) + f.e_r**2,
        "snr_phase_small_miscat",
    )
    return _maybe_scalar(signal / noise)


# --- sweeps -------------------------------------------------------------------


def mass_snr_sweep(
    f: RealFieldTriple, phi_i_values: np.ndarray
) -> dict[str, np.ndarray]:
    """Mass SNR of both setups over a reference-phase sweep."""
    phi_i = np.asarray(phi_i_values, dtype=float)
    swept = RealFieldTriple(f.e_r, f.e_s, f.e_i, f.phi_s, phi_i)
    return {
        "phi_i": phi_i,
        "snr_iscat": np.broadcast_to(
            snr_mass_iscat(f), phi_i.shape
        ).astype(float),
        "snr_miscat": np.asarray(snr_mass_miscat(swept), dtype=float),
    }


def phase_snr_sweep(
    f: RealFieldTriple, phi_s_values: np.ndarray
) -> dict[str, np.ndarray]:
    """Small-phase SNR of both setups over a scattering-phase sweep."""
    phi_s = np.asarray(phi_s_values, dtype=float)
    swept = RealFieldTriple(f.e_r, f.e_s, f.e_i, phi_s, f.phi_i)
    return {
        "phi_s": phi_s,
        "snr_iscat": np.asarray(snr_phase_small_iscat(swept), dtype=float),
        "snr_miscat": np.asarray(snr_phase_small_miscat(swept), dtype=float),
    }


def write_sweep_csv(path, sweep: dict[str, np.ndarray], meta=()) -> None:
    from .textio import write_csv

    names = list(sweep.keys())
    columns = [np.asarray(sweep[n]) for n in names]
    rows = (
        tuple(float(col[k]) for col in columns)
        for k in range(len(columns[0]))
    )
    write_csv(path, names, rows, header_comments=meta)
