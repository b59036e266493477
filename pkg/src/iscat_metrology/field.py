"""Coherent-amplitude model of the interferometric scattering setups.

Two setups are represented by one config type:

* ``iscat``  -- scattered light interferes with the field reflected from the
  sample interface (no reference arm).
* ``miscat`` -- a Michelson reference arm with tunable magnitude ``|alpha_i|``
  and phase ``phi_i`` is added before detection.

All amplitudes are dimensionless coherent-state labels expressed relative to
the input amplitude ``|alpha_0|`` (default 1), so ``|alpha|**2`` is a photon
number.  The detector label is the sum ``alpha_r + alpha_s + alpha_i``.
Because the setup contains no photon source besides the input, each arm is
bounded by ``|alpha_0|/2``:

    |alpha_r + alpha_s| <= alpha0_mag / 2
    |alpha_i|           <= alpha0_mag / 2

The scattered amplitude is linear in the particle mass,
``alpha_s = m * s * exp(i*phi_s)`` with ``m`` in kDa and ``s`` in 1/kDa, and
``phi_s`` measured relative to the reflected field (whose phase is 0 by
convention).
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional

from .errors import EnergyBudgetError

TAU = 2.0 * math.pi

#: Complex coherent-state label.  Native complex is used everywhere; the
#: {"re", "im"} pair appears only in the JSON config schema.
ComplexAmplitude = complex

#: Absolute slack for the arm bounds, in units of alpha0_mag.
BUDGET_TOL = 1e-12

#: Detector amplitudes below this (times alpha0_mag) count as vacuum.
VACUUM_TOL = 1e-12


def wrap_angle(theta: float) -> float:
    """Reduce an angle to [0, 2*pi)."""
    r = math.fmod(theta, TAU)
    if r < 0.0:
        r += TAU
    if r >= TAU:  # fmod of a tiny negative can round up to TAU exactly
        r = 0.0
    return r


def from_polar(mag: float, phase: float) -> complex:
    """Complex amplitude from magnitude and argument."""
    return cmath.rect(mag, phase)


class EstimationTarget(Enum):
    """Which particle parameter is being estimated."""

    MASS = "mass"
    SCATTER_PHASE = "phase"


@dataclass(frozen=True)
class ParticleModel:
    """Particle with mass ``mass_kda`` (kDa), scattering strength
    ``scale_per_kda`` (1/kDa) and scattering phase ``phi_s`` (rad)."""

    mass_kda: float
    scale_per_kda: float
    phi_s: float

    def __post_init__(self):
        if not (self.mass_kda >= 0.0):
            raise ValueError(f"mass_kda must be >= 0, got {self.mass_kda}")
        if not (self.scale_per_kda > 0.0):
            raise ValueError(
                f"scale_per_kda must be > 0, got {self.scale_per_kda}"
            )
        object.__setattr__(self, "phi_s", wrap_angle(self.phi_s))


@dataclass(frozen=True)
class ReferenceArm:
    """Reference-arm setting: magnitude ``mag`` and phase ``phi_i`` (rad)."""

    mag: float
    phi_i: float

    def __post_init__(self):
        if not (self.mag >= 0.0):
            raise ValueError(f"reference magnitude must be >= 0, got {self.mag}")
        object.__setattr__(self, "phi_i", wrap_angle(self.phi_i))

    def amplitude(self) -> complex:
        return from_polar(self.mag, self.phi_i)


@dataclass(frozen=True)
class FieldConfig:
    """Full amplitude set of one setup.

    ``reference=None`` encodes the plain iSCAT setup (no reference arm, not a
    zero-magnitude arm), so reports can name the setup explicitly.
    """

    alpha_r: complex
    particle: ParticleModel
    reference: Optional[ReferenceArm] = None
    alpha0_mag: float = 1.0

    def __post_init__(self):
        if not (self.alpha0_mag > 0.0):
            raise ValueError(f"alpha0_mag must be > 0, got {self.alpha0_mag}")

    @property
    def setup(self) -> str:
        return "miscat" if self.reference is not None else "iscat"


def scattered_amplitude(p: ParticleModel) -> complex:
    """Scattered coherent-state label m*s*exp(i*phi_s)."""
    return from_polar(p.mass_kda * p.scale_per_kda, p.phi_s)


def reference_amplitude(cfg: FieldConfig) -> complex:
    """Reference-arm label; 0 in iSCAT mode."""
    if cfg.reference is None:
        return 0j
    return cfg.reference.amplitude()


def first_arm_amplitude(cfg: FieldConfig) -> complex:
    """Label of the sample arm, alpha_r + alpha_s."""
    return cfg.alpha_r + scattered_amplitude(cfg.particle)


def validate_energy(cfg: FieldConfig) -> list[str]:
    """Check the photon-budget bounds; return one message per violation.

    An empty list means the configuration is valid.  The bounds carry an
    absolute slack of BUDGET_TOL * alpha0_mag so round-off at the boundary
    does not trip them.
    """
    bound = 0.5 * cfg.alpha0_mag
    slack = BUDGET_TOL * cfg.alpha0_mag
    violations = []
    first = abs(first_arm_amplitude(cfg))
    if first > bound + slack:
        violations.append(
            f"sample arm |alpha_r + alpha_s| = {first!r} exceeds the bound "
            f"alpha0_mag/2 = {bound!r}"
        )
    if cfg.reference is not None and cfg.reference.mag > bound + slack:
        violations.append(
            f"reference arm |alpha_i| = {cfg.reference.mag!r} exceeds the "
            f"bound alpha0_mag/2 = {bound!r}"
        )
    return violations


def detector_amplitude(cfg: FieldConfig) -> complex:
    """Total label at the detector, alpha_r + alpha_s + alpha_i.

    Raises EnergyBudgetError naming the violated bound if the configuration
    breaks the photon budget.
    """
    violations = validate_energy(cfg)
    if violations:
        raise EnergyBudgetError("; ".join(violations))
    return first_arm_amplitude(cfg) + reference_amplitude(cfg)


def target_derivative(cfg: FieldConfig, target: EstimationTarget) -> complex:
    """Derivative of the scattered label with respect to the target.

    Mass: s*exp(i*phi_s) (independent of m).  Scattering phase:
    i*m*s*exp(i*phi_s), i.e. the mass derivative rotated by pi/2 and scaled
    by m.
    """
    p = cfg.particle
    d = from_polar(p.scale_per_kda, p.phi_s)
    if target is EstimationTarget.MASS:
        return d
    return 1j * p.mass_kda * d


def with_target_value(
    cfg: FieldConfig, target: EstimationTarget, value: float
) -> FieldConfig:
    """Copy of ``cfg`` with the targeted parameter set to ``value``."""
    p = cfg.particle
    if target is EstimationTarget.MASS:
        particle = ParticleModel(value, p.scale_per_kda, p.phi_s)
    else:
        particle = ParticleModel(p.mass_kda, p.scale_per_kda, value)
    return FieldConfig(cfg.alpha_r, particle, cfg.reference, cfg.alpha0_mag)


def target_value(cfg: FieldConfig, target: EstimationTarget) -> float:
    """Current value of the targeted parameter."""
    if target is EstimationTarget.MASS:
        return cfg.particle.mass_kda
    return cfg.particle.phi_s


# --- JSON config schema -----------------------------------------------------
#
# {"alpha0_mag": float,
#  "alpha_r": {"re": float, "im": float},
#  "particle": {"mass_kda": float, "scale_per_kda": float, "phi_s": float},
#  "reference": {"mag": float, "phi_i": float} | null}


def complex_to_json(z: complex) -> dict:
    return {"re": z.real, "im": z.imag}


def complex_from_json(d: dict) -> complex:
    return complex(float(d["re"]), float(d["im"]))


def config_to_dict(cfg: FieldConfig) -> dict:
    ref = None
    if cfg.reference is not None:
        ref = {"mag": cfg.reference.mag, "phi_i": cfg.reference.phi_i}
    return {
        "alpha0_mag": cfg.alpha0_mag,
        "alpha_r": complex_to_json(cfg.alpha_r),
        "particle": {
            "mass_kda": cfg.particle.mass_kda,
            "scale_per_kda": cfg.particle.scale_per_kda,
            "phi_s": cfg.particle.phi_s,
        },
        "reference": ref,
    }


def config_from_dict(d: dict) -> FieldConfig:
    particle = ParticleModel(
        float(d["particle"]["mass_kda"]),
        float(d["particle"]["scale_per_kda"]),
        float(d["particle"]["phi_s"]),
    )
    reference = None
    if d.get("reference") is not None:
        reference = ReferenceArm(
            float(d["reference"]["mag"]), float(d["reference"]["phi_i"])
        )
    return FieldConfig(
        alpha_r=complex_from_json(d["alpha_r"]),
        particle=particle,
        reference=reference,
        alpha0_mag=float(d.get("alpha0_mag", 1.0)),
    )


def load_config(path) -> FieldConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return config_from_dict(json.load(fh))


def save_config(cfg: FieldConfig, path) -> None:
    Path(path).write_text(
        json.dumps(config_to_dict(cfg), indent=2) + "\n", encoding="utf-8"
    )
