#!/usr/bin/env python3
"""Monte Carlo check that the MLE variance tracks the Cramer-Rao bound.

Runs two desk-scale two-arm configurations sharing the same particle and
detector photon number: one with the reference arm tuned to saturation
(cos^2 = 1) and one parked at cos^2 = 1/4, whose variance should come out
four times larger.

Usage: python scripts/validate_crb.py [--trials N] [--samples N] [--seed N]
"""

import argparse
import cmath
import math

from iscat_metrology import photonstats, tuner
from iscat_metrology.field import (
    EstimationTarget,
    FieldConfig,
    ParticleModel,
    ReferenceArm,
    detector_amplitude,
    first_arm_amplitude,
)

PI = math.pi


def build_configs():
    base = FieldConfig(
        alpha_r=2.3,
        particle=ParticleModel(66.0, 2.0 / 66.0, 5 * PI / 6),
        alpha0_mag=10.0,
    )
    phases = tuner.phase_solutions(base, EstimationTarget.MASS, 4.5)
    tuned = max(
        (
            FieldConfig(base.alpha_r, base.particle, ReferenceArm(4.5, p), 10.0)
            for p in phases
        ),
        key=lambda c: abs(detector_amplitude(c)),
    )
    sol = tuner.saturating_reference_set(base, EstimationTarget.MASS)
    t_mag = abs(detector_amplitude(tuned))
    alpha_i = t_mag * cmath.exp(1j * (sol.psi - PI / 3)) - first_arm_amplitude(base)
    quarter = FieldConfig(
        base.alpha_r,
        base.particle,
        ReferenceArm(abs(alpha_i), cmath.phase(alpha_i)),
        10.0,
    )
    return tuned, quarter


def run(trials: int, samples: int, seed: int) -> None:
    tuned, quarter = build_configs()
    print(f"trials={trials} samples_per_trial={samples} seed={seed}")
    reports = {}
    for name, cfg in (("saturated", tuned), ("cos^2=1/4", quarter)):
        rep = photonstats.crb_validation(
            cfg, EstimationTarget.MASS, samples, trials, seed
        )
        reports[name] = rep
        print(
            f"{name:>10}: var={rep.empirical_variance:.5f} kDa^2  "
            f"crb={rep.crb:.5f} kDa^2  var/crb={rep.ratio_var_over_crb:.4f} "
            f"(+-{rep.ratio_standard_error:.4f})  bias={rep.bias:+.4f} kDa"
        )
    ratio = (
        reports["cos^2=1/4"].empirical_variance
        / reports["saturated"].empirical_variance
    )
    print(f"variance ratio quarter/saturated = {ratio:.3f} (expected 4)")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--samples", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()
    run(args.trials, args.samples, args.seed)
