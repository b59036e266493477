#!/usr/bin/env python3
"""Regenerate every figure dataset (ratio scans and SNR sweeps) via the CLI
presets into an output directory.

Usage: python scripts/make_figure_data.py [OUT_DIR]
"""

import sys
from pathlib import Path

from iscat_metrology.cli import main

SCAN_PRESETS = ["fig2a", "fig2b", "fig2c", "fig2d", "fig3a", "fig3b"]
SNR_PRESETS = ["figsnr1", "figsnr2"]


def run(out_dir: Path) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    for preset in SCAN_PRESETS:
        out = out_dir / f"{preset}.csv"
        rc = main(["scan", "--preset", preset, "--out", str(out)])
        if rc != 0:
            return rc
        print(f"wrote {out}")
    for preset in SNR_PRESETS:
        out = out_dir / f"{preset}.csv"
        rc = main(["snr", "--preset", preset, "--out", str(out)])
        if rc != 0:
            return rc
        print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("figure_data")
    raise SystemExit(run(target))
