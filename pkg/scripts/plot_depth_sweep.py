#!/usr/bin/env python3
"""Depth dependence of the in-plane field at the slit center.

Sweeps the slit width at two signal-line widths and plots Bx(0, z), marking
each curve's maximum. Requires matplotlib.

    python scripts/plot_depth_sweep.py --out depth_sweep.png
"""

import argparse
import dataclasses

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from slitcpw.emfield import DriveConditions, depth_profile
from slitcpw.geometry import Section, WaveguideGeometry


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--slit-widths", default="10,20,40,80")
    ap.add_argument("--out", default="depth_sweep.png")
    args = ap.parse_args()
    widths = [float(w) for w in args.slit_widths.split(",")]

    drive = DriveConditions(input_power_w=1.0)
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
    for ax, signal in zip(axes, (100.0, 1000.0)):
        base = WaveguideGeometry(signal_width_um=signal)
        for w in widths:
            geom = dataclasses.replace(base, slit_width_um=w)
            prof = depth_profile(geom, drive, Section.WITH_SLIT,
                                 (0.5, 250.0), 0.5)
            line, = ax.plot(prof.z_um, prof.bx_g, label=f"slit {w:g} um")
            ax.plot(prof.argmax_depth_um, prof.max_bx_g, "o",
                    color=line.get_color(), ms=4)
        noslit = depth_profile(base, drive, Section.WITHOUT_SLIT,
                               (0.5, 250.0), 0.5)
        ax.plot(noslit.z_um, noslit.bx_g, "--", color="gray", label="no slit")
        ax.set_title(f"signal {signal:g} um")
        ax.set_xlabel("depth z (um)")
        ax.legend(fontsize=8)
    axes[0].set_ylabel("Bx(0, z) (G)")
    fig.suptitle("In-plane field vs depth, 1 W drive")
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
