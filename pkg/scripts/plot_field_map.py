#!/usr/bin/env python3
"""Arrow plot of the microwave magnetic field around the signal line.

Renders the with-slit and without-slit cross-sections side by side, arrows
colored by |B|. Requires matplotlib.

    python scripts/plot_field_map.py --out field_maps.png
"""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from slitcpw.emfield import DriveConditions, GridSpec, field_map
from slitcpw.geometry import Section, WaveguideGeometry


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--power-w", type=float, default=1.0)
    ap.add_argument("--out", default="field_maps.png")
    args = ap.parse_args()

    geom = WaveguideGeometry()
    drive = DriveConditions(input_power_w=args.power_w)
    grid = GridSpec(-150.0, 150.0, 8.0, 2.0, 60.0, 4.0)

    fig, axes = plt.subplots(1, 2, figsize=(12, 4), sharey=True)
    for ax, section, title in [
        (axes[0], Section.WITH_SLIT, "through the slit"),
        (axes[1], Section.WITHOUT_SLIT, "away from the slit"),
    ]:
        fmap = field_map(geom, drive, section, grid)
        x = np.array([s.x_um for s in fmap.samples])
        z = np.array([s.z_um for s in fmap.samples])
        bx = np.array([s.bx_g for s in fmap.samples])
        bz = np.array([s.bz_g for s in fmap.samples])
        mag = np.hypot(bx, bz)
        ax.quiver(x, -z, bx, bz, mag, cmap="viridis", pivot="mid",
                  norm=matplotlib.colors.LogNorm(vmin=0.3, vmax=30.0))
        half_sig = geom.signal_width_um / 2
        half_slit = geom.slit_width_um / 2
        if section is Section.WITH_SLIT:
            strips = [(-half_sig, -half_slit), (half_slit, half_sig)]
        else:
            strips = [(-half_sig, half_sig)]
        inner = half_sig + geom.gap_width_um
        strips += [(-inner - geom.ground_width_um, -inner),
                   (inner, inner + geom.ground_width_um)]
        for lo, hi in strips:
            ax.fill_between([lo, hi], 0, 4, color="black")
        ax.set_title(title)
        ax.set_xlabel("x (um)")
        ax.set_xlim(-160, 160)
    axes[0].set_ylabel("-z (um, depth)")
    fig.suptitle("Microwave magnetic field, 1 W drive")
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
